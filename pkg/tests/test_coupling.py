import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levytail.coupling import (
    EXACT_CONSTANTS,
    BoundConstants,
    LevyTriplet,
    coupling_distance,
    coupling_semimetric,
    default_lambda_grid,
    path_space_bound,
    theorem_bound,
)
from levytail.measures import PowerLawTail, StableTailMeasure

STABLE_A = StableTailMeasure(1.4)
STABLE_B = StableTailMeasure(1.8)
ROUNDED = BoundConstants(0.46, 1.27, 1.40, 5.42, 2.28, 5.20, 39.48)

alphas = st.floats(0.6, 1.9)
lams = st.floats(0.05, 50.0)
levels = st.floats(0.1, 10.0)


def test_identical_measures_give_zero():
    assert coupling_semimetric(STABLE_A, StableTailMeasure(1.4), 3.0, 1.0) == 0.0
    assert coupling_distance(STABLE_A, STABLE_A).value == 0.0


@settings(max_examples=15, deadline=None)
@given(a=alphas, b=alphas, lam=lams, s=levels)
def test_symmetric_and_capped(a, b, lam, s):
    p, q = StableTailMeasure(a), StableTailMeasure(b)
    d = coupling_semimetric(p, q, lam, s)
    assert d == pytest.approx(coupling_semimetric(q, p, lam, s), rel=1e-8, abs=1e-12)
    assert 0.0 <= d <= math.sqrt(lam * s) * (1 + 1e-15)


@settings(max_examples=10, deadline=None)
@given(a=alphas, b=alphas, c=alphas, lam=lams, s=levels)
def test_triangle_inequality(a, b, c, lam, s):
    p, q, r = StableTailMeasure(a), StableTailMeasure(b), StableTailMeasure(c)
    lhs = coupling_semimetric(p, r, lam, s)
    assert lhs <= coupling_semimetric(p, q, lam, s) + coupling_semimetric(q, r, lam, s) + 1e-8


@settings(max_examples=10, deadline=None)
@given(a=alphas, b=alphas, lam=lams, s=levels)
def test_non_decreasing_in_truncation(a, b, lam, s):
    p, q = StableTailMeasure(a), StableTailMeasure(b)
    assert coupling_semimetric(p, q, lam, s) <= coupling_semimetric(p, q, lam, 2 * s) + 1e-9


def test_single_power_law_pair_against_direct_integral():
    # both cut where the tail mass is lam; the normalized tails are Pareto laws
    p, q = PowerLawTail(1.5, 1.0, 4.0), PowerLawTail(2.5, 1.0, 4.0)
    lam = 2.0
    rp, rq = 2.0 ** (1 / 1.5), 2.0 ** (1 / 2.5)
    from scipy.integrate import quad

    f = lambda u: min((rp * (1 - u) ** (-1 / 1.5) - rq * (1 - u) ** (-1 / 2.5)) ** 2, 1.0)
    v = quad(f, 0, 1, points=[0.5, 0.9, 0.99], limit=400, epsabs=1e-13)[0]
    assert coupling_semimetric(p, q, lam, 1.0) == pytest.approx(math.sqrt(lam * v), rel=1e-8)


def test_worked_example_frozen_values():
    # closed-form quantiles integrated with scipy quad
    p, q = StableTailMeasure(1.4, upper=1.0), StableTailMeasure(1.8, upper=1.0)
    expected = {10: 0.13398580591068165, 100: 0.4219094553395789, 1000: 0.7287485387887392}
    for lam, val in expected.items():
        assert coupling_semimetric(p, q, lam, math.inf) == pytest.approx(val, rel=1e-8)


def test_lambda_grid_capped_by_total_mass():
    g = default_lambda_grid(PowerLawTail(1.5, 1.0, 3.0), STABLE_A)
    assert g[-1] == 3.0 and np.all(np.diff(g) > 0)
    assert default_lambda_grid(STABLE_A, STABLE_B).size == 64


def test_coupling_distance_frozen_and_stable_under_refinement():
    coarse = coupling_distance(STABLE_A, STABLE_B, 1.0)
    assert coarse.value == pytest.approx(1.0081387027597453, rel=1e-9)
    assert coarse.argmax == pytest.approx(1000.0)
    fine = coupling_distance(STABLE_A, STABLE_B, 1.0, lambda_grid=np.logspace(-2, 3, 253), workers=2)
    assert fine.value == pytest.approx(coarse.value, rel=1e-12)
    assert np.all(fine.values <= np.sqrt(fine.lambda_grid) + 1e-12)


def test_exact_constants():
    c = EXACT_CONSTANTS
    assert c.c0 == pytest.approx(0.4636476090008061)
    assert c.c1 == pytest.approx(4 / math.pi)
    assert c.c6 == pytest.approx(4 * math.pi**2)
    assert list(c.as_dict()) == [f"C{i}" for i in range(7)]


def test_path_space_bound_arithmetic():
    c = BoundConstants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    q1, q2, b = path_space_bound(0.5, 2.0, 1.0, 0.1, 0.2, 0.5, 9.0, 4.0, 1.0, c)
    assert q1 == pytest.approx(2 * 0.25 + 2.0 + 1.0 + 0.3 + 0.25 + 2.0 * 0.5)
    assert q2 == pytest.approx(math.sqrt(1.0 + 0.3 + 0.25))
    assert b == pytest.approx(q1 * math.e + q2)
    # the start-point term saturates at 2
    assert path_space_bound(10.0, 0, 0, 0, 0, 0, 0, 1, 1, c)[0] == 2.0


def test_theorem_bound_stable_example():
    t1, t2 = LevyTriplet(0.0, 0.0, STABLE_A), LevyTriplet(0.0, 0.0, STABLE_B)
    res = theorem_bound(t1, t2, 0.0, 0.0, ell=1.0, lam=1.0)
    # cutoffs (2/alpha)^(1/alpha); small-jump variance 2 rho^(2-alpha)/(2-alpha)
    small = tuple(2 * (2 / a) ** ((2 - a) / a) / (2 - a) for a in (1.4, 1.8))
    assert res.small_jumps == pytest.approx(small, rel=1e-10)
    assert res.semimetric == pytest.approx(0.6920183144665422, rel=1e-8)
    assert res.q1 == pytest.approx(23.52117507009178, rel=1e-8)
    assert res.q2 == pytest.approx(30.44262275482504, rel=1e-8)
    assert res.bound == pytest.approx(233.74847663954986, rel=1e-8)


def test_theorem_bound_identical_triplets():
    t = LevyTriplet(0.3, 2.0, STABLE_A)
    res = theorem_bound(t, t, 0.0, 0.0, 1.0, 1.0)
    assert res.semimetric == 0.0
    # only the small-jump variances survive
    v = sum(res.small_jumps)
    c = EXACT_CONSTANTS
    assert res.q1 == pytest.approx(c.c1 * v)
    assert res.q2 == pytest.approx(c.c1 * math.sqrt(c.c6 * v))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        LevyTriplet(0.0, -1.0, STABLE_A)
    with pytest.raises(ValueError):
        theorem_bound(LevyTriplet(0, 0, STABLE_A), LevyTriplet(0, 0, STABLE_B), 0, 0, ell=0.0, lam=1.0)
    with pytest.raises(ValueError):
        coupling_distance(STABLE_A, STABLE_B, lambda_grid=[])
