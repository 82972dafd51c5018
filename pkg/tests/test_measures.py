import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from levytail.errors import InfiniteSecondMomentError
from levytail.measures import (
    GaussianJumpLaw,
    PowerLawTail,
    StableTailMeasure,
    cutoff_for_intensity,
    normalized_tail,
    small_jump_variance,
    tail_mass,
)
from levytail.quadrature import adaptive_simpson
from levytail.references import PowerLawQuantile, TwoSidedQuantile, partial_integrals


def test_tail_mass_examples():
    assert tail_mass(PowerLawTail(1.6, 0.5), 0.5) == 1.0
    assert tail_mass(PowerLawTail(2.0, 1.0), 2.0) == pytest.approx(0.25, rel=1e-15)
    assert tail_mass(StableTailMeasure(1.0, 1.0, 1.0), 1.0) == pytest.approx(2.0, rel=1e-15)


def test_tail_mass_rejects_non_positive_level():
    with pytest.raises(ValueError):
        tail_mass(PowerLawTail(1.6, 0.5), 0.0)


def test_cutoff_examples():
    assert cutoff_for_intensity(PowerLawTail(1.6, 0.5), 1.0) == pytest.approx(0.5, rel=1e-15)
    assert cutoff_for_intensity(StableTailMeasure(1.0), 2.0) == pytest.approx(1.0, rel=1e-15)
    # frozen from bisection of r -> tail_mass(r) - 0.5
    assert cutoff_for_intensity(PowerLawTail(1.6, 0.5), 0.5) == pytest.approx(0.7711054127039652, rel=1e-12)


def test_cutoff_errors():
    with pytest.raises(ValueError):
        cutoff_for_intensity(PowerLawTail(1.6, 0.5, intensity=2.0), 2.5)
    with pytest.raises(ValueError):
        cutoff_for_intensity(StableTailMeasure(1.2), 0.0)


@pytest.mark.parametrize(
    "measure",
    [
        PowerLawTail(1.6, 0.5, 3.0),
        PowerLawTail(0.8, 2.0, 1.0, side="negative"),
        StableTailMeasure(1.3, 0.5, 2.0),
        StableTailMeasure(1.4, 1.0, 1.0, upper=1.0),
        GaussianJumpLaw(1.5, 2.0),
    ],
)
def test_cutoff_inverts_tail_mass(measure):
    mass = tail_mass(measure, 1e-3) if isinstance(measure, StableTailMeasure) else measure.intensity
    for lam in np.geomspace(1e-3 * mass, mass, 25):
        rho = cutoff_for_intensity(measure, lam)
        if rho > 0:
            assert tail_mass(measure, rho) == pytest.approx(lam, rel=1e-10)


def test_tail_mass_non_increasing():
    m = StableTailMeasure(0.7, 0.3, 1.0)
    r = np.geomspace(1e-3, 1e3, 50)
    masses = [tail_mass(m, x) for x in r]
    assert all(a >= b for a, b in zip(masses, masses[1:]))


def test_power_law_density_integrates_to_intensity():
    m = PowerLawTail(1.6, 0.5, 2.5)
    dens = lambda z: m.intensity * m.alpha * m.rho0**m.alpha * z ** (-1 - m.alpha)
    assert quad(dens, m.rho0, np.inf)[0] == pytest.approx(2.5, rel=1e-10)


def test_normalized_tail_examples():
    ref = normalized_tail(PowerLawTail(1.0, 1.0), 1.0)
    assert float(ref.quantile(0.5)) == pytest.approx(2.0, rel=1e-15)
    assert float(normalized_tail(PowerLawTail(1.7, 0.3), 0.9).quantile(0.0)) == pytest.approx(0.9)
    assert float(normalized_tail(PowerLawTail(2.0, 1.0), 1.0).partial_q1(0.0, 1.0)) == pytest.approx(2.0, rel=1e-14)


def test_reanchoring_keeps_exponent():
    m = PowerLawTail(1.3, 0.5)
    ref = normalized_tail(m, 1.7)
    assert isinstance(ref, PowerLawQuantile)
    assert (ref.alpha, ref.rho) == (1.3, 1.7)
    # conditional law of the measure beyond 1.7
    x = np.array([1.8, 3.0, 10.0])
    cond = 1 - tail_mass(m, x[0]) / tail_mass(m, 1.7), 1 - tail_mass(m, x[1]) / tail_mass(m, 1.7)
    assert ref.cdf(x[:2]) == pytest.approx(cond, rel=1e-13)


def test_normalized_tail_below_support_edge_rejected():
    with pytest.raises(ValueError):
        normalized_tail(PowerLawTail(1.3, 0.5), 0.4)


def test_negative_power_law_is_reflected():
    ref = normalized_tail(PowerLawTail(1.5, 0.5, side="negative"), 0.5)
    assert isinstance(ref, TwoSidedQuantile)
    assert float(ref.quantile(1.0)) == pytest.approx(-0.5)
    assert float(ref.quantile(0.75)) == pytest.approx(-0.5 * 0.75 ** (-1 / 1.5))


def test_stable_normalized_tail_split():
    m = StableTailMeasure(1.2, 1.0, 3.0)
    ref = normalized_tail(m, 0.8)
    assert ref.weight_neg == pytest.approx(0.25)
    assert float(ref.cdf(-0.8)) == pytest.approx(0.25)
    assert float(ref.cdf(0.0)) == pytest.approx(0.25)
    # mass of the normalized tail beyond x > rho equals nu(z > x) / nu(|z| > rho)
    x = 2.5
    expected = 3.0 * x**-1.2 / 1.2 / tail_mass(m, 0.8)
    assert 1 - float(ref.cdf(x)) == pytest.approx(expected, rel=1e-12)


def test_gaussian_is_not_a_reference():
    with pytest.raises(TypeError):
        normalized_tail(GaussianJumpLaw(), 1.0)


def test_partial_integral_examples():
    assert partial_integrals(PowerLawQuantile(4.0, 1.0), 0.0, 1.0)[1] == pytest.approx(2.0, rel=1e-14)
    assert partial_integrals(PowerLawQuantile(1.0, 1.0), 0.0, 0.5)[0] == pytest.approx(math.log(2), rel=1e-14)
    # frozen from 30-digit mpmath quadrature
    q1, q2 = partial_integrals(PowerLawQuantile(1.6, 0.5), 0.25, 0.75)
    assert q1 == pytest.approx(0.404174750682212926581936786225, rel=1e-12)
    assert q2 == pytest.approx(0.339643630549553129248350567504, rel=1e-12)


def test_partial_integral_matches_own_adaptive_simpson():
    ref = PowerLawQuantile(1.6, 0.5)
    q1, q2 = partial_integrals(ref, 0.25, 0.75)
    assert q1 == pytest.approx(adaptive_simpson(ref.quantile, 0.25, 0.75, tol=1e-13), rel=1e-10)
    assert q2 == pytest.approx(adaptive_simpson(lambda u: ref.quantile(u) ** 2, 0.25, 0.75, tol=1e-13), rel=1e-10)


def test_infinite_second_moment_signal():
    with pytest.raises(InfiniteSecondMomentError):
        partial_integrals(PowerLawQuantile(2.0, 1.0), 0.5, 1.0)
    with pytest.raises(InfiniteSecondMomentError):
        partial_integrals(PowerLawQuantile(1.5, 1.0), 0.0, 1.0)
    assert math.isfinite(partial_integrals(PowerLawQuantile(1.5, 1.0), 0.0, 0.999)[1])


@pytest.mark.parametrize("alpha", [0.7, 1.0, 1.0 + 5e-9, 1.4, 2.0, 2.0 - 5e-9, 3.0, 4.0])
def test_closed_form_matches_quadrature(alpha):
    ref = PowerLawQuantile(alpha, 0.8)
    for a, b in [(0.0, 0.3), (0.1, 0.9), (0.6, 0.99), (0.99, 0.999999)]:
        q1, q2 = partial_integrals(ref, a, b)
        e1 = quad(lambda u: float(ref.quantile(u)), a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
        e2 = quad(lambda u: float(ref.quantile(u)) ** 2, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
        assert q1 == pytest.approx(e1, rel=1e-9)
        assert q2 == pytest.approx(e2, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(
    alpha=st.floats(0.3, 6.0),
    rho=st.floats(0.05, 5.0),
    cuts=st.lists(st.floats(0.0, 0.999), min_size=3, max_size=3),
)
def test_partial_integrals_additive(alpha, rho, cuts):
    a, b, c = sorted(cuts)
    ref = PowerLawQuantile(alpha, rho)
    for name in ("partial_q1", "partial_q2"):
        f = getattr(ref, name)
        whole = float(f(a, c))
        parts = float(f(a, b)) + float(f(b, c))
        assert abs(whole - parts) <= 1e-12 * max(1.0, abs(whole))


def test_small_jump_variance_examples():
    assert small_jump_variance(StableTailMeasure(1.0, 1.0, 1.0), 1.0) == pytest.approx(2.0)
    assert small_jump_variance(StableTailMeasure(1.0, 1.0, 0.0), 1.0) == pytest.approx(1.0)
    # frozen from numerical quadrature of u^2 nu(du)
    assert small_jump_variance(StableTailMeasure(0.5, 1.0, 1.0), 0.25) == pytest.approx(0.1666666666666667, rel=1e-12)


def test_stable_index_two_rejected():
    with pytest.raises(ValueError):
        StableTailMeasure(2.0)


def test_small_jump_variance_power_law_and_gaussian():
    m = PowerLawTail(1.6, 0.5, 2.0)
    assert small_jump_variance(m, 0.5) == 0.0
    dens = lambda z: 2.0 * 1.6 * 0.5**1.6 * z ** (1 - 1.6)
    assert small_jump_variance(m, 1.3) == pytest.approx(quad(dens, 0.5, 1.3)[0], rel=1e-12)
    g = GaussianJumpLaw(1.3, 2.0)
    phi = lambda z: 2.0 * z * z * math.exp(-0.5 * (z / 1.3) ** 2) / (1.3 * math.sqrt(2 * math.pi))
    assert small_jump_variance(g, 0.9) == pytest.approx(quad(phi, -0.9, 0.9)[0], rel=1e-12)
