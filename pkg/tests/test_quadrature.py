import math

import numpy as np
import pytest

from levytail.errors import QuadratureError
from levytail.quadrature import adaptive_simpson


def test_smooth_integrand():
    assert adaptive_simpson(np.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)


def test_kinked_integrand_with_cap():
    # triangle of area 0.01 plus a plateau of height 0.1 over length 0.8
    val = adaptive_simpson(lambda x: np.minimum(np.abs(x - 0.3), 0.1), 0.0, 1.0)
    assert val == pytest.approx(0.09, abs=1e-11)


def test_endpoint_singularity_of_derivative():
    assert adaptive_simpson(np.sqrt, 0.0, 1.0) == pytest.approx(2.0 / 3.0, abs=1e-10)


def test_breakpoints_are_respected():
    step = lambda x: np.where(x < 0.3, 1.0, 0.0)
    assert adaptive_simpson(step, 0.0, 1.0, breakpoints=[0.3]) == pytest.approx(0.3, abs=1e-14)


def test_empty_interval():
    assert adaptive_simpson(np.exp, 1.0, 1.0) == 0.0


def test_budget_exhaustion_raises():
    rough = lambda x: np.sin(1e6 * x) ** 2
    with pytest.raises(QuadratureError):
        adaptive_simpson(rough, 0.0, 1.0, tol=1e-14, max_evals=2000)
