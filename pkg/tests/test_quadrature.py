import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from eberhard_sim.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, QuadratureError, integrate


@pytest.mark.parametrize("degree", range(23))
def test_kronrod_rule_exact_to_degree_22(degree):
    exact = 0.0 if degree % 2 else 2 / (degree + 1)
    assert math.isclose((NODES**degree * KRONROD_WEIGHTS).sum(), exact, abs_tol=1e-14)


@pytest.mark.parametrize("degree", range(14))
def test_gauss_rule_exact_to_degree_13(degree):
    exact = 0.0 if degree % 2 else 2 / (degree + 1)
    assert math.isclose((NODES**degree * GAUSS_WEIGHTS).sum(), exact, abs_tol=1e-14)


def test_kinked_integrand_with_breakpoints():
    f = lambda x: np.minimum(1.0, 0.3 / np.maximum(np.abs(x - 0.4), 1e-300))
    # flat on [0.1, 0.7]; tails 0.3/(0.4-x) on [0, 0.1] and 0.3/(x-0.4) on [0.7, 1]
    exact = 0.6 + 0.3 * math.log(0.4 / 0.3) + 0.3 * math.log(0.6 / 0.3)
    res = integrate(f, 0.0, 1.0, points=[0.1, 0.7], epsabs=1e-12)
    assert abs(res.value - exact) < 1e-12


def test_matches_scipy_on_vector_integrand():
    f = lambda x: np.stack([np.sin(x) ** 4, np.minimum(1, 0.01 / np.sin(2 * x) ** 4)], axis=-1)
    pts = [math.asin(0.01**0.25) / 2]
    res = integrate(f, 0.1, 1.2, points=pts, epsabs=1e-11)
    ref0 = sp_integrate.quad(lambda x: math.sin(x) ** 4, 0.1, 1.2, epsabs=1e-13)[0]
    ref1 = sp_integrate.quad(lambda x: min(1, 0.01 / math.sin(2 * x) ** 4), 0.1, 1.2, points=pts, epsabs=1e-13)[0]
    assert res.value.shape == (2,)
    assert abs(res.value[0] - ref0) < 1e-11
    assert abs(res.value[1] - ref1) < 1e-11


def test_non_convergence_reports_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: np.sign(np.sin(1 / np.maximum(x, 1e-300))), 0.0, 1.0, epsabs=1e-14, max_panels=50)
    assert info.value.error > 0
    assert "estimate" in str(info.value)


def test_rejects_empty_interval():
    with pytest.raises(ValueError):
        integrate(np.sin, 1.0, 1.0)
