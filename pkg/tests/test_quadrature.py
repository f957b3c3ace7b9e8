import math

import numpy as np
import pytest
from scipy import integrate

from slcone.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, QuadratureError, interval_integrals


def test_rule_weights():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    # Kronrod 15 points integrates x^22 exactly on [-1, 1]
    assert KRONROD_WEIGHTS @ NODES**22 == pytest.approx(2 / 23, abs=1e-15)


def test_piecewise_integrals_of_polynomial():
    edges = np.array([0.0, 0.5, 1.0, 3.0])
    got = interval_integrals(lambda x: np.stack([x**3, np.ones_like(x)], -1), edges)
    expected = np.diff(edges**4 / 4)
    assert np.allclose(got[:, 0], expected, atol=1e-14)
    assert np.allclose(got[:, 1], np.diff(edges), atol=1e-15)


def test_peaked_integrand_against_scipy():
    eps = 1e-4

    def f(x):
        return (eps / (x * x + eps * eps))[:, None]

    edges = np.linspace(-1, 1, 5)
    got = interval_integrals(f, edges, atol=1e-11)
    for i in range(4):
        ref, _ = integrate.quad(lambda x: eps / (x * x + eps * eps), edges[i], edges[i + 1],
                                points=[0.0] if edges[i] <= 0 <= edges[i + 1] else None, epsabs=1e-13, limit=400)
        assert abs(got[i, 0] - ref) <= 1e-10
    assert got.sum() == pytest.approx(2 * math.atan(1 / eps), abs=1e-10)


def test_unconverged_raises():
    with pytest.raises(QuadratureError):
        interval_integrals(lambda x: (np.sign(np.sin(1 / x)) / x)[:, None], [1e-9, 1.0], atol=1e-15, max_rounds=5)
