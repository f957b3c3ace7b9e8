import math

import numpy as np
import pytest

from slcone.rk import DORMAND_PRINCE54, VERNER65, StiffnessError, integrate_adaptive


@pytest.mark.parametrize("tab", [VERNER65, DORMAND_PRINCE54])
def test_tableau_consistency(tab):
    # row sums equal the nodes; both weight vectors sum to one
    assert np.allclose(tab.a.sum(axis=1), tab.c, atol=1e-15)
    assert tab.b.sum() == pytest.approx(1.0, abs=1e-15)
    assert tab.b_embedded.sum() == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("tab", [VERNER65, DORMAND_PRINCE54])
def test_order_conditions(tab):
    # b . c^(q-1) = 1/q for q up to the embedded order
    for q in range(1, tab.embedded_order + 1):
        assert tab.b @ tab.c ** (q - 1) == pytest.approx(1.0 / q, abs=1e-13)


def test_exponential_growth():
    ts, ys, stats = integrate_adaptive(lambda t, y: y, 0.0, np.array([1.0]), 2.0, 1e-12)
    assert ts[-1] == 2.0
    assert abs(ys[-1, 0] - math.exp(2.0)) <= 1e-10 * math.exp(2.0)
    assert stats["accepted"] > 0


def test_backwards_and_complex():
    ts, ys, _ = integrate_adaptive(lambda t, y: 1j * y, 0.0, np.array([1.0 + 0j]), -3.0, 1e-12)
    assert ts[-1] == -3.0
    assert abs(ys[-1, 0] - np.exp(-3j)) <= 1e-10


def test_harmonic_oscillator_long_time():
    f = lambda t, y: np.array([y[1], -y[0]])  # noqa: E731
    ts, ys, _ = integrate_adaptive(f, 0.0, np.array([1.0, 0.0]), 20 * math.pi, 1e-11)
    assert np.max(np.abs(ys[-1] - [1.0, 0.0])) <= 1e-8


def test_post_step_hook_is_applied():
    seen = []

    def post(t, y):
        seen.append(t)
        return y * 0 + 1.0

    ts, ys, _ = integrate_adaptive(lambda t, y: -y, 0.0, np.array([1.0]), 1.0, 1e-8, post_step=post)
    assert np.all(ys[1:] == 1.0)
    assert len(seen) == len(ts) - 1


def test_zero_span():
    ts, ys, _ = integrate_adaptive(lambda t, y: y, 1.0, np.array([2.0]), 1.0, 1e-8)
    assert len(ts) == 1 and ys[0, 0] == 2.0


def test_blow_up_raises_stiffness_error():
    with pytest.raises(StiffnessError, match="step size underflow"):
        integrate_adaptive(lambda t, y: y * y, 0.0, np.array([1.0]), 2.0, 1e-10)


def test_bad_tolerance():
    with pytest.raises(ValueError):
        integrate_adaptive(lambda t, y: y, 0.0, np.array([1.0]), 1.0, 0.0)
