import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slcone.elliptic import (
    EllipticDivergenceError,
    EllipticDomainError,
    EllipticModulus,
    complete_K,
    jacobi_sn_cn_dn,
)

from .oracles import quad_K, sn_cn_dn_by_inversion

# mpmath at 30 digits
K_KSQ_3_8 = 1.76056881177195449578744671809
K_K_0999999 = 7.94747977354796703266620036207  # k = float(0.999999)
MPMATH_SNCNDN = [
    # t, k^2, sn, cn, dn
    (0.3, 0.375, 0.29393891267501262134, 0.95582420748557697561, 0.98366659410380849794),
    (2.5, 0.9, 0.9996945384505861342, 0.024714971010898662991, 0.31709580068626355582),
    (7.0, 0.1, 0.52066056107919104185, 0.85376377302899305815, 0.98635250190470455152),
    (1.2, 0.99, 0.8348220329574985199, 0.55051991180039006382, 0.55681365963473109527),
]


def test_complete_K_at_zero_is_half_pi():
    assert abs(complete_K(0.0) - math.pi / 2) <= 1e-15


def test_complete_K_matches_quadrature_and_mpmath():
    K = complete_K(EllipticModulus.from_ksq(0.375))
    assert abs(K - quad_K(0.375)) <= 1e-12
    assert abs(K - K_KSQ_3_8) <= 1e-13 * K_KSQ_3_8


def test_complete_K_near_one():
    K = complete_K(0.999999)
    assert K > 7
    assert abs(K - K_K_0999999) <= 1e-12 * K_K_0999999
    ks = np.linspace(0.0, 0.999999, 200)
    assert np.all(np.diff([complete_K(k) for k in ks]) > 0)


def test_complete_K_errors():
    with pytest.raises(EllipticDivergenceError):
        complete_K(1.0)
    with pytest.raises(EllipticDomainError):
        complete_K(1.5)
    with pytest.raises(EllipticDomainError):
        EllipticModulus.from_ksq(-0.1)


def test_modulus_keeps_complement():
    m = EllipticModulus.from_ksq(1 - 1e-20, 1e-20)
    assert m.kpsq == 1e-20
    assert m.k == pytest.approx(1.0)


@pytest.mark.parametrize("t, ksq, sn, cn, dn", MPMATH_SNCNDN)
def test_sncndn_against_mpmath(t, ksq, sn, cn, dn):
    got = jacobi_sn_cn_dn(t, EllipticModulus.from_ksq(ksq))
    assert np.allclose(got, (sn, cn, dn), rtol=0, atol=1e-13)


def test_trivial_values():
    for k in (0.0, 0.3, 0.9, 1.0):
        assert np.allclose(jacobi_sn_cn_dn(0.0, k), (0, 1, 1), atol=0)
    assert np.allclose(jacobi_sn_cn_dn(math.pi / 2, 0.0), (1, 0, 1), atol=1e-15)


def test_k_one_is_hyperbolic():
    sn, cn, dn = jacobi_sn_cn_dn(1.0, 1.0)
    sech = 1 / math.cosh(1.0)
    assert abs(sn - math.tanh(1.0)) <= 1e-15
    assert abs(cn - sech) <= 1e-15 and abs(dn - sech) <= 1e-15


def test_quarter_period_gives_sn_one():
    m = EllipticModulus.from_ksq(0.375)
    sn, cn, dn = jacobi_sn_cn_dn(complete_K(m), m)
    assert abs(sn - 1) <= 1e-12
    assert abs(cn) <= 1e-12
    assert abs(dn - math.sqrt(1 - 0.375)) <= 1e-12


def test_vectorized_shapes():
    t = np.linspace(-3, 3, 12).reshape(3, 4)
    sn, cn, dn = jacobi_sn_cn_dn(t, 0.5)
    assert sn.shape == cn.shape == dn.shape == (3, 4)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        jacobi_sn_cn_dn(float("nan"), 0.5)


@settings(max_examples=200, deadline=None)
@given(t=st.floats(-200, 200), k=st.floats(0, 1))
def test_pythagorean_identities(t, k):
    sn, cn, dn = jacobi_sn_cn_dn(t, k)
    assert abs(sn * sn + cn * cn - 1) <= 1e-12
    assert abs(dn * dn + k * k * sn * sn - 1) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(t=st.floats(-50, 50), k=st.floats(0, 0.999))
def test_real_period(t, k):
    K = complete_K(k)
    a = np.array(jacobi_sn_cn_dn(t, k))
    b = np.array(jacobi_sn_cn_dn(t + 4 * K, k))
    assert np.max(np.abs(a - b)) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(t=st.floats(-20, 20), k=st.floats(0, 1))
def test_odd_even_symmetry(t, k):
    sn, cn, dn = jacobi_sn_cn_dn(t, k)
    sm, cm, dm = jacobi_sn_cn_dn(-t, k)
    assert abs(sn + sm) <= 1e-13 and abs(cn - cm) <= 1e-13 and abs(dn - dm) <= 1e-13


def test_against_quadrature_inversion_oracle():
    rng = np.random.default_rng(7)
    for _ in range(100):
        t, k = rng.uniform(0, 8), rng.uniform(0, 0.99)
        expected = sn_cn_dn_by_inversion(t, k)
        assert np.max(np.abs(np.array(jacobi_sn_cn_dn(t, k)) - expected)) <= 1e-10


def test_array_modulus_matches_scalar_path():
    rng = np.random.default_rng(5)
    t = rng.uniform(-60, 60, 300)
    k = rng.uniform(0, 1, 300)
    k[:3] = (0.0, 1.0, 1 - 1e-12)
    many = np.array(jacobi_sn_cn_dn(t, k))
    one_by_one = np.array([jacobi_sn_cn_dn(a, b) for a, b in zip(t, k)]).T
    assert np.max(np.abs(many - one_by_one)) <= 1e-14
    with pytest.raises(EllipticDomainError):
        jacobi_sn_cn_dn(t, k + 1.0)
