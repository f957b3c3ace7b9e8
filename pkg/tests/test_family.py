import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slcone.family import (
    J_MAX,
    ConeParameters,
    cubic_roots,
    curvature_extremes,
    gamma_closed_form,
    gamma_residual,
    immersion,
    sample_grid,
)
from slcone.neumann import conserved, constraint_residuals

from .oracles import cubic_roots_bisection, j0_curvature_extremes, sphere_u

alphas = st.floats(0.0, 1.0)
Js = st.floats(1e-6, J_MAX * (1 - 1e-9))


@pytest.mark.parametrize("alpha, J", [(0.3, 0.1), (0.0, 0.05), (0.9, 0.15), (0.5, 0.0), (0.7, 0.19)])
def test_roots_match_bisection_oracle(alpha, J):
    ed = cubic_roots(ConeParameters.make(alpha, J))
    expected = cubic_roots_bisection(alpha, J)
    assert np.allclose(ed.roots, expected, rtol=1e-12, atol=1e-14)


def test_alpha_half_J_zero_roots_and_modulus():
    ed = cubic_roots(ConeParameters.make(0.5, 0.0))
    assert np.allclose(ed.roots, (1 / 6, -2 / 15, 2 / 3), atol=1e-15)
    assert abs(ed.r**2 - 2.0) <= 1e-15
    assert abs(ed.modulus.ksq - 3 / 8) <= 1e-15


def test_alpha_one_has_infinite_third_root():
    ed = cubic_roots(ConeParameters.make(1, 0.1))
    assert ed.roots[2] == math.inf
    assert ed.degenerate == "clifford_alpha"


def test_rejects_out_of_range_J():
    with pytest.raises(ValueError):
        ConeParameters.make(0.5, 0.2)
    with pytest.raises(ValueError):
        ConeParameters.make(0.5, -0.01)
    # rounding slack at the top end snaps to J_MAX
    assert ConeParameters.make(0.5, J_MAX * (1 + 1e-16)).J == J_MAX


def test_sphere_case_is_sech_tanh():
    imm = immersion(ConeParameters.make(0, 0.0))
    s = np.linspace(0, 2 * math.pi, 17)[:, None]
    t = np.linspace(-6, 6, 41)[None, :]
    assert np.max(np.abs(imm.u(s, t) - sphere_u(s, t))) <= 1e-14
    assert curvature_extremes(imm.params).unbounded


def test_alpha_one_conformal_factor_is_two():
    imm = immersion(ConeParameters.make(1, 0.1))
    y, ydot = imm.conformal_factor(np.linspace(0, 10, 50))
    assert np.allclose(y, 2.0, atol=1e-14) and np.all(ydot == 0)


def test_clifford_J_is_flat():
    imm = immersion(ConeParameters.make(0.4, J_MAX))
    t = np.linspace(0, 7, 30)
    assert np.allclose(imm.radii_sq(t), 1 / 3, atol=0)
    y, _ = imm.conformal_factor(t)
    lam = imm.lam
    assert np.allclose(y, np.sum(lam**2) / 3, atol=1e-15)
    assert np.max(np.abs(imm.gauss_curvature(t))) <= 1e-12


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_J_zero_curvature_extremes(alpha):
    ext = curvature_extremes(ConeParameters.make(alpha, 0.0))
    kmin, kmax = j0_curvature_extremes(alpha)
    assert abs(ext.K_min - kmin) <= 1e-13 and abs(ext.K_max - kmax) <= 1e-13
    imm = immersion(ConeParameters.make(alpha, 0.0))
    K = imm.gauss_curvature(np.linspace(0, imm.T, 2001))
    assert abs(K.min() - kmin) <= 1e-12 and abs(K.max() - kmax) <= 1e-12


def test_almost_flat_bound():
    ext = curvature_extremes(ConeParameters.make(0.9, 0.0))
    assert max(abs(ext.K_min), abs(ext.K_max)) < 7 * 0.1


def test_curvature_extremes_match_samples_for_J_positive():
    params = ConeParameters.make(0.3, 0.1)
    imm = immersion(params)
    ext = curvature_extremes(params)
    K = imm.gauss_curvature(np.linspace(0, imm.T, 4001))
    assert abs(K.min() - ext.K_min) <= 1e-6 * abs(ext.K_min)
    assert abs(K.max() - ext.K_max) <= 1e-6 * abs(ext.K_max)


def test_curvature_grows_with_J():
    Kmins = [curvature_extremes(ConeParameters.make(0.5, J)).K_min for J in np.linspace(0.01, 0.19, 10)]
    assert np.all(np.diff(Kmins) > 0)


def test_gamma_closed_form_start_and_half_period():
    params = ConeParameters.make(0.3, 0.1)
    ed = cubic_roots(params)
    g, gd = gamma_closed_form(ed, 0.0)
    assert g == ed.roots[1] and gd == 0
    g, gd = gamma_closed_form(ed, ed.quarter_period / ed.r)
    assert abs(g - ed.roots[0]) <= 1e-14 and abs(gd) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(alpha=alphas, J=Js, t=st.floats(-20, 20))
def test_gamma_solves_first_order_equation(alpha, J, t):
    params = ConeParameters.make(alpha, J)
    g, gd = gamma_closed_form(cubic_roots(params), t)
    assert abs(gamma_residual(params, g, gd)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(alpha=alphas, J=Js, t=st.floats(-5, 5))
def test_radii_sum_to_one_and_conservation(alpha, J, t):
    params = ConeParameters.make(alpha, J)
    imm = immersion(params)
    assert abs(imm.radii_sq(t).sum() - 1) <= 1e-13
    st0 = imm.state(t)
    assert np.max(np.abs(constraint_residuals(st0, params.axis))) <= 1e-9
    assert np.max(np.abs(conserved(st0, params.axis).Jvec - J * params.axis.mu)) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(alpha=alphas, J=Js, t=st.floats(0, 5))
def test_conformal_factor_matches_potential(alpha, J, t):
    params = ConeParameters.make(alpha, J)
    imm = immersion(params)
    z, zd = imm.curve(t)
    y, _ = imm.conformal_factor(t)
    assert abs(y - np.sum(params.axis.lam**2 * np.abs(z) ** 2)) <= 1e-12
    assert abs(y - np.sum(np.abs(zd) ** 2)) <= 1e-9


def test_curve_derivative_matches_finite_difference():
    imm = immersion(ConeParameters.make(0.3, 0.1))
    t, h = 0.7, 1e-5
    z, zd = imm.curve(t)
    fd = (imm.curve(t + h)[0] - imm.curve(t - h)[0]) / (2 * h)
    assert np.max(np.abs(fd - zd)) <= 1e-8


def test_holonomy_relates_phases_one_period_apart():
    imm = immersion(ConeParameters.make(0.3, 0.1))
    t = np.linspace(-1, 3, 9)
    diff = imm.phases(t + imm.T) - imm.phases(t)
    assert np.max(np.abs(diff - imm.holonomy)) <= 1e-11


def test_grid_refinement_keeps_range():
    grid = sample_grid(ConeParameters.make(0.5, 0.0), (0, 1), (0, 2), 9, 11)
    fine = grid.refined()
    assert fine.shape == (17, 21)
    assert fine.hs == pytest.approx(grid.hs / 2) and fine.ht == pytest.approx(grid.ht / 2)
    assert np.array_equal(fine.u[::2, ::2], grid.u)
    assert grid.K.shape == grid.shape
