import math
from fractions import Fraction

import numpy as np
import pytest

from slcone.family import J_MAX, ConeParameters, immersion, sample_grid
from slcone.periods import (
    PeriodLattice,
    basic_period_from_flow,
    closure_test,
    embeddedness_scan,
    fundamental_grid,
    minimality_check,
    rational_approximation,
    search_closure,
    theta2_from_flow,
    theta2_of_J,
    theta2_range,
    torus_lattice,
    verify_period,
)

TWO_PI = 2 * math.pi


def test_rational_approximation():
    assert rational_approximation(1 / 3, 1e-12) == Fraction(1, 3)
    assert rational_approximation(0.0, 1e-12) == 0
    assert rational_approximation(355 / 113, 1e-12) == Fraction(355, 113)
    assert rational_approximation(math.sqrt(2) - 1, 1e-12, max_den=10**4) is None


def test_T12_rectangular_lattice():
    spec = torus_lattice(1, 2)
    imm = immersion(spec.params)
    K, r = imm.ed.quarter_period, imm.ed.r
    assert spec.parity == "even" and spec.lattice.rectangular
    assert np.allclose(spec.lattice.basis, [(4 * math.pi, 0), (0, 4 * K / r)], rtol=0, atol=1e-14)
    for w in spec.lattice.basis:
        assert verify_period(spec.params, w) <= 1e-8


def test_T13_oblique_lattice():
    spec = torus_lattice(1, 3)
    imm = immersion(spec.params)
    K, r = imm.ed.quarter_period, imm.ed.r
    assert spec.parity == "odd" and not spec.lattice.rectangular
    assert np.allclose(spec.lattice.basis, [(6 * math.pi, 0), (3 * math.pi, 2 * K / r)], rtol=0, atol=1e-14)
    for w in spec.lattice.basis:
        assert verify_period(spec.params, w) <= 1e-8


@pytest.mark.parametrize("m, n", [(1, 2), (1, 3), (2, 3), (3, 5)])
def test_closure_test_agrees_with_parity_rule(m, n):
    spec = torus_lattice(m, n)
    found = closure_test(spec.params)
    assert found.status == "torus"
    for w in spec.lattice.basis:
        assert found.contains(w)
    for w in found.basis:
        assert spec.lattice.contains(w)
    assert minimality_check(spec.params, found).ok


def test_half_steps_are_not_periods():
    spec = torus_lattice(1, 2)
    (w1, _), (_, w2) = spec.lattice.basis
    assert verify_period(spec.params, (w1 / 2, 0)) > 1e-2
    assert verify_period(spec.params, (0, w2 / 2)) > 1e-2


def test_torus_lattice_validates():
    with pytest.raises(ValueError):
        torus_lattice(2, 4)
    with pytest.raises(ValueError):
        torus_lattice(3, 2)


def test_sphere_and_flat_cases():
    sph = closure_test(ConeParameters.make(0, 0.0))
    assert sph.status == "sphere" and sph.rank == 1
    flat_params = ConeParameters.make(Fraction(1, 2), J_MAX)
    assert flat_params.is_flat
    flat = closure_test(flat_params)
    assert flat.rank >= 1
    for w in flat.basis:
        assert verify_period(flat_params, w) <= 1e-8


def test_irrational_alpha_reports_no_torus():
    lat = closure_test(ConeParameters.make(math.sqrt(0.5), 0.0))
    assert lat.status != "torus"
    for w in lat.basis:
        assert verify_period(ConeParameters.make(math.sqrt(0.5), 0.0), w) <= 1e-8


def test_holonomy_sum_is_multiple_of_pi():
    rng = np.random.default_rng(11)
    for _ in range(10):
        imm = immersion(ConeParameters.make(rng.uniform(0, 1), rng.uniform(0.01, 0.19)))
        s = imm.holonomy.sum() / math.pi
        assert abs(s - round(s)) <= 1e-8


def test_theta2_quadrature_matches_flow():
    for J in (0.05, 0.1, 0.17):
        assert abs(theta2_of_J(J) - theta2_from_flow(J)) <= 1e-8
        assert abs(theta2_of_J(J) - immersion(ConeParameters.make(0, J)).holonomy[1]) <= 1e-9


def test_basic_period_from_flow():
    params = ConeParameters.make(0.3, 0.1)
    assert abs(basic_period_from_flow(params) - immersion(params).T) <= 1e-9


def test_theta2_range_endpoints():
    lo, hi = theta2_range()
    near0 = theta2_of_J(1e-4) / TWO_PI
    near_max = theta2_of_J(J_MAX * (1 - 1e-6)) / TWO_PI
    assert lo < near0 < lo + 1e-2
    assert hi - 1e-3 < near_max < hi


def test_unreachable_target_is_rejected():
    with pytest.raises(ValueError):
        search_closure(Fraction(1, 3))


def test_search_hits_target_by_independent_route():
    res = search_closure(Fraction(5, 9))
    assert res.lattice.status == "torus"
    assert abs(theta2_from_flow(res.J) / TWO_PI - 5 / 9) <= 1e-8
    params = ConeParameters.make(0, res.J)
    for w in res.lattice.basis:
        assert verify_period(params, w) <= 1e-8


def test_embeddedness_scan_flags_double_cover():
    spec = torus_lattice(1, 2)
    grid = fundamental_grid(spec, 60, 60)
    assert embeddedness_scan(spec, grid).empty
    assert embeddedness_scan(spec, grid, eps="covering").empty
    # pretend the lattice is twice as fine in s: the grid then covers it twice
    (w1, _), w2 = spec.lattice.basis
    fake = PeriodLattice([(2 * w1, 0.0), w2], True, spec.lattice.basic_period_T, spec.lattice.holonomy, "torus")
    doubled = sample_grid(spec.params, (0, 2 * w1), (0, w2[1]), 120, 60, endpoint=False)
    rep = embeddedness_scan(fake, doubled)
    assert not rep.empty and rep.n_close >= 60 * 60


def test_embeddedness_scan_rejects_wrong_domain():
    spec = torus_lattice(1, 2)
    grid = fundamental_grid(torus_lattice(1, 3), 20, 20)
    with pytest.raises(ValueError):
        embeddedness_scan(spec, grid)
