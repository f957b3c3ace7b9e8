"""The two-parameter family of equivariant special Legendrian immersions.

``u(s, t) = exp(As) z(t)`` with ``A = i diag(1, alpha, -1 - alpha)``.  The
radii satisfy ``R_j^2 = gamma(t) mu_j + 1/3`` where gamma oscillates between
two roots of a cubic; ``gamma`` is written with ``sn^2`` and the phases are
integrated from ``theta_j' = J mu_j / R_j^2``.

Time origin: ``gamma(0) = Gamma2`` (the minimum) with ``gamma'(0) = 0``.
Shifting ``t`` by ``Ke/r`` moves the origin to the maximum ``Gamma1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np
from scipy import optimize

from .elliptic import EllipticData, EllipticModulus, complete_K, jacobi_sn_cn_dn
from .neumann import NeumannState, SymmetryAxis
from .quadrature import interval_integrals

__all__ = [
    "J_MAX",
    "J_MIN",
    "ConeParameters",
    "GammaSolution",
    "ImmersionSample",
    "CurvatureExtremes",
    "SurfaceGrid",
    "Immersion",
    "cubic_coefficients",
    "cubic_roots",
    "gamma_closed_form",
    "gamma_residual",
    "radii",
    "phases",
    "immerse",
    "immersion",
    "curvature_extremes",
    "initial_state",
    "sample_grid",
    "grid_from_function",
]

J_MAX = 1.0 / (3.0 * math.sqrt(3.0))
# below this the phase spikes at the radius minima are narrower than the
# quadrature can resolve and the holonomy silently loses its jumps of pi
J_MIN = 1e-12
_J_SLACK = 1e-15
PHASE_ATOL = 1e-11


class ConsistencyError(ArithmeticError):
    """A closed-form quantity left its admissible range."""


@dataclass(frozen=True)
class ConeParameters:
    """``(alpha, J, theta)``; ``theta`` is the calibration phase of the cone."""

    axis: SymmetryAxis
    J: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.axis.is_traceless:
            raise ValueError("the family needs A in su(3)")
        if not (0.0 <= self.J <= J_MAX + _J_SLACK):
            raise ValueError(f"J={self.J!r} outside [0, 1/(3 sqrt 3)]")
        if 0.0 < self.J < J_MIN:
            raise ValueError(f"J={self.J!r} is below the resolvable minimum {J_MIN:g}; use J=0 or J >= {J_MIN:g}")
        if self.J > J_MAX:
            object.__setattr__(self, "J", J_MAX)

    @classmethod
    def make(cls, alpha, J: float, theta: float = 0.0) -> ConeParameters:
        return cls(SymmetryAxis.from_alpha(alpha), float(J), float(theta))

    @property
    def alpha(self) -> float:
        return self.axis.alpha

    @property
    def is_flat(self) -> bool:
        return self.alpha == 1.0 or self.J == J_MAX


def cubic_coefficients(axis: SymmetryAxis) -> tuple[float, float, float]:
    """``(c3, c2, c0)`` of ``prod(gamma mu_i + 1/3) = c3 g^3 + c2 g^2 + c0``."""
    mu = axis.mu
    e2 = mu[0] * mu[1] + mu[0] * mu[2] + mu[1] * mu[2]
    return float(np.prod(mu)), float(e2 / 3.0), 1.0 / 27.0


def _polish(p, dp, x):
    for _ in range(3):
        d = dp(x)
        if d == 0.0:
            break
        step = p(x) / d
        if not math.isfinite(step):
            break
        x -= step
    return x


def _turning_offset(mu, j: int, J2: float) -> tuple[float, np.ndarray]:
    """Root ``gamma`` of the cubic next to ``-1/(3 mu_j)``, solved in the variable
    ``x = gamma mu_j + 1/3`` so that a small radius keeps full relative precision.
    Returns ``gamma`` and the three values ``gamma mu_i + 1/3`` there."""

    def offsets(x):
        return (mu * x + (mu[j] - mu) / 3.0) / mu[j]

    if J2 == 0.0:
        x = 0.0
    else:
        x = optimize.brentq(
            lambda x: float(np.prod(offsets(x))) - J2, 0.0, 1.0 / 3.0, xtol=1e-300, rtol=1e-15
        )
    off = offsets(x)
    off[j] = x
    return (x - 1.0 / 3.0) / mu[j], off


def cubic_roots(params: ConeParameters) -> EllipticData:
    """Roots ``Gamma2 <= 0 <= Gamma1 <= Gamma3`` of ``J^2 = prod(gamma mu_i + 1/3)``
    together with ``r``, ``k`` and ``Ke(k)``.

    With ``A = c3 (Gamma3 - Gamma1)`` and ``B = c3 (Gamma1 - Gamma2)`` we have
    ``r^2 = A + B``, ``k^2 = B / r^2`` and ``k'^2 = A / r^2``.  ``A`` comes from
    evaluating the factored cubic at ``-1/(3 mu_1)``, which stays finite when
    the leading coefficient vanishes (alpha = 1, ``Gamma3 = inf``).
    """
    axis, J = params.axis, params.J
    mu = axis.mu
    alpha = axis.alpha
    c3, c2, _ = cubic_coefficients(axis)

    degenerate = None
    if J == J_MAX:
        degenerate = "clifford_J"
    elif alpha == 1.0:
        degenerate = "clifford_alpha"

    if J == J_MAX:
        g1 = g2 = 0.0
        g3 = -c2 / c3 if c3 != 0.0 else math.inf
        rsq, ksq, kpsq = -c2, 0.0, 1.0
        turning = ((1 / 3, 1 / 3, 1 / 3), (1 / 3, 1 / 3, 1 / 3))
    else:
        J2 = J * J
        g2, off2 = _turning_offset(mu, 1, J2)
        g1, off1 = _turning_offset(mu, 0, J2)
        turning = (tuple(map(float, off1)), tuple(map(float, off2)))
        if J == 0.0:
            g3 = -1.0 / (3.0 * mu[2]) if mu[2] != 0.0 else math.inf
            rsq = 1.0 + 2.0 * alpha
            ksq = (1.0 - alpha * alpha) / rsq
            kpsq = alpha * (2.0 + alpha) / rsq
        else:
            gap = -off1[0] / mu[0]  # -1/(3 mu_1) - Gamma1
            A = J2 / (gap * (gap + g1 - g2)) + c3 * gap
            B = c3 * (g1 - g2)
            g3 = g1 + A / c3 if c3 != 0.0 else math.inf
            rsq = A + B
            ksq, kpsq = B / rsq, A / rsq
    ksq, kpsq = min(max(ksq, 0.0), 1.0), min(max(kpsq, 0.0), 1.0)
    modulus = EllipticModulus.from_ksq(ksq, kpsq)
    quarter = complete_K(modulus) if kpsq > 0.0 else math.inf
    return EllipticData(
        modulus, math.sqrt(rsq), quarter, (float(g1), float(g2), float(g3)), degenerate, turning
    )


@dataclass(frozen=True)
class GammaSolution:
    elliptic: EllipticData
    gamma0: float
    C: float
    basic_period_T: float


@dataclass(frozen=True)
class ImmersionSample:
    """Samples of the immersion; fields broadcast over the shape of ``(s, t)``."""

    s: np.ndarray
    t: np.ndarray
    u: np.ndarray
    y: np.ndarray
    K: np.ndarray
    theta_j: np.ndarray


@dataclass(frozen=True)
class CurvatureExtremes:
    K_min: float
    K_max: float
    y_min: float
    y_max: float
    unbounded: bool = False


def gamma_closed_form(ed: EllipticData, t):
    """``(gamma, gamma')`` with ``gamma = Gamma2 - (Gamma2 - Gamma1) sn^2(rt, k)``."""
    g1, g2, _ = ed.roots
    sn, cn, dn = jacobi_sn_cn_dn(np.asarray(t, float) * ed.r, ed.modulus)
    gamma = g2 + (g1 - g2) * sn * sn
    gdot = 2.0 * (g1 - g2) * ed.r * sn * cn * dn
    return gamma, gdot


def gamma_residual(params: ConeParameters, gamma, gdot):
    """``gamma'^2/4 + J^2 - prod(gamma mu_i + 1/3)``."""
    gamma = np.asarray(gamma, float)
    prod = np.prod(gamma[..., None] * params.axis.mu + 1.0 / 3.0, axis=-1)
    return np.asarray(gdot) ** 2 / 4.0 + params.J**2 - prod


def radii(ed: EllipticData, axis: SymmetryAxis, t) -> np.ndarray:
    """Squared radii ``R_j^2 = gamma(t) mu_j + 1/3``, shape ``t.shape + (3,)``.

    Each radius is measured from the turning point where it is smallest
    (``Gamma2`` for ``mu_j > 0``, ``Gamma1`` otherwise), so values near zero
    keep their relative precision.
    """
    mu = axis.mu
    if ed.degenerate == "clifford_J":
        return np.full(np.shape(t) + (3,), 1.0 / 3.0)
    g1, g2, _ = ed.roots
    sn, cn, _ = jacobi_sn_cn_dn(np.asarray(t, float) * ed.r, ed.modulus)
    if ed.turning_radii is None:
        gamma = g2 + (g1 - g2) * sn * sn
        rsq = np.asarray(gamma)[..., None] * mu + 1.0 / 3.0
    else:
        at1, at2 = (np.asarray(v) for v in ed.turning_radii)
        span = np.abs(mu) * (g1 - g2)
        rsq = np.where(
            mu > 0,
            at2 + span * np.asarray(sn)[..., None] ** 2,
            at1 + span * np.asarray(cn)[..., None] ** 2,
        )
    if np.any(rsq < -1e-12):
        raise ConsistencyError(f"negative squared radius {rsq.min():.3g}")
    return np.maximum(rsq, 0.0)


class Immersion:
    """Closed-form evaluation of ``u_{alpha,J}`` for one parameter set.

    Caches the elliptic data and the per-period phase holonomy.
    """

    def __init__(self, params: ConeParameters):
        self.params = params
        self.axis = params.axis
        self.mu = params.axis.mu
        self.lam = params.axis.lam
        self.ed = cubic_roots(params)
        c3, _, _ = cubic_coefficients(params.axis)
        self.c3 = c3
        self.lam_sq_sum = float(np.sum(self.lam**2))
        self.C = -(np.prod(self.lam) ** 2) - params.J**2 * c3**2
        self.theta0 = self._initial_phases()

    # -- scalar data ------------------------------------------------------
    @property
    def T(self) -> float:
        """Basic period of gamma and of the conformal factor."""
        return self.ed.basic_period

    @property
    def gamma_solution(self) -> GammaSolution:
        return GammaSolution(self.ed, self.ed.roots[1], self.C, self.T)

    def _initial_phases(self) -> np.ndarray:
        # the cone is theta-special for the orientation (t, s) of the link
        th = self.params.theta
        if self.params.J == 0.0:
            return np.array([0.5 * math.pi - th, 0.0, 0.0])
        return np.array([-th, 0.0, 0.0])

    # -- gamma, radii, conformal factor ------------------------------------
    def gamma(self, t):
        if self.params.J == J_MAX:
            t = np.asarray(t, float)
            return np.zeros_like(t), np.zeros_like(t)
        return gamma_closed_form(self.ed, t)

    def radii_sq(self, t) -> np.ndarray:
        return radii(self.ed, self.axis, t)

    def conformal_factor(self, t):
        """``(y, y')`` with ``y = |Az|^2 = -gamma mu1 mu2 mu3 + sum(lam^2)/3``.

        Evaluated as ``y_min + c3 (Gamma1 - Gamma2) cn^2`` with
        ``y_min = sum(lam_j^2 R_j^2(Gamma1))``: a sum of non-negative terms,
        accurate where ``y`` is small.
        """
        t = np.asarray(t, float)
        if self.params.J == J_MAX or self.c3 == 0.0:
            _, gdot = self.gamma(t)
            return np.full_like(t, self.y_min) + 0.0 * gdot, -self.c3 * gdot
        g1, g2, _ = self.ed.roots
        _, cn, _ = jacobi_sn_cn_dn(t * self.ed.r, self.ed.modulus)
        _, gdot = self.gamma(t)
        return self.y_min + self.c3 * (g1 - g2) * np.asarray(cn) ** 2, -self.c3 * gdot

    @cached_property
    def y_min(self) -> float:
        return float(np.sum(self.lam**2 * np.asarray(self.ed.turning_radii[0])))

    def gauss_curvature(self, t):
        y, _ = self.conformal_factor(t)
        return 1.0 + 2.0 * self.C / y**3

    # -- phases -------------------------------------------------------------
    def phase_rates(self, t) -> np.ndarray:
        if self.params.J == 0.0:
            return np.zeros(np.shape(t) + (3,))
        return self.params.J * self.mu / self.radii_sq(t)

    def _rates_from_squares(self, sn2, cn2) -> np.ndarray:
        at1, at2 = (np.asarray(v) for v in self.ed.turning_radii)
        g1, g2, _ = self.ed.roots
        span = np.abs(self.mu) * (g1 - g2)
        rsq = np.where(self.mu > 0, at2 + span * sn2[..., None], at1 + span * cn2[..., None])
        return self.params.J * self.mu / rsq

    def _rates_near_start(self, v):
        sn, cn, _ = jacobi_sn_cn_dn(np.asarray(v) * self.ed.r, self.ed.modulus)
        return self._rates_from_squares(np.asarray(sn) ** 2, np.asarray(cn) ** 2)

    def _rates_near_half(self, v):
        # rates at T/2 - v: sn(Ke - x)^2 = cn^2/dn^2 and cn(Ke - x)^2 = k'^2 sn^2/dn^2
        sn, cn, dn = jacobi_sn_cn_dn(np.asarray(v) * self.ed.r, self.ed.modulus)
        sn, cn, dn = (np.asarray(a) for a in (sn, cn, dn))
        dn2 = dn * dn
        return self._rates_from_squares(cn * cn / dn2, self.ed.modulus.kpsq * sn * sn / dn2)

    def _quarter_integrals(self, rates, x):
        """Cumulative ``int_0^x rates`` at each point of ``x`` in ``[0, T/4]``."""
        T4 = 0.25 * self.T
        order = np.unique(np.concatenate([np.asarray(x, float).ravel(), [0.0, T4]]))
        pieces = interval_integrals(rates, order, PHASE_ATOL)
        cumulative = np.vstack([np.zeros((1, 3)), np.cumsum(pieces, axis=0)])
        return cumulative[np.searchsorted(order, x)]

    @cached_property
    def holonomy(self) -> np.ndarray:
        """``theta_j(t + T) - theta_j(t)``, i.e. ``z_j(t + T) = exp(i h_j) z_j(t)``.

        For ``J = 0`` the phases are constant and the signed radii flip as
        ``(cn, sn, dn) -> (-cn, -sn, dn)``, giving ``(pi, pi, 0)``.
        """
        if self.params.J == 0.0:
            return np.array([math.pi, math.pi, 0.0])
        if self.params.J == J_MAX:
            return 3.0 * self.params.J * self.mu * self.T
        return 2.0 * self._half_holonomy

    @cached_property
    def _half_holonomy(self) -> np.ndarray:
        T4 = np.array([0.25 * self.T])
        first = self._quarter_integrals(self._rates_near_start, T4)[0]
        second = self._quarter_integrals(self._rates_near_half, T4)[0]
        return first + second

    def phases(self, t) -> np.ndarray:
        """Unwrapped ``theta_j(t)``; shape ``t.shape + (3,)``.

        The rates are even about ``0`` and ``T/2``, so every partial integral
        is folded onto ``[0, T/4]`` measured from the nearer turning point;
        this keeps sharply peaked rates (small ``J``) well conditioned.
        """
        t = np.asarray(t, float)
        J = self.params.J
        if J == 0.0:
            return np.broadcast_to(self.theta0, t.shape + (3,)).copy()
        if J == J_MAX:
            return self.theta0 + 3.0 * J * t[..., None] * self.mu
        T = self.T
        n = np.floor(t / T)
        tau = (t - n * T).ravel()
        upper = tau > 0.5 * T
        x = np.where(upper, T - tau, tau)  # fold onto [0, T/2]
        near_start = x <= 0.25 * T
        half = self._half_holonomy
        partial = np.empty(x.shape + (3,))
        if near_start.any():
            partial[near_start] = self._quarter_integrals(self._rates_near_start, x[near_start])
        if (~near_start).any():
            v = 0.5 * T - x[~near_start]
            partial[~near_start] = half - self._quarter_integrals(self._rates_near_half, v)
        partial = np.where(upper[:, None], 2.0 * half - partial, partial)
        partial = partial.reshape(t.shape + (3,))
        return self.theta0 + n[..., None] * self.holonomy + partial

    # -- the curve z(t) -------------------------------------------------------
    def signed_radii(self, t):
        """``J = 0`` radii ``coef * (cn, sn, dn)`` and their derivatives."""
        ed = self.ed
        at1, at2 = ed.turning_radii
        coef = np.sqrt([at2[0], at1[1], at2[2]])
        sn, cn, dn = jacobi_sn_cn_dn(np.asarray(t, float) * ed.r, ed.modulus)
        R = np.stack([cn, sn, dn], axis=-1) * coef
        dR = np.stack([-sn * dn, cn * dn, -ed.modulus.ksq * sn * cn], axis=-1) * (coef * ed.r)
        return R, dR

    def curve(self, t):
        """``(z(t), z'(t))`` in closed form, each of shape ``t.shape + (3,)``."""
        t = np.asarray(t, float)
        if self.params.J == 0.0:
            R, dR = self.signed_radii(t)
            rot = np.exp(1j * self.theta0)
            return R * rot, dR * rot
        rsq = self.radii_sq(t)
        R = np.sqrt(rsq)
        _, gdot = self.gamma(t)
        dR = self.mu * np.asarray(gdot)[..., None] / (2.0 * R)
        theta = self.phases(t)
        rate = self.params.J * self.mu / rsq
        e = np.exp(1j * theta)
        return R * e, (dR + 1j * rate * R) * e

    def u(self, s, t) -> np.ndarray:
        """``exp(As) z(t)`` broadcast over ``s`` and ``t``."""
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        z, _ = self.curve(t)
        return np.exp(1j * s[..., None] * self.lam) * z

    def state(self, t0: float = 0.0) -> NeumannState:
        z, zd = self.curve(np.array(t0))
        return NeumannState(float(t0), z, zd)

    def sample(self, s, t) -> ImmersionSample:
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        y, _ = self.conformal_factor(t)
        return ImmersionSample(
            s, t, self.u(s, t), y, 1.0 + 2.0 * self.C / y**3, self.phases(t)
        )

    # -- curvature extremes ---------------------------------------------------
    def curvature_extremes(self) -> CurvatureExtremes:
        alpha, J = self.params.alpha, self.params.J
        if J == 0.0:
            if alpha == 0.0:
                # totally geodesic sphere; K_min -> -inf only along alpha -> 0
                return CurvatureExtremes(1.0, 1.0, 0.0, 1.0, unbounded=True)
            ymin, ymax = alpha * (1 + alpha), 1 + alpha
            kmin = 1.0 - 2.0 / (alpha * (1.0 + alpha))
            kmax = 1.0 - 2.0 * alpha * alpha / (1.0 + alpha)
            return CurvatureExtremes(kmin, kmax, ymin, ymax)
        if self.c3 == 0.0 or J == J_MAX:
            y0 = float(self.conformal_factor(0.0)[0])
            k0 = 1.0 + 2.0 * self.C / y0**3
            return CurvatureExtremes(k0, k0, y0, y0)
        ymin, ymax = _ydot_turning_points(self.lam_sq_sum, self.C)
        return CurvatureExtremes(
            1.0 + 2.0 * self.C / ymin**3, 1.0 + 2.0 * self.C / ymax**3, ymin, ymax
        )


def _ydot_turning_points(lam_sq_sum: float, C: float) -> tuple[float, float]:
    """Two positive roots of ``4y^3 - 2 y^2 sum(lam^2) - 4C = 0``."""

    def p(y):
        return 4 * y**3 - 2 * lam_sq_sum * y * y - 4 * C

    def dp(y):
        return 12 * y * y - 4 * lam_sq_sum * y

    roots = np.roots([4.0, -2.0 * lam_sq_sum, 0.0, -4.0 * C])
    real = np.sort(roots[np.abs(roots.imag) <= 1e-9 * np.abs(roots).max()].real)
    if len(real) < 3 or real[-2] <= 0:
        raise ConsistencyError("turning-point cubic lacks two positive roots")
    return _polish(p, dp, float(real[-2])), _polish(p, dp, float(real[-1]))


@lru_cache(maxsize=128)
def _immersion(params: ConeParameters) -> Immersion:
    return Immersion(params)


def phases(params: ConeParameters, ed: EllipticData | None, t) -> np.ndarray:
    """Unwrapped phases ``theta_j(t)`` (``ed`` accepted for symmetry with :func:`radii`)."""
    return _immersion(params).phases(t)


def immerse(params: ConeParameters, s, t) -> ImmersionSample:
    return _immersion(params).sample(s, t)


def curvature_extremes(params: ConeParameters) -> CurvatureExtremes:
    return _immersion(params).curvature_extremes()


def initial_state(params: ConeParameters, t0: float = 0.0) -> NeumannState:
    return _immersion(params).state(t0)


def immersion(params: ConeParameters) -> Immersion:
    """Cached :class:`Immersion` for ``params``."""
    return _immersion(params)


# -- sampled surfaces ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SurfaceGrid:
    """Uniform samples ``u[i, j] = u(s[i], t[j])`` of a surface in S^5.

    ``sampler`` regenerates the surface at other nodes (needed for step
    halving); ``endpoint`` tells whether the ranges include their right end.
    """

    s: np.ndarray
    t: np.ndarray
    u: np.ndarray
    s_range: tuple[float, float]
    t_range: tuple[float, float]
    endpoint: bool = True
    params: ConeParameters | None = None
    y: np.ndarray | None = None
    K: np.ndarray | None = None
    sampler: Callable | None = None
    label: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return self.u.shape[:2]

    @property
    def hs(self) -> float:
        return float(self.s[1] - self.s[0])

    @property
    def ht(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def h(self) -> float:
        return max(self.hs, self.ht)

    def refined(self) -> SurfaceGrid:
        """Same ranges at half the spacing."""
        if self.sampler is None:
            raise ValueError("grid has no sampler; cannot refine")
        ns, nt = self.shape
        if self.endpoint:
            ns, nt = 2 * ns - 1, 2 * nt - 1
        else:
            ns, nt = 2 * ns, 2 * nt
        return _build_grid(
            self.sampler, self.s_range, self.t_range, ns, nt, self.endpoint,
            self.params, self.label,
        )


def _axis_nodes(rng, n, endpoint):
    return np.linspace(rng[0], rng[1], n, endpoint=endpoint)


def _build_grid(sampler, s_range, t_range, ns, nt, endpoint, params, label):
    if ns < 2 or nt < 2:
        raise ValueError("grid needs at least two nodes per direction")
    s = _axis_nodes(s_range, ns, endpoint)
    t = _axis_nodes(t_range, nt, endpoint)
    u = sampler(s[:, None], t[None, :])
    y = K = None
    if params is not None:
        imm = _immersion(params)
        yt, _ = imm.conformal_factor(t)
        y = np.broadcast_to(yt, (ns, nt)).copy()
        K = 1.0 + 2.0 * imm.C / y**3
    for arr in (s, t, u):
        arr.flags.writeable = False
    return SurfaceGrid(
        s, t, u, tuple(map(float, s_range)), tuple(map(float, t_range)), endpoint,
        params, y, K, sampler, label,
    )


def sample_grid(
    params: ConeParameters,
    s_range: tuple[float, float],
    t_range: tuple[float, float],
    ns: int,
    nt: int,
    endpoint: bool = True,
) -> SurfaceGrid:
    """Sample ``u_{alpha,J}`` on a uniform ``ns x nt`` grid."""
    imm = _immersion(params)
    label = f"u(alpha={params.alpha:g}, J={params.J:g}, theta={params.theta:g})"
    return _build_grid(imm.u, s_range, t_range, ns, nt, endpoint, params, label)


def grid_from_function(
    fn: Callable, s_range, t_range, ns: int, nt: int, endpoint: bool = True, label: str = ""
) -> SurfaceGrid:
    """Grid for an arbitrary surface ``fn(s, t) -> (..., 3)`` complex array."""
    return _build_grid(fn, s_range, t_range, ns, nt, endpoint, None, label)
