"""Closure of ``u_{alpha,J}``: period lattices, torus data and embeddedness scans.

A pair ``(sigma, tau)`` is a period iff ``tau = m T`` for an integer ``m``
and ``exp(i (sigma lam_j + m h_j)) = 1`` for every ``j``, where ``h`` is the
phase holonomy over one basic period ``T``.  Writing ``sigma = 2 pi a - m h_1``
the conditions reduce to integer pairs ``(a, m)`` with

    a alpha - m q in Z,   m (sum h) / pi even,      q = (alpha h_1 - h_2) / 2 pi,

so the lattice is rank 2 exactly when alpha and ``q`` are both rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize
from scipy.spatial import cKDTree

from .family import J_MAX, ConeParameters, SurfaceGrid, immersion, sample_grid
from .neumann import integrate as flow

__all__ = [
    "PeriodLattice",
    "TorusSpec",
    "ProximityReport",
    "rational_approximation",
    "closure_test",
    "torus_lattice",
    "verify_period",
    "minimality_check",
    "embeddedness_scan",
    "fundamental_grid",
    "theta2_of_J",
    "theta2_from_flow",
    "basic_period_from_flow",
    "search_closure",
]

MAX_DENOMINATOR = 10**6
DEFAULT_TOL = 1e-9
TWO_PI = 2.0 * math.pi


# -- rational detection ----------------------------------------------------------


def _convergents(x: float, max_den: int):
    a0 = math.floor(x)
    p0, q0, p1, q1 = 1, 0, a0, 1
    yield Fraction(p1, q1)
    frac = x - a0
    while frac > 0 and q1 <= max_den:
        x = 1.0 / frac
        a = math.floor(x)
        frac = x - a
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > max_den:
            return
        yield Fraction(p1, q1)


def rational_approximation(x: float, tol: float, max_den: int = MAX_DENOMINATOR) -> Fraction | None:
    """Smallest-denominator convergent within ``tol`` of ``x``, or None.

    A hit is only accepted when ``q**2 * tol <= 0.01``: any real has
    convergents with ``|x - p/q| < 1/q**2``, so a match at larger
    denominators carries no evidence of rationality.
    """
    if not math.isfinite(x):
        return None
    for frac in _convergents(x, max_den):
        if abs(x - frac) <= tol:
            return frac if frac.denominator**2 * tol <= 0.01 else None
    return None


# -- lattices ---------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodLattice:
    """Periods ``(sigma, tau)`` of ``u``.  ``status`` is one of ``"torus"``,
    ``"one_period"``, ``"no_rational_closure"`` or ``"sphere"``."""

    basis: list
    rectangular: bool | None
    basic_period_T: float
    holonomy: tuple
    status: str
    alpha_exact: Fraction | None = None
    q_exact: Fraction | None = None
    degenerate: str | None = None
    note: str = ""

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vec, tol: float = 1e-8) -> bool:
        """Is ``vec`` an integer combination of the basis?"""
        vec = np.asarray(vec, float)
        if self.rank == 0:
            return bool(np.allclose(vec, 0.0, atol=tol))
        B = np.array(self.basis, float).T
        coef, *_ = np.linalg.lstsq(B, vec, rcond=None)
        rounded = np.round(coef)
        scale = max(1.0, float(np.abs(B).max()))
        return bool(np.max(np.abs(B @ rounded - vec)) <= tol * scale)

    def reduce(self, vec) -> np.ndarray:
        """Shortest representative of ``vec`` modulo the lattice."""
        vec = np.asarray(vec, float)
        if self.rank == 0:
            return vec
        B = np.array(self.basis, float).T
        coef, *_ = np.linalg.lstsq(B, vec.T, rcond=None)
        base = np.floor(coef)
        best = None
        offsets = [np.array(o) for o in np.ndindex(*(2,) * self.rank)]
        for off in offsets:
            cand = vec.T - B @ (base + off.reshape(-1, *([1] * (base.ndim - 1))))
            norm = np.linalg.norm(cand, axis=0)
            if best is None:
                best, best_norm = cand, norm
            else:
                pick = norm < best_norm
                best = np.where(pick, cand, best)
                best_norm = np.minimum(norm, best_norm)
        return best.T

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "basis": [[float(a), float(b)] for a, b in self.basis],
            "rectangular": self.rectangular,
            "T": self.basic_period_T,
            "holonomy": [float(h) for h in self.holonomy],
            "alpha": str(self.alpha_exact) if self.alpha_exact is not None else None,
            "q": str(self.q_exact) if self.q_exact is not None else None,
            "degenerate": self.degenerate,
            "note": self.note,
        }


def _gauss_reduce(b1, b2):
    b1, b2 = np.asarray(b1, float), np.asarray(b2, float)
    for _ in range(100):
        if b1 @ b1 > b2 @ b2:
            b1, b2 = b2, b1
        mu = round(float(b1 @ b2) / float(b1 @ b1))
        if mu == 0:
            break
        b2 = b2 - mu * b1
    return b1, b2


def _is_rectangular(b1, b2, tol=1e-9) -> bool:
    r1, r2 = _gauss_reduce(b1, b2)
    return abs(float(r1 @ r2)) <= tol * float(np.linalg.norm(r1) * np.linalg.norm(r2))


def _exact_alpha(params: ConeParameters, tol: float) -> Fraction | None:
    if params.axis.exact is not None:
        return params.axis.exact
    return rational_approximation(params.alpha, tol)


def _flat_lattice(params: ConeParameters, h) -> PeriodLattice:
    # phases are linear: sigma lam + tau * 3 J mu must lie in 2 pi Z^3
    lam, mu = params.axis.lam, params.axis.mu
    rate = 3.0 * params.J * mu
    M = np.array([[lam[0], rate[0]], [lam[1], rate[1]]])
    sols = np.linalg.solve(M, TWO_PI * np.eye(2))
    b1, b2 = _gauss_reduce(sols[:, 0], sols[:, 1])
    basis = [tuple(map(float, b1)), tuple(map(float, b2))]
    return PeriodLattice(
        basis, _is_rectangular(b1, b2), immersion(params).T, tuple(h), "torus",
        degenerate="clifford_J", note="flat Clifford torus; phases are linear in t",
    )


def closure_test(
    params: ConeParameters, tol: float = DEFAULT_TOL, max_den: int = MAX_DENOMINATOR
) -> PeriodLattice:
    """Period lattice of ``u_{alpha,J}`` as detected at tolerance ``tol``.

    Rationality is decided by continued fractions; a negative answer means
    "no rational closure detected", never irrationality.
    """
    imm = immersion(params)
    T = imm.T
    deg = imm.ed.degenerate
    if params.J == J_MAX:
        return _flat_lattice(params, imm.holonomy)
    if not math.isfinite(T):
        return PeriodLattice(
            [(TWO_PI, 0.0)], None, T, (0.0, 0.0, 0.0), "sphere",
            note="totally geodesic sphere; t is not periodic",
        )
    h = imm.holonomy
    s = round(float(h.sum()) / math.pi)
    if abs(h.sum() - s * math.pi) > 1e-6:
        raise ArithmeticError(f"sum of holonomies {h.sum()!r} is not a multiple of pi")
    alpha = _exact_alpha(params, tol)
    qval = (params.alpha * h[0] - h[1]) / TWO_PI
    q = rational_approximation(qval, tol, max_den)
    even = 1 if s % 2 == 0 else 2

    if alpha is not None and q is not None:
        P, Q = alpha.numerator, alpha.denominator
        M, N = q.numerator, q.denominator
        m0 = math.lcm(N // math.gcd(N, Q), even)
        L = m0 * M * Q // N
        a = (L * pow(P, -1, Q)) % Q if Q > 1 else 0
        sigma = (TWO_PI * a - m0 * h[0]) % (TWO_PI * Q)
        if TWO_PI * Q - sigma < 1e-9 * TWO_PI * Q:
            sigma = 0.0
        w1, w2 = (TWO_PI * Q, 0.0), (float(sigma), m0 * T)
        return PeriodLattice(
            [w1, w2], _is_rectangular(w1, w2), T, tuple(h), "torus", alpha, q, deg
        )
    if alpha is not None:
        return PeriodLattice(
            [(TWO_PI * alpha.denominator, 0.0)], None, T, tuple(h), "one_period", alpha, None,
            deg, note="holonomy quotient not rational at this tolerance",
        )
    hit = _integer_relation(params.alpha, qval, even, tol)
    if hit is not None:
        a, m = hit
        vec = (TWO_PI * a - m * h[0], m * T)
        return PeriodLattice(
            [vec], None, T, tuple(h), "one_period", None, None, deg,
            note="no rational closure detected (alpha not rational at this tolerance); one period from an integer relation",
        )
    return PeriodLattice(
        [], None, T, tuple(h), "no_rational_closure", None, None, deg,
        note="no rational closure detected at this tolerance",
    )


def _integer_relation(alpha, q, even, tol, bound=200):
    """Smallest ``m > 0`` (then ``|a|``) with ``a alpha - m q`` integral."""
    a = np.arange(-bound, bound + 1)
    for m in range(even, bound + 1, even):
        v = a * alpha - m * q
        hit = np.abs(v - np.round(v)) <= tol
        if hit.any():
            idx = np.flatnonzero(hit)
            best = idx[np.argmin(np.abs(a[idx]))]
            return int(a[best]), m
    return None


# -- J = 0 tori ---------------------------------------------------------------------


@dataclass(frozen=True)
class TorusSpec:
    m: int
    n: int
    lattice: PeriodLattice
    parity: str
    params: ConeParameters = field(repr=False)

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.m, self.n)


def torus_lattice(m: int, n: int) -> TorusSpec:
    """The ``J = 0`` torus at ``alpha = m/n`` with its lattice from the parity rule."""
    if not (1 <= m <= n):
        raise ValueError("need 1 <= m <= n")
    if math.gcd(m, n) != 1:
        raise ValueError(f"gcd({m}, {n}) != 1")
    params = ConeParameters.make(Fraction(m, n), 0.0)
    imm = immersion(params)
    K, r = imm.ed.quarter_period, imm.ed.r
    w1 = (2 * n * math.pi, 0.0)
    if (m * n) % 2 == 0:
        basis, parity, rect = [w1, (0.0, 4 * K / r)], "even", True
    else:
        basis, parity, rect = [w1, (n * math.pi, 2 * K / r)], "odd", False
    lattice = PeriodLattice(
        basis, rect, imm.T, tuple(imm.holonomy), "torus", Fraction(m, n),
        Fraction(m - n, 2 * n), imm.ed.degenerate,
    )
    return TorusSpec(m, n, lattice, parity, params)


def verify_period(params: ConeParameters, vec, ns: int = 64, nt: int = 64) -> float:
    """``max |u(s + sigma, t + tau) - u(s, t)|`` over an ``ns x nt`` test grid."""
    imm = immersion(params)
    T = imm.T if math.isfinite(imm.T) else 6.0
    s = np.linspace(0.0, TWO_PI, ns, endpoint=False)[:, None]
    t = np.linspace(-0.5 * T, 0.5 * T, nt, endpoint=False)[None, :]
    sigma, tau = vec
    return float(np.abs(imm.u(s + sigma, t + tau) - imm.u(s, t)).max())


@dataclass(frozen=True)
class MinimalityReport:
    candidates: int
    spurious: list
    ok: bool


def minimality_check(params: ConeParameters, lattice: PeriodLattice, tol: float = 1e-8) -> MinimalityReport:
    """Search the fundamental rectangle for periods not in ``lattice``.

    Candidates come from the unit-modulus conditions on the phase factors
    ``exp(i (sigma lam_j + m h_j))``; each one is confirmed on ``u`` itself.
    """
    if lattice.rank != 2:
        raise ValueError("minimality needs a rank-2 lattice")
    (w1s, _), (_, w2t) = lattice.basis
    T = lattice.basic_period_T
    m_max = int(round(w2t / T))
    h = np.asarray(lattice.holonomy)
    lam = params.axis.lam
    spurious, count = [], 0
    for m in range(0, m_max + 1):
        # sigma + m h_1 must be a multiple of 2 pi
        k = np.arange(-2, int(w1s / TWO_PI) + 3)
        sig = TWO_PI * k - m * h[0]
        sig = sig[(sig >= -1e-12) & (sig < w1s - 1e-9)]
        for sigma in sig:
            if m == 0 and abs(sigma) < 1e-12:
                continue
            ph = np.exp(1j * (sigma * lam + m * h))
            if np.max(np.abs(ph - 1.0)) > 1e-6:
                continue
            count += 1
            vec = (float(sigma), m * T)
            if lattice.contains(vec):
                continue
            if verify_period(params, vec, 16, 16) <= tol:
                spurious.append(vec)
    return MinimalityReport(count, spurious, not spurious)


# -- embeddedness ---------------------------------------------------------------------


@dataclass(frozen=True)
class ProximityReport:
    pairs: list
    eps: float
    threshold: float
    n_points: int
    n_close: int

    @property
    def empty(self) -> bool:
        return not self.pairs

    def to_dict(self) -> dict:
        return {
            "pairs": [[list(map(int, p)), list(map(int, q)), d] for p, q, d in self.pairs],
            "eps": self.eps,
            "threshold": self.threshold,
            "n_points": self.n_points,
            "n_close": self.n_close,
        }


def fundamental_grid(spec: TorusSpec, ns: int, nt: int) -> SurfaceGrid:
    """Half-open grid over ``[0, w1_sigma) x [0, w2_tau)``."""
    (w1s, _), (_, w2t) = spec.lattice.basis
    return sample_grid(spec.params, (0.0, w1s), (0.0, w2t), ns, nt, endpoint=False)


def embeddedness_scan(spec: TorusSpec | PeriodLattice, grid: SurfaceGrid, eps: float | str | None = None,
                      max_pairs: int = 1000) -> ProximityReport:
    """Report sample pairs close in R^6 but far apart on the torus.

    ``eps=None`` uses half the shortest grid edge in R^6, which catches
    repeated sheets (a grid spanning two domains) but not transversal
    crossings between samples.  ``eps="covering"`` uses the longest grid
    edge instead, so every point of the surface is within ``eps`` of a
    sample and crossings of two sheets also produce close pairs.

    A pair is spurious when its parameter distance modulo the lattice
    exceeds ``max(3 h, 3 eps / min|du|)``.  An empty report means no
    self-intersection was seen at this resolution.
    """
    lattice = spec.lattice if isinstance(spec, TorusSpec) else spec
    (w1s, w1t), (_, w2t) = lattice.basis
    if abs(w1t) > 1e-12:
        raise ValueError("first basis vector must be (sigma, 0)")
    if grid.endpoint:
        raise ValueError("grid must be half-open (endpoint=False)")
    if not (
        math.isclose(grid.s_range[1] - grid.s_range[0], w1s, rel_tol=1e-12)
        and math.isclose(grid.t_range[1] - grid.t_range[0], w2t, rel_tol=1e-12)
    ):
        raise ValueError("grid does not cover one fundamental domain of the lattice")
    ns, nt = grid.shape
    edge_s = np.linalg.norm(np.diff(grid.u, axis=0), axis=-1)
    edge_t = np.linalg.norm(np.diff(grid.u, axis=1), axis=-1)
    if eps is None:
        eps = 0.5 * float(min(edge_s.min(), edge_t.min()))
    elif eps == "covering":
        eps = float(max(edge_s.max(), edge_t.max()))
    stretch = float(min(edge_s.min() / grid.hs, edge_t.min() / grid.ht))
    if stretch <= 0.0:
        raise ValueError("grid has coincident neighbouring samples; the map is not an immersion here")
    threshold = max(3.0 * grid.h, 3.0 * float(eps) / stretch)
    pts = np.concatenate([grid.u.real, grid.u.imag], axis=-1).reshape(-1, 6)
    close = cKDTree(pts).query_pairs(eps, output_type="ndarray")
    pairs = []
    if len(close):
        S, Tg = np.meshgrid(grid.s, grid.t, indexing="ij")
        par = np.stack([S.ravel(), Tg.ravel()], axis=-1)
        diff = lattice.reduce(par[close[:, 0]] - par[close[:, 1]])
        dist = np.linalg.norm(diff, axis=-1)
        for (i, j), dd in zip(close, dist):
            if dd > threshold:
                pairs.append((divmod(int(i), nt), divmod(int(j), nt), float(dd)))
                if len(pairs) >= max_pairs:
                    break
    return ProximityReport(pairs, eps, threshold, len(pts), int(len(close)))


# -- alpha = 0 sweep ------------------------------------------------------------------


def _alpha0(J: float) -> ConeParameters:
    if not (0.0 < J < J_MAX):
        raise ValueError(f"J={J!r} outside (0, 1/(3 sqrt 3))")
    return ConeParameters.make(Fraction(0), J)


def theta2_of_J(J: float, epsabs: float = 1e-13) -> float:
    """``theta_2(T)`` at ``alpha = 0`` by adaptive quadrature (QUADPACK route)."""
    params = _alpha0(J)
    imm = immersion(params)
    T = imm.T

    def rate(t):
        return float(imm.phase_rates(np.array([t]))[0, 1])

    total = 0.0
    for a, b in ((0.0, 0.5 * T), (0.5 * T, T)):
        val, err = sp_integrate.quad(rate, a, b, epsabs=epsabs, epsrel=1e-13, limit=200)
        if err > 1e-9:
            raise ArithmeticError(f"quadrature error estimate {err:.3g} too large")
        total += val
    return total


def basic_period_from_flow(params: ConeParameters, tol: float = 1e-12) -> float:
    """``T`` from the integrated flow: second upward zero of ``gamma'``.

    Starts at the minimum of gamma; the crossing is refined with Brent's
    method by re-integrating from the last step before it.
    """
    imm = immersion(params)
    axis = params.axis
    j = int(np.argmax(np.abs(axis.mu)))
    state0 = imm.state(0.0)

    def gdot(z, zd):
        return 2.0 * np.real(np.conj(z[..., j]) * zd[..., j]) / axis.mu[j]

    t_lo, chunk, sign_changes = 0.0, 1.0, []
    state = state0
    for _ in range(10_000):
        tr = flow(state, axis, state.t + chunk, tol=1e-11)
        g = gdot(tr.z, tr.zdot)
        g[0] = g[1] if state.t == 0.0 else g[0]
        for i in range(1, len(g)):
            if g[i - 1] < 0 <= g[i] and sign_changes:
                start = tr.state(i - 1)

                def f(t):
                    if t == start.t:
                        return gdot(start.z, start.zdot)
                    fin = flow(start, axis, t, tol=1e-12).final
                    return gdot(fin.z, fin.zdot)

                return optimize.brentq(f, start.t, tr.t[i], xtol=tol, rtol=1e-15)
            if g[i - 1] > 0 >= g[i]:
                sign_changes.append(tr.t[i])
        state = tr.final
        t_lo = state.t
    raise ArithmeticError(f"no period found up to t={t_lo}")


def theta2_from_flow(J: float, tol: float = 1e-11) -> float:
    """``theta_2(T)`` at ``alpha = 0`` by integrating the Neumann flow and
    unwrapping ``arg z_2``."""
    params = _alpha0(J)
    imm = immersion(params)
    tr = flow(imm.state(0.0), params.axis, imm.T, tol=tol)
    return float(np.unwrap(np.angle(tr.z[:, 1]))[-1] - np.angle(tr.z[0, 1]))


@dataclass(frozen=True)
class SearchResult:
    target: Fraction
    J: float
    theta2_T: float
    residual: float
    lattice: PeriodLattice


def theta2_range() -> tuple[float, float]:
    """Open interval of ``theta_2(T) / 2 pi`` over ``J in (0, J_MAX)`` at ``alpha = 0``."""
    return 0.5, 1.0 / math.sqrt(3.0)


def search_closure(target: Fraction, tol: float = 1e-10) -> SearchResult:
    """Find ``J`` with ``theta_2(T) / 2 pi = target`` at ``alpha = 0`` and
    confirm closure.  Uses monotonicity of ``theta_2(T)`` in ``J``."""
    target = Fraction(target)
    lo, hi = theta2_range()
    if not (lo < target < hi):
        raise ValueError(
            f"target {target} outside the attainable range ({lo}, {hi:.6f}) of theta_2(T)/2pi"
        )

    def f(J):
        return immersion(_alpha0(J)).holonomy[1] / TWO_PI - float(target)

    a, b = 1e-9, J_MAX * (1 - 1e-12)
    J = optimize.brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    th = float(immersion(_alpha0(J)).holonomy[1])
    residual = abs(th / TWO_PI - float(target))
    lattice = closure_test(_alpha0(J), tol=max(tol, 10 * residual))
    return SearchResult(target, J, th, residual, lattice)
