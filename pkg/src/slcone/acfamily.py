"""Asymptotically conical special Lagrangians ``f(xi) * phi`` built from a
special Legendrian link ``phi``.

The profile curve satisfies ``Im(f^n) = d`` with ``arg f`` in ``[0, pi/n]``.
It is parametrized by ``f^n = -d sinh(xi) + i d``, so uniform steps in ``xi``
cluster towards both asymptotic rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .family import J_MAX, ConeParameters, SurfaceGrid, grid_from_function, immersion, sample_grid
from .verify import ResidualReport, legendrian_residual

__all__ = [
    "ACProfile",
    "ACGrid",
    "EndTable",
    "LinkRejected",
    "profile_curve",
    "profile_radius",
    "link_grid",
    "build_ac_surface",
    "ac_residuals",
    "asymptotic_ends",
    "cone_union_distance",
]

DEFAULT_RMAX = 50.0
DEFAULT_RMIN_RAY = 1e-2
FAR_FIELD = 2.0


class LinkRejected(ValueError):
    """The link grid is not close enough to a Legendrian surface in S^5."""


@dataclass(frozen=True)
class ACProfile:
    """Samples of the profile ``f``; ``branches`` holds one array (``d != 0``) or the
    two rays ``arg f = 0`` and ``arg f = pi/n`` (``d = 0``)."""

    n: int
    d: float
    m: int
    r_max: float
    xi: tuple
    branches: tuple
    conjugated: bool = False

    @property
    def samples(self) -> np.ndarray:
        return np.concatenate(self.branches)

    def im_power_residual(self) -> np.ndarray:
        """``|Im(f^n) - d|`` at every sample, evaluated in floating point."""
        return np.abs(np.imag(self.samples**self.n) - self.d)

    def refined(self) -> ACProfile:
        return profile_curve(self.n, self.d, 2 * self.m - 1, self.r_max)


def profile_radius(n: int, d: float, phi):
    """``rho = (d / sin(n phi))^(1/n)`` on the open sector ``0 < phi < pi/n``."""
    phi = np.asarray(phi, float)
    return (d / np.sin(n * phi)) ** (1.0 / n)


def profile_curve(n: int, d: float, m: int, r_max: float = DEFAULT_RMAX) -> ACProfile:
    """``m`` samples of ``Im(f^n) = d`` truncated at ``|f| <= r_max``.

    ``d < 0`` is reduced to ``|d|`` by conjugation (flagged).  ``d = 0`` gives
    the two rays, each sampled log-uniformly in ``|f|`` from 1e-2 to ``r_max``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if m < 2:
        raise ValueError("need at least two samples")
    conj = d < 0
    dd = abs(float(d))
    if dd == 0.0:
        xi = np.linspace(math.log(DEFAULT_RMIN_RAY), math.log(r_max), m)
        rho = np.exp(xi)
        rays = (rho.astype(complex), rho * np.exp(1j * math.pi / n))
        return ACProfile(n, 0.0, m, r_max, (xi, xi), rays, False)
    if r_max**n <= dd:
        raise ValueError(f"r_max={r_max} does not exceed the profile's inner radius {dd ** (1 / n):.3g}")
    xi_max = math.acosh(r_max**n / dd)
    xi = np.linspace(-xi_max, xi_max, m)
    w = -dd * np.sinh(xi) + 1j * dd
    rho = np.abs(w) ** (1.0 / n)
    phi = np.angle(w) / n
    f = rho * np.exp(1j * phi)
    if conj:
        f = np.conj(f)
    return ACProfile(n, float(d), m, r_max, (xi,), (f,), conj)


# -- links -----------------------------------------------------------------------


def link_grid(name: str, ns: int = 33, nt: int = 33) -> tuple[SurfaceGrid, float]:
    """A named link grid and its calibration phase.

    ``clifford``: the flat member ``J = 1/(3 sqrt 3)`` of the family;
    ``real``: the real unit 2-sphere (avoiding the poles);
    ``alpha=a,J=j``: any family member over one basic period.
    """
    if name == "clifford":
        params = ConeParameters.make(0, J_MAX)
        return sample_grid(params, (0.0, 2 * math.pi), (0.0, 2 * math.pi), ns, nt), 0.0
    if name == "real":

        def real_sphere(s, t):
            s, t = np.broadcast_arrays(s, t)
            return np.stack([np.cos(t) * np.cos(s), np.cos(t) * np.sin(s), np.sin(t)], -1).astype(complex)

        return grid_from_function(real_sphere, (0.0, 2 * math.pi), (-1.2, 1.2), ns, nt, label="real S^2"), 0.0
    if name.startswith("alpha="):
        fields = dict(part.split("=") for part in name.split(","))
        params = ConeParameters.make(float(fields["alpha"]), float(fields.get("J", 0.0)),
                                     float(fields.get("theta", 0.0)))
        T = immersion(params).T
        T = T if math.isfinite(T) else 6.0
        return sample_grid(params, (0.0, 2 * math.pi), (-0.5 * T, 0.5 * T), ns, nt), params.theta
    raise ValueError(f"unknown link {name!r}")


# -- the product surface -----------------------------------------------------------


@dataclass(frozen=True)
class ACBranch:
    xi: np.ndarray
    f: np.ndarray
    points: np.ndarray


@dataclass(frozen=True)
class ACGrid:
    """``Phi(xi, s, t) = f(xi) * e^{i theta/n} phi(s, t)``, one block per profile branch."""

    profile: ACProfile
    link: SurfaceGrid
    theta: float
    link_rotated: np.ndarray
    branches: tuple = field(repr=False)
    link_check: ResidualReport | None = None


def _rotated_link(link: SurfaceGrid, theta: float, n: int) -> np.ndarray:
    # a theta-special cone rotated by e^{i theta/n} is calibrated by Re(dz1...dzn)
    return link.u * np.exp(1j * theta / n)


def build_ac_surface(profile: ACProfile, link: SurfaceGrid, theta: float = 0.0,
                     link_tol: float = 1e-2) -> ACGrid:
    """Product samples ``f * phi`` after checking that ``link`` is Legendrian in S^5."""
    if link.u.shape[-1] != profile.n:
        raise ValueError("link dimension does not match the profile exponent n")
    norm_err = float(np.max(np.abs(np.linalg.norm(link.u, axis=-1) - 1.0)))
    check = legendrian_residual(link, refine=False, richardson=True)
    if norm_err > link_tol or check.max_abs > link_tol:
        raise LinkRejected(
            f"link rejected: max ||phi|-1| = {norm_err:.3g}, Legendrian residual "
            f"{check.max_abs:.3g} (tolerance {link_tol:.3g})"
        )
    phi = _rotated_link(link, theta, profile.n)
    branches = tuple(
        ACBranch(xi, f, f[:, None, None, None] * phi[None])
        for xi, f in zip(profile.xi, profile.branches)
    )
    return ACGrid(profile, link, theta, phi, branches, check)


def _branch_residuals(branch: ACBranch, hs: float, ht: float):
    P = branch.points
    hx = branch.xi[1] - branch.xi[0]
    dx = ((P[2:] - P[:-2]) / (2 * hx))[:, 1:-1, 1:-1]
    ds = ((P[:, 2:] - P[:, :-2]) / (2 * hs))[1:-1, :, 1:-1]
    dt = ((P[:, :, 2:] - P[:, :, :-2]) / (2 * ht))[1:-1, 1:-1, :]

    def omega(a, b):
        num = np.abs(np.imag(np.sum(np.conj(a) * b, axis=-1)))
        return num / (np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1))

    lag = max(float(omega(dx, ds).max()), float(omega(dx, dt).max()), float(omega(ds, dt).max()))
    det = np.linalg.det(np.stack([dx, ds, dt], axis=-1))
    scale = np.linalg.norm(dx, axis=-1) * np.linalg.norm(ds, axis=-1) * np.linalg.norm(dt, axis=-1)
    special = float(np.max(np.abs(det.imag) / scale))
    return lag, special


def _grid_residuals(acgrid: ACGrid):
    lag = special = 0.0
    for br in acgrid.branches:
        a, b = _branch_residuals(br, acgrid.link.hs, acgrid.link.ht)
        lag, special = max(lag, a), max(special, b)
    return lag, special


def ac_residuals(acgrid: ACGrid, refine: bool = True) -> dict[str, ResidualReport]:
    """Relative Lagrangian residual ``max |omega(Phi_a, Phi_b)| / |Phi_a||Phi_b|``
    and special residual ``max |Im det(Phi_xi, Phi_s, Phi_t)| / prod |Phi_.|``,
    by centered differences in all three parameters."""
    lag, special = _grid_residuals(acgrid)
    lag2 = special2 = None
    h = max(acgrid.link.h, float(acgrid.profile.xi[0][1] - acgrid.profile.xi[0][0]))
    if refine and acgrid.link.sampler is not None:
        fine = build_ac_surface(acgrid.profile.refined(), acgrid.link.refined(), acgrid.theta)
        lag2, special2 = _grid_residuals(fine)
    dims = (acgrid.profile.m,) + acgrid.link.shape

    def order(a, b):
        return math.log2(a / b) if b and a > 0 and b > 0 else None

    return {
        "lagrangian": ResidualReport("ac_lagrangian", lag, dims, h, order(lag, lag2), lag2),
        "special": ResidualReport("ac_special", special, dims, h, order(special, special2), special2),
    }


# -- asymptotics -----------------------------------------------------------------------


@dataclass(frozen=True)
class EndTable:
    """Distance of far-field slices to the two cones, ordered by increasing ``|f|``."""

    radius: np.ndarray
    to_cone: np.ndarray
    to_rotated_cone: np.ndarray

    @property
    def nearest(self) -> str:
        return "cone" if np.median(self.to_cone) < np.median(self.to_rotated_cone) else "rotated_cone"

    @property
    def decreasing(self) -> bool:
        d = self.to_cone if self.nearest == "cone" else self.to_rotated_cone
        return bool(np.all(np.diff(d) <= 1e-15 * np.maximum(1.0, d[:-1])))

    def to_dict(self) -> dict:
        return {
            "radius": self.radius.tolist(),
            "distance_to_cone": self.to_cone.tolist(),
            "distance_to_rotated_cone": self.to_rotated_cone.tolist(),
            "nearest": self.nearest,
            "decreasing": self.decreasing,
        }


class _ConeDistance:
    """Distance from points of C^n to the cone over a sampled link."""

    def __init__(self, link_points: np.ndarray, k: int = 8):
        pts = link_points.reshape(-1, link_points.shape[-1])
        self.pts = pts
        self.tree = cKDTree(np.concatenate([pts.real, pts.imag], axis=-1))
        self.k = min(k, len(pts))

    def __call__(self, P: np.ndarray) -> np.ndarray:
        P = P.reshape(-1, P.shape[-1])
        r = np.linalg.norm(P, axis=-1)
        unit = P / np.where(r > 0, r, 1.0)[:, None]
        _, idx = self.tree.query(np.concatenate([unit.real, unit.imag], axis=-1), k=self.k)
        idx = np.atleast_2d(idx.T).T if self.k == 1 else idx
        proj = np.real(np.einsum("pkj,pj->pk", np.conj(self.pts[idx]), P))
        dist2 = r[:, None] ** 2 - np.maximum(proj, 0.0) ** 2
        return np.sqrt(np.maximum(dist2.min(axis=1), 0.0))


def asymptotic_ends(acgrid: ACGrid, far_field: float = FAR_FIELD, min_samples: int = 5):
    """Decay tables for the two ends of ``Sigma_d``.

    Each far-field slice ``{f phi}`` (``|f| >= far_field``) is measured by its
    largest distance to ``C(Sigma)`` and to ``C(e^{i pi/n} Sigma)``.
    Returns ``(end_at_arg_0, end_at_arg_pi_over_n)``.
    """
    prof = acgrid.profile
    if prof.d == 0.0:
        raise ValueError("asymptotic ends need d != 0")
    link = acgrid.link_rotated
    to_cone = _ConeDistance(link)
    to_rot = _ConeDistance(link * np.exp(1j * math.pi / prof.n))
    (branch,) = acgrid.branches
    radius = np.abs(branch.f)
    arg = np.abs(np.angle(branch.f))
    ends = []
    for sel in (arg < 0.5 * math.pi / prof.n, arg >= 0.5 * math.pi / prof.n):
        idx = np.flatnonzero(sel & (radius >= far_field))
        if len(idx) < min_samples:
            raise ValueError(f"only {len(idx)} far-field samples on an end; need {min_samples}")
        idx = idx[np.argsort(radius[idx])]
        dc = np.array([to_cone(branch.points[i]).max() for i in idx])
        dr = np.array([to_rot(branch.points[i]).max() for i in idx])
        ends.append(EndTable(radius[idx], dc, dr))
    return tuple(ends)


def cone_union_distance(acgrid: ACGrid, r_max: float = FAR_FIELD) -> float:
    """Sup over samples with ``|f| <= r_max`` of the distance to ``C(Sigma) u C(e^{i pi/n} Sigma)``."""
    link = acgrid.link_rotated
    n = acgrid.profile.n
    dist_a = _ConeDistance(link)
    dist_b = _ConeDistance(link * np.exp(1j * math.pi / n))
    worst = 0.0
    for br in acgrid.branches:
        sel = np.abs(br.f) <= r_max
        if not sel.any():
            continue
        P = br.points[sel]
        worst = max(worst, float(np.minimum(dist_a(P), dist_b(P)).max()))
    return worst
