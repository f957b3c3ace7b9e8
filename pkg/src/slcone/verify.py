"""Finite-difference audits of sampled surfaces in S^5.

Each check is evaluated on the grid and, when the grid can be regenerated,
again at half the spacing; the ratio gives an observed convergence order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .family import ConeParameters, SurfaceGrid, immersion
from .neumann import integrate

__all__ = [
    "ResidualReport",
    "derivatives",
    "harmonic_residual",
    "hopf_differential",
    "legendrian_residual",
    "calibration_defect",
    "neumann_vs_closed_form",
    "gauss_curvature_fd",
    "curvature_residual",
    "run_all",
]

MIN_NODES = 5
ORDER_TARGET = 1.9
ROUNDOFF_FLOOR = 1e-8


@dataclass(frozen=True)
class ResidualReport:
    name: str
    max_abs: float
    grid_dims: tuple
    h: float
    convergence_order: float | None = None
    refined_max_abs: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        """Observed order reaches the target, or the refined residual is at noise level."""
        if self.refined_max_abs is None:
            return self.max_abs <= ROUNDOFF_FLOOR
        if self.refined_max_abs <= ROUNDOFF_FLOOR:
            return True
        return self.convergence_order is not None and self.convergence_order >= ORDER_TARGET

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_abs": self.max_abs,
            "grid_dims": list(self.grid_dims),
            "h": self.h,
            "convergence_order": self.convergence_order,
            "refined_max_abs": self.refined_max_abs,
            "converged": self.converged,
            **{k: v for k, v in self.extra.items()},
        }


@dataclass(frozen=True)
class Derivatives:
    u: np.ndarray
    us: np.ndarray
    ut: np.ndarray
    uss: np.ndarray
    utt: np.ndarray


def _check_grid(grid: SurfaceGrid, h: float | None, stencil: int = 1):
    ns, nt = grid.shape
    if min(ns, nt) < MIN_NODES * stencil:
        raise ValueError(f"grid {ns}x{nt} too coarse; need at least {MIN_NODES * stencil} nodes per direction")
    if h is not None and not math.isclose(h, grid.h, rel_tol=1e-9):
        raise ValueError(f"h={h!r} does not match the grid spacing {grid.h!r}")


def derivatives(grid: SurfaceGrid, richardson: bool = False) -> Derivatives:
    """Centered differences at interior nodes.

    With ``richardson=True`` the step-h and step-2h stencils are combined as
    ``(4 D_h - D_2h) / 3`` (fourth order; two fewer nodes on each side).
    """
    u, hs, ht = grid.u, grid.hs, grid.ht

    def d1(k, axis):
        h = hs if axis == 0 else ht
        return (np.roll(u, -k, axis) - np.roll(u, k, axis)) / (2 * k * h)

    def d2(k, axis):
        h = hs if axis == 0 else ht
        return (np.roll(u, -k, axis) - 2 * u + np.roll(u, k, axis)) / (k * h) ** 2

    if richardson:
        pad = 2
        us = (4 * d1(1, 0) - d1(2, 0)) / 3
        ut = (4 * d1(1, 1) - d1(2, 1)) / 3
        uss = (4 * d2(1, 0) - d2(2, 0)) / 3
        utt = (4 * d2(1, 1) - d2(2, 1)) / 3
    else:
        pad = 1
        us, ut, uss, utt = d1(1, 0), d1(1, 1), d2(1, 0), d2(1, 1)
    inner = (slice(pad, -pad), slice(pad, -pad))
    return Derivatives(*(a[inner] for a in (u, us, ut, uss, utt)))


def _herm(a, b):
    return np.sum(np.conj(a) * b, axis=-1)


def _harmonic(d: Derivatives):
    energy = np.sum(np.abs(d.us) ** 2 + np.abs(d.ut) ** 2, axis=-1)
    res = d.uss + d.utt + energy[..., None] * d.u
    return float(np.max(np.linalg.norm(res, axis=-1))), {}


def _hopf(d: Derivatives):
    phi = 0.25 * (
        np.sum(np.abs(d.us) ** 2, -1) - np.sum(np.abs(d.ut) ** 2, -1) - 2j * np.real(_herm(d.us, d.ut))
    )
    return float(np.max(np.abs(phi))), {}


def _legendrian(d: Derivatives):
    a = np.abs(np.imag(_herm(d.u, d.us)))
    b = np.abs(np.imag(_herm(d.u, d.ut)))
    return float(max(a.max(), b.max())), {"max_omega_s": float(a.max()), "max_omega_t": float(b.max())}


def _calibration(theta):
    def check(d: Derivatives):
        det = np.linalg.det(np.stack([d.u, d.us, d.ut], axis=-1)) * np.exp(1j * theta)
        gram = (
            np.sum(np.abs(d.us) ** 2, -1) * np.sum(np.abs(d.ut) ** 2, -1)
            - np.real(_herm(d.us, d.ut)) ** 2
        )
        vol = np.sqrt(np.maximum(gram, 0.0))
        im = np.abs(det.imag)
        ok = vol > 1e-12 * max(1.0, float(vol.max()))
        ratio = np.abs(np.abs(det.real[ok]) / vol[ok] - 1.0)
        sign = float(np.sign(np.sum(det.real)))
        extra = {
            "max_imag": float(im.max()),
            "max_volume_ratio_defect": float(ratio.max()) if ratio.size else 0.0,
            "orientation": sign,
        }
        return float(max(extra["max_imag"], extra["max_volume_ratio_defect"])), extra

    return check


def _report(name, grid, h, kernel, refine, stencil=1, richardson=False):
    _check_grid(grid, h, stencil)
    value, extra = kernel(derivatives(grid, richardson))
    order = refined = None
    if refine and grid.sampler is not None:
        fine = grid.refined()
        refined, fine_extra = kernel(derivatives(fine, richardson))
        extra = dict(extra, refined=fine_extra)
        if value > 0 and refined > 0:
            order = math.log2(value / refined)
    return ResidualReport(name, value, grid.shape, grid.h, order, refined, extra)


def harmonic_residual(grid: SurfaceGrid, h: float | None = None, refine: bool = True,
                      richardson: bool = False) -> ResidualReport:
    """``max |u_ss + u_tt + |du|^2 u|`` over interior nodes."""
    return _report("harmonic", grid, h, _harmonic, refine, richardson=richardson)


def hopf_differential(grid: SurfaceGrid, h: float | None = None, refine: bool = True,
                      richardson: bool = False) -> ResidualReport:
    """``max |(|u_s|^2 - |u_t|^2 - 2i (u_s, u_t)) / 4|``; vanishes iff conformal."""
    return _report("hopf", grid, h, _hopf, refine, richardson=richardson)


def legendrian_residual(grid: SurfaceGrid, h: float | None = None, refine: bool = True,
                        richardson: bool = False) -> ResidualReport:
    """``max(|omega(u, u_s)|, |omega(u, u_t)|)`` with ``omega = Im <., .>``."""
    return _report("legendrian", grid, h, _legendrian, refine, richardson=richardson)


def calibration_defect(grid: SurfaceGrid, theta: float, h: float | None = None,
                       refine: bool = True, richardson: bool = False) -> ResidualReport:
    """Cone at radius one against ``Re(e^{i theta} dz1 dz2 dz3)``.

    Reports ``max |Im(e^{i theta} det(u, u_s, u_t))|`` and
    ``max ||Re(...)| / vol - 1|`` (``vol`` from the Gram determinant of
    ``u_s, u_t``); ``orientation`` is the sign of ``Re(...)`` for the
    ordering ``(r, s, t)``.
    """
    return _report("calibration", grid, h, _calibration(theta), refine, richardson=richardson)


def neumann_vs_closed_form(params: ConeParameters, t_span=None, tol: float = 1e-10) -> ResidualReport:
    """Sup distance between the closed-form curve and the integrated flow.

    ``t_span`` defaults to one basic period from ``t = 0``.  Both routes start
    from the closed-form state at ``t_span[0]``.
    """
    imm = immersion(params)
    if t_span is None:
        if not math.isfinite(imm.T):
            raise ValueError("basic period is infinite; give t_span")
        t_span = (0.0, imm.T)
    t0, t1 = map(float, t_span)
    tr = integrate(imm.state(t0), params.axis, t1, tol=tol)
    z_closed, _ = imm.curve(tr.t)
    diff = float(np.abs(z_closed - tr.z).max())
    y_flow = np.sum(params.axis.lam**2 * np.abs(tr.z) ** 2, axis=-1)
    y_closed, _ = imm.conformal_factor(tr.t)
    extra = {
        "t_span": [t0, t1],
        "steps": len(tr),
        "y_spread_flow": float(np.ptp(y_flow)),
        "y_spread_closed": float(np.ptp(y_closed)),
        "max_drift_norm": tr.stats["max_drift_norm"],
    }
    return ResidualReport("neumann_vs_closed_form", diff, (len(tr),), float(np.max(np.diff(tr.t))), extra=extra)


def gauss_curvature_fd(grid: SurfaceGrid, richardson: bool = True):
    """``K = -(ln y)'' / (2 y)`` along ``t`` with ``y`` from the sampled metric.

    ``y`` is the s-average of ``(|u_s|^2 + |u_t|^2) / 2`` (fourth-order
    stencils by default); returns ``(t, K)`` on the nodes where the second
    difference of ``ln y`` is defined.
    """
    d = derivatives(grid, richardson)
    pad = 2 if richardson else 1
    y = 0.5 * np.mean(np.sum(np.abs(d.us) ** 2 + np.abs(d.ut) ** 2, axis=-1), axis=0)
    ln = np.log(y)
    h = grid.ht
    second = (ln[2:] - 2 * ln[1:-1] + ln[:-2]) / h**2
    return grid.t[pad + 1 : -pad - 1], -second / (2.0 * y[1:-1])


def curvature_residual(params: ConeParameters, t_range=None, n: int = 2001,
                       refine: bool = True) -> ResidualReport:
    """Centered-difference ``-(ln y)''/(2y)`` of the closed-form ``y`` on a
    uniform t-grid, against ``1 + 2C/y^3``."""
    imm = immersion(params)
    if t_range is None:
        T = imm.T if math.isfinite(imm.T) else 4.0
        t_range = (-0.5 * T, 0.5 * T)

    def err(m):
        t = np.linspace(*t_range, m)
        h = t[1] - t[0]
        y, _ = imm.conformal_factor(t)
        ln = np.log(y)
        K = -(ln[2:] - 2 * ln[1:-1] + ln[:-2]) / h**2 / (2.0 * y[1:-1])
        return float(np.max(np.abs(K - imm.gauss_curvature(t[1:-1])))), h

    value, h = err(n)
    order = refined = None
    if refine:
        refined, _ = err(2 * n - 1)
        if value > 0 and refined > 0:
            order = math.log2(value / refined)
    return ResidualReport("curvature", value, (n,), float(h), order, refined)


def run_all(grid: SurfaceGrid, theta: float, refine: bool = True) -> list[ResidualReport]:
    """All four surface checks (plus curvature for family grids)."""
    reports = [
        harmonic_residual(grid, refine=refine),
        hopf_differential(grid, refine=refine),
        legendrian_residual(grid, refine=refine),
        calibration_defect(grid, theta, refine=refine),
    ]
    if grid.params is not None:
        reports.append(curvature_residual(grid.params, refine=refine))
    return reports
