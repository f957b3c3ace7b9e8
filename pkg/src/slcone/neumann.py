"""The constrained C. Neumann system on the unit sphere of C^3.

States are complex 3-vectors ``z`` with velocity ``zdot``; the potential
comes from ``A = i diag(lam)``.  Everything here works for an arbitrary
real ``lam``; the Legendrian family uses ``lam = (1, alpha, -1 - alpha)``.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .rk import VERNER65, StiffnessError, integrate_adaptive

__all__ = [
    "SymmetryAxis",
    "NeumannState",
    "ConservedSet",
    "Trajectory",
    "StiffnessError",
    "neumann_rhs",
    "integrate",
    "conserved",
    "constraint_residuals",
    "c_ddot",
    "project",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_STEPS = 10_000_000


@dataclass(frozen=True)
class SymmetryAxis:
    """Eigenvalues ``lam`` of ``-iA`` and ``mu = (1,1,1) x lam``.

    ``exact`` keeps alpha as a :class:`~fractions.Fraction` when it was
    given as one, so period logic can use exact rationality.
    """

    lam_values: tuple[float, float, float]
    exact: Fraction | None = None

    @classmethod
    def from_alpha(cls, alpha) -> SymmetryAxis:
        exact = alpha if isinstance(alpha, Fraction) else None
        a = float(alpha)
        if not (0.0 <= a <= 1.0):
            raise ValueError(f"alpha={a!r} outside [0, 1]")
        return cls((1.0, a, -1.0 - a), exact)

    @classmethod
    def general(cls, lam) -> SymmetryAxis:
        """Axis with arbitrary eigenvalues (``A`` need not lie in su(3))."""
        return cls(tuple(float(v) for v in lam))

    @property
    def alpha(self) -> float:
        return self.lam_values[1] / self.lam_values[0]

    @property
    def lam(self) -> np.ndarray:
        return np.array(self.lam_values)

    @property
    def mu(self) -> np.ndarray:
        return np.cross(np.ones(3), self.lam)

    @property
    def is_traceless(self) -> bool:
        return abs(sum(self.lam_values)) <= 1e-15 * max(map(abs, self.lam_values))


@dataclass(frozen=True)
class NeumannState:
    t: float
    z: np.ndarray
    zdot: np.ndarray

    def as_real(self) -> np.ndarray:
        """``(x1, y1, x2, y2, x3, y3, xdot1, ..., ydot3)``."""
        return np.concatenate([_interleave(self.z), _interleave(self.zdot)])

    @classmethod
    def from_real(cls, t: float, v) -> NeumannState:
        v = np.asarray(v, dtype=float)
        return cls(t, v[0:6:2] + 1j * v[1:6:2], v[6:12:2] + 1j * v[7:12:2])


def _interleave(w: np.ndarray) -> np.ndarray:
    out = np.empty(w.shape[:-1] + (2 * w.shape[-1],))
    out[..., 0::2] = w.real
    out[..., 1::2] = w.imag
    return out


@dataclass(frozen=True)
class ConservedSet:
    H: float
    Jvec: np.ndarray
    c: float


def neumann_rhs(z: np.ndarray, zdot: np.ndarray, axis: SymmetryAxis) -> np.ndarray:
    """Acceleration ``-A^2 z - (|zdot|^2 + |Az|^2) z`` (broadcasts over leading axes)."""
    lam2 = axis.lam**2
    multiplier = np.sum(np.abs(zdot) ** 2, axis=-1) + np.sum(lam2 * np.abs(z) ** 2, axis=-1)
    return lam2 * z - multiplier[..., None] * z


def project(z: np.ndarray, zdot: np.ndarray):
    """Nearest point of ``{|z| = 1, Re<z, zdot> = 0}``."""
    z = z / np.linalg.norm(z)
    zdot = zdot - np.real(np.vdot(z, zdot)) * z
    return z, zdot


def conserved(state: NeumannState, axis: SymmetryAxis) -> ConservedSet:
    H, Jvec, c = _conserved_arrays(state.z, state.zdot, axis)
    return ConservedSet(float(H), Jvec, float(c))


def _conserved_arrays(z, zdot, axis: SymmetryAxis):
    H = np.sum(np.abs(zdot) ** 2, axis=-1) - np.sum(axis.lam**2 * np.abs(z) ** 2, axis=-1)
    Jvec = np.imag(np.conj(z) * zdot)
    c = np.sum(axis.lam * np.abs(z) ** 2, axis=-1)
    return H, Jvec, c


def constraint_residuals(state: NeumannState, axis: SymmetryAxis) -> np.ndarray:
    """``(H, lam.J, lam.R^2, sum J, |z|^2 - 1)``; all vanish on admissible data."""
    H, Jvec, c = _conserved_arrays(state.z, state.zdot, axis)
    return np.array(
        [H, axis.lam @ Jvec, c, Jvec.sum(), np.sum(np.abs(state.z) ** 2) - 1.0]
    )


def c_ddot(state: NeumannState, axis: SymmetryAxis) -> float:
    """Second derivative of ``c = omega(z, Az)`` predicted from the constraints.

    Valid at an instant where the other constraints and ``dc/dt`` vanish:
    ``2 ((sum lam) |Az|^2 - H lam1 lam2 lam3 / |Az|^2)``.  The factor 2 comes
    from ``dc/dt = 2 omega(zdot, Az)``.
    """
    H, _, _ = _conserved_arrays(state.z, state.zdot, axis)
    az2 = float(np.sum(axis.lam**2 * np.abs(state.z) ** 2))
    return 2.0 * (axis.lam.sum() * az2 - H * np.prod(axis.lam) / az2)


@dataclass(frozen=True)
class Trajectory:
    """Integrated flow; ``drift_norm``/``drift_tangent`` are pre-projection defects."""

    axis: SymmetryAxis
    t: np.ndarray
    z: np.ndarray
    zdot: np.ndarray
    drift_norm: np.ndarray
    drift_tangent: np.ndarray
    stats: dict

    def __len__(self) -> int:
        return len(self.t)

    def state(self, i: int) -> NeumannState:
        return NeumannState(float(self.t[i]), self.z[i], self.zdot[i])

    @property
    def final(self) -> NeumannState:
        return self.state(-1)

    def conserved(self):
        """Arrays ``(H, Jvec, c)`` along the trajectory."""
        return _conserved_arrays(self.z, self.zdot, self.axis)

    def to_csv(self, path) -> Path:
        path = Path(path)
        H, Jvec, c = self.conserved()
        header = ["t", "x1", "y1", "x2", "y2", "x3", "y3"]
        header += ["xdot1", "ydot1", "xdot2", "ydot2", "xdot3", "ydot3"]
        header += ["H", "J1", "J2", "J3", "c"]
        rows = np.column_stack(
            [self.t, _interleave(self.z), _interleave(self.zdot), H, Jvec, c]
        )
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([repr(float(v)) for v in row])
        return path


def integrate(
    state0: NeumannState,
    axis: SymmetryAxis,
    t_end: float,
    tol: float = DEFAULT_TOL,
    max_steps: int = DEFAULT_MAX_STEPS,
    project_steps: bool = True,
) -> Trajectory:
    """Integrate the Neumann flow from ``state0`` to ``t_end`` (either direction).

    Uses the Verner 6(5) embedded pair.  After every accepted step the state
    is re-projected onto the sphere/tangency constraint set; the defect
    removed by the projection is recorded per step.
    """
    lam2 = axis.lam**2
    drift_norm, drift_tan = [0.0], [0.0]

    def rhs(_t, y):
        z, zd = y[:3], y[3:]
        mult = np.sum(zd.real**2 + zd.imag**2) + np.sum(lam2 * (z.real**2 + z.imag**2))
        return np.concatenate([zd, lam2 * z - mult * z])

    def post(_t, y):
        z, zd = y[:3], y[3:]
        drift_norm.append(abs(np.sum(np.abs(z) ** 2) - 1.0))
        drift_tan.append(abs(np.real(np.vdot(z, zd))))
        if not project_steps:
            return y
        z, zd = project(z, zd)
        return np.concatenate([z, zd])

    y0 = np.concatenate([np.asarray(state0.z, complex), np.asarray(state0.zdot, complex)])
    ts, ys, stats = integrate_adaptive(
        rhs, state0.t, y0, t_end, tol, VERNER65, max_steps=max_steps, post_step=post
    )
    dn, dt = np.array(drift_norm), np.array(drift_tan)
    stats = dict(stats, max_drift_norm=float(dn.max()), max_drift_tangent=float(dt.max()))
    log.debug("neumann integrate: %s", stats)
    for arr in (ts, ys, dn, dt):
        arr.flags.writeable = False
    return Trajectory(axis, ts, ys[:, :3], ys[:, 3:], dn, dt, stats)
