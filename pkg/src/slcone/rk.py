"""Adaptive explicit Runge-Kutta integration with embedded error control."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["Tableau", "VERNER65", "DORMAND_PRINCE54", "StiffnessError", "integrate_adaptive"]


class StiffnessError(RuntimeError):
    """Step size collapsed below the representable resolution of ``t``."""


@dataclass(frozen=True)
class Tableau:
    name: str
    c: np.ndarray
    a: np.ndarray
    b: np.ndarray
    b_embedded: np.ndarray
    order: int
    embedded_order: int

    @property
    def stages(self) -> int:
        return len(self.c)


def _lower(rows) -> np.ndarray:
    n = len(rows) + 1
    a = np.zeros((n, n))
    for i, row in enumerate(rows, start=1):
        a[i, : len(row)] = row
    return a


# Verner's "most robust" 6(5) pair; the last stage is evaluated at the
# propagated solution, so only the embedded weights use it.
VERNER65 = Tableau(
    name="verner65",
    c=np.array([0.0, 9 / 50, 1 / 6, 1 / 4, 53 / 100, 3 / 5, 4 / 5, 1.0, 1.0]),
    a=_lower(
        [
            [9 / 50],
            [29 / 324, 25 / 324],
            [1 / 16, 0, 3 / 16],
            [79129 / 250000, 0, -261237 / 250000, 19663 / 15625],
            [1336883 / 4909125, 0, -25476 / 30875, 194159 / 185250, 8225 / 78546],
            [
                -2459386 / 14727375, 0, 19504 / 30875, 2377474 / 13615875,
                -6157250 / 5773131, 902 / 735,
            ],
            [
                2699 / 7410, 0, -252 / 1235, -1393253 / 3993990, 236875 / 72618,
                -135 / 49, 15 / 22,
            ],
            [11 / 144, 0, 0, 256 / 693, 0, 125 / 504, 125 / 528, 5 / 72],
        ]
    ),
    b=np.array([11 / 144, 0, 0, 256 / 693, 0, 125 / 504, 125 / 528, 5 / 72, 0]),
    b_embedded=np.array(
        [
            28 / 477, 0, 0, 212 / 441, -312500 / 366177, 2125 / 1764, 0,
            -2105 / 35532, 2995 / 17766,
        ]
    ),
    order=6,
    embedded_order=5,
)

DORMAND_PRINCE54 = Tableau(
    name="dopri54",
    c=np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0]),
    a=_lower(
        [
            [1 / 5],
            [3 / 40, 9 / 40],
            [44 / 45, -56 / 15, 32 / 9],
            [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
            [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
            [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
        ]
    ),
    b=np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0]),
    b_embedded=np.array(
        [5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
    ),
    order=5,
    embedded_order=4,
)


@dataclass
class StepLog:
    t: list
    y: list
    n_rejected: int = 0
    n_evals: int = 0


def _rk_step(f, t, y, h, tab: Tableau):
    k = np.empty((tab.stages,) + y.shape, dtype=y.dtype)
    k[0] = f(t, y)
    for i in range(1, tab.stages):
        yi = y + h * np.tensordot(tab.a[i, :i], k[:i], axes=1)
        k[i] = f(t + tab.c[i] * h, yi)
    y_new = y + h * np.tensordot(tab.b, k, axes=1)
    err = h * np.tensordot(tab.b - tab.b_embedded, k, axes=1)
    return y_new, err


def integrate_adaptive(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: np.ndarray,
    t_end: float,
    tol: float,
    tableau: Tableau = VERNER65,
    max_steps: int = 10_000_000,
    h0: float | None = None,
    post_step: Callable[[float, np.ndarray], np.ndarray] | None = None,
):
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end`` (either direction).

    Each accepted step has estimated local error at most ``tol`` in the
    mixed norm ``max |err_i| / (1 + max(|y_i|, |y_new_i|))``; the higher
    order solution is propagated.  ``post_step`` may replace the accepted
    state (used for constraint projection).  Returns ``(ts, ys, stats)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    y = np.array(y0, copy=True)
    t = float(t0)
    direction = 1.0 if t_end >= t0 else -1.0
    span = abs(t_end - t0)
    ts, ys = [t], [y.copy()]
    stats = {"accepted": 0, "rejected": 0}
    if span == 0.0:
        return np.array(ts), np.array(ys), stats

    exponent = 1.0 / (tableau.embedded_order + 1)
    h = abs(h0) if h0 else min(span, 0.01)
    while direction * (t_end - t) > 0:
        if stats["accepted"] + stats["rejected"] >= max_steps:
            raise RuntimeError(f"exceeded {max_steps} steps at t={t:.17g}")
        h = min(h, abs(t_end - t))
        if h <= 16 * np.finfo(float).eps * max(1.0, abs(t)):
            raise StiffnessError(
                f"step size underflow at t={t:.17g} (h={h:.3g}, tol={tol:.3g}, "
                f"accepted={stats['accepted']}, rejected={stats['rejected']})"
            )
        y_new, err = _rk_step(f, t, y, direction * h, tableau)
        scale = tol * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
        enorm = float(np.max(np.abs(err) / scale))
        if enorm <= 1.0:
            t = t_end if h == abs(t_end - t) else t + direction * h
            y = post_step(t, y_new) if post_step is not None else y_new
            ts.append(t)
            ys.append(y.copy())
            stats["accepted"] += 1
            factor = 5.0 if enorm == 0.0 else min(5.0, 0.9 * enorm**-exponent)
        else:
            stats["rejected"] += 1
            factor = max(0.2, 0.9 * enorm**-exponent)
        h *= factor
    return np.array(ts), np.array(ys), stats
