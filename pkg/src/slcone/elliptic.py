"""Jacobi elliptic functions and the complete elliptic integral of the first kind.

Everything here is built on the arithmetic-geometric mean.  The modulus is
carried together with ``k**2`` and ``1 - k**2`` because the family code
computes those quantities directly and recovering them from ``k`` loses
digits near ``k = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EllipticModulus",
    "EllipticData",
    "EllipticDomainError",
    "EllipticDivergenceError",
    "agm",
    "complete_K",
    "jacobi_sn_cn_dn",
]

_EPS = np.finfo(float).eps
_MAX_AGM_STEPS = 64


class EllipticDomainError(ValueError):
    """Modulus outside the supported range."""


class EllipticDivergenceError(ArithmeticError):
    """The complete integral diverges (k = 1)."""


@dataclass(frozen=True)
class EllipticModulus:
    """Modulus ``k`` with ``k**2`` and the complementary ``1 - k**2`` stored."""

    k: float
    ksq: float
    kpsq: float

    def __post_init__(self):
        if not (0.0 <= self.ksq <= 1.0) or not (0.0 <= self.kpsq <= 1.0):
            raise EllipticDomainError(f"modulus squared {self.ksq!r} outside [0, 1]")

    @classmethod
    def from_k(cls, k: float) -> EllipticModulus:
        k = float(k)
        if not (0.0 <= k <= 1.0):
            raise EllipticDomainError(f"modulus {k!r} outside [0, 1]")
        return cls(k, k * k, (1.0 - k) * (1.0 + k))

    @classmethod
    def from_ksq(cls, ksq: float, kpsq: float | None = None) -> EllipticModulus:
        ksq = float(ksq)
        if not (0.0 <= ksq <= 1.0):
            raise EllipticDomainError(f"modulus squared {ksq!r} outside [0, 1]")
        if kpsq is None:
            kpsq = 1.0 - ksq
        return cls(math.sqrt(ksq), ksq, float(kpsq))

    @property
    def kp(self) -> float:
        return math.sqrt(self.kpsq)


@dataclass(frozen=True)
class EllipticData:
    """Closed-form data for the oscillation of gamma between two cubic roots.

    ``roots`` is ``(Gamma1, Gamma2, Gamma3)`` with ``Gamma2 <= 0 <= Gamma1 <= Gamma3``;
    ``Gamma3`` is ``inf`` when the cubic degenerates to a quadratic (alpha = 1).
    ``degenerate`` names a flat limit ("clifford_alpha", "clifford_J") or is None.
    ``turning_radii`` optionally holds ``gamma mu_j + 1/3`` at ``Gamma1`` and at
    ``Gamma2`` (two 3-tuples), computed without cancellation.
    """

    modulus: EllipticModulus
    r: float
    quarter_period: float
    roots: tuple[float, float, float]
    degenerate: str | None = None
    turning_radii: tuple | None = None

    @property
    def basic_period(self) -> float:
        """Period of gamma (and of y): ``2 Ke(k) / r``."""
        return 2.0 * self.quarter_period / self.r


def _as_modulus(k) -> EllipticModulus:
    if isinstance(k, EllipticModulus):
        return k
    return EllipticModulus.from_k(k)


def agm(a: float, b: float) -> float:
    for _ in range(_MAX_AGM_STEPS):
        if abs(a - b) <= 2 * _EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_K(k) -> float:
    """Complete elliptic integral of the first kind, ``Ke(k)``.

    Accepts an :class:`EllipticModulus` or a plain modulus ``k``.
    """
    m = _as_modulus(k)
    if m.kpsq == 0.0:
        raise EllipticDivergenceError("complete elliptic integral diverges at k = 1")
    return math.pi / (2.0 * agm(1.0, m.kp))


def _agm_ladder(m: EllipticModulus):
    a, b, c = [1.0], [m.kp], [m.k]
    while abs(c[-1]) > _EPS * a[-1] and len(a) < _MAX_AGM_STEPS:
        an, bn = a[-1], b[-1]
        a.append(0.5 * (an + bn))
        b.append(math.sqrt(an * bn))
        c.append(0.5 * (an - bn))
    return a, c


def jacobi_sn_cn_dn(t, k):
    """Return ``(sn, cn, dn)`` at ``t`` (scalar or array) for modulus ``k``.

    The amplitude comes from the descending Landen / AGM phase recursion
    after reducing ``t`` modulo the real period ``4 Ke(k)``.  ``k = 1`` is
    evaluated from the hyperbolic closed forms and ``k = 0`` from the
    circular ones.  ``k`` may also be an array broadcasting against ``t``.
    """
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("argument must be finite")
    if isinstance(k, np.ndarray) and k.ndim > 0:
        return _sn_cn_dn_many(t, k)
    m = _as_modulus(k)
    if m.kpsq == 0.0:
        sech = 1.0 / np.cosh(t)
        return _out(np.tanh(t)), _out(sech), _out(sech.copy())
    if m.ksq == 0.0:
        return _out(np.sin(t)), _out(np.cos(t)), _out(np.ones_like(t))

    quarter = complete_K(m)
    period = 4.0 * quarter
    u = t - period * np.round(t / period)

    a, c = _agm_ladder(m)
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(np.clip(c[j] / a[j] * np.sin(phi), -1.0, 1.0)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    # cos(phi0)/cos(phi1 - phi0) is 0/0 at sn = +-1; k'^2 + k^2 cn^2 has no cancellation
    dn = np.sqrt(m.kpsq + m.ksq * cn * cn)
    return _out(sn), _out(cn), _out(dn)


def _sn_cn_dn_many(t: np.ndarray, k: np.ndarray):
    t, k = np.broadcast_arrays(t, np.asarray(k, dtype=float))
    if np.any((k < 0.0) | (k > 1.0)) or not np.all(np.isfinite(k)):
        raise EllipticDomainError("modulus outside [0, 1]")
    ksq, kpsq = k * k, (1.0 - k) * (1.0 + k)
    one = kpsq == 0.0
    kk = np.where(one, 0.0, k)  # k = 1 lanes are overwritten below
    a, b, c = np.ones_like(kk), np.sqrt((1.0 - kk) * (1.0 + kk)), kk.copy()
    ladder = [(a, c)]
    while np.any(np.abs(c) > _EPS * a) and len(ladder) < _MAX_AGM_STEPS:
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        ladder.append((a, c))
    # a converged lane carries on with c = 0, which only halves phi back
    n = len(ladder) - 1
    period = 2.0 * math.pi / a
    u = t - period * np.round(t / period)
    phi = (2.0**n) * a * u
    for j in range(n, 0, -1):
        aj, cj = ladder[j]
        phi = 0.5 * (phi + np.arcsin(np.clip(cj / aj * np.sin(phi), -1.0, 1.0)))
    sn, cn = np.sin(phi), np.cos(phi)
    dn = np.sqrt(kpsq + ksq * cn * cn)
    if one.any():
        sech = 1.0 / np.cosh(t[one])
        sn[one], cn[one], dn[one] = np.tanh(t[one]), sech, sech
    return sn, cn, dn


def _out(x: np.ndarray):
    return float(x) if x.ndim == 0 else x
