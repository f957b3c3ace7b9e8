"""OBJ / CSV / JSON writers for sampled surfaces."""

from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .family import SurfaceGrid

__all__ = ["DEFAULT_PROJECTION", "projection_matrix", "write_obj", "write_grid_csv", "write_json", "to_jsonable"]

# rows pick (Re z1, Re z2, Re z3) out of (Re z1, Im z1, Re z2, Im z2, Re z3, Im z3)
DEFAULT_PROJECTION = "x1,x2,x3"
_AXES = {"x1": 0, "y1": 1, "x2": 2, "y2": 3, "x3": 4, "y3": 5}


def projection_matrix(spec: str | np.ndarray = DEFAULT_PROJECTION) -> np.ndarray:
    """3x6 orthographic projection from a spec like ``"x1,y2,x3"`` or a matrix."""
    if isinstance(spec, str):
        names = [p.strip() for p in spec.split(",")]
        if len(names) != 3 or any(n not in _AXES for n in names):
            raise ValueError(f"projection must name three of {sorted(_AXES)}; got {spec!r}")
        P = np.zeros((3, 6))
        for row, name in enumerate(names):
            P[row, _AXES[name]] = 1.0
        return P
    P = np.asarray(spec, float)
    if P.shape != (3, 6):
        raise ValueError("projection matrix must be 3x6")
    return P


def _real6(u: np.ndarray) -> np.ndarray:
    out = np.empty(u.shape[:-1] + (2 * u.shape[-1],))
    out[..., 0::2] = u.real
    out[..., 1::2] = u.imag
    return out


def write_obj(path, u: np.ndarray, projection=DEFAULT_PROJECTION, wrap_s: bool = False,
              wrap_t: bool = False, t_wrap_shift: int = 0, comment: str = "") -> Path:
    """Triangulated quad mesh of ``u[i, j]`` (shape ``(ns, nt, 3)``, complex).

    ``wrap_s``/``wrap_t`` close the mesh across the grid edges; crossing the
    t edge may shift the s index by ``t_wrap_shift`` (oblique lattices).
    """
    path = Path(path)
    ns, nt = u.shape[:2]
    verts = _real6(u).reshape(-1, 6) @ projection_matrix(projection).T

    def vid(i, j):
        return i * nt + j + 1

    faces = []
    for i in range(ns - 1 + int(wrap_s)):
        for j in range(nt - 1 + int(wrap_t)):
            i1 = (i + 1) % ns
            if j + 1 < nt:
                a, b, c, d = vid(i, j), vid(i1, j), vid(i1, j + 1), vid(i, j + 1)
            else:
                a, b = vid(i, j), vid(i1, j)
                c, d = vid((i1 + t_wrap_shift) % ns, 0), vid((i + t_wrap_shift) % ns, 0)
            faces.append((a, b, c))
            faces.append((a, c, d))
    with path.open("w") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        for v in verts:
            fh.write("v {!r} {!r} {!r}\n".format(*map(float, v)))
        for f in faces:
            fh.write("f {} {} {}\n".format(*f))
    return path


def write_grid_csv(path, grid: SurfaceGrid) -> Path:
    """One row per sample: ``s, t, x1, y1, x2, y2, x3, y3, y, K``."""
    path = Path(path)
    ns, nt = grid.shape
    S, T = np.meshgrid(grid.s, grid.t, indexing="ij")
    y = grid.y if grid.y is not None else np.full((ns, nt), np.nan)
    K = grid.K if grid.K is not None else np.full((ns, nt), np.nan)
    rows = np.column_stack([S.ravel(), T.ravel(), _real6(grid.u).reshape(-1, 6), y.ravel(), K.ravel()])
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "t", "x1", "y1", "x2", "y2", "x3", "y3", "y", "K"])
        for row in rows:
            w.writerow([repr(float(v)) for v in row])
    return path


def to_jsonable(obj):
    """Convert numpy scalars/arrays, fractions and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return obj


def write_json(path, data) -> Path:
    path = Path(path)
    path.write_text(json.dumps(to_jsonable(data), indent=2, sort_keys=True) + "\n")
    return path
