"""``slcone`` command line.

Every subcommand writes its artifacts plus ``<subcommand>.manifest.json`` into
``--out``.  ``slcone rerun MANIFEST`` replays a manifest and checks that every
output file is reproduced byte for byte.

Exit codes: 0 success, 1 a numerical check failed, 2 bad flags or inputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import integrate as sp_integrate

from . import __version__
from .acfamily import (
    DEFAULT_RMAX,
    FAR_FIELD,
    LinkRejected,
    ac_residuals,
    asymptotic_ends,
    build_ac_surface,
    cone_union_distance,
    link_grid,
    profile_curve,
)
from .elliptic import EllipticModulus, complete_K, jacobi_sn_cn_dn
from .export import DEFAULT_PROJECTION, to_jsonable, write_grid_csv, write_json, write_obj
from .family import ConeParameters, immersion, sample_grid
from .neumann import DEFAULT_TOL as NEUMANN_TOL
from .neumann import integrate
from .periods import (
    DEFAULT_TOL as PERIOD_TOL,
    MAX_DENOMINATOR,
    TWO_PI,
    closure_test,
    embeddedness_scan,
    minimality_check,
    search_closure,
    verify_period,
)
from .verify import run_all

log = logging.getLogger("slcone")

SCHEMA = "slcone/1"
EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
PERIOD_CHECK_TOL = 1e-8
DRIFT_TOL = 1e-8
FLAT_TOL = 1e-8
SPHERE_WINDOW = 3.0


class UsageError(ValueError):
    """Bad flag values; maps to exit code 2."""


# -- flag parsing ----------------------------------------------------------------------

_RATIONAL = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


def parse_alpha(text: str):
    """``"m/n"`` or an integer gives an exact Fraction; any other number a float."""
    if _RATIONAL.match(text):
        try:
            return Fraction(text.replace(" ", ""))
        except ZeroDivisionError:
            raise argparse.ArgumentTypeError(f"zero denominator in {text!r}") from None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_grid(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)[xX](\d+)", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"grid must look like NSxNT, got {text!r}")
    ns, nt = int(m.group(1)), int(m.group(2))
    if ns < 5 or nt < 5:
        raise argparse.ArgumentTypeError("grid needs at least 5 nodes per direction")
    return ns, nt


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _alpha_of(args):
    if args.alpha_real is not None:
        return float(args.alpha_real)
    return args.alpha


def _params(args) -> ConeParameters:
    try:
        return ConeParameters.make(_alpha_of(args), args.J, args.theta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _alpha_label(alpha) -> str:
    return str(alpha) if isinstance(alpha, Fraction) else repr(float(alpha))


# -- shared pieces ----------------------------------------------------------------------


def _surface_domain(params: ConeParameters, lattice, ns: int, nt: int):
    """Fundamental domain when the lattice has the shape ``(w, 0), (sigma, tau)``,
    otherwise a default window.  Returns ``(grid, closing, t_wrap_shift)``."""
    imm = immersion(params)
    if lattice.rank == 2 and abs(lattice.basis[0][1]) < 1e-12 and lattice.basis[1][1] > 0:
        (w1, _), (sig, tau) = lattice.basis
        grid = sample_grid(params, (0.0, w1), (0.0, tau), ns, nt, endpoint=False)
        # u(s, t + tau) = u(s - sigma, t)
        k = (-sig / grid.hs) % ns
        shift = int(round(k)) % ns if abs(k - round(k)) < 1e-6 else None
        return grid, True, shift
    if math.isfinite(imm.T):
        t_range = (-imm.T, imm.T)
    else:
        t_range = (-SPHERE_WINDOW, SPHERE_WINDOW)
    return sample_grid(params, (0.0, TWO_PI), t_range, ns, nt, endpoint=True), False, None


def _surface_summary(params, grid, lattice) -> dict:
    ext = immersion(params).curvature_extremes()
    return {
        "alpha": params.axis.exact if params.axis.exact is not None else params.alpha,
        "J": params.J,
        "theta": params.theta,
        "grid_dims": list(grid.shape),
        "s_range": list(grid.s_range),
        "t_range": list(grid.t_range),
        "K_min": ext.K_min,
        "K_max": ext.K_max,
        "K_unbounded_in_family": ext.unbounded,
        "K_observed_min": float(grid.K.min()),
        "K_observed_max": float(grid.K.max()),
        "lattice": lattice.to_dict(),
    }


def _notes(params, grid, lattice) -> list[str]:
    notes = []
    if params.is_flat or float(np.abs(grid.K).max()) <= FLAT_TOL:
        notes.append("flat Clifford torus: K identically 0")
    if lattice.status == "sphere":
        notes.append("totally geodesic 2-sphere")
    if lattice.note:
        notes.append(lattice.note)
    return notes


def _check_reports(grid, theta, refine):
    reports = run_all(grid, theta, refine=refine)
    failed = [r.name for r in reports if not r.converged]
    return reports, failed


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# -- subcommands ---------------------------------------------------------------------


def cmd_elliptic(args, out: Path):
    if (args.ksq is None) == (args.k is None):
        raise UsageError("give exactly one of --ksq or --k")
    mod = EllipticModulus.from_ksq(args.ksq) if args.ksq is not None else EllipticModulus.from_k(args.k)
    k = mod.k
    result = {"k": k, "ksq": k * k}
    failed = []
    if args.op == "K":
        K = complete_K(k)
        quad, _ = sp_integrate.quad(lambda p: 1.0 / math.sqrt(1.0 - (k * math.sin(p)) ** 2), 0.0,
                                    0.5 * math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
        result.update(K=K, quadrature_K=quad, abs_diff=abs(K - quad))
        if abs(K - quad) > args.check_tol:
            failed.append("K_vs_quadrature")
    else:
        t = np.asarray(args.t, float)
        sn, cn, dn = jacobi_sn_cn_dn(t, k)
        result.update(t=t, sn=sn, cn=cn, dn=dn,
                      pythagorean_defect=float(max(np.abs(sn**2 + cn**2 - 1).max(),
                                                   np.abs(dn**2 + k * k * sn**2 - 1).max())))
        if result["pythagorean_defect"] > args.check_tol:
            failed.append("pythagorean")
    path = write_json(out / "elliptic.json", result)
    return result, [path], {"check_tol": args.check_tol}, failed


def _torus_like(args, out: Path, write_mesh: bool):
    params = _params(args)
    ns, nt = args.grid
    lattice = closure_test(params, tol=args.tol, max_den=args.max_den)
    grid, closing, shift = _surface_domain(params, lattice, ns, nt)
    reports, failed = _check_reports(grid, params.theta, not args.no_refine)
    summary = _surface_summary(params, grid, lattice)
    summary["closing_domain"] = closing
    summary["notes"] = _notes(params, grid, lattice)
    summary["checks"] = {r.name: r.to_dict() for r in reports}
    if closing and not args.no_scan:
        scan = embeddedness_scan(lattice, grid, eps="covering")
        summary["embeddedness"] = dict(scan.to_dict(), embedded=scan.empty)
        if not scan.empty:
            summary["notes"].append(f"{len(scan.pairs)} proximity pairs far apart on the torus")
    outputs = []
    if write_mesh:
        if args.format == "obj":
            comment = f"slcone {SCHEMA} alpha={_alpha_label(_alpha_of(args))} J={params.J!r} theta={params.theta!r}"
            outputs.append(write_obj(
                out / "torus.obj", grid.u, args.projection, wrap_s=closing,
                wrap_t=closing and shift is not None, t_wrap_shift=shift or 0, comment=comment,
            ))
        elif args.format == "csv":
            outputs.append(write_grid_csv(out / "torus.csv", grid))
        else:
            outputs.append(write_json(out / "torus_grid.json", {
                "s": grid.s, "t": grid.t, "re_u": grid.u.real, "im_u": grid.u.imag, "y": grid.y, "K": grid.K,
            }))
    outputs.append(write_json(out / f"{args.command}_report.json", summary))
    tolerances = {"closure_tol": args.tol, "max_den": args.max_den, "order_target": 1.9}
    return summary, outputs, tolerances, failed


def cmd_torus(args, out: Path):
    return _torus_like(args, out, write_mesh=True)


def cmd_verify(args, out: Path):
    return _torus_like(args, out, write_mesh=False)


def cmd_periods(args, out: Path):
    params = _params(args)
    lattice = closure_test(params, tol=args.tol, max_den=args.max_den)
    summary = {
        "alpha": _alpha_label(_alpha_of(args)),
        "J": params.J,
        "lattice": lattice.to_dict(),
        "message": "closed torus" if lattice.status == "torus" else lattice.note,
    }
    failed = []
    if lattice.status == "torus":
        errs = [verify_period(params, v) for v in lattice.basis]
        summary["period_errors"] = errs
        if max(errs) > PERIOD_CHECK_TOL:
            failed.append("period_verification")
        if lattice.basis[0][1] == 0.0 and lattice.basis[1][1] > 0:
            mini = minimality_check(params, lattice, PERIOD_CHECK_TOL)
            summary["minimality"] = {"candidates": mini.candidates, "spurious": mini.spurious, "ok": mini.ok}
            if not mini.ok:
                failed.append("minimality")
    path = write_json(out / "periods.json", summary)
    return summary, [path], {"closure_tol": args.tol, "max_den": args.max_den,
                             "period_check_tol": PERIOD_CHECK_TOL}, failed


def cmd_search(args, out: Path):
    if args.alpha != 0:
        raise UsageError("search is defined for --alpha 0 only")
    try:
        res = search_closure(args.target, tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    params = ConeParameters.make(Fraction(0), res.J)
    errs = [verify_period(params, v) for v in res.lattice.basis]
    confirmed = res.lattice.status == "torus" and max(errs) <= PERIOD_CHECK_TOL
    summary = {
        "target": res.target,
        "J": res.J,
        "theta2_T": res.theta2_T,
        "residual": res.residual,
        "lattice": res.lattice.to_dict(),
        "period_errors": errs,
        "closure_confirmed": confirmed,
    }
    path = write_json(out / "search.json", summary)
    return summary, [path], {"tol": args.tol, "period_check_tol": PERIOD_CHECK_TOL}, \
        [] if confirmed else ["closure"]


def cmd_neumann(args, out: Path):
    params = _params(args)
    imm = immersion(params)
    traj = integrate(imm.state(args.t0), params.axis, args.t_end, tol=args.tol)
    H, Jvec, _ = traj.conserved()
    drift_H = float(np.abs(H - H[0]).max())
    drift_J = float(np.abs(Jvec - Jvec[0]).max())
    summary = {
        "alpha": _alpha_label(_alpha_of(args)),
        "J": params.J,
        "t_span": [args.t0, args.t_end],
        "steps": len(traj),
        "drift_H": drift_H,
        "drift_J": drift_J,
        "max_projection_defect": traj.stats["max_drift_norm"],
    }
    path = traj.to_csv(out / "neumann.csv")
    failed = [] if max(drift_H, drift_J) <= args.drift_tol else ["conservation"]
    return summary, [path, write_json(out / "neumann_report.json", summary)], \
        {"tol": args.tol, "drift_tol": args.drift_tol}, failed


def cmd_ac(args, out: Path):
    ns, nt = args.grid
    try:
        link, theta = link_grid(args.link, ns, nt)
        profile = profile_curve(3, args.d, args.profile_samples, args.r_max)
        acg = build_ac_surface(profile, link, theta)
    except LinkRejected as exc:
        raise UsageError(str(exc)) from None
    res = ac_residuals(acg, refine=not args.no_refine)
    im = profile.im_power_residual()
    scale = np.abs(profile.samples) ** 3
    summary = {
        "d": args.d,
        "link": args.link,
        "theta": theta,
        "profile_samples": args.profile_samples,
        "grid_dims": [ns, nt],
        "im_power_residual_abs": float(im.max()),
        "im_power_residual_rel": float((im / np.maximum(scale, 1.0)).max()),
        "checks": {k: r.to_dict() for k, r in res.items()},
    }
    failed = [k for k, r in res.items() if not r.converged]
    if args.d != 0:
        ends = asymptotic_ends(acg, far_field=args.far_field)
        summary["ends"] = [e.to_dict() for e in ends]
        if not all(e.decreasing for e in ends):
            failed.append("end_decay")
    else:
        summary["cone_union_distance"] = cone_union_distance(acg, r_max=args.far_field)
    outputs = []
    for b, br in enumerate(acg.branches):
        if args.format == "obj":
            # one closed link slice per profile sample, stride --slice-stride
            for i in range(0, len(br.f), args.slice_stride):
                outputs.append(write_obj(out / f"ac_b{b}_{i:04d}.obj", br.points[i], args.projection,
                                         comment=f"f = {br.f[i]!r}"))
        elif args.format == "csv":
            path = out / f"ac_b{b}.csv"
            m, _, _, _ = br.points.shape
            XI, S, T = np.meshgrid(br.xi, link.s, link.t, indexing="ij")
            P = br.points.reshape(-1, 3)
            rows = np.column_stack([XI.ravel(), S.ravel(), T.ravel(),
                                    np.stack([P.real, P.imag], -1).reshape(-1, 6)])
            np.savetxt(path, rows, delimiter=",", fmt="%.17g",
                       header="xi,s,t,x1,y1,x2,y2,x3,y3", comments="")
            outputs.append(path)
        else:
            outputs.append(write_json(out / f"ac_b{b}.json", {
                "xi": br.xi, "f_re": br.f.real, "f_im": br.f.imag,
                "re": br.points.real, "im": br.points.imag,
            }))
    outputs.append(write_json(out / "ac_report.json", summary))
    return summary, outputs, {"far_field": args.far_field, "r_max": args.r_max, "order_target": 1.9}, failed


# -- parser ------------------------------------------------------------------------------


def _add_family_flags(p, alpha_required=True):
    g = p.add_mutually_exclusive_group(required=alpha_required)
    g.add_argument("--alpha", type=parse_alpha, help="exact rational m/n (or an integer); other numbers are real")
    g.add_argument("--alpha-real", type=float, help="alpha as a real number; closure is tolerance-detected")
    p.add_argument("--J", type=float, default=0.0, help="angular momentum in [0, 1/(3 sqrt 3)]")
    p.add_argument("--theta", type=float, default=0.0, help="calibration phase of the cone")


def _add_closure_flags(p):
    p.add_argument("--tol", type=float, default=PERIOD_TOL, help="rational detection tolerance")
    p.add_argument("--max-den", type=int, default=MAX_DENOMINATOR)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slcone", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"slcone {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("slcone-out"), help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("elliptic", parents=[common], help="complete K or sn/cn/dn")
    p.add_argument("op", choices=["K", "sncndn"])
    p.add_argument("--ksq", type=float)
    p.add_argument("--k", type=float)
    p.add_argument("--t", type=float, nargs="+", default=[0.0])
    p.add_argument("--check-tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_elliptic)

    for name, func, help_ in (("torus", cmd_torus, "sample, verify and export a surface"),
                              ("verify", cmd_verify, "run the residual checks only")):
        p = sub.add_parser(name, parents=[common], help=help_)
        _add_family_flags(p)
        _add_closure_flags(p)
        p.add_argument("--grid", type=parse_grid, default=(200, 200), help="NSxNT")
        p.add_argument("--no-refine", action="store_true", help="skip the step-halving pass")
        p.add_argument("--no-scan", action="store_true", help="skip the self-intersection scan")
        if name == "torus":
            p.add_argument("--format", choices=["obj", "csv", "json"], default="obj")
            p.add_argument("--projection", default=DEFAULT_PROJECTION,
                           help="three of x1,y1,x2,y2,x3,y3 for the OBJ coordinates")
        p.set_defaults(func=func)

    p = sub.add_parser("periods", parents=[common], help="period lattice of u_{alpha,J}")
    _add_family_flags(p)
    _add_closure_flags(p)
    p.set_defaults(func=cmd_periods)

    p = sub.add_parser("search", parents=[common], help="find J closing the alpha = 0 family")
    p.add_argument("--alpha", type=parse_alpha, default=Fraction(0))
    p.add_argument("--target", type=parse_fraction, required=True, help="theta_2(T) / 2pi as p/q")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("neumann", parents=[common], help="integrate the Neumann flow")
    _add_family_flags(p)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--tol", type=float, default=NEUMANN_TOL)
    p.add_argument("--drift-tol", type=float, default=DRIFT_TOL)
    p.set_defaults(func=cmd_neumann)

    p = sub.add_parser("ac", parents=[common], help="asymptotically conical family over a link")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--link", default="clifford", help="clifford, real, or alpha=A,J=J,theta=TH")
    p.add_argument("--grid", type=parse_grid, default=(33, 33), help="link grid NSxNT")
    p.add_argument("--profile-samples", type=int, default=161)
    p.add_argument("--r-max", type=float, default=DEFAULT_RMAX)
    p.add_argument("--far-field", type=float, default=FAR_FIELD)
    p.add_argument("--format", choices=["obj", "csv", "json"], default="json")
    p.add_argument("--projection", default=DEFAULT_PROJECTION)
    p.add_argument("--slice-stride", type=int, default=20)
    p.add_argument("--no-refine", action="store_true")
    p.set_defaults(func=cmd_ac)

    p = sub.add_parser("rerun", help="replay a manifest and compare outputs")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out", type=Path, help="output directory (default: a sibling 'rerun' directory)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=None)
    return parser


# -- driver ----------------------------------------------------------------------------


def _replayable_argv(argv: list[str]) -> list[str]:
    """``argv`` with ``--out`` removed."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--out":
            skip = True
            continue
        if a.startswith("--out="):
            continue
        out.append(a)
    return out


def _run(argv: list[str]) -> tuple[int, dict | None]:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "rerun":
        return _rerun(args), None
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        summary, outputs, tolerances, failed = args.func(args, out)
    except UsageError as exc:
        print(f"slcone {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    code = EXIT_CHECK if failed else EXIT_OK
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out", "verbose")}
    manifest = {
        "schema": SCHEMA,
        "subcommand": args.command,
        "argv": _replayable_argv(argv),
        "params": params,
        "version": __version__,
        "tolerances": tolerances,
        "outputs": [{"path": str(p), "sha256": _sha256(p)} for p in outputs],
        "summary": summary,
        "failed_checks": failed,
        "exit_code": code,
    }
    write_json(out / f"{args.command}.manifest.json", manifest)
    print(json.dumps(to_jsonable({"subcommand": args.command, "exit_code": code,
                                  "failed_checks": failed, "summary": summary}), indent=2))
    if failed:
        print(f"slcone {args.command}: failed checks: {', '.join(failed)}", file=sys.stderr)
    return code, manifest


def _rerun(args) -> int:
    try:
        old = json.loads(args.manifest.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"slcone rerun: cannot read manifest: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if old.get("schema") != SCHEMA:
        print(f"slcone rerun: unsupported schema {old.get('schema')!r}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or args.manifest.parent / "rerun"
    code, new = _run(list(old["argv"]) + ["--out", str(out)])
    if new is None:
        return code
    old_hashes = [(Path(o["path"]).name, o["sha256"]) for o in old["outputs"]]
    new_hashes = [(Path(o["path"]).name, o["sha256"]) for o in new["outputs"]]
    if old_hashes != new_hashes or code != old.get("exit_code"):
        mismatched = sorted({a for a, _ in old_hashes} ^ {a for a, _ in new_hashes}
                            | {a for (a, h), (_, g) in zip(old_hashes, new_hashes) if h != g})
        print(f"slcone rerun: outputs differ: {', '.join(mismatched) or 'exit code'}", file=sys.stderr)
        return EXIT_CHECK
    print(f"slcone rerun: {len(new_hashes)} outputs reproduced", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        code, _ = _run(argv)
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    return code


if __name__ == "__main__":
    sys.exit(main())
