"""Command-line front end.

Subcommands: classify, spectrum, sweep, modes, resolve, count, oracle,
verify.  Vertex conditions are passed as inline JSON or a path to a JSON
file via --vc.  CSV output uses '.' decimals, ',' separators, a mandatory
header row and 17 significant digits, so identical inputs give
byte-identical files.  Exit codes: 0 success, 1 verification/consistency
failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acceptance, counting, fd_oracle
from .eigenmodes import build_eigenmode, localization
from .errors import CountMismatch, Inconsistent, ShrinkEdgeError
from .grids import GridFunction
from .resolvent import residual, resolve
from .secular import (
    ADMISSIBLE_RATES,
    SpectralPoint,
    find_negative_eigenvalues,
    fit_rate,
    secular_neg,
)
from .vertex_model import (
    Rank0,
    Rank1,
    VertexCondition,
    Z_INF,
    classify,
    nonresonant_short_edge,
    nonresonant_threshold,
    solve_kappa0,
    solve_kappa1,
    vc_from_json,
    vc_to_json,
)

SCHEMA = "shrinkedge/1"
SWEEP_HEADER = "epsilon,kappa,lambda,kind,alpha_pred,secular_residual"
RATE_LABEL = {"B": "eps^0", "C": "eps^(-2/3)", "S": "eps^(-1)"}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class SweepConfig:
    """A rate-verification sweep: one vertex condition over a falling eps grid."""

    vc: VertexCondition
    eps_grid: tuple
    out_csv: str | None = None

    def __post_init__(self):
        grid = tuple(float(e) for e in self.eps_grid)
        if any(e2 >= e1 for e1, e2 in zip(grid, grid[1:])):
            raise ValueError("epsilon grid must be strictly decreasing")
        if not all(0.0 < e <= 0.2 for e in grid):
            raise ValueError("epsilon grid must lie in (0, 0.2]")
        object.__setattr__(self, "eps_grid", grid)


DEFAULT_GRID = tuple(np.geomspace(1e-2, 1e-6, 9))


def _load_vc(arg: str) -> VertexCondition:
    text = arg.strip()
    if not text.startswith("{"):
        text = Path(text).read_text(encoding="utf-8")
    return vc_from_json(text)


def _point_row(p: SpectralPoint, vc: VertexCondition) -> str:
    res = abs(float(secular_neg(vc, p.epsilon, p.kappa)))
    alpha = "" if p.alpha_predicted is None else _fmt(p.alpha_predicted)
    return ",".join(
        [_fmt(p.epsilon), _fmt(p.kappa), _fmt(p.lam), p.kind, alpha, _fmt(res)]
    )


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_classify(args) -> int:
    vc = _load_vc(args.vc)
    preds = classify(vc)
    report = {
        "schema": SCHEMA,
        "vc": vc_to_json(vc),
        "predictions": [
            {"kind": p.kind, "alpha": p.alpha, "rate": ADMISSIBLE_RATES[p.kind]}
            for p in preds
        ],
        "nonresonant_short_edge": nonresonant_short_edge(vc),
        "nonresonant_threshold": nonresonant_threshold(vc),
    }
    try:
        if isinstance(vc, Rank1) and vc.z is not Z_INF:
            report["kappa1"] = solve_kappa1(vc.z, vc.mu)
        if isinstance(vc, Rank0):
            report["kappa0"] = solve_kappa0(vc.a, vc.b, vc.c)
    except ShrinkEdgeError:
        pass
    if args.json:
        print(json.dumps(report, indent=2))
        return 0
    if not preds:
        print("no negative eigenvalues")
    for p in preds:
        print(f"type {p.kind}, alpha={p.alpha:.12g}, rate {RATE_LABEL[p.kind]}")
    for key in ("kappa0", "kappa1"):
        if key in report:
            print(f"{key} = {report[key]:.12g}")
    print(f"nonresonant (short edge): {report['nonresonant_short_edge']}")
    print(f"nonresonant (threshold):  {report['nonresonant_threshold']}")
    return 0


def cmd_spectrum(args) -> int:
    vc = _load_vc(args.vc)
    points = find_negative_eigenvalues(vc, args.eps)
    if args.out:
        rows = [SWEEP_HEADER] + [_point_row(p, vc) for p in points]
        _write(args.out, "\n".join(rows) + "\n")
    print(json.dumps({
        "schema": SCHEMA,
        "epsilon": args.eps,
        "points": [
            {"kappa": p.kappa, "lambda": p.lam, "kind": p.kind,
             "alpha_pred": p.alpha_predicted}
            for p in points
        ],
    }, indent=2))
    return 0


def _parse_grid(text: str) -> tuple:
    try:
        hi, lo, num = text.split(":")
        return tuple(np.geomspace(float(hi), float(lo), int(num)))
    except ValueError as exc:
        raise ValueError(f"bad eps grid {text!r}, expected 'hi:lo:npts'") from exc


def cmd_sweep(args) -> int:
    vc = _load_vc(args.vc)
    grid = _parse_grid(args.eps_grid) if args.eps_grid else DEFAULT_GRID
    config = SweepConfig(vc, grid, args.out)
    preds = {p.kind: p.alpha for p in classify(vc)}

    rows = [SWEEP_HEADER]
    branches: dict[str, list[SpectralPoint]] = {}
    for eps in config.eps_grid:
        for p in find_negative_eigenvalues(vc, eps):
            rows.append(_point_row(p, vc))
            branches.setdefault(p.kind, []).append(p)
    if config.out_csv:
        _write(config.out_csv, "\n".join(rows) + "\n")

    report = {"schema": SCHEMA, "vc": vc_to_json(vc), "branches": {}}
    all_ok = True
    for kind, pts in sorted(branches.items()):
        fit = fit_rate(pts)
        expected_rate = ADMISSIBLE_RATES[kind]
        alpha = preds.get(kind)
        ok = abs(fit.slope - expected_rate) <= args.tol and (
            alpha is None or abs(fit.coeff - alpha) <= args.tol * max(1.0, alpha)
        )
        all_ok = all_ok and ok
        report["branches"][kind] = {
            "slope": fit.slope,
            "coeff": fit.coeff,
            "residual": fit.residual,
            "expected_rate": expected_rate,
            "alpha_predicted": alpha,
            "agrees": ok,
        }
    print(json.dumps(report, indent=2))
    return 0 if all_ok else 1


def cmd_modes(args) -> int:
    vc = _load_vc(args.vc)
    points = find_negative_eigenvalues(vc, args.eps)
    summary = []
    for i, p in enumerate(points):
        mode = build_eigenmode(vc, p)
        loc = localization(vc, p)
        summary.append({
            "kappa": p.kappa, "lambda": p.lam, "kind": p.kind,
            "norm_s_sq": loc.norm_s_sq, "norm_e_sq": loc.norm_e_sq,
        })
        if args.out:
            lines = ["edge,coord,re,im"]
            for tag, g in (("s", mode.psi_s), ("e", mode.psi_e)):
                for xj, vj in zip(g.x, g.values):
                    lines.append(f"{tag},{_fmt(xj)},{_fmt(vj.real)},{_fmt(vj.imag)}")
            _write(f"{args.out}_mode{i}.csv", "\n".join(lines) + "\n")
    print(json.dumps({"schema": SCHEMA, "epsilon": args.eps, "modes": summary},
                     indent=2))
    return 0


def _parse_lam(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"bad spectral parameter {text!r}, expected 're' or 're,im'")


def cmd_resolve(args) -> int:
    vc = _load_vc(args.vc)
    lam = _parse_lam(args.lam)
    raw = np.loadtxt(args.fin, delimiter=",", skiprows=1, ndmin=2)
    if raw.shape[1] != 5:
        raise ValueError("input CSV needs columns x,re_fs,im_fs,re_fe,im_fe")
    f_s = GridFunction(raw[:, 1] + 1j * raw[:, 2])
    f_e = GridFunction(raw[:, 3] + 1j * raw[:, 4])
    sol = resolve(vc, args.eps, lam, (f_s, f_e))
    res = residual(vc, args.eps, lam, (f_s, f_e), sol)
    if args.out:
        lines = ["coord,re_us,im_us,re_ue,im_ue"]
        for j in range(f_s.n):
            lines.append(",".join([
                _fmt(f_s.x[j]),
                _fmt(sol.u_s.values[j].real), _fmt(sol.u_s.values[j].imag),
                _fmt(sol.u_e.values[j].real), _fmt(sol.u_e.values[j].imag),
            ]))
        _write(args.out, "\n".join(lines) + "\n")
    print(json.dumps({
        "schema": SCHEMA,
        "c_s": {"re": sol.c_s.real, "im": sol.c_s.imag},
        "c_e": {"re": sol.c_e.real, "im": sol.c_e.imag},
        "residual": res,
    }, indent=2))
    return 0


def cmd_count(args) -> int:
    vc = _load_vc(args.vc)
    if not isinstance(vc, Rank0):
        raise ValueError("count applies to rank-0 (Robin) couplings")
    rep = counting.count_report(vc, args.eps)
    print(json.dumps({
        "schema": SCHEMA,
        "count": rep.count,
        "via_inertia": rep.via_inertia,
        "via_closed_form": rep.via_closed_form,
        "conditions_matched": rep.conditions_matched,
    }, indent=2))
    return 0


def cmd_oracle(args) -> int:
    vc = _load_vc(args.vc)
    try:
        n_s, n_e = (int(v) for v in args.mesh.split(","))
    except ValueError as exc:
        raise ValueError(f"bad mesh {args.mesh!r}, expected 'n_s,n_e'") from exc
    points = find_negative_eigenvalues(vc, args.eps)
    op = fd_oracle.assemble(vc, args.eps, n_s, n_e)
    inertia = fd_oracle.negative_count(op)
    secular = sorted(p.lam for p in points)
    discrete = fd_oracle.lowest_eigenvalues(op, max(len(points), 1))[: len(points)]
    rel = [abs(d - s) / abs(s) for s, d in zip(secular, discrete)]
    print(json.dumps({
        "schema": SCHEMA,
        "epsilon": args.eps,
        "mesh": [n_s, n_e],
        "secular": secular,
        "discrete": discrete,
        "rel_err": rel,
        "inertia": inertia,
        "expected_count": len(points),
    }, indent=2))
    return 0 if inertia == len(points) else 1


def cmd_verify(args) -> int:
    results = acceptance.run_acceptance()
    width = max(len(r.title) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.ident}  {r.title:<{width}}  ({r.seconds:6.2f} s)")
        if args.verbose or not r.passed:
            print(f"       {r.detail}")
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return 0 if n_fail == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shrinkedge",
        description="Spectral toolkit for the two-edge graph with a shrinking edge",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--vc", required=True,
                        help="vertex condition: inline JSON or a file path")
    common.add_argument("--eps", type=float, default=1e-3,
                        help="edge length (default 1e-3)")
    common.add_argument("--out", default=None, help="output CSV path")
    common.add_argument("--tol", type=float, default=0.05,
                        help="agreement tolerance (default 0.05)")

    p = sub.add_parser("classify", parents=[common],
                       help="predicted negative-eigenvalue branches")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("spectrum", parents=[common],
                       help="negative eigenvalues at one eps")
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("sweep", parents=[common],
                       help="eps sweep with rate fit per branch")
    p.add_argument("--eps-grid", default=None,
                   help="geometric grid 'hi:lo:npts' (default 1e-2:1e-6:9)")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("modes", parents=[common],
                       help="normalized eigenfunctions at one eps")
    p.set_defaults(fn=cmd_modes)

    p = sub.add_parser("resolve", parents=[common],
                       help="apply the resolvent to CSV data")
    p.add_argument("--lam", required=True, help="spectral parameter 're,im'")
    p.add_argument("--fin", required=True,
                   help="input CSV with columns x,re_fs,im_fs,re_fe,im_fe")
    p.set_defaults(fn=cmd_resolve)

    p = sub.add_parser("count", parents=[common],
                       help="negative-eigenvalue count, both routes")
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("oracle", parents=[common],
                       help="finite-element cross-check of the spectrum")
    p.add_argument("--mesh", default="2000,2000", help="elements per edge 'n_s,n_e'")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("verify", help="run the full verification suite")
    p.add_argument("--verbose", action="store_true", help="print details for passes too")
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON at line {exc.lineno}, column {exc.colno}: "
              f"{exc.msg}", file=sys.stderr)
        return 2
    except (CountMismatch, Inconsistent) as exc:
        # computed routes disagree: a verification failure, not bad input
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ShrinkEdgeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
