"""Command-line front end.

Exit codes: 0 all checks pass, 1 a violation was found, 2 usage or
configuration error, 3 resource exhaustion.  JSON goes to stdout (or --out)
with sorted keys; tabular data is CSV.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import bounds, predict, qseries, saddle, signcheck
from .certify import appendix, beta_certificate
from .certify.beta import DEFAULT_M
from .errors import BorweinError, ResourceError

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
EXACT_ONLY_MAX_N = 546
CONTOUR_RTOL = 1e-6


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    threads: int = 1
    out: str | None = None
    seed: int | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        params = {k: v for k, v in vars(args).items()
                  if k not in ("command", "out", "threads", "seed", "func")}
        threads = args.threads if getattr(args, "threads", None) else signcheck.default_workers()
        return cls(args.command, params, threads, args.out, getattr(args, "seed", None))


# ---------------------------------------------------------------------------
# helpers

def parse_range(text: str) -> list[int]:
    """'5', '1..100' or '1,4,9' (pieces may be combined with commas)."""
    out = []
    try:
        for piece in text.split(","):
            piece = piece.strip()
            if ".." in piece:
                lo, hi = piece.split("..")
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise UsageError(f"empty range {piece}")
                out.extend(range(lo, hi + 1))
            elif piece:
                out.append(int(piece))
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc
    if not out:
        raise UsageError("empty range")
    return sorted(set(out))


def parse_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from exc


def ordered_map(fn, items, workers: int):
    """map() that keeps input order; a process pool when workers > 1."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# families

def family_spec(args) -> qseries.ProductSpec:
    fam = args.family
    n, delta = args.n_single, args.delta
    if fam == "borwein":
        return qseries.borwein_spec(n, delta)
    if fam in ("mod4", "mod7"):
        return qseries.modk_spec(int(fam[3:]), n, delta)
    if fam == "modk":
        return qseries.modk_spec(args.K, n, delta)
    if fam == "iks":
        return qseries.paired_spec(args.K, [args.a], n)
    raise UsageError(f"family {fam} has no product description")


def family_series(args) -> qseries.TruncatedSeries:
    if args.family == "bbg":
        if args.trunc is None:
            raise UsageError("--trunc is required for bbg")
        return qseries.theta_difference_bbg(args.trunc)
    if args.n_single is None:
        raise UsageError("--n is required")
    return qseries.general_product(family_spec(args), args.trunc)


def _iks_rule(n: int, K: int, a: int):
    return signcheck.iks_rule(K, a)


def sign_family(args):
    # rule builders must pickle for the process pool, hence partial over module functions
    fam, delta = args.family, args.delta
    if fam == "borwein":
        return signcheck.borwein_family(delta), partial(signcheck.power_rule, delta=delta)
    if fam == "mod4":
        return signcheck.modk_family(4, delta), partial(signcheck.mod4_rule, delta=delta)
    if fam == "mod7":
        return signcheck.modk_family(7, 1), signcheck.mod7_rule
    if fam == "iks":
        return signcheck.iks_family(args.K, args.a), partial(_iks_rule, K=args.K, a=args.a)
    raise UsageError(f"no sign rule for family {fam}")


# ---------------------------------------------------------------------------
# commands

def cmd_coeffs(cfg: RunConfig, args) -> int:
    s = family_series(args)
    emit(s.to_json() + "\n" if args.format == "json" else s.to_csv(), cfg.out)
    return EXIT_OK


def cmd_verify_sign(cfg: RunConfig, args) -> int:
    family, rule = sign_family(args)
    rows = signcheck.scan_family(family, rule, parse_range(args.n), args.m_limit, cfg.threads)
    emit(dump_json([r.as_dict(family.name) for r in rows]), cfg.out)
    return EXIT_VIOLATION if any(r.violations for r in rows) else EXIT_OK


def _theorem_plan(n: int, delta: int, override: int | None) -> tuple[str, int | None]:
    """(mode, exact m-limit) for one n; None means the whole range."""
    if n <= EXACT_ONLY_MAX_N:
        return "FULL_EXACT", None
    limit = override if override is not None else bounds.mstar(n, delta)
    if limit <= 3 * n:
        # below 3n the coefficients are those of the infinite product
        return "ANALYTIC", limit
    return "TRUNCATED_EXACT+ANALYTIC", limit


def cmd_verify_theorem(cfg: RunConfig, args) -> int:
    delta = args.theorem
    family = signcheck.borwein_family(delta)
    ns = parse_range(args.n)
    report, code = [], EXIT_OK
    plans = {}
    for n in ns:
        try:
            plans[n] = _theorem_plan(n, delta, args.m_limit)
        except bounds.AnalyticBoundInsufficient as exc:
            report.append({"n": n, "status": "FAIL", "mode": "ANALYTIC", "reason": str(exc)})
            code = EXIT_VIOLATION
    full = [n for n, (mode, _) in plans.items() if mode == "FULL_EXACT"]
    trunc = [n for n, (mode, _) in plans.items() if mode == "TRUNCATED_EXACT+ANALYTIC"]
    rows = {}
    try:
        if full:
            for row in signcheck.scan_family(family, partial(signcheck.power_rule, delta=delta),
                                             full, None, cfg.threads):
                rows[row.n] = row
        if trunc:
            limit = max(plans[n][1] for n in trunc)
            for row in signcheck.scan_family(family, partial(signcheck.power_rule, delta=delta),
                                             trunc, limit, cfg.threads):
                rows[row.n] = row
    except (MemoryError, ResourceError) as exc:
        report.append({"n": None, "status": "RESOURCE", "reason": str(exc)})
        emit(dump_json({"theorem": delta, "results": report}), cfg.out)
        return EXIT_RESOURCE
    for n in sorted(plans):
        mode, limit = plans[n]
        entry = {"n": n, "mode": mode, "m_limit": limit}
        row = rows.get(n)
        if row is not None:
            entry["checked_range"] = list(row.checked_range)
            entry["violations"] = [v.as_dict() for v in row.violations]
        ok = row is None or not row.violations
        entry["status"] = "PASS" if ok else "FAIL"
        if not ok:
            code = EXIT_VIOLATION
        report.append(entry)
    report.sort(key=lambda e: (e["n"] is None, e["n"] or 0))
    emit(dump_json({"theorem": delta, "results": report}), cfg.out)
    return code


def cmd_solve_radius(cfg: RunConfig, args) -> int:
    ctx = saddle.saddle_context(args.n, args.m, args.delta)
    emit(dump_json(ctx.as_dict()), cfg.out)
    return EXIT_OK


def cmd_bounds(cfg: RunConfig, args) -> int:
    budget = bounds.final_inequality(args.n, args.m, args.delta, exact_arg=args.exact_arg)
    emit(dump_json(budget.as_dict()), cfg.out)
    return EXIT_OK if budget.verdict else EXIT_VIOLATION


def _mstar_row(job):
    n, delta = job
    r = bounds.rstar(n, delta)
    return n, r, bounds.mstar(n, delta)


def cmd_mstar(cfg: RunConfig, args) -> int:
    ns = parse_range(args.n)
    if args.stride > 1:
        ns = ns[::args.stride]
    rows = ordered_map(_mstar_row, [(n, args.delta) for n in ns], cfg.threads)
    emit(dump_csv(["n", "rstar", "mstar"], [(n, _fmt(r), m) for n, r, m in rows]), cfg.out)
    return EXIT_OK


def cmd_contour_check(cfg: RunConfig, args) -> int:
    exact = qseries.borwein_poly(args.n, args.delta).coefficient(args.m)
    deg = 3 * args.n * args.n * args.delta
    r = saddle.solve_radius(args.n, args.m, args.delta) if 0 < args.m < deg else 1.0
    val = bounds.contour_coefficient(args.n, args.m, args.delta, r, args.points)
    rel = abs(val - exact) / max(1, abs(exact))
    ok = rel <= CONTOUR_RTOL
    emit(dump_json({"n": args.n, "m": args.m, "delta": args.delta, "r": r, "exact": str(exact),
                    "contour": val, "rel_error": rel, "pass": ok}), cfg.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_certify(cfg: RunConfig, args) -> int:
    if args.what == "beta":
        if args.i is None or args.mu is None:
            raise UsageError("certify beta needs --i and --mu")
        cert = beta_certificate(args.i, args.mu, M=args.grid or DEFAULT_M, strict=args.strict)
        emit(dump_json(cert.as_dict()), cfg.out)
        return EXIT_OK
    seed = appendix.DEFAULT_SEED if args.seed is None else args.seed
    grid = args.grid if args.grid is not None else appendix.DEFAULT_GRID
    results = appendix.run_suite(seed=seed, M=grid)
    emit(appendix.manifest(results, seed, grid) + "\n", cfg.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


def _predict_spec(args):
    offsets = parse_ints(args.offsets) if args.offsets else None
    if offsets:
        return qseries.paired_spec(args.K, offsets, args.n_single, args.delta)
    return qseries.modk_spec(args.K, args.n_single, args.delta)


def cmd_predict(cfg: RunConfig, args) -> int:
    spec = _predict_spec(args)
    peaks = predict.default_peaks(spec)
    if args.action == "scan":
        rows = predict.scan_residues(spec, peaks)
        if args.format == "json":
            emit(dump_json({"K": args.K, "dominant_peaks": [p.index for p in peaks.dominant],
                            "residues": [e.as_dict() for e in rows]}), cfg.out)
        else:
            table = [(e.residue, e.pattern, _fmt(e.at_zero), _fmt(e.at_one),
                      ";".join(_fmt(x) for x in e.roots), ";".join(_fmt(x) for x in e.fractions),
                      int(e.ambiguous)) for e in rows]
            emit(dump_csv(["residue", "pattern", "target_at_0", "target_at_1", "roots",
                           "fractions", "ambiguous"], table), cfg.out)
        return EXIT_OK
    if args.residue is None:
        raise UsageError("--residue is required")
    root = predict.sign_change_root(spec, args.residue, peaks)
    roots = [] if root is None else list(root) if isinstance(root, predict.AmbiguousRoots) else [root]
    out = {"K": args.K, "residue": args.residue, "dominant_peaks": [p.index for p in peaks.dominant],
           "s0": roots[0] if len(roots) == 1 else (roots or None),
           "fraction": predict.fraction_at_root(spec, roots[0], peaks) if len(roots) == 1 and roots[0] > 0 else None,
           "ambiguous": len(roots) > 1}
    emit(dump_json(out), cfg.out)
    return EXIT_OK


def circle_samples(n: int, r: float, delta: int, samples: int):
    theta = np.linspace(-math.pi, math.pi, samples)
    theta = 0.5 * (theta - theta[::-1])  # exactly antisymmetric grid
    with np.errstate(divide="ignore"):
        vals = saddle.log_borwein(n, r, theta, delta).real
    return theta, vals


def cmd_plot_circle(cfg: RunConfig, args) -> int:
    if args.samples < 16:
        raise UsageError("--samples must be at least 16")
    theta, vals = circle_samples(args.n, args.r, args.delta, args.samples)
    emit(dump_csv(["theta", "log_abs"], [(_fmt(t), _fmt(v)) for t, v in zip(theta, vals)]), cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="borwein", allow_abbrev=False,
                                description="Borwein-type polynomials: coefficients, sign checks, bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, delta=True):
        sp.add_argument("--out", default=None, help="output file (default stdout)")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker processes (default BORWEIN_THREADS or CPU count)")
        if delta:
            sp.add_argument("--delta", type=int, default=1, choices=(1, 2, 3))
        return sp

    families = ("borwein", "mod4", "mod7", "modk", "iks", "bbg")
    sp = common(sub.add_parser("coeffs", allow_abbrev=False, help="exact coefficients"))
    sp.add_argument("--family", choices=families, default="borwein")
    sp.add_argument("--n", dest="n_single", type=int)
    sp.add_argument("--K", type=int, default=3)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--trunc", type=int, default=None)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_coeffs)

    sp = common(sub.add_parser("verify-sign", allow_abbrev=False, help="scan a family for sign violations"))
    sp.add_argument("--family", choices=("borwein", "mod4", "mod7", "iks"), default="borwein")
    sp.add_argument("--n", required=True, help="range such as 1..100")
    sp.add_argument("--K", type=int, default=5)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--m-limit", type=int, default=None)
    sp.set_defaults(func=cmd_verify_sign)

    sp = common(sub.add_parser("verify-theorem", allow_abbrev=False,
                               help="exact check below m*(n), analytic bound above"), delta=False)
    sp.add_argument("--theorem", type=int, choices=(1, 2, 3), required=True)
    sp.add_argument("--n", required=True)
    sp.add_argument("--m-limit", type=int, default=None, help="override m*(n)")
    sp.set_defaults(func=cmd_verify_theorem)

    sp = common(sub.add_parser("solve-radius", allow_abbrev=False, help="saddle radius and cached sums"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=float, required=True)
    sp.set_defaults(func=cmd_solve_radius)

    sp = common(sub.add_parser("bounds", allow_abbrev=False, help="error budget at (n, m)"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--exact-arg", action="store_true", help="use the argument at r instead of the uniform floor")
    sp.set_defaults(func=cmd_bounds)

    sp = common(sub.add_parser("mstar", allow_abbrev=False, help="CSV of n, r*, m*"))
    sp.add_argument("--n", required=True)
    sp.add_argument("--stride", type=int, default=1)
    sp.set_defaults(func=cmd_mstar)

    sp = common(sub.add_parser("contour-check", allow_abbrev=False, help="Cauchy integral vs exact coefficient"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--points", type=int, default=8192)
    sp.set_defaults(func=cmd_contour_check)

    sp = common(sub.add_parser("certify", allow_abbrev=False, help="certified constants and property suite"),
                delta=False)
    sp.add_argument("what", choices=("beta", "appendix-suite"))
    sp.add_argument("--i", type=int)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--strict", action="store_true")
    sp.add_argument("--grid", type=int, default=None, help="grid size M")
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=cmd_certify)

    sp = common(sub.add_parser("predict", allow_abbrev=False, help="sign-pattern predictor"))
    sp.add_argument("action", nargs="?", choices=("scan",))
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--offsets", default=None, help="comma list of alpha_j (default all 1..K-1)")
    sp.add_argument("--residue", type=int, default=None)
    sp.add_argument("--n", dest="n_single", type=int, default=50)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_predict)

    sp = common(sub.add_parser("plot-circle", allow_abbrev=False, help="log|P_n^delta| on a circle (CSV)"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--samples", type=int, default=4096)
    sp.set_defaults(func=cmd_plot_circle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cfg = RunConfig.from_args(args)
    try:
        return args.func(cfg, args)
    except UsageError as exc:
        print(f"borwein: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MemoryError, ResourceError) as exc:
        print(f"borwein: resource exhausted: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except BorweinError as exc:
        print(f"borwein: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
