"""Command-line front end.

Subcommands:

    curve      privacy-distortion curves or brackets on a D grid, as CSV
    eval       privacy losses of a mechanism stored as JSON
    construct  build a named or optimal mechanism and write it as JSON
    verify     check every closed form against the numerical oracles
    compose    losses of a mechanism applied to n i.i.d. coordinates

Exit codes: 0 on success, 1 when verification or a composition check fails,
2 on bad usage or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from putlab import catalog
from putlab.bounds import BoundPair
from putlab.composition import CompositionLawError, approx_dp_product_value, composed_loss_law, composed_pd
from putlab.core import (Mechanism, NotionKind, Prior, PrivacyNotion, ProductSpace, SourceClass, SourceKind,
                         SourceSet, dump_json, expected_distortion, load_json, row_distortions,
                         sort_with_permutation)
from putlab.global_pd import global_bounds
from putlab.local import adp_source_set_class2, class1_pd, known_prior_curve
from putlab.losses import eval_loss
from putlab.oracle import verify_closed_forms

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
_KNOWN_PRIOR = {NotionKind.DP, NotionKind.APPROX_DP, NotionKind.MAX_LEAKAGE}


class UsageError(ValueError):
    pass


def fmt(x: float) -> str:
    """Fixed 12-decimal rendering used in every output; infinities print as ``inf``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12f}"


# --------------------------------------------------------------------------- argument helpers


def _add_notion_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("privacy notions")
    g.add_argument("--dp", action="store_true", help="pure differential privacy")
    g.add_argument("--adp", type=float, action="append", metavar="DELTA", help="approximate DP (repeatable)")
    g.add_argument("--maxinfo", action="store_true", help="maximal information")
    g.add_argument("--ml", action="store_true", help="maximal leakage")
    g.add_argument("--rdp", type=float, action="append", metavar="ALPHA", help="Renyi DP (repeatable)")
    g.add_argument("--sibson", type=float, action="append", metavar="ALPHA", help="Sibson MI (repeatable)")
    g.add_argument("--mi", action="store_true", help="mutual information")


def _notions(args) -> list[PrivacyNotion]:
    out = []
    if args.dp:
        out.append(PrivacyNotion.dp())
    out += [PrivacyNotion.approx_dp(d) for d in args.adp or []]
    if args.maxinfo:
        out.append(PrivacyNotion.max_info())
    if args.ml:
        out.append(PrivacyNotion.max_leakage())
    out += [PrivacyNotion.renyi(a) for a in args.rdp or []]
    out += [PrivacyNotion.sibson(a) for a in args.sibson or []]
    if args.mi:
        out.append(PrivacyNotion.mutual_info())
    if not out:
        raise UsageError("choose at least one notion (--dp, --adp DELTA, --maxinfo, --ml, --rdp ALPHA, "
                         "--sibson ALPHA, --mi)")
    return out


def _read_prior(text: str, n: int = 1) -> Prior:
    """A prior given inline as ``0.4,0.3,...`` or as a path to a prior JSON file."""
    if os.path.exists(text):
        return Prior.from_json(load_json(text))
    try:
        probs = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot read prior {text!r}: not a file and not a comma-separated list") from exc
    return Prior.of(probs, n)


def _read_mechanism(path: str) -> Mechanism:
    return Mechanism.from_json(load_json(path))


# --------------------------------------------------------------------------- curve


def _grid(args, n: int) -> np.ndarray:
    if args.points < 1:
        raise UsageError("the D grid is empty")
    start = args.start if args.start is not None else n / (args.points + 1)
    stop = args.stop if args.stop is not None else n * args.points / (args.points + 1)
    grid = np.linspace(start, stop, args.points) if args.points > 1 else np.array([start])
    if args.points > 1 and not np.all(np.diff(grid) > 0):
        raise UsageError("the D grid must be strictly increasing")
    if grid[0] <= 0 or grid[-1] > n:
        raise UsageError(f"the D grid must lie in (0, {n}]")
    return grid


def _source_set(args, m: int, n: int) -> SourceSet:
    space = ProductSpace(m, n)
    if args.class1:
        if args.prior:
            raise UsageError("--class1 and --prior are mutually exclusive")
        return SourceSet.full_simplex(space)
    if not args.prior:
        raise UsageError("give --prior (repeatable for a family) or --class1")
    priors = []
    for text in args.prior:
        P = _read_prior(text)
        if P.space.n == 1 and n > 1:
            P = Prior.product(P, n)
        if P.space != space:
            raise UsageError(f"prior has {P.space.size} points, expected {m}^{n} = {space.size}")
        priors.append(P)
    return SourceSet.singleton(priors[0]) if len(priors) == 1 else SourceSet.family(priors)


def _sorted_singleton(S: SourceSet) -> Prior:
    # Relabelling symbols does not change any privacy-distortion value.
    probs, _ = sort_with_permutation(S.members[0].probs)
    return Prior(S.space, probs)


def _local_value(notion: PrivacyNotion, S: SourceSet, D: float) -> BoundPair:
    m = S.space.m
    if S.source_class is SourceClass.CLASS_I:
        return class1_pd(notion, m, D, S)
    if S.kind is SourceKind.SINGLETON and notion.kind in _KNOWN_PRIOR:
        return known_prior_curve([notion], _sorted_singleton(S), [D])[0][2]
    if notion.kind is NotionKind.APPROX_DP and S.source_class is SourceClass.CLASS_II:
        return BoundPair.point(adp_source_set_class2(S, D, notion.delta))
    return global_bounds(notion, S, S.space, D)


def curve_rows(setting: str, notions, m: int, n: int, S: SourceSet, grid) -> list[tuple]:
    """``(D, label, BoundPair)`` rows sorted by ``(D, label)``."""
    rows = []
    for D in grid:
        D = float(D)
        for notion in notions:
            if setting == "local":
                bp = _local_value(notion, S, D)
            elif setting == "global":
                bp = global_bounds(notion, S, S.space, D)
            else:
                bp = composed_pd(notion, m, n, D, S)
            rows.append((D, notion.label, bp))
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


def render_csv(rows) -> str:
    lines = ["D,notion,lower,upper,exact"]
    for D, label, bp in rows:
        lines.append(f"{fmt(D)},{label},{fmt(bp.lower)},{fmt(bp.upper)},{int(bool(bp.exact))}")
    return "\n".join(lines) + "\n"


def render_gnuplot(csv_path: str, labels) -> str:
    lines = [
        "set datafile separator ','",
        "set key outside right",
        "set xlabel 'D'",
        "set ylabel 'privacy loss (nats)'",
    ]
    plots = []
    for label in labels:
        sel = f"(strcol(2) eq '{label}' ? $3 : 1/0)"
        plots.append(f"'{csv_path}' using 1:{sel} skip 1 with lines title '{label} lower'")
        sel = f"(strcol(2) eq '{label}' ? $4 : 1/0)"
        plots.append(f"'{csv_path}' using 1:{sel} skip 1 with lines dashtype 2 title '{label} upper'")
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_curve(args) -> int:
    notions = _notions(args)
    n = args.n
    if args.setting == "local" and n != 1:
        raise UsageError("the local setting describes one coordinate; use --n 1 or --setting composed")
    grid = _grid(args, n)
    S = _source_set(args, args.m, 1 if args.setting == "composed" else n)
    if S.space.m != args.m:
        raise UsageError(f"prior alphabet size {S.space.m} does not match --m {args.m}")
    text = render_csv(curve_rows(args.setting, notions, args.m, n, S, grid))
    _write(text, args.out)
    if args.gnuplot:
        _write(render_gnuplot(args.out or "curve.csv", [nt.label for nt in notions]), args.gnuplot)
    return EXIT_OK


# --------------------------------------------------------------------------- eval / compose


def _prior_for(args, notions, space: ProductSpace) -> Prior | None:
    if args.prior is None:
        missing = [nt.label for nt in notions if nt.prior_required]
        if missing:
            raise UsageError(f"{', '.join(missing)} requires a prior (--prior)")
        return None
    P = _read_prior(args.prior, space.n)
    if P.space.n == 1 and space.n > 1:
        P = Prior.product(P, space.n)
    if P.space != space:
        raise UsageError("prior and mechanism describe different input spaces")
    return P


def cmd_eval(args) -> int:
    notions = _notions(args)
    Q = _read_mechanism(args.mechanism)
    P = _prior_for(args, notions, Q.space)
    for notion in notions:
        print(f"{notion.label} {fmt(eval_loss(notion, Q, P))}")
    return EXIT_OK


def cmd_compose(args) -> int:
    notions = _notions(args)
    base = _read_mechanism(args.mechanism)
    if args.n < 1:
        raise UsageError("--n must be a positive integer")
    P = _prior_for(args, notions, base.space)
    try:
        for notion in notions:
            if notion.kind is NotionKind.APPROX_DP:
                value = approx_dp_product_value(base, notion.delta, args.n)
            else:
                value = composed_loss_law(notion, base, P, args.n, check=not args.no_check)
            print(f"{notion.label} {fmt(value)}")
    except CompositionLawError as exc:
        print(f"putlab: composition check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# --------------------------------------------------------------------------- construct


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.name} needs {', '.join(missing)}")


def cmd_construct(args) -> int:
    name = args.name
    summary: list[tuple[str, float]] = []
    P = None
    if name == "wang":
        _require(args, "m", "D")
        Q = catalog.wang_mechanism(ProductSpace(args.m, args.n), args.D)
        summary.append(("dp", eval_loss(PrivacyNotion.dp(), Q)))
    elif name == "rr":
        _require(args, "m", "keep")
        Q = catalog.randomized_response(args.m, args.keep)
        summary.append(("dp", eval_loss(PrivacyNotion.dp(), Q)))
    elif name == "qdelta":
        _require(args, "m", "delta")
        Q = catalog.q_delta_mechanism(args.m, args.delta)
        notion = PrivacyNotion.approx_dp(args.delta)
        summary.append((notion.label, eval_loss(notion, Q)))
    elif name == "uniform":
        _require(args, "m")
        Q = catalog.uniform_mechanism(ProductSpace(args.m, args.n))
    elif name == "identity":
        _require(args, "m")
        Q = catalog.identity_mechanism(ProductSpace(args.m, args.n))
    elif name == "optimal-adp":
        _require(args, "prior", "D", "delta")
        P = _read_prior(args.prior)
        Q = catalog.optimal_adp_mechanism(P, args.D, args.delta)
        notion = PrivacyNotion.approx_dp(args.delta)
        summary.append((notion.label, eval_loss(notion, Q)))
    else:  # optimal-ml
        _require(args, "prior", "D")
        P = _read_prior(args.prior)
        Q = catalog.optimal_ml_mechanism(P, args.D)
        summary.append(("ml", eval_loss(PrivacyNotion.max_leakage(), Q)))
    text = dump_json(Q)
    if args.out:
        _write(text, args.out)
    else:
        sys.stdout.write(text)
    report = sys.stdout if args.out else sys.stderr
    if Q.size_out == Q.space.size:
        summary.append(("max_row_distortion", float(row_distortions(Q).max())))
        if P is not None:
            summary.append(("distortion", expected_distortion(Q, P)))
    for label, value in summary:
        print(f"{label} {fmt(value)}", file=report)
    return EXIT_OK


# --------------------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    only = None
    if args.only:
        only = [s.strip().lower() for part in args.only for s in part.split(",") if s.strip()]
        unknown = sorted(set(only) - {k.value for k in NotionKind})
        if unknown:
            raise UsageError(f"unknown notion(s) for --only: {', '.join(unknown)}")
    report = verify_closed_forms(args.seed, args.trials, only)
    _write(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    if args.out:
        status = "passed" if report["passed"] else "FAILED"
        print(f"verify {status}: {len(report['results'])} checks, report in {args.out}")
    return EXIT_OK if report["passed"] else EXIT_FAIL


# --------------------------------------------------------------------------- entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="putlab", description="Privacy-utility trade-offs on finite alphabets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("curve", help="privacy-distortion curves as CSV")
    p.add_argument("--setting", choices=["local", "global", "composed"], default="local")
    p.add_argument("--m", type=int, required=True, help="alphabet size per coordinate")
    p.add_argument("--n", type=int, default=1, help="number of coordinates")
    p.add_argument("--prior", action="append",
                   help="prior as 'p1,p2,...' or JSON path; repeat for a family of priors")
    p.add_argument("--class1", action="store_true", help="adversary may hold any prior (full simplex)")
    p.add_argument("--start", type=float, help="first distortion level")
    p.add_argument("--stop", type=float, help="last distortion level")
    p.add_argument("--points", type=int, default=99, help="number of grid points")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--gnuplot", metavar="PATH", help="also write a gnuplot script for the CSV")
    _add_notion_flags(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("eval", help="privacy losses of a mechanism")
    p.add_argument("mechanism", help="mechanism JSON file")
    p.add_argument("--prior", help="prior as 'p1,p2,...' or JSON path")
    _add_notion_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("construct", help="build a mechanism")
    p.add_argument("name", choices=["wang", "rr", "qdelta", "uniform", "identity", "optimal-adp", "optimal-ml"])
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--D", type=float, help="distortion level")
    p.add_argument("--delta", type=float)
    p.add_argument("--keep", type=float, help="randomized-response keep probability")
    p.add_argument("--prior", help="prior as 'p1,p2,...' or JSON path (sorted non-increasingly)")
    p.add_argument("--out", help="JSON path (default: stdout, summary on stderr)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check closed forms against the oracles")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--only", action="append", help="restrict to notions, e.g. 'ml' or 'dp,adp'")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compose", help="losses of n i.i.d. copies of a mechanism")
    p.add_argument("mechanism", help="single-coordinate mechanism JSON file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--prior", help="single-coordinate prior as 'p1,p2,...' or JSON path")
    p.add_argument("--no-check", action="store_true", help="skip the check against the realized product")
    _add_notion_flags(p)
    p.set_defaults(func=cmd_compose)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"putlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"putlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # never leak a traceback exit status
        print(f"putlab: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
