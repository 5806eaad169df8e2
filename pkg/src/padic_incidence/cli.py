"""Command-line entry point: ``padic-incidence <command> ...``.

Exit codes: 0 success, 1 a verified statement failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dimsets import (
    as_fraction,
    check_weighted_spacing,
    embed_prime_field,
    full_grid,
    minimal_K,
    random_mass_set,
    random_weighted_set,
    separated_lines,
)
from .documents import (
    GridDocument,
    SetDocument,
    canonical_json,
    certificate,
    default_suite,
    load_grid,
    load_set,
    load_suite,
    write_atomic,
)
from .errors import PadicError
from .incidence import WeightedLineSet, WeightedPointSet, incidences, thicken_lines, thicken_points
from .reduce import projective_normalize, reduce_to_prime_field, synthetic_grid
from .ring import RingParams
from .spectral import high_low_split
from .suite import run_suite
from .verify import best_bound_regime


class UsageError(Exception):
    pass


def _emit(text: str, out) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _ring(args) -> RingParams:
    if args.p is None or args.k is None:
        raise UsageError("--p and --k are required")
    return RingParams(args.p, args.k)


def cmd_gen(args) -> int:
    meta = {"generator": args.generator, "seed": args.seed}
    if args.generator == "grid":
        R = _ring(args)
        gs = synthetic_grid(R, args.seed, args.case)
        _emit(canonical_json(GridDocument.from_grid(gs, dict(meta, case=args.case))), args.out)
        return 0
    certs = []
    if args.generator == "full-grid":
        P, L = full_grid(_ring(args))
    elif args.generator == "random-alpha":
        R = _ring(args)
        alpha = args.alpha if args.alpha is not None else "1"
        beta = args.beta if args.beta is not None else alpha
        P, rp = random_mass_set(R, alpha, args.seed, "points")
        L, rl = random_mass_set(R, beta, args.seed + 1, "lines")
        certs = [certificate("points", rp), certificate("lines", rl)]
        meta.update(alpha=str(as_fraction(alpha)), beta=str(as_fraction(beta)))
    elif args.generator == "random-weighted":
        R = _ring(args)
        P = random_weighted_set(R, args.seed, "points", n=args.n, max_weight=args.max_weight)
        L = random_weighted_set(R, args.seed + 1, "lines", n=args.n, max_weight=args.max_weight)
        for target, S, a in (("points", P, args.alpha), ("lines", L, args.beta)):
            if a is not None:
                certs.append(certificate(target, check_weighted_spacing(S, a, minimal_K(S, a))))
    elif args.generator == "separated":
        R = _ring(args)
        L = separated_lines(R, args.seed, args.n)
        P = WeightedPointSet(R, {})
    elif args.generator == "embed-fp":
        if not args.config:
            raise UsageError("embed-fp needs --config FILE with a k = 1 set document")
        src = load_set(args.config)
        if args.k is None:
            raise UsageError("--k is required")
        P, L = embed_prime_field(*src.to_sets(), args.k)
        meta["source"] = Path(args.config).name
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(args.generator)
    _emit(canonical_json(SetDocument.from_sets(P, L, meta, certs)), args.out)
    return 0


def cmd_count(args) -> int:
    P, L = load_set(args.setfile).to_sets()
    if not args.weighted:
        P = WeightedPointSet(P.params, {key: 1 for key in P.keys()})
        L = WeightedLineSet(L.params, {key: 1 for key in L.keys()})
    if args.thicken is not None:
        P, L = thicken_points(P, args.thicken), thicken_lines(L, args.thicken)
    key = "I_w" if args.weighted else "I"
    out = {key: incidences(P, L).count}
    if args.thicken is not None:
        out["ring"] = {"p": P.params.p, "k": P.params.k}
    _emit(json.dumps(out, sort_keys=True) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    config = default_suite() if args.config == "default" else load_suite(args.config)
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    bundle = run_suite(config, workers=args.workers)
    out = Path(args.out or "reports")
    jl, cs = bundle.write(out)
    for f in bundle.failures:
        print(f"FAIL {f['cell']} {f['name']} status={f['status']} {f['note']}", file=sys.stderr)
    print(json.dumps({"reports": len(bundle.reports), "failures": len(bundle.failures),
                      "jsonl": str(jl), "csv": str(cs)}, sort_keys=True))
    return bundle.exit_code


def cmd_spectral(args) -> int:
    P, L = load_set(args.setfile).to_sets()
    s = high_low_split(P, L, args.j)
    out = {
        "j": args.j,
        "incidences": s.incidences,
        "high": s.high,
        "low_spectral": s.low_spectral,
        "low_exact": str(s.low_exact),
        "low_residual": s.low_residual,
        "total_residual": s.total_residual,
        "imag_residual": s.imag_residual,
        "low_matches": s.low_matches(),
        "total_matches": s.total_matches(),
    }
    _emit(json.dumps(out, sort_keys=True, indent=2) + "\n", args.out)
    return 0 if s.low_matches() and s.total_matches() else 1


def cmd_reduce(args) -> int:
    gs = load_grid(args.gridfile).to_grid()
    red = reduce_to_prime_field(gs)
    frame = projective_normalize(red.grid)
    out = {
        "trace": red.trace,
        "grid": GridDocument.from_grid(red.grid).model_dump(mode="json"),
        "frame": frame.to_dict(),
    }
    _emit(canonical_json(out), args.out)
    return 0


def cmd_regime(args) -> int:
    r = best_bound_regime(args.m, args.n)
    out = {"m": args.m, "n": args.n, "row": r.row, "label": r.label, "formula": r.formula,
           "log_value": r.log_value}
    _emit(json.dumps(out, sort_keys=True, ensure_ascii=False) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padic-incidence", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, ring=False):
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int, default=None)
        if ring:
            sp.add_argument("--p", type=int, default=2)
            sp.add_argument("--k", type=int, default=2)

    g = sub.add_parser("gen", help="write a point/line set or grid document")
    g.add_argument("generator", choices=["full-grid", "random-alpha", "random-weighted", "embed-fp",
                                         "separated", "grid"])
    common(g, ring=True)
    g.add_argument("--alpha")
    g.add_argument("--beta")
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--max-weight", type=int, default=4)
    g.add_argument("--config", help="k = 1 set document for embed-fp")
    g.add_argument("--case", type=int, choices=[1, 2], default=1)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("count", help="incidence count of a set document")
    c.add_argument("setfile")
    c.add_argument("--weighted", action="store_true")
    c.add_argument("--thicken", type=int, metavar="J")
    common(c)
    c.set_defaults(func=cmd_count)

    v = sub.add_parser("verify", help="run a suite config ('default' for the desk suite)")
    v.add_argument("config")
    v.add_argument("--workers", type=int, default=1)
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("spectral", help="high-low split residuals")
    s.add_argument("setfile")
    s.add_argument("--j", type=int, required=True)
    common(s)
    s.set_defaults(func=cmd_spectral)

    r = sub.add_parser("reduce", help="reduce a grid document to the prime field")
    r.add_argument("gridfile")
    common(r)
    r.set_defaults(func=cmd_reduce)

    m = sub.add_parser("regime", help="best-bound row for m points and n lines")
    m.add_argument("m", type=int)
    m.add_argument("n", type=int)
    common(m)
    m.set_defaults(func=cmd_regime)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is None and args.command == "gen":
        args.seed = 0
    try:
        return args.func(args)
    except (UsageError, PadicError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
