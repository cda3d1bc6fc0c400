"""Command-line entry point: ``booktri <subcommand> ...``.

Every JSON document carries a ``config`` block echoing the resolved inputs.
Exit codes: 0 success, 1 a mathematical expectation was violated, 2 misuse.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Iterator, Sequence

from . import __version__, _accel
from .blowups import check_conjecture_range, scan_blowups, verify_range
from .calculus import (CalculusError, PartVector, adjust_a2_to_a1, adjustment_monotonicity_suite,
                       delta_identity_suite, full_adjustment)
from .graph import (PRISM, Graph, Graph6Error, GraphError, balanced_bipartite, blowup,
                    construct_s_bn, read_graph6_lines, write_graph6)
from .invariants import bn_inequality, invariant_report
from .search import (DEFAULT_SEED, AnnealConfig, ScanConfig, anneal_min_triangles,
                     bn_random_batch, exhaustive_scan)
from .structure import (DecompositionError, StabilityParams, classify_exceptional, decompose_prism,
                        default_b, evaluate_certificate)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- parsing helpers ----------------------------------------------------------

def int_range(text: str) -> tuple[int, int]:
    """``A..B`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def number(text: str):
    from fractions import Fraction
    try:
        q = Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a rational number, got {text!r}") from None
    return q.numerator if q.denominator == 1 else q


def load_params(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as err:
        raise UsageError(f"cannot read params file: {err}") from None
    if p.suffix.lower() == ".toml":
        try:
            import tomllib  # type: ignore[import-not-found]
        except ModuleNotFoundError:
            import tomli as tomllib
        try:
            data = tomllib.loads(raw.decode())
        except tomllib.TOMLDecodeError as err:
            raise UsageError(f"bad TOML in {path}: {err}") from None
    else:
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as err:
            raise UsageError(f"bad JSON in {path}: {err}") from None
    if not isinstance(data, dict):
        raise UsageError("params file must hold a table/object")
    return data


def read_graphs(files: Sequence[str]) -> Iterator[Graph]:
    if not files or files == ["-"]:
        yield from read_graph6_lines(sys.stdin)
        return
    for f in files:
        with open(f) as fh:
            yield from read_graph6_lines(fh)


class Output:
    def __init__(self, path: str | None):
        self.fh = open(path, "w") if path and path != "-" else sys.stdout

    def line(self, text: str) -> None:
        self.fh.write(text + "\n")

    def doc(self, obj) -> None:
        self.line(json.dumps(obj, sort_keys=False, separators=(",", ":"), default=str))

    def close(self) -> None:
        if self.fh is not sys.stdout:
            self.fh.close()
        else:
            self.fh.flush()


def run_config(args, extra: dict | None = None) -> dict:
    skip = {"func", "files", "output", "cmd"}
    params = {k: v for k, v in vars(args).items() if k not in skip}
    cfg = {"subcommand": args.cmd, "version": __version__, "backend": _accel.BACKEND,
           "parameters": params}
    if extra:
        cfg.update(extra)
    return cfg


# -- subcommands --------------------------------------------------------------

def cmd_construct(args, out: Output) -> int:
    if args.s_bn:
        n, b = args.s_bn
        g = construct_s_bn(n, b)
    elif args.blowup:
        g = blowup(PRISM, args.blowup)
    else:
        g = balanced_bipartite(args.bipartite)
    out.line(write_graph6(g))
    return EXIT_OK


def cmd_invariants(args, out: Output) -> int:
    cfg = run_config(args)
    for g in read_graphs(args.files):
        out.doc({**invariant_report(g).to_json(), "config": cfg})
    return EXIT_OK


def cmd_check_bn(args, out: Output) -> int:
    cfg = run_config(args)
    code = EXIT_OK
    if args.random:
        lo, hi = args.random_n
        rep = bn_random_batch(args.random, args.seed, lo, hi)
        out.doc({**rep, "config": cfg})
        return EXIT_VIOLATION if rep["violations"] else EXIT_OK
    for g in read_graphs(args.files):
        r = bn_inequality(g)
        out.doc({"graph": write_graph6(g), "n": g.n, "lhs": r.lhs, "rhs": r.rhs,
                 "holds": r.holds, "config": cfg})
        if not r.holds:
            code = EXIT_VIOLATION
    return code


def cmd_verify_blowups(args, out: Output) -> int:
    cfg = run_config(args)
    lo, hi = args.n
    code = EXIT_OK
    if args.b is not None:
        if lo != hi:
            raise UsageError("--b needs a single --n value")
        try:
            check_conjecture_range(lo, args.b)
        except GraphError as err:
            raise UsageError(str(err)) from None
        verdicts = scan_blowups(lo, [args.b], args.workers)
    else:
        verdicts = verify_range(lo, hi, args.workers)
    for v in verdicts:
        doc = v.to_json()
        out.doc({**doc, "config": cfg})
        if not (doc["conjecture_holds_in_class"] and doc["minimizers_are_extremal_orbit"]):
            code = EXIT_VIOLATION
    return code


def cmd_adjust_trace(args, out: Output) -> int:
    if len(args.a) != 6:
        raise UsageError("--a needs six entries")
    try:
        fn = full_adjustment if args.full else adjust_a2_to_a1
        trace = fn(PartVector(args.a), args.b, args.r)
    except CalculusError as err:
        raise UsageError(str(err)) from None
    doc = trace.to_json()
    ok = trace.f_nonincreasing() and trace.h2_nondecreasing() if not args.full else True
    out.doc({**doc, "monotone": ok, "config": run_config(args)})
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_identity_suite(args, out: Output) -> int:
    ids = delta_identity_suite(args.seed, args.trials)
    mono = adjustment_monotonicity_suite(args.seed, args.monotone_trials)
    out.doc({"identities": ids, "monotonicity": mono, "config": run_config(args)})
    bad = ids["mismatch_count"] or mono["failure_count"]
    return EXIT_VIOLATION if bad else EXIT_OK


def _stability_params(args) -> StabilityParams:
    data = load_params(args.params)
    data = data.get("stability", data)
    if args.b is not None:
        data["b"] = args.b
    try:
        return StabilityParams.from_dict(data)
    except (TypeError, ValueError) as err:
        raise UsageError(str(err)) from None


def cmd_decompose(args, out: Output) -> int:
    p = _stability_params(args)
    cfg = run_config(args, {"stability": p.to_json()})
    code = EXIT_OK
    for g in read_graphs(args.files):
        try:
            doc = decompose_prism(g, p).to_json()
        except DecompositionError as err:
            doc = err.to_json()
            code = EXIT_VIOLATION
        out.doc({**doc, "config": cfg})
    return code


def cmd_classify(args, out: Output) -> int:
    p = _stability_params(args)
    cfg = run_config(args, {"stability": p.to_json()})
    code = EXIT_OK
    for g in read_graphs(args.files):
        try:
            dec = decompose_prism(g, p)
        except DecompositionError as err:
            out.doc({**err.to_json(), "config": cfg})
            code = EXIT_VIOLATION
            continue
        split = classify_exceptional(g, dec, p)
        b = default_b(g, p)
        out.doc({"ok": True, "decomposition": dec.to_json(), "split": split.to_json(),
                 "certificate": evaluate_certificate(split, b), "config": cfg})
        if split.phi_violations:
            code = EXIT_VIOLATION
    return code


def cmd_exhaustive(args, out: Output) -> int:
    n = args.n
    edge_min = args.edge_min
    if edge_min is None:
        edge_min = 0 if args.check == ["bn"] else n * n // 4 + 1
    try:
        cfg = ScanConfig(n, edge_min, tuple(args.check), args.chunks or max(1, args.workers))
    except ValueError as err:
        raise UsageError(str(err)) from None
    rep = exhaustive_scan(cfg)
    out.doc({**rep.to_json(), "config": run_config(args, {"scan": cfg.to_json()})})
    return EXIT_VIOLATION if rep.total_violations else EXIT_OK


def cmd_anneal(args, out: Output) -> int:
    data = load_params(args.params)
    data = data.get("anneal", data)
    data.setdefault("workers", args.workers)
    if args.restarts is not None:
        data["restarts"] = args.restarts
    try:
        acfg = AnnealConfig(**data)
        rep = anneal_min_triangles(args.n, args.b, args.seed, args.iters, acfg)
    except (TypeError, ValueError) as err:
        raise UsageError(str(err)) from None
    out.doc({**rep.to_json(), "config": run_config(args)})
    return EXIT_VIOLATION if rep.counterexample_found else EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed (fixed default)")
    common.add_argument("--workers", type=int, default=_accel.default_workers(),
                        help="parallel workers (env BOOKTRI_WORKERS)")
    common.add_argument("--params", help="JSON or TOML parameter override file")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    ap = argparse.ArgumentParser(prog="booktri", description="Books versus triangles workbench.")
    ap.add_argument("--version", action="version", version=f"booktri {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("construct", parents=[common], help="emit graph6 for a named construction")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--s-bn", nargs=2, type=int, metavar=("N", "B"))
    g.add_argument("--blowup", type=int_list, metavar="A1,..,A6", help="prism blow-up part sizes")
    g.add_argument("--bipartite", type=int, metavar="N", help="balanced complete bipartite graph")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("invariants", parents=[common], help="invariant report per graph6 line")
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("check-bn", parents=[common], help="both sides of the BN inequality")
    p.add_argument("files", nargs="*")
    p.add_argument("--random", type=int, metavar="COUNT", help="check COUNT seeded random graphs instead")
    p.add_argument("--random-n", type=int_range, default=(8, 64), metavar="A..B")
    p.set_defaults(func=cmd_check_bn)

    p = sub.add_parser("verify-blowups", parents=[common], help="conjecture inside prism blow-ups")
    p.add_argument("--n", type=int_range, required=True, metavar="N|A..B")
    p.add_argument("--b", type=int)
    p.set_defaults(func=cmd_verify_blowups)

    p = sub.add_parser("adjust-trace", parents=[common], help="trace the a2-to-a1 adjustment")
    p.add_argument("--a", type=lambda s: [number(x) for x in s.split(",")], required=True,
                   metavar="A1,..,A6")
    p.add_argument("--b", type=number, required=True)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--full", action="store_true", help="sort, adjust, equalize and case transform")
    p.set_defaults(func=cmd_adjust_trace)

    p = sub.add_parser("identity-suite", parents=[common], help="closed-form deltas and monotonicity")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--monotone-trials", type=int, default=1000)
    p.set_defaults(func=cmd_identity_suite)

    for name, func, text in (("decompose", cmd_decompose, "six-part prism decomposition"),
                             ("classify", cmd_classify, "exceptional split and certificate")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("files", nargs="*")
        p.add_argument("--b", type=int, help="book bound (default: the graph's book number)")
        p.set_defaults(func=func)

    p = sub.add_parser("exhaustive", parents=[common], help="all graphs on n <= 8 vertices")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--check", type=lambda s: [x.strip() for x in s.split(",") if x.strip()],
                   default=["bn"], metavar="bn,rademacher,edwards")
    p.add_argument("--edge-min", type=int,
                   help="edge prefilter (default 0 for bn alone, else floor(n^2/4)+1)")
    p.add_argument("--chunks", type=int)
    p.set_defaults(func=cmd_exhaustive)

    p = sub.add_parser("anneal", parents=[common], help="annealing search for few triangles")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--iters", type=int, default=10**6)
    p.add_argument("--restarts", type=int)
    p.set_defaults(func=cmd_anneal)
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.workers < 1:
        print("booktri: error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    out = Output(args.output)
    try:
        return args.func(args, out)
    except (UsageError, GraphError, Graph6Error, OSError) as err:
        sys.stderr.write(ap.format_usage())
        print(f"booktri {args.cmd}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        out.close()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
