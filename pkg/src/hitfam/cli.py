"""Command-line entry point: ``hitfam gen | verify | bounds | prune | stats``.

Exit codes: 0 success, 1 usage or shape error, 2 unreadable input,
3 budget exceeded, 4 verification failed (missed tuple on stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from collections.abc import Sequence

from . import antichain, basic, doubletree, harness, oracle, patterns
from .errors import (
    CycleError,
    GenerationFailedError,
    HasseError,
    HitfamError,
    InfeasibleError,
    InvalidFamilyError,
    MissingEventError,
    ParseError,
    PoolExhaustedError,
    ShapeError,
    UnsupportedDepthError,
)
from .poset import (
    Family,
    Poset,
    make_antichain,
    make_chain,
    make_chain_plus_event,
    make_complete_tree,
    make_double_tree,
)

EXIT_USAGE, EXIT_PARSE, EXIT_BUDGET, EXIT_UNVERIFIED = 1, 2, 3, 4

SHAPES = ("chain", "antichain", "tree", "doubletree", "chainplus")
METHODS = ("dfs", "warmup", "doubletree", "pattern", "greedy", "random", "pruned", "chainevent")
FILE_METHODS = ("warmup", "pruned", "greedy", "dfs", "doubletree")


class UsageError(HitfamError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _budgets() -> tuple[int, int]:
    """Schedule cap and tuple budget, both overridden by ``HITFAM_BUDGET``."""
    raw = os.environ.get("HITFAM_BUDGET")
    if raw is None:
        return oracle.DEFAULT_CAP, oracle.DEFAULT_TUPLE_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"HITFAM_BUDGET must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("HITFAM_BUDGET must be positive")
    return value, value


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _shape_poset(shape: str, n: int | None, height: int | None) -> Poset:
    if shape in ("tree", "doubletree"):
        if height is None:
            raise UsageError(f"--shape {shape} needs --height")
        return make_complete_tree(height) if shape == "tree" else make_double_tree(height)
    if n is None:
        raise UsageError(f"--shape {shape} needs --n")
    return {"chain": make_chain, "antichain": make_antichain,
            "chainplus": make_chain_plus_event}[shape](n)


def _greedy(p: Poset, d: int, seed: int, cap: int, tuple_budget: int) -> Family:
    """Exact pool when every schedule fits in ``cap``, sampled otherwise."""
    pool = "exact" if oracle.count_schedules(p, cap) is not None else antichain.SampledPool(seed=seed)
    return antichain.greedy_family(p, d, pool, cap, tuple_budget)


def _generate_shape(args, budgets: tuple[int, int]) -> tuple[Family, list[str]]:
    shape, method, d = args.shape, args.method, args.d
    p = _shape_poset(shape, args.n, args.height)
    comments: list[str] = []
    if method == "dfs":
        fam = basic.dfs_family(p)
    elif method == "warmup":
        fam = basic.warmup_family(p, d)
    elif method == "doubletree":
        if d > 3:
            raise UnsupportedDepthError(f"the double-tree construction is 3-hitting, not {d}-hitting")
        if shape == "doubletree":
            m = doubletree.build_M(args.height)
            fam = Family(p, m.rows)
            comments.append(f"M h={m.h} block_width={m.block_width}")
        elif shape == "tree":
            fam = doubletree.tree_family(args.height) if args.height else Family(p, (p.events,))
        elif shape == "antichain":
            h = max(1, math.ceil(math.log2(args.n)))
            fam = doubletree.antichain_family_from_leaves(h, args.n)
        else:
            raise ShapeError(f"method doubletree does not apply to shape {shape}")
    elif method == "pattern":
        if shape != "tree":
            raise ShapeError("method pattern needs --shape tree")
        if args.height == 0:
            fam = Family(p, (p.events,))
        else:
            found = patterns.enumerate_patterns(d, args.height)
            if args.dump_patterns:
                with open(args.dump_patterns, "w", encoding="utf-8") as fh:
                    fh.writelines(pat.serialize() + "\n" for pat in found)
            rows = dict.fromkeys(patterns.schedule_for_pattern(pat) for pat in found)
            fam = Family(p, tuple(rows))
    elif method == "greedy":
        fam = _greedy(p, d, args.seed, *budgets)
    elif method == "random":
        if shape != "antichain":
            raise ShapeError("method random needs --shape antichain")
        fam = antichain.random_family(args.n, d, seed=args.seed)
    elif method == "chainevent":
        if shape != "chainplus":
            raise ShapeError("method chainevent needs --shape chainplus")
        fam = basic.chain_event_family(args.n, d)
    else:
        raise UsageError(f"method {method} needs --poset FILE")
    return fam, comments


def _generate_file(args, budgets: tuple[int, int]) -> Family:
    ap = harness.parse_poset(_read(args.poset), repair=args.repair)
    method = args.method
    if method == "pruned":
        return harness.pruned_family(ap, args.d)
    if method not in FILE_METHODS:
        raise UsageError(f"method {method} does not accept --poset; use one of {', '.join(FILE_METHODS)}")
    if method == "warmup":
        return basic.warmup_family(ap.poset, args.d)
    if method == "greedy":
        return _greedy(ap.poset, args.d, args.seed, *budgets)
    if method == "dfs":
        return basic.dfs_family(ap.poset)
    if args.d > 3:
        raise UnsupportedDepthError(f"the double-tree construction is 3-hitting, not {args.d}-hitting")
    return doubletree.arbitrary_tree_family(ap.poset)


def _verify(p: Poset, rows, d: int, method: str, tuple_budget: int) -> int:
    report = oracle.is_d_hitting(p, rows, d, tuple_budget)
    stats = harness.RunStats(len(p), p.height(), len(rows), method,
                             report.is_hitting, report.admissible_count)
    print(json.dumps(stats.as_dict(), sort_keys=True), file=sys.stderr)
    if not report.is_hitting:
        print("missed tuple: " + " ".join(report.first_missed), file=sys.stderr)
        return EXIT_UNVERIFIED
    return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    budgets = _budgets()
    if (args.poset is None) == (args.shape is None):
        raise UsageError("give exactly one of --shape or --poset")
    if args.d < 2:
        raise UsageError("--d must be >= 2")
    if args.poset is not None:
        fam, comments = _generate_file(args, budgets), []
    else:
        fam, comments = _generate_shape(args, budgets)
    _emit(harness.serialize_family(fam, args.d, comments), args.out)
    if args.verify:
        return _verify(fam.poset, fam.rows, args.d, args.method, budgets[1])
    return 0


def cmd_prune(args) -> int:
    ap = harness.parse_poset(_read(args.poset), repair=args.repair)
    fam = harness.pruned_family(ap, args.d)
    _emit(harness.serialize_family(fam, args.d), args.out)
    return 0


def cmd_verify(args) -> int:
    _, tuple_budget = _budgets()
    ap = harness.parse_poset(_read(args.poset), repair=args.repair)
    header_d, rows = harness.parse_family(_read(args.family), ap.poset)
    d = header_d if args.d is None else args.d
    report = oracle.is_d_hitting(ap.poset, rows, d, tuple_budget)
    print(json.dumps(report.as_dict(), sort_keys=True))
    if not report.is_hitting:
        print("missed tuple: " + " ".join(report.first_missed), file=sys.stderr)
        return EXIT_UNVERIFIED
    return 0


def cmd_bounds(args) -> int:
    if args.shape != "antichain":
        raise UsageError("bounds are available for --shape antichain only")
    report = antichain.bounds_report(args.n, args.d)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def cmd_stats(args) -> int:
    _, tuple_budget = _budgets()
    ap = harness.parse_poset(_read(args.poset), repair=args.repair)
    if args.family is None:
        print(json.dumps(harness.poset_summary(ap), indent=2))
        return 0
    header_d, rows = harness.parse_family(_read(args.family), ap.poset)
    d = header_d if args.d is None else args.d
    verified = admissible = None
    if args.verify:
        report = oracle.is_d_hitting(ap.poset, rows, d, tuple_budget)
        verified, admissible = report.is_hitting, report.admissible_count
    stats = harness.RunStats(len(ap.poset), ap.poset.height(), len(rows),
                             args.method, verified, admissible)
    print(json.dumps(stats.as_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hitfam", description="Generate and verify d-hitting schedule families.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a family")
    gen.add_argument("--shape", choices=SHAPES)
    gen.add_argument("--poset", metavar="FILE")
    gen.add_argument("--n", type=int)
    gen.add_argument("--height", type=int)
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--method", choices=METHODS, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--verify", action="store_true", help="check the family with the oracle")
    gen.add_argument("--out", metavar="FILE")
    gen.add_argument("--repair", action="store_true", help="drop implied edges from --poset")
    gen.add_argument("--dump-patterns", metavar="FILE",
                     help="write the enumerated patterns (method pattern)")
    gen.set_defaults(func=cmd_gen)

    prune = sub.add_parser("prune", help="race-pruned family for an annotated tree")
    prune.add_argument("--poset", metavar="FILE", required=True)
    prune.add_argument("--d", type=int, default=3)
    prune.add_argument("--out", metavar="FILE")
    prune.add_argument("--repair", action="store_true")
    prune.set_defaults(func=cmd_prune)

    verify = sub.add_parser("verify", help="check a family file against a poset file")
    verify.add_argument("--poset", metavar="FILE", required=True)
    verify.add_argument("--family", metavar="FILE", required=True)
    verify.add_argument("--d", type=int)
    verify.add_argument("--repair", action="store_true")
    verify.set_defaults(func=cmd_verify)

    bounds = sub.add_parser("bounds", help="antichain size bounds as JSON")
    bounds.add_argument("--shape", choices=SHAPES, required=True)
    bounds.add_argument("--n", type=int, required=True)
    bounds.add_argument("--d", type=int, required=True)
    bounds.set_defaults(func=cmd_bounds)

    stats = sub.add_parser("stats", help="poset or run statistics as JSON")
    stats.add_argument("--poset", metavar="FILE", required=True)
    stats.add_argument("--family", metavar="FILE")
    stats.add_argument("--d", type=int)
    stats.add_argument("--method", default="file")
    stats.add_argument("--verify", action="store_true")
    stats.add_argument("--repair", action="store_true")
    stats.set_defaults(func=cmd_stats)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, CycleError, HasseError, MissingEventError, InvalidFamilyError) as exc:
        print(f"hitfam: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InfeasibleError, PoolExhaustedError, GenerationFailedError) as exc:
        print(f"hitfam: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (HitfamError, OSError) as exc:
        print(f"hitfam: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
