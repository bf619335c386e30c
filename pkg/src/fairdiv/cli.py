"""Command-line interface: ``fairdiv allocate|check|audit|paper-tables|bench``.

Exit codes: 0 success / all properties hold, 1 a property or reproduction
check failed, 2 invalid input, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from fractions import Fraction
from typing import Sequence

from .allocators import AllocatorId, valid_allocator_names
from .errors import BudgetExceeded, FairDivError, InstanceError, ParseError
from .fairness import check_beta_po, check_ef1, check_efx, check_pmms_definition, check_pmms_rank
from .generate import random_instance
from .model import Allocation, Instance, parse_instance
from .ranks import full_ranks
from .reporting import decimal_string, dumps
from .stability import EXHAUSTIVE, SAMPLE, NeighborSpec, audit_stability
from .tables import REPRODUCERS

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

PROPERTIES = {
    "ef1": lambda inst, a, beta: check_ef1(inst, a),
    "efx": lambda inst, a, beta: check_efx(inst, a),
    "pmms": lambda inst, a, beta: check_pmms_definition(inst, a),
    "pmms-rank": lambda inst, a, beta: check_pmms_rank(inst, a),
    "po": lambda inst, a, beta: check_beta_po(inst, a, 1),
    "beta-po": lambda inst, a, beta: check_beta_po(inst, a, beta),
}


class UsageError(FairDivError):
    pass


def _algo(text: str) -> AllocatorId:
    try:
        return AllocatorId.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _props(text: str) -> list[str]:
    names = [p.strip().lower() for p in text.split(",") if p.strip()]
    bad = [p for p in names if p not in PROPERTIES]
    if bad or not names:
        raise UsageError(f"unknown properties {bad}; valid: {', '.join(PROPERTIES)}")
    return names


def _beta(text: str) -> Fraction:
    try:
        beta = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--beta must be a rational number, got {text!r}") from None
    if beta < 1:
        raise UsageError(f"--beta must be at least 1, got {text}")
    return beta


def _read_instance(path: str) -> Instance:
    if path == "-":
        return parse_instance(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(raw)


def _read_allocation(text: str, inst: Instance) -> Allocation:
    try:
        lists = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"allocation line {exc.lineno} column {exc.colno}") from None
    if not isinstance(lists, list) or not all(
        isinstance(b, list) and all(isinstance(g, int) and not isinstance(g, bool) for g in b) for b in lists
    ):
        raise ParseError("expected a list of good-index lists", "allocation")
    if len(lists) != inst.n:
        raise ParseError(f"{len(lists)} bundles for {inst.n} agents", "allocation")
    try:
        return Allocation.from_lists(lists, inst.m)
    except ValueError as exc:
        raise ParseError(str(exc), "allocation") from None


def _emit(doc) -> None:
    sys.stdout.write(dumps(doc) + "\n")


def cmd_allocate(args) -> int:
    algo = _algo(args.algo)
    inst = _read_instance(args.instance)
    alloc = algo(inst)
    ranks = [full_ranks(inst.values[i])[b] for i, b in enumerate(alloc.bundles)]
    _emit({"algo": str(algo), "bundles": alloc.to_lists(), "utilities": list(alloc.utilities(inst)), "ranks": ranks})
    return EXIT_OK


def cmd_check(args) -> int:
    props = _props(args.props)
    beta = _beta(args.beta)
    inst = _read_instance(args.instance)
    alloc = _read_allocation(args.allocation, inst)
    verdicts = [PROPERTIES[p](inst, alloc, beta) for p in props]
    holds = all(v.holds for v in verdicts)
    _emit({"allocation": alloc.to_lists(), "holds": holds, "verdicts": verdicts})
    return EXIT_OK if holds else EXIT_FAIL


def _write_csv(path: str, report, inst: Instance) -> None:
    m, n = inst.m, inst.n
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(
            [f"v{g}" for g in range(m)]
            + ["l1", "true_utility"]
            + [f"reported_u{i}" for i in range(n)]
            + ["ratio_num", "ratio_den", "ratio_decimal"]
        )
        for o in report.outcomes:
            if o.ratio is None:
                ratio = ["", "", "unbounded"]
            else:
                ratio = [o.ratio.numerator, o.ratio.denominator, decimal_string(o.ratio)]
            w.writerow([*o.report, o.distance, o.true_utility, *o.reported_utilities, *ratio])


def cmd_audit(args) -> int:
    algo = _algo(args.algo)
    if args.alpha < 1:
        raise UsageError("--alpha must be at least 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    inst = _read_instance(args.instance)
    if not 0 <= args.agent < inst.n:
        raise UsageError(f"--agent {args.agent} out of range for {inst.n} agents")
    try:
        spec = NeighborSpec(
            agent=args.agent, alpha=args.alpha, mode=args.mode, samples=args.samples,
            seed=args.seed, ordinal=not args.any_order,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = audit_stability(algo, inst, spec, jobs=args.jobs)
    if args.csv:
        _write_csv(args.csv, report, inst)
    _emit(report.to_json())
    return EXIT_OK


def cmd_paper_tables(args) -> int:
    result = REPRODUCERS[args.which]()
    _emit(result)
    if not result["ok"]:
        for item in result["checks"]:
            if not item["ok"]:
                print(f"check failed: {item['check']}: got {item['actual']!r}, expected {item['expected']!r}",
                      file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _sizes(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        try:
            n, m = (int(x) for x in part.lower().split("x"))
        except ValueError:
            raise UsageError(f"--sizes entries look like 2x6, got {part!r}") from None
        if n < 2 or m < 1:
            raise UsageError(f"size {part!r} needs n >= 2 and m >= 1")
        out.append((n, m))
    return out


def cmd_bench(args) -> int:
    algo = _algo(args.algo)
    sizes = _sizes(args.sizes)
    if args.family not in ("random", "identical"):
        raise UsageError("--family must be 'random' or 'identical'")
    rng = random.Random(args.seed)
    rows = []
    for n, m in sizes:
        insts = [
            random_instance(rng, n, m, rng.randint(m, max(m, args.max_total)), args.family == "identical")
            for _ in range(args.count)
        ]
        start = time.perf_counter()
        for inst in insts:
            algo(inst)
        elapsed = time.perf_counter() - start
        rows.append({"n": n, "m": m, "instances": args.count, "seconds": round(elapsed, 6)})
    _emit({"algo": str(algo), "family": args.family, "seed": args.seed, "results": rows})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    algos = ", ".join(valid_allocator_names())
    parser = argparse.ArgumentParser(prog="fairdiv", description="Exact fair division with stability audits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="run an allocator on an instance file")
    p.add_argument("--algo", required=True, help=f"one of: {algos}")
    p.add_argument("instance", help="instance JSON path, or - for stdin")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("check", help="check fairness/efficiency properties of an allocation")
    p.add_argument("--props", required=True, help=f"comma list of: {', '.join(PROPERTIES)}")
    p.add_argument("--beta", default="1", help="factor for beta-po (rational, e.g. 5/2)")
    p.add_argument("instance")
    p.add_argument("allocation", help="JSON list of good-index lists, e.g. '[[0],[1]]'")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("audit", help="stability audit over an agent's alpha-neighbourhood")
    p.add_argument("--algo", required=True, help=f"one of: {algos}")
    p.add_argument("--agent", type=int, required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--mode", choices=[EXHAUSTIVE, SAMPLE], default=EXHAUSTIVE)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", metavar="PATH", help="write one row per neighbour")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--any-order", action="store_true", help="drop the singleton-order condition on misreports")
    p.add_argument("instance")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("paper-tables", help="reproduce the worked example tables")
    p.add_argument("which", type=int, choices=sorted(REPRODUCERS))
    p.set_defaults(func=cmd_paper_tables)

    p = sub.add_parser("bench", help="time an allocator on random instances")
    p.add_argument("--algo", default="rank-leximin")
    p.add_argument("--family", default="random", help="random or identical")
    p.add_argument("--sizes", default="2x4,2x6,2x8,3x5", help="comma list of NxM")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--max-total", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"fairdiv: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ParseError, InstanceError) as exc:
        print(f"fairdiv: {exc}", file=sys.stderr)
        return EXIT_INPUT
