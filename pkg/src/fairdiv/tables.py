"""Hard-coded example instances and checks that reproduce their phenomena.

Goods are 0-based here; reports also carry the 1-based ``g<k>`` labels.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .allocators import leximin_allocate, mnw_allocate
from .fairness import check_beta_po, check_ef1
from .model import Allocation, Instance, enumerate_allocations, make_instance
from .stability import NeighborSpec, audit_stability, l1_distance, same_singleton_order


def table1a() -> Instance:
    return make_instance([[104, 273, 186, 437], [162, 250, 240, 348]])


def table1b() -> Instance:
    return make_instance([[105, 271, 186, 438], [162, 250, 240, 348]])


def table2a(total: int = 1000) -> Instance:
    return make_instance([[total - 1, 1], [total - 2, 2]])


def table2b(total: int = 1000) -> Instance:
    return make_instance([[total - 3, 3], [total - 2, 2]])


def table3a(total: int = 9) -> Instance:
    if total % 9:
        raise ValueError(f"total must be a multiple of 9, got {total}")
    third, two_ninths = total // 3, 2 * total // 9
    row = [third, two_ninths, two_ninths, two_ninths]
    return make_instance([row, row])


def table3b(total: int = 9) -> Instance:
    """Agent B's misreport: almost everything on the first good."""
    a = table3a(total)
    return make_instance([a.values[0], [total - 3, 1, 1, 1]])


def _labels(alloc: Allocation) -> list[list[str]]:
    return [[f"g{g + 1}" for g in goods] for goods in alloc.to_lists()]


class _Checks:
    def __init__(self):
        self.items: list[dict[str, Any]] = []

    def expect(self, name: str, actual, expected) -> None:
        self.items.append({"check": name, "actual": actual, "expected": expected, "ok": actual == expected})

    def truth(self, name: str, ok: bool, detail=None) -> None:
        self.items.append({"check": name, "actual": detail, "expected": None, "ok": bool(ok)})

    @property
    def ok(self) -> bool:
        return all(item["ok"] for item in self.items)


def reproduce_table1() -> dict[str, Any]:
    a, b = table1a(), table1b()
    truthful = mnw_allocate(a)
    mistaken = mnw_allocate(b)
    u_true = a.sums(0)[truthful.bundles[0]]
    u_mistake = a.sums(0)[mistaken.bundles[0]]
    loss = Fraction(u_true - u_mistake, u_true)
    c = _Checks()
    c.expect("mnw on original instance", truthful.to_lists(), [[1, 3], [0, 2]])
    c.expect("mnw on mistaken report", mistaken.to_lists(), [[3], [0, 1, 2]])
    c.expect("agent A true utility, truthful", u_true, 710)
    c.expect("agent A true utility, mistaken", u_mistake, 437)
    c.expect("relative utility loss", loss, Fraction(273, 710))
    c.expect("max per-good deviation of the mistake", max(abs(x - y) for x, y in zip(a.values[0], b.values[0])), 2)
    c.truth("truthful mnw allocation is EF1", check_ef1(a, truthful).holds)
    c.truth("truthful mnw allocation is PO", check_beta_po(a, truthful).holds)
    return {
        "table": 1,
        "instances": {"original": [list(r) for r in a.values], "mistake": [list(r) for r in b.values]},
        "allocations": {"original": truthful.to_lists(), "mistake": mistaken.to_lists()},
        "labels": {"original": _labels(truthful), "mistake": _labels(mistaken)},
        "utility_true": u_true,
        "utility_mistake": u_mistake,
        "loss": loss,
        "checks": c.items,
        "ok": c.ok,
    }


def reproduce_table2(total: int = 1000) -> dict[str, Any]:
    a, b = table2a(total), table2b(total)
    c = _Checks()
    ratios = {}
    for name, algo in (("leximin", leximin_allocate), ("mnw", mnw_allocate)):
        out_a, out_b = algo(a), algo(b)
        c.expect(f"{name} on original instance", out_a.to_lists(), [[0], [1]])
        c.expect(f"{name} on mistaken report", out_b.to_lists(), [[1], [0]])
        ratio = Fraction(a.sums(0)[out_b.bundles[0]], a.sums(0)[out_a.bundles[0]])
        c.expect(f"{name} true-utility ratio", ratio, Fraction(1, total - 1))
        report = audit_stability(name, a, NeighborSpec(agent=0, alpha=4))
        c.expect(f"{name} audit worst low ratio at alpha=4", report.worst_low_ratio, Fraction(1, total - 1))
        ratios[name] = report.worst_low_ratio
    c.truth("mistake is a 4-neighbour", l1_distance(a.values[0], b.values[0]) <= 4
            and same_singleton_order(a.values[0], b.values[0]))
    for name in ("rank-leximin", "modified:leximin"):
        report = audit_stability(name, a, NeighborSpec(agent=0, alpha=4))
        c.expect(f"{name} audit epsilon at alpha=4", report.epsilon, Fraction(1))
        ratios[name] = report.worst_low_ratio
    return {
        "table": 2,
        "total": total,
        "instances": {"original": [list(r) for r in a.values], "mistake": [list(r) for r in b.values]},
        "worst_low_ratios": ratios,
        "checks": c.items,
        "ok": c.ok,
    }


def reproduce_table3(total: int = 9) -> dict[str, Any]:
    a, b = table3a(total), table3b(total)
    c = _Checks()
    ef1 = [alloc for alloc in enumerate_allocations(a) if check_ef1(a, alloc).holds]
    c.truth("every EF1 allocation gives each agent two goods",
            all(bin(x).count("1") == 2 for alloc in ef1 for x in alloc.bundles), len(ef1))
    outcome = Allocation.from_lists([[0, 3], [1, 2]], a.m)
    dominating = Allocation.from_lists([[1, 2, 3], [0]], a.m)
    before, after = outcome.utilities(b), dominating.utilities(b)
    c.truth("every agent weakly gains", all(x >= y for x, y in zip(after, before)), [before, after])
    factor = max(Fraction(x, y) for x, y in zip(after, before))
    c.expect("dominance factor", factor, Fraction(total - 3, 2))
    verdict = check_beta_po(b, outcome, 1)
    c.expect("PO check finds the dominating allocation", verdict.witness and verdict.witness["dominating"],
             dominating.to_lists())
    below = check_beta_po(b, outcome, factor - Fraction(1, 10))
    c.truth("not beta-PO for beta just below the factor", not below.holds)
    distance = l1_distance(a.values[1], b.values[1])
    c.truth("misreport within L1 distance 4T/3", 3 * distance <= 4 * total, distance)
    c.truth("misreport keeps singleton order", same_singleton_order(a.values[1], b.values[1]))
    return {
        "table": 3,
        "total": total,
        "instances": {"original": [list(r) for r in a.values], "mistake": [list(r) for r in b.values]},
        "outcome": outcome.to_lists(),
        "dominating": dominating.to_lists(),
        "labels": {"outcome": _labels(outcome), "dominating": _labels(dominating)},
        "factor": factor,
        "l1_distance": distance,
        "checks": c.items,
        "ok": c.ok,
    }


REPRODUCERS = {1: reproduce_table1, 2: reproduce_table2, 3: reproduce_table3}
