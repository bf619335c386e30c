"""Stability audits: how much an agent's true utility moves under small misreports.

A misreport of row ``v`` is an ``alpha``-neighbour when it keeps the total,
keeps the weak order over single goods, stays strictly positive and lies
within L1 distance ``alpha``. Audits rerun an allocator on every neighbour
and compare the audited agent's *true* utility against the truthful run.
All ratios are exact fractions.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .allocators import AllocatorId
from .errors import BUNDLE_ORDER_BUDGET, DEFAULT_NEIGHBOR_BUDGET, BudgetExceeded, enumeration_budget
from .model import Allocation, Instance, Row, goods_of, subset_sums
from .reporting import fraction_json

EXHAUSTIVE = "exhaustive"
SAMPLE = "sample"


@dataclass(frozen=True)
class NeighborSpec:
    agent: int
    alpha: int
    mode: str = EXHAUSTIVE
    samples: int = 100
    seed: int = 0
    floor: int = 1
    # False drops the singleton-order condition (any misreport within L1 alpha)
    ordinal: bool = True

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError(f"alpha must be at least 1, got {self.alpha}")
        if self.mode not in (EXHAUSTIVE, SAMPLE):
            raise ValueError(f"mode must be {EXHAUSTIVE!r} or {SAMPLE!r}, got {self.mode!r}")
        if self.samples < 1:
            raise ValueError(f"sample count must be at least 1, got {self.samples}")
        if self.floor < 1:
            raise ValueError(f"positivity floor must be at least 1, got {self.floor}")


def l1_distance(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(abs(x - y) for x, y in zip(a, b))


def same_singleton_order(a: Sequence[int], b: Sequence[int]) -> bool:
    """Both rows rank single goods identically, ties included."""
    m = len(a)
    for g in range(m):
        for h in range(g + 1, m):
            if (a[g] >= a[h]) != (b[g] >= b[h]) or (a[h] >= a[g]) != (b[h] >= b[g]):
                return False
    return True


def _is_neighbor(row: Row, cand: Sequence[int], spec: NeighborSpec) -> bool:
    return (
        sum(cand) == sum(row)
        and min(cand) >= spec.floor
        and l1_distance(row, cand) <= spec.alpha
        and (not spec.ordinal or same_singleton_order(row, cand))
    )


def _exhaustive_neighbors(row: Row, spec: NeighborSpec, budget: int) -> list[Row]:
    m = len(row)
    alpha, floor, ordinal = spec.alpha, spec.floor, spec.ordinal
    # a zero-sum shift of L1 size <= alpha moves any one coordinate by <= alpha/2
    half = alpha // 2
    out: list[Row] = []
    cur = [0] * m

    def order_ok(j: int, x: int) -> bool:
        if not ordinal:
            return True
        b = row[j]
        for k in range(j):
            a, c = row[k], cur[k]
            if (a >= b) != (c >= x) or (b >= a) != (x >= c):
                return False
        return True

    def emit() -> None:
        out.append(tuple(cur))
        if len(out) > budget:
            raise BudgetExceeded("neighbour enumeration", len(out), budget, "use sample mode")

    def rec(j: int, used: int, shift: int) -> None:
        if j == m - 1:
            x = row[j] - shift
            if used + abs(shift) <= alpha and x >= floor and order_ok(j, x):
                cur[j] = x
                emit()
            return
        reach = min(half, alpha - used)
        for d in range(-reach, reach + 1):
            x = row[j] + d
            if x < floor:
                continue
            nused = used + abs(d)
            if abs(shift + d) > alpha - nused:
                continue
            if not order_ok(j, x):
                continue
            cur[j] = x
            rec(j + 1, nused, shift + d)

    rec(0, 0, 0)
    return out


def _sampled_neighbors(row: Row, spec: NeighborSpec) -> list[Row]:
    rng = random.Random(spec.seed)
    m = len(row)
    found = {tuple(row)}
    attempts = 0
    max_moves = spec.alpha // 2
    while len(found) < spec.samples and attempts < 50 * spec.samples and max_moves >= 1 and m >= 2:
        attempts += 1
        cand = list(row)
        for _ in range(rng.randint(1, max_moves)):
            src, dst = rng.sample(range(m), 2)
            if cand[src] > spec.floor:
                cand[src] -= 1
                cand[dst] += 1
        if _is_neighbor(row, cand, spec):
            found.add(tuple(cand))
    return sorted(found)


def enumerate_neighbors(inst: Instance, spec: NeighborSpec) -> list[Row]:
    """All (or a seeded sample of) alpha-neighbours of the agent's row, ascending.

    The row itself is always included.
    """
    if not 0 <= spec.agent < inst.n:
        raise IndexError(f"agent {spec.agent} out of range for {inst.n} agents")
    row = inst.values[spec.agent]
    if spec.mode == SAMPLE:
        return _sampled_neighbors(row, spec)
    return _exhaustive_neighbors(row, spec, enumeration_budget(DEFAULT_NEIGHBOR_BUDGET))


def is_ordinally_equivalent(a: Sequence[int], b: Sequence[int]) -> bool:
    """True iff both rows induce the same weak order over all bundles."""
    if len(a) != len(b):
        raise ValueError(f"rows have different lengths ({len(a)} vs {len(b)})")
    if len(a) > BUNDLE_ORDER_BUDGET:
        raise BudgetExceeded("bundle order comparison", len(a), BUNDLE_ORDER_BUDGET, "goods")
    sa = subset_sums(tuple(a))
    sb = subset_sums(tuple(b))
    order = sorted(range(len(sa)), key=sa.__getitem__)
    for p, q in zip(order, order[1:]):
        if sb[p] > sb[q]:
            return False
        if (sa[p] == sa[q]) != (sb[p] == sb[q]):
            return False
    return True


@dataclass(frozen=True)
class EquivalentSample:
    rows: list[Row]
    attempts: int


def generate_equivalent(
    inst: Instance, agent: int, count: int, seed: int = 0, max_attempts: int | None = None
) -> EquivalentSample:
    """Seeded rejection sample of rows with the same total and bundle order.

    The agent's own row comes first. Fewer than ``count`` rows may come back
    when random perturbations rarely preserve the order.
    """
    row = inst.values[agent]
    m = len(row)
    if m > BUNDLE_ORDER_BUDGET:
        raise BudgetExceeded("bundle order comparison", m, BUNDLE_ORDER_BUDGET, "goods")
    rng = random.Random(seed)
    rows = [row]
    seen = {row}
    if max_attempts is None:
        max_attempts = 20 * count
    spread = max(1, inst.total // 10)
    attempts = 0
    while len(rows) < count and attempts < max_attempts and m >= 2:
        attempts += 1
        cand = list(row)
        for _ in range(rng.randint(1, spread)):
            src, dst = rng.sample(range(m), 2)
            if cand[src] > 1:
                cand[src] -= 1
                cand[dst] += 1
        cand = tuple(cand)
        if cand in seen:
            continue
        if is_ordinally_equivalent(row, cand):
            seen.add(cand)
            rows.append(cand)
    return EquivalentSample(rows, attempts)


@dataclass(frozen=True)
class NeighborOutcome:
    report: Row
    distance: int
    allocation: Allocation
    true_utility: int
    reported_utilities: tuple[int, ...]
    ratio: Fraction | None


@dataclass
class StabilityReport:
    allocator: str
    agent: int
    alpha: int
    truthful_allocation: Allocation
    truthful_utility: int
    outcomes: list[NeighborOutcome] = field(repr=False)
    worst_low_ratio: Fraction | None
    worst_high_ratio: Fraction | None
    epsilon: Fraction | None
    exact_stable: bool
    unbounded: bool
    low_witness: NeighborOutcome | None = None
    high_witness: NeighborOutcome | None = None
    mode: str = EXHAUSTIVE

    @property
    def neighbor_count(self) -> int:
        return len(self.outcomes)

    def to_json(self) -> dict[str, Any]:
        def witness(o: NeighborOutcome | None):
            if o is None:
                return None
            return {
                "report": list(o.report),
                "allocation": o.allocation.to_lists(),
                "truthful_allocation": self.truthful_allocation.to_lists(),
                "true_utility": o.true_utility,
                "ratio": fraction_json(o.ratio),
            }

        return {
            "allocator": self.allocator,
            "agent": self.agent,
            "alpha": self.alpha,
            "mode": self.mode,
            "truthful_allocation": self.truthful_allocation.to_lists(),
            "truthful_utility": self.truthful_utility,
            "neighbor_count": self.neighbor_count,
            "worst_low_ratio": fraction_json(self.worst_low_ratio),
            "worst_high_ratio": fraction_json(self.worst_high_ratio),
            "epsilon": fraction_json(self.epsilon),
            "exact_stable": self.exact_stable,
            "unbounded": self.unbounded,
            "witnesses": {"low": witness(self.low_witness), "high": witness(self.high_witness)},
        }


def _run_report(job: tuple[AllocatorId, Instance, int, Row]) -> tuple[int, ...]:
    allocator, inst, agent, row = job
    return allocator(inst.with_row(agent, row)).bundles


def audit_stability(
    allocator: AllocatorId | str, inst: Instance, spec: NeighborSpec, jobs: int = 1
) -> StabilityReport:
    allocator = AllocatorId.parse(allocator)
    agent = spec.agent
    true_sums = inst.sums(agent)
    truthful = allocator(inst)
    base = true_sums[truthful.bundles[agent]]
    neighbors = enumerate_neighbors(inst, spec)

    if jobs > 1 and len(neighbors) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk = max(1, len(neighbors) // (4 * jobs))
            results = list(pool.map(_run_report, [(allocator, inst, agent, r) for r in neighbors], chunksize=chunk))
    else:
        results = [_run_report((allocator, inst, agent, r)) for r in neighbors]

    outcomes = []
    row = inst.values[agent]
    for report, masks in zip(neighbors, results):
        profile = inst.with_row(agent, report)
        u = true_sums[masks[agent]]
        outcomes.append(
            NeighborOutcome(
                report=report,
                distance=l1_distance(row, report),
                allocation=Allocation(masks),
                true_utility=u,
                reported_utilities=Allocation(masks).utilities(profile),
                ratio=Fraction(u, base) if base > 0 else None,
            )
        )

    exact = all(o.true_utility == base for o in outcomes)
    if base == 0:
        return StabilityReport(
            str(allocator), agent, spec.alpha, truthful, base, outcomes,
            None, None, None, exact, True, mode=spec.mode,
        )
    low = min(outcomes, key=lambda o: o.ratio)
    high = max(outcomes, key=lambda o: o.ratio)
    if low.ratio == 0:
        epsilon = None
    else:
        epsilon = max(high.ratio, 1 / low.ratio)
    return StabilityReport(
        str(allocator), agent, spec.alpha, truthful, base, outcomes,
        low.ratio, high.ratio, epsilon, exact, epsilon is None,
        low_witness=low, high_witness=high, mode=spec.mode,
    )


@dataclass(frozen=True)
class EquivalenceAudit:
    stable: bool
    truthful_utility: int
    reports_tested: int
    attempts: int
    violations: list[dict[str, Any]]


def check_equiv_stability(
    allocator: AllocatorId | str, inst: Instance, agent: int, count: int = 100, seed: int = 0
) -> EquivalenceAudit:
    """Falsification test: true utility must not change across sampled equivalent reports.

    Passing means no violation was found among the draws, not a proof.
    """
    allocator = AllocatorId.parse(allocator)
    sample = generate_equivalent(inst, agent, count, seed)
    true_sums = inst.sums(agent)
    base = true_sums[allocator(inst).bundles[agent]]
    violations = []
    for row in sample.rows:
        outcome = allocator(inst.with_row(agent, row))
        u = true_sums[outcome.bundles[agent]]
        if u != base:
            violations.append({"report": list(row), "allocation": [goods_of(b) for b in outcome.bundles], "true_utility": u})
    return EquivalenceAudit(not violations, base, len(sample.rows), sample.attempts, violations)
