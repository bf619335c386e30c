"""Instances, bundles and allocations.

Bundles are plain ``int`` bitmasks: bit ``j`` set means good ``j`` is in the
bundle. An allocation is a tuple of ``n`` disjoint masks covering all goods.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, InstanceError, ParseError, enumeration_budget

Bundle = int
Row = tuple[int, ...]


def mask_of(goods: Iterable[int]) -> Bundle:
    """Bitmask for a collection of good indices (duplicates collapse)."""
    mask = 0
    for g in goods:
        if g < 0:
            raise ValueError(f"negative good index {g}")
        mask |= 1 << g
    return mask


def goods_of(mask: Bundle) -> list[int]:
    """Ascending good indices in ``mask``."""
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def submasks(mask: Bundle) -> Iterator[Bundle]:
    """Every submask of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@lru_cache(maxsize=4096)
def subset_sums(row: Row) -> tuple[int, ...]:
    """``sums[mask]`` is the additive value of ``mask`` under ``row``."""
    m = len(row)
    sums = [0] * (1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + row[low.bit_length() - 1]
    return tuple(sums)


def row_value(row: Sequence[int], mask: Bundle) -> int:
    total = 0
    j = 0
    while mask:
        if mask & 1:
            total += row[j]
        mask >>= 1
        j += 1
    return total


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[tuple[str, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Instance:
    """Additive integer valuations of ``n`` agents over ``m`` goods.

    Construction does not validate; use :func:`make_instance` or
    :func:`parse_instance` for checked instances, or :func:`validate` to
    inspect an arbitrary one.
    """

    values: tuple[Row, ...]
    names: tuple[str, ...] | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.values[0]) if self.values else 0

    @property
    def total(self) -> int:
        return sum(self.values[0]) if self.values else 0

    @property
    def full(self) -> Bundle:
        return (1 << self.m) - 1

    def sums(self, agent: int) -> tuple[int, ...]:
        """Subset-sum table of one agent (length ``2**m``)."""
        return subset_sums(self.values[agent])

    def with_row(self, agent: int, row: Sequence[int]) -> Instance:
        """Copy of the instance with one agent's report replaced."""
        values = list(self.values)
        values[agent] = tuple(row)
        return Instance(tuple(values), self.names)

    def label(self, good: int) -> str:
        if self.names is not None:
            return self.names[good]
        return f"g{good + 1}"


def validate(inst: Instance) -> ValidationReport:
    violations: list[tuple[str, str]] = []
    rows = inst.values
    if len(rows) < 2:
        violations.append(("agents", f"need at least 2 agents, got {len(rows)}"))
    if not rows:
        return ValidationReport(tuple(violations))
    m = len(rows[0])
    if m < 1:
        violations.append(("goods", "need at least 1 good"))
    for i, row in enumerate(rows):
        if len(row) != m:
            violations.append(("shape", f"agent {i} has {len(row)} values, expected {m}"))
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, int):
                violations.append(("integer", f"agent {i}, good {j}: {x!r} is not an integer"))
            elif x <= 0:
                violations.append(("positivity", f"agent {i}, good {j}"))
    if any(v[0] == "integer" for v in violations):
        return ValidationReport(tuple(violations))
    totals = [sum(row) for row in rows]
    if len(set(totals)) > 1:
        shown = " vs ".join(str(t) for t in totals)
        violations.append(("equal-total", f"row sums differ ({shown})"))
    if m >= 1 and totals and totals[0] < m:
        violations.append(("total", f"total {totals[0]} is below the number of goods {m}"))
    if inst.names is not None and len(inst.names) != m:
        violations.append(("names", f"{len(inst.names)} names for {m} goods"))
    return ValidationReport(tuple(violations))


def make_instance(values: Iterable[Iterable[int]], names: Sequence[str] | None = None) -> Instance:
    """Build an instance and raise :class:`InstanceError` if invalid."""
    inst = Instance(
        tuple(tuple(row) for row in values),
        tuple(names) if names is not None else None,
    )
    report = validate(inst)
    if not report.ok:
        raise InstanceError(report)
    return inst


def parse_instance(raw: str | bytes) -> Instance:
    """Parse a JSON instance document ``{"values": [[...], ...], "names": [...]}``."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("expected a JSON object", "$")
    if "values" not in doc:
        raise ParseError("missing key 'values'", "$")
    values = doc["values"]
    if not isinstance(values, list) or not values:
        raise ParseError("expected a non-empty list of rows", "$.values")
    rows = []
    for i, row in enumerate(values):
        if not isinstance(row, list):
            raise ParseError("expected a list of integers", f"$.values[{i}]")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, int):
                raise ParseError(f"expected an integer, got {x!r}", f"$.values[{i}][{j}]")
        rows.append(row)
    names = doc.get("names")
    if names is not None:
        if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
            raise ParseError("expected a list of strings", "$.names")
    return make_instance(rows, names)


def dump_instance(inst: Instance) -> str:
    doc: dict = {"values": [list(row) for row in inst.values]}
    if inst.names is not None:
        doc["names"] = list(inst.names)
    return json.dumps(doc, sort_keys=True)


def _check_agent(inst: Instance, agent: int) -> None:
    if not 0 <= agent < inst.n:
        raise IndexError(f"agent {agent} out of range for {inst.n} agents")


def _check_bundle(inst: Instance, b: Bundle) -> None:
    if b < 0 or b >> inst.m:
        raise IndexError(f"bundle {goods_of(b) if b >= 0 else b} has goods outside 0..{inst.m - 1}")


def bundle_value(inst: Instance, agent: int, b: Bundle) -> int:
    _check_agent(inst, agent)
    _check_bundle(inst, b)
    return row_value(inst.values[agent], b)


@dataclass(frozen=True)
class Allocation:
    """Ordered partition of the goods; ``bundles[i]`` is agent ``i``'s mask."""

    bundles: tuple[Bundle, ...]

    @classmethod
    def from_lists(cls, lists: Sequence[Iterable[int]], m: int | None = None) -> Allocation:
        alloc = cls(tuple(mask_of(goods) for goods in lists))
        if m is not None:
            alloc.check(m)
        return alloc

    def to_lists(self) -> list[list[int]]:
        return [goods_of(b) for b in self.bundles]

    def check(self, m: int, n: int | None = None) -> None:
        """Raise ``ValueError`` unless this is an ordered partition of ``m`` goods."""
        if n is not None and len(self.bundles) != n:
            raise ValueError(f"allocation has {len(self.bundles)} bundles for {n} agents")
        seen = 0
        for i, b in enumerate(self.bundles):
            if b & seen:
                raise ValueError(f"bundle {i} overlaps an earlier bundle on {goods_of(b & seen)}")
            seen |= b
        if seen != (1 << m) - 1:
            missing = goods_of(((1 << m) - 1) & ~seen)
            extra = goods_of(seen >> m << m)
            raise ValueError(f"bundles do not partition the goods (missing {missing}, out of range {extra})")

    def utilities(self, inst: Instance) -> tuple[int, ...]:
        return tuple(inst.sums(i)[b] for i, b in enumerate(self.bundles))

    def __len__(self) -> int:
        return len(self.bundles)

    def __getitem__(self, agent: int) -> Bundle:
        return self.bundles[agent]


def allocation_count(n: int, m: int) -> int:
    return n**m


def require_budget(n: int, m: int, what: str = "allocation enumeration") -> None:
    budget = enumeration_budget()
    required = allocation_count(n, m)
    if required > budget:
        raise BudgetExceeded(what, required, budget)


def iter_assignments(n: int, m: int) -> Iterator[tuple[Bundle, ...]]:
    """Mask tuples of every allocation, ascending by assignment vector.

    The assignment vector gives each good its owner; good 0 is the least
    significant digit.
    """
    bits = [1 << j for j in range(m)]
    for digits in product(range(n), repeat=m):
        masks = [0] * n
        for j, owner in enumerate(reversed(digits)):
            masks[owner] |= bits[j]
        yield tuple(masks)


def enumerate_allocations(inst: Instance) -> Iterator[Allocation]:
    require_budget(inst.n, inst.m)
    for masks in iter_assignments(inst.n, inst.m):
        yield Allocation(masks)


def iter_candidate_masks(n: int, m: int) -> Iterator[tuple[Bundle, ...]]:
    """All allocations as mask tuples, in whatever order is fastest.

    Only for searches whose result does not depend on visiting order.
    """
    require_budget(n, m)
    if n == 2:
        full = (1 << m) - 1
        for a in range(full + 1):
            yield (a, full ^ a)
    else:
        yield from iter_assignments(n, m)


def argmax_allocation(inst: Instance, key) -> Allocation:
    """Allocation maximising ``key(masks)``; ties go to the smallest mask tuple."""
    best_key = None
    best_masks = None
    for masks in iter_candidate_masks(inst.n, inst.m):
        k = key(masks)
        if best_key is None or k > best_key or (k == best_key and masks < best_masks):
            best_key, best_masks = k, masks
    return Allocation(best_masks)
