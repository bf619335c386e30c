"""Subset ranks and the rank-leximin allocator.

The rank of ``S`` over a ground set ``Q`` for an agent is the number of
subsets of ``Q`` the agent values at most as much as ``S``. Rank-leximin
picks the allocation whose sorted vector of full-set ranks is
lexicographically largest.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Sequence

from .errors import RANK_TABLE_BUDGET, BudgetExceeded
from .model import (
    Allocation,
    Bundle,
    Instance,
    Row,
    argmax_allocation,
    goods_of,
    row_value,
    submasks,
    subset_sums,
)


@dataclass(frozen=True)
class RankTable:
    agent: int
    ground: Bundle
    sorted_values: tuple[int, ...]
    row: Row

    def rank_of_value(self, value: int) -> int:
        return bisect_right(self.sorted_values, value)


@lru_cache(maxsize=65536)
def _sorted_subset_values(row: Row, ground: Bundle) -> tuple[int, ...]:
    return tuple(sorted(row_value(row, sub) for sub in submasks(ground)))


def build_rank_table(inst: Instance, agent: int, ground: Bundle | None = None) -> RankTable:
    if ground is None:
        ground = inst.full
    if ground < 0 or ground >> inst.m:
        raise IndexError(f"ground set {goods_of(ground)} has goods outside 0..{inst.m - 1}")
    size = 1 << bin(ground).count("1")
    if size > RANK_TABLE_BUDGET:
        raise BudgetExceeded("rank table", size, RANK_TABLE_BUDGET)
    row = inst.values[agent]
    if ground == inst.full:
        values = tuple(sorted(inst.sums(agent)))
    else:
        values = _sorted_subset_values(row, ground)
    return RankTable(agent, ground, values, row)


def rank(table: RankTable, s: Bundle) -> int:
    if s & ~table.ground:
        raise ValueError(f"bundle {goods_of(s)} is not inside ground set {goods_of(table.ground)}")
    return table.rank_of_value(row_value(table.row, s))


def rank_over(row: Row, ground: Bundle, s: Bundle) -> int:
    """Rank of ``s`` over ``ground`` straight from a valuation row (cached tables)."""
    return bisect_right(_sorted_subset_values(row, ground), row_value(row, s))


@lru_cache(maxsize=4096)
def full_ranks(row: Row) -> tuple[int, ...]:
    """``ranks[mask]`` is the rank of ``mask`` over all goods."""
    sums = subset_sums(row)
    ordered = sorted(sums)
    return tuple(bisect_right(ordered, s) for s in sums)


class Ordering(IntEnum):
    """Outcome of comparing two allocations; usable with ``functools.cmp_to_key``."""

    PRECEDES = -1
    EQUIVALENT = 0
    FOLLOWS = 1


@dataclass(frozen=True)
class RankVector:
    ranks: tuple[int, ...]
    order: tuple[int, ...]

    @property
    def sorted_ranks(self) -> tuple[int, ...]:
        return tuple(self.ranks[i] for i in self.order)


def rank_vector(a: Allocation, tables: Sequence[RankTable]) -> RankVector:
    ranks = tuple(rank(tables[i], b) for i, b in enumerate(a.bundles))
    # stable sort: equal ranks keep ascending agent order
    order = tuple(sorted(range(len(ranks)), key=ranks.__getitem__))
    return RankVector(ranks, order)


def rank_leximin_cmp(p: Allocation, t: Allocation, tables: Sequence[RankTable]) -> Ordering:
    rp = rank_vector(p, tables)
    rt = rank_vector(t, tables)
    for i, j in zip(rp.order, rt.order):
        if rp.ranks[i] != rt.ranks[j]:
            return Ordering.PRECEDES if rp.ranks[i] < rt.ranks[j] else Ordering.FOLLOWS
    return Ordering.EQUIVALENT


def rank_tables(inst: Instance) -> list[RankTable]:
    return [build_rank_table(inst, i) for i in range(inst.n)]


def rank_leximin_allocate(inst: Instance) -> Allocation:
    if (1 << inst.m) > RANK_TABLE_BUDGET:
        raise BudgetExceeded("rank table", 1 << inst.m, RANK_TABLE_BUDGET)
    ranks = [full_ranks(row) for row in inst.values]

    def key(masks):
        return sorted(r[b] for r, b in zip(ranks, masks))

    return argmax_allocation(inst, key)
