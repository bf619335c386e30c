"""Draft, leximin, maximum Nash welfare and the modified two-phase wrapper.

Enumeration-based allocators share one tie-break: among optimal
allocations, the lexicographically smallest tuple of bundle masks wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Callable, Sequence

from .model import Allocation, Instance, argmax_allocation
from .ranks import rank_leximin_allocate


def draft_allocate(inst: Instance, order: Sequence[int] | None = None) -> Allocation:
    """Agents take turns picking their favourite remaining good.

    ``order`` is the picking sequence, cycled until the goods run out;
    the default is 0, 1, ..., n-1 repeated. Ties go to the lowest good index.
    """
    if order is None:
        order = range(inst.n)
    order = list(order)
    if not order:
        raise ValueError("picking order is empty")
    for agent in order:
        if not 0 <= agent < inst.n:
            raise IndexError(f"agent {agent} in picking order is out of range")
    remaining = list(range(inst.m))
    masks = [0] * inst.n
    turn = 0
    while remaining:
        agent = order[turn % len(order)]
        row = inst.values[agent]
        g = max(remaining, key=row.__getitem__)
        remaining.remove(g)
        masks[agent] |= 1 << g
        turn += 1
    return Allocation(tuple(masks))


def leximin_allocate(inst: Instance) -> Allocation:
    sums = [inst.sums(i) for i in range(inst.n)]

    def key(masks):
        return sorted(s[b] for s, b in zip(sums, masks))

    return argmax_allocation(inst, key)


def mnw_allocate(inst: Instance) -> Allocation:
    """Maximum Nash welfare: most agents with positive utility, then the largest product."""
    sums = [inst.sums(i) for i in range(inst.n)]

    def key(masks):
        positive = [u for u in (s[b] for s, b in zip(sums, masks)) if u > 0]
        return (len(positive), prod(positive))

    return argmax_allocation(inst, key)


def phase_one_good(inst: Instance) -> int | None:
    """Lowest-index good that agent 0 values above half the total, if any."""
    row = inst.values[0]
    for g, x in enumerate(row):
        if 2 * x > inst.total:
            return g
    return None


def modified_wrap(inner: Callable[[Instance], Allocation] | AllocatorId | str, inst: Instance) -> Allocation:
    if inst.n != 2:
        raise ValueError(f"the modified wrapper needs exactly 2 agents, got {inst.n}")
    g = phase_one_good(inst)
    if g is not None:
        mine = 1 << g
        return Allocation((mine, inst.full ^ mine))
    if isinstance(inner, str):
        inner = AllocatorId.parse(inner)
    return inner(inst)


BASE_ALLOCATORS: dict[str, Callable[[Instance], Allocation]] = {
    "draft": draft_allocate,
    "leximin": leximin_allocate,
    "mnw": mnw_allocate,
    "rank-leximin": rank_leximin_allocate,
}


@dataclass(frozen=True)
class AllocatorId:
    """Named allocator, optionally inside the modified wrapper (``modified:<name>``)."""

    name: str
    modified: bool = False

    @classmethod
    def parse(cls, text: str | AllocatorId) -> AllocatorId:
        if isinstance(text, AllocatorId):
            return text
        name = text.strip()
        modified = False
        if name.startswith("modified:"):
            modified = True
            name = name[len("modified:"):]
        if name not in BASE_ALLOCATORS:
            valid = ", ".join(valid_allocator_names())
            raise ValueError(f"unknown allocator {text!r}; valid: {valid}")
        return cls(name, modified)

    def __str__(self) -> str:
        return f"modified:{self.name}" if self.modified else self.name

    def __call__(self, inst: Instance) -> Allocation:
        base = BASE_ALLOCATORS[self.name]
        if self.modified:
            return modified_wrap(base, inst)
        return base(inst)


def valid_allocator_names() -> list[str]:
    names = list(BASE_ALLOCATORS)
    return names + [f"modified:{n}" for n in names]


def run_allocator(allocator: AllocatorId | str, inst: Instance) -> Allocation:
    return AllocatorId.parse(allocator)(inst)
