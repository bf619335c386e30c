"""Seeded random instances with positive integer rows of a common total."""

from __future__ import annotations

import random

from .model import Instance, make_instance


def random_row(rng: random.Random, m: int, total: int) -> list[int]:
    """Uniform random composition of ``total`` into ``m`` positive parts."""
    if total < m:
        raise ValueError(f"total {total} cannot be split into {m} positive parts")
    cuts = sorted(rng.sample(range(1, total), m - 1))
    bounds = [0, *cuts, total]
    return [hi - lo for lo, hi in zip(bounds, bounds[1:])]


def random_instance(rng: random.Random, n: int, m: int, total: int, identical: bool = False) -> Instance:
    if identical:
        row = random_row(rng, m, total)
        return make_instance([row] * n)
    return make_instance([random_row(rng, m, total) for _ in range(n)])


def random_family(
    seed: int,
    count: int,
    agents: tuple[int, ...],
    goods: tuple[int, int],
    max_total: int,
    identical: bool = False,
    min_total: int = 1,
) -> list[Instance]:
    """``count`` instances with n drawn from ``agents``, m from the ``goods`` range, T <= ``max_total``.

    T is at least ``max(m, min_total)``.
    """
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.choice(agents)
        m = rng.randint(*goods)
        total = rng.randint(max(m, min_total), max_total)
        out.append(random_instance(rng, n, m, total, identical))
    return out
