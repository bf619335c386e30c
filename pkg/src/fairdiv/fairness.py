"""Exact EF1 / EFX / PMMS / beta-PO checks for a fixed allocation.

Every failing verdict carries a witness that can be re-checked by hand:
the violating agent pair and good, or a dominating allocation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any

from .errors import PAIR_BUDGET, BudgetExceeded
from .model import Allocation, Bundle, Instance, Row, goods_of, iter_assignments, require_budget, row_value, submasks
from .ranks import rank_over

EF1 = "EF1"
EFX = "EFX"
PMMS = "PMMS"
PMMS_RANK = "PMMS-rank"
BETA_PO = "beta-PO"


@dataclass(frozen=True)
class FairnessVerdict:
    property: str
    holds: bool
    witness: dict[str, Any] | None = field(default=None)

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict[str, Any]:
        return {"property": self.property, "holds": self.holds, "witness": self.witness}


def _pairs(n: int):
    for i in range(n):
        for j in range(n):
            if i != j:
                yield i, j


def _envy_check(inst: Instance, a: Allocation, prop: str, pick) -> FairnessVerdict:
    for i, j in _pairs(inst.n):
        other = a.bundles[j]
        if not other:
            continue
        row = inst.values[i]
        goods = goods_of(other)
        g = pick(goods, key=row.__getitem__)
        own = row_value(row, a.bundles[i])
        rest = row_value(row, other) - row[g]
        if own < rest:
            return FairnessVerdict(
                prop, False, {"agent": i, "other": j, "good": g, "own_value": own, "other_minus_good": rest}
            )
    return FairnessVerdict(prop, True)


def check_ef1(inst: Instance, a: Allocation) -> FairnessVerdict:
    # removing the envier's favourite good is the best single removal
    return _envy_check(inst, a, EF1, max)


def check_efx(inst: Instance, a: Allocation) -> FairnessVerdict:
    # every good is positively valued, so the least valued one is the binding case
    return _envy_check(inst, a, EFX, min)


@lru_cache(maxsize=65536)
def _pair_maximin(row: Row, combined: Bundle) -> int:
    total = row_value(row, combined)
    best = 0
    for sub in submasks(combined):
        part = row_value(row, sub)
        low = min(part, total - part)
        if low > best:
            best = low
    return best


def pair_maximin_value(inst: Instance, agent: int, combined: Bundle) -> int:
    """Best guaranteed value when ``agent`` cuts ``combined`` into two and takes the worse part."""
    size = bin(combined).count("1")
    if size > PAIR_BUDGET:
        raise BudgetExceeded("pair maximin", size, PAIR_BUDGET, "goods in the combined bundle")
    if combined < 0 or combined >> inst.m:
        raise IndexError(f"bundle {goods_of(combined)} has goods outside 0..{inst.m - 1}")
    return _pair_maximin(inst.values[agent], combined)


def check_pmms_definition(inst: Instance, a: Allocation) -> FairnessVerdict:
    for i, j in _pairs(inst.n):
        combined = a.bundles[i] | a.bundles[j]
        own = row_value(inst.values[i], a.bundles[i])
        share = pair_maximin_value(inst, i, combined)
        if own < share:
            return FairnessVerdict(PMMS, False, {"agent": i, "other": j, "own_value": own, "pair_maximin": share})
    return FairnessVerdict(PMMS, True)


def check_pmms_rank(inst: Instance, a: Allocation) -> FairnessVerdict:
    """PMMS through ranks: each of a pair holds rank >= 2**(|K|-1) over the pair's union K."""
    for i in range(inst.n):
        for j in range(i + 1, inst.n):
            combined = a.bundles[i] | a.bundles[j]
            size = bin(combined).count("1")
            if size > PAIR_BUDGET:
                raise BudgetExceeded("pair rank table", size, PAIR_BUDGET, "goods in the combined bundle")
            threshold = 1 << size  # compare 2*rank against 2**|K|
            for agent, other in ((i, j), (j, i)):
                r = rank_over(inst.values[agent], combined, a.bundles[agent])
                if 2 * r < threshold:
                    return FairnessVerdict(
                        PMMS_RANK,
                        False,
                        {"agent": agent, "other": other, "rank": r, "threshold": Fraction(threshold, 2)},
                    )
    return FairnessVerdict(PMMS_RANK, True)


def improvement_factor(current: tuple[int, ...], alternative: tuple[int, ...]) -> Fraction | None:
    """Largest ratio ``alternative[i] / current[i]``; ``None`` when someone gains from zero."""
    best = Fraction(1)
    for u, w in zip(current, alternative):
        if u == 0:
            if w > 0:
                return None
            continue
        ratio = Fraction(w, u)
        if ratio > best:
            best = ratio
    return best


def check_beta_po(inst: Instance, a: Allocation, beta: Fraction | int | str = 1) -> FairnessVerdict:
    beta = Fraction(beta)
    if beta < 1:
        raise ValueError(f"beta must be at least 1, got {beta}")
    require_budget(inst.n, inst.m, "beta-PO enumeration")
    num, den = beta.numerator, beta.denominator
    sums = [inst.sums(i) for i in range(inst.n)]
    current = tuple(s[b] for s, b in zip(sums, a.bundles))
    for masks in iter_assignments(inst.n, inst.m):
        util = tuple(s[b] for s, b in zip(sums, masks))
        if any(w < u for w, u in zip(util, current)):
            continue
        # strict gain beyond beta: w > beta*u, i.e. w*den > num*u
        if any(w * den > num * u for w, u in zip(util, current)):
            factor = improvement_factor(current, util)
            return FairnessVerdict(
                BETA_PO,
                False,
                {
                    "beta": beta,
                    "dominating": [goods_of(b) for b in masks],
                    "utilities": list(util),
                    "current_utilities": list(current),
                    "factor": factor,
                },
            )
    return FairnessVerdict(BETA_PO, True, None)


def check_po(inst: Instance, a: Allocation) -> FairnessVerdict:
    return check_beta_po(inst, a, 1)
