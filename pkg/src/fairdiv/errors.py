"""Exception types and enumeration budgets shared across the package."""

from __future__ import annotations

import os

DEFAULT_ALLOCATION_BUDGET = 10**8
DEFAULT_NEIGHBOR_BUDGET = 10**6
RANK_TABLE_BUDGET = 2**24
PAIR_BUDGET = 22
BUNDLE_ORDER_BUDGET = 20

BUDGET_ENV = "FAIRDIV_BUDGET"


class FairDivError(Exception):
    """Base class for all errors raised by fairdiv."""


class ParseError(FairDivError, ValueError):
    """A document could not be read as an instance or allocation."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class InstanceError(FairDivError, ValueError):
    """An instance failed validation; carries the full report."""

    def __init__(self, report):
        self.report = report
        lines = "; ".join(f"{rule}: {msg}" for rule, msg in report.violations)
        super().__init__(f"invalid instance ({lines})")


class BudgetExceeded(FairDivError):
    """An exhaustive search would exceed its configured budget."""

    def __init__(self, what: str, required: int, budget: int, hint: str = ""):
        self.what = what
        self.required = required
        self.budget = budget
        msg = f"{what}: requires {required} but budget is {budget}"
        if hint:
            msg += f" ({hint})"
        super().__init__(msg)


def enumeration_budget(default: int = DEFAULT_ALLOCATION_BUDGET) -> int:
    """Allocation/neighbor budget, overridable through ``FAIRDIV_BUDGET``."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise FairDivError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise FairDivError(f"{BUDGET_ENV} must be positive, got {value}")
    return value
