"""JSON and CSV helpers: exact rationals, deterministic encoding."""

from __future__ import annotations

import json
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any


def decimal_string(x: Fraction, digits: int = 12) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(x.numerator) / Decimal(x.denominator))


def fraction_json(x: Fraction | int | None) -> dict[str, Any] | str:
    """``{"num", "den", "decimal"}`` for a rational; ``"unbounded"`` for ``None``."""
    if x is None:
        return "unbounded"
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "decimal": decimal_string(x)}


def _default(obj):
    if isinstance(obj, Fraction):
        return fraction_json(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(doc: Any) -> str:
    return json.dumps(doc, default=_default, sort_keys=True, indent=2)
