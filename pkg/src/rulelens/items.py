"""Feature-value items: the atoms of rule left-hand sides.

An item pairs a feature with either a category string or a half-open
numeric bin [lo, hi). Bins produced for one feature partition the real
line, so an instance matches at most one item per feature; a missing
value matches nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DataFormatError

NEG_INF = float("-inf")
POS_INF = float("inf")


@dataclass(frozen=True, order=True)
class Bin:
    """Half-open interval [lo, hi); lo may be -inf, hi may be +inf."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bin requires lo < hi, got [{self.lo}, {self.hi})")

    def contains(self, x: float) -> bool:
        return self.lo <= x < self.hi

    def render(self) -> str:
        """Human-readable form; unbounded bins use >= / < shorthand."""
        if self.lo == NEG_INF and self.hi == POS_INF:
            return "any"
        if self.lo == NEG_INF:
            return f"< {_fmt(self.hi)}"
        if self.hi == POS_INF:
            return f">= {_fmt(self.lo)}"
        return f"in [{_fmt(self.lo)}, {_fmt(self.hi)})"

    def key(self) -> str:
        return f"[{_fmt(self.lo)},{_fmt(self.hi)})"


def _fmt(x: float) -> str:
    if x == NEG_INF:
        return "-inf"
    if x == POS_INF:
        return "inf"
    return repr(float(x))


@dataclass(frozen=True)
class Item:
    """One feature-value pair; value is a category string or a Bin."""

    feature: str
    value: str | Bin

    @property
    def is_bin(self) -> bool:
        return isinstance(self.value, Bin)

    def key(self) -> str:
        """Canonical string key, stable across runs; used in rule ids and URLs."""
        v = self.value.key() if self.is_bin else self.value
        return f"{self.feature}={v}"

    def render(self) -> str:
        if self.is_bin:
            return f"{self.feature} {self.value.render()}"
        return f"{self.feature} = {self.value}"

    def matches(self, value) -> bool:
        """True when a non-missing instance value satisfies this item."""
        if value is None:
            return False
        if self.is_bin:
            return self.value.contains(value)
        return value == self.value

    def sort_key(self) -> tuple:
        # Orders items of one feature by bin position; categories lexically.
        if self.is_bin:
            return (self.feature, 1, self.value.lo, "")
        return (self.feature, 0, 0.0, self.value)


def item_to_json(item: Item) -> dict:
    if item.is_bin:
        return {"feature": item.feature, "value": {"lo": _inf_out(item.value.lo), "hi": _inf_out(item.value.hi)}}
    return {"feature": item.feature, "value": item.value}


def item_from_json(obj: dict) -> Item:
    value = obj["value"]
    if isinstance(value, dict):
        return Item(obj["feature"], Bin(_inf_in(value["lo"]), _inf_in(value["hi"])))
    return Item(obj["feature"], value)


def _inf_out(x: float):
    # JSON has no infinity literal; use strings at the boundary.
    if x == NEG_INF:
        return "-inf"
    if x == POS_INF:
        return "inf"
    return x


def _inf_in(x) -> float:
    if isinstance(x, str):
        v = float(x)
    else:
        v = float(x)
    if math.isnan(v):
        raise DataFormatError("bin bound may not be NaN")
    return v
