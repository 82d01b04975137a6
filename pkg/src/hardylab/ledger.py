"""Named lists of probability claims with computed values and pass flags."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TARGET_POSITIVE = "positive"


@dataclass(frozen=True)
class LedgerEntry:
    claim_id: str
    description: str
    value: float | None
    target: float | str  # a number, or TARGET_POSITIVE for strictly-positive claims
    tolerance: float
    passed: bool

    def to_obj(self) -> dict:
        return {
            "id": self.claim_id,
            "description": self.description,
            "value": self.value,
            "target": self.target,
            "pass": self.passed,
        }


def make_entry(
    claim_id: str,
    description: str,
    value: float | None,
    target: float | str,
    tolerance: float,
) -> LedgerEntry:
    """Build an entry, deciding pass/fail from the target kind.

    Exact targets pass when |value - target| <= tolerance; positive
    targets pass when value > tolerance.  A missing value never passes.
    """
    if value is None or not math.isfinite(value):
        passed = False
        value = None if value is None or not math.isfinite(value) else value
    elif target == TARGET_POSITIVE:
        passed = value > tolerance
    else:
        passed = abs(value - float(target)) <= tolerance
    return LedgerEntry(claim_id, description, value, target, tolerance, passed)


@dataclass(frozen=True)
class Ledger:
    name: str
    entries: tuple
    applicable: bool = True
    notes: tuple = field(default_factory=tuple)

    @property
    def all_pass(self) -> bool:
        return all(e.passed for e in self.entries)

    def entry(self, claim_id: str) -> LedgerEntry:
        for e in self.entries:
            if e.claim_id == claim_id:
                return e
        raise KeyError(claim_id)

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "applicable": self.applicable,
            "all_pass": self.all_pass,
            "entries": [e.to_obj() for e in self.entries],
            "notes": list(self.notes),
        }
