"""Machine-readable verification results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .scalars import RationalScalar, format_rational


def jsonable(value: Any):
    """Convert scalars, tuples and nested containers to JSON-friendly values."""
    if isinstance(value, RationalScalar):
        return format_rational(value)
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return str(value)


@dataclass
class VerificationReport:
    """Outcome of one identity family.

    ``counterexample`` is ``None`` exactly when ``passed`` is true; otherwise it
    holds the first offending entry (where, lhs, rhs) plus the point it was
    found at.
    """

    identity: str
    params: dict = field(default_factory=dict)
    passed: bool = True
    counterexample: dict | None = None
    checks: int = 0

    def fail(self, **info) -> "VerificationReport":
        if self.passed:
            self.passed = False
            self.counterexample = info
        return self

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        self.checks += other.checks
        if not other.passed and self.passed:
            self.passed = False
            self.counterexample = dict(other.counterexample or {}, sub_identity=other.identity)
        return self

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "params": jsonable(self.params),
            "pass": self.passed,
            "checks": self.checks,
            "counterexample": jsonable(self.counterexample),
        }

    def __bool__(self):
        return self.passed
