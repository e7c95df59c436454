# errors.py

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class ValidationReport:
    """
    Outcome of a structural check (Lie axioms, pair axioms, module laws).

    Checks never raise on bad input; they hand back one of these and the
    caller decides whether a failure is fatal.
    """

    ok: bool
    check: str
    detail: str = ""
    witness: tuple[Any, ...] = field(default_factory=tuple)

    @classmethod
    def passed(cls, check: str) -> "ValidationReport":
        return cls(True, check)

    @classmethod
    def failed(cls, check: str, detail: str, *witness: Any) -> "ValidationReport":
        return cls(False, check, detail, tuple(witness))

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "check": self.check,
            "detail": self.detail,
            "witness": [str(w) for w in self.witness],
        }


class GKError(Exception):
    """Root of every error raised by the gk package."""


class ParseError(GKError):
    """Malformed scenario input or a reference that does not resolve."""


class ValidationFailure(GKError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(f"{report.check} failed: {report.detail}")


class PreconditionFailure(GKError):
    """An operation was called outside its stated preconditions."""


class DegreeCapExceeded(GKError):
    def __init__(self, degree: int, cap: int):
        self.degree = degree
        self.cap = cap
        super().__init__(f"degree {degree} exceeds cap {cap}")


class BoundaryLoss(GKError):
    """An operator left the weight window where no loss was allowed."""


class PositivityViolation(GKError):
    """A theta-stable datum has a root value that is not negative."""


class NotInRing(GKError):
    """A value is not an element of the requested base ring."""


class UnsupportedRingMap(GKError):
    pass


class UnsupportedRegime(GKError):
    """The requested computation lies outside the implemented regime."""


class InternalInconsistency(GKError):
    """Two independently computed results that must agree did not."""
