from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of checking ``lhs <= slack * bound + tol``."""

    name: str
    lhs: float
    bound: float
    passed: bool
    slack: float = 1.0
    tol: float = 0.0
    extra: dict = field(default_factory=dict)

    @classmethod
    def check(cls, name, lhs, bound, slack=1.0, tol=0.0, **extra) -> "InequalityReport":
        lhs, bound = float(lhs), float(bound)
        return cls(name, lhs, bound, lhs <= slack * bound + tol, slack, tol, extra)

    def to_dict(self) -> dict:
        out = {
            "value": self.lhs,
            "bound": self.bound,
            "slack": self.slack,
            "tol": self.tol,
            "pass": bool(self.passed),
        }
        out.update(self.extra)
        return out
