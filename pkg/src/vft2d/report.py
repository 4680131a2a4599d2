from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    """One named check with its worst-case residual."""

    name: str
    residual: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "residual": self.residual, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class ValidationReport:
    subject: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, residual: float, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, float(residual), bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }
