"""Line-oriented verification reports."""
from __future__ import annotations

from dataclasses import dataclass, field

PASS, FAIL, FLAG = "PASS", "FAIL", "FLAG"


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""

    def line(self) -> str:
        return f"{self.status} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class Report:
    title: str = ""
    checks: list[Check] = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, PASS if ok else FAIL, detail))
        return ok

    def flag(self, name: str, detail: str) -> None:
        """Record a known divergence that is reported but not counted as failure."""
        self.checks.append(Check(name, FLAG, detail))

    def extend(self, other: "Report") -> "Report":
        self.checks.extend(other.checks)
        return self

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    @property
    def flags(self) -> list[Check]:
        return [c for c in self.checks if c.status == FLAG]

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]

    def __str__(self) -> str:
        head = [f"# {self.title}"] if self.title else []
        return "\n".join(head + self.lines())
