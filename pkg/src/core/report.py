"""
Check reports.

Verification results are plain data: a name, a pass/fail verdict, how many
cases were examined and the first counterexamples found.
"""

from dataclasses import dataclass, field
from typing import Any

DEFAULT_REPORT_CAP = 100


@dataclass
class CheckReport:
    """Outcome of one exhaustive or grid-based verification."""
    name: str
    cases: int = 0
    violation_count: int = 0
    violations: list[Any] = field(default_factory=list)
    cap: int = DEFAULT_REPORT_CAP
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    @property
    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        text = f"{verdict}: {self.cases} cases, {self.violation_count} violations"
        if self.violations:
            text += f", first {self.violations[0]!r}"
        return text

    def record(self, violation: Any) -> None:
        """Count a violation, keeping at most ``cap`` of them."""
        self.violation_count += 1
        if len(self.violations) < self.cap:
            self.violations.append(violation)

    def merge(self, other: "CheckReport") -> "CheckReport":
        """Fold another report in; violations are re-sorted so merged output is schedule-independent."""
        self.cases += other.cases
        self.violation_count += other.violation_count
        combined = self.violations + other.violations
        try:
            combined.sort()
        except TypeError:
            combined.sort(key=repr)
        self.violations = combined[: self.cap]
        return self

    def __bool__(self) -> bool:
        return self.passed


def combine(name: str, reports: list[CheckReport], cap: int = DEFAULT_REPORT_CAP) -> CheckReport:
    """Aggregate sub-reports; violations are tagged with the sub-report name."""
    total = CheckReport(name=name, cap=cap)
    for report in reports:
        total.cases += report.cases
        for violation in report.violations:
            if len(total.violations) < cap:
                total.violations.append((report.name, violation))
        total.violation_count += report.violation_count
        total.notes[report.name] = report.summary
    return total
