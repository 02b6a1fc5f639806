"""Outcome records for randomized verification suites."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class VerificationReport:
    """Result of one randomized check: worst defect over all trials vs a tolerance.

    ``expected_failure`` marks checks that are supposed to fail (the report
    then counts as OK when the underlying check indeed failed).  ``witness``
    carries an optional machine-readable fixture describing the worst trial
    or auxiliary measurements.
    """

    suite: str
    seed: int
    trials: int
    max_defect: float
    tol: float
    passed: bool
    expected_failure: bool = False
    witness: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        """True when the outcome matches expectation (pass, or an expected failure)."""
        return self.passed != self.expected_failure

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "suite": self.suite,
            "seed": int(self.seed),
            "trials": int(self.trials),
            "max_defect": float(self.max_defect),
            "tol": float(self.tol),
            "pass": bool(self.passed),
            "witness": self.witness,
        }
        if self.expected_failure:
            out["expected_failure"] = True
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        if self.expected_failure:
            verdict += " (expected failure)" if not self.passed else " (unexpected pass)"
        return (
            f"{self.suite}: {verdict}  max_defect={self.max_defect:.3e} "
            f"tol={self.tol:.1e} trials={self.trials} seed={self.seed}"
        )


def combine_reports(suite: str, reports: list[VerificationReport]) -> VerificationReport:
    """Aggregate sub-reports: worst defect, logical AND of per-report outcomes."""
    if not reports:
        raise ValueError("cannot combine an empty report list")
    return VerificationReport(
        suite=suite,
        seed=reports[0].seed,
        trials=sum(r.trials for r in reports),
        max_defect=max(r.max_defect for r in reports),
        tol=min(r.tol for r in reports),
        passed=all(r.ok for r in reports),
        details={"sub_reports": [r.to_dict() for r in reports]},
    )
