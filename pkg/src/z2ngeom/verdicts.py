"""PASS/FAIL results returned by the verification harnesses."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


@dataclass
class CheckResult:
    passed: bool
    witnesses: list = field(default_factory=list)
    samples_run: int = 0
    effective_truncation: int | None = None
    numeric: bool = False
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.passed

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    @property
    def witness(self):
        return self.witnesses[0] if self.witnesses else None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witnesses": [jsonable(w) for w in self.witnesses],
            "effective_truncation": self.effective_truncation,
            "samples_run": self.samples_run,
            "numeric": self.numeric,
            "notes": list(self.notes),
        }


def jsonable(obj):
    """Best-effort conversion of witnesses to JSON-friendly values."""
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return str(obj)


def merge(results, notes=()) -> CheckResult:
    """Combine results in order; the first failure's witnesses come first."""
    results = list(results)
    out = CheckResult(
        passed=all(r.passed for r in results),
        samples_run=sum(r.samples_run for r in results),
        numeric=any(r.numeric for r in results),
        notes=list(notes),
    )
    ks = [r.effective_truncation for r in results if r.effective_truncation is not None]
    out.effective_truncation = min(ks) if ks else None
    for r in results:
        out.witnesses.extend(r.witnesses)
        out.notes.extend(n for n in r.notes if n not in out.notes)
    return out
