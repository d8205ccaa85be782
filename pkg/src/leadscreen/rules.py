"""Drug-likeness rule filters and candidate selection gates.

Criteria and allowed-violation counts come from ``data/rule_thresholds.tsv``.
A criterion passes when the descriptor lies inside its (possibly half-open)
interval; a rule passes when no more than ``max_violations`` criteria fail.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path

from leadscreen.data import read_table
from leadscreen.descriptors import DescriptorSet
from leadscreen.errors import ParameterError

RULES = ("lipinski", "veber", "ghose", "ro3", "oprea")


@dataclass(frozen=True)
class Criterion:
    rule: str
    name: str
    field: str
    low: float | None
    high: float | None
    low_inclusive: bool
    high_inclusive: bool

    def passes(self, value: float) -> bool:
        if self.low is not None:
            if value < self.low or (value == self.low and not self.low_inclusive):
                return False
        if self.high is not None:
            if value > self.high or (value == self.high and not self.high_inclusive):
                return False
        return True

    def threshold_text(self) -> str:
        lo = "" if self.low is None else f"{_num(self.low)}{'<=' if self.low_inclusive else '<'}"
        hi = "" if self.high is None else f"{'<=' if self.high_inclusive else '<'}{_num(self.high)}"
        return f"{lo}x{hi}"


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else str(v)


@dataclass(frozen=True)
class RuleSet:
    criteria: dict[str, tuple[Criterion, ...]]
    max_violations: dict[str, int]

    @classmethod
    def load(cls, source: str | Path = "rule_thresholds.tsv") -> "RuleSet":
        crit: dict[str, list[Criterion]] = {}
        allowed: dict[str, int] = {}
        for row in read_table(source):
            try:
                rule = row["rule"]
                c = Criterion(
                    rule=rule,
                    name=row["criterion"],
                    field=row["field"],
                    low=float(row["min"]) if row["min"] else None,
                    high=float(row["max"]) if row["max"] else None,
                    low_inclusive=row["min_inclusive"] == "1",
                    high_inclusive=row["max_inclusive"] == "1",
                )
                mv = int(row["max_violations"])
            except (KeyError, ValueError) as exc:
                raise ParameterError(f"malformed rule row {row!r}") from exc
            if allowed.setdefault(rule, mv) != mv:
                raise ParameterError(f"rule {rule} has inconsistent max_violations")
            if c.field not in DescriptorSet.__dataclass_fields__:
                raise ParameterError(f"rule {rule} reads unknown descriptor {c.field!r}")
            crit.setdefault(rule, []).append(c)
        return cls({k: tuple(v) for k, v in crit.items()}, allowed)


@lru_cache(maxsize=1)
def default_rules() -> RuleSet:
    return RuleSet.load()


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    observed: float
    threshold: str
    passed: bool


@dataclass(frozen=True)
class RuleReport:
    details: dict[str, tuple[CriterionResult, ...]]
    verdicts: dict[str, bool]

    @property
    def rules_passed(self) -> int:
        return sum(self.verdicts.values())

    def violations(self, rule: str) -> int:
        return sum(not r.passed for r in self.details[rule])

    def __getattr__(self, name: str) -> bool:
        # report.lipinski, report.veber, ...
        verdicts = self.__dict__.get("verdicts", {})
        if name in verdicts:
            return verdicts[name]
        raise AttributeError(name)


def evaluate_rules(desc: DescriptorSet, rules: RuleSet | None = None) -> RuleReport:
    rules = rules or default_rules()
    details: dict[str, tuple[CriterionResult, ...]] = {}
    verdicts: dict[str, bool] = {}
    for rule, criteria in rules.criteria.items():
        results = tuple(
            CriterionResult(c.name, getattr(desc, c.field), c.threshold_text(), c.passes(getattr(desc, c.field)))
            for c in criteria
        )
        details[rule] = results
        verdicts[rule] = sum(not r.passed for r in results) <= rules.max_violations[rule]
    return RuleReport(details, verdicts)


class Strictness(str, Enum):
    AT_LEAST = "at_least"
    MORE_THAN = "more_than"


@dataclass(frozen=True)
class SelectionCriteria:
    min_rules: int
    min_qed: float
    min_pkd: float
    strictness: Strictness = Strictness.AT_LEAST

    def __post_init__(self) -> None:
        if not (math.isfinite(self.min_qed) and math.isfinite(self.min_pkd)):
            raise ParameterError("selection thresholds must be finite")
        if not 0 <= self.min_rules <= len(RULES):
            raise ParameterError(f"min_rules must be within 0..{len(RULES)}")

    def rules_ok(self, rules_passed: int) -> bool:
        if self.strictness is Strictness.MORE_THAN:
            return rules_passed > self.min_rules
        return rules_passed >= self.min_rules


PROFILES = {
    "main": SelectionCriteria(3, 0.55, 6.0, Strictness.AT_LEAST),
    "si": SelectionCriteria(3, 0.6, 5.5, Strictness.MORE_THAN),
}


def select(rules_passed: int | RuleReport, qed: float, pkd: float, criteria: SelectionCriteria | str = "main") -> bool:
    """True when the rule count, QED and pKd all clear the profile (QED and pKd strictly)."""
    if isinstance(criteria, str):
        try:
            criteria = PROFILES[criteria]
        except KeyError:
            raise ParameterError(f"unknown selection profile {criteria!r}; known: {sorted(PROFILES)}") from None
    n = rules_passed.rules_passed if isinstance(rules_passed, RuleReport) else rules_passed
    qed_value = getattr(qed, "value", qed)
    return criteria.rules_ok(n) and qed_value > criteria.min_qed and pkd > criteria.min_pkd


def report_tsv(rows: list[tuple[str, RuleReport]]) -> str:
    """One line per (molecule, rule, criterion) with observed value, threshold and flags."""
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(["id", "rule", "criterion", "observed", "threshold", "criterion_pass", "rule_pass"])
    for mol_id, report in rows:
        for rule, results in report.details.items():
            for r in results:
                w.writerow([mol_id, rule, r.criterion, _fmt(r.observed), r.threshold, int(r.passed), int(report.verdicts[rule])])
    return buf.getvalue()


def radar_tsv(rows: list[tuple[str, DescriptorSet]], rules: RuleSet | None = None) -> str:
    """Radar-chart data: each bounded criterion's descriptor value next to its limits."""
    rules = rules or default_rules()
    axes: dict[str, Criterion] = {}
    for criteria in rules.criteria.values():
        for c in criteria:
            axes.setdefault(f"{c.rule}:{c.name}", c)
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(["id", "axis", "field", "value", "min", "max"])
    for mol_id, desc in rows:
        for axis, c in axes.items():
            w.writerow([
                mol_id, axis, c.field, _fmt(getattr(desc, c.field)),
                "" if c.low is None else _num(c.low), "" if c.high is None else _num(c.high),
            ])
    return buf.getvalue()


def _fmt(v: float | int) -> str:
    return f"{v:.4f}" if isinstance(v, float) else str(v)
