"""ADMET schema, affinity arithmetic and weakness flagging.

Severity of a property is how far its value sits past the risk threshold in
the undesired direction, divided by the row's ``scale``; values on the
threshold are not flagged. Categorical properties score 1 when the label is
listed in ``risk_labels`` and 0 otherwise. The flagged property is the one
with the highest severity, ties going to the lexicographically smallest id,
so the result never depends on the order of the profile mapping.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Union

from leadscreen.data import read_table
from leadscreen.errors import DomainError, EmptyInput, NoWeakness, ParameterError

CATEGORIES = ("Absorption", "Distribution", "Metabolism", "Excretion", "Toxicity", "General")
OTHER = "Other"
INVALID_SMILES = "invalid_smiles"

Value = Union[float, str]


def cheng_prusoff(ic50: float, s: float, km: float) -> float:
    """Inhibition constant from IC50, substrate concentration and Michaelis constant (all molar)."""
    if not ic50 > 0:
        raise DomainError(f"ic50 must be > 0, got {ic50}")
    if not km > 0:
        raise DomainError(f"km must be > 0, got {km}")
    if not s >= 0:
        raise DomainError(f"substrate concentration must be >= 0, got {s}")
    if math.isinf(km):
        return ic50
    return ic50 / (1.0 + s / km)


def pkd_from_kd(kd: float) -> float:
    if not kd > 0 or not math.isfinite(kd):
        raise DomainError(f"kd must be a positive finite molarity, got {kd}")
    return -math.log10(kd)


def kd_from_pkd(pkd: float) -> float:
    if not math.isfinite(pkd):
        raise DomainError(f"pkd must be finite, got {pkd}")
    return 10.0 ** (-pkd)


@dataclass(frozen=True)
class AffinityRecord:
    kd: float
    ic50: float | None = None
    ki: float | None = None
    substrate_conc: float | None = None
    km: float | None = None

    def __post_init__(self) -> None:
        for name in ("kd", "ic50", "ki", "substrate_conc", "km"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise DomainError(f"{name} must be > 0, got {v}")

    @property
    def pkd(self) -> float:
        return pkd_from_kd(self.kd)


@dataclass(frozen=True)
class PropertySpec:
    id: str
    name: str
    category: str
    kind: str  # numeric | probability | categorical
    direction: str  # higher_better | lower_better | categorical
    risk_threshold: float | None
    scale: float
    risk_labels: frozenset[str]
    unit: str = ""

    def severity(self, value: Value) -> float:
        if self.direction == "categorical":
            return 1.0 if str(value) in self.risk_labels else 0.0
        if self.risk_threshold is None:
            return 0.0
        x = float(value)
        if self.direction == "higher_better":
            gap = self.risk_threshold - x
        else:
            gap = x - self.risk_threshold
        return max(0.0, gap / self.scale)


@dataclass(frozen=True)
class AdmetSchema:
    properties: dict[str, PropertySpec]

    @classmethod
    def load(cls, source: str | Path = "admet_schema.tsv") -> "AdmetSchema":
        props: dict[str, PropertySpec] = {}
        for row in read_table(source):
            try:
                spec = PropertySpec(
                    id=row["id"],
                    name=row["name"],
                    category=row["category"],
                    kind=row["kind"],
                    direction=row["direction"],
                    risk_threshold=float(row["risk_threshold"]) if row["risk_threshold"] else None,
                    scale=float(row["scale"]) if row["scale"] else 1.0,
                    risk_labels=frozenset(x.strip() for x in row["risk_labels"].split(",") if x.strip()),
                    unit=row.get("unit") or "",
                )
            except (KeyError, ValueError) as exc:
                raise ParameterError(f"malformed schema row {row!r}") from exc
            if spec.category not in CATEGORIES:
                raise ParameterError(f"{spec.id}: unknown category {spec.category!r}")
            if spec.direction not in ("higher_better", "lower_better", "categorical"):
                raise ParameterError(f"{spec.id}: unknown direction {spec.direction!r}")
            if spec.scale <= 0:
                raise ParameterError(f"{spec.id}: scale must be > 0")
            if spec.id in props:
                raise ParameterError(f"duplicate property id {spec.id}")
            props[spec.id] = spec
        return cls(props)

    def __getitem__(self, pid: str) -> PropertySpec:
        return self.properties[pid]

    def __contains__(self, pid: object) -> bool:
        return pid in self.properties

    def __len__(self) -> int:
        return len(self.properties)

    def category_of(self, pid: str) -> str:
        spec = self.properties.get(pid)
        return spec.category if spec else OTHER

    def name_of(self, pid: str) -> str:
        if pid == INVALID_SMILES:
            return "Invalid SMILES"
        spec = self.properties.get(pid)
        return spec.name if spec else pid


@lru_cache(maxsize=1)
def default_schema() -> AdmetSchema:
    return AdmetSchema.load()


@dataclass(frozen=True)
class AdmetProfile:
    """Predicted values keyed by schema id; ids the schema lacks go to ``extras``."""

    values: dict[str, Value]
    extras: dict[str, object] = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, data: Mapping[str, object], schema: AdmetSchema | None = None) -> "AdmetProfile":
        schema = schema or default_schema()
        values: dict[str, Value] = {}
        extras: dict[str, object] = {}
        for key, raw in data.items():
            if key not in schema:
                extras[key] = raw
                continue
            spec = schema[key]
            if spec.kind == "categorical":
                values[key] = str(raw)
                continue
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise ParameterError(f"{key}: expected a number, got {raw!r}")
            x = float(raw)
            if not math.isfinite(x):
                raise ParameterError(f"{key}: value must be finite")
            if spec.kind == "probability" and not 0.0 <= x <= 1.0:
                raise ParameterError(f"{key}: probability {x} outside [0, 1]")
            values[key] = x
        return cls(values, extras)


@dataclass(frozen=True)
class WeaknessFlag:
    property_id: str
    severity: float
    rationale: str


def severities(profile: AdmetProfile | Mapping[str, Value], schema: AdmetSchema | None = None) -> dict[str, float]:
    schema = schema or default_schema()
    values = profile.values if isinstance(profile, AdmetProfile) else profile
    return {pid: schema[pid].severity(v) for pid, v in values.items() if pid in schema}


def flag_weakness(profile: AdmetProfile | Mapping[str, Value], schema: AdmetSchema | None = None) -> WeaknessFlag:
    schema = schema or default_schema()
    scored = [(sev, pid) for pid, sev in severities(profile, schema).items() if sev > 0]
    if not scored:
        raise NoWeakness("every property is within its risk threshold")
    # highest severity first, then smallest id
    sev, pid = min(scored, key=lambda t: (-t[0], t[1]))
    spec = schema[pid]
    values = profile.values if isinstance(profile, AdmetProfile) else profile
    if spec.direction == "categorical":
        why = f"{spec.name} predicted {values[pid]!r}"
    else:
        side = "below" if spec.direction == "higher_better" else "above"
        why = f"{spec.name} = {float(values[pid]):g} is {side} the risk threshold {spec.risk_threshold:g}"
    return WeaknessFlag(pid, sev, why)


def _hamilton(counts: dict[str, int], total: int, decimals: int = 1) -> dict[str, float]:
    """Percentages rounded to ``decimals`` that sum exactly to 100 (largest remainder)."""
    unit = 10**decimals
    exact = {k: c * 100 * unit / total for k, c in counts.items()}
    floors = {k: math.floor(v) for k, v in exact.items()}
    short = 100 * unit - sum(floors.values())
    for k in sorted(exact, key=lambda k: (-(exact[k] - floors[k]), k))[:short]:
        floors[k] += 1
    return {k: v / unit for k, v in floors.items()}


@dataclass(frozen=True)
class WeaknessDistribution:
    total: int
    counts: dict[str, int]
    property_shares: dict[str, float]
    category_shares: dict[str, float]
    category_of: dict[str, str]


def weakness_distribution(
    flags: list[WeaknessFlag] | list[str],
    schema: AdmetSchema | None = None,
    invalid_smiles: int = 0,
) -> WeaknessDistribution:
    """Share of flags per property and per category, in percent to one decimal.

    ``invalid_smiles`` adds entries for molecules that never reached prediction;
    they are reported under the ``Other`` category.
    """
    schema = schema or default_schema()
    ids = [f.property_id if isinstance(f, WeaknessFlag) else f for f in flags]
    counts = Counter(ids)
    if invalid_smiles:
        counts[INVALID_SMILES] += invalid_smiles
    total = sum(counts.values())
    if total == 0:
        raise EmptyInput("no weakness flags to summarise")
    shares = _hamilton(dict(counts), total)
    category_of = {pid: schema.category_of(pid) for pid in counts}
    cats: dict[str, float] = {}
    for pid, share in shares.items():
        c = category_of[pid]
        cats[c] = round(cats.get(c, 0.0) + share, 1)
    return WeaknessDistribution(total, dict(counts), shares, cats, category_of)


def distribution_tsv(rounds: dict[str, WeaknessDistribution], schema: AdmetSchema | None = None) -> str:
    """Category/property rows with one percentage column per round, then totals."""
    schema = schema or default_schema()
    labels = list(rounds)
    pids = sorted(
        {p for d in rounds.values() for p in d.counts},
        key=lambda p: (_category_rank(schema.category_of(p)), schema.name_of(p)),
    )
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(["category", "property"] + labels)
    for pid in pids:
        row = [schema.category_of(pid), schema.name_of(pid)]
        row += [f"{rounds[r].property_shares.get(pid, 0.0):.1f}" for r in labels]
        w.writerow(row)
    cats = sorted({c for d in rounds.values() for c in d.category_shares}, key=_category_rank)
    for c in cats:
        w.writerow([c, "(category total)"] + [f"{rounds[r].category_shares.get(c, 0.0):.1f}" for r in labels])
    w.writerow(["", "Total entries"] + [str(rounds[r].total) for r in labels])
    return buf.getvalue()


def _category_rank(c: str) -> int:
    return CATEGORIES.index(c) if c in CATEGORIES else len(CATEGORIES)
