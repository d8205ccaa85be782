"""Quantitative estimate of drug-likeness.

Each of eight descriptor values goes through an asymmetric double-sigmoid
desirability function; the score is the weighted geometric mean of those
desirabilities. Parameters and weights ship in ``data/qed_params.tsv``.

Structural alerts need a substructure engine this package does not bundle.
``alert_count`` takes any object with a ``count(mol) -> int`` method; with no
engine it returns 0, and :func:`score_molecule` records that on the score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from leadscreen.data import read_table
from leadscreen.descriptors import DescriptorSet
from leadscreen.errors import ParameterError
from leadscreen.smiles.graph import MolGraph

PROPERTIES = ("MW", "ALOGP", "HBA", "HBD", "PSA", "ROTB", "AROM", "ALERTS")
DESIRABILITY_FLOOR = 1e-6
NO_ALERT_ENGINE = "no-alert-engine"


@dataclass(frozen=True)
class AdsParams:
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    dmax: float


@dataclass(frozen=True)
class DesirabilityParams:
    functions: dict[str, AdsParams]
    weights: dict[str, float]

    def __post_init__(self) -> None:
        missing = set(PROPERTIES) - set(self.functions)
        if missing or set(self.functions) != set(self.weights):
            raise ParameterError(f"desirability parameters incomplete; missing {sorted(missing)}")
        for name, w in self.weights.items():
            if not math.isfinite(w) or w < 0:
                raise ParameterError(f"weight for {name} must be finite and >= 0, got {w}")
        if not any(self.weights[p] > 0 for p in PROPERTIES):
            raise ParameterError("at least one weight must be positive")
        for name, p in self.functions.items():
            values = (p.a, p.b, p.c, p.d, p.e, p.f, p.dmax)
            if not all(math.isfinite(v) for v in values):
                raise ParameterError(f"non-finite parameter for {name}")
            if p.e <= 0 or p.f <= 0 or p.dmax <= 0:
                raise ParameterError(f"{name}: e, f and dmax must be positive")

    @classmethod
    def load(cls, source: str | Path = "qed_params.tsv") -> "DesirabilityParams":
        functions: dict[str, AdsParams] = {}
        weights: dict[str, float] = {}
        try:
            rows = read_table(source)
        except OSError as exc:
            raise ParameterError(f"cannot read desirability parameters: {exc}") from exc
        for row in rows:
            try:
                name = row["name"]
                functions[name] = AdsParams(*(float(row[k]) for k in ("a", "b", "c", "d", "e", "f", "dmax")))
                weights[name] = float(row["weight"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ParameterError(f"malformed desirability row {row!r}") from exc
        return cls(functions, weights)

    def scaled(self, factor: float) -> "DesirabilityParams":
        return DesirabilityParams(self.functions, {k: v * factor for k, v in self.weights.items()})


_DEFAULT: DesirabilityParams | None = None


def default_params() -> DesirabilityParams:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = DesirabilityParams.load()
    return _DEFAULT


def _logistic(z: float) -> float:
    # 1 / (1 + exp(-z)) without overflow for large |z|
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def ads(x: float, p: AdsParams) -> float:
    """Asymmetric double sigmoid, normalised by ``dmax`` (unclamped)."""
    rise = _logistic((x - p.c + p.d / 2) / p.e)
    fall = 1.0 - _logistic((x - p.c - p.d / 2) / p.f)
    return (p.a + p.b * rise * fall) / p.dmax


def desirability(name: str, x: float, params: DesirabilityParams | None = None) -> float:
    params = params or default_params()
    return min(1.0, max(DESIRABILITY_FLOOR, ads(x, params.functions[name])))


def weighted_geometric_mean(values: dict[str, float], weights: dict[str, float]) -> float:
    total = sum(weights[k] for k in values)
    if total <= 0:
        raise ParameterError("weights sum to zero")
    clamped = {k: max(DESIRABILITY_FLOOR, v) for k, v in values.items()}
    distinct = {v for k, v in clamped.items() if weights[k] > 0}
    if len(distinct) == 1:
        return distinct.pop()  # exp(log d) would round; the mean of equal values is d
    return math.exp(sum(weights[k] * math.log(max(DESIRABILITY_FLOOR, v)) for k, v in values.items()) / total)


@dataclass(frozen=True)
class QedScore:
    value: float
    desirabilities: dict[str, float]
    notes: tuple[str, ...] = field(default=())


def qed_inputs(desc: DescriptorSet, alerts: int) -> dict[str, float]:
    return {
        "MW": desc.mw,
        "ALOGP": desc.logp,
        "HBA": desc.hba,
        "HBD": desc.hbd,
        "PSA": desc.tpsa,
        "ROTB": desc.rotb,
        "AROM": desc.aromatic_rings,
        "ALERTS": alerts,
    }


def qed(
    desc: DescriptorSet,
    alerts: int = 0,
    params: DesirabilityParams | None = None,
    notes: tuple[str, ...] = (),
) -> QedScore:
    if alerts < 0:
        raise ParameterError(f"alert count must be >= 0, got {alerts}")
    params = params or default_params()
    ds = {name: desirability(name, x, params) for name, x in qed_inputs(desc, alerts).items()}
    return QedScore(weighted_geometric_mean(ds, params.weights), ds, tuple(notes))


class AlertEngine(Protocol):
    def count(self, mol: MolGraph) -> int: ...


def alert_count(mol: MolGraph, engine: AlertEngine | None = None) -> int:
    if engine is None:
        return 0
    n = engine.count(mol)
    if not isinstance(n, int) or n < 0:
        raise ParameterError(f"alert engine returned {n!r}; expected a count >= 0")
    return n


def score_molecule(
    mol: MolGraph,
    desc: DescriptorSet,
    engine: AlertEngine | None = None,
    params: DesirabilityParams | None = None,
) -> QedScore:
    """QED for ``mol`` with alerts from ``engine``; notes record a missing engine."""
    notes = () if engine is not None else (NO_ALERT_ENGINE,)
    return qed(desc, alert_count(mol, engine), params, notes)
