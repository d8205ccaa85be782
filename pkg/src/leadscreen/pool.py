"""Candidate pool with refinement lineage and outcome accounting.

The pool is persisted as JSON lines: a header object carrying the format
version, then one object per record or outcome. Keys this version does not
know are kept in ``extra`` and written back unchanged.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

from leadscreen.descriptors import DescriptorSet
from leadscreen.errors import DuplicateProposal, ParameterError, PoolFormatError, SmilesError, UnknownParent
from leadscreen.pk import AdmetSchema, WeaknessFlag, default_schema
from leadscreen.rules import evaluate_rules
from leadscreen.smiles import parse, serialize

FORMAT_NAME = "leadscreen-pool"
FORMAT_VERSION = 1
DEFAULT_EPSILON = 1e-9
SOURCES = ("extracted", "de_novo", "conditional", "refined")
VALID, INVALID = "valid", "invalid"
IMPROVED, DECLINED, UNCHANGED = "improved", "declined", "unchanged"

_RECORD_KEYS = {
    "kind", "id", "smiles", "canonical", "round", "parent_id", "source", "status", "error",
    "provenance", "descriptors", "admet", "pkd", "weakness", "qed", "qed_notes", "rules_passed",
    "structure",
}
_OUTCOME_KEYS = {"kind", "candidate_id", "parent_id", "property_id", "before", "after", "classification", "round", "targeted"}


@dataclass
class CandidateRecord:
    id: str
    smiles: str
    round: int
    source: str
    canonical: str | None = None
    parent_id: str | None = None
    status: str = VALID
    error: str | None = None
    provenance: list[dict] = field(default_factory=list)
    descriptors: DescriptorSet | None = None
    admet: dict | None = None
    pkd: float | None = None
    weakness: WeaknessFlag | None = None
    qed: float | None = None
    qed_notes: list[str] = field(default_factory=list)
    rules_passed: int | None = None
    structure: dict | None = None  # advisory ic50 / inhibitor probability from the structure tool
    extra: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.status == VALID

    def to_json(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "extra"}
        d["weakness"] = asdict(self.weakness) if self.weakness else None
        return {"kind": "record", **d, **self.extra}

    @classmethod
    def from_json(cls, d: dict) -> "CandidateRecord":
        desc = d.get("descriptors")
        weak = d.get("weakness")
        return cls(
            id=d["id"],
            smiles=d["smiles"],
            round=int(d["round"]),
            source=d["source"],
            canonical=d.get("canonical"),
            parent_id=d.get("parent_id"),
            status=d.get("status", VALID),
            error=d.get("error"),
            provenance=list(d.get("provenance") or []),
            descriptors=DescriptorSet(**desc) if desc else None,
            admet=d.get("admet"),
            pkd=d.get("pkd"),
            weakness=WeaknessFlag(**weak) if weak else None,
            qed=d.get("qed"),
            qed_notes=list(d.get("qed_notes") or []),
            rules_passed=d.get("rules_passed"),
            structure=d.get("structure"),
            extra={k: v for k, v in d.items() if k not in _RECORD_KEYS},
        )


@dataclass(frozen=True)
class RefinementOutcome:
    candidate_id: str
    parent_id: str
    property_id: str
    before: float | str
    after: float | str
    classification: str
    round: int
    targeted: bool = False
    extra: Mapping = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "extra"}
        return {"kind": "outcome", **d, **dict(self.extra)}

    @classmethod
    def from_json(cls, d: dict) -> "RefinementOutcome":
        return cls(
            candidate_id=d["candidate_id"],
            parent_id=d["parent_id"],
            property_id=d["property_id"],
            before=d["before"],
            after=d["after"],
            classification=d["classification"],
            round=int(d["round"]),
            targeted=bool(d.get("targeted", False)),
            extra={k: v for k, v in d.items() if k not in _OUTCOME_KEYS},
        )


@dataclass
class Pool:
    records: list[CandidateRecord] = field(default_factory=list)
    outcomes: list[RefinementOutcome] = field(default_factory=list)
    opaque: list[dict] = field(default_factory=list)  # lines of kinds this version does not know
    header_extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._by_id = {r.id: r for r in self.records}
        self._by_canonical = {r.canonical: r for r in self.records if r.valid and r.canonical}
        self._proposed = {
            p["parent_id"] for r in self.records for p in r.provenance if p.get("parent_id")
        }

    def __len__(self) -> int:
        return len(self.records)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pool):
            return NotImplemented
        return (self.records, self.outcomes, self.opaque, self.header_extra) == (
            other.records, other.outcomes, other.opaque, other.header_extra
        )

    def get(self, record_id: str) -> CandidateRecord:
        try:
            return self._by_id[record_id]
        except KeyError:
            raise UnknownParent(f"no record with id {record_id!r}") from None

    def by_canonical(self, canonical: str) -> CandidateRecord | None:
        return self._by_canonical.get(canonical)

    def in_round(self, rnd: int, include_invalid: bool = False) -> list[CandidateRecord]:
        return [r for r in self.records if r.round == rnd and (include_invalid or r.valid)]

    def rounds(self) -> list[int]:
        """Every round from 0 to the latest, so empty rounds still get report rows."""
        seen = {r.round for r in self.records} | {o.round for o in self.outcomes}
        return list(range(max(seen) + 1)) if seen else [0]

    def _next_id(self) -> str:
        return f"C{len(self.records) + 1:05d}"

    def _add(self, rec: CandidateRecord) -> CandidateRecord:
        self.records.append(rec)
        self._by_id[rec.id] = rec
        if rec.valid and rec.canonical:
            self._by_canonical[rec.canonical] = rec
        return rec


@dataclass(frozen=True)
class IngestResult:
    records: list[CandidateRecord]  # one entry per input, in input order
    added: int
    merged: int
    quarantined: int


def _canonicalize(smiles: str) -> tuple[str | None, str | None]:
    try:
        return serialize(parse(smiles)), None
    except SmilesError as exc:
        return None, exc.code


def ingest(pool: Pool, smiles: Iterable[str], source: str, round: int = 0) -> IngestResult:
    """Add parse-validated records; duplicates merge provenance, bad SMILES are quarantined."""
    if source not in SOURCES or source == "refined":
        raise ParameterError(f"ingest source must be one of extracted/de_novo/conditional, got {source!r}")
    if round < 0:
        raise ParameterError("round must be >= 0")
    out: list[CandidateRecord] = []
    added = merged = quarantined = 0
    for s in smiles:
        prov = {"source": source, "round": round, "smiles": s}
        canonical, err = _canonicalize(s)
        if canonical is None:
            rec = pool._add(CandidateRecord(pool._next_id(), s, round, source, status=INVALID, error=err, provenance=[prov]))
            quarantined += 1
        elif (existing := pool.by_canonical(canonical)) is not None:
            existing.provenance.append(prov)
            rec = existing
            merged += 1
        else:
            rec = pool._add(CandidateRecord(pool._next_id(), s, round, source, canonical=canonical, provenance=[prov]))
            added += 1
        out.append(rec)
    return IngestResult(out, added, merged, quarantined)


def classify(before: float, after: float, direction: str, epsilon: float = DEFAULT_EPSILON) -> str:
    delta = after - before
    if abs(delta) <= epsilon:
        return UNCHANGED
    better = delta > 0 if direction == "higher_better" else delta < 0
    return IMPROVED if better else DECLINED


@dataclass(frozen=True)
class RefinementResult:
    child: CandidateRecord
    status: str  # added | duplicate | invalid
    outcomes: list[RefinementOutcome]


def _comparable(schema: AdmetSchema, pid: str, value):
    spec = schema[pid]
    if spec.direction == "categorical":
        return spec.severity(value), "lower_better"
    return float(value), spec.direction


def record_refinement(
    pool: Pool,
    parent_id: str,
    child_smiles: str,
    before: Mapping[str, float | str] | None = None,
    after: Mapping[str, float | str] | None = None,
    epsilon: float = DEFAULT_EPSILON,
    properties: Iterable[str] | None = None,
    schema: AdmetSchema | None = None,
) -> RefinementResult:
    """Attach a refined child to ``parent_id`` and classify each tracked property change.

    A child whose canonical form is already pooled is not added again; its
    outcomes are still recorded against the existing record. Each parent takes
    at most one proposal per round; a second raises :class:`DuplicateProposal`.
    """
    schema = schema or default_schema()
    parent = pool.get(parent_id)
    if not parent.valid:
        raise ParameterError(f"parent {parent_id} is quarantined and cannot be refined")
    rnd = parent.round + 1
    if parent_id in pool._proposed:
        raise DuplicateProposal(f"parent {parent_id} already has a round-{rnd} proposal")
    pool._proposed.add(parent_id)
    prov = {"source": "refined", "round": rnd, "smiles": child_smiles, "parent_id": parent_id}
    canonical, err = _canonicalize(child_smiles)
    if canonical is None:
        child = pool._add(CandidateRecord(
            pool._next_id(), child_smiles, rnd, "refined", parent_id=parent_id, status=INVALID, error=err, provenance=[prov]
        ))
        return RefinementResult(child, "invalid", [])
    existing = pool.by_canonical(canonical)
    if existing is not None:
        existing.provenance.append(prov)
        child, status = existing, "duplicate"
    else:
        child = pool._add(CandidateRecord(
            pool._next_id(), child_smiles, rnd, "refined", canonical=canonical, parent_id=parent_id, provenance=[prov]
        ))
        status = "added"
    outcomes: list[RefinementOutcome] = []
    if before is not None and after is not None:
        outcomes = record_outcomes(pool, child.id, parent_id, before, after, epsilon, properties, schema)
    return RefinementResult(child, status, outcomes)


def record_outcomes(
    pool: Pool,
    child_id: str,
    parent_id: str,
    before: Mapping[str, float | str],
    after: Mapping[str, float | str],
    epsilon: float = DEFAULT_EPSILON,
    properties: Iterable[str] | None = None,
    schema: AdmetSchema | None = None,
) -> list[RefinementOutcome]:
    """Classify each tracked property change from parent to child and append it to the pool.

    Tracked properties default to the schema ids present in both profiles.
    The parent's current weakness marks its outcome as targeted.
    """
    schema = schema or default_schema()
    parent = pool.get(parent_id)
    child = pool.get(child_id)
    tracked = sorted(properties) if properties is not None else sorted(set(before) & set(after) & set(schema.properties))
    target = parent.weakness.property_id if parent.weakness else None
    outcomes = []
    for pid in tracked:
        if pid not in before or pid not in after:
            continue
        b, direction = _comparable(schema, pid, before[pid])
        a, _ = _comparable(schema, pid, after[pid])
        outcomes.append(RefinementOutcome(
            candidate_id=child_id,
            parent_id=parent_id,
            property_id=pid,
            before=before[pid],
            after=after[pid],
            classification=classify(b, a, direction, epsilon),
            round=max(child.round, parent.round + 1),
            targeted=pid == target,
        ))
    pool.outcomes.extend(outcomes)
    return outcomes


# --- statistics ---------------------------------------------------------------


@dataclass(frozen=True)
class FamilyStats:
    flagged: int
    improved: int
    declined: int
    unchanged: int

    @property
    def fractions(self) -> dict[str, float]:
        if self.flagged == 0:
            return {IMPROVED: 0.0, DECLINED: 0.0, UNCHANGED: 0.0}
        return {
            IMPROVED: round(self.improved / self.flagged, 3),
            DECLINED: round(self.declined / self.flagged, 3),
            UNCHANGED: round(self.unchanged / self.flagged, 3),
        }


@dataclass(frozen=True)
class RoundStats:
    round: int
    valid: int
    invalid: int
    qed_above: dict[float, int]
    rules_histogram: dict[int, int]
    families: dict[str, FamilyStats]

    @property
    def total(self) -> int:
        return self.valid + self.invalid

    @property
    def rules_at_least_4(self) -> int:
        return self.rules_histogram.get(4, 0) + self.rules_histogram.get(5, 0)


@dataclass(frozen=True)
class LedgerStats:
    rounds: dict[int, RoundStats]

    def to_tsv(self) -> str:
        lines = ["round\tmetric\tkey\tvalue"]
        for rnd, s in self.rounds.items():
            lines.append(f"{rnd}\trecords\tvalid\t{s.valid}")
            lines.append(f"{rnd}\trecords\tinvalid\t{s.invalid}")
            lines.append(f"{rnd}\trecords\ttotal\t{s.total}")
            for thr, n in s.qed_above.items():
                lines.append(f"{rnd}\tqed_above\t{thr:g}\t{n}")
            for k, n in s.rules_histogram.items():
                lines.append(f"{rnd}\trules_passed\t{k}\t{n}")
            lines.append(f"{rnd}\trules_passed\t>=4\t{s.rules_at_least_4}")
            for fam, fs in s.families.items():
                lines.append(f"{rnd}\tflagged\t{fam}\t{fs.flagged}")
                for cls, frac in fs.fractions.items():
                    lines.append(f"{rnd}\t{cls}\t{fam}\t{frac:.3f}")
        return "\n".join(lines) + "\n"


def _rules_for(rec: CandidateRecord) -> int | None:
    if rec.rules_passed is not None:
        return rec.rules_passed
    if rec.descriptors is not None:
        return evaluate_rules(rec.descriptors).rules_passed
    return None


def ledger_stats(
    pool: Pool,
    qed_thresholds: Iterable[float] = (0.6,),
    family_of: Callable[[str], str] | None = None,
    targeted_only: bool = True,
) -> LedgerStats:
    """Per-round counts: QED strictly above each threshold, rules-passed histogram, outcome fractions.

    Outcome families default to the property id; pass ``family_of`` to group
    (for example by schema category).
    """
    family_of = family_of or (lambda pid: pid)
    thresholds = tuple(qed_thresholds)
    out: dict[int, RoundStats] = {}
    for rnd in pool.rounds():
        recs = [r for r in pool.records if r.round == rnd]
        valid = [r for r in recs if r.valid]
        qed_above = {t: sum(1 for r in valid if r.qed is not None and r.qed > t) for t in thresholds}
        hist = {k: 0 for k in range(6)}
        for r in valid:
            n = _rules_for(r)
            if n is not None:
                hist[n] += 1
        tallies: dict[str, list[int]] = {}
        for o in pool.outcomes:
            if o.round != rnd or (targeted_only and not o.targeted):
                continue
            t = tallies.setdefault(family_of(o.property_id), [0, 0, 0])
            t[(IMPROVED, DECLINED, UNCHANGED).index(o.classification)] += 1
        families = {
            fam: FamilyStats(sum(t), t[0], t[1], t[2]) for fam, t in sorted(tallies.items())
        }
        out[rnd] = RoundStats(rnd, len(valid), len(recs) - len(valid), qed_above, hist, families)
    return LedgerStats(out)


# --- persistence --------------------------------------------------------------


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def dumps(pool: Pool) -> str:
    lines = [_dump({"format": FORMAT_NAME, "version": FORMAT_VERSION, **pool.header_extra})]
    lines += [_dump(r.to_json()) for r in pool.records]
    lines += [_dump(o.to_json()) for o in pool.outcomes]
    lines += [_dump(x) for x in pool.opaque]
    return "\n".join(lines) + "\n"


def save(pool: Pool, path: str | Path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(dumps(pool), encoding="utf-8")
    tmp.replace(path)


def loads(text: str) -> Pool:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise PoolFormatError("empty pool file (missing header)", 1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise PoolFormatError(f"header is not JSON: {exc.msg}", 1) from None
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise PoolFormatError("not a pool file (bad header)", 1)
    if header.get("version") != FORMAT_VERSION:
        raise PoolFormatError(f"unsupported pool format version {header.get('version')!r}; expected {FORMAT_VERSION}", 1)
    records: list[CandidateRecord] = []
    outcomes: list[RefinementOutcome] = []
    opaque: list[dict] = []
    for n, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise PoolFormatError(f"corrupt line: {exc.msg}", n) from None
        if not isinstance(obj, dict):
            raise PoolFormatError("expected a JSON object", n)
        try:
            kind = obj.get("kind")
            if kind == "record":
                records.append(CandidateRecord.from_json(obj))
            elif kind == "outcome":
                outcomes.append(RefinementOutcome.from_json(obj))
            else:
                opaque.append(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise PoolFormatError(f"invalid {obj.get('kind')} entry: {exc}", n) from None
    extra = {k: v for k, v in header.items() if k not in ("format", "version")}
    return Pool(records, outcomes, opaque, extra)


def load(path: str | Path) -> Pool:
    return loads(Path(path).read_text(encoding="utf-8"))
