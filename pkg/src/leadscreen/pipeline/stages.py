"""Pipeline stages.

Each stage reads artifacts under ``workdir`` (and the pool file), writes its
own artifacts, and leaves everything byte-identical when rerun on unchanged
inputs. Output carries no timestamps or absolute paths. Notices (skipped
stages, rejected proposals) go to ``notices/<stage>.txt``.
"""

from __future__ import annotations

import csv
import io
import json
import shlex
import subprocess
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Callable, Iterable

import httpx

from leadscreen.clients import BioClients, ClientConfig, validate_fasta
from leadscreen.descriptors import compute_all
from leadscreen.errors import (
    AdapterError,
    ConfigError,
    DuplicateProposal,
    MissingInput,
    NoWeakness,
    SchemaError,
    UnknownParent,
)
from leadscreen.pipeline.config import STAGES, PipelineConfig
from leadscreen.pk import default_schema, distribution_tsv, flag_weakness, weakness_distribution
from leadscreen.pool import CandidateRecord, Pool, ingest, ledger_stats, load, record_outcomes, record_refinement, save
from leadscreen.qed import score_molecule
from leadscreen.rules import PROFILES, evaluate_rules, radar_tsv, report_tsv, select
from leadscreen.smiles import parse

QED_BIN_WIDTH = 0.05
STRUCTURE_OUTPUTS = ("complex_structure", "ic50", "inhibitor_probability")


def _tsv(header: Iterable[str], rows: Iterable[Iterable[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def _read_tsv(path: Path) -> list[dict[str, str]]:
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip() and not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines)), delimiter="\t"))


def _f(x: float | None, digits: int = 4) -> str:
    return "" if x is None else f"{x:.{digits}f}"


def read_smiles_file(path: Path) -> list[str]:
    """First whitespace-separated field of every non-blank, non-comment line."""
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line.split()[0])
    return out


def run_adapter(template: str, *, input: Path, output: Path, cwd: Path, python: str) -> None:
    """Run an adapter command with ``{input}``, ``{output}`` and ``{python}`` filled in."""
    try:
        command = template.format(
            input=shlex.quote(str(input)), output=shlex.quote(str(output)), python=shlex.quote(python)
        )
    except (KeyError, IndexError) as exc:
        raise ConfigError(f"adapter template {template!r} uses an unknown placeholder: {exc}") from None
    output.parent.mkdir(parents=True, exist_ok=True)
    if output.exists():
        output.unlink()
    try:
        proc = subprocess.run(shlex.split(command), cwd=cwd, capture_output=True, text=True)
    except OSError as exc:
        raise AdapterError(f"cannot start adapter {command!r}: {exc}") from exc
    if proc.returncode != 0:
        raise AdapterError(f"adapter {command!r} exited with status {proc.returncode}", proc.stderr)
    if not output.is_file():
        raise AdapterError(f"adapter {command!r} did not write {output.name}", proc.stderr)


class Pipeline:
    def __init__(
        self,
        config: PipelineConfig,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        python: str = sys.executable,
    ) -> None:
        self.config = config
        self.transport = transport
        self.sleep = sleep
        self.python = python
        self._clients: BioClients | None = None
        self.notices: list[str] = []

    # -- plumbing --

    @property
    def workdir(self) -> Path:
        return self.config.workdir

    def path(self, *parts: str) -> Path:
        return self.workdir.joinpath(*parts)

    def write(self, rel: str, text: str) -> Path:
        p = self.path(rel)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
        return p

    def clients(self) -> BioClients:
        if self._clients is None:
            cfg = self.config.clients
            if cfg is None:
                if self.transport is None:
                    raise ConfigError("no 'clients' section in config and no --fixtures given")
                cfg = ClientConfig(mode="live")
            self._clients = BioClients(cfg, transport=self.transport, sleep=self.sleep)
        return self._clients

    def close(self) -> None:
        if self._clients is not None:
            self._clients.close()

    def notice(self, text: str) -> None:
        self.notices.append(text)

    def load_pool(self, stage: str) -> Pool:
        if not self.config.pool_path.is_file():
            raise MissingInput(stage, f"pool file {self.config.pool_path.name} (run 'ingest' first)")
        return load(self.config.pool_path)

    def save_pool(self, pool: Pool) -> None:
        self.config.pool_path.parent.mkdir(parents=True, exist_ok=True)
        save(pool, self.config.pool_path)

    def protein_fasta(self, stage: str) -> str:
        p = self.path("extract", "protein.fasta")
        if not p.is_file():
            raise MissingInput(stage, "extract/protein.fasta (run 'extract' first)")
        return p.read_text(encoding="utf-8")

    def run(self, stage: str, **options) -> None:
        if stage not in STAGES:
            raise ConfigError(f"unknown stage {stage!r}")
        self.notices = []
        method = getattr(self, "stage_" + stage.replace("-", "_"))
        method(**options)
        suffix = f"-round{options['round']}" if options.get("round") is not None else ""
        self.write(f"notices/{stage}{suffix}.txt", "".join(n + "\n" for n in self.notices))

    def run_all(self) -> None:
        cfg = self.config
        plan: list[tuple[str, dict]] = [("extract", {}), ("ingest", {}), ("predict", {}), ("flag", {})]
        for k in range(cfg.rounds):
            plan += [("refine-apply", {"round": k}), ("predict", {}), ("flag", {})]
        plan += [("filter", {}), ("select", {}), ("report", {}), ("structure-manifest", {}), ("structure-ingest", {})]
        for stage, opts in plan:
            if not cfg.enabled(stage):
                continue
            if stage == "extract" and not (cfg.gene and cfg.drug):
                self.write("notices/extract.txt", "extract skipped: no target gene/drug configured\n")
                continue
            if stage == "structure-ingest" and not self._structure_results_path():
                self.write("notices/structure-ingest.txt", "structure-ingest skipped: no structure results available\n")
                continue
            self.run(stage, **opts)

    # -- stages --

    def stage_extract(self) -> None:
        cfg = self.config
        if not cfg.gene:
            raise MissingInput("extract", "target gene in the config")
        if not cfg.drug:
            raise MissingInput("extract", "known drug name in the config")
        clients = self.clients()
        protein = clients.fetch_protein(cfg.gene)
        drug = clients.fetch_drug_smiles(cfg.drug)
        self.write("extract/protein.fasta", protein.fasta)
        meta = {"accession": protein.accession, "gene": protein.gene, "organism_id": protein.organism_id}
        self.write("extract/protein.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")
        self.write("extract/drug.json", json.dumps(asdict(drug), indent=2, sort_keys=True) + "\n")

    def stage_ingest(self) -> None:
        cfg = self.config
        drug_path = self.path("extract", "drug.json")
        drug = json.loads(drug_path.read_text(encoding="utf-8")) if drug_path.is_file() else None
        if cfg.generator:
            request = {"gene": cfg.gene, "disease": cfg.disease, "reference_smiles": drug["smiles"] if drug else None}
            req_path = self.write("ingest/generator_request.json", json.dumps(request, indent=2, sort_keys=True) + "\n")
            out = self.path("ingest", "generated.smi")
            run_adapter(cfg.generator, input=req_path, output=out, cwd=cfg.base_dir, python=self.python)
            generated = read_smiles_file(out)
        elif cfg.seeds:
            self.notice(f"no generator adapter configured; seeds read from {cfg.seeds.name}")
            generated = read_smiles_file(cfg.seeds)
        else:
            raise MissingInput("ingest", "a generator adapter or a seed file in the config")
        pool = Pool()
        rows = []
        if drug:
            r = ingest(pool, [drug["smiles"]], "extracted", 0)
            rows.append(("extracted", 1, r.added, r.merged, r.quarantined))
        else:
            self.notice("no extracted reference drug; pool starts from generated molecules only")
        r = ingest(pool, generated, "de_novo", 0)
        rows.append(("de_novo", len(generated), r.added, r.merged, r.quarantined))
        self.save_pool(pool)
        self.write("ingest/summary.tsv", _tsv(["source", "inputs", "added", "merged", "quarantined"], rows))

    def _enrich(self, pool: Pool, records: list[CandidateRecord], stage: str) -> None:
        """Fill descriptors, QED, ADMET profile and pKd where missing."""
        todo = [r for r in records if r.valid]
        for r in todo:
            if r.descriptors is None or r.qed is None:
                mol = parse(r.smiles)
                r.descriptors = compute_all(mol)
                score = score_molecule(mol, r.descriptors)
                r.qed = score.value
                r.qed_notes = list(score.notes)
        need_admet = [r for r in todo if r.admet is None]
        need_pkd = [r for r in todo if r.pkd is None]
        if not need_admet and not need_pkd:
            return
        clients = self.clients()
        size = self.config.batch_size
        for i in range(0, len(need_admet), size):
            batch = need_admet[i : i + size]
            profiles = clients.predict_properties([r.smiles for r in batch])
            for r, prof in zip(batch, profiles):
                r.admet = {"values": prof.values, "extras": prof.extras}
        if need_pkd:
            fasta = self.protein_fasta(stage)
            for r in need_pkd:
                r.pkd = clients.predict_affinity(r.smiles, fasta)

    def stage_predict(self) -> None:
        pool = self.load_pool("predict")
        self._enrich(pool, pool.records, "predict")
        self.save_pool(pool)
        schema = default_schema()
        ids = list(schema.properties)
        rows = []
        for r in pool.records:
            if not r.valid or r.admet is None:
                continue
            values = r.admet["values"]
            rows.append([r.id, r.round, _f(r.pkd), *(_cell(values.get(p)) for p in ids)])
        self.write("predict/profiles.tsv", _tsv(["id", "round", "pkd", *ids], rows))

    def stage_flag(self) -> None:
        pool = self.load_pool("flag")
        predicted = [r for r in pool.records if r.valid and r.admet is not None]
        if not predicted:
            raise MissingInput("flag", "predicted ADMET profiles (run 'predict' first)")
        rows = []
        for r in predicted:
            try:
                r.weakness = flag_weakness(r.admet["values"])
            except NoWeakness:
                r.weakness = None
            w = r.weakness
            rows.append([r.id, r.round, w.property_id if w else "", _f(w.severity) if w else "", w.rationale if w else "none"])
        self.save_pool(pool)
        self.write("flag/weakness.tsv", _tsv(["id", "round", "property", "severity", "rationale"], rows))

    def stage_refine_apply(self, round: int | None = None) -> None:
        cfg = self.config
        pool = self.load_pool("refine-apply")
        flagged_rounds = sorted({r.round for r in pool.records if r.valid and r.weakness is not None})
        if round is None:
            if not flagged_rounds:
                raise MissingInput("refine-apply", "flagged candidates (run 'flag' first)")
            round = flagged_rounds[-1]
        # rerunning a round replaces whatever an earlier run derived from it
        later = [r for r in pool.records if r.round > round]
        if later:
            self.notice(f"discarded {len(later)} records from rounds after {round} before re-applying")
            pool = Pool(
                [r for r in pool.records if r.round <= round],
                [o for o in pool.outcomes if o.round <= round],
                pool.opaque,
                pool.header_extra,
            )
        parents = [r for r in pool.records if r.round == round and r.valid and r.weakness is not None]
        tag = f"refine/round{round}"
        self.write(f"{tag}/requests.tsv", _tsv(
            ["parent_id", "smiles", "weakness", "severity", "rationale"],
            [[p.id, p.smiles, p.weakness.property_id, _f(p.weakness.severity), p.weakness.rationale] for p in parents],
        ))
        if not parents:
            self.notice(f"round {round}: no flagged candidates, nothing to refine")
            self.save_pool(pool)
            self.write(f"{tag}/outcomes.tsv", _tsv(_OUTCOME_HEADER, []))
            return
        if not cfg.refiner:
            self.notice("no refiner adapter configured; refinement skipped")
            self.save_pool(pool)
            self.write(f"{tag}/outcomes.tsv", _tsv(_OUTCOME_HEADER, []))
            return
        proposals_path = self.path(tag, "proposals.tsv")
        run_adapter(cfg.refiner, input=self.path(tag, "requests.tsv"), output=proposals_path, cwd=cfg.base_dir, python=self.python)
        try:
            proposals = _read_tsv(proposals_path)
            if proposals and not {"parent_id", "smiles"} <= set(proposals[0]):
                raise KeyError("parent_id/smiles")
        except (KeyError, csv.Error) as exc:
            raise AdapterError(f"refiner output is not a proposals table: {exc}") from None
        eligible = {p.id for p in parents}
        for prop in proposals:
            pid, smiles = prop["parent_id"], prop["smiles"]
            if pid not in eligible:
                self.notice(f"proposal for {pid} ignored: not a flagged round-{round} candidate")
                continue
            try:
                result = record_refinement(pool, pid, smiles, epsilon=cfg.epsilon)
            except DuplicateProposal as exc:
                self.notice(f"proposal {smiles!r} rejected: {exc}")
                continue
            except UnknownParent as exc:
                self.notice(f"proposal {smiles!r} rejected: {exc}")
                continue
            child = result.child
            if result.status == "invalid":
                self.notice(f"proposal for {pid} quarantined: {smiles!r} ({child.error})")
                continue
            if result.status == "duplicate":
                self.notice(f"proposal for {pid} duplicates pooled {child.id}; no outcome recorded")
                continue
            child.extra.setdefault("rationale", {})[pid] = prop.get("rationale", "")
        # predictions for the new children, then outcomes against each parent
        children = [r for r in pool.records if r.round == round + 1]
        self._enrich(pool, children, "refine-apply")
        rows = []
        for child in children:
            if not child.valid or child.parent_id is None:
                continue
            parent = pool.get(child.parent_id)
            for o in record_outcomes(pool, child.id, parent.id, parent.admet["values"], child.admet["values"], cfg.epsilon):
                if o.targeted:
                    rows.append([child.id, parent.id, o.property_id, _cell(o.before), _cell(o.after), o.classification])
        self.save_pool(pool)
        self.write(f"{tag}/outcomes.tsv", _tsv(_OUTCOME_HEADER, rows))

    def stage_filter(self) -> None:
        pool = self.load_pool("filter")
        scored = [r for r in pool.records if r.valid and r.descriptors is not None]
        if not scored:
            raise MissingInput("filter", "descriptors on pooled candidates (run 'predict' first)")
        reports = []
        for r in scored:
            rep = evaluate_rules(r.descriptors)
            r.rules_passed = rep.rules_passed
            reports.append((r.id, rep))
        self.save_pool(pool)
        self.write("filter/rules.tsv", report_tsv(reports))
        rows = [
            [r.id, r.round, r.smiles, _f(d.mw), _f(d.logp), d.hbd, d.hba, d.rotb, _f(d.tpsa), _f(d.mr), d.aromatic_rings, d.heavy_atom_count]
            for r in scored
            for d in [r.descriptors]
        ]
        self.write("filter/descriptors.tsv", _tsv(
            ["id", "round", "smiles", "mw", "logp", "hbd", "hba", "rotb", "tpsa", "mr", "aromatic_rings", "heavy_atom_count"], rows
        ))

    def stage_select(self) -> None:
        pool = self.load_pool("select")
        ready = [r for r in pool.records if r.valid and r.rules_passed is not None]
        if not ready:
            raise MissingInput("select", "rule reports (run 'filter' first)")
        criteria = PROFILES[self.config.profile]
        rows = []
        for r in ready:
            if r.qed is None or r.pkd is None:
                self.notice(f"{r.id} not selectable: missing QED or pKd")
                chosen = False
            else:
                chosen = select(r.rules_passed, r.qed, r.pkd, criteria)
            rows.append([r.id, r.round, r.smiles, r.rules_passed, _f(r.qed), _f(r.pkd), int(chosen)])
        self.write("select/decisions.tsv", _tsv(["id", "round", "smiles", "rules_passed", "qed", "pkd", "selected"], rows))
        self.write("select/selected.txt", "".join(f"{row[0]}\n" for row in rows if row[-1]))
        self.write("select/profile.txt", f"{self.config.profile}\n")

    def selected_ids(self, stage: str) -> list[str]:
        p = self.path("select", "selected.txt")
        if not p.is_file():
            raise MissingInput(stage, "select/selected.txt (run 'select' first)")
        return [ln for ln in p.read_text(encoding="utf-8").splitlines() if ln]

    def stage_report(self) -> None:
        pool = self.load_pool("report")
        stats = ledger_stats(pool, self.config.qed_thresholds)
        self.write("report/ledger.tsv", stats.to_tsv())
        self.write("report/qed_histogram.tsv", qed_histogram_tsv(pool))
        self.write("report/rules_histogram.tsv", rules_histogram_tsv(pool))
        dists = {}
        for rnd in pool.rounds():
            flags = [r.weakness for r in pool.records if r.round == rnd and r.valid and r.weakness]
            invalid = sum(1 for r in pool.records if r.round == rnd and not r.valid)
            if flags or invalid:
                dists[f"round_{rnd}"] = weakness_distribution(flags, invalid_smiles=invalid)
        self.write("report/weakness_distribution.tsv", distribution_tsv(dists) if dists else "category\tproperty\n")
        sel_path = self.path("select", "selected.txt")
        wanted = set(self.selected_ids("report")) if sel_path.is_file() else None
        radar_rows = [
            (r.id, r.descriptors) for r in pool.records
            if r.valid and r.descriptors is not None and (wanted is None or r.id in wanted)
        ]
        self.write("report/radar.tsv", radar_tsv(radar_rows))

    def stage_structure_manifest(self) -> None:
        pool = self.load_pool("structure-manifest")
        fasta = self.protein_fasta("structure-manifest")
        validate_fasta(fasta)
        ids = self.selected_ids("structure-manifest")
        mdir = self.path("structure", "manifests")
        if mdir.is_dir():
            for stale in mdir.glob("*.json"):
                stale.unlink()
        index = []
        for cid in ids:
            rec = pool.get(cid)
            parse(rec.smiles)
            manifest = {
                "candidate_id": cid,
                "smiles": rec.smiles,
                "fasta": fasta,
                "requested_outputs": list(STRUCTURE_OUTPUTS),
            }
            self.write(f"structure/manifests/{cid}.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
            index.append([cid, f"manifests/{cid}.json"])
        index_path = self.write("structure/manifest_index.tsv", _tsv(["candidate_id", "manifest"], index))
        if self.config.structure_tool:
            run_adapter(
                self.config.structure_tool, input=index_path, output=self.path("structure", "results.tsv"),
                cwd=self.config.base_dir, python=self.python,
            )
        elif not ids:
            self.notice("no selected candidates; manifest index is empty")

    def _structure_results_path(self) -> Path | None:
        produced = self.path("structure", "results.tsv")
        if produced.is_file():
            return produced
        if self.config.structure_results and self.config.structure_results.is_file():
            return self.config.structure_results
        return None

    def stage_structure_ingest(self) -> None:
        path = self._structure_results_path()
        if path is None:
            raise MissingInput("structure-ingest", "a structure results file (structure/results.tsv or 'structure_results')")
        pool = self.load_pool("structure-ingest")
        rows = []
        for n, row in enumerate(_read_tsv(path), start=2):
            try:
                cid = row["candidate_id"]
                ic50 = float(row["ic50_molar"])
                prob = float(row["inhibitor_probability"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"{path.name} row {n}: {exc}") from None
            if not 0.0 <= prob <= 1.0:
                raise SchemaError(f"{path.name} row {n}: inhibitor_probability {prob} outside [0, 1]")
            if not ic50 > 0:
                raise SchemaError(f"{path.name} row {n}: ic50_molar must be > 0")
            rec = pool.get(cid)
            rec.structure = {"ic50_molar": ic50, "inhibitor_probability": prob, "advisory": True}
            rows.append([cid, f"{ic50:.6g}", f"{prob:.4f}"])
        self.save_pool(pool)
        self.write("structure/ingested.tsv", _tsv(["candidate_id", "ic50_molar", "inhibitor_probability"], rows))


_OUTCOME_HEADER = ["child_id", "parent_id", "property", "before", "after", "classification"]


def _cell(v: object) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def qed_histogram_tsv(pool: Pool) -> str:
    nbins = round(1 / QED_BIN_WIDTH)
    rows = []
    for rnd in pool.rounds():
        counts = [0] * nbins
        for r in pool.records:
            if r.round == rnd and r.valid and r.qed is not None:
                counts[min(nbins - 1, int(r.qed * nbins))] += 1
        for b, c in enumerate(counts):
            rows.append([rnd, f"{b * QED_BIN_WIDTH:.2f}", f"{(b + 1) * QED_BIN_WIDTH:.2f}", c])
    return _tsv(["round", "bin_low", "bin_high", "count"], rows)


def rules_histogram_tsv(pool: Pool) -> str:
    stats = ledger_stats(pool)
    rows = []
    for rnd, s in stats.rounds.items():
        for k, c in s.rules_histogram.items():
            rows.append([rnd, k, c])
        rows.append([rnd, ">=4", s.rules_at_least_4])
    return _tsv(["round", "rules_passed", "count"], rows)
