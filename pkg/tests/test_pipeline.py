from __future__ import annotations

import time
from pathlib import Path

import pytest

from leadscreen.cli import main
from leadscreen.errors import MissingInput, SchemaError
from leadscreen.pipeline import Pipeline, load_config
from leadscreen.pipeline.stages import qed_histogram_tsv, rules_histogram_tsv
from leadscreen.pool import CandidateRecord, Pool, load


def tree(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture
def demo(tmp_path) -> Path:
    d = tmp_path / "demo"
    assert main(["demo", str(d)]) == 0
    return d


def pipeline(demo: Path, **overrides) -> Pipeline:
    return Pipeline(load_config(demo / "config.yaml").with_overrides(**overrides))


def run_all(demo: Path) -> Path:
    p = pipeline(demo)
    p.run_all()
    p.close()
    return p.workdir


# --- full demo run -------------------------------------------------------------------


def test_demo_run_selects_expected_candidates(demo):
    work = run_all(demo)
    assert (work / "select" / "selected.txt").read_text() == "C00004\nC00008\n"
    pool = load(work / "pool.jsonl")
    assert pool.get("C00001").source == "extracted"
    assert pool.get("C00013").status == "invalid"
    ledger = (work / "report" / "ledger.tsv").read_text()
    assert "0\trecords\tvalid\t12" in ledger and "0\trecords\tinvalid\t1" in ledger


def test_demo_run_is_byte_identical(demo):
    t0 = time.perf_counter()
    first = tree(run_all(demo))
    second = tree(run_all(demo))
    assert time.perf_counter() - t0 < 5.0
    assert first == second
    assert "report/qed_histogram.tsv" in first and "structure/ingested.tsv" in first


def test_every_record_is_active_or_quarantined(demo):
    work = run_all(demo)
    pool = load(work / "pool.jsonl")
    active = {r.id for r in pool.records if r.valid}
    quarantined = {r.id for r in pool.records if not r.valid}
    assert active.isdisjoint(quarantined) and len(active) + len(quarantined) == len(pool)
    for rel in ("filter/descriptors.tsv", "select/decisions.tsv", "predict/profiles.tsv"):
        ids = {ln.split("\t")[0] for ln in (work / rel).read_text().splitlines()[1:]}
        assert ids == active, rel


def test_stage_rerun_is_idempotent(demo):
    run_all(demo)
    p = pipeline(demo)
    for stage in ("filter", "select", "report"):
        before = tree(p.workdir)
        p.run(stage)
        assert tree(p.workdir) == before, stage


# --- stage contracts -------------------------------------------------------------------


def test_missing_pool_names_the_stage(demo):
    with pytest.raises(MissingInput) as exc:
        pipeline(demo).run("filter")
    assert exc.value.stage == "filter"
    assert "pool" in exc.value.artifact


def test_structure_probability_out_of_range(demo):
    run_all(demo)
    (demo / "structure_results.tsv").write_text("candidate_id\tic50_molar\tinhibitor_probability\nC00004\t3e-7\t1.2\n")
    p = pipeline(demo)
    (p.workdir / "structure" / "results.tsv").unlink(missing_ok=True)
    with pytest.raises(SchemaError):
        p.run("structure-ingest")


def test_structure_results_stored_as_advisory(demo):
    work = run_all(demo)
    rec = load(work / "pool.jsonl").get("C00008")
    assert rec.structure == {"ic50_molar": 8.9e-08, "inhibitor_probability": 0.83, "advisory": True}


def test_invalid_proposal_quarantined_and_pool_conserved(demo):
    work = run_all(demo)
    pool = load(work / "pool.jsonl")
    bad = [r for r in pool.records if r.source == "refined" and not r.valid]
    assert len(bad) == 1 and bad[0].parent_id == "C00008"
    assert bad[0].id not in {o.candidate_id for o in pool.outcomes}
    notices = (work / "notices" / "refine-apply-round0.txt").read_text()
    assert "quarantined" in notices
    ledger = (work / "report" / "ledger.tsv").read_text()
    assert "1\trecords\tinvalid\t1" in ledger


def test_refine_rerun_discards_later_rounds(demo):
    work = run_all(demo)
    p = pipeline(demo)
    p.run("refine-apply", round=0)
    pool = load(work / "pool.jsonl")
    assert max(r.round for r in pool.records) == 1
    assert "discarded" in (work / "notices" / "refine-apply-round0.txt").read_text()


# --- report tables ------------------------------------------------------------------------


def _rules_pool(counts: list[tuple[int, int]]) -> Pool:
    pool = Pool()
    for rnd, (n, hi) in enumerate(counts):
        for k in range(n):
            pool._add(CandidateRecord(f"X{rnd}-{k}", "C", rnd, "de_novo", canonical=f"{rnd}-{k}",
                                      rules_passed=5 if k < hi else 2, qed=0.31))
    return pool


def test_rules_histogram_counts():
    text = rules_histogram_tsv(_rules_pool([(100, 29), (99, 44), (95, 52)]))
    rows = set(text.splitlines())
    assert {"0\t>=4\t29", "1\t>=4\t44", "2\t>=4\t52"} <= rows
    assert "0\t5\t29" in rows and "0\t2\t71" in rows


def test_empty_round_gets_zero_rows():
    pool = _rules_pool([(3, 1), (0, 0), (2, 2)])
    rows = rules_histogram_tsv(pool).splitlines()
    assert "1\t>=4\t0" in rows
    assert [r for r in rows if r.startswith("1\t")] == [f"1\t{k}\t0" for k in range(6)] + ["1\t>=4\t0"]
    qed = qed_histogram_tsv(pool).splitlines()
    assert len([r for r in qed if r.startswith("1\t")]) == 20
    assert "0\t0.30\t0.35\t3" in qed
