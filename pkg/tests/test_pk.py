from __future__ import annotations

import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from leadscreen.errors import DomainError, EmptyInput, NoWeakness, ParameterError
from leadscreen.pk import (
    CATEGORIES,
    INVALID_SMILES,
    OTHER,
    AdmetProfile,
    AdmetSchema,
    AffinityRecord,
    WeaknessFlag,
    cheng_prusoff,
    default_schema,
    distribution_tsv,
    flag_weakness,
    kd_from_pkd,
    pkd_from_kd,
    severities,
    weakness_distribution,
)

SCHEMA = default_schema()


def compliant_profile() -> dict[str, object]:
    """A value on the safe side of every threshold."""
    out: dict[str, object] = {}
    for pid, spec in SCHEMA.properties.items():
        if spec.direction == "categorical":
            out[pid] = "safe-label"
        elif spec.risk_threshold is None:
            out[pid] = 0.0
        elif spec.direction == "higher_better":
            out[pid] = min(1.0, spec.risk_threshold + 0.1) if spec.kind == "probability" else spec.risk_threshold + 1
        else:
            out[pid] = max(0.0, spec.risk_threshold - 0.1) if spec.kind == "probability" else spec.risk_threshold - 1
    return out


# --- affinity arithmetic -----------------------------------------------------------


def test_cheng_prusoff_zero_substrate():
    assert cheng_prusoff(1e-7, 0.0, 1e-6) == 1e-7


def test_cheng_prusoff_substrate_at_km():
    assert cheng_prusoff(1e-7, 2e-6, 2e-6) == pytest.approx(5e-8, rel=1e-12)


def test_cheng_prusoff_infinite_km():
    assert cheng_prusoff(1e-7, 1e-3, math.inf) == 1e-7
    assert cheng_prusoff(1e-7, 1e-6, 1e6) == pytest.approx(1e-7, rel=1e-11)


@pytest.mark.parametrize("ic50, s, km", [(0, 1, 1), (-1e-7, 1, 1), (1e-7, 1, 0), (1e-7, -1, 1), (1e-7, 1, -2)])
def test_cheng_prusoff_domain(ic50, s, km):
    with pytest.raises(DomainError):
        cheng_prusoff(ic50, s, km)


@pytest.mark.parametrize("kd, pkd", [(1e-6, 6.0), (1e-9, 9.0)])
def test_pkd_from_kd(kd, pkd):
    assert pkd_from_kd(kd) == pytest.approx(pkd, rel=1e-12)


@pytest.mark.parametrize("x", [3.0, 6.18, 9.0])
def test_pkd_round_trip(x):
    assert pkd_from_kd(kd_from_pkd(x)) == pytest.approx(x, rel=1e-12)


@pytest.mark.parametrize("kd", [0.0, -1e-9, math.inf, math.nan])
def test_pkd_domain(kd):
    with pytest.raises(DomainError):
        pkd_from_kd(kd)


def test_affinity_record():
    r = AffinityRecord(kd=1e-6, ic50=2e-6, substrate_conc=1e-5, km=1e-5)
    assert r.pkd == pytest.approx(6.0)
    with pytest.raises(DomainError):
        AffinityRecord(kd=1e-6, km=0.0)


@given(st.floats(1e-12, 1e-2), st.floats(0, 1e-2), st.floats(1e-9, 1e-2), st.floats(1.01, 100))
def test_cheng_prusoff_monotone(ic50, s, km, k):
    assert cheng_prusoff(ic50, s * k + 1e-9, km) < cheng_prusoff(ic50, s, km)
    assert cheng_prusoff(ic50 * k, s, km) > cheng_prusoff(ic50, s, km)


# --- schema ---------------------------------------------------------------------------


def test_schema_has_74_properties_in_known_categories():
    assert len(SCHEMA) == 74
    assert {s.category for s in SCHEMA.properties.values()} <= set(CATEGORIES)
    per = {c: sum(1 for s in SCHEMA.properties.values() if s.category == c) for c in CATEGORIES}
    assert per == {"Absorption": 8, "Distribution": 5, "Metabolism": 13, "Excretion": 3, "Toxicity": 35, "General": 10}


def test_toxicity_probabilities_risky_above_half():
    for spec in SCHEMA.properties.values():
        if spec.category == "Toxicity" and spec.kind == "probability":
            assert spec.direction == "lower_better" and spec.risk_threshold == 0.5, spec.id


def test_schema_errors(tmp_path):
    f = tmp_path / "s.tsv"
    head = "id\tname\tcategory\tkind\tdirection\trisk_threshold\tscale\trisk_labels\n"
    f.write_text(head + "x\tX\tNowhere\tnumeric\thigher_better\t1\t1\t\n")
    with pytest.raises(ParameterError):
        AdmetSchema.load(f)
    f.write_text(head + "x\tX\tToxicity\tnumeric\tsideways\t1\t1\t\n")
    with pytest.raises(ParameterError):
        AdmetSchema.load(f)


def test_profile_validation_and_extras():
    data = compliant_profile()
    data["model_version"] = "v2"
    p = AdmetProfile.from_mapping(data)
    assert p.extras == {"model_version": "v2"}
    with pytest.raises(ParameterError):
        AdmetProfile.from_mapping({"ames_mutagenicity": 1.5})
    with pytest.raises(ParameterError):
        AdmetProfile.from_mapping({"caco2_logpapp": "low"})


# --- flagging ------------------------------------------------------------------------


def test_single_weak_property_is_flagged():
    prof = compliant_profile()
    prof["caco2_logpapp"] = -6.0
    flag = flag_weakness(prof)
    assert flag.property_id == "caco2_logpapp"
    assert flag.severity == pytest.approx(0.85)
    assert "Caco-2" in flag.rationale


def test_all_compliant_raises():
    with pytest.raises(NoWeakness):
        flag_weakness(compliant_profile())


def test_tie_goes_to_smallest_id():
    prof = compliant_profile()
    prof["herg_inhibition"] = 0.75
    prof["ames_mutagenicity"] = 0.75
    for _ in range(20):
        items = list(prof.items())
        random.shuffle(items)
        assert flag_weakness(dict(items)).property_id == "ames_mutagenicity"


def test_categorical_risk_label_scores_one():
    prof = compliant_profile()
    spec = next(s for s in SCHEMA.properties.values() if s.risk_labels)
    prof[spec.id] = sorted(spec.risk_labels)[0]
    assert severities(prof)[spec.id] == 1.0


def test_severity_is_distance_over_scale():
    spec = SCHEMA["hia"]
    assert spec.severity(0.2) == pytest.approx((0.5 - 0.2) / spec.scale)
    assert spec.severity(0.9) == 0.0


@st.composite
def risky_profiles(draw):
    prof = compliant_profile()
    ids = draw(st.lists(st.sampled_from(sorted(SCHEMA.properties)), min_size=1, max_size=6, unique=True))
    for pid in ids:
        spec = SCHEMA[pid]
        if spec.direction == "categorical":
            if spec.risk_labels:
                prof[pid] = sorted(spec.risk_labels)[0]
        elif spec.risk_threshold is not None:
            gap = draw(st.sampled_from([0.1, 0.25, 0.5]))  # repeated gaps create ties
            if spec.kind == "probability":
                prof[pid] = min(1.0, spec.risk_threshold + gap) if spec.direction == "lower_better" else max(0.0, spec.risk_threshold - gap)
            else:
                prof[pid] = spec.risk_threshold + (gap if spec.direction == "lower_better" else -gap)
    return prof


@given(risky_profiles(), st.randoms(use_true_random=False))
def test_flag_invariant_under_entry_order(prof, rnd):
    try:
        want = flag_weakness(prof)
    except NoWeakness:
        return
    items = list(prof.items())
    for _ in range(5):
        rnd.shuffle(items)
        assert flag_weakness(dict(items)) == want
    sev = severities(prof)
    top = max(sev.values())
    assert want.severity == top
    assert want.property_id == min(p for p, s in sev.items() if s == top)


# --- distribution ------------------------------------------------------------------------


def test_round_one_share():
    flags = ["caco2_logpapp"] * 59 + ["herg_inhibition"] * 20 + ["logs"] * 20
    assert weakness_distribution(flags).property_shares["caco2_logpapp"] == 59.6


def test_round_two_share():
    flags = ["caco2_logpapp"] * 66 + ["herg_inhibition"] * 29
    assert weakness_distribution(flags).property_shares["caco2_logpapp"] == 69.5


def test_single_flag_is_everything():
    d = weakness_distribution([WeaknessFlag("hia", 0.5, "x")])
    assert d.property_shares == {"hia": 100.0}
    assert d.category_shares == {"Absorption": 100.0}


def test_empty_distribution_raises():
    with pytest.raises(EmptyInput):
        weakness_distribution([])


def test_invalid_smiles_reported_under_other():
    d = weakness_distribution(["hia"] * 3, invalid_smiles=1)
    assert d.category_of[INVALID_SMILES] == OTHER
    assert d.property_shares[INVALID_SMILES] == 25.0


@given(st.lists(st.sampled_from(sorted(SCHEMA.properties)), min_size=1, max_size=300), st.integers(0, 5))
def test_shares_sum_to_hundred(ids, invalid):
    d = weakness_distribution(ids, invalid_smiles=invalid)
    assert sum(d.property_shares.values()) == pytest.approx(100.0, abs=1e-9)
    assert sum(d.category_shares.values()) == pytest.approx(100.0, abs=0.1)
    for cat, share in d.category_shares.items():
        members = sum(v for p, v in d.property_shares.items() if d.category_of[p] == cat)
        assert share == pytest.approx(members, abs=1e-9)
    for pid, n in d.counts.items():
        assert abs(d.property_shares[pid] - 100 * n / d.total) <= 0.1 + 1e-9


def test_distribution_table_shape():
    r1 = weakness_distribution(["caco2_logpapp"] * 59 + ["herg_inhibition"] * 40)
    r2 = weakness_distribution(["caco2_logpapp"] * 66 + ["logs"] * 29)
    lines = distribution_tsv({"round_1": r1, "round_2": r2}).splitlines()
    assert lines[0] == "category\tproperty\tround_1\tround_2"
    assert "Absorption\tCaco-2 Permeability (logPaap)\t59.6\t69.5" in lines
    assert lines[-1] == "\tTotal entries\t99\t95"
