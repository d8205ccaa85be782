from __future__ import annotations

import random
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from leadscreen.descriptors import DescriptorSet
from leadscreen.errors import ParameterError
from leadscreen.rules import (
    PROFILES,
    RULES,
    RuleSet,
    SelectionCriteria,
    Strictness,
    default_rules,
    evaluate_rules,
    radar_tsv,
    report_tsv,
    select,
)
from oracles import brute_force_verdicts, threshold_rows

INT_FIELDS = {"hbd", "hba", "rotb", "atom_count_total", "heavy_atom_count", "aromatic_rings"}


def make(mw, logp, hbd, hba, rotb, tpsa, mr, atoms, rings) -> DescriptorSet:
    return DescriptorSet(mw=float(mw), logp=float(logp), hbd=hbd, hba=hba, rotb=rotb, tpsa=float(tpsa), mr=float(mr),
                         atom_count_total=atoms * 2, heavy_atom_count=atoms, aromatic_rings=rings)


def random_descriptor_set(rng: random.Random) -> DescriptorSet:
    """Values drawn around the thresholds, hitting the exact boundaries often."""
    edges: dict[str, list[float]] = {}
    for row in threshold_rows():
        for k in ("min", "max"):
            if row[k]:
                edges.setdefault(row["field"], []).append(float(row[k]))
    spans = {"mw": (50, 900), "logp": (-4, 9), "hbd": (0, 12), "hba": (0, 20), "rotb": (0, 20),
             "tpsa": (0, 250), "mr": (10, 200), "heavy_atom_count": (3, 100), "aromatic_rings": (0, 7)}
    vals = {}
    for f, (lo, hi) in spans.items():
        if rng.random() < 0.3 and f in edges:
            v = rng.choice(edges[f])
        else:
            v = rng.uniform(lo, hi)
        vals[f] = int(round(v)) if f in INT_FIELDS else v
    vals["atom_count_total"] = vals["heavy_atom_count"] + rng.randint(0, 60)
    return DescriptorSet(**vals)


def as_values(d: DescriptorSet) -> dict[str, float]:
    return {f: getattr(d, f) for f in DescriptorSet.__dataclass_fields__}


# --- worked examples ------------------------------------------------------------


def test_everything_violated():
    r = evaluate_rules(make(600, 6, 6, 11, 11, 150, 135, 75, 5))
    assert r.verdicts == {rule: False for rule in RULES}
    assert r.rules_passed == 0


def test_all_but_rule_of_three():
    r = evaluate_rules(make(300, 2, 2, 4, 4, 80, 80, 40, 2))
    assert r.verdicts == {"lipinski": True, "veber": True, "ghose": True, "ro3": False, "oprea": True}
    assert r.rules_passed == 4
    assert [c.criterion for c in r.details["ro3"] if not c.passed] == ["MW"]


def test_lipinski_tolerates_one_violation():
    r = evaluate_rules(make(510, 2, 2, 4, 4, 80, 80, 40, 2))
    assert r.lipinski is True
    assert r.violations("lipinski") == 1


def test_lipinski_fails_on_two_violations():
    assert evaluate_rules(make(510, 5.5, 2, 4, 4, 80, 80, 40, 2)).lipinski is False


def test_veber_needs_both():
    assert evaluate_rules(make(300, 2, 2, 4, 11, 80, 80, 40, 2)).veber is False
    assert evaluate_rules(make(300, 2, 2, 4, 10, 140, 80, 40, 2)).veber is True


def test_oprea_tolerates_one_violation():
    assert evaluate_rules(make(300, 2, 2, 9, 4, 80, 80, 40, 2)).oprea is True
    assert evaluate_rules(make(300, 2, 2, 9, 9, 80, 80, 40, 2)).oprea is False


@pytest.mark.parametrize("mw, ok", [(299.999, True), (300.0, False)])
def test_ro3_weight_bound_is_strict(mw, ok):
    assert evaluate_rules(make(mw, 3, 3, 4, 4, 80, 80, 40, 2)).ro3 is ok


@pytest.mark.parametrize("value, ok", [(160, True), (480, True), (159.99, False), (480.01, False)])
def test_ghose_range_inclusive(value, ok):
    assert evaluate_rules(make(value, 2, 2, 4, 4, 80, 80, 40, 2)).ghose is ok


def test_ghose_reads_heavy_atoms():
    d = make(300, 2, 2, 4, 4, 80, 80, 19, 2)
    assert d.atom_count_total >= 20
    assert evaluate_rules(d).ghose is False


def test_report_reproduces_verdicts_from_flags():
    rules = default_rules()
    r = evaluate_rules(make(450, 4.9, 4, 9, 9, 139, 120, 60, 4))
    for rule in RULES:
        fails = sum(not c.passed for c in r.details[rule])
        assert r.verdicts[rule] == (fails <= rules.max_violations[rule])


# --- selection gate --------------------------------------------------------------


def test_four_rule_candidate_selected():
    assert select(4, 0.68, 6.18, "main") is True


@pytest.mark.parametrize(
    "rules, q, pkd, profile, want",
    [
        (3, 0.55, 7.0, "main", False),
        (3, 0.56, 6.0, "main", False),
        (3, 0.56, 6.01, "main", True),
        (2, 0.9, 9.0, "main", False),
        (4, 0.7, 5.6, "si", True),
        (3, 0.7, 5.6, "si", False),
        (4, 0.6, 5.6, "si", False),
        (4, 0.7, 5.5, "si", False),
    ],
)
def test_selection_boundaries(rules, q, pkd, profile, want):
    assert select(rules, q, pkd, profile) is want


def test_select_accepts_report_and_score_objects():
    class Score:
        value = 0.7

    report = evaluate_rules(make(300, 2, 2, 4, 4, 80, 80, 40, 2))
    assert select(report, Score(), 6.5) is True


def test_profiles_match_documented_values():
    assert PROFILES["main"] == SelectionCriteria(3, 0.55, 6.0, Strictness.AT_LEAST)
    assert PROFILES["si"] == SelectionCriteria(3, 0.6, 5.5, Strictness.MORE_THAN)


def test_selection_criteria_validation():
    with pytest.raises(ParameterError):
        SelectionCriteria(6, 0.5, 6.0)
    with pytest.raises(ParameterError):
        SelectionCriteria(3, float("nan"), 6.0)
    with pytest.raises(ParameterError):
        select(3, 0.7, 7.0, "nope")


def test_threshold_file_errors(tmp_path):
    f = tmp_path / "t.tsv"
    f.write_text("rule\tcriterion\tfield\tmin\tmax\tmin_inclusive\tmax_inclusive\tmax_violations\n"
                 "x\ty\tnot_a_field\t\t1\t1\t1\t0\n")
    with pytest.raises(ParameterError):
        RuleSet.load(f)


# --- exports ------------------------------------------------------------------------


def test_report_tsv_rows():
    r = evaluate_rules(make(300, 2, 2, 4, 4, 80, 80, 40, 2))
    lines = report_tsv([("m1", r)]).splitlines()
    assert lines[0].split("\t") == ["id", "rule", "criterion", "observed", "threshold", "criterion_pass", "rule_pass"]
    assert len(lines) == 1 + len(threshold_rows())
    assert "m1\tro3\tMW\t300.0000\tx<300\t0\t0" in lines


def test_radar_tsv_has_limits():
    lines = radar_tsv([("m1", make(300, 2, 2, 4, 4, 80, 80, 40, 2))]).splitlines()
    assert "m1\tghose:MW\tmw\t300.0000\t160\t480" in lines


# --- oracle equivalence and monotonicity ----------------------------------------------------


def test_oracle_equivalence_randomized():
    rng = random.Random(2024)
    for _ in range(1000):
        d = random_descriptor_set(rng)
        assert evaluate_rules(d).verdicts == brute_force_verdicts(as_values(d)), d


@given(st.randoms(use_true_random=False), st.floats(0.0, 1.0))
def test_moving_toward_compliance_never_breaks_a_rule(rnd, t):
    rules = default_rules()
    d = random_descriptor_set(rnd)
    before = evaluate_rules(d).verdicts
    rule = rnd.choice(RULES)
    c = rnd.choice(rules.criteria[rule])
    v = getattr(d, c.field)
    target = v
    if c.low is not None and v < c.low:
        target = c.low
    elif c.high is not None and v > c.high:
        target = c.high
    new = v + (target - v) * t
    if c.field in INT_FIELDS:
        new = int(round(new)) if abs(target - v) > 0 else v
    after = evaluate_rules(replace(d, **{c.field: new})).verdicts
    if before[rule]:
        assert after[rule]
