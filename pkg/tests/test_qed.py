from __future__ import annotations

import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from leadscreen.descriptors import DescriptorSet, compute_all
from leadscreen.errors import ParameterError
from leadscreen.qed import (
    DESIRABILITY_FLOOR,
    NO_ALERT_ENGINE,
    PROPERTIES,
    AdsParams,
    DesirabilityParams,
    alert_count,
    default_params,
    desirability,
    qed,
    qed_inputs,
    score_molecule,
    weighted_geometric_mean,
)
from leadscreen.smiles import parse
from oracles import geometric_mean

RANGES = {"MW": (0, 1000), "ALOGP": (-10, 12), "HBA": (0, 20), "HBD": (0, 15), "PSA": (0, 300),
          "ROTB": (0, 30), "AROM": (0, 8), "ALERTS": (0, 10)}


def desc_from(props: dict[str, float]) -> DescriptorSet:
    return DescriptorSet(
        mw=props["MW"], logp=props["ALOGP"], hbd=int(props["HBD"]), hba=int(props["HBA"]),
        rotb=int(props["ROTB"]), tpsa=props["PSA"], mr=80.0, atom_count_total=50,
        heavy_atom_count=25, aromatic_rings=int(props["AROM"]),
    )


def random_vectors(n: int, seed: int) -> list[dict[str, float]]:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        out.append({p: rng.uniform(0, 1) for p in PROPERTIES})
    return out


# --- worked examples ------------------------------------------------------------


def test_all_ones_give_one():
    w = default_params().weights
    assert weighted_geometric_mean({p: 1.0 for p in PROPERTIES}, w) == 1.0


@pytest.mark.parametrize("d", [1e-6, 0.013, 0.25, 0.5, 0.77, 0.999999])
def test_homogeneity(d):
    w = {p: random.Random(3).uniform(0.1, 5) for p in PROPERTIES}
    assert weighted_geometric_mean({p: d for p in PROPERTIES}, w) == d


def test_two_property_equal_weights():
    assert weighted_geometric_mean({"a": 0.25, "b": 1.0}, {"a": 1.0, "b": 1.0}) == pytest.approx(0.5, rel=1e-15)


def test_matches_reference_toolkit(qed_reference):
    assert len(qed_reference) >= 40
    for row in qed_reference:
        props = {p: float(row[p]) for p in PROPERTIES}
        got = qed(desc_from(props), alerts=int(props["ALERTS"]))
        assert got.value == pytest.approx(float(row["qed"]), abs=1e-9), row


def test_value_is_weighted_geometric_mean_of_desirabilities():
    d = compute_all(parse("CC(=O)Oc1ccccc1C(=O)O"))
    s = qed(d)
    w = default_params().weights
    want = geometric_mean([s.desirabilities[p] for p in PROPERTIES], [w[p] for p in PROPERTIES])
    assert s.value == pytest.approx(want, rel=1e-12)


def test_default_alert_engine_counts_zero_and_notes_it():
    m = parse("CCO")
    assert alert_count(m) == 0
    s = score_molecule(m, compute_all(m))
    assert NO_ALERT_ENGINE in s.notes


class Stub:
    def __init__(self, n):
        self.n = n

    def count(self, mol):
        return self.n


def test_injected_alert_engine_passes_through():
    m = parse("CCO")
    d = compute_all(m)
    s = score_molecule(m, d, engine=Stub(3))
    assert s.desirabilities["ALERTS"] == desirability("ALERTS", 3)
    assert s.value == qed(d, alerts=3).value
    assert NO_ALERT_ENGINE not in s.notes


def test_negative_alert_count_rejected():
    with pytest.raises(ParameterError):
        alert_count(parse("CCO"), Stub(-1))
    with pytest.raises(ParameterError):
        qed(compute_all(parse("CCO")), alerts=-2)


def test_malformed_params_rejected():
    p = default_params()
    with pytest.raises(ParameterError):
        DesirabilityParams({k: v for k, v in p.functions.items() if k != "MW"}, p.weights)
    with pytest.raises(ParameterError):
        DesirabilityParams(p.functions, {k: 0.0 for k in p.weights})
    with pytest.raises(ParameterError):
        DesirabilityParams(p.functions, {**p.weights, "MW": -1.0})
    bad = dict(p.functions)
    bad["MW"] = AdsParams(1, 1, 1, 1, 0, 1, 1)
    with pytest.raises(ParameterError):
        DesirabilityParams(bad, p.weights)


def test_params_file_errors(tmp_path):
    f = tmp_path / "p.tsv"
    f.write_text("name\ta\nMW\tx\n")
    with pytest.raises(ParameterError):
        DesirabilityParams.load(f)
    with pytest.raises(ParameterError):
        DesirabilityParams.load(tmp_path / "missing.tsv")


def test_weight_set_is_mean_optimised():
    w = default_params().weights
    assert (w["MW"], w["ALOGP"], w["HBA"], w["HBD"], w["PSA"], w["ROTB"], w["AROM"], w["ALERTS"]) == (
        0.66, 0.46, 0.05, 0.61, 0.06, 0.65, 0.48, 0.95,
    )


# --- properties ----------------------------------------------------------------------


def test_desirability_shape_on_grid():
    for name, (lo, hi) in RANGES.items():
        prev = None
        steps = 2000
        for k in range(steps + 1):
            x = lo + (hi - lo) * k / steps
            d = desirability(name, x)
            assert DESIRABILITY_FLOOR <= d <= 1.0
            if prev is not None:
                assert abs(d - prev) < 0.1, (name, x)  # no jumps at this resolution
            prev = d


props = st.fixed_dictionaries({
    p: (st.floats(lo, hi, allow_nan=False) if p in ("MW", "ALOGP", "PSA") else st.integers(lo, hi))
    for p, (lo, hi) in RANGES.items()
})


@given(props)
def test_range(values):
    s = qed(desc_from(values), alerts=int(values["ALERTS"]))
    assert 0.0 < s.value <= 1.0


@given(props, st.floats(1e-3, 1e3))
def test_weight_scaling_invariance(values, k):
    d = desc_from(values)
    a = qed(d, int(values["ALERTS"])).value
    b = qed(d, int(values["ALERTS"]), default_params().scaled(k)).value
    assert b == pytest.approx(a, rel=1e-12)


@given(st.lists(st.floats(1e-6, 1.0), min_size=8, max_size=8), st.integers(0, 7), st.floats(0, 1))
def test_monotone_in_each_desirability(ds, i, bump):
    w = default_params().weights
    base = dict(zip(PROPERTIES, ds))
    raised = dict(base)
    raised[PROPERTIES[i]] = base[PROPERTIES[i]] + (1.0 - base[PROPERTIES[i]]) * bump
    assert weighted_geometric_mean(raised, w) >= weighted_geometric_mean(base, w) * (1 - 1e-12)


def test_bulk_properties_10k():
    """Range, scaling and monotonicity on 10,000 seeded vectors."""
    w = default_params().weights
    scaled = {k: v * 7.5 for k, v in w.items()}
    for v in random_vectors(10_000, seed=5):
        g = weighted_geometric_mean(v, w)
        assert 0.0 < g <= 1.0
        assert weighted_geometric_mean(v, scaled) == pytest.approx(g, rel=1e-12)
        p = PROPERTIES[int(v["MW"] * 8) % 8]
        up = dict(v)
        up[p] = min(1.0, v[p] + 0.1)
        assert weighted_geometric_mean(up, w) >= g * (1 - 1e-12)
        assert math.isclose(g, geometric_mean([max(DESIRABILITY_FLOOR, v[q]) for q in PROPERTIES],
                                              [w[q] for q in PROPERTIES]), rel_tol=1e-12)


def test_inputs_mapping():
    d = compute_all(parse("c1ccccc1O"))
    assert qed_inputs(d, 2) == {"MW": d.mw, "ALOGP": d.logp, "HBA": d.hba, "HBD": d.hbd, "PSA": d.tpsa,
                                "ROTB": d.rotb, "AROM": d.aromatic_rings, "ALERTS": 2}
