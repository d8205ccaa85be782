#!/usr/bin/env python3
"""Rebuild the replay fixtures of the bundled demo.

The demo never talks to real services. This script runs the demo pipeline in
record mode against an in-process toy service (httpx.MockTransport) and
stores every exchange as a fixture. The toy service answers in the wire
formats of the real endpoints:

* protein search: FASTA text, as returned by a UniProt REST search;
* drug search: JSON shaped like a ChEMBL ``molecule/search.json`` page;
* property and affinity prediction: the generic JSON contract of the clients.

Predicted values are deterministic functions of the molecule's descriptors,
made up for demonstration. Every fixture carries a ``note`` saying so.

    python scripts/build_demo_fixtures.py
"""

from __future__ import annotations

import json
import math
import shutil
import tempfile
from dataclasses import replace
from pathlib import Path

import httpx

from leadscreen.clients import RecordingTransport
from leadscreen.descriptors import compute_all
from leadscreen.pipeline import Pipeline, load_config
from leadscreen.pk import default_schema
from leadscreen.smiles import parse

DEMO = Path(__file__).resolve().parents[1] / "src" / "leadscreen" / "demo"
NOTE = "synthetic: produced by scripts/build_demo_fixtures.py, not a recorded live response"

BCL2_FASTA = (
    ">sp|P10415|BCL2_HUMAN Apoptosis regulator Bcl-2 OS=Homo sapiens OX=9606 GN=BCL2 PE=1 SV=2\n"
    "MAHAGRTGYDNREIVMKYIHYKLSQRGYEWDAGDVGAAPPGAAPAPGIFSSQPGHTPHPAASRDPVARTSPLQTPAAPGAAAGPALSPVPPVVHLTLRQAGDDFSRRYRRDFAEMSSQLHLTPFTARGRFATVVEELFRDGVNWGRIVAFFEFGGVMCVESVNREMSPLVDNIALWMTEYLNRHLHTWIQDNGGWDAFVELYGPSMRPLFDFSWLSLKTLLSLALVGACITLGAYLGHK\n"
)
VENETOCLAX = (
    "CC1(C)CCC(=C(C1)c1ccc(Cl)cc1)CN1CCN(CC1)c1ccc(C(=O)NS(=O)(=O)c2ccc(NCC3CCOCC3)"
    "c(c2)[N+](=O)[O-])c(Oc2cnc3[nH]ccc3c2)c1"
)


def _sigmoid(z: float) -> float:
    return 1.0 / (1.0 + math.exp(-z))


def _p(x: float) -> float:
    return round(min(0.99, max(0.01, x)), 3)


def toy_profile(smiles: str) -> dict:
    mol = parse(smiles)
    d = compute_all(mol)
    nitro = "[N+](=O)[O-]" in smiles or "N(=O)=O" in smiles
    aniline = any(
        a.element == "N" and not a.aromatic and a.hcount == 2
        and any(mol.atoms[j].aromatic for j, _ in mol.neighbors[i])
        for i, a in enumerate(mol.atoms)
    )
    basic_n = sum(1 for a in mol.atoms if a.element == "N" and not a.aromatic and a.hcount < 2)
    arom_frac = sum(1 for a in mol.atoms if a.aromatic) / max(1, d.heavy_atom_count)
    values: dict[str, object] = {}
    for pid, spec in default_schema().properties.items():
        if spec.kind == "probability":
            values[pid] = 0.15
        elif spec.kind == "numeric":
            values[pid] = 0.0
    logs = 0.16 - 0.63 * d.logp - 0.0062 * d.mw + 0.066 * d.rotb - 0.74 * arom_frac
    ppb = min(99.5, 55.0 + 9.0 * max(0.0, d.logp))
    values.update({
        "caco2_logpapp": round(-4.25 - 0.011 * d.tpsa + 0.06 * min(d.logp, 5.0), 3),
        "mdck_permeability": round(-4.4 - 0.007 * d.tpsa, 3),
        "hia": _p(_sigmoid((150.0 - d.tpsa) / 20.0)),
        "hob_20": _p(_sigmoid((130.0 - d.tpsa) / 25.0)),
        "hob_50": _p(_sigmoid((110.0 - d.tpsa) / 25.0)),
        "pgp_substrate": _p(0.1 + 0.0008 * max(0.0, d.mw - 300)),
        "ppb": round(ppb, 2),
        "fraction_unbound": round((100.0 - ppb) / 100.0, 3),
        "bbb_penetration": "BBB+" if d.tpsa < 90 else "BBB-",
        "biodegradation": "non-biodegradable" if d.aromatic_rings >= 4 else "biodegradable",
        "ames_mutagenicity": _p(0.85 if nitro else 0.7 if aniline else 0.2),
        "herg_inhibition": _p(_sigmoid(d.logp - 4.5 + 0.8 * basic_n)),
        "hepatotoxicity_dili": _p(0.25 + 0.05 * d.aromatic_rings),
        "cyp3a4_inhibitor": _p(0.1 + 0.0006 * d.mw),
        "logp": round(d.logp, 3),
        "logs": round(logs, 3),
        "logd": round(d.logp - 0.5, 3),
        "melting_point": round(80 + 0.3 * d.mw, 1),
        "boiling_point": round(200 + 0.6 * d.mw, 1),
    })
    values["toy_model_version"] = "demo-1"  # not in the schema; lands in the extras bucket
    return values


def toy_pkd(smiles: str) -> float:
    d = compute_all(parse(smiles))
    return round(3.6 + 0.0065 * d.mw + 0.25 * d.aromatic_rings - 0.004 * d.tpsa, 2)


def handler(request: httpx.Request) -> httpx.Response:
    url = request.url
    if url.host == "rest.uniprot.org":
        if "gene_exact:BCL2" in url.params.get("query", ""):
            return httpx.Response(200, text=BCL2_FASTA, headers={"content-type": "text/plain;format=fasta"})
        return httpx.Response(200, text="", headers={"content-type": "text/plain;format=fasta"})
    if url.host == "www.ebi.ac.uk":
        q = url.params.get("q", "").lower()
        molecules = []
        if q == "venetoclax":
            molecules = [{
                "molecule_chembl_id": "CHEMBL3137309",
                "pref_name": "VENETOCLAX",
                "molecule_structures": {"canonical_smiles": VENETOCLAX},
            }]
        body = {"molecules": molecules, "page_meta": {"limit": 20, "offset": 0, "total_count": len(molecules)}}
        return httpx.Response(200, json=body)
    payload = json.loads(request.content or b"{}")
    if url.path.endswith("/admet"):
        results = [{"smiles": s, "properties": toy_profile(s)} for s in payload["smiles"]]
        return httpx.Response(200, json={"results": results})
    if url.path.endswith("/affinity"):
        return httpx.Response(200, json={"pkd": toy_pkd(payload["smiles"])})
    return httpx.Response(404, text="unknown endpoint")


def main() -> None:
    fixtures = DEMO / "fixtures"
    if fixtures.exists():
        shutil.rmtree(fixtures)
    with tempfile.TemporaryDirectory() as tmp:
        work = Path(tmp) / "run"
        config = load_config(DEMO / "config.yaml").with_overrides(workdir=work)
        config = replace(config, clients=config.clients.with_overrides(mode="record"))
        transport = RecordingTransport(fixtures, inner=httpx.MockTransport(handler), note=NOTE)
        pipe = Pipeline(config, transport=transport)
        try:
            pipe.run_all()
        finally:
            pipe.close()
        print((work / "select" / "decisions.tsv").read_text())
        print((work / "flag" / "weakness.tsv").read_text())
    print(f"{len(list(fixtures.glob('*.json')))} fixtures in {fixtures}")


if __name__ == "__main__":
    main()
