#!/usr/bin/env python3
"""Write the descriptor reference corpus used by the test suite.

Offline maintenance script; needs RDKit (not a runtime dependency):

    /tmp/rdenv/bin/python scripts/make_reference_corpus.py
"""

from __future__ import annotations

import argparse
from pathlib import Path

import rdkit
from rdkit import Chem
from rdkit.Chem import Crippen, Descriptors, Lipinski, rdMolDescriptors

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "reference_corpus.tsv"

MOLECULES = {
    "aspirin": "CC(=O)Oc1ccccc1C(=O)O",
    "paracetamol": "CC(=O)Nc1ccc(O)cc1",
    "ibuprofen": "CC(C)Cc1ccc(C(C)C(=O)O)cc1",
    "caffeine": "Cn1c(=O)c2c(ncn2C)n(C)c1=O",
    "nicotine": "CN1CCCC1c1cccnc1",
    "naproxen": "COc1ccc2cc(C(C)C(=O)O)ccc2c1",
    "diazepam": "CN1C(=O)CN=C(c2ccccc2)c2cc(Cl)ccc21",
    "metformin": "CN(C)C(=N)NC(=N)N",
    "sildenafil": "CCCc1nn(C)c2c(=O)[nH]c(-c3cc(S(=O)(=O)N4CCN(C)CC4)ccc3OCC)nc12",
    "imatinib": "Cc1ccc(NC(=O)c2ccc(CN3CCN(C)CC3)cc2)cc1Nc1nccc(-c2cccnc2)n1",
    "celecoxib": "Cc1ccc(-c2cc(C(F)(F)F)nn2-c2ccc(S(N)(=O)=O)cc2)cc1",
    "lidocaine": "CCN(CC)CC(=O)Nc1c(C)cccc1C",
    "propranolol": "CC(C)NCC(O)COc1cccc2ccccc12",
    "fluoxetine": "CNCCC(Oc1ccc(C(F)(F)F)cc1)c1ccccc1",
    "chlorpromazine": "CN(C)CCCN1c2ccccc2Sc2ccc(Cl)cc21",
    "furosemide": "NS(=O)(=O)c1cc(C(=O)O)c(NCc2ccco2)cc1Cl",
    "quinine": "COc1ccc2nccc(C(O)C3CC4CCN3CC4C=C)c2c1",
    "warfarin": "CC(=O)CC(c1ccccc1)c1c(O)c2ccccc2oc1=O",
    "tamoxifen": "CCC(=C(c1ccccc1)c1ccc(OCCN(C)C)cc1)c1ccccc1",
    "venetoclax": (
        "CC1(C)CCC(=C(C1)c1ccc(Cl)cc1)CN1CCN(CC1)c1ccc(C(=O)NS(=O)(=O)c2ccc(NCC3CCOCC3)"
        "c(c2)[N+](=O)[O-])c(Oc2cnc3[nH]ccc3c2)c1"
    ),
}


def rotatable(mol: Chem.Mol) -> int:
    """Single acyclic bonds between non-terminal heavy atoms, no sp ends, no C(=O)-N."""
    def has_triple(atom: Chem.Atom) -> bool:
        return any(b.GetBondType() == Chem.BondType.TRIPLE for b in atom.GetBonds())

    def carbonyl_c(atom: Chem.Atom) -> bool:
        return atom.GetSymbol() == "C" and any(
            b.GetBondType() == Chem.BondType.DOUBLE and b.GetOtherAtom(atom).GetSymbol() == "O"
            for b in atom.GetBonds()
        )

    n = 0
    for b in mol.GetBonds():
        if b.GetBondType() != Chem.BondType.SINGLE or b.IsInRing():
            continue
        a, c = b.GetBeginAtom(), b.GetEndAtom()
        if a.GetDegree() < 2 or c.GetDegree() < 2 or has_triple(a) or has_triple(c):
            continue
        if (carbonyl_c(a) and c.GetSymbol() == "N") or (carbonyl_c(c) and a.GetSymbol() == "N"):
            continue
        n += 1
    return n


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    lines = [
        f"# Descriptor reference values computed with RDKit {rdkit.__version__}.",
        "# mw=MolWt logp=MolLogP hbd=NHOHCount hba=NOCount tpsa=TPSA(N/O only) mr=MolMR",
        "# aromatic_rings=CalcNumAromaticRings; rotb mirrors the package definition.",
        "# format-version: 1",
        "name\tsmiles\tmw\tlogp\thbd\thba\trotb\ttpsa\tmr\taromatic_rings\theavy_atoms",
    ]
    for name, smi in MOLECULES.items():
        mol = Chem.MolFromSmiles(smi)
        # write the kekule-free canonical form the package will also read
        can = Chem.MolToSmiles(mol)
        row = [
            name,
            can,
            f"{Descriptors.MolWt(mol):.4f}",
            f"{Crippen.MolLogP(mol):.4f}",
            str(Lipinski.NHOHCount(mol)),
            str(Lipinski.NOCount(mol)),
            str(rotatable(mol)),
            f"{rdMolDescriptors.CalcTPSA(mol):.4f}",
            f"{Crippen.MolMR(mol):.4f}",
            str(rdMolDescriptors.CalcNumAromaticRings(mol)),
            str(mol.GetNumHeavyAtoms()),
        ]
        lines.append("\t".join(row))
    args.out.write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
