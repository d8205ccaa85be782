#!/usr/bin/env python3
"""Regenerate the element, isotope and Crippen data tables shipped in
``src/leadscreen/data``.

This is an offline maintenance script. It needs RDKit, which is *not* a
runtime dependency of leadscreen:

    python -m venv /tmp/rdenv && /tmp/rdenv/bin/pip install rdkit
    /tmp/rdenv/bin/python scripts/build_data_tables.py
"""

from __future__ import annotations

import argparse
from pathlib import Path

import rdkit
from rdkit import Chem, RDConfig

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "leadscreen" / "data"

# isotope tables are restricted to elements a drug-discovery SMILES will plausibly carry
ISOTOPE_ELEMENTS = (1, 5, 6, 7, 8, 9, 11, 14, 15, 16, 17, 19, 34, 35, 53)


def write_elements(out: Path) -> None:
    pt = Chem.GetPeriodicTable()
    lines = [
        "# Standard atomic weights (g/mol) by element.",
        f"# provenance: RDKit {rdkit.__version__} periodic table (IUPAC conventional weights).",
        "# format-version: 1",
        "z\tsymbol\tweight",
    ]
    for z in range(1, 119):
        lines.append(f"{z}\t{pt.GetElementSymbol(z)}\t{pt.GetAtomicWeight(z)!r}")
    out.write_text("\n".join(lines) + "\n")


def write_isotopes(out: Path) -> None:
    pt = Chem.GetPeriodicTable()
    lines = [
        "# Exact nuclide masses (Da) for isotope-labelled atoms.",
        f"# provenance: RDKit {rdkit.__version__} isotope table.",
        "# format-version: 1",
        "symbol\tmass_number\tmass",
    ]
    for z in ISOTOPE_ELEMENTS:
        sym = pt.GetElementSymbol(z)
        common = pt.GetMostCommonIsotope(z)
        for a in range(max(1, common - 12), common + 13):
            m = pt.GetMassForIsotope(z, a)
            if m > 0:
                lines.append(f"{sym}\t{a}\t{m!r}")
    out.write_text("\n".join(lines) + "\n")


# The compiled RDKit typer (Crippen.cpp) writes these two rows with atomic
# numbers, so aromatic n/o/s count as N/O/S there; Crippen.txt does not.
# The compiled form is what MolLogP/MolMR return, so mirror it.
CRIPPEN_OVERRIDES = {
    "[#1]O[!C;!N;!O;!S]": "[#1]O[!#6;!#7;!#8;!#16]",
    "[#1][!C;!N;!O]": "[#1][!#6;!#7;!#8]",
}


def write_crippen(out: Path) -> None:
    src = Path(RDConfig.RDDataDir) / "Crippen.txt"
    lines = [
        "# Wildman-Crippen atom types with logP and molar-refractivity contributions.",
        "# provenance: Wildman & Crippen, J. Chem. Inf. Comput. Sci. 39 (1999) 868;",
        f"#   SMARTS typing rules from RDKit {rdkit.__version__} Data/Crippen.txt (BSD licence),",
        "#   two hydrogen rows aligned with RDKit's compiled table (atomic-number form).",
        "# Rows are tried in order; the first pattern whose root matches an atom types it.",
        "# A blank mr is a published gap and contributes 0.",
        "# format-version: 1",
        "type\tsmarts\tlogp\tmr",
    ]
    for raw in src.read_text().splitlines():
        if not raw.strip() or raw.startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) < 3 or not parts[0].strip():
            continue
        typ, smarts, logp = parts[0], parts[1], parts[2]
        smarts = CRIPPEN_OVERRIDES.get(smarts, smarts)
        mr = parts[3] if len(parts) > 3 else ""
        lines.append(f"{typ}\t{smarts}\t{logp}\t{mr}")
    out.write_text("\n".join(lines) + "\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=DATA_DIR)
    args = ap.parse_args()
    write_elements(args.out / "elements.tsv")
    write_isotopes(args.out / "isotopes.tsv")
    write_crippen(args.out / "crippen.tsv")


if __name__ == "__main__":
    main()
