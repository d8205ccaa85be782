#!/usr/bin/env python3
"""Write QED reference scores for fixed descriptor tuples (oracle for tests).

Offline maintenance script; needs RDKit:

    /tmp/rdenv/bin/python scripts/make_qed_reference.py
"""

from __future__ import annotations

import random
from pathlib import Path

import rdkit
from rdkit.Chem import QED

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "qed_reference.tsv"
FIELDS = ("MW", "ALOGP", "HBA", "HBD", "PSA", "ROTB", "AROM", "ALERTS")


def main() -> None:
    rng = random.Random(20240917)
    lines = [
        f"# QED (mean-optimised weights) from RDKit {rdkit.__version__} rdkit.Chem.QED.qed",
        "# computed directly from the listed property values.",
        "# format-version: 1",
        "\t".join(FIELDS + ("qed",)),
    ]
    for _ in range(40):
        props = QED.QEDproperties(
            MW=round(rng.uniform(80, 900), 3),
            ALOGP=round(rng.uniform(-3, 8), 3),
            HBA=rng.randint(0, 15),
            HBD=rng.randint(0, 8),
            PSA=round(rng.uniform(0, 200), 2),
            ROTB=rng.randint(0, 18),
            AROM=rng.randint(0, 6),
            ALERTS=rng.randint(0, 4),
        )
        score = QED.qed(None, w=QED.WEIGHT_MEAN, qedProperties=props)
        lines.append("\t".join(str(v) for v in props) + f"\t{score:.12f}")
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
