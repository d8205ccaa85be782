"""Wildman-Crippen logP and molar refractivity by atom typing.

Typing rules live in ``data/crippen.tsv`` as ordered SMARTS rows; each atom
(hydrogens made explicit) takes the first row whose root matches it. Atoms no
row matches take the element wildcard type (CS, HS, NS, OS) or contribute 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from leadscreen.data import read_table
from leadscreen.smiles.graph import MolGraph
from leadscreen.smiles.smarts import Pattern, compile_smarts, with_explicit_hydrogens


@dataclass(frozen=True)
class CrippenType:
    name: str
    pattern: Pattern
    logp: float
    mr: float


_WILDCARD = {"C": "CS", "H": "HS", "N": "NS", "O": "OS"}


@lru_cache(maxsize=None)
def crippen_types() -> tuple[CrippenType, ...]:
    return tuple(
        CrippenType(
            name=row["type"],
            pattern=compile_smarts(row["smarts"]),
            logp=float(row["logp"]),
            mr=float(row["mr"]) if row["mr"] else 0.0,
        )
        for row in read_table("crippen.tsv")
    )


def atom_types(mol: MolGraph) -> list[str]:
    """Crippen type of every atom in the hydrogen-expanded graph (heavy atoms first)."""
    full = with_explicit_hydrogens(mol)
    table = crippen_types()
    wild = {t.name: t for t in table}
    out = []
    for i, atom in enumerate(full.atoms):
        for t in table:
            if t.pattern.matches_at(full, i):
                out.append(t.name)
                break
        else:
            fallback = _WILDCARD.get(atom.element)
            out.append(fallback if fallback in wild else "")
    return out


def crippen(mol: MolGraph) -> tuple[float, float]:
    """(logP, molar refractivity) summed over all atoms including hydrogens."""
    by_name = {}
    for t in crippen_types():
        by_name.setdefault(t.name, t)
    logp = mr = 0.0
    for name in atom_types(mol):
        if not name:
            continue
        t = by_name[name]
        logp += t.logp
        mr += t.mr
    return logp, mr
