"""Counting descriptors, molecular weight and the aggregate :class:`DescriptorSet`."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, fields

from leadscreen.data import atomic_weights, isotope_masses
from leadscreen.descriptors.crippen import crippen
from leadscreen.descriptors.tpsa import tpsa
from leadscreen.smiles.graph import BondOrder, MolGraph


@dataclass(frozen=True)
class DescriptorSet:
    mw: float
    logp: float
    hbd: int
    hba: int
    rotb: int
    tpsa: float
    mr: float
    atom_count_total: int
    heavy_atom_count: int
    aromatic_rings: int


def _atom_mass(element: str, isotope: int | None) -> float:
    if isotope is not None:
        exact = isotope_masses().get((element, isotope))
        if exact is not None:
            return exact
        # unknown nuclide: the mass number is the best estimate we have
        return float(isotope)
    return atomic_weights()[element]


def molecular_weight(mol: MolGraph) -> float:
    h = atomic_weights()["H"]
    return sum(_atom_mass(a.element, a.isotope) + a.hcount * h for a in mol.atoms)


def hydrogen_count(mol: MolGraph) -> int:
    """Hydrogens as implicit/bracket counts plus explicit H atoms."""
    return sum(a.hcount for a in mol.atoms) + sum(1 for a in mol.atoms if a.element == "H")


def heavy_atom_count(mol: MolGraph) -> int:
    return sum(1 for a in mol.atoms if a.element != "H")


def hbd(mol: MolGraph) -> int:
    return sum(mol.total_h(i) for i, a in enumerate(mol.atoms) if a.element in ("N", "O"))


def hba(mol: MolGraph) -> int:
    return sum(1 for a in mol.atoms if a.element in ("N", "O"))


def _is_amide_bond(mol: MolGraph, i: int, j: int) -> bool:
    for c, n in ((i, j), (j, i)):
        if mol.atoms[c].element != "C" or mol.atoms[n].element != "N":
            continue
        for k, b in mol.neighbors[c]:
            if b.order is BondOrder.DOUBLE and mol.atoms[k].element == "O":
                return True
    return False


def _has_triple(mol: MolGraph, i: int) -> bool:
    return any(b.order is BondOrder.TRIPLE for _, b in mol.neighbors[i])


def rotatable_bonds(mol: MolGraph, exclude_amides: bool = True) -> int:
    count = 0
    for b in mol.bonds:
        if b.order is not BondOrder.SINGLE or b.in_ring:
            continue
        i, j = b.begin, b.end
        if mol.heavy_degree(i) < 2 or mol.heavy_degree(j) < 2:
            continue
        # a bond onto an sp carbon spins the whole linear unit, so it does not count
        if _has_triple(mol, i) or _has_triple(mol, j):
            continue
        if exclude_amides and _is_amide_bond(mol, i, j):
            continue
        count += 1
    return count


def aromatic_ring_count(mol: MolGraph) -> int:
    count = 0
    for ring in mol.rings:
        if not all(mol.atoms[i].aromatic for i in ring):
            continue
        edges = zip(ring, ring[1:] + ring[:1])
        if all(mol.bond_between(i, j).order is BondOrder.AROMATIC for i, j in edges):
            count += 1
    return count


def compute_all(mol: MolGraph, *, exclude_amides: bool = True, include_sp: bool = False) -> DescriptorSet:
    logp, mr = crippen(mol)
    heavy = heavy_atom_count(mol)
    return DescriptorSet(
        mw=molecular_weight(mol),
        logp=logp,
        hbd=hbd(mol),
        hba=hba(mol),
        rotb=rotatable_bonds(mol, exclude_amides),
        tpsa=tpsa(mol, include_sp),
        mr=mr,
        atom_count_total=heavy + hydrogen_count(mol),
        heavy_atom_count=heavy,
        aromatic_rings=aromatic_ring_count(mol),
    )


EXPORT_COLUMNS = ("smiles", "mw", "logp", "hbd", "hba", "rotb", "tpsa", "mr", "aromatic_rings")


def export_tsv(rows: list[tuple[str, DescriptorSet]]) -> str:
    """Tab-separated table in the reference-corpus schema (floats to 4 decimals)."""
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(EXPORT_COLUMNS)
    for smiles, d in rows:
        values = asdict(d)
        w.writerow([smiles] + [_fmt(values[c]) for c in EXPORT_COLUMNS[1:]])
    return buf.getvalue()


def _fmt(v: float | int) -> str:
    return f"{v:.4f}" if isinstance(v, float) else str(v)


DESCRIPTOR_FIELDS = tuple(f.name for f in fields(DescriptorSet))
