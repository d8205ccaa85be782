"""SMILES parsing, ring perception and canonical serialization."""

from leadscreen.smiles.graph import Atom, Bond, BondOrder, MolGraph
from leadscreen.smiles.parser import parse
from leadscreen.smiles.rings import sssr

__all__ = ["Atom", "Bond", "BondOrder", "MolGraph", "parse", "perceive_rings", "serialize", "sssr"]


def perceive_rings(mol: MolGraph) -> list[tuple[int, ...]]:
    """Smallest set of smallest rings of ``mol`` (already perceived at parse time)."""
    return list(mol.rings)


def serialize(mol: MolGraph) -> str:
    from leadscreen.smiles.canon import serialize as _serialize

    return _serialize(mol)
