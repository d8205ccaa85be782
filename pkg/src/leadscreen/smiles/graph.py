"""Immutable molecular graph: atoms, bonds, perceived rings and components."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property


class BondOrder(Enum):
    SINGLE = "single"
    DOUBLE = "double"
    TRIPLE = "triple"
    AROMATIC = "aromatic"

    @property
    def valence(self) -> int:
        """Contribution to the bond-order sum of either endpoint (aromatic counts 1)."""
        return _VALENCE[self]

    @property
    def symbol(self) -> str:
        return _SYMBOL[self]


_VALENCE = {BondOrder.SINGLE: 1, BondOrder.DOUBLE: 2, BondOrder.TRIPLE: 3, BondOrder.AROMATIC: 1}
_SYMBOL = {BondOrder.SINGLE: "-", BondOrder.DOUBLE: "=", BondOrder.TRIPLE: "#", BondOrder.AROMATIC: ":"}


@dataclass(frozen=True)
class Atom:
    element: str
    aromatic: bool = False
    formal_charge: int = 0
    isotope: int | None = None
    explicit_h: int | None = None
    implicit_h: int = 0
    chirality: str | None = None
    atom_class: int | None = None

    @property
    def bracket(self) -> bool:
        return self.explicit_h is not None

    @property
    def hcount(self) -> int:
        """Hydrogens carried by the atom itself (not counting H atoms in the graph)."""
        return self.explicit_h if self.explicit_h is not None else self.implicit_h


@dataclass(frozen=True)
class Bond:
    begin: int
    end: int
    order: BondOrder
    in_ring: bool = False
    stereo: str | None = None

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.begin, self.end)

    def other(self, idx: int) -> int:
        return self.end if idx == self.begin else self.begin


@dataclass(frozen=True, eq=False)
class MolGraph:
    """A parsed molecule.

    ``rings`` is the smallest set of smallest rings, each ring an atom-index
    cycle in traversal order. ``components`` lists the atom indices of each
    connected component.
    """

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    rings: tuple[tuple[int, ...], ...] = ()
    components: tuple[tuple[int, ...], ...] = ()
    source: str | None = field(default=None, compare=False)

    @cached_property
    def neighbors(self) -> tuple[tuple[tuple[int, Bond], ...], ...]:
        adj: list[list[tuple[int, Bond]]] = [[] for _ in self.atoms]
        for b in self.bonds:
            adj[b.begin].append((b.end, b))
            adj[b.end].append((b.begin, b))
        return tuple(tuple(sorted(a, key=lambda nb: nb[0])) for a in adj)

    def bond_between(self, i: int, j: int) -> Bond | None:
        for k, b in self.neighbors[i]:
            if k == j:
                return b
        return None

    def degree(self, idx: int) -> int:
        return len(self.neighbors[idx])

    def heavy_degree(self, idx: int) -> int:
        return sum(1 for k, _ in self.neighbors[idx] if self.atoms[k].element != "H")

    def total_h(self, idx: int) -> int:
        """Hydrogens on an atom: its own H count plus bonded hydrogen atoms."""
        return self.atoms[idx].hcount + sum(
            1 for k, _ in self.neighbors[idx] if self.atoms[k].element == "H"
        )

    def bond_order_sum(self, idx: int) -> int:
        return sum(b.order.valence for _, b in self.neighbors[idx])

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    @property
    def num_bonds(self) -> int:
        return len(self.bonds)

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        label = f" {self.source!r}" if self.source else ""
        return f"<MolGraph{label} atoms={len(self.atoms)} bonds={len(self.bonds)} rings={len(self.rings)}>"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MolGraph):
            return NotImplemented
        return (self.atoms, self.bonds, self.rings) == (other.atoms, other.bonds, other.rings)

    def __hash__(self) -> int:
        return hash((self.atoms, self.bonds))
