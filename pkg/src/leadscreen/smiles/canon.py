"""Deterministic SMILES writer for deduplication.

Atoms are ranked by iterative neighbourhood refinement (Morgan style). The
initial invariant orders atoms by element, charge, heavy degree, then isotope,
aromaticity and hydrogen count. Classes are refined by the sorted multiset of
(neighbour rank, bond order) until stable; any remaining tie is broken by
promoting the smallest-index atom of the lowest tied class, then refining
again. Output is dedup-grade: stereo marks are dropped, and graphs whose
non-equivalent atoms survive refinement tied may serialize differently.
"""

from __future__ import annotations

import sys

from leadscreen.data import atomic_numbers
from leadscreen.smiles.graph import BondOrder, MolGraph
from leadscreen.smiles.parser import AROMATIC_ORGANIC, ORGANIC, default_hcount

_ORDER_CODE = {BondOrder.SINGLE: 1, BondOrder.DOUBLE: 2, BondOrder.TRIPLE: 3, BondOrder.AROMATIC: 4}


def _dense_ranks(keys: list) -> list[int]:
    ordered = sorted(set(keys))
    lookup = {k: r for r, k in enumerate(ordered)}
    return [lookup[k] for k in keys]


def _refine(mol: MolGraph, ranks: list[int]) -> list[int]:
    while True:
        keys = [
            (ranks[i], tuple(sorted((ranks[j], _ORDER_CODE[b.order]) for j, b in mol.neighbors[i])))
            for i in range(len(ranks))
        ]
        new = _dense_ranks(keys)
        if len(set(new)) == len(set(ranks)):
            return new
        ranks = new


def canonical_ranks(mol: MolGraph) -> list[int]:
    """A total order of atom indices, stable under atom renumbering up to automorphism."""
    z = atomic_numbers()
    keys = [
        (
            z[a.element],
            a.formal_charge,
            mol.heavy_degree(i),
            a.isotope or 0,
            a.aromatic,
            mol.total_h(i),
        )
        for i, a in enumerate(mol.atoms)
    ]
    ranks = _refine(mol, _dense_ranks(keys))
    n = len(ranks)
    while len(set(ranks)) < n:
        counts: dict[int, int] = {}
        for r in ranks:
            counts[r] = counts.get(r, 0) + 1
        tied = min(r for r, c in counts.items() if c > 1)
        pick = min(i for i in range(n) if ranks[i] == tied)
        ranks = _refine(mol, [2 * r + (0 if i == pick else 1 if r == tied else 0) for i, r in enumerate(ranks)])
    return ranks


def _atom_text(mol: MolGraph, idx: int) -> str:
    a = mol.atoms[idx]
    symbol = a.element.lower() if a.aromatic else a.element
    organic_ok = (
        a.formal_charge == 0
        and a.isotope is None
        and ((not a.aromatic and a.element in ORGANIC) or (a.aromatic and symbol in AROMATIC_ORGANIC))
    )
    if organic_ok and default_hcount(a.element, a.aromatic, mol.bond_order_sum(idx)) == a.hcount:
        return symbol
    text = "["
    if a.isotope is not None:
        text += str(a.isotope)
    text += symbol
    if a.hcount:
        text += "H" if a.hcount == 1 else f"H{a.hcount}"
    q = a.formal_charge
    if q:
        sign = "+" if q > 0 else "-"
        text += sign if abs(q) == 1 else f"{sign}{abs(q)}"
    return text + "]"


def _bond_text(mol: MolGraph, i: int, j: int, order: BondOrder) -> str:
    if order is BondOrder.AROMATIC:
        return ""
    if order is BondOrder.SINGLE:
        return "-" if (mol.atoms[i].aromatic and mol.atoms[j].aromatic) else ""
    return order.symbol


def _ring_label(num: int) -> str:
    return str(num) if num < 10 else f"%{num}"


def _write_component(mol: MolGraph, atoms: tuple[int, ...], ranks: list[int]) -> str:
    start = min(atoms, key=lambda i: ranks[i])
    order_nbrs = [sorted(mol.neighbors[i], key=lambda nb: ranks[nb[0]]) for i in range(len(mol.atoms))]

    # pass 1: DFS tree and ring-closure edges
    visited: set[int] = set()
    children: dict[int, list[int]] = {i: [] for i in atoms}
    closures: dict[int, list[tuple[int, BondOrder]]] = {i: [] for i in atoms}
    seen_edges: set[frozenset[int]] = set()

    def dfs(u: int) -> None:
        visited.add(u)
        for w, b in order_nbrs[u]:
            key = frozenset((u, w))
            if key in seen_edges:
                continue
            seen_edges.add(key)
            if w in visited:
                closures[u].append((w, b.order))
                closures[w].append((u, b.order))
            else:
                children[u].append(w)
                dfs(w)

    # pass 2: emit text
    free: list[int] = []
    next_label = 1
    open_labels: dict[frozenset[int], int] = {}
    out: list[str] = []

    def emit(u: int) -> None:
        nonlocal next_label
        out.append(_atom_text(mol, u))
        closing = [(w, o) for w, o in closures[u] if frozenset((u, w)) in open_labels]
        opening = [(w, o) for w, o in closures[u] if frozenset((u, w)) not in open_labels]
        released = []
        for w, _ in sorted(closing, key=lambda t: open_labels[frozenset((u, t[0]))]):
            label = open_labels.pop(frozenset((u, w)))
            out.append(_ring_label(label))
            released.append(label)
        for w, o in sorted(opening, key=lambda t: ranks[t[0]]):
            if free:
                label = free.pop(0)
            else:
                label, next_label = next_label, next_label + 1
            open_labels[frozenset((u, w))] = label
            out.append(_bond_text(mol, u, w, o) + _ring_label(label))
        free.extend(released)
        free.sort()
        kids = children[u]
        for k, w in enumerate(kids):
            bond = mol.bond_between(u, w)
            text = _bond_text(mol, u, w, bond.order)
            last = k == len(kids) - 1
            if not last:
                out.append("(")
            out.append(text)
            emit(w)
            if not last:
                out.append(")")

    limit = sys.getrecursionlimit()
    if limit < 4 * len(mol.atoms) + 100:
        sys.setrecursionlimit(4 * len(mol.atoms) + 100)
    try:
        dfs(start)
        emit(start)
    finally:
        sys.setrecursionlimit(limit)
    return "".join(out)


def serialize(mol: MolGraph) -> str:
    """Canonical SMILES for ``mol``; identical for graphs equal up to atom renumbering."""
    ranks = canonical_ranks(mol)
    parts = [_write_component(mol, comp, ranks) for comp in mol.components]
    return ".".join(sorted(parts))
