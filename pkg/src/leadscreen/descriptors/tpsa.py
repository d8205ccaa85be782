"""Topological polar surface area from tabulated N/O (optionally S/P) contributions."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

from leadscreen.data import read_table
from leadscreen.errors import UnknownEnvironmentWarning
from leadscreen.smiles.graph import BondOrder, MolGraph


@dataclass(frozen=True)
class Environment:
    element: str
    aromatic: bool
    h: int
    charge: int
    single: int
    double: int
    triple: int
    arom: int
    in_ring3: bool


@dataclass(frozen=True)
class _Row:
    group: str
    env: Environment
    ring3: bool | None
    value: float
    pattern: str


@lru_cache(maxsize=None)
def _table() -> tuple[_Row, ...]:
    rows = []
    for r in read_table("tpsa.tsv"):
        env = Environment(
            element=r["element"],
            aromatic=r["aromatic"] == "1",
            h=int(r["h"]),
            charge=int(r["charge"]),
            single=int(r["single"]),
            double=int(r["double"]),
            triple=int(r["triple"]),
            arom=int(r["arom"]),
            in_ring3=False,
        )
        ring3 = None if r["ring3"] == "*" else r["ring3"] == "1"
        rows.append(_Row(r["group"], env, ring3, float(r["value"]), r["pattern"]))
    return tuple(rows)


def environment(mol: MolGraph, idx: int) -> Environment:
    a = mol.atoms[idx]
    counts = {BondOrder.SINGLE: 0, BondOrder.DOUBLE: 0, BondOrder.TRIPLE: 0, BondOrder.AROMATIC: 0}
    for j, b in mol.neighbors[idx]:
        if mol.atoms[j].element == "H":
            continue
        counts[b.order] += 1
    return Environment(
        element=a.element,
        aromatic=a.aromatic,
        h=mol.total_h(idx),
        charge=a.formal_charge,
        single=counts[BondOrder.SINGLE],
        double=counts[BondOrder.DOUBLE],
        triple=counts[BondOrder.TRIPLE],
        arom=counts[BondOrder.AROMATIC],
        in_ring3=any(len(r) == 3 and idx in r for r in mol.rings),
    )


def lookup(env: Environment, include_sp: bool = False) -> float | None:
    for row in _table():
        if row.group == "SP" and not include_sp:
            continue
        e = row.env
        if (e.element, e.aromatic, e.h, e.charge, e.single, e.double, e.triple, e.arom) != (
            env.element, env.aromatic, env.h, env.charge, env.single, env.double, env.triple, env.arom
        ):
            continue
        if row.ring3 is not None and row.ring3 != env.in_ring3:
            continue
        return row.value
    return None


def tpsa_contributions(mol: MolGraph, include_sp: bool = False) -> list[float | None]:
    """Per-atom contribution; ``None`` marks a polar atom whose environment has no row."""
    polar = {"N", "O"} | ({"S", "P"} if include_sp else set())
    out: list[float | None] = []
    for i, a in enumerate(mol.atoms):
        if a.element not in polar:
            out.append(0.0)
            continue
        out.append(lookup(environment(mol, i), include_sp))
    return out


def tpsa(mol: MolGraph, include_sp: bool = False) -> float:
    """Polar surface area in A^2.

    Unknown N/O environments contribute 0 and emit :class:`UnknownEnvironmentWarning`.
    """
    total = 0.0
    for i, c in enumerate(tpsa_contributions(mol, include_sp)):
        if c is None:
            env = environment(mol, i)
            warnings.warn(
                f"no polar-surface row for atom {i} {env}; counted as 0",
                UnknownEnvironmentWarning,
                stacklevel=2,
            )
            continue
        total += c
    return total
