"""SMILES reader.

Accepted subset: organic-subset atoms (B C N O P S F Cl Br I and aromatic
b c n o p s), bracket atoms with isotope, chirality (@/@@), H count, charge
and atom class, bonds ``- = # : / \\``, ring closures including ``%nn``,
branches and ``.`` components. Stereo marks are kept on atoms/bonds but
nothing downstream reads them.

Aromaticity is read from the notation as written; there is no Hückel
re-perception.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from leadscreen.data import atomic_numbers, valences
from leadscreen.errors import (
    AromaticityError,
    SmilesSyntaxError,
    UnclosedRingError,
    ValenceError,
)
from leadscreen.smiles.graph import Atom, Bond, BondOrder, MolGraph
from leadscreen.smiles.rings import connected_components, sssr

ORGANIC = ("Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I")
AROMATIC_ORGANIC = ("b", "c", "n", "o", "p", "s")
# lower-case symbols legal inside brackets
AROMATIC_BRACKET = ("se", "as", "te", "b", "c", "n", "o", "p", "s")

_BOND_CHARS = {
    "-": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
    "/": BondOrder.SINGLE,
    "\\": BondOrder.SINGLE,
}


@dataclass
class _PendingBond:
    order: BondOrder | None
    stereo: str | None
    pos: int


@dataclass
class _Builder:
    smiles: str
    atoms: list[Atom] = field(default_factory=list)
    bonds: list[list] = field(default_factory=list)  # [a, b, order|None, stereo, explicit]
    pairs: set[frozenset[int]] = field(default_factory=set)

    def add_bond(self, a: int, b: int, order: BondOrder | None, stereo: str | None, pos: int) -> None:
        if a == b:
            raise SmilesSyntaxError("ring closure bonds an atom to itself", self.smiles, pos)
        key = frozenset((a, b))
        if key in self.pairs:
            raise SmilesSyntaxError("duplicate bond between the same atoms", self.smiles, pos)
        self.pairs.add(key)
        self.bonds.append([a, b, order, stereo])


def parse(smiles: str) -> MolGraph:
    """Parse ``smiles`` into a :class:`MolGraph` with implicit hydrogens and rings.

    Raises:
        SmilesSyntaxError: malformed input (carries position and reason).
        UnclosedRingError: a ring-closure digit was opened and never closed.
        ValenceError: no permitted valence fits an organic-subset atom.
        AromaticityError: an aromatic atom lies in no ring.
    """
    if not isinstance(smiles, str) or not smiles.strip():
        raise SmilesSyntaxError("empty SMILES", smiles if isinstance(smiles, str) else "")
    s = smiles.strip()
    if any(ch.isspace() for ch in s):
        raise SmilesSyntaxError("whitespace inside SMILES", s, next(i for i, ch in enumerate(s) if ch.isspace()))

    b = _Builder(s)
    prev: int | None = None
    pending: _PendingBond | None = None
    branches: list[int | None] = []
    open_rings: dict[int, tuple[int, _PendingBond | None, int]] = {}
    i = 0
    n = len(s)
    while i < n:
        ch = s[i]
        if ch == "(":
            if prev is None:
                raise SmilesSyntaxError("branch opened before any atom", s, i)
            if pending is not None:
                raise SmilesSyntaxError("bond symbol before branch", s, i)
            if i + 1 < n and s[i + 1] == ")":
                raise SmilesSyntaxError("empty branch", s, i)
            branches.append(prev)
            i += 1
            continue
        if ch == ")":
            if not branches:
                raise SmilesSyntaxError("unmatched ')'", s, i)
            if pending is not None:
                raise SmilesSyntaxError("bond symbol with no following atom", s, pending.pos)
            prev = branches.pop()
            i += 1
            continue
        if ch == ".":
            if prev is None or pending is not None:
                raise SmilesSyntaxError("misplaced '.'", s, i)
            if branches:
                raise SmilesSyntaxError("'.' inside a branch", s, i)
            prev = None
            i += 1
            if i >= n:
                raise SmilesSyntaxError("trailing '.'", s, i - 1)
            continue
        if ch in _BOND_CHARS:
            if prev is None:
                raise SmilesSyntaxError("bond symbol with no preceding atom", s, i)
            if pending is not None:
                raise SmilesSyntaxError("two consecutive bond symbols", s, i)
            stereo = ch if ch in "/\\" else None
            pending = _PendingBond(_BOND_CHARS[ch], stereo, i)
            i += 1
            continue
        if ch.isdigit() or ch == "%":
            if prev is None:
                raise SmilesSyntaxError("ring closure with no preceding atom", s, i)
            if ch == "%":
                if i + 2 >= n or not (s[i + 1].isdigit() and s[i + 2].isdigit()):
                    raise SmilesSyntaxError("'%' must be followed by two digits", s, i)
                num, width = int(s[i + 1 : i + 3]), 3
            else:
                num, width = int(ch), 1
            if num in open_rings:
                other, obond, opos = open_rings.pop(num)
                order, stereo = _merge_ring_bond(s, obond, pending, i)
                b.add_bond(other, prev, order, stereo, i)
            else:
                open_rings[num] = (prev, pending, i)
            pending = None
            i += width
            continue
        if ch == "[":
            atom, i = _read_bracket(s, i)
        else:
            atom, i = _read_organic(s, i)
        b.atoms.append(atom)
        idx = len(b.atoms) - 1
        if prev is not None:
            b.add_bond(prev, idx, pending.order if pending else None, pending.stereo if pending else None,
                       pending.pos if pending else i)
        pending = None
        prev = idx

    if pending is not None:
        raise SmilesSyntaxError("bond symbol with no following atom", s, pending.pos)
    if branches:
        raise SmilesSyntaxError("unclosed branch", s, n)
    if open_rings:
        num, (_, _, pos) = min(open_rings.items(), key=lambda kv: kv[1][2])
        raise UnclosedRingError(f"ring bond {num} never closed", s, pos)
    if not b.atoms:
        raise SmilesSyntaxError("no atoms", s)
    return _finish(b)


def _merge_ring_bond(s: str, opening: _PendingBond | None, closing: _PendingBond | None, pos: int):
    if opening and closing and opening.order != closing.order:
        raise SmilesSyntaxError("conflicting bond orders on ring closure", s, pos)
    chosen = closing or opening
    if chosen is None:
        return None, None
    return chosen.order, chosen.stereo


def _read_organic(s: str, i: int) -> tuple[Atom, int]:
    for sym in ORGANIC:
        if s.startswith(sym, i):
            return Atom(element=sym), i + len(sym)
    ch = s[i]
    if ch in AROMATIC_ORGANIC:
        return Atom(element=ch.upper(), aromatic=True), i + 1
    if ch == "*":
        raise SmilesSyntaxError("wildcard atoms are not supported", s, i)
    raise SmilesSyntaxError(f"unknown element or character {ch!r}", s, i)


def _read_int(s: str, i: int) -> tuple[int | None, int]:
    j = i
    while j < len(s) and s[j].isdigit():
        j += 1
    return (int(s[i:j]), j) if j > i else (None, i)


def _read_bracket(s: str, start: int) -> tuple[Atom, int]:
    end = s.find("]", start)
    if end < 0:
        raise SmilesSyntaxError("unterminated bracket atom", s, start)
    i = start + 1
    isotope, i = _read_int(s, i)
    if isotope == 0:
        isotope = None

    known = atomic_numbers()
    aromatic = False
    element = None
    for sym in AROMATIC_BRACKET:
        if s.startswith(sym, i) and i + len(sym) <= end:
            element, aromatic = sym.capitalize(), True
            i += len(sym)
            break
    else:
        if i < end and s[i].isupper():
            two = s[i : i + 2]
            if len(two) == 2 and two[1].islower() and two in known and i + 2 <= end:
                element, i = two, i + 2
            elif s[i] in known:
                element, i = s[i], i + 1
    if element is None:
        raise SmilesSyntaxError("unknown element in bracket atom", s, i)

    chirality = None
    if i < end and s[i] == "@":
        if s.startswith("@@", i):
            chirality, i = "@@", i + 2
        else:
            chirality, i = "@", i + 1
        if i < end and s[i].isalpha() and s[i] != "H":
            raise SmilesSyntaxError("extended chirality classes are not supported", s, i)

    hcount = 0
    if i < end and s[i] == "H":
        cnt, i = _read_int(s, i + 1)
        hcount = 1 if cnt is None else cnt

    charge = 0
    if i < end and s[i] in "+-":
        sign = 1 if s[i] == "+" else -1
        mag, j = _read_int(s, i + 1)
        if mag is not None:
            charge, i = sign * mag, j
        else:
            j = i
            while j < end and s[j] == s[i]:
                j += 1
            charge, i = sign * (j - i), j

    atom_class = None
    if i < end and s[i] == ":":
        atom_class, i = _read_int(s, i + 1)
        if atom_class is None:
            raise SmilesSyntaxError("atom class needs digits", s, i)

    if i != end:
        raise SmilesSyntaxError("unexpected character in bracket atom", s, i)
    atom = Atom(
        element=element,
        aromatic=aromatic,
        formal_charge=charge,
        isotope=isotope,
        explicit_h=hcount,
        chirality=chirality,
        atom_class=atom_class,
    )
    return atom, end + 1


def default_hcount(element: str, aromatic: bool, bond_sum: int) -> int | None:
    """Implicit H for an organic-subset atom, or None when no permitted valence fits.

    ``bond_sum`` counts aromatic bonds as 1. Aromatic atoms reserve one extra
    valence unit for the pi system and only ever use their lowest valence.
    """
    allowed = valences()[element]
    if aromatic:
        return max(0, allowed[0] - bond_sum - 1)
    for v in allowed:
        if v >= bond_sum:
            return v - bond_sum
    return None


def _max_bracket_valence(atom: Atom) -> int | None:
    """Upper bound on bond-order sum + H for a bracket atom of an organic element."""
    allowed = valences().get(atom.element)
    if allowed is None:
        return None
    q = atom.formal_charge
    if q == 0:
        return max(allowed)
    el = atom.element
    if el == "C":
        return 4 - abs(q)
    if el == "B":
        return 3 - q
    if el in ("N", "O"):
        return allowed[0] + q
    if el in ("F", "Cl", "Br", "I"):
        return 0 if q < 0 else 1 + 2 * q
    # P and S keep their hypervalent states when charged ([P-]F6, sulfonium, ...)
    return max(allowed) + abs(q)


def _finish(b: _Builder) -> MolGraph:
    s = b.smiles
    natoms = len(b.atoms)
    # unspecified bonds are aromatic between two aromatic atoms, otherwise single
    for bond in b.bonds:
        a1, a2 = b.atoms[bond[0]], b.atoms[bond[1]]
        if bond[2] is None:
            bond[2] = BondOrder.AROMATIC if (a1.aromatic and a2.aromatic) else BondOrder.SINGLE
        elif bond[2] is BondOrder.AROMATIC and not (a1.aromatic and a2.aromatic):
            raise SmilesSyntaxError("aromatic bond between non-aromatic atoms", s)

    edges = [(bd[0], bd[1]) for bd in b.bonds]
    rings = sssr(natoms, edges)
    ring_edges = {frozenset((r[k], r[(k + 1) % len(r)])) for r in rings for k in range(len(r))}
    ring_atoms = {a for r in rings for a in r}

    for idx, atom in enumerate(b.atoms):
        if atom.aromatic and idx not in ring_atoms:
            raise AromaticityError(f"aromatic atom {idx} ({atom.element.lower()}) is not in a ring", s)

    bonds: list[Bond] = []
    for a1, a2, order, stereo in b.bonds:
        in_ring = frozenset((a1, a2)) in ring_edges
        if order is BondOrder.AROMATIC and not in_ring:
            order = BondOrder.SINGLE
        bonds.append(Bond(a1, a2, order, in_ring, stereo))

    bond_sum = [0] * natoms
    for bd in bonds:
        bond_sum[bd.begin] += bd.order.valence
        bond_sum[bd.end] += bd.order.valence

    atoms: list[Atom] = []
    for idx, atom in enumerate(b.atoms):
        if atom.explicit_h is None:
            h = default_hcount(atom.element, atom.aromatic, bond_sum[idx])
            if h is None:
                raise ValenceError(
                    f"atom {idx} ({atom.element}) has bond order {bond_sum[idx]}, above every "
                    f"permitted valence {valences()[atom.element]}",
                    s,
                )
            atom = replace(atom, implicit_h=h)
        else:
            cap = _max_bracket_valence(atom)
            # no pi unit is reserved: pyrrole-type n/o/s donate a lone pair and
            # exocyclic c=O supplies its own, mirroring the organic-subset rule
            used = bond_sum[idx] + atom.explicit_h
            if cap is not None and used > cap:
                raise ValenceError(
                    f"atom {idx} ([{atom.element}] charge {atom.formal_charge:+d}) has valence {used} > {cap}",
                    s,
                )
        atoms.append(atom)

    components = tuple(tuple(c) for c in connected_components(natoms, edges))
    return MolGraph(tuple(atoms), tuple(bonds), tuple(rings), components, source=s)
