"""A small SMARTS subset for tree-shaped atom-typing patterns.

Supported: bracket and bare atoms; primitives ``#n``, element symbols
(aliphatic upper case, aromatic lower case), ``a``, ``A``, ``*``, ``Hn``,
``Xn``, ``Dn``, charges ``+``, ``+n``, ``-``, ``-n``; operators ``!``,
implicit/explicit ``&``, ``,`` and ``;``; bonds ``- = # : ~`` (default:
single or aromatic); branches. Ring closures and recursive SMARTS are not
supported.

Patterns are matched against a graph whose hydrogens are explicit atoms
(see :func:`with_explicit_hydrogens`).
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, replace
from functools import lru_cache

from leadscreen.data import atomic_numbers
from leadscreen.smiles.graph import Atom, Bond, BondOrder, MolGraph

AtomTest = Callable[[MolGraph, int], bool]
BondTest = Callable[[Bond], bool]

_TWO_LETTER = ("Cl", "Br")
_ONE_UPPER = "BCNOSPFI"
_AROMATIC = "cnosp"


class SmartsError(ValueError):
    pass


@dataclass(frozen=True)
class Pattern:
    text: str
    tests: tuple[AtomTest, ...]
    parents: tuple[int, ...]  # -1 for the root
    bond_tests: tuple[BondTest | None, ...]

    def matches_at(self, mol: MolGraph, root: int) -> bool:
        """True if the pattern embeds with its first atom mapped onto ``root``."""
        if not self.tests[0](mol, root):
            return False
        mapping = [root] + [-1] * (len(self.tests) - 1)
        used = {root}
        return self._extend(mol, 1, mapping, used)

    def _extend(self, mol: MolGraph, k: int, mapping: list[int], used: set[int]) -> bool:
        if k == len(self.tests):
            return True
        anchor = mapping[self.parents[k]]
        for j, bond in mol.neighbors[anchor]:
            if j in used or not self.bond_tests[k](bond) or not self.tests[k](mol, j):
                continue
            mapping[k] = j
            used.add(j)
            if self._extend(mol, k + 1, mapping, used):
                return True
            used.discard(j)
        mapping[k] = -1
        return False


# --- atom primitives ----------------------------------------------------------


def _element(symbol: str, aromatic: bool | None) -> AtomTest:
    def test(mol: MolGraph, i: int) -> bool:
        a = mol.atoms[i]
        return a.element == symbol and (aromatic is None or a.aromatic == aromatic)

    return test


def _atomic_number(z: int) -> AtomTest:
    table = atomic_numbers()
    return lambda mol, i: table[mol.atoms[i].element] == z


def _hcount(n: int) -> AtomTest:
    return lambda mol, i: mol.total_h(i) == n


def _connectivity(n: int) -> AtomTest:
    return lambda mol, i: mol.degree(i) + mol.atoms[i].hcount == n


def _degree(n: int) -> AtomTest:
    return lambda mol, i: mol.degree(i) == n


def _charge(q: int) -> AtomTest:
    return lambda mol, i: mol.atoms[i].formal_charge == q


def _aromatic(flag: bool) -> AtomTest:
    return lambda mol, i: mol.atoms[i].aromatic == flag


def _any(mol: MolGraph, i: int) -> bool:
    return True


def _not(t: AtomTest) -> AtomTest:
    return lambda mol, i: not t(mol, i)


def _all(ts: list[AtomTest]) -> AtomTest:
    if len(ts) == 1:
        return ts[0]
    return lambda mol, i: all(t(mol, i) for t in ts)


def _some(ts: list[AtomTest]) -> AtomTest:
    if len(ts) == 1:
        return ts[0]
    return lambda mol, i: any(t(mol, i) for t in ts)


class _BracketParser:
    def __init__(self, text: str, full: str) -> None:
        self.s = text
        self.i = 0
        self.full = full

    def fail(self, why: str) -> SmartsError:
        return SmartsError(f"{why} in [{self.s}] of {self.full!r}")

    def parse(self) -> AtomTest:
        t = self.low_and()
        if self.i != len(self.s):
            raise self.fail(f"unexpected {self.s[self.i]!r}")
        return t

    def low_and(self) -> AtomTest:
        parts = [self.or_expr()]
        while self.peek() == ";":
            self.i += 1
            parts.append(self.or_expr())
        return _all(parts)

    def or_expr(self) -> AtomTest:
        parts = [self.high_and()]
        while self.peek() == ",":
            self.i += 1
            parts.append(self.high_and())
        return _some(parts)

    def high_and(self) -> AtomTest:
        parts = [self.unary()]
        while self.peek() not in (None, ",", ";"):
            if self.peek() == "&":
                self.i += 1
            parts.append(self.unary())
        return _all(parts)

    def unary(self) -> AtomTest:
        if self.peek() == "!":
            self.i += 1
            return _not(self.unary())
        return self.primitive()

    def peek(self) -> str | None:
        return self.s[self.i] if self.i < len(self.s) else None

    def number(self, default: int | None = None) -> int:
        j = self.i
        while j < len(self.s) and self.s[j].isdigit():
            j += 1
        if j == self.i:
            if default is None:
                raise self.fail("expected a number")
            return default
        n = int(self.s[self.i : j])
        self.i = j
        return n

    def primitive(self) -> AtomTest:
        ch = self.peek()
        if ch is None:
            raise self.fail("unexpected end")
        if ch == "#":
            self.i += 1
            return _atomic_number(self.number())
        for sym in _TWO_LETTER:
            if self.s.startswith(sym, self.i):
                self.i += 2
                return _element(sym, False)
        if ch == "H":
            self.i += 1
            return _hcount(self.number(1))
        if ch == "X":
            self.i += 1
            return _connectivity(self.number())
        if ch == "D":
            self.i += 1
            return _degree(self.number())
        if ch in "+-":
            sign = 1 if ch == "+" else -1
            self.i += 1
            if self.peek() is not None and self.peek().isdigit():
                return _charge(sign * self.number())
            mag = 1
            while self.peek() == ch:
                mag += 1
                self.i += 1
            return _charge(sign * mag)
        if ch == "a":
            self.i += 1
            return _aromatic(True)
        if ch == "A":
            self.i += 1
            return _aromatic(False)
        if ch == "*":
            self.i += 1
            return _any
        if ch in _ONE_UPPER:
            self.i += 1
            return _element(ch, False)
        if ch in _AROMATIC:
            self.i += 1
            return _element(ch.upper(), True)
        raise self.fail(f"unsupported primitive {ch!r}")


_BOND_TESTS: dict[str, BondTest] = {
    "-": lambda b: b.order is BondOrder.SINGLE,
    "=": lambda b: b.order is BondOrder.DOUBLE,
    "#": lambda b: b.order is BondOrder.TRIPLE,
    ":": lambda b: b.order is BondOrder.AROMATIC,
    "~": lambda b: True,
}


def _default_bond(b: Bond) -> bool:
    return b.order in (BondOrder.SINGLE, BondOrder.AROMATIC)


@lru_cache(maxsize=None)
def compile_smarts(text: str) -> Pattern:
    tests: list[AtomTest] = []
    parents: list[int] = []
    bond_tests: list[BondTest | None] = []
    stack: list[int] = []
    prev = -1
    pending: BondTest | None = None
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            stack.append(prev)
            i += 1
            continue
        if ch == ")":
            prev = stack.pop()
            i += 1
            continue
        if ch in _BOND_TESTS:
            pending = _BOND_TESTS[ch]
            i += 1
            continue
        if ch == "[":
            end = text.index("]", i)
            test = _BracketParser(text[i + 1 : end], text).parse()
            i = end + 1
        elif text.startswith(("Cl", "Br"), i):
            test = _element(text[i : i + 2], False)
            i += 2
        elif ch in _ONE_UPPER:
            test = _element(ch, False)
            i += 1
        elif ch in _AROMATIC:
            test = _element(ch.upper(), True)
            i += 1
        elif ch == "a":
            test, i = _aromatic(True), i + 1
        elif ch == "A":
            test, i = _aromatic(False), i + 1
        elif ch == "*":
            test, i = _any, i + 1
        else:
            raise SmartsError(f"unsupported SMARTS character {ch!r} in {text!r}")
        tests.append(test)
        parents.append(prev)
        bond_tests.append(None if prev < 0 else (pending or _default_bond))
        pending = None
        prev = len(tests) - 1
        if len(tests) > 1 and parents[-1] < 0:
            raise SmartsError(f"disconnected pattern {text!r}")
    return Pattern(text, tuple(tests), tuple(parents), tuple(bond_tests))


def with_explicit_hydrogens(mol: MolGraph) -> MolGraph:
    """Copy of ``mol`` with every implicit/bracket hydrogen turned into an H atom.

    Original atoms keep their indices; new hydrogens are appended.
    """
    atoms = [replace(a, explicit_h=None, implicit_h=0) for a in mol.atoms]
    bonds = list(mol.bonds)
    for i, a in enumerate(mol.atoms):
        for _ in range(a.hcount):
            atoms.append(Atom(element="H"))
            bonds.append(Bond(i, len(atoms) - 1, BondOrder.SINGLE))
    # components are left as the heavy-atom view; typing never reads them
    return MolGraph(tuple(atoms), tuple(bonds), mol.rings, mol.components, source=mol.source)
