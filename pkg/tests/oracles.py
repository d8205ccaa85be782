"""Reference implementations the tests compare the package against.

Each oracle is written from the definitions, with no imports from the code
under test beyond data-file locations.
"""

from __future__ import annotations

import csv
import math
from importlib import resources

import networkx as nx


def to_networkx(mol) -> nx.Graph:
    """Heavy-atom graph with hydrogens folded into node labels."""
    g = nx.Graph()
    for i, a in enumerate(mol.atoms):
        g.add_node(i, label=(a.element, a.aromatic, a.formal_charge, a.isotope, mol.total_h(i)))
    for b in mol.bonds:
        g.add_edge(b.begin, b.end, order=b.order.value)
    return g


def isomorphic(m1, m2) -> bool:
    return nx.is_isomorphic(
        to_networkx(m1),
        to_networkx(m2),
        node_match=lambda x, y: x["label"] == y["label"],
        edge_match=lambda x, y: x["order"] == y["order"],
    )


def ring_count(mol) -> int:
    """Size of a minimum cycle basis, computed by networkx."""
    g = nx.Graph()
    g.add_nodes_from(range(len(mol.atoms)))
    g.add_edges_from((b.begin, b.end) for b in mol.bonds)
    return len(nx.minimum_cycle_basis(g))


def ring_sizes(mol) -> list[int]:
    g = nx.Graph()
    g.add_nodes_from(range(len(mol.atoms)))
    g.add_edges_from((b.begin, b.end) for b in mol.bonds)
    return sorted(len(c) for c in nx.minimum_cycle_basis(g))


# --- rule filters -------------------------------------------------------------


def threshold_rows() -> list[dict[str, str]]:
    text = (resources.files("leadscreen") / "data" / "rule_thresholds.tsv").read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(lines, delimiter="\t"))


def brute_force_verdicts(values: dict[str, float]) -> dict[str, bool]:
    """Count failed criteria per rule straight from the threshold table rows."""
    failures: dict[str, int] = {}
    allowed: dict[str, int] = {}
    for row in threshold_rows():
        v = values[row["field"]]
        ok = True
        if row["min"] != "":
            lo = float(row["min"])
            ok = ok and (v >= lo if row["min_inclusive"] == "1" else v > lo)
        if row["max"] != "":
            hi = float(row["max"])
            ok = ok and (v <= hi if row["max_inclusive"] == "1" else v < hi)
        failures[row["rule"]] = failures.get(row["rule"], 0) + (0 if ok else 1)
        allowed[row["rule"]] = int(row["max_violations"])
    return {rule: failures[rule] <= allowed[rule] for rule in failures}


# --- QED ----------------------------------------------------------------------


def geometric_mean(ds: list[float], ws: list[float]) -> float:
    return math.exp(sum(w * math.log(d) for d, w in zip(ds, ws)) / sum(ws))


# --- refinement classification -------------------------------------------------


def classify(before: float, after: float, direction: str, eps: float) -> str:
    d = after - before
    if -eps <= d <= eps:
        return "unchanged"
    went_up = d > 0
    return "improved" if went_up == (direction == "higher_better") else "declined"


# --- alternative SMILES spellings ---------------------------------------------

_BOND = {"single": "-", "double": "=", "triple": "#", "aromatic": ":"}


def _bracket(atom, h: int) -> str:
    sym = atom.element.lower() if atom.aromatic else atom.element
    iso = str(atom.isotope) if atom.isotope else ""
    hs = "" if h == 0 else "H" if h == 1 else f"H{h}"
    q = atom.formal_charge
    charge = "" if q == 0 else ("+" if q > 0 else "-") + (str(abs(q)) if abs(q) > 1 else "")
    return f"[{iso}{sym}{hs}{charge}]"


def random_smiles(mol, rng) -> str:
    """Spell ``mol`` from a random root with random branch order.

    Every atom is written in brackets with its hydrogen count and every bond
    symbol is explicit, so the string pins down the same graph without
    relying on the parser's implicit-hydrogen rules.
    """
    n = len(mol.atoms)
    adj = {i: [] for i in range(n)}
    for b in mol.bonds:
        adj[b.begin].append((b.end, b.order.value))
        adj[b.end].append((b.begin, b.order.value))
    seen: set[int] = set()
    parts: list[str] = []
    for comp in sorted(mol.components, key=lambda c: rng.random()):
        root = rng.choice(list(comp))
        # first pass: spanning tree by randomized DFS; non-tree edges become ring closures
        order: list[int] = []
        parent: dict[int, int | None] = {root: None}
        stack = [root]
        tree_children: dict[int, list[int]] = {i: [] for i in comp}
        visited = set()
        while stack:
            v = stack.pop()
            if v in visited:
                continue
            visited.add(v)
            order.append(v)
            nbrs = [u for u, _ in adj[v]]
            rng.shuffle(nbrs)
            for u in nbrs:
                if u not in visited:
                    parent[u] = v
                    stack.append(u)
        for v in order:
            if parent[v] is not None:
                tree_children[parent[v]].append(v)
        tree_edges = {frozenset((v, p)) for v, p in parent.items() if p is not None}
        closures: dict[int, list[tuple[int, str]]] = {i: [] for i in comp}
        label = 1
        for b in mol.bonds:
            if b.begin in comp and frozenset((b.begin, b.end)) not in tree_edges:
                sym = _BOND[b.order.value]
                closures[b.begin].append((label, sym))
                closures[b.end].append((label, sym))
                label += 1

        def emit(v: int, via: str) -> str:
            seen.add(v)
            out = via + _bracket(mol.atoms[v], mol.atoms[v].hcount)
            for lab, sym in closures[v]:
                out += f"{sym}%{lab:02d}"
            kids = tree_children[v]
            for k, c in enumerate(kids):
                sym = _BOND[next(o for u, o in adj[v] if u == c)]
                body = emit(c, sym)
                out += body if k == len(kids) - 1 else f"({body})"
            return out

        parts.append(emit(root, ""))
    return ".".join(parts)
