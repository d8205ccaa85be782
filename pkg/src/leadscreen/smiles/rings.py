"""Smallest set of smallest rings (a minimum cycle basis).

Candidate cycles follow Horton: for every vertex ``v`` and edge ``(x, y)`` the
closed walk ``P(v, x) + (x, y) + P(y, v)`` over BFS shortest paths is kept
when the two paths meet only at ``v``. Candidates are sorted by length and
greedily accepted while linearly independent over GF(2) (edge bitsets as
Python ints), which yields a minimum-weight cycle basis.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Sequence


def connected_components(n: int, edges: Sequence[tuple[int, int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def cyclomatic_number(n: int, edges: Sequence[tuple[int, int]]) -> int:
    return len(edges) - n + len(connected_components(n, edges))


def _bfs_tree(root: int, adj: list[list[int]]) -> tuple[list[int], list[int]]:
    dist = [-1] * len(adj)
    pred = [-1] * len(adj)
    dist[root] = 0
    q = deque([root])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                pred[w] = u
                q.append(w)
    return dist, pred


def _path_to_root(v: int, pred: list[int]) -> list[int]:
    path = [v]
    while pred[path[-1]] >= 0:
        path.append(pred[path[-1]])
    return path


def _order_cycle(atoms: list[int]) -> tuple[int, ...]:
    """Rotate/reflect a cycle so it starts at its smallest index, heading to the smaller neighbour."""
    k = atoms.index(min(atoms))
    rot = atoms[k:] + atoms[:k]
    if len(rot) > 2 and rot[-1] < rot[1]:
        rot = [rot[0]] + rot[1:][::-1]
    return tuple(rot)


def sssr(n: int, edges: Sequence[tuple[int, int]]) -> list[tuple[int, ...]]:
    """Minimum cycle basis of the graph, sorted by (size, atoms).

    Each ring is returned as an atom-index cycle in traversal order.
    """
    target = cyclomatic_number(n, edges)
    if target == 0:
        return []

    adj: list[list[int]] = [[] for _ in range(n)]
    edge_index: dict[frozenset[int], int] = {}
    for idx, (a, b) in enumerate(edges):
        adj[a].append(b)
        adj[b].append(a)
        edge_index[frozenset((a, b))] = idx
    for lst in adj:
        lst.sort()

    # only atoms on some cycle can root a ring; prune acyclic branches (degree-1 peeling)
    deg = [len(a) for a in adj]
    alive = [True] * n
    stack = [i for i in range(n) if deg[i] <= 1]
    while stack:
        u = stack.pop()
        if not alive[u]:
            continue
        alive[u] = False
        for w in adj[u]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    stack.append(w)
    core_adj = [[w for w in adj[u] if alive[w]] if alive[u] else [] for u in range(n)]
    core_edges = [(a, b) for a, b in edges if alive[a] and alive[b]]

    candidates: dict[int, list[int]] = {}

    def add(cycle: list[int]) -> None:
        mask = 0
        for i in range(len(cycle)):
            mask |= 1 << edge_index[frozenset((cycle[i], cycle[(i + 1) % len(cycle)]))]
        candidates.setdefault(mask, cycle)

    for v in range(n):
        if not alive[v]:
            continue
        dist, pred = _bfs_tree(v, core_adj)
        paths = {u: _path_to_root(u, pred) for u in range(n) if dist[u] >= 0}
        # odd cycles: an edge whose endpoints are equidistant from v
        for x, y in core_edges:
            if dist[x] < 0 or dist[x] != dist[y]:
                continue
            px, py = paths[x], paths[y]
            if set(px) & set(py) == {v}:
                add(px + py[-2::-1])  # x .. v .. y
        # even cycles: a vertex reached by two disjoint shortest paths
        for w in range(n):
            if dist[w] <= 0:
                continue
            preds = [p for p in core_adj[w] if dist[p] == dist[w] - 1]
            for i in range(len(preds)):
                for j in range(i + 1, len(preds)):
                    pp, pq = paths[preds[i]], paths[preds[j]]
                    if set(pp) & set(pq) == {v}:
                        add([w] + pp + pq[-2::-1])

    ranked = sorted(
        ((len(cyc), tuple(sorted(cyc)), mask, cyc) for mask, cyc in candidates.items()),
        key=lambda t: (t[0], t[1], t[2]),
    )
    basis: dict[int, int] = {}  # pivot bit -> reduced vector
    rings: list[tuple[int, ...]] = []
    for _, _, mask, cyc in ranked:
        vec = mask
        while vec:
            pivot = vec.bit_length() - 1
            if pivot not in basis:
                basis[pivot] = vec
                rings.append(_order_cycle(list(cyc)))
                break
            vec ^= basis[pivot]
        if len(rings) == target:
            break
    rings.sort(key=lambda r: (len(r), tuple(sorted(r))))
    return rings
