"""Cut enumeration over bond graphs with possibly negative weights.

Two independent routes:

* ``exact_partitions`` walks every 2-partition whose sides are both
  positively connected (connected-subset enumeration from a root).
* ``bounded_bonds`` walks simple cycles of the planar dual of the grid
  adjacency graph, i.e. every bond crossing at most ``k`` adjacency edges.

The stability check reduces the graph first: an edge heavier than
``tau + sum(|negative weights|)`` can never lie on a cut below ``tau``, so
its endpoints are merged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional

from .core import Coord, E, S, StrengthTable, Tile, bond_strength, neighbor


class TooLargeForExact(ValueError):
    pass


@dataclass(frozen=True)
class Cut:
    side_a: frozenset
    side_b: frozenset
    strength: int
    crossing_edges: int

    def key(self) -> frozenset:
        return frozenset((self.side_a, self.side_b))


def grid_edges(a: Mapping[Coord, Tile], s: StrengthTable) -> list[tuple[Coord, Coord, int]]:
    out = []
    for p, t in a.items():
        for side in (E, S):
            q = neighbor(p, side)
            u = a.get(q)
            if u is not None:
                out.append((p, q, bond_strength(t, side, u, s)))
    return out


# --- generic multigraph routines (nodes are 0..n-1) -------------------------

def _masks(n: int, edges: list[tuple[int, int, int]]):
    pos_nbr = [0] * n
    for u, v, w in edges:
        if w > 0 and u != v:
            pos_nbr[u] |= 1 << v
            pos_nbr[v] |= 1 << u
    return pos_nbr


def _connected_mask(mask: int, pos_nbr: list[int]) -> bool:
    if mask == 0:
        return False
    start = mask & -mask
    seen = start
    frontier = start
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        i = low.bit_length() - 1
        new = pos_nbr[i] & mask & ~seen
        seen |= new
        frontier |= new
    return seen == mask


def connected_sets(n: int, pos_nbr: list[int], root: int = 0) -> Iterator[int]:
    """Every positively-connected node set containing ``root``, as bitmasks, once each."""
    full = (1 << n) - 1

    def nbrs(mask: int) -> int:
        out = 0
        m = mask
        while m:
            low = m & -m
            m ^= low
            out |= pos_nbr[low.bit_length() - 1]
        return out & ~mask

    stack = [(1 << root, 0)]
    while stack:
        sub, forbidden = stack.pop()
        yield sub
        cand = nbrs(sub) & ~forbidden & full
        extra = forbidden
        while cand:
            low = cand & -cand
            cand ^= low
            stack.append((sub | low, extra))
            extra |= low


def exact_partitions(n: int, edges: list[tuple[int, int, int]]) -> Iterator[tuple[int, int, int, int]]:
    """Yield ``(mask_a, mask_b, strength, crossing)`` for every cut with both sides
    positively connected.  Node 0 is always on side a."""
    if n < 2:
        return
    full = (1 << n) - 1
    pos_nbr = _masks(n, edges)
    for sub in connected_sets(n, pos_nbr, 0):
        rest = full & ~sub
        if not rest or not _connected_mask(rest, pos_nbr):
            continue
        strength = 0
        crossing = 0
        for u, v, w in edges:
            if ((sub >> u) & 1) != ((sub >> v) & 1):
                strength += w
                crossing += 1
        yield sub, rest, strength, crossing


# --- planar dual of a grid assembly -----------------------------------------

class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        parent = self.parent
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


_OUTER = ("outer",)


def _shared_side(p: Coord, q: Coord) -> tuple[Coord, Coord]:
    """Lattice corners bounding the side shared by adjacent cells p < q."""
    (r, c), (r2, c2) = p, q
    if r2 == r:  # horizontal neighbours
        return (r, c + 1), (r + 1, c + 1)
    return (r + 1, c), (r + 1, c + 1)


def dual_faces(cells: Iterable[Coord], edges: list[tuple[Coord, Coord, int]]):
    """Map every primal edge to the pair of dual faces on either side of it."""
    cells = set(cells)
    shared = {}
    for p, q, _ in edges:
        a, b = _shared_side(p, q)
        shared[(a, b)] = True
    rows = [r for r, _ in cells]
    cols = [c for _, c in cells]
    r0, r1, c0, c1 = min(rows), max(rows) + 1, min(cols), max(cols) + 1
    uf = _UnionFind()
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            here = (r, c)
            uf.find(here)
            if r in (r0, r1) or c in (c0, c1):
                uf.union(here, _OUTER)
            if c < c1 and ((r, c), (r, c + 1)) not in shared:
                uf.union(here, (r, c + 1))
            if r < r1 and ((r, c), (r + 1, c)) not in shared:
                uf.union(here, (r + 1, c))
    out = []
    for p, q, w in edges:
        a, b = _shared_side(p, q)
        out.append((uf.find(a), uf.find(b)))
    return out


def bounded_bonds(cells: Iterable[Coord], edges: list[tuple[Coord, Coord, int]], k: int,
                  skip_edge=None) -> Iterator[frozenset[int]]:
    """Yield every bond (as a set of edge indices) crossing at most ``k`` edges.

    Bonds of a connected plane graph are exactly the simple cycles of its
    dual.  Edges for which ``skip_edge(i)`` is true are never used.
    """
    faces = dual_faces(cells, edges)
    ids: dict = {}
    for f, g in faces:
        ids.setdefault(f, len(ids))
        ids.setdefault(g, len(ids))
    adj: dict[int, list[tuple[int, int]]] = {i: [] for i in ids.values()}
    loops = []
    for i, (f, g) in enumerate(faces):
        if skip_edge is not None and skip_edge(i):
            continue
        a, b = ids[f], ids[g]
        if a == b:
            loops.append(i)
        else:
            adj[a].append((b, i))
            adj[b].append((a, i))
    for i in loops:
        yield frozenset((i,))
    if k < 2:
        return
    seen: set[frozenset[int]] = set()
    for start in sorted(adj):
        # cycles whose smallest face is ``start``
        path_nodes = {start}
        path_edges: list[int] = []

        def dfs(node: int):
            for nxt, ei in adj[node]:
                if ei in path_edges:
                    continue
                if nxt == start:
                    if len(path_edges) + 1 >= 2:
                        cyc = frozenset(path_edges + [ei])
                        if cyc not in seen:
                            seen.add(cyc)
                            yield cyc
                    continue
                if nxt < start or nxt in path_nodes or len(path_edges) + 1 >= k:
                    continue
                path_nodes.add(nxt)
                path_edges.append(ei)
                yield from dfs(nxt)
                path_edges.pop()
                path_nodes.discard(nxt)

        yield from dfs(start)


def bond_sides(cells: Iterable[Coord], edges: list[tuple[Coord, Coord, int]], bond: frozenset[int]):
    """Split ``cells`` into the two sides of a bond (adjacency connectivity)."""
    cells = set(cells)
    adj: dict[Coord, list[Coord]] = {c: [] for c in cells}
    for i, (p, q, _) in enumerate(edges):
        if i not in bond:
            adj[p].append(q)
            adj[q].append(p)
    start = min(cells)
    side = {start}
    stack = [start]
    while stack:
        p = stack.pop()
        for q in adj[p]:
            if q not in side:
                side.add(q)
                stack.append(q)
    return frozenset(side), frozenset(cells - side)


# --- reduction for stability --------------------------------------------------

@dataclass
class Reduced:
    groups: list[frozenset]   # super-node -> original vertices
    edges: list[tuple[int, int, int]]   # parallel edges summed, weight
    has_positive: list[tuple[int, int]]


def reduce_graph(vertices: list, edges: list[tuple], tau: int) -> Reduced:
    negabs = sum(-w for _, _, w in edges if w < 0)
    uf = _UnionFind()
    for v in vertices:
        uf.find(v)
    for p, q, w in edges:
        if w >= tau + negabs:
            uf.union(p, q)
    roots: dict = {}
    groups: dict = {}
    for v in vertices:
        r = uf.find(v)
        if r not in roots:
            roots[r] = len(roots)
            groups[roots[r]] = set()
        groups[roots[r]].add(v)
    summed: dict[tuple[int, int], int] = {}
    positive = set()
    for p, q, w in edges:
        a, b = roots[uf.find(p)], roots[uf.find(q)]
        if a == b:
            continue
        key = (a, b) if a < b else (b, a)
        summed[key] = summed.get(key, 0) + w
        if w > 0:
            positive.add(key)
    return Reduced([frozenset(groups[i]) for i in range(len(groups))],
                   [(a, b, w) for (a, b), w in sorted(summed.items())],
                   sorted(positive))


def reduced_partitions(red: Reduced) -> Iterator[tuple[int, int, int]]:
    """Exact partitions of a reduced graph: ``(mask_a, mask_b, strength)``."""
    n = len(red.groups)
    if n < 2:
        return
    full = (1 << n) - 1
    pos_nbr = [0] * n
    for a, b in red.has_positive:
        pos_nbr[a] |= 1 << b
        pos_nbr[b] |= 1 << a
    for sub in connected_sets(n, pos_nbr, 0):
        rest = full & ~sub
        if not rest or not _connected_mask(rest, pos_nbr):
            continue
        strength = 0
        for a, b, w in red.edges:
            if ((sub >> a) & 1) != ((sub >> b) & 1):
                strength += w
        yield sub, rest, strength


def expand(red: Reduced, mask: int) -> frozenset:
    out = set()
    i = 0
    while mask:
        if mask & 1:
            out |= red.groups[i]
        mask >>= 1
        i += 1
    return frozenset(out)


def min_cut_nonnegative(vertices: list, edges: list[tuple]) -> Optional[int]:
    """Global min cut via Stoer-Wagner; only valid when no weight is negative."""
    import networkx as nx

    if len(vertices) < 2:
        return None
    g = nx.Graph()
    g.add_nodes_from(vertices)
    for p, q, w in edges:
        if w > 0:
            g.add_edge(p, q, weight=w)
    if not nx.is_connected(g):
        return 0
    value, _ = nx.stoer_wagner(g)
    return int(value)
