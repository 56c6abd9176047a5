"""Grid geometry and glue algebra: tiles, assemblies, shapes and bond graphs.

Coordinates are ``(row, col)`` pairs, row 0 at the top.  Sides are indexed
``N=0, E=1, S=2, W=3``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional

N, E, S, W = 0, 1, 2, 3
SIDES = (N, E, S, W)
SIDE_NAMES = "NESW"
DELTA = {N: (-1, 0), E: (0, 1), S: (1, 0), W: (0, -1)}

INFINITE_STRENGTH = 10000
INFINITE_SUFFIX = "!"

Coord = tuple[int, int]

_BASE_RE = re.compile(r"[A-Za-z]*")


class EmptyAssembly(ValueError):
    pass


class InvalidScale(ValueError):
    pass


class UnknownGlue(KeyError):
    pass


def opposite(side: int) -> int:
    return (side + 2) % 4


def neighbor(p: Coord, side: int) -> Coord:
    dr, dc = DELTA[side]
    return (p[0] + dr, p[1] + dc)


@dataclass(frozen=True, order=True)
class GlueLabel:
    """A glue token such as ``F``, ``J3``, ``h*`` or ``t!`` (infinite)."""

    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("glue name must be non-empty")

    @property
    def base(self) -> str:
        return _BASE_RE.match(self.name).group(0)

    @property
    def infinite(self) -> bool:
        return self.name.endswith(INFINITE_SUFFIX)

    def __str__(self):
        return self.name


def glue_base(name: str) -> str:
    return _BASE_RE.match(name).group(0)


@dataclass(frozen=True)
class StrengthTable:
    """Glue label family -> integer strength.

    Lookup tries the full name first (so ``f*`` can differ from ``f``),
    then the maximal alphabetic prefix.  Names ending in ``!`` are infinite
    bonds and resolve to ``infinite_sentinel``.
    """

    entries: Mapping[str, int]
    infinite_sentinel: int = INFINITE_STRENGTH

    def __getitem__(self, name: str) -> int:
        return self.strength(name)

    def strength(self, name: str) -> int:
        if name.endswith(INFINITE_SUFFIX):
            return self.infinite_sentinel
        if name in self.entries:
            return self.entries[name]
        base = glue_base(name)
        if base and base in self.entries:
            return self.entries[base]
        raise UnknownGlue(name)

    def __contains__(self, name: str) -> bool:
        try:
            self.strength(name)
        except UnknownGlue:
            return False
        return True

    def finite_values(self) -> list[int]:
        return list(self.entries.values())

    def replace(self, **changes: int) -> "StrengthTable":
        merged = dict(self.entries)
        merged.update(changes)
        return StrengthTable(merged, self.infinite_sentinel)


@dataclass(frozen=True)
class Tile:
    """A unit square tile; ``glues`` holds the N, E, S, W glue names (or None).

    ``kind`` is a free-form tag (gadget category) used for rendering only;
    it does take part in equality, so two tiles of the same glues but
    different roles are distinct types.
    """

    glues: tuple[Optional[str], Optional[str], Optional[str], Optional[str]]
    kind: str = ""

    def __post_init__(self):
        if len(self.glues) != 4:
            raise ValueError("a tile has exactly four sides")

    def glue(self, side: int) -> Optional[str]:
        return self.glues[side]

    @classmethod
    def of(cls, n=None, e=None, s=None, w=None, kind: str = "") -> "Tile":
        return cls((n, e, s, w), kind)

    def rotated(self, quarter_turns: int) -> "Tile":
        """Rotate counter-clockwise by ``quarter_turns`` * 90 degrees."""
        q = quarter_turns % 4
        if q == 0:
            return self
        # CCW rotation moves the glue on side k to side (k - q) mod 4:
        # east face ends up facing north after one CCW turn.
        g = self.glues
        return Tile(tuple(g[(k + q) % 4] for k in SIDES), self.kind)

    def type_key(self) -> tuple:
        return (self.kind,) + tuple(x or "" for x in self.glues)


def bond_strength(a: Tile, side: int, b: Tile, strengths: StrengthTable) -> int:
    """Strength between ``a`` and ``b`` where ``b`` sits on ``side`` of ``a``."""
    ga = a.glues[side]
    gb = b.glues[opposite(side)]
    if ga is None or ga != gb:
        return 0
    return strengths.strength(ga)


class PositionedAssembly(Mapping[Coord, Tile]):
    """Immutable map from integer coordinate to tile."""

    __slots__ = ("_tiles", "_hash")

    def __init__(self, tiles: Mapping[Coord, Tile] | Iterable[tuple[Coord, Tile]] = ()):
        self._tiles: dict[Coord, Tile] = dict(tiles)
        self._hash: Optional[int] = None

    def __getitem__(self, key: Coord) -> Tile:
        return self._tiles[key]

    def __iter__(self) -> Iterator[Coord]:
        return iter(self._tiles)

    def __len__(self) -> int:
        return len(self._tiles)

    def __eq__(self, other):
        if isinstance(other, PositionedAssembly):
            return self._tiles == other._tiles
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._tiles.items()))
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({len(self)} tiles)"

    def translate(self, dr: int, dc: int) -> "PositionedAssembly":
        return PositionedAssembly({(r + dr, c + dc): t for (r, c), t in self._tiles.items()})

    def positions(self) -> frozenset[Coord]:
        return frozenset(self._tiles)

    def min_coord(self) -> Coord:
        if not self._tiles:
            raise EmptyAssembly("empty assembly has no minimal coordinate")
        return min(self._tiles)

    def union(self, other: Mapping[Coord, Tile]) -> "PositionedAssembly":
        merged = dict(self._tiles)
        for p, t in other.items():
            if p in merged:
                raise ValueError(f"overlap at {p}")
            merged[p] = t
        return PositionedAssembly(merged)

    def subset(self, coords: Iterable[Coord]) -> "PositionedAssembly":
        return PositionedAssembly({p: self._tiles[p] for p in coords})


class Assembly(PositionedAssembly):
    """Translation-free assembly, stored in canonical position.

    The lexicographically smallest occupied coordinate sits at the origin,
    so equality of assemblies is plain equality of the stored maps.
    """

    __slots__ = ()

    def __init__(self, tiles: Mapping[Coord, Tile] | Iterable[tuple[Coord, Tile]] = ()):
        tiles = dict(tiles)
        if not tiles:
            raise EmptyAssembly("an assembly needs at least one tile")
        r0, c0 = min(tiles)
        super().__init__({(r - r0, c - c0): t for (r, c), t in tiles.items()})

    def sort_key(self) -> tuple:
        return (len(self), tuple(sorted((p, t.type_key()) for p, t in self.items())))


def canonicalize(a: Mapping[Coord, Tile]) -> Assembly:
    if not a:
        raise EmptyAssembly("cannot canonicalize an empty assembly")
    return Assembly(a)


@dataclass(frozen=True)
class Shape:
    """Canonical set of cells (min cell translated to the origin)."""

    cells: frozenset[Coord]

    def __init__(self, cells: Iterable[Coord]):
        cells = set(cells)
        if cells:
            r0, c0 = min(cells)
            cells = {(r - r0, c - c0) for r, c in cells}
        object.__setattr__(self, "cells", frozenset(cells))

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(sorted(self.cells))

    def __contains__(self, p):
        return p in self.cells

    def is_connected(self) -> bool:
        return is_connected_cells(self.cells)

    def to_text(self) -> str:
        if not self.cells:
            return ""
        rows = [r for r, _ in self.cells]
        cols = [c for _, c in self.cells]
        lines = []
        for r in range(min(rows), max(rows) + 1):
            lines.append("".join("#" if (r, c) in self.cells else "." for c in range(min(cols), max(cols) + 1)))
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str) -> "Shape":
        cells = []
        for r, line in enumerate(text.splitlines()):
            for c, ch in enumerate(line.rstrip()):
                if ch == "#":
                    cells.append((r, c))
                elif ch != ".":
                    raise ValueError(f"unexpected character {ch!r} at row {r}")
        return cls(cells)


def is_connected_cells(cells: Iterable[Coord]) -> bool:
    cells = set(cells)
    if not cells:
        return True
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        p = stack.pop()
        for side in SIDES:
            q = neighbor(p, side)
            if q in cells and q not in seen:
                seen.add(q)
                stack.append(q)
    return len(seen) == len(cells)


def shape_of(a: Mapping[Coord, Tile]) -> Shape:
    if not a:
        raise EmptyAssembly("empty assembly has no shape")
    return Shape(a.keys())


def scale(sh: Shape, c: int) -> Shape:
    if c < 1:
        raise InvalidScale(f"scale factor must be positive, got {c}")
    return Shape((c * r + i, c * q + j) for r, q in sh.cells for i in range(c) for j in range(c))


@dataclass
class BondGraph:
    """Weighted grid graph of an assembly.

    ``edges`` maps each adjacent pair ``(p, q)`` with ``p < q`` to its
    weight; mismatched glues give weight 0.
    """

    vertices: list[Coord]
    edges: dict[tuple[Coord, Coord], int] = field(default_factory=dict)

    def weight(self, p: Coord, q: Coord) -> int:
        key = (p, q) if p < q else (q, p)
        return self.edges[key]

    def adjacency(self) -> dict[Coord, list[tuple[Coord, int]]]:
        adj: dict[Coord, list[tuple[Coord, int]]] = {v: [] for v in self.vertices}
        for (p, q), w in self.edges.items():
            adj[p].append((q, w))
            adj[q].append((p, w))
        return adj

    def is_positively_connected(self, subset: Optional[Iterable[Coord]] = None) -> bool:
        verts = set(self.vertices if subset is None else subset)
        if not verts:
            return False
        adj = self.adjacency()
        start = next(iter(verts))
        seen = {start}
        stack = [start]
        while stack:
            p = stack.pop()
            for q, w in adj[p]:
                if w > 0 and q in verts and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return len(seen) == len(verts)


def bond_graph(a: Mapping[Coord, Tile], s: StrengthTable) -> BondGraph:
    g = BondGraph(sorted(a))
    for p, t in a.items():
        for side in (E, S):
            q = neighbor(p, side)
            u = a.get(q)
            if u is not None:
                g.edges[(p, q)] = bond_strength(t, side, u, s)
    return g


def boundary_strength(a: Mapping[Coord, Tile], b: Mapping[Coord, Tile], s: StrengthTable) -> int:
    """Sum of bond weights between two disjoint positioned assemblies."""
    if len(b) > len(a):
        a, b = b, a
    total = 0
    for p, t in b.items():
        for side in SIDES:
            u = a.get(neighbor(p, side))
            if u is not None:
                total += bond_strength(t, side, u, s)
    return total


def cut_strength(a: Mapping[Coord, Tile], piece: Iterable[Coord], s: StrengthTable) -> int:
    piece = set(piece)
    total = 0
    for p in piece:
        t = a[p]
        for side in SIDES:
            q = neighbor(p, side)
            if q in a and q not in piece:
                total += bond_strength(t, side, a[q], s)
    return total


def positively_connected(a: Mapping[Coord, Tile], coords: Iterable[Coord], s: StrengthTable) -> bool:
    verts = set(coords)
    if not verts:
        return False
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        p = stack.pop()
        t = a[p]
        for side in SIDES:
            q = neighbor(p, side)
            if q in verts and q not in seen and bond_strength(t, side, a[q], s) > 0:
                seen.add(q)
                stack.append(q)
    return len(seen) == len(verts)


def positive_components(a: Mapping[Coord, Tile], s: StrengthTable) -> list[set[Coord]]:
    left = set(a)
    comps = []
    while left:
        start = left.pop()
        comp = {start}
        stack = [start]
        while stack:
            p = stack.pop()
            t = a[p]
            for side in SIDES:
                q = neighbor(p, side)
                if q in left and bond_strength(t, side, a[q], s) > 0:
                    left.discard(q)
                    comp.add(q)
                    stack.append(q)
        comps.append(comp)
    return comps
