"""Shape compiler: spanning tree, scale-2 outline tour, F/L/R instructions and
complexity accounting.

Coordinates are (row, col) with row 0 on top.  Headings use the side
constants of :mod:`negglue.core` (N=0, E=1, S=2, W=3); a right turn is
``(h + 1) % 4``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .construction import C_GARBAGE, END, Frame, build_script, section_offset, specialize_glues, tape_section
from .core import (DELTA, E, N, S, SIDES, W, Coord, PositionedAssembly, Shape, canonicalize,
                   is_connected_cells, neighbor, scale)
from .engine import SystemConfig
from .gadgets import TAU, GadgetLoadError, default_strengths, parse_gadgets

SCALE = 24
OUTLINE_SCALE = 2
BLOCK = SCALE // OUTLINE_SCALE
TURN = {"F": 0, "R": 1, "L": 3}


class EmptyShape(ValueError):
    pass


class DisconnectedShape(ValueError):
    pass


def parse_shape(text: str) -> Shape:
    """Parse ``#``/``.`` rows into a canonical, 4-connected shape."""
    sh = Shape.from_text(text)
    if not sh.cells:
        raise EmptyShape("shape has no '#' cells")
    if not is_connected_cells(sh.cells):
        raise DisconnectedShape("shape is not 4-connected")
    return sh


@dataclass(frozen=True)
class SpanningTree:
    nodes: frozenset[Coord]
    edges: frozenset[frozenset[Coord]]

    def adjacent(self, p: Coord, q: Coord) -> bool:
        return frozenset((p, q)) in self.edges

    def is_valid(self) -> bool:
        if len(self.edges) != len(self.nodes) - 1:
            return False
        adj: dict[Coord, list[Coord]] = {p: [] for p in self.nodes}
        for e in self.edges:
            p, q = tuple(e)
            adj[p].append(q)
            adj[q].append(p)
        start = min(self.nodes)
        seen = {start}
        stack = [start]
        while stack:
            p = stack.pop()
            for q in adj[p]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return len(seen) == len(self.nodes)


def spanning_tree(sh: Shape) -> SpanningTree:
    """Depth-first tree from the smallest cell, trying N, E, S, W in order."""
    cells = set(sh.cells)
    if not cells:
        raise EmptyShape("shape has no cells")
    root = min(cells)
    seen = {root}
    edges = set()
    stack = [(root, iter(SIDES))]
    while stack:
        p, sides = stack[-1]
        for side in sides:
            q = neighbor(p, side)
            if q in cells and q not in seen:
                seen.add(q)
                edges.add(frozenset((p, q)))
                stack.append((q, iter(SIDES)))
                break
        else:
            stack.pop()
    if len(seen) != len(cells):
        raise DisconnectedShape("shape is not 4-connected")
    return SpanningTree(frozenset(cells), frozenset(edges))


def outline_tour(tree: SpanningTree) -> list[Coord]:
    """Closed clockwise tour of the scale-2 outline of ``tree``.

    Each node becomes a 2x2 block whose four cells form a cycle; every tree
    edge swaps the two block-internal edges along the shared side for two
    edges crossing it.  The result is one Hamiltonian cycle of the doubled
    tree, returned from the smallest cell heading east.
    """
    adj: dict[Coord, set[Coord]] = {}

    def link(a, b):
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)

    def unlink(a, b):
        adj[a].discard(b)
        adj[b].discard(a)

    for r, c in tree.nodes:
        tl, tr, br, bl = (2 * r, 2 * c), (2 * r, 2 * c + 1), (2 * r + 1, 2 * c + 1), (2 * r + 1, 2 * c)
        link(tl, tr); link(tr, br); link(br, bl); link(bl, tl)
    for e in tree.edges:
        (r, c), (r2, c2) = sorted(e)
        if r == r2:  # q is east of p
            a_top, a_bot = (2 * r, 2 * c + 1), (2 * r + 1, 2 * c + 1)
            b_top, b_bot = (2 * r, 2 * c2), (2 * r + 1, 2 * c2)
            unlink(a_top, a_bot); unlink(b_top, b_bot)
            link(a_top, b_top); link(a_bot, b_bot)
        else:  # q is south of p
            a_l, a_r = (2 * r + 1, 2 * c), (2 * r + 1, 2 * c + 1)
            b_l, b_r = (2 * r2, 2 * c), (2 * r2, 2 * c + 1)
            unlink(a_l, a_r); unlink(b_l, b_r)
            link(a_l, b_l); link(a_r, b_r)
    start = min(adj)
    tour = [start]
    prev, cur = start, (start[0], start[1] + 1)
    while cur != start:
        tour.append(cur)
        nxt = [q for q in adj[cur] if q != prev]
        prev, cur = cur, nxt[0]
    return tour


def heading_between(p: Coord, q: Coord) -> int:
    d = (q[0] - p[0], q[1] - p[1])
    for side, delta in DELTA.items():
        if delta == d:
            return side
    raise ValueError(f"{p} and {q} are not adjacent")


@dataclass(frozen=True)
class InstructionSequence:
    moves: tuple[str, ...]
    start: Coord
    heading: int = E

    def __len__(self):
        return len(self.moves)

    def headings(self) -> list[int]:
        """Heading of every move (the first is relative to the start heading)."""
        out = []
        h = self.heading
        for m in self.moves:
            h = (h + TURN[m]) % 4
            out.append(h)
        return out

    def walk(self) -> list[Coord]:
        cells = [self.start]
        for h in self.headings():
            cells.append(neighbor(cells[-1], h))
        return cells

    def text(self) -> str:
        return "".join(self.moves)


def tour_instructions(tour: list[Coord], heading: int = E) -> InstructionSequence:
    moves = []
    h = heading
    for p, q in zip(tour, tour[1:]):
        nh = heading_between(p, q)
        turn = (nh - h) % 4
        if turn == 2:
            raise ValueError("outline tour reverses direction")
        moves.append({0: "F", 1: "R", 3: "L"}[turn])
        h = nh
    return InstructionSequence(tuple(moves), tour[0], heading)


def tree_outline_instructions(sh: Shape) -> InstructionSequence:
    """F/L/R moves visiting every scale-2 outline cell of the DFS tree once."""
    return tour_instructions(outline_tour(spanning_tree(sh)))


# --- complexity accounting ------------------------------------------------------

ACCOUNTING_CONSTANT = 2


@dataclass(frozen=True)
class BaseConversionPlan:
    k: int
    b: int
    d: int
    tape_tiles: int
    tm_tiles: int

    def digit_bound(self) -> int:
        return math.ceil(self.k / math.floor(math.log2(self.b)))

    def within_budget(self, constant: int = ACCOUNTING_CONSTANT) -> bool:
        return self.tape_tiles + self.tm_tiles <= constant * (self.b + self.d)


def base_conversion_plan(k: int) -> BaseConversionPlan:
    """Base ``b = ceil(k / log2 k)`` and digit count for a ``k``-bit description.

    One distinct tile per digit position builds the short tape; the
    conversion machine costs two tiles per digit value (carry / no carry).
    """
    if k < 4:
        b, d = 2, max(k, 0)
    else:
        b = math.ceil(k / math.log2(k))
        d = math.ceil(k / math.floor(math.log2(b)))
    return BaseConversionPlan(k, b, d, tape_tiles=d, tm_tiles=2 * b)


def system_bit_encoding_size(tile_count: int, tau: int) -> int:
    """Bits to write down a system: four glue indices per tile plus tau."""
    if tile_count < 1:
        raise ValueError("tile_count must be positive")
    per_glue = math.ceil(math.log2(4 * tile_count))
    return 4 * tile_count * per_glue + math.ceil(math.log2(tau + 1))


@dataclass(frozen=True)
class GarbagePolicy:
    c_garbage: int

    def allows(self, piece_size: int) -> bool:
        return piece_size <= self.c_garbage


# --- tape and compiled system -------------------------------------------------------

@dataclass(frozen=True)
class InstructionTape:
    """Instruction tape west of the first path block.

    One section per instruction plus an end-marker section whose pair
    carries the terminal instruction that starts the margin fill.
    """

    instructions: str
    assembly: PositionedAssembly
    sections: int
    section_tiles: int
    end_marker: str

    def tile_count(self) -> int:
        return len(self.assembly)


def instructions_to_tape(seq: InstructionSequence | str, lib=None) -> InstructionTape:
    """Tape assembly for ``seq``; ``lib`` is accepted for interface symmetry
    (tape tiles are positional and generated, not drawn from the library)."""

    text = seq.text() if isinstance(seq, InstructionSequence) else str(seq)
    if not text:
        raise ValueError("cannot build a tape for an empty instruction sequence")
    if set(text) - set(TURN):
        raise ValueError(f"instructions must use F, L, R: {text!r}")
    full = text + END
    f0 = Frame()
    tiles: dict = {}
    per_section = 0
    for i, v in enumerate(full):
        sec, pair = tape_section(i, section_offset(i, len(full)), v)
        per_section = len(sec) + len(pair)
        tiles.update(f0.place(sec))
        tiles.update(f0.place(pair))
    return InstructionTape(text, PositionedAssembly(tiles), len(text), per_section, END)


@dataclass
class CompiledSystem:
    """A compiled tile system plus everything needed to run and check it."""

    shape: Shape
    instructions: InstructionSequence
    tape: InstructionTape
    config: SystemConfig
    policy: GarbagePolicy
    target: Shape
    script: object = field(repr=False, default=None)

    def __iter__(self):
        yield self.config
        yield self.policy

    def to_text(self) -> str:
        return serialize_system(self)


def _supply(types, start_tiles):
    out = []
    for pt in types:
        out.append(canonicalize({(-y, x): t for (x, y), t in pt.body.items()}))
    out.append(canonicalize(start_tiles))
    return out


def compile_shape(sh: Shape) -> CompiledSystem:
    """Compile a connected shape into a tau=10 system targeting ``scale(sh, 24)``."""

    if not sh.cells:
        raise EmptyShape("shape has no cells")
    if not is_connected_cells(sh.cells):
        raise DisconnectedShape("shape is not 4-connected")
    seq = tree_outline_instructions(sh)
    tape = instructions_to_tape(seq)
    script = specialize_glues(build_script(seq.text()))
    types = script.types
    used = sorted(script.gadget_names())
    start = {}
    for _, piece in script.start:
        start.update(piece)
    cfg = SystemConfig(TAU, default_strengths(), gadget_supply=_supply([types[n] for n in used], start))
    target = scale(sh, SCALE)
    return CompiledSystem(sh, seq, tape, cfg, GarbagePolicy(C_GARBAGE), target, script)


compile = compile_shape


# --- serialization -------------------------------------------------------------------------

def _glue_text(g):
    if g is None:
        return "-"
    return "k!" if g.endswith("!") else g


def serialize_system(system: CompiledSystem) -> str:
    """Gadget-file text: strengths, every gadget the script uses, and a tape block."""

    types = system.script.types
    lines = ["# compiled system", "[strengths]"]
    for k, v in system.config.strengths.entries.items():
        lines.append(f"{k} {v}")
    lines.append("")
    for name in sorted(system.script.gadget_names()):
        pt = types[name]
        lines.append(f"[gadget {name} {pt.category} {pt.variant}:{pt.special}]")
        for (x, y), t in sorted(pt.normalized().items()):
            lines.append(f"{x} {y} " + " ".join(_glue_text(g) for g in t.glues))
        lines.append("")
    lines.append("[tape]")
    lines.append(f"temperature {system.config.temperature}")
    lines.append(f"instructions {system.instructions.text()}")
    # '#' starts a comment in the file format, so cells are written as 1/0
    rows = system.shape.to_text().replace("#", "1").replace(".", "0").split("\n")
    lines.append(f"shape {'/'.join(rows)}")
    for i, v in enumerate(system.tape.instructions + system.tape.end_marker):
        lines.append(f"section {i} {v}")
    return "\n".join(lines) + "\n"


class CorruptSystem(ValueError):
    pass


def _shape_signature(body):
    """Body with internal-bond names erased, translated to the origin."""
    x0 = min(x for x, _ in body)
    y0 = min(y for _, y in body)
    return {(x - x0, y - y0): tuple("!" if g and g.endswith("!") else g for g in t.glues)
            for (x, y), t in body.items()}


def load_system(text: str) -> CompiledSystem:
    """Rebuild a compiled system from its serialized text, checking that every
    serialized gadget matches the construction's gadget of the same name."""

    try:
        lib = parse_gadgets(text, check_stability=False, unique_keys=False)
    except GadgetLoadError as exc:
        raise CorruptSystem(str(exc)) from None
    meta = {}
    for parts in lib.tape:
        if parts and parts[0] in ("instructions", "shape", "temperature"):
            if len(parts) != 2:
                raise CorruptSystem(f"malformed tape record {' '.join(parts)!r}")
            meta[parts[0]] = parts[1]
    if "shape" not in meta or "instructions" not in meta:
        raise CorruptSystem("tape block lacks shape or instructions")
    try:
        text = meta["shape"].replace("1", "#").replace("0", ".").replace("/", "\n")
        sh = parse_shape(text)
    except ValueError as exc:
        raise CorruptSystem(f"bad shape: {exc}") from None
    system = compile_shape(sh)
    if system.instructions.text() != meta["instructions"]:
        raise CorruptSystem("instructions do not match the shape")
    types = system.script.types
    for name in system.script.gadget_names():
        g = lib.gadgets.get(name)
        if g is None:
            raise CorruptSystem(f"gadget {name} missing")
        body = {(c, -r): t for (r, c), t in g.body.items()}
        if _shape_signature(body) != _shape_signature(types[name].body):
            raise CorruptSystem(f"gadget {name} differs from the construction")
    if lib.strengths.entries != system.config.strengths.entries:
        raise CorruptSystem("strength table differs from the default table")
    if "temperature" in meta and meta["temperature"] != str(system.config.temperature):
        raise CorruptSystem("temperature differs")
    return system
