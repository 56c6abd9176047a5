"""End-to-end gadget construction for a scale-24 shape.

Every outline cell of the scale-2 tree outline becomes a 12x12 block.  A
4-wide path strip runs through each block along the tour; an instruction
tape lies west of block 0.  For every instruction a read gadget copies the
section's instruction into an information unit, the unit walks to the end
of the path, and an extension gadget grows the next block's strip.  Margin
fill pieces then complete every block.

Geometry is authored in block-local ``(x, y)`` coordinates with ``y`` up and
the path heading east (+x).  Block area: ``x`` 0..11, ``y`` -7..4; the strip
occupies rows ``y`` 0..-3.  Placed pieces are returned in the package's
``(row, col)`` convention.

The generator emits a script (combine / break steps with expected
strengths and the breakable cuts each step is allowed to leave open); the
verifier executes it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .core import Coord, Tile

BLOCK_SIZE = 12
JOINT = ("Z", "Z", "B", "A")
WALL = {0: "D", 1: "D", 2: "e1", 3: "K2"}
NEXT = {"F": ((12, 0), 0), "R": ((7, -8), -1), "L": ((4, 5), 1)}
END = "M"
# Largest piece detached by any step of the construction (measured, frozen).
C_GARBAGE = 36

_SIDE = {"n": 0, "e": 1, "s": 2, "w": 3}
_STEP = {"n": (0, 1), "e": (1, 0), "s": (0, -1), "w": (-1, 0)}

XY = tuple[int, int]
Cells = dict[XY, dict[str, str]]


def to_rc(p: XY) -> Coord:
    return (-p[1], p[0])


def _rot(x: int, y: int, q: int) -> XY:
    for _ in range(q % 4):
        x, y = -y, x
    return x, y


@dataclass(frozen=True)
class Frame:
    """Block-local coordinate frame: origin and counter-clockwise quarter turns."""

    origin: XY = (0, 0)
    q: int = 0

    def g(self, x: int, y: int) -> XY:
        gx, gy = _rot(x, y, self.q)
        return gx + self.origin[0], gy + self.origin[1]

    def sub(self, origin: XY, q: int) -> "Frame":
        return Frame(self.g(*origin), (self.q + q) % 4)

    def place(self, body: Mapping[XY, Tile]) -> dict[Coord, Tile]:
        return {to_rc(self.g(x, y)): t.rotated(self.q) for (x, y), t in body.items()}

    def block(self) -> set[XY]:
        return {self.g(x, y) for x in range(BLOCK_SIZE) for y in range(-7, 5)}


@dataclass(frozen=True)
class PieceType:
    """A gadget family member: local body plus library classification."""

    name: str
    category: str
    variant: str
    special: int
    body: Mapping[XY, Tile]

    def normalized(self) -> dict[XY, Tile]:
        x0 = min(x for x, _ in self.body)
        y0 = min(y for _, y in self.body)
        return {(x - x0, y - y0): t for (x, y), t in self.body.items()}


_TYPES: dict[str, PieceType] = {}


def _piece(name: str, cells: Cells, category: str, variant: str = "none", special: int = 0) -> dict[XY, Tile]:
    """Build tiles from face maps; neighbours inside the piece get ``name!``."""
    tag = f"{name}!"
    tiles: dict[XY, Tile] = {}
    for (x, y), faces in cells.items():
        glues: list[Optional[str]] = [None] * 4
        for side, g in faces.items():
            if g not in (None, "-"):
                glues[_SIDE[side]] = g
        for side, (dx, dy) in _STEP.items():
            if (x + dx, y + dy) in cells and glues[_SIDE[side]] is None:
                glues[_SIDE[side]] = tag
        tiles[(x, y)] = Tile(tuple(glues), category)
    pt = PieceType(name, category, variant, special, tiles)
    known = _TYPES.get(name)
    if known is None:
        _TYPES[name] = pt
    elif known.normalized() != pt.normalized():
        raise AssertionError(f"piece type {name} built with two different bodies")
    return tiles


def _rows(spec: Iterable[tuple]) -> Cells:
    return {(x, y): {"n": n, "e": e, "s": s, "w": w} for x, y, n, e, s, w in spec}


def _var(v: str) -> str:
    return v if v in ("F", "L", "R") else "none"


def o2(v: str) -> str:
    """Side grip on an information block."""
    return "E2" + v.lower()


def grip(v: str) -> str:
    """Top grip on an information block."""
    return "A4" + v.lower()


# --- path ---------------------------------------------------------------------

def strip_cells(x0: int = -4, x1: int = 7) -> Cells:
    """4-wide strip: exit arm of the previous block (x -4..-1), entry arm
    (0..3) with a notch at (3, 0), centre (4..7)."""
    cells: Cells = {}
    for x in range(x0, x1 + 1):
        for y in range(0, -4, -1):
            if (x, y) != (3, 0):
                cells[(x, y)] = {}
    for x in range(x0, x1 + 1):
        if (x, 0) in cells:
            cells[(x, 0)]["n"] = WALL[x % 4]
    cells[(2, 0)]["e"] = "g"
    cells[(3, -1)]["n"] = "G"
    for y, g in ((-1, "G"), (-2, "e1"), (-3, "K2")):
        cells[(x1, y)]["e"] = g
    if x0 <= -4:
        cells[(-4, -3)]["w"] = "K2"
    cells[(1, -3)]["s"] = "e1"
    for x, g in ((-4, "G"), (3, "G"), (7, "G"), (4, "K2")):
        if (x, -3) in cells:
            cells[(x, -3)]["s"] = g
    return cells


def path_strip() -> dict[XY, Tile]:
    return _piece("strip", strip_cells(), "path_segment")


def first_strip() -> dict[XY, Tile]:
    cells = strip_cells(0, 7)
    for k, g in enumerate(JOINT):
        cells[(0, -k)]["w"] = g
    return _piece("strip0", cells, "path_segment", special=1)


def notch_fill() -> dict[XY, Tile]:
    return _piece("notch", {(3, 0): {"n": "K2", "w": "g", "s": "G"}}, "path_segment", special=2)


# --- information unit and walkers ---------------------------------------------------

def unit(b: int, v: str):
    """Helpers H1, H2 and information block of a unit at base ``b``."""
    h1 = _piece("unit_h1", _rows([(b - 1, 1, "-", "-", "K2", "Q1"), (b, 1, "J2", "-", "-", "-"),
                                  (b + 1, 1, "J2", "T2", "-", "-")]), "walker_helper")
    h2 = _piece(f"unit_h2_{v}", _rows([(b, 2, "D", "-", "J2", "i"), (b + 1, 2, "-", v, "J2", "-")]),
                "walker_helper", _var(v), 1)
    info = _piece(f"info_{v}", _rows([(b + 2, 1, "-", "Q1", "e1", "T2"), (b + 2, 2, grip(v), o2(v), "-", v)]),
                  "info_block", _var(v))
    return h1, h2, info


def walker(b: int, v: str) -> dict[XY, Tile]:
    south = {2: grip(v), 4: "D", 6: grip(v)}
    r = [(b + k, 3, "-", "-", south.get(k, "-"), "-") for k in range(1, 8)]
    # east repellers: facing a left turn's outgoing wall this walker cannot step
    r.append((b + 7, 2, "-", "D", "-", o2(v)))
    r.append((b + 7, 1, "-", "D", "K2", "-"))
    return _piece(f"walker_{v}", _rows(r), "walker", _var(v))


CONVEX_AT = 8
CONCAVE_AT = 4


def convex_walker(v: str) -> dict[XY, Tile]:
    c = CONVEX_AT
    r = [(x, 3, "-", "-", {c - 2: grip(v)}.get(x, "-"), "-") for x in range(c - 3, c + 2)]
    for y in range(3, -4, -1):
        r.append((c + 2, y, "-", "-", "-", {0: "D", -2: grip(v)}.get(y, "-")))
    r.append((c + 1, -3, o2(v), "-", "-", "-"))
    r.append((c, -3, "-", "-", "-", "K2"))
    return _piece(f"walker_convex_{v}", _rows(r), "walker", _var(v), 1)


def convex_h1() -> dict[XY, Tile]:
    c = CONVEX_AT
    return _piece("unit_h1_convex", _rows([(c - 1, 1, "-", "-", "K2", "Q1"), (c, 1, "-", "-", "-", "-"),
                                           (c, 0, "-", "J2", "-", "-"), (c, -1, "-", "J2", "T2", "-")]),
                  "walker_helper")


def concave_walker(v: str) -> dict[XY, Tile]:
    c = CONCAVE_AT
    r = [(x, 3, "-", "-", {c - 6: grip(v), c - 5: "Z5", c - 4: "Z6"}.get(x, "-"), "-")
         for x in range(c - 7, c - 3)]
    r += [(c - 3, 3, "-", grip(v), "-", "-"), (c - 3, 2, "-", "-", "-", "-"), (c - 3, 1, "-", "D", "-", "-"),
          (c - 3, 4, "-", "-", "-", "-"), (c - 2, 4, "-", "-", o2(v), "-"), (c - 1, 4, "-", "K2", "-", "-")]
    return _piece(f"walker_concave_{v}", _rows(r), "walker", _var(v), 2)


def concave_h1() -> dict[XY, Tile]:
    c = CONCAVE_AT
    return _piece("unit_h1_concave", _rows([(c - 1, 1, "-", "-", "K2", "J2"), (c - 1, 2, "T2", "-", "-", "J2")]),
                  "walker_helper")


def concave_helper() -> dict[XY, Tile]:
    c = CONCAVE_AT
    return _piece("walker_concave_helper", _rows([(c - 5, 1, "-", "-", "-", "Q1"), (c - 5, 2, "Z5", "-", "-", "-"),
                                                  (c - 4, 2, "Z6", "-", "-", "-")]), "walker_helper")


# --- extension ---------------------------------------------------------------------

def extender(v: str) -> dict[XY, Tile]:
    r = [(-3, 3, "Z", "-", "-", "Z"), (-2, 3, "-", "-", grip(v), "-"), (-1, 3, "-", "-", "-", "-"),
         (-1, 2, "-", "Z", "Z", "K1"), (0, 3, "-", "-", "Z", "-"),
         (1, 3, "-", "-", "-", "-"), (2, 3, "-", "-", "-", "-"),
         (3, 3, "-", "-", "-", "-"), (3, 2, "-", "-", "-", "-"),
         (3, 1, "-", "-", "-", "-"), (3, 0, "-", "-", "-", "g")]
    if v == "F":
        r += [(x, 1, "-", "-", {11: "K2"}.get(x, "-"), "-") for x in range(4, 12)]
    elif v == END:
        r += [(x, 1, "-", "-", {8: "Z"}.get(x, "-"), "-") for x in range(4, 9)]
    elif v == "R":
        r += [(x, 1, "-", "-", "-", "-") for x in range(4, 9)]
        r += [(8, y, "-", "-", "-", {-7: "K2"}.get(y, "-")) for y in range(0, -8, -1)]
    else:
        r += [(3, 4, "-", "K2", "-", "-")]
    return _piece(f"extender_{v}", _rows(r), "extender", _var(v))


def extender_helper_a() -> dict[XY, Tile]:
    return _piece("extender_helper_a", _rows([(-1, 1, "Z", "-", "-", "Q1"), (0, 1, "-", "-", "-", "-"),
                                              (0, 2, "Z", "-", "-", "Z")]), "extender_helper")


def extender_helper_b() -> dict[XY, Tile]:
    return _piece("extender_helper_b", _rows([(-4, 3, "-", "Z", "-", "-"), (-4, 4, "-", "-", "-", "-"),
                                              (-3, 4, "-", "-", "Z", "-")]), "extender_helper")


def remover_a(v: str) -> dict[XY, Tile]:
    return _piece(f"remover_a_{v}", _rows([(-2, 1, "-", "-", "e1", "Z"), (-2, 2, "-", "K1", "-", "-"),
                                           (-3, 2, "-", "-", "Z", "Z")]), "extender_helper", _var(v), 1)


def remover_b() -> dict[XY, Tile]:
    return _piece("remover_b", _rows([(-4, 1, "-", "-", "D", "-"), (-3, 1, "Z", "Z", "D", "-"),
                                      (-4, 2, "-", "Z", "-", "-")]), "extender_helper")


def anchor() -> dict[XY, Tile]:
    return _piece("fill_anchor", _rows([(8, 0, "Z", "-", "-", "-"), (8, -1, "-", "-", "-", "-"),
                                        (8, -2, "-", "-", "-", "-"), (8, -3, "-", "-", "G", "K2")]),
                  "fill_initiator")


def lock(v: str) -> dict[XY, Tile]:
    if v == END:
        return _piece("fill_lock", _rows([(7, -4, "G", "-", "-", "Z"), (8, -4, "G", "-", "-", "-")]),
                      "fill_initiator", special=1)
    if v == "F":
        cells = _rows([(7, -4, "G", "-", "-", "-"), (8, -4, "G", "-", "-", "-")])
    elif v == "R":
        cells = _rows([(3, -4, "G", "G", "-", "-")])
    else:
        cells = _rows([(8, 1, "-", "-", "-", "G"), (8, 0, "-", "-", "-", "-"), (8, -1, "-", "-", "-", "G")])
    return _piece(f"lock_{v}", cells, "path_segment", _var(v), 3)


# --- tape, read and reduce ------------------------------------------------------------

def section_offset(i: int, sections: int) -> int:
    """West x of tape section ``i`` in the block-0 frame."""
    return -4 * (sections - i)


def tape_section(i: int, s: int, v: str):
    """Section ``i`` at x s..s+3 (rows 0..-3) and its instruction pair below.

    Each position gets its own tile types, so the tape is a brute-force
    encoding of the program.
    """
    sec: Cells = {}
    for x in range(s, s + 4):
        for y in range(0, -4, -1):
            sec[(x, y)] = {}
        sec[(x, 0)]["n"] = WALL[x % 4]
    for k, g in enumerate(JOINT):
        sec[(s, -k)]["w"] = g
        sec[(s + 3, -k)]["e"] = g
    sec[(s, -3)]["s"] = "Z"
    sec[(s + 1, -3)]["s"] = "J3"
    sec[(s + 2, -3)]["s"] = "A"
    pair = {(s + 1, -4): {"n": "J3", "w": "Z3" + v.lower(), "s": "Y3" + v.lower()},
            (s + 2, -4): {"n": "A"}}
    return (_piece(f"tape{i}", sec, "tape_section", special=i),
            _piece(f"tape{i}_{v}", pair, "tape_section", _var(v), i))


def read_gadget(s: int, v: str) -> dict[XY, Tile]:
    b = s + 4
    cells: Cells = {}
    for p in [(s - 1, -5), (s, -5), (s - 1, -4)] + [(s - 1, y) for y in range(-3, 4)]:
        cells[p] = {}
    cells[(s + 1, -5)] = {"n": "Y3" + v.lower()}
    cells[(s, -4)] = {"e": "Z3" + v.lower()}
    for x in range(s, s + 8):
        cells[(x, 3)] = {"s": {b: "D", b + 2: grip(v), s + 1: "C", s + 2: "C", s + 3: "C"}.get(x)}
    cells[(s + 7, 2)] = {"w": o2(v)}
    return _piece(f"read_{v}", cells, "read", _var(v))


def read_remover(s: int) -> dict[XY, Tile]:
    return _piece("read_remover", _rows([(s + 1, 1, "-", "-", "D", "-"), (s + 1, 2, "C", "-", "-", "-"),
                                         (s + 2, 2, "C", "-", "-", "-"), (s + 3, 2, "C", "i", "-", "-")]),
                  "read_helper")


def reducer(s: int) -> dict[XY, Tile]:
    c: Cells = {}
    for y in range(-4, 2):
        c[(s - 1, y)] = {}
    for x in range(s, s + 4):
        c[(x, -4)] = {}
    for x in range(s, s + 6):
        c[(x, 1)] = {}
    for k, g in enumerate(JOINT):
        c[(s - 1, -k)]["e"] = g
    c[(s, -4)]["n"] = "Z"
    c[(s + 1, -4)]["n"] = "J3"
    c[(s + 2, -4)]["n"] = "A"
    c[(s + 4, 1)]["s"] = "D"
    c[(s + 5, 1)]["s"] = "D"
    return _piece("reducer", c, "reducer")


# --- margin fill -----------------------------------------------------------------------

_BLOCK = {(x, y) for x in range(BLOCK_SIZE) for y in range(-7, 5)}
_STRIP = {
    "F": {(x, y) for x in range(12) for y in range(0, -4, -1)},
    "R": {(x, y) for x in range(8) for y in range(0, -4, -1)} | {(x, y) for x in range(4, 8) for y in range(-4, -8, -1)},
    "L": {(x, y) for x in range(8) for y in range(0, -4, -1)} | {(x, y) for x in range(4, 8) for y in range(1, 5)},
    END: {(x, y) for x in range(8) for y in range(0, -4, -1)},
}
_LOCKS = {"F": {(7, -4), (8, -4)}, "R": {(3, -4)}, "L": {(8, 1), (8, 0), (8, -1)},
          END: {(8, 0), (8, -1), (8, -2), (8, -3), (7, -4), (8, -4)}}
_TOP = {(x, y) for x in range(12) for y in range(1, 5)}
_LEFT = {"F": _TOP, "R": _TOP | {(x, y) for x in range(8, 12) for y in range(0, -8, -1)},
         "L": {(x, y) for x in range(4) for y in range(1, 5)},
         END: _TOP | {(x, y) for x in range(8, 12) for y in range(0, -8, -1)}}
# face through which each fill piece binds the downstream block's piece
_DOWN_LEFT = {"F": ((11, 1), "e"), "R": ((8, -7), "s"), "L": ((3, 4), "n"), END: ((8, 1), "s")}
_DOWN_RIGHT = {"F": ((11, -5), "e"), "R": ((2, -7), "s"), "L": ((9, 4), "n"), END: ((6, -4), "e")}


def fill_regions(t: str) -> tuple[set[XY], set[XY]]:
    rest = _BLOCK - _STRIP[t] - _LOCKS[t]
    left = _LEFT[t] & rest
    return left, rest - left


def fill_pieces(t: str):
    """Left and right margin pieces of a block whose exit is ``t``."""
    left, right = fill_regions(t)
    out = []
    for side, cells, contact, down, up in (("left", left, ((2, 1), "s"), _DOWN_LEFT[t], (0, 1)),
                                           ("right", right, ((1, -4), "n"), _DOWN_RIGHT[t], (0, -5))):
        c: Cells = {p: {} for p in cells}
        c[contact[0]][contact[1]] = "e1"
        c[down[0]][down[1]] = "Z"
        c[up]["w"] = "Z"
        tname = "E" if t == END else t
        name = f"fill_{tname}_{side}"
        out.append(_piece(name, c, "fill_block", _var(t), 0 if side == "left" else 1))
    return out


# --- script ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    """One scripted reaction.

    ``names`` is the attaching instance (combine) or the instances that
    detach together (break).  ``allowed`` lists instance-name sets whose
    separation may be breakable right after this step.
    """

    kind: str
    names: tuple[str, ...]
    expected: Optional[int]
    allowed: tuple[frozenset[str], ...] = ()
    piece: Optional[Mapping[Coord, Tile]] = None
    gadget: Optional[str] = None
    phase: str = ""


@dataclass(frozen=True)
class Placement:
    """Where an instance sits: gadget type, quarter turns, placed cell -> body cell."""

    gadget: str
    q: int
    local: Mapping[Coord, XY]


def _placement(gadget: str, fr: Frame, body: Mapping[XY, Tile]) -> Placement:
    x0 = min(x for x, _ in body)
    y0 = min(y for _, y in body)
    return Placement(gadget, fr.q, {to_rc(fr.g(x, y)): (x - x0, y - y0) for x, y in body})


@dataclass
class ConstructionScript:
    program: str
    start: list[tuple[str, dict[Coord, Tile]]] = field(default_factory=list)
    steps: list[Step] = field(default_factory=list)
    frames: list[Frame] = field(default_factory=list)
    placements: dict[str, Placement] = field(default_factory=dict)
    types: dict[str, PieceType] = field(default_factory=dict)

    def target_cells(self) -> set[Coord]:
        out: set[Coord] = set()
        for fr in self.frames:
            out |= {to_rc(p) for p in fr.block()}
        return out

    def gadget_names(self) -> set[str]:
        return {s.gadget for s in self.steps if s.gadget}


class _Builder:
    def __init__(self, program: str):
        self.script = ConstructionScript(program)
        self.count: dict[str, int] = {}
        self.unit: tuple[str, str, str] = ("", "", "")

    def name(self, role: str) -> str:
        k = self.count.get(role, 0)
        self.count[role] = k + 1
        return f"{role}{k}"

    def combine(self, role: str, fr: Frame, body: Mapping[XY, Tile], expected: Optional[int],
                allowed: Iterable[Iterable[str]] = (), phase: str = "") -> str:
        inst = self.name(role)
        # "@" in an allowed set stands for the instance being attached
        sets = tuple(frozenset(inst if n == "@" else n for n in a) for a in allowed)
        tname = _type_of(body)
        self.script.placements[inst] = _placement(tname, fr, body)
        self.script.steps.append(Step("combine", (inst,), expected, sets, fr.place(body), tname, phase))
        return inst

    def start(self, inst: str, fr: Frame, body: Mapping[XY, Tile]):
        self.script.placements[inst] = _placement(_type_of(body), fr, body)
        self.script.start.append((inst, fr.place(body)))

    def brk(self, names: Iterable[str], expected: Optional[int], allowed: Iterable[Iterable[str]] = (),
            phase: str = ""):
        self.script.steps.append(Step("break", tuple(names), expected,
                                      tuple(frozenset(a) for a in allowed), phase=phase))

    def allow_last(self, allowed: Iterable[Iterable[str]]):
        """Widen the allowed cuts of the most recent step."""
        last = self.script.steps[-1]
        self.script.steps[-1] = Step(last.kind, last.names, last.expected,
                                     last.allowed + tuple(frozenset(a) for a in allowed),
                                     last.piece, last.gadget, last.phase)


def _type_of(body: Mapping[XY, Tile]) -> str:
    for t in body.values():
        for g in t.glues:
            if g and g.endswith("!"):
                return g[:-1]
    # single-tile pieces carry no internal tag
    for name, pt in _TYPES.items():
        if len(pt.body) == len(body) == 1 and next(iter(pt.body.values())) == next(iter(body.values())):
            return name
    raise AssertionError("unregistered piece")


# step strengths of the walking gadgets
_STD_WALK = (11, 10, 12, 9, 9, 10, 9)
_CONVEX_WALK = (11, 10, 12, 9, 9, 10, 9)
_CONCAVE_WALK = (11, 10, 16, 14, 9, 9, 10, 9)


def _std_step(bd: _Builder, fr: Frame, b: int, v: str):
    w1, w2, w3, w4, w5, w6, w7 = _STD_WALK
    h1, h2, info = bd.unit
    wk = bd.combine("walker", fr, walker(b, v), w1, phase="walk")
    nh1, nh2, ninfo = unit(b + 4, v)
    ni = bd.combine("info", fr, ninfo, w2, phase="walk")
    n1 = bd.combine("h1_", fr, nh1, w3, [[info]], phase="walk")
    bd.brk([info], w4, [[h1, h2]], phase="walk")
    bd.brk([h1, h2], w5, phase="walk")
    n2 = bd.combine("h2_", fr, nh2, w6, [[wk]], phase="walk")
    bd.brk([wk], w7, phase="walk")
    bd.unit = (n1, n2, ni)


def _convex_step(bd: _Builder, fr: Frame, v: str) -> Frame:
    w1, w2, w3, w4, w5, w6, w7 = _CONVEX_WALK
    h1, h2, info = bd.unit
    wk = bd.combine("walker", fr, convex_walker(v), w1, phase="walk")
    nf = fr.sub((CONVEX_AT - 1, 0), -1)
    _, nh2, ninfo = unit(0, v)
    ni = bd.combine("info", nf, ninfo, w2, phase="walk")
    n1 = bd.combine("h1_", fr, convex_h1(), w3, [[info]], phase="walk")
    bd.brk([info], w4, [[h1, h2]], phase="walk")
    bd.brk([h1, h2], w5, phase="walk")
    n2 = bd.combine("h2_", nf, nh2, w6, [[wk]], phase="walk")
    bd.brk([wk], w7, phase="walk")
    bd.unit = (n1, n2, ni)
    return nf


def _concave_step(bd: _Builder, fr: Frame, v: str) -> Frame:
    w1, w2, w3, w4, w5, w6, w7, w8 = _CONCAVE_WALK
    h1, h2, info = bd.unit
    wk = bd.combine("walker", fr, concave_walker(v), w1, phase="walk")
    nf = fr.sub((CONCAVE_AT, 1), 1)
    _, nh2, ninfo = unit(0, v)
    ni = bd.combine("info", nf, ninfo, w2, phase="walk")
    n1 = bd.combine("h1_", fr, concave_h1(), w3, phase="walk")
    hv = bd.combine("walker_helper", fr, concave_helper(), w4, [[info]], phase="walk")
    bd.brk([info], w5, [[h1, h2]], phase="walk")
    bd.brk([h1, h2], w6, phase="walk")
    n2 = bd.combine("h2_", nf, nh2, w7, [[wk, hv]], phase="walk")
    bd.brk([wk, hv], w8, phase="walk")
    bd.unit = (n1, n2, ni)
    return nf


def _walk_to_end(bd: _Builder, program: str, b: int, v: str, after_first=None):
    frames = bd.script.frames
    k = 0
    first = True
    while True:
        last = k == len(frames) - 1
        e = None if last else program[k]
        if e == "F" and b - 12 >= -8:
            k, b = k + 1, b - 12
            continue
        fr = frames[k]
        if e is None and b == -4:
            return
        if e == "R" and b == 4:
            _convex_step(bd, fr, v)
            k, b = k + 1, -8
        elif e == "L" and b == -4:
            _concave_step(bd, fr, v)
            k, b = k + 1, -4
        else:
            _std_step(bd, fr, b, v)
            b += 4
        if first and after_first:
            after_first()
        first = False


def _extend(bd: _Builder, fr: Frame, v: str) -> Frame:
    h1, h2, info = bd.unit
    ex = bd.combine("extender", fr, extender(v), 10, phase="extend")
    if v == END:
        nf = fr
        bd.combine("anchor", fr, anchor(), 18, phase="extend")
    else:
        o, q = NEXT[v]
        nf = fr.sub(o, q)
        bd.combine("strip", nf, path_strip(), 18, phase="extend")
    bd.combine("lock", fr, lock(v), 16, phase="extend")
    a = bd.combine("ext_helper_a", fr, extender_helper_a(), 23, [[info]], phase="extend")
    bd.brk([info], 9, [[h1, h2]], phase="extend")
    bd.brk([h1, h2], 9, phase="extend")
    b = bd.combine("ext_helper_b", fr, extender_helper_b(), 18, phase="extend")
    ra = bd.combine("remover_a", fr, remover_a(v), 12, phase="extend")
    rb = bd.combine("remover_b", fr, remover_b(), 13, phase="extend")
    group = [ex, a, b, ra, rb]
    bd.allow_last([group, [ra, rb]])
    bd.brk(group, 6, phase="extend")
    bd.combine("notch", fr, notch_fill(), 16, phase="extend")
    return nf


def build_script(program: str) -> ConstructionScript:
    """Scripted run of the construction for an F/L/R program."""
    if not program or set(program) - set("FLR"):
        raise ValueError("program must be a non-empty string over F, L, R")
    full = program + END
    bd = _Builder(program)
    sc = bd.script
    f0 = Frame()
    sc.frames.append(f0)
    bd.start("first_strip", f0, first_strip())
    m = len(full)
    for i, v in enumerate(full):
        sec, pair = tape_section(i, section_offset(i, m), v)
        bd.start(f"tape{i}", f0, sec)
        bd.start(f"pair{i}", f0, pair)
    for i, v in enumerate(full):
        s = section_offset(i, m)
        rg = bd.combine("read", f0, read_gadget(s, v), 18, phase="read")
        h1, h2, info = unit(s + 4, v)
        ni = bd.combine("info", f0, info, 10, phase="read")
        n1 = bd.combine("h1_", f0, h1, 16, phase="read")
        n2 = bd.combine("h2_", f0, h2, 10, phase="read")
        rr = bd.combine("read_remover", f0, read_remover(s), 10, [[rg, f"pair{i}", "@"]], phase="read")
        bd.brk([rg, f"pair{i}", rr], 8, phase="read")
        bd.unit = (n1, n2, ni)

        def reduce(s=s, i=i):
            rd = bd.combine("reducer", f0, reducer(s), 28, [["@", f"tape{i}"]], phase="reduce")
            bd.brk([rd, f"tape{i}"], 9, phase="reduce")

        _walk_to_end(bd, program, s + 4, v, after_first=reduce)
        nf = _extend(bd, sc.frames[-1], v)
        if v != END:
            sc.frames.append(nf)
    for k in range(len(program), -1, -1):
        t = program[k] if k < len(program) else END
        left, right = fill_pieces(t)
        bd.combine("fill", sc.frames[k], left, None, phase="fill")
        bd.combine("fill", sc.frames[k], right, None, phase="fill")
    sc.types = {n: _TYPES[n] for n in {pl.gadget for pl in sc.placements.values()}}
    return sc


def specialize_glues(script: ConstructionScript) -> ConstructionScript:
    """Give every bonding interface its own glue name.

    Each rotation of a gadget becomes its own tile type.  Faces that meet
    with equal glue names anywhere in the scripted run are grouped; each
    group gets a fresh name with the same base (so the same
    strength), and faces that never meet lose their glue.  Negative glues
    keep their names.  Every scripted
    state keeps exactly the same bond graph, while gadgets lose most ways
    of attaching anywhere else.
    """
    from .core import SIDES, glue_base, neighbor, opposite
    from .gadgets import default_strengths

    parent: dict = {}

    def find(k):
        parent.setdefault(k, k)
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def key(inst: str, p: Coord, side: int):
        pl = script.placements[inst]
        return ((pl.gadget, pl.q), pl.local[p], (side + pl.q) % 4)

    tiles: dict[Coord, Tile] = {}
    owner: dict[Coord, str] = {}

    def attach(inst: str, piece: Mapping[Coord, Tile]):
        for p, t in piece.items():
            for side in SIDES:
                g = t.glues[side]
                q = neighbor(p, side)
                if g is None or g.endswith("!") or q not in tiles:
                    continue
                if tiles[q].glues[opposite(side)] == g:
                    a, b = find(key(inst, p, side)), find(key(owner[q], q, opposite(side)))
                    parent[a] = b
        for p, t in piece.items():
            tiles[p] = t
            owner[p] = inst

    for inst, piece in script.start:
        attach(inst, piece)
    for step in script.steps:
        if step.kind == "combine":
            attach(step.names[0], step.piece)
        else:
            names = set(step.names)
            for p in [p for p, o in owner.items() if o in names]:
                del tiles[p]
                del owner[p]

    def rname(gadget: str, q: int) -> str:
        return f"{gadget}_r{q}"

    table = default_strengths()

    def negative(g: str) -> bool:
        # repulsion stays universal so it still guards unscripted sites
        return table.strength(g) < 0

    used = sorted({(pl.gadget, pl.q) for pl in script.placements.values()})
    names: dict = {}
    types: dict[str, PieceType] = {}
    shift: dict = {}
    for gadget, q in used:
        pt = script.types[gadget]
        fr = Frame((0, 0), q)
        turned = {xy: fr.g(*xy) for xy in pt.normalized()}
        x0 = min(x for x, _ in turned.values())
        y0 = min(y for _, y in turned.values())
        shift[(gadget, q)] = {xy: (x - x0, y - y0) for xy, (x, y) in turned.items()}
        body = {}
        for xy, t in pt.normalized().items():
            glues = []
            for side, g in enumerate(t.glues):
                k = ((gadget, q), xy, side)
                if g is None or g.endswith("!") or negative(g):
                    glues.append(g)
                elif k in parent:
                    root = find(k)
                    if root not in names:
                        names[root] = f"{glue_base(g)}{len(names)}"
                    glues.append(names[root])
                else:
                    glues.append(None)
            body[shift[(gadget, q)][xy]] = Tile(tuple(glues), t.kind).rotated(q)
        nm = rname(gadget, q)
        types[nm] = PieceType(nm, pt.category, pt.variant, pt.special, body)

    placements = {}
    for inst, pl in script.placements.items():
        sh = shift[(pl.gadget, pl.q)]
        placements[inst] = Placement(rname(pl.gadget, pl.q), 0, {p: sh[xy] for p, xy in pl.local.items()})

    def rebuild(inst: str, piece: Mapping[Coord, Tile]) -> dict[Coord, Tile]:
        pl = placements[inst]
        return {p: types[pl.gadget].body[pl.local[p]] for p in piece}

    out = ConstructionScript(script.program, frames=list(script.frames), placements=placements, types=types)
    out.start = [(inst, rebuild(inst, piece)) for inst, piece in script.start]
    for step in script.steps:
        if step.kind == "combine":
            gadget = placements[step.names[0]].gadget
            step = Step(step.kind, step.names, step.expected, step.allowed,
                        rebuild(step.names[0], step.piece), gadget, step.phase)
        out.steps.append(step)
    return out


def piece_types() -> dict[str, PieceType]:
    """Every piece type built so far (build a script first to populate)."""
    return dict(_TYPES)


def all_piece_types() -> dict[str, PieceType]:
    """Every piece type the construction can use, independent of any program."""
    for v in "FLR" + END:
        unit(0, v)
        walker(0, v)
        convex_walker(v)
        concave_walker(v)
        extender(v)
        remover_a(v)
        lock(v)
        read_gadget(0, v)
        fill_pieces(v)
    convex_h1()
    concave_h1()
    concave_helper()
    extender_helper_a()
    extender_helper_b()
    remover_b()
    anchor()
    path_strip()
    first_strip()
    notch_fill()
    read_remover(0)
    reducer(0)
    return {k: v for k, v in _TYPES.items() if not k.startswith("tape")}
