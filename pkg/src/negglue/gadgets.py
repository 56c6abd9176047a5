"""Gadget library: glue strengths, inequality rows, gadget bodies and trace scripts.

The gadget data lives in a plain-text file (``data/gadgets.txt``)::

    [strengths]
    F 1
    [gadget read_F read F]
    # x y north east south west   (y grows upwards)
    0 0 n T! - -
    [trace read]
    start tape:tape_plain@0,0
    combine S rd:read_F@-1,1 10 = n+T+F
    break S rd+rh 6 = F+F+M+n+T+F+D

Glue slots are a label, ``-`` for none, or ``label!`` for an infinite bond
to the matching neighbour inside the same gadget.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .core import Coord, StrengthTable, Tile, UnknownGlue, canonicalize, Assembly
from .engine import SystemConfig, stability_verdict

TAU = 10

GLUE_STRENGTHS = {
    **dict.fromkeys("FLRM", 1),
    **dict.fromkeys("AXfklrpwh", 2),
    **dict.fromkeys(["B", "b", "e", "f*"], 3),
    **dict.fromkeys("Ca", 4),
    **dict.fromkeys("NESWiq", 5),
    "d": 6,
    **dict.fromkeys("OT", 7),
    **dict.fromkeys("GHJUcgjmstuvxz", 8),
    **dict.fromkeys("KPVYZ", 9),
    "Q": -4,
    "o": -5,
    "D": -7,
}

# Labels used in worked strength sums but missing from the strength table;
# values are the ones the arithmetic implies.
IMPLIED_STRENGTHS = {"n": 2, "I": 5, "h*": 3}

CATEGORIES = (
    "overlay_initiator", "overlay_helper", "read", "read_helper", "info_block",
    "walker", "walker_helper", "extender", "extender_helper", "reducer",
    "reducer_helper", "fill_initiator", "fill_block", "tape_section", "buffer",
    "path_segment",
)
VARIANTS = ("F", "L", "R", "none")


def default_strengths() -> StrengthTable:
    return StrengthTable({**GLUE_STRENGTHS, **IMPLIED_STRENGTHS})


# --- inequality rows ---------------------------------------------------------

@dataclass(frozen=True)
class InequalityRow:
    group: str
    lhs: tuple[str, ...]
    relation: str  # ">=" or "<"

    def value(self, s: StrengthTable) -> int:
        return sum(s.strength(g) for g in self.lhs)

    def holds(self, s: StrengthTable, tau: int) -> bool:
        v = self.value(s)
        return v >= tau if self.relation == ">=" else v < tau

    def __str__(self):
        return f"{'+'.join(self.lhs)} {'>=' if self.relation == '>=' else '<'} tau"


_ROWS = {
    "overlay": ["t+h^", "h+h*+i", "i+q", "f+f*+i", "e+w+q"],
    "read": ["J+A", "n+T+F", "K+M", "J+F+F", "F+F+J+A+A+Q", "J+J+Q",
             "F+F+M+K+J+Q", "A+A+O", "F+F+M+n+T+F+Q<"],
    "walk": ["F+F+J", "F+O+X", "J+Z+D", "F+O+J+D<", "Z+Z+D", "Z+Z+J+D",
             "F+O+X+J+D", "J+A+A+F+F+D<", "M+K+J+F+F+D", "J+A+J+F+F+D",
             "M+K+A+A+A+F+F+D", "J+O+J+F+F+D"],
    "extend": ["V+V+D", "H+X", "O+V+V+D", "V+O", "B+C+F+p", "H+P",
               "X+p+J+X+D<", "P+P"],
    "reduce": ["A+U", "u+u", "s+m+o", "s+s", "u+u+e+o+o<"],
    "extend-left": ["V+V+D", "G+X", "B+C+L+X", "G+P", "X+X+G+X+D<", "P+P"],
    "walk-left": ["F+O+X", "C+F+W", "F+O+W+Q<", "Z+Z+Q", "C+F+X+G+D<", "G+Z+D"],
    "extend-right": ["V+V+D", "V+O", "B+C+R+X", "P+G", "X+X+G+X+D<", "X+G"],
    "walk-right": ["F+O+X", "C+F+E", "F+O+E+Q<", "G+Z+D", "C+F+X+G+D<", "Z+Z+Q"],
    "fill": ["H+I", "u+u", "Y+G", "s+s", "b+b+a", "J+s", "s+X+S+X", "s+G"],
    "fill-forward": ["Y+G"],
    "fill-left": ["Y+G"],
    "fill-right": ["Y+G"],
}


def inequality_rows() -> list[InequalityRow]:
    rows = []
    for group, items in _ROWS.items():
        for text in items:
            rel = "<" if text.endswith("<") else ">="
            rows.append(InequalityRow(group, tuple(text.rstrip("<").split("+")), rel))
    return rows


@dataclass
class RowResult:
    row: InequalityRow
    value: int
    passed: bool


@dataclass
class InequalityReport:
    rows: list[RowResult]
    single_glue_failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.single_glue_failures and all(r.passed for r in self.rows)

    def lines(self, tau: int = TAU) -> list[str]:
        out = []
        for r in self.rows:
            rel = ">=" if r.row.relation == ">=" else "<"
            out.append(f"{'PASS' if r.passed else 'FAIL'} [{r.row.group}] "
                       f"{'+'.join(r.row.lhs)} = {r.value} {rel} {tau}")
        for g in self.single_glue_failures:
            out.append(f"FAIL single glue {g} >= {tau}")
        return out


def verify_inequalities(s: StrengthTable, tau: int = TAU) -> InequalityReport:
    results = [RowResult(r, r.value(s), r.holds(s, tau)) for r in inequality_rows()]
    single = sorted(k for k, v in s.entries.items() if v >= tau)
    return InequalityReport(results, single)


# --- gadget file ---------------------------------------------------------------

class GadgetLoadError(ValueError):
    pass


@dataclass(frozen=True)
class Gadget:
    name: str
    category: str
    variant: str
    special: int
    body: Mapping[Coord, Tile]  # (row, col) positioned, as written

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.category, self.variant, self.special)

    def assembly(self) -> Assembly:
        return canonicalize(self.body)

    def placed(self, x: int, y: int, quarter_turns: int = 0) -> dict[Coord, Tile]:
        out = {}
        for (r, c), t in self.body.items():
            gx, gy = c, -r
            for _ in range(quarter_turns % 4):
                gx, gy = -gy, gx
            out[(-(gy + y), gx + x)] = t.rotated(quarter_turns)
        return out


@dataclass(frozen=True)
class TraceStep:
    kind: str                 # "combine" or "break"
    names: tuple[str, ...]    # instance names (one for combine)
    gadget: Optional[str]     # gadget name for combine
    where: tuple[int, int, int]
    expected: int
    formula: tuple[str, ...]  # glue labels of the recorded strength sum, if any
    piece: Optional[dict] = None


@dataclass
class TraceScript:
    name: str
    start: list[tuple[str, dict]] = field(default_factory=list)
    steps: list[TraceStep] = field(default_factory=list)


@dataclass
class GadgetLibrary:
    strengths: StrengthTable
    gadgets: dict[str, Gadget]
    traces: dict[str, TraceScript]
    tape_sections: dict[str, str] = field(default_factory=dict)
    tape: list[list[str]] = field(default_factory=list)

    def by_category(self, category: str) -> list[Gadget]:
        return [g for g in self.gadgets.values() if g.category == category]

    def __getitem__(self, name: str) -> Gadget:
        return self.gadgets[name]


_HEADER = re.compile(r"^\[(\w+)(?:\s+([^\]]*))?\]$")
_PLACE = re.compile(r"^(?:(\w+):)?([\w\-]+)@(-?\d+),(-?\d+)(?:,(-?\d+))?$")
REQUIRED_CATEGORIES = ("read", "info_block", "walker", "extender", "reducer", "fill_initiator")


def _qualify(label: str, gadget: str) -> Optional[str]:
    if label == "-":
        return None
    if label.endswith("!"):
        return f"{label[:-1]}.{gadget}!"
    return label


def _build_body(name: str, rows: list[tuple[int, int, list[str]]], kind: str) -> dict[Coord, Tile]:
    body: dict[Coord, Tile] = {}
    for x, y, slots in rows:
        if (-y, x) in body:
            raise GadgetLoadError(f"gadget {name}: duplicate cell ({x},{y})")
        body[(-y, x)] = Tile(tuple(_qualify(g, name) for g in slots), kind)
    return body


def _check_infinite(name: str, body: Mapping[Coord, Tile]):
    from .core import SIDES, neighbor, opposite
    for p, t in body.items():
        for side in SIDES:
            g = t.glues[side]
            if g is None or not g.endswith("!"):
                continue
            q = neighbor(p, side)
            u = body.get(q)
            if u is None or u.glues[opposite(side)] != g:
                raise GadgetLoadError(f"gadget {name}: dangling infinite glue {g.split('.')[0]}! at {p}")


def parse_gadgets(text: str, check_stability: bool = True, unique_keys: bool = True) -> GadgetLibrary:
    section = None
    header: list[str] = []
    strengths: dict[str, int] = {}
    pending: list[tuple[str, list[str], list]] = []
    traces: dict[str, TraceScript] = {}
    rows: list = []

    def flush():
        if section in ("gadget", "trace", "tape"):
            pending.append((section, header, rows))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            flush()
            section = m.group(1)
            header = (m.group(2) or "").split()
            rows = []
            if section not in ("strengths", "gadget", "trace", "tape"):
                raise GadgetLoadError(f"line {lineno}: unknown section [{section}]")
            continue
        parts = line.split()
        if section == "strengths":
            if len(parts) != 2:
                raise GadgetLoadError(f"line {lineno}: malformed strength record")
            try:
                strengths[parts[0]] = int(parts[1])
            except ValueError:
                raise GadgetLoadError(f"line {lineno}: malformed strength record") from None
        elif section in ("gadget", "trace", "tape"):
            rows.append((lineno, parts))
        else:
            raise GadgetLoadError(f"line {lineno}: record outside a section")
    flush()

    table = StrengthTable(strengths) if strengths else default_strengths()
    gadgets: dict[str, Gadget] = {}
    seen_keys: dict[tuple, str] = {}
    for kind, hdr, body_rows in pending:
        if kind != "gadget":
            continue
        if len(hdr) != 3:
            raise GadgetLoadError(f"malformed gadget header {' '.join(hdr)!r}")
        name, category, variant = hdr
        special = 0
        if ":" in variant:
            variant, idx = variant.split(":", 1)
            special = int(idx)
        if category not in CATEGORIES:
            raise GadgetLoadError(f"gadget {name}: unknown category {category}")
        if variant not in VARIANTS:
            raise GadgetLoadError(f"gadget {name}: unknown variant {variant}")
        if name in gadgets:
            raise GadgetLoadError(f"gadget {name}: defined twice")
        cells = []
        for lineno, parts in body_rows:
            if len(parts) != 6:
                raise GadgetLoadError(f"gadget {name}: malformed record at line {lineno}")
            try:
                x, y = int(parts[0]), int(parts[1])
            except ValueError:
                raise GadgetLoadError(f"gadget {name}: malformed record at line {lineno}") from None
            for g in parts[2:]:
                if g != "-" and not g.endswith("!") and g not in table:
                    raise GadgetLoadError(f"gadget {name}: unknown glue {g}")
            cells.append((x, y, parts[2:]))
        if not cells:
            raise GadgetLoadError(f"gadget {name}: empty body")
        body = _build_body(name, cells, category)
        _check_infinite(name, body)
        g = Gadget(name, category, variant, special, body)
        if unique_keys and g.key in seen_keys and category not in ("path_segment", "tape_section", "buffer",
                                                   "overlay_helper", "read_helper", "walker_helper",
                                                   "extender_helper", "reducer_helper", "fill_block"):
            raise GadgetLoadError(f"gadget {name}: duplicates {seen_keys[g.key]} ({category} {variant})")
        seen_keys.setdefault(g.key, name)
        gadgets[name] = g

    if check_stability:
        cfg = SystemConfig(TAU, table)
        for g in gadgets.values():
            verdict = stability_verdict(g.body, cfg)
            if not verdict.stable:
                raise GadgetLoadError(f"gadget {g.name}: body is not stable at tau={TAU}")

    for kind, hdr, body_rows in pending:
        if kind != "trace":
            continue
        if len(hdr) != 1:
            raise GadgetLoadError(f"malformed trace header {' '.join(hdr)!r}")
        traces[hdr[0]] = _parse_trace(hdr[0], body_rows, gadgets)
    tape = [parts for kind, _, body_rows in pending if kind == "tape" for _, parts in body_rows]
    return GadgetLibrary(table, gadgets, traces, tape=tape)


def _placement(token: str, gadgets: Mapping[str, Gadget], trace: str):
    m = _PLACE.match(token)
    if not m:
        raise GadgetLoadError(f"trace {trace}: bad placement {token!r}")
    alias, gname, x, y, q = m.groups()
    if gname not in gadgets:
        raise GadgetLoadError(f"trace {trace}: unknown gadget {gname}")
    where = (int(x), int(y), int(q or 0))
    return alias or gname, gname, where, gadgets[gname].placed(*where)


def _parse_trace(name: str, rows, gadgets: Mapping[str, Gadget]) -> TraceScript:
    script = TraceScript(name)
    for lineno, parts in rows:
        formula: tuple[str, ...] = ()
        if "=" in parts:
            i = parts.index("=")
            formula = tuple(parts[i + 1].split("+")) if i + 1 < len(parts) else ()
            parts = parts[:i]
        kind = parts[0]
        if kind == "start" and len(parts) == 2:
            alias, _, _, piece = _placement(parts[1], gadgets, name)
            script.start.append((alias, piece))
        elif kind == "combine" and len(parts) == 4:
            alias, gname, where, piece = _placement(parts[2], gadgets, name)
            script.steps.append(TraceStep("combine", (alias,), gname, where, int(parts[3]), formula, piece))
        elif kind == "break" and len(parts) == 4:
            script.steps.append(TraceStep("break", tuple(parts[2].split("+")), None, (0, 0, 0),
                                          int(parts[3]), formula))
        else:
            raise GadgetLoadError(f"trace {name}: malformed step at line {lineno}")
    return script


def load_gadgets(path: Optional[str | Path] = None, check_stability: bool = True,
                 required: Iterable[str] = REQUIRED_CATEGORIES) -> GadgetLibrary:
    if path is None:
        text = resources.files("negglue").joinpath("data/gadgets.txt").read_text()
    else:
        text = Path(path).read_text()
    lib = parse_gadgets(text, check_stability)
    present = {g.category for g in lib.gadgets.values()}
    missing = [c for c in required if c not in present]
    if missing:
        raise GadgetLoadError(f"library lacks required categories: {', '.join(missing)}")
    return lib


_DEFAULT: Optional[GadgetLibrary] = None


def default_library() -> GadgetLibrary:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_gadgets()
    return _DEFAULT


def trace_catalog(lib: Optional[GadgetLibrary] = None) -> dict[str, TraceScript]:
    return (lib or default_library()).traces


def trace_config(lib: Optional[GadgetLibrary] = None, temperature: int = TAU) -> SystemConfig:
    lib = lib or default_library()
    return SystemConfig(temperature, lib.strengths)
