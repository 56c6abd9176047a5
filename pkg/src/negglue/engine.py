"""Two-handed assembly with negative glues: stability, breaks, combinations,
producibility, terminality and scripted replay."""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .core import (
    SIDES,
    Assembly,
    Coord,
    PositionedAssembly,
    Shape,
    StrengthTable,
    Tile,
    bond_strength,
    boundary_strength,
    canonicalize,
    cut_strength,
    neighbor,
    opposite,
    positively_connected,
    shape_of,
)
from .cuts import (
    Cut,
    TooLargeForExact,
    bond_sides,
    bounded_bonds,
    exact_partitions,
    expand,
    grid_edges,
    min_cut_nonnegative,
    reduce_graph,
    reduced_partitions,
)

DEFAULT_EXACT_LIMIT = 14
DEFAULT_MAX_CUT_EDGES = 10
# reduced (super-node) graphs up to this size are enumerated exactly
REDUCED_EXACT_LIMIT = 22


class InconclusiveVerdict(RuntimeError):
    pass


class TraceDivergence(RuntimeError):
    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


def exact_limit_from_env(default: int = DEFAULT_EXACT_LIMIT) -> int:
    raw = os.environ.get("NEGGLUE_EXACT_LIMIT")
    return int(raw) if raw else default


@dataclass
class SystemConfig:
    temperature: int
    strengths: StrengthTable
    tiles: list[Tile] = field(default_factory=list)
    gadget_supply: list[Assembly] = field(default_factory=list)
    exact_limit: int = field(default_factory=exact_limit_from_env)
    max_cut_edges: int = DEFAULT_MAX_CUT_EDGES

    def __post_init__(self):
        if self.temperature < 1:
            raise ValueError("temperature must be at least 1")
        for t in self.tiles:
            self._check_glues(t)
        for a in self.gadget_supply:
            for t in a.values():
                self._check_glues(t)

    def _check_glues(self, t: Tile):
        for g in t.glues:
            if g is not None:
                self.strengths.strength(g)

    @property
    def tau(self) -> int:
        return self.temperature

    def seeds(self) -> list[Assembly]:
        out = [canonicalize({(0, 0): t}) for t in self.tiles]
        out.extend(self.gadget_supply)
        return out


@dataclass(frozen=True)
class ReactionEvent:
    kind: str               # "combine" or "break"
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    strength: int

    def to_line(self) -> str:
        return f"{self.kind} in={','.join(self.inputs)} out={','.join(self.outputs)} strength={self.strength}"


# --- cuts -----------------------------------------------------------------

def enumerate_cuts(a: Mapping[Coord, Tile], cfg: SystemConfig, max_cut_edges: Optional[int] = None,
                   exact: bool = False) -> list[Cut]:
    """All cuts of ``a`` whose sides are both positively connected.

    Exact mode enumerates every partition (only up to ``cfg.exact_limit``
    tiles); bounded mode returns the cuts crossing at most ``max_cut_edges``
    adjacency edges.
    """
    cells = sorted(a)
    edges = grid_edges(a, cfg.strengths)
    out: list[Cut] = []
    if len(cells) < 2:
        return out
    if exact:
        if len(cells) > cfg.exact_limit:
            raise TooLargeForExact(f"{len(cells)} tiles exceeds exact limit {cfg.exact_limit}")
        index = {p: i for i, p in enumerate(cells)}
        iedges = [(index[p], index[q], w) for p, q, w in edges]
        for ma, mb, strength, crossing in exact_partitions(len(cells), iedges):
            sa = frozenset(cells[i] for i in range(len(cells)) if (ma >> i) & 1)
            out.append(Cut(sa, frozenset(cells) - sa, strength, crossing))
        return out
    k = cfg.max_cut_edges if max_cut_edges is None else max_cut_edges
    if k < 1:
        raise ValueError("max_cut_edges must be at least 1")
    for bond in bounded_bonds(cells, edges, k):
        sa, sb = bond_sides(cells, edges, bond)
        if not (positively_connected(a, sa, cfg.strengths) and positively_connected(a, sb, cfg.strengths)):
            continue
        if min(sa) > min(sb):
            sa, sb = sb, sa
        strength = sum(edges[i][2] for i in bond)
        out.append(Cut(sa, sb, strength, len(bond)))
    return out


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    mode: str                        # "exact", "bounded" or "trivial"
    witness: Optional[Cut] = None

    def __bool__(self):
        return self.stable


def _breaking_cuts(a: Mapping[Coord, Tile], cfg: SystemConfig, first_only: bool):
    """Cuts below tau with both sides positively connected, plus the verdict mode."""
    tau = cfg.temperature
    cells = sorted(a)
    if len(cells) < 2:
        return [], "trivial"
    edges = grid_edges(a, cfg.strengths)
    red = reduce_graph(cells, edges, tau)
    found: list[Cut] = []
    if len(red.groups) == 1:
        return found, "exact"
    if len(red.groups) <= max(REDUCED_EXACT_LIMIT, cfg.exact_limit):
        for ma, mb, strength in reduced_partitions(red):
            if strength < tau:
                sa, sb = expand(red, ma), expand(red, mb)
                crossing = sum(1 for p, q, _ in edges if (p in sa) != (q in sa))
                found.append(Cut(sa, sb, strength, crossing))
                if first_only:
                    break
        return found, "exact"
    if all(w >= 0 for _, _, w in edges):
        value = min_cut_nonnegative(cells, edges)
        if value is not None and value >= tau:
            return found, "exact"
    negabs = sum(-w for _, _, w in edges if w < 0)
    strong = [w >= tau + negabs for _, _, w in edges]
    for bond in bounded_bonds(cells, edges, cfg.max_cut_edges, skip_edge=lambda i: strong[i]):
        strength = sum(edges[i][2] for i in bond)
        if strength >= tau:
            continue
        sa, sb = bond_sides(cells, edges, bond)
        if positively_connected(a, sa, cfg.strengths) and positively_connected(a, sb, cfg.strengths):
            found.append(Cut(sa, sb, strength, len(bond)))
            if first_only:
                break
    return found, "bounded"


def stability_verdict(a: Mapping[Coord, Tile], cfg: SystemConfig) -> StabilityVerdict:
    cuts, mode = _breaking_cuts(a, cfg, first_only=True)
    if not positively_connected(a, a.keys(), cfg.strengths):
        return StabilityVerdict(False, "exact")
    return StabilityVerdict(not cuts, mode, cuts[0] if cuts else None)


def is_tau_stable(a: Mapping[Coord, Tile], cfg: SystemConfig) -> bool:
    # a single tile has no cut and is stable by convention
    return stability_verdict(a, cfg).stable


def find_breaks(a: Mapping[Coord, Tile], cfg: SystemConfig) -> list[tuple[Assembly, Assembly]]:
    cuts, _ = _breaking_cuts(a, cfg, first_only=False)
    out = []
    seen = set()
    for cut in cuts:
        pa = canonicalize({p: a[p] for p in cut.side_a})
        pb = canonicalize({p: a[p] for p in cut.side_b})
        pair = tuple(sorted((pa, pb), key=Assembly.sort_key))
        if pair not in seen:
            seen.add(pair)
            out.append(pair)
    return out


# --- combinations -----------------------------------------------------------

def _glue_index(a: Mapping[Coord, Tile]):
    idx: dict[tuple[int, str], list[Coord]] = {}
    for p, t in a.items():
        for side in SIDES:
            g = t.glues[side]
            if g is not None and neighbor(p, side) not in a:
                idx.setdefault((side, g), []).append(p)
    return idx


def combination_offsets(a: Mapping[Coord, Tile], b: Mapping[Coord, Tile], cfg: SystemConfig) -> list[tuple[Coord, int]]:
    """Translations ``v`` of ``b`` that abut ``a`` with boundary strength >= tau."""
    idx = _glue_index(a)
    candidates: set[Coord] = set()
    for pb, t in b.items():
        for side in SIDES:
            g = t.glues[side]
            if g is None or cfg.strengths.strength(g) <= 0:
                continue
            for pa in idx.get((opposite(side), g), ()):
                # b's tile must land next to pa on pa's opposite(side) face
                target = neighbor(pa, opposite(side))
                candidates.add((target[0] - pb[0], target[1] - pb[1]))
    out = []
    for v in sorted(candidates):
        moved = {(r + v[0], c + v[1]): t for (r, c), t in b.items()}
        if any(p in a for p in moved):
            continue
        strength = boundary_strength(a, moved, cfg.strengths)
        if strength >= cfg.temperature:
            out.append((v, strength))
    return out


def combinations(a: Mapping[Coord, Tile], b: Mapping[Coord, Tile], cfg: SystemConfig) -> list[tuple[Assembly, int]]:
    out = []
    seen = set()
    for v, strength in combination_offsets(a, b, cfg):
        moved = {(r + v[0], c + v[1]): t for (r, c), t in b.items()}
        merged = dict(a)
        merged.update(moved)
        c = canonicalize(merged)
        if c not in seen:
            seen.add(c)
            out.append((c, strength))
    return out


# --- producibility ------------------------------------------------------------

@dataclass
class ProducibleResult:
    assemblies: list[Assembly]
    saturated: bool
    events: list[ReactionEvent] = field(default_factory=list)

    def __contains__(self, a):
        return canonicalize(a) in set(self.assemblies)

    def __len__(self):
        return len(self.assemblies)


def producible_set(cfg: SystemConfig, max_assemblies: int = 500, max_size: int = 64,
                   record_events: bool = False) -> ProducibleResult:
    """Breadth-first closure of the seeds under combination and breaking.

    ``saturated`` is False when a bound cut the exploration short.
    """
    if max_assemblies < 1 or max_size < 1:
        raise ValueError("bounds must be positive")
    known: dict[Assembly, int] = {}
    order: list[Assembly] = []
    events: list[ReactionEvent] = []
    saturated = True
    queue: deque[Assembly] = deque()

    def ident(x: Assembly) -> str:
        return f"A{known[x]}"

    def add(x: Assembly) -> bool:
        nonlocal saturated
        if x in known:
            return False
        if len(x) > max_size or len(order) >= max_assemblies:
            saturated = False
            return False
        known[x] = len(order)
        order.append(x)
        queue.append(x)
        return True

    for s in sorted(set(cfg.seeds()), key=Assembly.sort_key):
        add(s)
    processed: list[Assembly] = []
    while queue:
        x = queue.popleft()
        for pa, pb in find_breaks(x, cfg):
            add(pa)
            add(pb)
            if record_events and pa in known and pb in known:
                events.append(ReactionEvent("break", (ident(x),), (ident(pa), ident(pb)),
                                            cut_of_pieces(x, pa, cfg)))
        processed.append(x)
        for y in list(processed):
            for c, strength in combinations(x, y, cfg):
                add(c)
                if record_events and c in known:
                    events.append(ReactionEvent("combine", (ident(x), ident(y)), (ident(c),), strength))
    return ProducibleResult(order, saturated and not queue, events)


def cut_of_pieces(whole: Assembly, piece: Assembly, cfg: SystemConfig) -> int:
    """Strength of the cut separating ``piece`` (some placement) from ``whole``."""
    best = None
    r0, c0 = min(piece)
    for anchor in whole:
        dr, dc = anchor[0] - r0, anchor[1] - c0
        placed = {(r + dr, c + dc) for (r, c) in piece}
        if all(p in whole and whole[p] == piece[(p[0] - dr, p[1] - dc)] for p in placed):
            rest = set(whole) - placed
            if rest and positively_connected(whole, rest, cfg.strengths):
                s = cut_strength(whole, placed, cfg.strengths)
                best = s if best is None else min(best, s)
    if best is None:
        raise ValueError("piece does not occur in assembly")
    return best


def is_terminal(a: Mapping[Coord, Tile], cfg: SystemConfig, witnesses: Iterable[Mapping[Coord, Tile]]) -> bool:
    if not is_tau_stable(a, cfg):
        return False
    for w in witnesses:
        if combination_offsets(a, w, cfg):
            return False
    return True


# --- unique shape check --------------------------------------------------------

@dataclass
class UniqueShapeReport:
    passed: bool
    saturated: bool
    terminal_shapes: list[Shape]
    violations: list[Assembly]

    def summary(self) -> str:
        return (f"passed={self.passed} saturated={self.saturated} "
                f"terminals={len(self.terminal_shapes)} violations={len(self.violations)}")


def reaction_graph(cfg: SystemConfig, prod: ProducibleResult) -> dict[Assembly, set[Assembly]]:
    """One-step successors within an explored producible set."""
    members = set(prod.assemblies)
    succ: dict[Assembly, set[Assembly]] = {x: set() for x in prod.assemblies}
    for x in prod.assemblies:
        for pa, pb in find_breaks(x, cfg):
            succ[x].update(p for p in (pa, pb) if p in members)
        for y in prod.assemblies:
            for c, _ in combinations(x, y, cfg):
                if c in members:
                    succ[x].add(c)
    return succ


def check_unique_shape(cfg: SystemConfig, target: Shape, c: int, max_assemblies: int = 500,
                       max_size: int = 64) -> UniqueShapeReport:
    """Every producible assembly of more than ``c`` tiles must reach a terminal
    assembly of shape ``target``.  Raises if the exploration did not saturate."""
    prod = producible_set(cfg, max_assemblies, max_size)
    if not prod.saturated:
        raise InconclusiveVerdict("producible set did not saturate within bounds")
    succ = reaction_graph(cfg, prod)
    terminals = [x for x in prod.assemblies if not find_breaks(x, cfg) and not any(
        combination_offsets(x, y, cfg) for y in prod.assemblies)]
    good = {x for x in terminals if shape_of(x) == target}
    # backward reachability to a good terminal
    pred: dict[Assembly, set[Assembly]] = {x: set() for x in prod.assemblies}
    for x, ys in succ.items():
        for y in ys:
            pred[y].add(x)
    reach = set(good)
    stack = list(good)
    while stack:
        y = stack.pop()
        for x in pred[y]:
            if x not in reach:
                reach.add(x)
                stack.append(x)
    violations = [x for x in prod.assemblies if len(x) > c and x not in reach]
    return UniqueShapeReport(not violations and bool(good), True,
                             sorted({shape_of(t) for t in terminals}, key=len), violations)


# --- scripted replay --------------------------------------------------------------

@dataclass
class Scene:
    """A positioned working assembly for scripted runs.

    Placed pieces keep their instance names so later break steps can name
    the detaching piece.
    """

    tiles: dict[Coord, Tile] = field(default_factory=dict)
    owner: dict[Coord, str] = field(default_factory=dict)

    def instance_cells(self, names: Iterable[str]) -> set[Coord]:
        names = set(names)
        return {p for p, o in self.owner.items() if o in names}

    def place(self, name: str, piece: Mapping[Coord, Tile]):
        for p in piece:
            if p in self.tiles:
                raise ValueError(f"{name} overlaps occupied cell {p}")
        for p, t in piece.items():
            self.tiles[p] = t
            self.owner[p] = name

    def remove(self, cells: Iterable[Coord]):
        for p in cells:
            del self.tiles[p]
            del self.owner[p]

    def snapshot(self) -> PositionedAssembly:
        return PositionedAssembly(self.tiles)


def scripted_combine(scene: Scene, name: str, piece: Mapping[Coord, Tile], cfg: SystemConfig) -> int:
    """Attach ``piece`` (already positioned) and return its boundary strength."""
    if any(p in scene.tiles for p in piece):
        raise ValueError(f"{name} overlaps the scene")
    strength = boundary_strength(scene.tiles, piece, cfg.strengths)
    if strength < cfg.temperature:
        raise ValueError(f"{name} attaches with {strength} < tau={cfg.temperature}")
    scene.place(name, piece)
    return strength


def scripted_break(scene: Scene, cells: set[Coord], cfg: SystemConfig, check_rest: bool = True) -> int:
    """Detach ``cells`` from the scene; returns the cut strength."""
    if not cells or not cells <= set(scene.tiles):
        raise ValueError("piece is not part of the scene")
    rest = set(scene.tiles) - cells
    if not rest:
        raise ValueError("piece is the whole scene")
    strength = cut_strength(scene.tiles, cells, cfg.strengths)
    if strength >= cfg.temperature:
        raise ValueError(f"cut strength {strength} >= tau={cfg.temperature}")
    if not positively_connected(scene.tiles, cells, cfg.strengths):
        raise ValueError("detaching piece is not connected")
    if check_rest and not positively_connected(scene.tiles, rest, cfg.strengths):
        raise ValueError("remaining assembly is not connected")
    scene.remove(cells)
    return strength


def replay(script, cfg: SystemConfig) -> list[ReactionEvent]:
    """Run a trace script step by step, checking every strength against the script.

    ``script`` provides ``start`` (named pieces placed before step 1) and
    ``steps``; see :mod:`negglue.gadgets` for the format.
    """
    scene = Scene()
    for name, piece in script.start:
        scene.place(name, piece)
    log: list[ReactionEvent] = []
    state = 0
    for i, step in enumerate(script.steps, start=1):
        try:
            if step.kind == "combine":
                piece = step.piece
                strength = scripted_combine(scene, step.names[0], piece, cfg)
                out = f"S{state + 1}"
                log.append(ReactionEvent("combine", (f"S{state}", step.names[0]), (out,), strength))
            elif step.kind == "break":
                cells = scene.instance_cells(step.names)
                if not cells:
                    raise ValueError(f"no placed pieces named {step.names}")
                strength = scripted_break(scene, cells, cfg)
                out = f"S{state + 1}"
                log.append(ReactionEvent("break", (f"S{state}",), (out, "+".join(step.names)), strength))
            else:
                raise ValueError(f"unknown step kind {step.kind!r}")
        except ValueError as exc:
            raise TraceDivergence(i, str(exc)) from None
        if strength != step.expected:
            raise TraceDivergence(i, f"{step.kind} {'+'.join(step.names)}: strength {strength} != expected {step.expected}")
        state += 1
    return log
