"""End-to-end verification: scripted audit of a compiled system, the
two-handed example demo and a bounded adversarial probe."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from .core import SIDES, Assembly, Coord, Shape, StrengthTable, Tile, bond_strength, canonicalize, neighbor, shape_of
from .cuts import expand, min_cut_nonnegative, reduce_graph, reduced_partitions
from .engine import (
    InconclusiveVerdict,
    ReactionEvent,
    Scene,
    SystemConfig,
    scripted_break,
    scripted_combine,
)
from .gadgets import TAU, default_strengths, verify_inequalities

WINDOW_RADIUS = 9
# reduced window graphs above this many super-nodes are not enumerated
WINDOW_GROUP_LIMIT = 26
_OUT = ("outside",)


@dataclass
class AuditReport:
    max_detached_piece: int = 0
    break_count: int = 0
    terminal_shape_match: bool = False
    inequality_pass: bool = False
    trace_divergences: list[str] = field(default_factory=list)
    garbage_bound: int = 0
    steps_run: int = 0
    terminal_tiles: int = 0
    events: list[ReactionEvent] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return (not self.trace_divergences and self.terminal_shape_match and self.inequality_pass
                and self.max_detached_piece <= self.garbage_bound)

    def to_text(self) -> str:
        lines = [
            f"passed {str(self.passed).lower()}",
            f"max_detached_piece {self.max_detached_piece}",
            f"garbage_bound {self.garbage_bound}",
            f"break_count {self.break_count}",
            f"steps_run {self.steps_run}",
            f"terminal_tiles {self.terminal_tiles}",
            f"terminal_shape_match {str(self.terminal_shape_match).lower()}",
            f"inequality_pass {str(self.inequality_pass).lower()}",
            f"trace_divergences {len(self.trace_divergences)}",
        ]
        lines += [f"divergence {d}" for d in self.trace_divergences]
        return "\n".join(lines) + "\n"


def local_breaking_cuts(tiles: Mapping[Coord, Tile], owner: Mapping[Coord, str], around: Iterable[Coord],
                        strengths: StrengthTable, tau: int, radius: int = WINDOW_RADIUS):
    """Breaking cuts of ``tiles`` restricted to a window around ``around``.

    Tiles outside the window collapse into one node, so any cut found
    here is a real cut of the whole assembly.  Returns ``(strength,
    owners)`` pairs, where ``owners`` names the instances on the side
    that would detach (the side away from the outside node, or the
    smaller side).
    """
    around = list(around)
    rows = [p[0] for p in around]
    cols = [p[1] for p in around]
    r0, r1 = min(rows) - radius, max(rows) + radius
    c0, c1 = min(cols) - radius, max(cols) + radius
    inside = [p for p in tiles if r0 <= p[0] <= r1 and c0 <= p[1] <= c1]
    ins = set(inside)
    edges = []
    touches_out = False
    for p in inside:
        t = tiles[p]
        for side in SIDES:
            q = neighbor(p, side)
            u = tiles.get(q)
            if u is None:
                continue
            w = bond_strength(t, side, u, strengths)
            if q in ins:
                if p < q:
                    edges.append((p, q, w))
            else:
                edges.append((p, _OUT, w))
                touches_out = True
    verts = inside + [_OUT] if touches_out else inside
    red = reduce_graph(verts, edges, tau)
    if len(red.groups) < 2:
        return []
    if not any(w < 0 for _, _, w in red.edges):
        value = min_cut_nonnegative(list(range(len(red.groups))), red.edges)
        if value is not None and value >= tau:
            return []
    if len(red.groups) > WINDOW_GROUP_LIMIT:
        raise InconclusiveVerdict(f"window has {len(red.groups)} super-nodes")
    out = []
    for a, b, s in reduced_partitions(red):
        if s < tau:
            side_a, side_b = expand(red, a), expand(red, b)
            small = side_a if (_OUT in side_b or (_OUT not in side_a and len(side_a) <= len(side_b))) else side_b
            out.append((s, frozenset(owner[p] for p in small if p != _OUT)))
    return out


StepHook = Callable[[int, object, Scene], None]


def run_script(script, cfg: SystemConfig, check_local: bool = True, on_step: Optional[StepHook] = None,
               report: Optional[AuditReport] = None):
    """Execute a construction script; returns the final scene, event log and report.

    Each combine and break must reproduce its expected strength; after each
    step the neighbourhood of the change must have no breakable cut other
    than the ones the step declares.  The first failure is recorded as a
    divergence and halts the run.
    """
    report = report or AuditReport()
    scene = Scene()
    for name, piece in script.start:
        scene.place(name, piece)
    log: list[ReactionEvent] = []
    for i, step in enumerate(script.steps, start=1):
        try:
            if step.kind == "combine":
                strength = scripted_combine(scene, step.names[0], step.piece, cfg)
                around = list(step.piece)
                log.append(ReactionEvent("combine", (f"S{i - 1}", step.names[0]), (f"S{i}",), strength))
            else:
                cells = scene.instance_cells(step.names)
                if not cells:
                    raise ValueError(f"no placed pieces named {'+'.join(step.names)}")
                strength = scripted_break(scene, cells, cfg)
                around = list(cells)
                report.break_count += 1
                report.max_detached_piece = max(report.max_detached_piece, len(cells))
                log.append(ReactionEvent("break", (f"S{i - 1}",), (f"S{i}", "+".join(step.names)), strength))
            if step.expected is not None and strength != step.expected:
                raise ValueError(f"strength {strength} != expected {step.expected}")
            if check_local:
                bad = [(s, sorted(o)) for s, o in local_breaking_cuts(scene.tiles, scene.owner, around,
                                                                     cfg.strengths, cfg.temperature)
                       if o not in step.allowed]
                if bad:
                    raise ValueError(f"unintended breakable cuts {bad}")
        except (ValueError, InconclusiveVerdict) as exc:
            report.trace_divergences.append(f"step {i} {step.kind} {'+'.join(step.names)} ({step.phase}): {exc}")
            break
        report.steps_run = i
        if on_step is not None:
            on_step(i, step, scene)
    return scene, log, report


def audit_run(system, target: Optional[Shape] = None, policy=None, check_local: bool = True,
              on_step: Optional[StepHook] = None) -> AuditReport:
    """Scripted end-to-end run of a compiled system.

    Checks every scripted strength, local stability after each step, the
    size of every detached piece against the garbage bound and the
    terminal shape against ``target`` (default: the compiled target).
    """
    cfg = system.config
    policy = policy or system.policy
    target = target if target is not None else system.target
    report = AuditReport(garbage_bound=policy.c_garbage)
    report.inequality_pass = verify_inequalities(cfg.strengths, cfg.temperature).passed
    scene, report.events, report = run_script(system.script, cfg, check_local, on_step, report)
    report.terminal_tiles = len(scene.tiles)
    if not report.trace_divergences and scene.tiles:
        report.terminal_shape_match = shape_of(scene.tiles) == target
    return report


# --- two-handed example ---------------------------------------------------------------

EXAMPLE_TAU = 1
EXAMPLE_STRENGTHS = {"X": 2, "Y": 1, "Z": 2, "N": -1}


def example_tiles() -> dict[str, Tile]:
    """The four tiles of the example: an L of three tiles plus a corner tile
    whose north glue repels the tile above it."""
    return {
        "nw": Tile.of(e="X", s="Y", kind="example"),
        "ne": Tile.of(w="X", s="N", kind="example"),
        "sw": Tile.of(n="Y", e="Z", kind="example"),
        "se": Tile.of(n="N", w="Z", kind="example"),
    }


def example_assemblies() -> dict[str, Assembly]:
    """The L, the single tile, the 2x2 square and the two dominoes it breaks into."""
    t = example_tiles()
    return {
        "L": canonicalize({(0, 0): t["nw"], (0, 1): t["ne"], (1, 0): t["sw"]}),
        "tile": canonicalize({(0, 0): t["se"]}),
        "square": canonicalize({(0, 0): t["nw"], (0, 1): t["ne"], (1, 0): t["sw"], (1, 1): t["se"]}),
        "top": canonicalize({(0, 0): t["nw"], (0, 1): t["ne"]}),
        "bottom": canonicalize({(0, 0): t["sw"], (0, 1): t["se"]}),
    }


def example_config() -> SystemConfig:
    a = example_assemblies()
    return SystemConfig(EXAMPLE_TAU, StrengthTable(EXAMPLE_STRENGTHS), tiles=[a["tile"][(0, 0)]],
                        gadget_supply=[a["L"]])


def two_handed_demo() -> list[ReactionEvent]:
    """Attach the corner tile to the L, then break the square into two dominoes."""
    cfg = example_config()
    a = example_assemblies()
    scene = Scene()
    scene.place("L", a["L"])
    log = [ReactionEvent("combine", ("L", "tile"), ("square",),
                         scripted_combine(scene, "tile", {(1, 1): a["tile"][(0, 0)]}, cfg))]
    top = {(0, 0), (0, 1)}
    log.append(ReactionEvent("break", ("square",), ("top", "bottom"), scripted_break(scene, top, cfg)))
    return log


# --- adversarial probe ------------------------------------------------------------

@dataclass
class ProbeReport:
    horizon: int
    c_garbage: int
    states_checked: int = 0
    main_pairs_checked: int = 0
    garbage_assemblies: int = 0
    largest_garbage: int = 0
    depth_reached: int = 0
    side_breaks: int = 0
    scripted_reattachments: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_text(self) -> str:
        lines = [
            f"passed {str(self.passed).lower()}",
            f"horizon {self.horizon}",
            f"depth_reached {self.depth_reached}",
            f"c_garbage {self.c_garbage}",
            f"states_checked {self.states_checked}",
            f"main_pairs_checked {self.main_pairs_checked}",
            f"garbage_assemblies {self.garbage_assemblies}",
            f"largest_garbage {self.largest_garbage}",
            f"side_breaks {self.side_breaks}",
            f"scripted_reattachments {self.scripted_reattachments}",
            f"violations {len(self.violations)}",
        ]
        lines += [f"violation {v}" for v in self.violations]
        return "\n".join(lines) + "\n"


def describe_piece(tiles: Mapping[Coord, Tile]) -> str:
    """Gadget makeup of an assembly, read from the internal bond names."""
    from collections import Counter

    names: Counter = Counter()
    for t in tiles.values():
        tags = {g[:-1] for g in t.glues if g and g.endswith("!")}
        names[next(iter(sorted(tags))) if tags else "tile"] += 1
    return "+".join(f"{n}" for n in sorted(names))


def _positioned(tiles: Mapping[Coord, Tile]) -> frozenset:
    return frozenset(tiles.items())


def _breaks_down_to(whole: Mapping[Coord, Tile], goal: frozenset, strengths: StrengthTable, tau: int) -> bool:
    """Whether ``whole`` reaches the positioned state ``goal`` by breaking off
    the extra tiles, one connected group at a time."""
    from .core import boundary_strength

    rest = {p: t for p, t in whole.items()}
    goal_cells = {p for p, _ in goal}
    extra = set(rest) - goal_cells
    while extra:
        seen: set[Coord] = set()
        progressed = False
        for p in sorted(extra):
            if p in seen:
                continue
            comp = {p}
            stack = [p]
            while stack:
                c = stack.pop()
                for side in SIDES:
                    q = neighbor(c, side)
                    if q in extra and q not in comp:
                        comp.add(q)
                        stack.append(q)
            seen |= comp
            piece = {c: rest[c] for c in comp}
            others = {c: t for c, t in rest.items() if c not in comp}
            if boundary_strength(others, piece, strengths) < tau:
                for c in comp:
                    del rest[c]
                extra -= comp
                progressed = True
        if not progressed:
            return False
    return _positioned(rest) == goal


def adversarial_probe(system, horizon: int = 1000, max_assemblies: int = 20000) -> ProbeReport:
    """Bounded search for producible assemblies that leave the scripted path.

    Starting from every scripted state it looks for (1) attachments of any
    free piece (supply gadget or garbage) other than the scripted ones,
    (2) breakable cuts taken off-script, checking that the remainder can
    still break down onto the next scripted state, (3) the closure of free
    pieces under combination and breaking, layer by layer up to
    ``horizon`` reactions deep, and (4) combinations between two scripted
    states (copies of the start assembly run in parallel).  Anything larger
    than the garbage bound without such a forward path is a violation.
    Raises ``InconclusiveVerdict`` if the closure has not saturated when the
    horizon or ``max_assemblies`` is reached.
    """
    from .core import canonicalize
    from .engine import combination_offsets, combinations, find_breaks

    if horizon < 1:
        raise ValueError("horizon must be positive")
    cfg = system.config
    script = system.script
    tau = cfg.temperature
    bound = system.policy.c_garbage
    rep = ProbeReport(horizon, bound)

    states: list[dict[Coord, Tile]] = []
    garbage: set = set()
    side: list[tuple[int, dict[Coord, Tile]]] = []

    def record(i, step, scene):
        states.append(dict(scene.tiles))

    scene0 = Scene()
    for name, piece in script.start:
        scene0.place(name, piece)
    states.append(dict(scene0.tiles))
    before: dict[Coord, Tile] = dict(scene0.tiles)
    scene, _, report = run_script(script, cfg, check_local=False, on_step=record)
    if report.trace_divergences:
        rep.violations.append(f"scripted run diverges: {report.trace_divergences[0]}")
        return rep
    scripted_tiles: dict[Coord, set] = {}
    for step in script.steps:
        if step.kind == "combine":
            for p, t in step.piece.items():
                scripted_tiles.setdefault(p, set()).add(t)
    for i, step in enumerate(script.steps, start=1):
        prev, cur = states[i - 1], states[i]
        if step.kind == "break":
            gone = {p: t for p, t in prev.items() if p not in cur}
            garbage.add(canonicalize(gone))
        if step.allowed:
            owner = _owners_at(script, i)
            around = list(step.piece) if step.kind == "combine" else [p for p in prev if p not in cur]
            for s, owners in local_breaking_cuts(cur, owner, around, cfg.strengths, tau):
                cells = {p for p, o in owner.items() if o in owners}
                piece = {p: cur[p] for p in cells}
                rest = {p: t for p, t in cur.items() if p not in cells}
                garbage.add(canonicalize(piece))
                rep.side_breaks += 1
                side.append((i, rest))

    index = {_positioned(s): k for k, s in enumerate(states)}
    for i, rest in side:
        if _positioned(rest) in index:
            continue
        if not any(_breaks_down_to(rest, _positioned(states[j]), cfg.strengths, tau)
                   for j in range(i + 1, min(i + 4, len(states)))):
            rep.violations.append(f"state {i}: off-script break leaves {len(rest)} tiles with no way back")

    # closure of free pieces
    seed = canonicalize(states[0])
    supply = [a for a in cfg.gadget_supply if canonicalize(a) != seed]
    pool: list = []
    known: set = set()
    layer: list = []
    for a in supply + sorted(garbage, key=len):
        if a not in known:
            known.add(a)
            pool.append(a)
            layer.append(a)
    depth = 0
    while layer:
        if depth >= horizon or len(known) > max_assemblies:
            rep.depth_reached = depth
            rep.garbage_assemblies = len(known)
            raise InconclusiveVerdict(f"free-piece closure not saturated after {depth} reactions "
                                      f"({len(known)} assemblies)")
        depth += 1
        nxt = []
        for x in layer:
            products = []
            if len(x) > 1:
                for pa, pb in find_breaks(x, cfg):
                    products += [pa, pb]
            for y in list(pool):
                products += [c for c, _ in combinations(x, y, cfg)]
            for c in products:
                if c in known:
                    continue
                known.add(c)
                if len(c) > bound:
                    rep.violations.append(f"free assembly of {len(c)} tiles exceeds the garbage bound "
                                          f"({describe_piece(c)})")
                    continue
                pool.append(c)
                nxt.append(c)
        layer = nxt
    rep.depth_reached = depth
    rep.garbage_assemblies = len(pool)
    rep.largest_garbage = max(len(a) for a in pool)

    # free pieces and parallel copies against every scripted state
    for k, st in enumerate(states):
        rep.states_checked += 1
        for a in pool:
            for v, _ in combination_offsets(st, a, cfg):
                moved = {(r + v[0], c + v[1]): t for (r, c), t in a.items()}
                if all(t in scripted_tiles.get(p, ()) for p, t in moved.items()):
                    rep.scripted_reattachments += 1
                    continue
                rep.violations.append(f"state {k}: free piece of {len(a)} tiles attaches off-script "
                                      f"({describe_piece(a)})")
    for k, st in enumerate(states):
        for other in states[k:]:
            rep.main_pairs_checked += 1
            if combination_offsets(st, other, cfg):
                rep.violations.append(f"state {k}: two copies of the scripted assembly combine")
    return rep


def _owners_at(script, i: int) -> dict[Coord, str]:
    owner: dict[Coord, str] = {}
    for name, piece in script.start:
        for p in piece:
            owner[p] = name
    for step in script.steps[:i]:
        if step.kind == "combine":
            for p in step.piece:
                owner[p] = step.names[0]
        else:
            names = set(step.names)
            for p in [p for p, o in owner.items() if o in names]:
                del owner[p]
    return owner
