"""Command-line entry points: compile a shape, simulate a compiled system,
run the verification suites."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from .compiler import (
    SCALE,
    CorruptSystem,
    base_conversion_plan,
    compile_shape,
    load_system,
    parse_shape,
    system_bit_encoding_size,
)
from .engine import InconclusiveVerdict, TraceDivergence, replay, stability_verdict
from .gadgets import TAU, GadgetLoadError, load_gadgets, trace_catalog, trace_config, verify_inequalities
from .render import RenderOptions, render

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SYSTEM_FILE = "system.txt"


class InputError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"negglue: {msg}", file=sys.stderr)


# --- compile -------------------------------------------------------------------------

def description_bits(instructions: str) -> int:
    """Bit length of the shape description: two bits per path instruction."""
    return 2 * len(instructions)


def compile_metadata(system) -> str:
    seq = system.instructions.text()
    k = description_bits(seq)
    plan = base_conversion_plan(k)
    types = system.script.types
    used = sorted(system.script.gadget_names())
    tile_types = {t for name in used for t in types[name].body.values()}
    tape_types = set(system.tape.assembly.values())
    lines = [
        f"instructions {seq}",
        f"instruction_count {len(seq)}",
        f"tape_sections {system.tape.sections + 1}",
        f"tape_tiles {system.tape.tile_count()}",
        f"gadget_types {len(used)}",
        f"gadget_tile_types {len(tile_types)}",
        f"tape_tile_types {len(tape_types)}",
        f"tile_types {len(tile_types | tape_types)}",
        f"system_bits {system_bit_encoding_size(len(tile_types | tape_types), system.config.temperature)}",
        f"temperature {system.config.temperature}",
        f"scale {SCALE}",
        f"target_cells {len(system.target.cells)}",
        f"c_garbage {system.policy.c_garbage}",
        f"description_bits {k}",
        f"base {plan.b}",
        f"digits {plan.d}",
        f"base_tape_tiles {plan.tape_tiles}",
        f"base_tm_tiles {plan.tm_tiles}",
    ]
    return "\n".join(lines) + "\n"


def cmd_compile(shape_file: Optional[str], out_dir: Optional[str]) -> int:
    if not shape_file:
        raise InputError("--shape is required")
    path = Path(shape_file)
    if not path.is_file():
        raise InputError(f"shape file not found: {shape_file}")
    try:
        shape = parse_shape(path.read_text())
        system = compile_shape(shape)
    except ValueError as exc:
        raise InputError(f"cannot compile {shape_file}: {exc}") from None
    out = Path(out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    (out / SYSTEM_FILE).write_text(system.to_text())
    (out / "tape.txt").write_text(render(system.tape.assembly) + "\n")
    (out / "metadata.txt").write_text(compile_metadata(system))
    print(f"compiled {len(system.instructions.text())} instructions into {out / SYSTEM_FILE}")
    return EXIT_OK


# --- simulate ------------------------------------------------------------------------

def _load(system_dir: str, tau: Optional[int]):
    path = Path(system_dir)
    f = path / SYSTEM_FILE if path.is_dir() else path
    if not f.is_file():
        raise InputError(f"no compiled system at {system_dir}")
    try:
        system = load_system(f.read_text())
    except (CorruptSystem, ValueError) as exc:
        raise InputError(f"corrupted system file {f}: {exc}") from None
    if tau is not None:
        if tau < 1:
            raise InputError("--tau must be positive")
        system.config.temperature = tau
    return system


def cmd_simulate(system_dir: str, mode: str, opts: RenderOptions, out_dir: Optional[str] = None,
                 horizon: int = 1000, tau: Optional[int] = None) -> int:
    from .verifier import adversarial_probe, audit_run

    system = _load(system_dir, tau)
    src = Path(system_dir)
    out = Path(out_dir) if out_dir else (src if src.is_dir() else src.parent)
    out.mkdir(parents=True, exist_ok=True)
    if mode == "explore":
        try:
            report = adversarial_probe(system, horizon)
        except InconclusiveVerdict as exc:
            (out / "probe.txt").write_text(f"passed false\ninconclusive {exc}\n")
            print(f"inconclusive: {exc}")
            return EXIT_FAIL
        (out / "probe.txt").write_text(report.to_text())
        print(report.to_text(), end="")
        return EXIT_OK if report.passed else EXIT_FAIL

    frames = out / "frames"
    frames.mkdir(exist_ok=True)

    def snapshot(i, step, scene):
        if i % opts.frame_every == 0:
            (frames / f"frame_{i:06d}{opts.suffix}").write_text(render(scene.tiles, opts))

    start = {}
    for _, piece in system.script.start:
        start.update(piece)
    (frames / f"frame_{0:06d}{opts.suffix}").write_text(render(start, opts))
    final: dict = {}

    def hook(i, step, scene):
        snapshot(i, step, scene)
        final["tiles"] = scene.tiles

    report = audit_run(system, on_step=hook)
    (out / "log.txt").write_text("".join(e.to_line() + "\n" for e in report.events))
    (out / "report.txt").write_text(report.to_text())
    if "tiles" in final:
        (out / f"final{opts.suffix}").write_text(render(final["tiles"], opts))
    print(report.to_text(), end="")
    return EXIT_OK if report.passed else EXIT_FAIL


# --- verify --------------------------------------------------------------------------

def _library(gadgets: Optional[str]):
    if gadgets and not Path(gadgets).is_file():
        raise InputError(f"gadget file not found: {gadgets}")
    try:
        return load_gadgets(gadgets, check_stability=False)
    except (GadgetLoadError, ValueError) as exc:
        raise InputError(f"cannot load gadgets: {exc}") from None


def cmd_verify(kind: str, gadgets: Optional[str] = None, tau: int = TAU) -> int:
    ok = True
    if kind == "inequalities":
        lib = _library(gadgets) if gadgets else None
        strengths = lib.strengths if lib else None
        from .gadgets import default_strengths
        report = verify_inequalities(strengths or default_strengths(), tau)
        for line in report.lines(tau):
            print(line)
        ok = report.passed
    elif kind == "gadgets":
        lib = _library(gadgets)
        cfg = trace_config(lib, tau)
        for name in sorted(lib.gadgets):
            v = stability_verdict(lib.gadgets[name].body, cfg)
            ok &= v.stable
            print(f"{'PASS' if v.stable else 'FAIL'} gadget {name} tiles={len(lib.gadgets[name].body)}")
        from .construction import all_piece_types
        from .engine import SystemConfig
        from .gadgets import default_strengths
        ccfg = SystemConfig(tau, default_strengths())
        for name, pt in sorted(all_piece_types().items()):
            v = stability_verdict({(-y, x): t for (x, y), t in pt.body.items()}, ccfg)
            ok &= v.stable
            print(f"{'PASS' if v.stable else 'FAIL'} piece {name} tiles={len(pt.body)}")
    elif kind == "traces":
        lib = _library(gadgets)
        cfg = trace_config(lib, tau)
        for name, script in trace_catalog(lib).items():
            try:
                log = replay(script, cfg)
                print(f"PASS trace {name} events={len(log)}")
            except TraceDivergence as exc:
                ok = False
                print(f"FAIL trace {name}: {exc}")
    else:
        raise InputError(f"unknown verification kind {kind!r}")
    return EXIT_OK if ok else EXIT_FAIL


# --- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="negglue", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile a shape file into a tile system")
    c.add_argument("--shape", required=True, help="shape text file ('#' cells, '.' empty)")
    c.add_argument("--out", default=".", help="output directory")

    s = sub.add_parser("simulate", help="run a compiled system")
    s.add_argument("system", help="directory written by 'compile' (or its system file)")
    s.add_argument("--out", help="output directory (default: the system directory)")
    s.add_argument("--mode", choices=("scripted", "explore"), default="scripted")
    s.add_argument("--horizon", type=int, default=1000)
    s.add_argument("--render", choices=("ascii", "svg"), default="ascii")
    s.add_argument("--frame-every", type=int, default=100)
    s.add_argument("--show-glues", action="store_true")
    s.add_argument("--tau", type=int)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("kind", choices=("inequalities", "gadgets", "traces"))
    v.add_argument("--gadgets", help="gadget file overriding the shipped library")
    v.add_argument("--tau", type=int, default=TAU)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "compile":
            return cmd_compile(args.shape, args.out)
        if args.command == "simulate":
            try:
                opts = RenderOptions(args.render, args.show_glues, args.frame_every)
            except ValueError as exc:
                raise InputError(str(exc)) from None
            return cmd_simulate(args.system, args.mode, opts, args.out, args.horizon, args.tau)
        return cmd_verify(args.kind, args.gadgets, args.tau)
    except InputError as exc:
        _err(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
