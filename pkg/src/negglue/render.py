"""ASCII and SVG rendering of positioned assemblies."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping
from xml.sax.saxutils import escape

from .core import Coord, Tile

CATEGORY_CHARS = {
    "path_segment": "#",
    "fill_block": "+",
    "fill_initiator": "*",
    "tape_section": "t",
    "buffer": "b",
    "overlay_initiator": "O",
    "overlay_helper": "H",
    "read": "r",
    "read_helper": "h",
    "info_block": "i",
    "walker": "w",
    "walker_helper": "u",
    "extender": "e",
    "extender_helper": "x",
    "reducer": "d",
    "reducer_helper": "c",
    "example": "o",
}

CATEGORY_COLORS = {
    "path_segment": "#4a4a4a",
    "fill_block": "#9a9a9a",
    "fill_initiator": "#6f6f6f",
    "tape_section": "#2f5d8a",
    "buffer": "#8aa9c7",
    "overlay_initiator": "#7a3b8f",
    "overlay_helper": "#b48cc4",
    "read": "#c0392b",
    "read_helper": "#e6a19a",
    "info_block": "#e6b800",
    "walker": "#2e8b57",
    "walker_helper": "#8fd1a9",
    "extender": "#d35400",
    "extender_helper": "#f0b27a",
    "reducer": "#16a085",
    "reducer_helper": "#76d7c4",
    "example": "#5d6d7e",
}
UNKNOWN_CHAR = "?"
UNKNOWN_COLOR = "#cccccc"
CELL = 12


@dataclass(frozen=True)
class RenderOptions:
    format: str = "ascii"
    show_glues: bool = False
    frame_every: int = 1

    def __post_init__(self):
        if self.format not in ("ascii", "svg"):
            raise ValueError(f"unknown render format {self.format!r}")
        if self.frame_every < 1:
            raise ValueError("frame_every must be at least 1")

    @property
    def suffix(self) -> str:
        return ".txt" if self.format == "ascii" else ".svg"


def _bounds(a: Mapping[Coord, Tile]):
    rows = [r for r, _ in a]
    cols = [c for _, c in a]
    return min(rows), max(rows), min(cols), max(cols)


def render_ascii(a: Mapping[Coord, Tile]) -> str:
    """One character per tile chosen by tile category; blanks elsewhere."""
    if not a:
        return ""
    r0, r1, c0, c1 = _bounds(a)
    lines = []
    for r in range(r0, r1 + 1):
        row = "".join(CATEGORY_CHARS.get(a[(r, c)].kind, UNKNOWN_CHAR) if (r, c) in a else " "
                      for c in range(c0, c1 + 1))
        lines.append(row.rstrip())
    return "\n".join(lines)


def _label(g: str) -> str:
    return escape(g)


def render_svg(a: Mapping[Coord, Tile], show_glues: bool = False) -> str:
    """Unit squares coloured by category, optionally with glue names on their edges."""
    cell = CELL * 3 if show_glues else CELL
    if a:
        r0, r1, c0, c1 = _bounds(a)
    else:
        r0 = r1 = c0 = c1 = 0
    width = (c1 - c0 + 1) * cell
    height = (r1 - r0 + 1) * cell
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">']
    for (r, c) in sorted(a):
        t = a[(r, c)]
        x, y = (c - c0) * cell, (r - r0) * cell
        color = CATEGORY_COLORS.get(t.kind, UNKNOWN_COLOR)
        out.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{color}" '
                   f'stroke="#ffffff" stroke-width="0.5"/>')
        if not show_glues:
            continue
        half = cell / 2
        spots = ((x + half, y + 7), (x + cell - 2, y + half + 2), (x + half, y + cell - 2), (x + 2, y + half + 2))
        anchors = ("middle", "end", "middle", "start")
        for side, g in enumerate(t.glues):
            if g is None or g.endswith("!"):
                continue
            sx, sy = spots[side]
            out.append(f'<text x="{sx:g}" y="{sy:g}" font-size="6" font-family="monospace" '
                       f'text-anchor="{anchors[side]}" fill="#000000">{_label(g)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(a: Mapping[Coord, Tile], opts: RenderOptions = RenderOptions()) -> str:
    if opts.format == "ascii":
        return render_ascii(a)
    return render_svg(a, opts.show_glues)
