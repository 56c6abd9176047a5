import xml.etree.ElementTree as ET

import pytest

from negglue.core import Tile
from negglue.render import RenderOptions, render, render_ascii, render_svg


def test_single_tile_ascii():
    assert render_ascii({(0, 0): Tile.of(kind="walker")}) == "w"
    assert render_ascii({}) == ""


def test_ascii_layout_and_unknown_kind():
    a = {(0, 0): Tile.of(kind="path_segment"), (1, 2): Tile.of(kind="mystery")}
    assert render_ascii(a) == "#\n  ?"


def test_svg_is_well_formed():
    a = {(0, 0): Tile.of(e="K<", kind="read"), (0, 1): Tile.of(w="K<", n="x!", kind="read")}
    root = ET.fromstring(render_svg(a, show_glues=True))
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f"{ns}rect")) == 2
    labels = [t.text for t in root.findall(f"{ns}text")]
    assert labels == ["K<", "K<"]
    plain = ET.fromstring(render_svg(a))
    assert plain.findall(f"{ns}text") == []
    assert plain.get("width") == "24"


def test_render_options():
    assert RenderOptions().suffix == ".txt"
    assert RenderOptions("svg").suffix == ".svg"
    assert render({(0, 0): Tile.of(kind="read")}, RenderOptions("svg")).startswith("<svg")
    with pytest.raises(ValueError):
        RenderOptions("png")
    with pytest.raises(ValueError):
        RenderOptions(frame_every=0)
