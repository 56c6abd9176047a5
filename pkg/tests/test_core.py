import pytest
from hypothesis import given, strategies as st

from negglue.core import (INFINITE_STRENGTH, Assembly, EmptyAssembly, GlueLabel, InvalidScale,
                          PositionedAssembly, Shape, StrengthTable, Tile, UnknownGlue, bond_graph,
                          bond_strength, boundary_strength, canonicalize, cut_strength,
                          positive_components, positively_connected, scale, shape_of)
from negglue.gadgets import default_strengths

from strategies import assemblies, polyomino_cells

S = default_strengths()


@pytest.mark.parametrize("name,value", [("K2", 9), ("e1", 3), ("A4f", 2), ("E2f", 5), ("Q1", -4),
                                        ("T2", 7), ("J2", 8), ("D", -7), ("f*", 3), ("h^", 2)])
def test_strength_resolves_by_alphabetic_prefix(name, value):
    assert S.strength(name) == value


def test_infinite_and_unknown_glues():
    assert S.strength("x!") == INFINITE_STRENGTH
    assert GlueLabel("t!").infinite and not GlueLabel("t").infinite
    assert GlueLabel("B50").base == "B"
    with pytest.raises(UnknownGlue):
        S.strength("§")
    with pytest.raises(ValueError):
        GlueLabel("")
    assert "K" in S and "§" not in S


def test_strength_table_replace_keeps_original():
    t = StrengthTable({"A": 1})
    u = t.replace(A=5, B=2)
    assert t["A"] == 1 and u["A"] == 5 and u["B"] == 2


def test_tile_rotation_moves_east_to_north():
    t = Tile.of("n", "e", "s", "w")
    assert t.rotated(1).glues == ("e", "s", "w", "n")
    assert t.rotated(4) == t
    with pytest.raises(ValueError):
        Tile(("a", "b"))


def test_bond_strength_needs_equal_glues():
    a = Tile.of(e="K")
    assert bond_strength(a, 1, Tile.of(w="K"), S) == 9
    assert bond_strength(a, 1, Tile.of(w="J"), S) == 0
    assert bond_strength(a, 1, Tile.of(), S) == 0


def test_canonical_assembly_has_origin_minimum():
    a = Assembly({(3, 4): Tile.of(e="K"), (3, 5): Tile.of(w="K")})
    assert min(a) == (0, 0) and len(a) == 2
    with pytest.raises(EmptyAssembly):
        canonicalize({})
    with pytest.raises(EmptyAssembly):
        PositionedAssembly().min_coord()


def test_positioned_union_rejects_overlap():
    a = PositionedAssembly({(0, 0): Tile.of()})
    with pytest.raises(ValueError):
        a.union({(0, 0): Tile.of()})
    assert len(a.union({(0, 1): Tile.of()})) == 2


def test_shape_text_roundtrip_and_errors():
    sh = Shape.from_text("#.\n##")
    assert sh.to_text() == "#.\n##"
    assert len(sh) == 3 and sh.is_connected()
    with pytest.raises(ValueError):
        Shape.from_text("#x")


def test_scale_rejects_non_positive():
    with pytest.raises(InvalidScale):
        scale(Shape([(0, 0)]), 0)


def test_cut_and_boundary_strengths():
    a = {(0, 0): Tile.of(e="K", s="Q"), (0, 1): Tile.of(w="K"), (1, 0): Tile.of(n="Q", e="A"),
         (1, 1): Tile.of(w="A")}
    assert cut_strength(a, {(0, 0), (0, 1)}, S) == -4 + 0
    assert boundary_strength({(0, 0): a[(0, 0)]}, {(0, 1): a[(0, 1)]}, S) == 9
    assert positively_connected(a, {(0, 0), (0, 1)}, S)
    assert not positively_connected(a, a.keys(), S)
    assert sorted(map(len, positive_components(a, S))) == [2, 2]


@given(assemblies(), st.integers(-20, 20), st.integers(-20, 20))
def test_canonicalize_is_translation_invariant(a, dr, dc):
    moved = {(r + dr, c + dc): t for (r, c), t in a.items()}
    assert canonicalize(moved) == a
    assert hash(canonicalize(moved)) == hash(a)


@given(polyomino_cells(8), st.integers(1, 4), st.integers(1, 4))
def test_scale_composes_multiplicatively(cells, a, b):
    sh = Shape(cells)
    assert scale(scale(sh, a), b) == scale(sh, a * b)
    assert len(scale(sh, a)) == a * a * len(sh)


@given(polyomino_cells(8))
def test_shape_of_scaled_assembly(cells):
    sh = Shape(cells)
    big = scale(sh, 3)
    assert shape_of({p: Tile.of() for p in big.cells}) == big


@given(assemblies())
def test_bond_graph_is_symmetric(a):
    g = bond_graph(a, S)
    for (p, q), w in g.edges.items():
        assert g.weight(q, p) == w
        side = 1 if q[0] == p[0] else 2
        assert bond_strength(a[p], side, a[q], S) == w
        assert bond_strength(a[q], (side + 2) % 4, a[p], S) == w
    assert g.is_positively_connected() == positively_connected(a, a.keys(), S)
