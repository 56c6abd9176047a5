import pytest

from negglue.construction import all_piece_types
from negglue.core import StrengthTable
from negglue.engine import SystemConfig, TraceDivergence, replay, stability_verdict
from negglue.gadgets import (CATEGORIES, REQUIRED_CATEGORIES, TAU, GadgetLoadError, default_library,
                             default_strengths, inequality_rows, load_gadgets, parse_gadgets,
                             trace_catalog, trace_config, verify_inequalities)

EXPECTED_TRACES = {"overlay", "read", "walk-forward", "extend-forward", "extend-left", "extend-right",
                   "reduce", "walk-left", "walk-right", "fill-lines", "fill-left", "fill-right"}


def test_table_values_below_temperature():
    s = default_strengths()
    assert all(v < TAU for v in s.finite_values())
    assert min(s.finite_values()) == -7


def test_inequality_report_passes():
    report = verify_inequalities(default_strengths())
    assert report.passed
    assert len(report.lines()) == len(inequality_rows())
    assert all(line.startswith("PASS") for line in report.lines())


def test_inequality_report_detects_weakened_glue():
    report = verify_inequalities(default_strengths().replace(J=7))
    assert not report.passed
    assert any("J+A" in line and line.startswith("FAIL") for line in report.lines())


def test_inequality_report_flags_strong_single_glue():
    report = verify_inequalities(default_strengths().replace(K=10))
    assert report.single_glue_failures == ["K"]


def test_library_covers_categories():
    lib = default_library()
    present = {g.category for g in lib.gadgets.values()}
    assert set(REQUIRED_CATEGORIES) <= present
    assert present <= set(CATEGORIES)
    assert lib.by_category("read")


def test_every_gadget_body_is_stable():
    lib = default_library()
    cfg = trace_config(lib)
    for g in lib.gadgets.values():
        assert stability_verdict(g.body, cfg).stable, g.name


def test_construction_pieces_are_stable():
    cfg = SystemConfig(TAU, default_strengths())
    pieces = all_piece_types()
    assert pieces
    for name, pt in pieces.items():
        body = {(-y, x): t for (x, y), t in pt.body.items()}
        assert stability_verdict(body, cfg).stable, name


def test_traces_replay_exactly():
    lib = default_library()
    cfg = trace_config(lib)
    catalog = trace_catalog(lib)
    assert EXPECTED_TRACES <= set(catalog)
    for name, script in catalog.items():
        log = replay(script, cfg)
        assert [e.strength for e in log] == [s.expected for s in script.steps], name


def test_trace_replay_fails_under_other_strengths():
    lib = default_library()
    cfg = SystemConfig(TAU, lib.strengths.replace(T=6))
    with pytest.raises(TraceDivergence):
        replay(trace_catalog(lib)["read"], cfg)


def test_gadget_placement_rotates_about_origin():
    lib = default_library()
    g = next(iter(lib.gadgets.values()))
    assert len(g.placed(0, 0, 1)) == len(g.body)
    assert g.assembly() == g.assembly()
    four = g.placed(3, -2, 4)
    assert four == g.placed(3, -2, 0)


GOOD = """
[strengths]
K 9
[gadget a read F]
0 0 - x! - -
1 0 - - - x!
"""


def test_parse_minimal_library():
    lib = parse_gadgets(GOOD)
    assert lib.strengths == StrengthTable({"K": 9})
    body = lib["a"].body
    assert len(body) == 2
    # infinite glues are private to their gadget
    assert body[(0, 0)].glues[1] == "x.a!"


@pytest.mark.parametrize("text,message", [
    ("[bogus]\n", "unknown section"),
    ("K 9\n", "outside a section"),
    ("[strengths]\nK nine\n", "malformed strength"),
    ("[strengths]\nK 9\n[gadget a read F]\n0 0 - Z - -\n", "unknown glue"),
    ("[strengths]\nK 9\n[gadget a read F]\n0 0 - x! - -\n", "dangling infinite"),
    ("[strengths]\nK 9\n[gadget a nothing F]\n0 0 - - - -\n", "unknown category"),
    ("[strengths]\nK 9\n[gadget a read Q]\n0 0 - - - -\n", "unknown variant"),
    ("[strengths]\nK 9\n[gadget a read F]\n", "empty body"),
    ("[strengths]\nK 9\n[gadget a read F]\n0 0 - -\n", "malformed record"),
    ("[strengths]\nK 9\n[gadget a read F]\n0 0 - - - -\n0 0 - - - -\n", "duplicate cell"),
    ("[strengths]\nK 9\n[gadget a read F]\n0 0 - K - -\n1 0 - - - K\n", "not stable"),
    ("[strengths]\nK 9\n[gadget a read F]\n0 0 - - - -\n[trace t]\ncombine S b@0,0 9\n", "unknown gadget"),
])
def test_parse_errors(text, message):
    with pytest.raises(GadgetLoadError, match=message):
        parse_gadgets(text)


def test_load_requires_categories(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text(GOOD)
    with pytest.raises(GadgetLoadError, match="lacks required categories"):
        load_gadgets(f)
    assert load_gadgets(f, required=("read",))["a"].category == "read"
