import math

import pytest
from hypothesis import given, settings

from negglue.compiler import (SCALE, CorruptSystem, DisconnectedShape, EmptyShape, base_conversion_plan,
                              compile_shape, instructions_to_tape, load_system, outline_tour, parse_shape,
                              spanning_tree, system_bit_encoding_size, tour_instructions,
                              tree_outline_instructions)
from negglue.core import Shape, scale

from strategies import polyomino_cells


def test_parse_shape_errors():
    with pytest.raises(EmptyShape):
        parse_shape("...\n")
    with pytest.raises(DisconnectedShape):
        parse_shape("#.#")
    with pytest.raises(ValueError):
        parse_shape("#?")


def test_single_cell_instructions():
    seq = tree_outline_instructions(parse_shape("#"))
    assert seq.text() == "FRR"
    assert seq.walk() == [(0, 0), (0, 1), (1, 1), (1, 0)]


def test_domino_instructions_turn_clockwise():
    seq = tree_outline_instructions(parse_shape("##"))
    assert len(seq) == 7
    # clockwise closed tour: four net right turns, two of them implicit
    # (the first move runs along the start heading, the closing move is not listed)
    assert seq.text().count("R") - seq.text().count("L") == 2


@settings(max_examples=60, deadline=None)
@given(polyomino_cells(10))
def test_outline_tour_properties(cells):
    sh = Shape(cells)
    tree = spanning_tree(sh)
    assert tree.is_valid()
    tour = outline_tour(tree)
    assert set(tour) == scale(sh, 2).cells
    assert len(tour) == len(set(tour))
    seq = tree_outline_instructions(sh)
    assert len(seq) == 4 * len(sh) - 1
    assert seq.walk() == tour
    # the tour closes: its last cell is next to the start
    (r0, c0), (r1, c1) = tour[0], tour[-1]
    assert abs(r0 - r1) + abs(c0 - c1) == 1


def test_reversing_tour_is_rejected():
    with pytest.raises(ValueError):
        tour_instructions([(0, 0), (0, 1), (0, 0)])


@pytest.mark.parametrize("k,b,d", [(4, 2, 4), (64, 11, 22), (1024, 103, 171)])
def test_base_conversion_plan(k, b, d):
    plan = base_conversion_plan(k)
    assert (plan.b, plan.d) == (b, d)
    assert plan.d <= plan.digit_bound()
    assert plan.within_budget()


def test_base_conversion_small_inputs():
    assert base_conversion_plan(1).b == 2
    assert base_conversion_plan(0).d == 0


def test_system_bit_encoding_size():
    assert system_bit_encoding_size(1, 1) == 9
    assert system_bit_encoding_size(2, 10) == 8 * 3 + 4
    with pytest.raises(ValueError):
        system_bit_encoding_size(0, 10)


def test_tape_has_section_per_instruction():
    tape = instructions_to_tape("RRR")
    assert tape.sections == 3
    assert tape.tile_count() == 4 * tape.section_tiles
    with pytest.raises(ValueError):
        instructions_to_tape("")
    with pytest.raises(ValueError):
        instructions_to_tape("RXR")


def test_compile_single_cell(compiled_system):
    system = compiled_system("single")
    config, policy = system
    assert config.temperature == 10
    assert system.target == scale(Shape([(0, 0)]), SCALE)
    assert len(system.target) == 576
    assert policy.allows(policy.c_garbage) and not policy.allows(policy.c_garbage + 1)


def test_compile_rejects_bad_shapes():
    with pytest.raises(EmptyShape):
        compile_shape(Shape([]))
    with pytest.raises(DisconnectedShape):
        compile_shape(Shape([(0, 0), (0, 2)]))


def test_serialized_system_roundtrip(compiled_system):
    system = compiled_system("domino")
    text = system.to_text()
    again = load_system(text)
    assert again.shape == system.shape
    assert again.target == system.target
    assert again.instructions.text() == system.instructions.text()
    assert again.policy == system.policy
    assert again.to_text() == text


def test_corrupt_system_detected(compiled_system):
    text = compiled_system("single").to_text()
    with pytest.raises(CorruptSystem):
        load_system(text[: len(text) // 2])
    with pytest.raises(CorruptSystem):
        load_system("garbage\n")


def test_tile_complexity_grows_slowly(compiled_system):
    # extra cells add instructions, not new gadget types
    small = compiled_system("single").script.gadget_names()
    large = compiled_system("T-tetromino").script.gadget_names()
    assert len(large) <= 3 * len(small)
    assert math.isfinite(len(large))
