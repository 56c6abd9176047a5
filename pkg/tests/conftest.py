import pytest

from negglue.compiler import compile_shape, parse_shape

SHAPES = {
    "single": "#",
    "domino": "##",
    "L-tromino": "#.\n##",
    "square": "##\n##",
    "T-tetromino": "###\n.#.",
}

# criterion number -> (passed, detail), filled in by the acceptance tests
ACCEPTANCE: dict[int, tuple[bool, str]] = {}

_compiled = {}


def compiled(name):
    if name not in _compiled:
        _compiled[name] = compile_shape(parse_shape(SHAPES[name]))
    return _compiled[name]


@pytest.fixture(scope="session")
def compiled_system():
    return compiled


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
