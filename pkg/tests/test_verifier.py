import pytest

from negglue.compiler import GarbagePolicy
from negglue.core import Shape, scale
from negglue.engine import InconclusiveVerdict
from negglue.verifier import ProbeReport, adversarial_probe, audit_run, two_handed_demo


def test_two_handed_example_log():
    lines = [e.to_line() for e in two_handed_demo()]
    assert lines == ["combine in=L,tile out=square strength=1",
                     "break in=square out=top,bottom strength=0"]


def test_scripted_run_single_cell(compiled_system):
    system = compiled_system("single")
    seen = []
    report = audit_run(system, on_step=lambda i, step, scene: seen.append(i))
    assert report.passed
    assert report.terminal_tiles == 576
    assert report.max_detached_piece <= report.garbage_bound
    assert report.break_count > 0
    assert len(seen) == report.steps_run
    assert len(report.events) == report.steps_run
    text = report.to_text()
    assert text.startswith("passed true\n")
    assert "trace_divergences 0" in text


def test_wrong_target_fails(compiled_system):
    system = compiled_system("single")
    report = audit_run(system, target=scale(Shape([(0, 0), (0, 1)]), 24), check_local=False)
    assert not report.terminal_shape_match and not report.passed


def test_tight_garbage_bound_fails(compiled_system):
    system = compiled_system("single")
    report = audit_run(system, policy=GarbagePolicy(1), check_local=False)
    assert report.max_detached_piece > 1 and not report.passed


def test_probe_reports_inconclusive_horizon(compiled_system):
    with pytest.raises(InconclusiveVerdict):
        adversarial_probe(compiled_system("single"), horizon=1)
    with pytest.raises(ValueError):
        adversarial_probe(compiled_system("single"), horizon=0)


def test_probe_report_text():
    rep = ProbeReport(10, 5, violations=["x"])
    assert not rep.passed
    assert rep.to_text().splitlines()[0] == "passed false"
    assert "violation x" in rep.to_text()
