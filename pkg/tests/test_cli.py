import pytest

from negglue.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, description_bits, main


@pytest.fixture(scope="module")
def single_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("single")
    (d / "shape.txt").write_text("#\n")
    assert main(["compile", "--shape", str(d / "shape.txt"), "--out", str(d / "out")]) == EXIT_OK
    return d / "out"


def test_compile_writes_outputs(single_dir):
    assert (single_dir / "system.txt").is_file()
    assert (single_dir / "tape.txt").read_text().strip()
    meta = dict(line.split(" ", 1) for line in (single_dir / "metadata.txt").read_text().splitlines())
    assert meta["instructions"] == "FRR"
    assert meta["instruction_count"] == "3"
    assert meta["target_cells"] == "576"
    assert meta["description_bits"] == "6"


def test_simulate_scripted(single_dir, tmp_path):
    out = tmp_path / "run"
    code = main(["simulate", str(single_dir), "--out", str(out), "--frame-every", "50", "--render", "svg"])
    assert code == EXIT_OK
    assert (out / "report.txt").read_text().startswith("passed true")
    assert (out / "final.svg").read_text().count("<rect") == 576
    frames = sorted((out / "frames").iterdir())
    assert frames and frames[0].name == "frame_000000.svg"
    log = (out / "log.txt").read_text().splitlines()
    assert log and all(line.startswith(("combine", "break")) for line in log)


def test_simulate_inconclusive_explore(single_dir, tmp_path):
    code = main(["simulate", str(single_dir), "--out", str(tmp_path), "--mode", "explore", "--horizon", "1"])
    assert code == EXIT_FAIL
    assert "inconclusive" in (tmp_path / "probe.txt").read_text()


def test_input_errors(tmp_path, capsys):
    assert main(["compile", "--shape", str(tmp_path / "missing.txt")]) == EXIT_INPUT
    bad = tmp_path / "bad.txt"
    bad.write_text("#.#\n")
    assert main(["compile", "--shape", str(bad), "--out", str(tmp_path)]) == EXIT_INPUT
    (tmp_path / "system.txt").write_text("not a system\n")
    assert main(["simulate", str(tmp_path)]) == EXIT_INPUT
    assert main(["simulate", str(tmp_path / "nowhere")]) == EXIT_INPUT
    assert main(["verify", "traces", "--gadgets", str(tmp_path / "none.txt")]) == EXIT_INPUT
    assert main(["frobnicate"]) == EXIT_INPUT
    assert "negglue:" in capsys.readouterr().err


def test_bad_frame_interval(single_dir):
    assert main(["simulate", str(single_dir), "--frame-every", "0"]) == EXIT_INPUT


@pytest.mark.parametrize("kind", ["inequalities", "gadgets", "traces"])
def test_verify_suites_pass(kind, capsys):
    assert main(["verify", kind]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_verify_fails_at_other_temperature(capsys):
    assert main(["verify", "traces", "--tau", "12"]) == EXIT_FAIL


def test_description_bits():
    assert description_bits("FRRL") == 8
