import json
import shutil
import subprocess

import numpy as np
import pytest
from click.testing import CliRunner

from freegame.cli import EXIT_CAP, EXIT_INPUT, RunReport, main
from freegame.sdpsolve import import_sdpa, solve

from .conftest import DATA, GAMES

CHSH = str(GAMES / "chsh.json")
CLASSICAL = str(GAMES / "chsh_classical.json")
ALLWIN = str(GAMES / "allwin.json")
BAD = str(DATA / "bad_pi.json")


def run(*args, code=0):
    res = CliRunner().invoke(main, [str(a) for a in args])
    assert res.exit_code == code, res.output
    return res


def report(*args, code=0):
    res = run(*args, code=code)
    return RunReport.from_json(res.stdout.strip().splitlines()[-1])


@pytest.mark.parametrize("method", ["dense", "sym", "bose", "bose-reduced"])
def test_upper_allwin(method):
    rep = report("upper", ALLWIN, "--level", 1, "--method", method)
    assert rep.upper == pytest.approx(1.0, abs=1e-8)
    assert rep.solver["status"] == "optimal"


def test_upper_chsh_decreases(chsh_level1, chsh_level2):
    one = report("upper", CHSH, "--level", 1)
    two = report("upper", CHSH, "--level", 2)
    assert two.upper >= 0.8535
    assert two.upper <= one.upper + 1e-7
    assert two.upper == pytest.approx(chsh_level2[1].primalValue, abs=1e-10)
    assert two.deFinettiBound == pytest.approx(32.629344, abs=1e-6)


def test_malformed_input():
    res = run("upper", BAD, code=EXIT_INPUT)
    assert "sum to 1" in res.output
    run("upper", "/nonexistent/game.json", code=EXIT_INPUT)
    run("certify", CHSH, "--epsilon", -1, code=EXIT_INPUT)


def test_cap_exit_still_reports(tmp_path):
    out = tmp_path / "rep.json"
    rep = report("upper", CHSH, "--level", 3, "--method", "dense", "--report", out, code=EXIT_CAP)
    assert "cap" in rep.notes
    assert RunReport.from_json(out.read_text()) == rep


def test_lower_allwin_and_classical():
    assert report("lower", ALLWIN, "--level", 2).lower == pytest.approx(1.0, abs=1e-9)
    rep = report("lower", CLASSICAL, "--level", 2)
    assert rep.lower == pytest.approx(0.75, abs=1e-6)
    assert rep.notes["rounding"] is True


def test_lower_chsh_with_strategy_dump(tmp_path):
    dump = tmp_path / "strategy.npz"
    rep = report("lower", CHSH, "--level", 2, "--strategy-out", dump)
    assert rep.lower >= 0.8535
    assert rep.lower <= rep.upper + 1e-7
    with np.load(dump) as z:
        assert z["rho"].shape == (4, 4)
        assert np.allclose(z["alice_q0_a0"] + z["alice_q0_a1"], np.eye(2), atol=1e-9)


def test_lower_level_one_uses_seesaw():
    rep = report("lower", CHSH, "--level", 1, "--seed", 3)
    assert rep.notes["rounding"] is False
    assert rep.lower >= 0.85


def test_certify_refuses_huge_level():
    rep = report("certify", CHSH, "--epsilon", 0.1)
    assert rep.level == 212935
    assert rep.notes["solved"] is False
    assert rep.upper is None


def test_certify_small_level_end_to_end():
    rep = report("certify", CHSH, "--epsilon", 1e3)
    assert rep.level == 1
    assert rep.notes["solved"] is True
    assert rep.lower <= rep.upper + 1e-7
    assert rep.notes["gap"] <= rep.deFinettiBound


def test_report_roundtrip():
    rep = RunReport("upper", "abc", "sym", 2, 0.1 + 0.2, 1 / 3, 2 ** 0.5, {"status": "optimal"}, 1.5e-3, {"k": [1]})
    back = RunReport.from_json(rep.to_json())
    assert back == rep
    assert json.loads(rep.to_json())["upper"] == 0.1 + 0.2


def test_deterministic_reports():
    a = report("lower", CLASSICAL, "--level", 2)
    b = report("lower", CLASSICAL, "--level", 2)
    a.wallTime = b.wallTime = 0.0
    assert a == b


def test_export(tmp_path):
    a, b = tmp_path / "a.dat-s", tmp_path / "b.dat-s"
    rep = report("export", CHSH, "--level", 1, "--method", "dense", "--out", a)
    report("export", CHSH, "--level", 1, "--method", "dense", "--out", b)
    assert a.read_bytes() == b.read_bytes()
    assert rep.notes["path"] == str(a)
    val = solve(import_sdpa(a)).primalValue
    assert val == pytest.approx(report("upper", CHSH, "--level", 1, "--method", "dense").upper, abs=1e-9)
    run("export", BAD, "--out", tmp_path / "c.dat-s", code=EXIT_INPUT)


def test_console_script_installed():
    exe = shutil.which("freegame")
    if exe is None:
        pytest.skip("console script not on PATH")
    out = subprocess.run([exe, "--help"], capture_output=True, text=True, check=True)
    for cmd in ("upper", "lower", "certify", "export"):
        assert cmd in out.stdout
