"""Shared fixtures: CHSH solutions are reused across test modules."""

from __future__ import annotations

from pathlib import Path

import pytest

from freegame.csep import game_to_csep
from freegame.gamecore import chsh
from freegame.hierarchy import build_sym_reduced_csep_sdp
from freegame.rounding import round_game_solution
from freegame.sdpsolve import solve

ROOT = Path(__file__).resolve().parents[1]
GAMES = ROOT / "games"
DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def chsh_game():
    return chsh(2)


@pytest.fixture(scope="session")
def chsh_csep(chsh_game):
    return game_to_csep(chsh_game)


@pytest.fixture(scope="session")
def chsh_level1(chsh_csep):
    p = build_sym_reduced_csep_sdp(chsh_csep, 1)
    return p, solve(p)


@pytest.fixture(scope="session")
def chsh_level2(chsh_csep):
    p = build_sym_reduced_csep_sdp(chsh_csep, 2)
    return p, solve(p)


@pytest.fixture(scope="session")
def chsh_rounding(chsh_game, chsh_csep, chsh_level2):
    p, sol = chsh_level2
    return round_game_solution(chsh_game, p, sol, chsh_csep, seed=0, iters=20)


# ---------------------------------------------------------------- acceptance report

_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, [title, True])
    entry[1] = entry[1] and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
