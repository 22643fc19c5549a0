"""Command-line front end: ``freegame upper|lower|certify|export``.

Exit codes: 0 success, 1 input error, 2 resource cap, 3 numerical failure.
Reports are JSON objects on stdout (and in ``--report`` when given).
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click
import numpy as np

from .csep import game_to_csep
from .gamecore import Game, GameError, Strategy, seesaw_optimize
from .hierarchy import (BuilderCapExceeded, build_bose_reduced_sdp, build_bose_sdp, build_dense_csep_sdp,
                        build_sym_reduced_csep_sdp, definetti_gap, level_for_epsilon)
from .invbasis import DenseCapExceeded
from .rounding import RoundingError, round_game_solution, warm_start_seesaw
from .sdpsolve import MalformedProblem, SolverCapExceeded, export_sdpa, solve

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_NUMERIC = 0, 1, 2, 3
METHODS = ("dense", "sym", "bose", "bose-reduced")
CAP_ERRORS = (BuilderCapExceeded, SolverCapExceeded, DenseCapExceeded)


class CommandFailed(Exception):
    def __init__(self, code: int, message: str, report: "RunReport | None" = None):
        super().__init__(message)
        self.code = code
        self.report = report


@dataclass
class RunReport:
    command: str
    game: str
    method: str | None = None
    level: int | None = None
    upper: float | None = None
    lower: float | None = None
    deFinettiBound: float | None = None
    solver: dict = field(default_factory=dict)
    wallTime: float = 0.0
    notes: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))


def _load(path: str) -> Game:
    try:
        return Game.load(path)
    except OSError as exc:
        raise CommandFailed(EXIT_INPUT, f"cannot read {path}: {exc}") from exc
    except GameError as exc:
        raise CommandFailed(EXIT_INPUT, str(exc)) from exc


def _build(game: Game, n: int, method: str):
    csep = game_to_csep(game)
    if method == "dense":
        return csep, build_dense_csep_sdp(csep, n, pinch=True)
    if method == "sym":
        return csep, build_sym_reduced_csep_sdp(csep, n)
    if method == "bose":
        return csep, build_bose_sdp(csep, n, pinch=True)
    return csep, build_bose_reduced_sdp(csep, n)


def _gap_variant(method: str) -> str:
    return "bose-game" if method.startswith("bose") else "game"


def _solver_stats(sol) -> dict:
    return {"status": sol.status, "iterations": int(sol.iterations), "gap": float(sol.gap),
            "residual": float(sol.residual), "minEigenvalue": float(sol.minEigenvalue), "route": sol.route,
            "dualValue": float(sol.dualValue)}


def _upper(game: Game, n: int, method: str, tol: float, max_iter: int):
    csep, p = _build(game, n, method)
    sol = solve(p, tol=tol, max_iter=max_iter)
    if sol.status != "optimal":
        raise CommandFailed(EXIT_NUMERIC, f"solver finished with status {sol.status}")
    return csep, p, sol


def _write_strategy(path: str, s: Strategy) -> None:
    arrays = {"rho": s.rho}
    for who, fams in (("alice", s.alicePOVM), ("bob", s.bobPOVM)):
        for q, fam in enumerate(fams):
            for a, E in enumerate(fam):
                arrays[f"{who}_q{q}_a{a}"] = E
    np.savez(path, **arrays)


def _emit(report: RunReport, report_path: str | None) -> None:
    text = report.to_json()
    if report_path:
        Path(report_path).write_text(text + "\n", encoding="utf-8")
    click.echo(text)


def _run(body, report_path: str | None) -> None:
    t0 = time.perf_counter()
    try:
        report = body()
    except CommandFailed as exc:
        click.echo(f"error: {exc}", err=True)
        if exc.report is not None and exc.code == EXIT_CAP:
            exc.report.wallTime = time.perf_counter() - t0
            _emit(exc.report, report_path)
        sys.exit(exc.code)
    report.wallTime = time.perf_counter() - t0
    _emit(report, report_path)


def _classify(exc: Exception, report: RunReport) -> CommandFailed:
    if isinstance(exc, CAP_ERRORS):
        report.notes["cap"] = str(exc)
        return CommandFailed(EXIT_CAP, str(exc), report)
    if isinstance(exc, (RoundingError, np.linalg.LinAlgError, RuntimeError)):
        return CommandFailed(EXIT_NUMERIC, str(exc))
    return CommandFailed(EXIT_INPUT, str(exc))


@click.group()
def main() -> None:
    """Certified bounds on free non-local games with bounded entanglement."""


@main.command()
@click.argument("game_path", type=click.Path())
@click.option("--level", "-n", type=int, default=1, show_default=True)
@click.option("--method", type=click.Choice(METHODS), default="sym", show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
@click.option("--max-iter", type=int, default=200, show_default=True)
@click.option("--report", "report_path", type=click.Path(), default=None)
def upper(game_path, level, method, tol, max_iter, report_path):
    """Upper bound from the level-n relaxation."""

    def body():
        game = _load(game_path)
        rep = RunReport("upper", game.digest(), method, level)
        rep.deFinettiBound = definetti_gap((game.nA, game.nQ, game.nT), level, _gap_variant(method))
        try:
            _, _, sol = _upper(game, level, method, tol, max_iter)
        except CommandFailed:
            raise
        except ValueError as exc:
            raise _classify(exc, rep) from exc
        rep.upper = float(sol.primalValue)
        rep.solver = _solver_stats(sol)
        return rep

    _run(body, report_path)


def _lower(game: Game, n: int, method: str, seed: int, iters: int, tol: float, rep: RunReport) -> Strategy:
    if n >= 2:
        csep, p, sol = _upper(game, n, method, tol, 200)
        r = round_game_solution(game, p, sol, csep, seed, iters)
        rep.upper = float(sol.primalValue)
        rep.solver = _solver_stats(sol)
        rep.notes.update({"roundedValue": r.roundedValue, "boundsByM": {str(k): v for k, v in r.boundsByM.items()},
                          "sharpened": r.sharpened, "rounding": True})
        rep.deFinettiBound = definetti_gap((game.dim, game.dim), n, "rounding")
        rep.lower = float(r.value)
        return r.strategy
    s, v = seesaw_optimize(game, seed=seed, iters=iters)
    s, v = warm_start_seesaw(game, s, iters)
    rep.notes["rounding"] = False
    rep.lower = float(v)
    return s


@main.command()
@click.argument("game_path", type=click.Path())
@click.option("--level", "-n", type=int, default=2, show_default=True)
@click.option("--method", type=click.Choice(METHODS), default="sym", show_default=True)
@click.option("--seesaw", "iters", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
@click.option("--strategy-out", type=click.Path(), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
def lower(game_path, level, method, iters, seed, tol, strategy_out, report_path):
    """Lower bound from rounding plus warm-started see-saw."""

    def body():
        game = _load(game_path)
        rep = RunReport("lower", game.digest(), method, level)
        try:
            s = _lower(game, level, method, seed, iters, tol, rep)
        except CommandFailed:
            raise
        except ValueError as exc:
            raise _classify(exc, rep) from exc
        if strategy_out:
            _write_strategy(strategy_out, s)
            rep.notes["strategy"] = str(strategy_out)
        return rep

    _run(body, report_path)


@main.command()
@click.argument("game_path", type=click.Path())
@click.option("--epsilon", type=float, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--seesaw", "iters", type=int, default=20, show_default=True)
@click.option("--report", "report_path", type=click.Path(), default=None)
def certify(game_path, epsilon, seed, iters, report_path):
    """Level needed for accuracy epsilon; solves both bounds when within caps."""

    def body():
        game = _load(game_path)
        if not epsilon > 0:
            raise CommandFailed(EXIT_INPUT, "epsilon must be positive")
        dims = (game.nA, game.nQ, game.nT)
        n = level_for_epsilon(dims, epsilon, "game")
        rep = RunReport("certify", game.digest(), "sym", n)
        rep.deFinettiBound = definetti_gap(dims, n, "game")
        try:
            _lower(game, n, "sym", seed, iters, 1e-8, rep)
            if rep.upper is None:
                _, _, sol = _upper(game, n, "sym", 1e-8, 200)
                rep.upper = float(sol.primalValue)
                rep.solver = _solver_stats(sol)
        except CAP_ERRORS as exc:
            rep.notes["solved"] = False
            rep.notes["cap"] = str(exc)
            return rep
        except CommandFailed:
            raise
        except ValueError as exc:
            raise _classify(exc, rep) from exc
        rep.notes["solved"] = True
        rep.notes["gap"] = rep.upper - rep.lower
        return rep

    _run(body, report_path)


@main.command()
@click.argument("game_path", type=click.Path())
@click.option("--level", "-n", type=int, default=1, show_default=True)
@click.option("--method", type=click.Choice(METHODS), default="sym", show_default=True)
@click.option("--out", type=click.Path(), required=True)
def export(game_path, level, method, out):
    """Write the level-n relaxation as an SDPA sparse file."""

    def body():
        game = _load(game_path)
        rep = RunReport("export", game.digest(), method, level)
        try:
            _, p = _build(game, level, method)
            export_sdpa(p, out)
        except MalformedProblem as exc:
            raise CommandFailed(EXIT_INPUT, str(exc)) from exc
        except OSError as exc:
            raise CommandFailed(EXIT_INPUT, f"cannot write {out}: {exc}") from exc
        except ValueError as exc:
            raise _classify(exc, rep) from exc
        rep.notes["path"] = str(out)
        rep.notes["fingerprint"] = p.fingerprint()
        return rep

    _run(body, None)


if __name__ == "__main__":  # pragma: no cover
    main()
