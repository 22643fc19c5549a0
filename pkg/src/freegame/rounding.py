"""Rounding of hierarchy solutions to feasible product points and strategies.

Copies ``1..m`` of an extension are measured with a tensor power of a local
informationally complete POVM (computational basis on classical registers);
every outcome ``z`` yields a product pair ``rho_{A|z} (x) rho_{B_{m+1}|z}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .csep import Assemblage, CSepProblem, strategy_from_assemblage
from .gamecore import Game, Strategy, clean_povm, evaluate_strategy, seesaw_from
from .hierarchy import dense_extension, rebuild
from .invbasis import ptrace
from .sdpproblem import PSDBlock, SDPProblem
from .sdpsolve import Solution, solve

P_MIN = 1e-12
CLIP_TOL = 1e-9
PIECE_TOL = 1e-7
FEAS_TOL = 1e-6


class RoundingError(ValueError):
    pass


def _psd_sqrt_inv(S: np.ndarray) -> np.ndarray:
    w, U = np.linalg.eigh(S)
    return (U / np.sqrt(w)) @ U.conj().T


@dataclass(frozen=True)
class ICPOVM:
    elements: tuple[np.ndarray, ...]
    frame: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        els = tuple(np.asarray(E, dtype=complex) for E in self.elements)
        d = els[0].shape[0]
        if len(els) != d * d:
            raise ValueError("an IC POVM on C^d needs d^2 elements")
        for E in els:
            if np.linalg.eigvalsh(E)[0] < -1e-10:
                raise ValueError("POVM element is not PSD")
        if np.max(np.abs(sum(els) - np.eye(d))) > 1e-10:
            raise ValueError("POVM elements do not sum to the identity")
        if np.linalg.matrix_rank(np.array([E.ravel() for E in els]), tol=1e-10) != d * d:
            raise ValueError("POVM is not informationally complete")
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "frame", tuple(np.asarray(P, dtype=complex) for P in self.frame))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        return np.array([np.real(np.vdot(E, rho)) for E in self.elements])

    def reconstruct(self, probs: np.ndarray) -> np.ndarray:
        """Dual-frame inverse of :meth:`probabilities`."""
        d = self.dim
        A = np.array([E.conj().ravel() for E in self.elements])
        vec = np.linalg.lstsq(A, np.asarray(probs, dtype=complex), rcond=None)[0]
        rho = vec.reshape(d, d)
        return (rho + rho.conj().T) / 2


def ic_povm(d: int) -> ICPOVM:
    """``S^{-1/2} P_i S^{-1/2}`` for the frame ``|j>``, ``|j>+|k>``, ``|j>+i|k>`` (``j < k``)."""
    if d < 1:
        raise ValueError("dimension must be positive")
    eye = np.eye(d)
    vecs = [eye[j] for j in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            vecs.append((eye[j] + eye[k]) / np.sqrt(2))
            vecs.append((eye[j] + 1j * eye[k]) / np.sqrt(2))
    frame = [np.outer(v, np.conj(v)) for v in vecs]
    R = _psd_sqrt_inv(sum(frame))
    return ICPOVM(tuple(R @ P @ R for P in frame), tuple(frame))


def local_povm(dim: int, classical: int) -> list[np.ndarray]:
    """Computational basis on the classical register, IC POVM on the rest."""
    ic = ic_povm(dim // classical)
    out = []
    for c in range(classical):
        proj = np.zeros((classical, classical))
        proj[c, c] = 1
        out.extend(np.kron(proj, E) for E in ic.elements)
    return out


@dataclass(frozen=True)
class RoundedPoint:
    """Conditional product pieces ``(p(z), rho_{A|z}, rho_{B|z})`` of one rounding run."""

    pieces: tuple[tuple[float, np.ndarray, np.ndarray], ...]
    lowerBound: float
    bestPiece: int
    pieceValues: tuple[float, ...] = ()
    m: int = 1

    def __post_init__(self) -> None:
        if not self.pieces:
            raise ValueError("a rounded point needs at least one piece")
        w = np.array([p for p, _, _ in self.pieces])
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
            raise ValueError("piece weights must form a distribution")
        for _, a, b in self.pieces:
            for r in (a, b):
                if abs(np.trace(r).real - 1) > 1e-9 or np.linalg.eigvalsh(r)[0] < -1e-9:
                    raise ValueError("piece states must be normalized and PSD")
        if not 0 <= self.bestPiece < len(self.pieces):
            raise ValueError("bestPiece out of range")

    @property
    def best(self) -> tuple[float, np.ndarray, np.ndarray]:
        return self.pieces[self.bestPiece]

    def mixture(self) -> np.ndarray:
        return sum(p * np.kron(a, b) for p, a, b in self.pieces)


def _clip(rho: np.ndarray) -> np.ndarray:
    rho = (rho + rho.conj().T) / 2
    w, U = np.linalg.eigh(rho)
    if w[0] < -CLIP_TOL * max(1.0, np.abs(w).max()):
        raise RoundingError(f"conditional state has eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0, None)
    out = (U * w) @ U.conj().T
    return out / np.trace(out).real


def _levels(extension: np.ndarray, csep: CSepProblem, bose: bool) -> tuple[int, int]:
    dc = csep.dimB ** 2 if bose else csep.dimB
    side = extension.shape[0]
    if extension.shape != (side, side) or side % csep.dimA:
        raise RoundingError("extension has the wrong shape")
    rest, n = side // csep.dimA, 0
    while rest > 1 and rest % dc == 0:
        rest //= dc
        n += 1
    if rest != 1 or n < 1:
        raise RoundingError("extension side is not dimA * dimC^n")
    return n, dc


def _check_extension(X: np.ndarray, csep: CSepProblem, n: int, dc: int, bose: bool) -> None:
    if np.max(np.abs(X - X.conj().T)) > FEAS_TOL or abs(np.trace(X).real - 1) > FEAS_TOL:
        raise RoundingError("extension must be Hermitian with unit trace")
    if np.linalg.eigvalsh((X + X.conj().T) / 2)[0] < -FEAS_TOL:
        raise RoundingError("extension is not PSD")
    dA = csep.dimA
    two = ptrace(X, [dA, dc, dc ** (n - 1)], [0, 1])
    if bose:
        two = ptrace(two, [dA, csep.dimB, csep.dimB], [0, 1])
    if csep.residual_A(ptrace(two, [dA, csep.dimB], [0])) > FEAS_TOL or \
            csep.residual_B(ptrace(two, [dA, csep.dimB], [1])) > FEAS_TOL:
        raise RoundingError("extension marginals violate the constraints")


def round_extension(extension: np.ndarray, csep: CSepProblem, m: int, bose: bool = False) -> RoundedPoint:
    """Condition on IC outcomes of copies ``1..m`` and keep copy ``m + 1``."""
    X = np.asarray(extension)
    n, dc = _levels(X, csep, bose)
    if not 1 <= m <= n - 1:
        raise RoundingError(f"m must lie in 1..{n - 1}")
    _check_extension(X, csep, n, dc, bose)
    dA, dB = csep.dimA, csep.dimB
    Dm = dc ** m
    R = ptrace(X, [dA, Dm, dc, dc ** (n - m - 1)], [0, 1, 2]).reshape(dA, Dm, dc, dA, Dm, dc)
    povm = local_povm(dB, csep.classicalB)
    if bose:
        povm = [np.kron(E, F) for E in povm for F in povm]
    pieces, values = [], []
    for z in itertools.product(range(len(povm)), repeat=m):
        Mz = np.array([[1.0]])
        for k in z:
            Mz = np.kron(Mz, povm[k])
        cond = np.einsum("aibcjd,ji->abcd", R, Mz).reshape(dA * dc, dA * dc)
        p = float(np.trace(cond).real)
        if p <= P_MIN:
            continue
        cond = cond / p
        rhoA = _clip(ptrace(cond, [dA, dc], [0]))
        rhoC = ptrace(cond, [dA, dc], [1])
        rhoB = _clip(ptrace(rhoC, [dB, dB], [0]) if bose else rhoC)
        res = max(csep.residual_A(rhoA), csep.residual_B(rhoB))
        if res > PIECE_TOL:
            raise RoundingError(f"piece violates the constraints by {res:.3e}")
        pieces.append((p, rhoA, rhoB))
        values.append(csep.value(rhoA, rhoB))
    total = sum(p for p, _, _ in pieces)
    pieces = [(p / total, a, b) for p, a, b in pieces]
    lower = float(sum(p * v for (p, _, _), v in zip(pieces, values)))
    return RoundedPoint(tuple(pieces), lower, int(np.argmax(values)), tuple(values), m)


def round_sweep(extension: np.ndarray, csep: CSepProblem, bose: bool = False) -> tuple[RoundedPoint, dict[int, float]]:
    """Round for every ``m`` in ``1..n-1``; return the best point and all lower bounds."""
    n, _ = _levels(np.asarray(extension), csep, bose)
    points = {m: round_extension(extension, csep, m, bose) for m in range(1, n)}
    bounds = {m: rp.lowerBound for m, rp in points.items()}
    best = max(points.values(), key=lambda rp: rp.pieceValues[rp.bestPiece])
    return best, bounds


def project_equalities(p: SDPProblem, x: np.ndarray) -> np.ndarray:
    """Least-norm correction of ``x`` onto ``A x = b``."""
    x = np.asarray(x, dtype=float)
    if p.eq_matrix.shape[0] == 0:
        return x
    r = p.eq_matrix @ x - p.eq_rhs
    dx = spla.lsqr(p.eq_matrix, r, atol=1e-15, btol=1e-15, iter_lim=10 * p.num_vars)[0]
    return x - dx


def extension_from_solution(p: SDPProblem, sol: Solution, csep: CSepProblem) -> np.ndarray:
    """Dense extension operator from the solution of any hierarchy builder."""
    x = project_equalities(p, sol.x)
    form = p.metadata.get("formulation")
    if form in ("dense", "bose"):
        return p.psd_blocks[0].evaluate(x)
    return dense_extension(csep, int(p.metadata["level"]), form, x)


def sharpen(p: SDPProblem, sol: Solution, csep: CSepProblem, seed: int = 0,
            slack: float = 1e-7) -> tuple[Solution, bool]:
    """Move to an extreme optimal point before rounding.

    Maximizes ``tr[(W (x) I) rho]`` for a seeded random ``W`` on ``A`` over
    points within ``slack`` of the optimum. Interior-point optima are maximally
    mixed on the optimal face, which makes conditional states needlessly
    mixed. Falls back to ``sol`` unless the second solve is optimal.
    """
    rng = np.random.default_rng(seed)
    dA = csep.dimA
    W = rng.normal(size=(dA, dA))
    lab = np.arange(dA) // (dA // csep.classicalA)
    W = (W + W.T) / 2 * (lab[:, None] == lab[None, :])
    aux = CSepProblem(dA, csep.dimB, np.kron(W, np.eye(csep.dimB)), 1.0, csep.aliceConstraints,
                      csep.bobConstraints, csep.classicalA, csep.classicalB)
    floor = PSDBlock(1, sp.csc_matrix(p.objective[None, :]),
                     np.array([[p.objective_constant - (sol.primalValue - slack)]]))
    q = SDPProblem(p.num_vars, rebuild(p, aux).objective, p.psd_blocks + (floor,), p.eq_matrix, p.eq_rhs,
                   p.metadata)
    out = solve(q)
    if out.status != "optimal":
        return sol, False
    return out, True


def _blocks(state: np.ndarray, nA: int, nQ: int, nT: int) -> dict[tuple[int, int], np.ndarray]:
    out = {}
    for a in range(nA):
        for q in range(nQ):
            k = (a * nQ + q) * nT
            out[(a, q)] = state[k:k + nT, k:k + nT]
    return out


def strategy_from_rounding(game: Game, rp: RoundedPoint) -> tuple[Strategy, float]:
    """Pretty-good strategy built from the best piece; its value is a lower bound."""
    _, rhoA, rhoB = rp.best
    nA, nQ, nT = game.nA, game.nQ, game.nT
    if rhoA.shape != (game.dim, game.dim) or rhoB.shape != (game.dim, game.dim):
        raise RoundingError("rounded point does not come from this game")
    alpha = {k: v / game.pi1[k[1]] for k, v in _blocks(rhoA, nA, nQ, nT).items()}
    try:
        asm = Assemblage(alpha, tol=1e-6)
    except ValueError as exc:
        raise RoundingError(f"best piece is not an assemblage: {exc}") from exc
    D = _blocks(rhoB, nA, nQ, nT)
    bob = [clean_povm([nT * D[(a, q)] / game.pi2[q] for a in range(nA)]) for q in range(nQ)]
    s = strategy_from_assemblage(asm, bob)
    return s, evaluate_strategy(game, s)


def warm_start_seesaw(game: Game, strategy: Strategy, iters: int = 20) -> tuple[Strategy, float]:
    """See-saw started from ``strategy``; never returns a worse value."""
    s, v, _ = seesaw_from(game, strategy.alicePOVM, strategy.bobPOVM, iters, rho=strategy.rho)
    return s, v


@dataclass(frozen=True)
class GameRounding:
    rounded: RoundedPoint
    boundsByM: dict
    roundedValue: float
    strategy: Strategy
    value: float
    sharpened: bool


def round_game_solution(game: Game, p: SDPProblem, sol: Solution, csep: CSepProblem, seed: int = 0,
                        iters: int = 20) -> GameRounding:
    """Sharpen, round over every ``m``, extract a strategy and warm-start see-saw from it."""
    sol2, used = sharpen(p, sol, csep, seed)
    bose = p.metadata.get("formulation") in ("bose", "bose-reduced")
    X = extension_from_solution(p, sol2, csep)
    best, bounds = round_sweep(X, csep, bose)
    strat, val = strategy_from_rounding(game, best)
    warm, warm_val = warm_start_seesaw(game, strat, iters)
    return GameRounding(best, bounds, val, warm, warm_val, used)
