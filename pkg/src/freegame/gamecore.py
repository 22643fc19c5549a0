"""Free two-player games, strategies, exact evaluation and see-saw optimization.

Composite classical index order is ``(a1, a2, q1, q2)`` with ``a1`` outermost:
``index = ((a1 * nA + a2) * nQ + q1) * nQ + q2``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .invbasis import ptrace

PROB_TOL = 1e-12
POVM_TOL = 1e-10
CLASSICAL_CAP = 10 ** 6


class GameError(ValueError):
    pass


@dataclass(frozen=True)
class Game:
    nA: int
    nQ: int
    nT: int
    pi1: tuple[float, ...]
    pi2: tuple[float, ...]
    win: frozenset[tuple[int, int, int, int]]

    def __post_init__(self) -> None:
        for name in ("nA", "nQ", "nT"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise GameError(f"{name} must be a positive integer")
        for name in ("pi1", "pi2"):
            p = tuple(float(x) for x in getattr(self, name))
            if len(p) != self.nQ:
                raise GameError(f"{name} must have length {self.nQ}")
            if any(not x > 0 for x in p):
                raise GameError(f"{name} entries must be strictly positive")
            if abs(sum(p) - 1.0) > PROB_TOL:
                raise GameError(f"{name} must sum to 1 (got {sum(p)!r})")
            object.__setattr__(self, name, p)
        win = frozenset(tuple(int(v) for v in w) for w in self.win)
        for a1, a2, q1, q2 in win:
            if not (0 <= a1 < self.nA and 0 <= a2 < self.nA and 0 <= q1 < self.nQ and 0 <= q2 < self.nQ):
                raise GameError(f"win entry {(a1, a2, q1, q2)} out of range")
        object.__setattr__(self, "win", win)

    @property
    def dim(self) -> int:
        """Local dimension ``nA * nQ * nT`` of each cSEP party."""
        return self.nA * self.nQ * self.nT

    def V(self) -> np.ndarray:
        """Rule as an array indexed ``[a1, a2, q1, q2]``."""
        out = np.zeros((self.nA, self.nA, self.nQ, self.nQ))
        for w in self.win:
            out[w] = 1.0
        return out

    def weights(self) -> np.ndarray:
        """``pi1(q1) pi2(q2) V(a1, a2, q1, q2)`` indexed ``[a1, a2, q1, q2]``."""
        return self.V() * np.asarray(self.pi1)[None, None, :, None] * np.asarray(self.pi2)[None, None, None, :]

    def to_json(self) -> dict:
        return {"num_answers": self.nA, "num_questions": self.nQ, "assist_dim": self.nT,
                "pi1": list(self.pi1), "pi2": list(self.pi2), "win": sorted(list(w) for w in self.win)}

    def with_assist_dim(self, nT: int) -> "Game":
        return Game(self.nA, self.nQ, nT, self.pi1, self.pi2, self.win)

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @classmethod
    def from_json(cls, data: Mapping) -> "Game":
        try:
            return cls(int(data["num_answers"]), int(data["num_questions"]), int(data["assist_dim"]),
                       tuple(data["pi1"]), tuple(data["pi2"]), frozenset(tuple(w) for w in data["win"]))
        except (KeyError, TypeError) as exc:
            raise GameError(f"malformed game description: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "Game":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise GameError(f"invalid JSON: {exc}") from exc
        return cls.from_json(data)


def chsh(nT: int = 2) -> Game:
    win = [(a1, a2, q1, q2) for a1, a2, q1, q2 in itertools.product(range(2), repeat=4) if a1 ^ a2 == q1 * q2]
    return Game(2, 2, nT, (0.5, 0.5), (0.5, 0.5), frozenset(win))


def rule_matrix(game: Game) -> np.ndarray:
    """Diagonal matrix of the rule over the ``(a1, a2, q1, q2)`` composite index."""
    return np.diag(game.V().reshape(-1))


def swap_operator(d: int) -> np.ndarray:
    if d < 1:
        raise ValueError("d must be positive")
    S = np.zeros((d * d, d * d))
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    S[(i * d + j).ravel(), (j * d + i).ravel()] = 1.0
    return S


# ---------------------------------------------------------------- strategies


@dataclass(frozen=True)
class Strategy:
    rho: np.ndarray
    alicePOVM: tuple[tuple[np.ndarray, ...], ...]
    bobPOVM: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho, dtype=complex)
        alice = tuple(tuple(np.asarray(E, dtype=complex) for E in fam) for fam in self.alicePOVM)
        bob = tuple(tuple(np.asarray(E, dtype=complex) for E in fam) for fam in self.bobPOVM)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "alicePOVM", alice)
        object.__setattr__(self, "bobPOVM", bob)
        nT = self.nT
        if rho.shape != (nT * nT, nT * nT):
            raise ValueError("state must be square of side nT^2")
        if not np.allclose(rho, rho.conj().T, atol=1e-10):
            raise ValueError("state is not Hermitian")
        if abs(np.trace(rho).real - 1) > 1e-9 or np.linalg.eigvalsh(rho)[0] < -1e-9:
            raise ValueError("state must be PSD with unit trace")
        for fam in alice + bob:
            total = np.zeros((nT, nT), dtype=complex)
            for E in fam:
                if E.shape != (nT, nT):
                    raise ValueError("POVM element has the wrong side")
                if not np.allclose(E, E.conj().T, atol=POVM_TOL):
                    raise ValueError("POVM element is not Hermitian")
                if np.linalg.eigvalsh(E)[0] < -POVM_TOL:
                    raise ValueError("POVM element is not PSD")
                total += E
            if np.max(np.abs(total - np.eye(nT))) > POVM_TOL:
                raise ValueError("POVM family does not sum to identity")

    @property
    def nT(self) -> int:
        return self.alicePOVM[0][0].shape[0]


def clean_povm(fam: list[np.ndarray]) -> tuple[np.ndarray, ...]:
    """Clip negative eigenvalues and restore completeness by congruence."""
    out = []
    for E in fam:
        E = (E + E.conj().T) / 2
        w, U = np.linalg.eigh(E)
        out.append((U * np.clip(w, 0, None)) @ U.conj().T)
    S = sum(out)
    w, U = np.linalg.eigh((S + S.conj().T) / 2)
    if w[0] <= 1e-12:
        # rank-deficient sum: pad with the missing part
        P = (U[:, w <= 1e-12]) @ U[:, w <= 1e-12].conj().T
        out = [E + P / len(out) for E in out]
        S = sum(out)
        w, U = np.linalg.eigh((S + S.conj().T) / 2)
    R = (U / np.sqrt(w)) @ U.conj().T
    out = [R @ E @ R for E in out]
    return tuple((E + E.conj().T) / 2 for E in out)


def evaluate_strategy(game: Game, s: Strategy) -> float:
    if s.nT != game.nT or len(s.alicePOVM) != game.nQ or len(s.bobPOVM) != game.nQ:
        raise ValueError("strategy dimensions do not match the game")
    if any(len(f) != game.nA for f in s.alicePOVM + s.bobPOVM):
        raise ValueError("POVM families must have nA elements")
    w = game.weights()
    total = 0.0
    for a1, a2, q1, q2 in zip(*np.nonzero(w)):
        op = np.kron(s.alicePOVM[q1][a1], s.bobPOVM[q2][a2])
        total += w[a1, a2, q1, q2] * np.real(np.trace(op @ s.rho))
    return float(total)


def classical_value(game: Game, cap: int = CLASSICAL_CAP) -> float:
    """Exact classical value by enumerating Alice's deterministic responses."""
    if game.nA ** game.nQ > cap:
        raise ValueError(f"nA^nQ = {game.nA ** game.nQ} exceeds the cap {cap}")
    w = game.weights()
    best = 0.0
    for f in itertools.product(range(game.nA), repeat=game.nQ):
        # score[a2, q2] given Alice's responses
        score = sum(w[f[q1], :, q1, :] for q1 in range(game.nQ))
        best = max(best, float(score.max(axis=0).sum()))
    return best


# ---------------------------------------------------------------- see-saw


def _random_povm(rng: np.random.Generator, nA: int, nT: int) -> tuple[np.ndarray, ...]:
    fam = []
    for _ in range(nA):
        G = rng.normal(size=(nT, nT)) + 1j * rng.normal(size=(nT, nT))
        fam.append(G @ G.conj().T)
    return clean_povm(fam)


def _state_step(game: Game, alice, bob) -> np.ndarray:
    w = game.weights()
    nT = game.nT
    K = np.zeros((nT * nT, nT * nT), dtype=complex)
    for a1, a2, q1, q2 in zip(*np.nonzero(w)):
        K += w[a1, a2, q1, q2] * np.kron(alice[q1][a1], bob[q2][a2])
    vals, vecs = np.linalg.eigh((K + K.conj().T) / 2)
    v = vecs[:, -1]
    return np.outer(v, v.conj())


def _alice_operators(game: Game, rho: np.ndarray, bob, q1: int) -> list[np.ndarray]:
    nT = game.nT
    w = game.weights()
    out = []
    for a1 in range(game.nA):
        M = np.zeros((nT, nT), dtype=complex)
        for a2 in range(game.nA):
            for q2 in range(game.nQ):
                if w[a1, a2, q1, q2]:
                    M += w[a1, a2, q1, q2] * ptrace(np.kron(np.eye(nT), bob[q2][a2]) @ rho, [nT, nT], [0])
        out.append(M)
    return out


def _bob_operators(game: Game, rho: np.ndarray, alice, q2: int) -> list[np.ndarray]:
    nT = game.nT
    w = game.weights()
    out = []
    for a2 in range(game.nA):
        M = np.zeros((nT, nT), dtype=complex)
        for a1 in range(game.nA):
            for q1 in range(game.nQ):
                if w[a1, a2, q1, q2]:
                    M += w[a1, a2, q1, q2] * ptrace(np.kron(alice[q1][a1], np.eye(nT)) @ rho, [nT, nT], [1])
        out.append(M)
    return out


def optimal_povm(ops: list[np.ndarray], tol: float = 1e-9) -> tuple[np.ndarray, ...]:
    """Maximize ``sum_a Re tr[E_a K_a]`` over POVMs ``E`` (solved as a real SDP)."""
    from .sdpproblem import ProblemBuilder
    from .sdpsolve import solve

    k, n = len(ops), ops[0].shape[0]
    if n == 1:
        # scalar POVM: put everything on the best outcome
        best = int(np.argmax([float(np.real(K[0, 0])) for K in ops]))
        return tuple(np.eye(1, dtype=complex) * (a == best) for a in range(k))
    sym = [(i, j) for i in range(n) for j in range(i, n)]
    anti = [(i, j) for i in range(n) for j in range(i + 1, n)]
    per = len(sym) + len(anti)
    pb = ProblemBuilder(k * per)
    for a, K in enumerate(ops):
        base = a * per
        P, Q = np.real(K), np.imag(K)
        ents = []
        for v, (i, j) in enumerate(sym):
            var = base + v
            pb.objective[var] = P[i, j] * (1 if i == j else 2)
            for off in (0, n):
                ents.append((i + off, j + off, var, 1.0))
        for v, (i, j) in enumerate(anti):
            var = base + len(sym) + v
            # E = X + iY with Y antisymmetric, Y[i, j] = y; Re tr[E K] = tr[XP] - tr[YQ]
            pb.objective[var] = -(Q[j, i] - Q[i, j])
            # real embedding [[X, -Y], [Y, X]]: entry (r, n + c) is -Y[r, c]
            ents.append((i, n + j, var, -1.0))
            ents.append((j, n + i, var, 1.0))
        pb.add_block(2 * n, ents)
    for v, (i, j) in enumerate(sym):
        pb.add_eq({a * per + v: 1.0 for a in range(k)}, 1.0 if i == j else 0.0)
    for v in range(len(anti)):
        pb.add_eq({a * per + len(sym) + v: 1.0 for a in range(k)}, 0.0)
    sol = solve(pb.build({"formulation": "povm"}), tol=tol)
    if sol.status == "infeasible":
        raise RuntimeError("POVM subproblem reported infeasible")
    fam = []
    for a in range(k):
        x = sol.x[a * per:(a + 1) * per]
        E = np.zeros((n, n), dtype=complex)
        for v, (i, j) in enumerate(sym):
            E[i, j] = E[j, i] = x[v]
        for v, (i, j) in enumerate(anti):
            E[i, j] += 1j * x[len(sym) + v]
            E[j, i] -= 1j * x[len(sym) + v]
        fam.append(E)
    return clean_povm(fam)


def _jitter(rng: np.random.Generator, ops: list[np.ndarray], scale: float) -> list[np.ndarray]:
    if scale <= 0:
        return ops
    n = ops[0].shape[0]
    out = []
    for K in ops:
        R = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        out.append(K + scale * (R + R.conj().T) / 2)
    return out


def seesaw_from(game: Game, alice, bob, iters: int, rho: np.ndarray | None = None, seed: int = 0,
                jitter: float = 1e-6) -> tuple[Strategy, float, list[float]]:
    """Alternate state, Alice and Bob updates and return the best strategy seen.

    Best responses are computed for operators perturbed by ``jitter`` times a
    seeded random Hermitian matrix. Exact ties then resolve to extreme POVMs
    instead of the centre of the tie set, which would be a saddle point.
    """
    if iters < 1:
        raise ValueError("iters must be at least 1")
    rng = np.random.default_rng(seed)
    alice = [tuple(f) for f in alice]
    bob = [tuple(f) for f in bob]
    if rho is None:
        rho = _state_step(game, alice, bob)
    best = Strategy(rho, tuple(alice), tuple(bob))
    best_val = evaluate_strategy(game, best)
    trace = [best_val]
    for _ in range(iters):
        rho = _state_step(game, alice, bob)
        alice = [optimal_povm(_jitter(rng, _alice_operators(game, rho, bob, q), jitter)) for q in range(game.nQ)]
        bob = [optimal_povm(_jitter(rng, _bob_operators(game, rho, alice, q), jitter)) for q in range(game.nQ)]
        rho = _state_step(game, alice, bob)
        cand = Strategy(rho, tuple(alice), tuple(bob))
        val = evaluate_strategy(game, cand)
        if val > best_val:
            best, best_val = cand, val
        trace.append(best_val)
        if len(trace) > 4 and trace[-1] - trace[-5] < 1e-12:
            break
    return best, best_val, trace


def seesaw_optimize(game: Game, seed: int = 0, iters: int = 50, restarts: int = 4) -> tuple[Strategy, float]:
    """Best of ``restarts`` see-saw runs from random starts drawn from ``seed``.

    Single runs can stall at deterministic fixed points, so several starts are
    tried; each run is monotone on its own.
    """
    best, best_val = None, -1.0
    for child in np.random.SeedSequence(seed).spawn(max(1, restarts)):
        rng = np.random.default_rng(child)
        alice = [_random_povm(rng, game.nA, game.nT) for _ in range(game.nQ)]
        bob = [_random_povm(rng, game.nA, game.nT) for _ in range(game.nQ)]
        s, v, _ = seesaw_from(game, alice, bob, iters, seed=int(rng.integers(2**31)))
        if v > best_val + 1e-12:
            best, best_val = s, v
    return best, best_val
