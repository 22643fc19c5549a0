"""Constrained separability problems, the steering reformulation of games,
assemblages and pretty-good constructions.

A game becomes a cSEP instance on ``A = A1 Q1 T~`` and ``B = A2 Q2 T^``:
maximize ``scale * tr[G (rho_A (x) rho_B)]`` over product states with

* ``rho_A = sum pi1(q1) |a1 q1><a1 q1| (x) alpha(a1|q1)``,
* ``rho_B = sum pi2(q2) |a2 q2><a2 q2| (x) D(a2|q2) / nT``,

``G = V (x) S`` and ``scale = nT``. The stored :class:`Assemblage` holds the
conditional operators ``alpha(a1|q1)`` without the ``pi1`` weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .gamecore import Game, Strategy, clean_povm, swap_operator
from .invbasis import ptrace

EIG_TOL = 1e-12


@dataclass(frozen=True)
class LinearMarginalConstraint:
    """``tr_L X = F (x) tr_{LM} X`` on a marginal split as ``L (x) M (x) R``.

    ``factorDims = (L, M, R)`` and ``tracedFactor = 0``. The ``fixed-point-identity``
    kind carries no restriction and exists for completeness of the model.
    """

    kind: str
    factorDims: tuple[int, int, int]
    tracedFactor: int
    fixedOperator: np.ndarray

    KINDS = ("trace-out-factor-equals-fixed-tensor-rest", "fixed-point-identity")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unsupported constraint kind {self.kind!r}")
        dims = tuple(int(x) for x in self.factorDims)
        if len(dims) != 3 or min(dims) < 1:
            raise ValueError("factorDims must be three positive dimensions (L, M, R)")
        if self.tracedFactor != 0:
            raise ValueError("only the leading factor can be traced")
        F = np.asarray(self.fixedOperator)
        if F.shape != (dims[1], dims[1]) or not np.allclose(F, F.conj().T, atol=1e-12):
            raise ValueError("fixedOperator must be Hermitian on the middle factor")
        if self.kind == self.KINDS[0]:
            if abs(np.trace(F).real - 1) > 1e-9 or np.linalg.eigvalsh(F)[0] < -1e-12:
                raise ValueError("fixedOperator must be PSD with unit trace")
        object.__setattr__(self, "factorDims", dims)
        object.__setattr__(self, "fixedOperator", F)

    @property
    def dim(self) -> int:
        L, M, R = self.factorDims
        return L * M * R

    def residual(self, X: np.ndarray) -> float:
        """Largest entry of ``tr_L X - F (x) tr_{LM} X``."""
        if self.kind == self.KINDS[1]:
            return 0.0
        L, M, R = self.factorDims
        lhs = ptrace(X, [L, M, R], [1, 2])
        rhs = np.kron(self.fixedOperator, ptrace(X, [L, M, R], [2]))
        return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class CSepProblem:
    """``max scale * tr[G rho]`` over constrained separable ``rho`` on ``A (x) B``.

    ``classicalA``/``classicalB`` give the dimension of a leading classical
    register on each side: ``G`` and all constraints are block diagonal there,
    so solvers may restrict to block-diagonal variables.
    """

    dimA: int
    dimB: int
    objective: np.ndarray
    scale: float = 1.0
    aliceConstraints: tuple[LinearMarginalConstraint, ...] = ()
    bobConstraints: tuple[LinearMarginalConstraint, ...] = ()
    classicalA: int = 1
    classicalB: int = 1
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self) -> None:
        G = np.asarray(self.objective, dtype=float)
        n = self.dimA * self.dimB
        if G.shape != (n, n):
            raise ValueError("objective must have side dimA * dimB")
        if not np.all(np.isfinite(G)) or not np.allclose(G, G.T, atol=1e-12):
            raise ValueError("objective must be a finite symmetric matrix")
        for c in self.aliceConstraints:
            if c.dim != self.dimA:
                raise ValueError("Alice constraint does not factor dimA")
        for c in self.bobConstraints:
            if c.dim != self.dimB:
                raise ValueError("Bob constraint does not factor dimB")
        if self.dimA % self.classicalA or self.dimB % self.classicalB:
            raise ValueError("classical registers must divide the local dimensions")
        object.__setattr__(self, "objective", G)
        object.__setattr__(self, "aliceConstraints", tuple(self.aliceConstraints))
        object.__setattr__(self, "bobConstraints", tuple(self.bobConstraints))
        object.__setattr__(self, "metadata", dict(self.metadata))

    def value(self, rhoA: np.ndarray, rhoB: np.ndarray) -> float:
        return float(self.scale * np.real(np.trace(self.objective @ np.kron(rhoA, rhoB))))

    def value_joint(self, rhoAB: np.ndarray) -> float:
        return float(self.scale * np.real(np.trace(self.objective @ rhoAB)))

    def residual_A(self, X: np.ndarray) -> float:
        return max((c.residual(X) for c in self.aliceConstraints), default=0.0)

    def residual_B(self, X: np.ndarray) -> float:
        return max((c.residual(X) for c in self.bobConstraints), default=0.0)


def game_to_csep(game: Game) -> CSepProblem:
    nA, nQ, nT = game.nA, game.nQ, game.nT
    V = game.V()
    S = swap_operator(nT).reshape(nT, nT, nT, nT)  # [t, th, t', th']
    d = nA * nQ * nT
    G = np.zeros((nA, nQ, nT, nA, nQ, nT, nA, nQ, nT, nA, nQ, nT))
    for a1, a2, q1, q2 in game.win:
        G[a1, q1, :, a2, q2, :, a1, q1, :, a2, q2, :] = S
    G = G.reshape(d * d, d * d)
    alice = LinearMarginalConstraint(LinearMarginalConstraint.KINDS[0], (nA, nQ, nT), 0, np.diag(game.pi1))
    bob = LinearMarginalConstraint(LinearMarginalConstraint.KINDS[0], (nA, nQ * nT, 1), 0,
                                   np.kron(np.diag(game.pi2), np.eye(nT) / nT))
    return CSepProblem(d, d, G, float(nT), (alice,), (bob,), nA * nQ, nA * nQ,
                       {"source": "game", "game": game.digest()})


def synthetic_csep(kind: str, dA: int = 2, dB: int = 2) -> CSepProblem:
    """Normalization-only instances: ``G`` is the swap or the antisymmetric projector."""
    if dA != dB:
        raise ValueError("synthetic instances need dA == dB")
    S = swap_operator(dA)
    if kind == "swap":
        G = S
    elif kind == "antisymmetric":
        G = (np.eye(dA * dB) - S) / 2
    else:
        raise ValueError(f"unknown synthetic instance {kind!r}")
    return CSepProblem(dA, dB, G, metadata={"source": kind})


# ---------------------------------------------------------------- assemblages


@dataclass(frozen=True)
class Assemblage:
    """Conditional steered operators ``alpha(a1|q1)`` keyed ``(a1, q1)``."""

    operators: Mapping[tuple[int, int], np.ndarray]
    tol: float = 1e-9

    def __post_init__(self) -> None:
        ops = {k: np.asarray(v, dtype=complex) for k, v in dict(self.operators).items()}
        object.__setattr__(self, "operators", ops)
        nA, nQ = self.shape
        if set(ops) != {(a, q) for a in range(nA) for q in range(nQ)}:
            raise ValueError("assemblage must define every (a1, q1)")
        for v in ops.values():
            if np.linalg.eigvalsh((v + v.conj().T) / 2)[0] < -1e-10:
                raise ValueError("assemblage element is not PSD")
        sig = self.sigma
        for q in range(nQ):
            s_q = sum(ops[(a, q)] for a in range(nA))
            if np.max(np.abs(s_q - sig)) > self.tol:
                raise ValueError("marginal depends on the question (signalling)")
        if abs(np.trace(sig).real - 1) > self.tol:
            raise ValueError("assemblage marginal must have unit trace")

    @property
    def shape(self) -> tuple[int, int]:
        keys = self.operators.keys()
        return max(k[0] for k in keys) + 1, max(k[1] for k in keys) + 1

    @property
    def nT(self) -> int:
        return next(iter(self.operators.values())).shape[0]

    @property
    def sigma(self) -> np.ndarray:
        nA, _ = self.shape
        return sum(self.operators[(a, 0)] for a in range(nA))

    def state(self, pi1) -> np.ndarray:
        """``rho_A = sum pi1(q1) |a1 q1><a1 q1| (x) alpha(a1|q1)``."""
        nA, nQ = self.shape
        nT = self.nT
        out = np.zeros((nA * nQ * nT,) * 2, dtype=complex)
        for (a, q), v in self.operators.items():
            k = (a * nQ + q) * nT
            out[k:k + nT, k:k + nT] = pi1[q] * v
        return out


def bob_state(game: Game, bobPOVM) -> np.ndarray:
    """``rho_B = sum pi2(q2) |a2 q2><a2 q2| (x) D(a2|q2) / nT``."""
    nA, nQ, nT = game.nA, game.nQ, game.nT
    out = np.zeros((nA * nQ * nT,) * 2, dtype=complex)
    for q in range(nQ):
        for a in range(nA):
            k = (a * nQ + q) * nT
            out[k:k + nT, k:k + nT] = game.pi2[q] * bobPOVM[q][a] / nT
    return out


def assemblage_from_strategy(s: Strategy) -> Assemblage:
    nT = s.nT
    ops = {}
    for q, fam in enumerate(s.alicePOVM):
        for a, E in enumerate(fam):
            ops[(a, q)] = ptrace(np.kron(E, np.eye(nT)) @ s.rho, [nT, nT], [1])
    return Assemblage(ops)


def steering_value(game: Game, asm: Assemblage, bobPOVM) -> float:
    """cSEP objective of the pair induced by an assemblage and Bob's POVMs."""
    c = game_to_csep(game)
    return c.value(asm.state(game.pi1), bob_state(game, bobPOVM))


def _support_eig(sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    w, U = np.linalg.eigh((sigma + sigma.conj().T) / 2)
    if w[0] < -1e-9:
        raise ValueError("matrix has a negative eigenvalue")
    w = np.clip(w, 0, None)
    return w, U, w > EIG_TOL


def purify_pretty_good(rho: np.ndarray, basis: np.ndarray | None = None) -> np.ndarray:
    """``(sqrt(rho) (x) I) sum_i |e_i e_i>``; the computational basis by default."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    if abs(np.trace(rho).real - 1) > 1e-9:
        raise ValueError("state must have unit trace")
    w, U, _ = _support_eig(rho)
    root = (U * np.sqrt(w)) @ U.conj().T
    E = np.eye(d) if basis is None else np.asarray(basis)
    psi = sum(np.kron(root @ E[:, i], E[:, i]) for i in range(d))
    return psi / np.linalg.norm(psi)


def strategy_from_assemblage(asm: Assemblage, bobPOVM) -> Strategy:
    """Pretty-good measurements on the purification of the assemblage marginal.

    With ``sigma = sum lam_i e_i e_i^*`` the state is ``sum sqrt(lam_i) e_i (x) e_i``
    and ``F(a|q)`` is the transpose, in that eigenbasis, of
    ``sigma^{-1/2} alpha(a|q) sigma^{-1/2}`` on the support; off the support each
    element receives ``(I - Pi)/nA``.
    """
    nA, nQ = asm.shape
    nT = asm.nT
    w, U, supp = _support_eig(asm.sigma)
    psi = purify_pretty_good(asm.sigma, basis=U)
    inv_root = np.where(supp, 1.0 / np.sqrt(np.where(supp, w, 1.0)), 0.0)
    Pi = U[:, supp] @ U[:, supp].conj().T
    fams = []
    for q in range(nQ):
        fam = []
        for a in range(nA):
            M = (U.conj().T @ asm.operators[(a, q)] @ U) * np.outer(inv_root, inv_root)
            F = U @ M.T @ U.conj().T
            fam.append(F + (np.eye(nT) - Pi) / nA)
        fams.append(clean_povm(fam))
    return Strategy(np.outer(psi, psi.conj()), tuple(fams), tuple(tuple(f) for f in bobPOVM))
