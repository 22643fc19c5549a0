"""Random instances shared by several test modules."""

from __future__ import annotations

import numpy as np

from freegame.gamecore import Strategy, clean_povm


def random_povm(rng, k, d):
    fam = []
    for _ in range(k):
        G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        fam.append(G @ G.conj().T)
    return clean_povm(fam)


def random_state(rng, d, rank=None):
    rank = d if rank is None else rank
    G = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_strategy(rng, nA, nQ, nT, schmidt=None):
    """Pure shared state with Schmidt rank ``schmidt`` (full by default)."""
    k = nT if schmidt is None else schmidt
    U = np.linalg.qr(rng.normal(size=(nT, nT)) + 1j * rng.normal(size=(nT, nT)))[0]
    V = np.linalg.qr(rng.normal(size=(nT, nT)) + 1j * rng.normal(size=(nT, nT)))[0]
    c = rng.random(k) + 0.1
    c /= np.linalg.norm(c)
    psi = sum(c[i] * np.kron(U[:, i], V[:, i]) for i in range(k))
    alice = tuple(random_povm(rng, nA, nT) for _ in range(nQ))
    bob = tuple(random_povm(rng, nA, nT) for _ in range(nQ))
    return Strategy(np.outer(psi, psi.conj()), alice, bob)


def tsirelson_strategy():
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    Z = np.diag([1.0, -1.0])
    X = np.array([[0.0, 1.0], [1.0, 0.0]])

    def proj(O):
        return ((np.eye(2) + O) / 2, (np.eye(2) - O) / 2)

    r = 1 / np.sqrt(2)
    return Strategy(np.outer(phi, phi), (proj(Z), proj(X)), (proj(r * (Z + X)), proj(r * (Z - X))))
