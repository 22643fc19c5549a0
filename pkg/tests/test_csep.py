import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freegame.csep import (Assemblage, CSepProblem, LinearMarginalConstraint, assemblage_from_strategy, bob_state,
                           game_to_csep, purify_pretty_good, steering_value, strategy_from_assemblage,
                           synthetic_csep)
from freegame.gamecore import Game, chsh, evaluate_strategy, swap_operator
from freegame.invbasis import ptrace

from .helpers import random_state, random_strategy, tsirelson_strategy

TSIRELSON = (2 + np.sqrt(2)) / 4
TRACE_OUT = LinearMarginalConstraint.KINDS[0]


def test_chsh_dimensions():
    c = game_to_csep(chsh())
    assert c.dimA == c.dimB == 8
    assert c.objective.shape == (64, 64)
    assert c.scale == 2


def test_trivial_assist_dimension():
    g = chsh(1)
    c = game_to_csep(g)
    assert c.scale == 1
    # reorder the (a1 q1)(a2 q2) cut into (a1 a2 q1 q2) and compare with V
    G = c.objective.reshape(2, 2, 2, 2, 2, 2, 2, 2)
    diag = np.einsum("abcdabcd->abcd", G)
    assert np.array_equal(diag.transpose(0, 2, 1, 3), g.V())
    assert np.count_nonzero(c.objective) == len(g.win)


def test_tsirelson_point_objective():
    g = chsh()
    s = tsirelson_strategy()
    assert evaluate_strategy(g, s) == pytest.approx(TSIRELSON, abs=1e-12)
    asm = assemblage_from_strategy(s)
    assert steering_value(g, asm, s.bobPOVM) == pytest.approx(TSIRELSON, abs=1e-10)
    c = game_to_csep(g)
    rhoA, rhoB = asm.state(g.pi1), bob_state(g, s.bobPOVM)
    assert c.residual_A(rhoA) < 1e-12 and c.residual_B(rhoB) < 1e-12


def test_maximally_entangled_assemblage():
    s = tsirelson_strategy()
    asm = assemblage_from_strategy(s)
    for a in range(2):
        unit = np.zeros((2, 2))
        unit[a, a] = 0.5
        assert np.allclose(asm.operators[(a, 0)], unit, atol=1e-15)


def test_product_state_is_unsteerable():
    rng = np.random.default_rng(0)
    rt, rh = random_state(rng, 3), random_state(rng, 3)
    s = random_strategy(rng, 2, 2, 3)
    s = type(s)(np.kron(rt, rh), s.alicePOVM, s.bobPOVM)
    asm = assemblage_from_strategy(s)
    for (a, q), op in asm.operators.items():
        p = np.trace(s.alicePOVM[q][a] @ rt).real
        assert np.allclose(op, p * rh, atol=1e-12)


def test_pretty_good_measurement_examples():
    alpha = {(a, q): np.diag([1.0 - a, float(a)]) / 2 for a in range(2) for q in range(2)}
    s = strategy_from_assemblage(Assemblage(alpha), [(np.eye(2), np.zeros((2, 2)))] * 2)
    for (a, q), _ in alpha.items():
        want = np.zeros((2, 2))
        want[a, a] = 1
        assert np.allclose(s.alicePOVM[q][a], want, atol=1e-12)
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(s.rho, np.outer(phi, phi), atol=1e-12)


def test_pure_marginal_gives_scalar_measurements():
    sigma = np.diag([1.0, 0.0, 0.0])
    p = {(0, 0): 0.3, (1, 0): 0.7, (0, 1): 1.0, (1, 1): 0.0}
    asm = Assemblage({k: v * sigma for k, v in p.items()})
    s = strategy_from_assemblage(asm, [(np.eye(3), np.zeros((3, 3)))] * 2)
    Pi = sigma
    for (a, q), v in p.items():
        F = s.alicePOVM[q][a]
        assert np.allclose(Pi @ F @ Pi, v * Pi, atol=1e-12)
    back = assemblage_from_strategy(s)
    for k in p:
        assert np.allclose(back.operators[k], asm.operators[k], atol=1e-12)


def test_purification_examples():
    assert np.allclose(purify_pretty_good(np.eye(2) / 2), np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert np.allclose(purify_pretty_good(np.diag([1.0, 0.0])), [1, 0, 0, 0])
    with pytest.raises(ValueError):
        purify_pretty_good(np.diag([1.1, -0.1]))
    with pytest.raises(ValueError):
        purify_pretty_good(np.eye(2))


@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_purification_roundtrip(d, seed):
    rng = np.random.default_rng(seed)
    rho = random_state(rng, d, rank=int(rng.integers(1, d + 1)))
    psi = purify_pretty_good(rho)
    assert np.linalg.norm(psi) == pytest.approx(1, abs=1e-12)
    assert np.allclose(ptrace(np.outer(psi, psi.conj()), [d, d], [0]), rho, atol=1e-12)


@given(st.integers(1, 4), st.integers(2, 3), st.integers(1, 3), st.integers(0, 2 ** 32 - 1), st.data())
@settings(max_examples=40, deadline=None)
def test_assemblage_roundtrip(nT, nA, nQ, seed, data):
    rng = np.random.default_rng(seed)
    schmidt = data.draw(st.integers(1, nT))
    s = random_strategy(rng, nA, nQ, nT, schmidt)
    asm = assemblage_from_strategy(s)
    back = assemblage_from_strategy(strategy_from_assemblage(asm, s.bobPOVM))
    for k, v in asm.operators.items():
        assert np.max(np.abs(back.operators[k] - v)) <= 1e-9


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20, deadline=None)
def test_formulations_agree(seed):
    rng = np.random.default_rng(seed)
    nA, nQ, nT = 2, 3, 2
    pi = rng.random(nQ) + 0.1
    pi = tuple(pi / pi.sum())
    win = frozenset(w for w in np.ndindex(nA, nA, nQ, nQ) if rng.random() < 0.5)
    g = Game(nA, nQ, nT, pi, pi[::-1], win)
    s = random_strategy(rng, nA, nQ, nT)
    asm = assemblage_from_strategy(s)
    assert steering_value(g, asm, s.bobPOVM) == pytest.approx(evaluate_strategy(g, s), abs=1e-10)


def test_transpose_and_swap_tricks():
    rng = np.random.default_rng(4)
    d = 3
    Psi = np.eye(d).reshape(-1)
    M = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert np.max(np.abs(np.kron(M, np.eye(d)) @ Psi - np.kron(np.eye(d), M.T) @ Psi)) <= 1e-12
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Y = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert abs(np.trace(swap_operator(d) @ np.kron(X, Y)) - np.trace(X @ Y)) <= 1e-12


def test_constraint_validation():
    with pytest.raises(ValueError):
        LinearMarginalConstraint("bogus", (1, 2, 1), 0, np.eye(2) / 2)
    with pytest.raises(ValueError):
        LinearMarginalConstraint(TRACE_OUT, (1, 2, 1), 0, np.eye(2))
    with pytest.raises(ValueError):
        LinearMarginalConstraint(TRACE_OUT, (1, 2, 1), 1, np.eye(2) / 2)
    with pytest.raises(ValueError):
        CSepProblem(2, 2, np.ones((3, 3)))
    with pytest.raises(ValueError):
        synthetic_csep("bogus")


def test_signalling_assemblage_rejected():
    with pytest.raises(ValueError):
        Assemblage({(0, 0): np.diag([1.0, 0]), (1, 0): np.zeros((2, 2)),
                    (0, 1): np.zeros((2, 2)), (1, 1): np.diag([0, 1.0])})
