"""Extendibility hierarchies for constrained separability and free games.

Four builders produce :class:`SDPProblem` instances over real symmetric
matrices:

* ``build_dense_sdp``: one PSD variable on ``A (x) B^n`` (test oracle);
* ``build_sym_reduced_sdp``: coefficients over the orbit basis ``|i><j| (x) A_D``
  with one PSD block per partition;
* ``build_bose_sdp``: one PSD variable on ``A (x) (B Bbar)^n`` restricted to the
  symmetric subspace (test oracle);
* ``build_bose_reduced_sdp``: coefficients over ``|i><j| (x) C_{t,t'}``.

The reduced builders restrict leading classical registers to block-diagonal
form (``classicalA``/``classicalB`` of the instance); this loses nothing
because the objective and every constraint commute with that pinching.
Constraint families are imposed in coefficient space, where the basis is
linearly independent, so one row per basis coefficient suffices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import symcomb as sc
from .blockreduce import g_coefficients
from .csep import CSepProblem, LinearMarginalConstraint, game_to_csep
from .gamecore import Game
from .invbasis import branch_full, branch_subfactor, orbit_labels, ptrace_tail_bose, ptrace_tail_full
from .sdpproblem import ProblemBuilder, SDPProblem, triu_pack

__all__ = [
    "SDPProblem", "BuilderCapExceeded", "GapCertificate", "build_dense_sdp", "build_dense_csep_sdp",
    "build_sym_reduced_sdp", "build_sym_reduced_csep_sdp", "build_bose_sdp", "build_bose_reduced_sdp",
    "definetti_gap", "level_for_epsilon", "distortion", "dense_extension", "rebuild",
]

DENSE_SIDE_CAP = 256
VAR_CAP = 20000
TRACE_OUT = LinearMarginalConstraint.KINDS[0]


class BuilderCapExceeded(ValueError):
    pass


def _active(constraints: Iterable[LinearMarginalConstraint]) -> list[LinearMarginalConstraint]:
    return [c for c in constraints if c.kind == TRACE_OUT]


# ---------------------------------------------------------------- dense builders


def _dense_marginal_rows(pb: ProblemBuilder, vmap: np.ndarray, N: int, shape: tuple[int, ...], traced: list[int],
                         m_axis: int, kept: list[int], F: np.ndarray) -> None:
    """Rows of ``tr_T X = F_M (x) tr_{TM} X`` for the full variable of side ``N``."""
    idx = np.arange(N).reshape(shape)
    dT = int(np.prod([shape[a] for a in traced]))
    dM = shape[m_axis]
    dK = int(np.prod([shape[a] for a in kept])) if kept else 1
    arr = idx.transpose(traced + [m_axis] + kept).reshape(dT, dM, dK)
    F = np.real(F)
    for a in range(dM * dK):
        m, k = divmod(a, dK)
        for b in range(a, dM * dK):
            mp, kp = divmod(b, dK)
            row: dict[int, float] = {}
            for v in vmap[triu_pack(arr[:, m, k], arr[:, mp, kp], N)]:
                if v >= 0:
                    row[int(v)] = row.get(int(v), 0.0) + 1.0
            f = F[m, mp]
            if f != 0:
                for v in vmap[triu_pack(arr[:, :, k].ravel(), arr[:, :, kp].ravel(), N)]:
                    if v >= 0:
                        row[int(v)] = row.get(int(v), 0.0) - f
            pb.add_eq(row, 0.0, tol=1e-15)


def _copy_swap_perm(dA: int, dc: int, n: int, k: int) -> np.ndarray:
    """Index map exchanging copies ``k`` and ``k + 1`` of ``A (x) C^n``."""
    shape = (dA,) + (dc,) * n
    idx = np.arange(dA * dc ** n).reshape(shape)
    axes = list(range(n + 1))
    axes[k + 1], axes[k + 2] = axes[k + 2], axes[k + 1]
    return idx.transpose(axes).reshape(-1)


def _class_labels(csep: CSepProblem, n: int, dc: int, bose: bool) -> np.ndarray:
    """Classical-register label of every basis index of ``A (x) C^n``."""
    dA = csep.dimA
    digits = np.indices((dA,) + (dc,) * n).reshape(n + 1, -1)
    label = digits[0] // (dA // csep.classicalA)
    if not bose:
        blk = csep.dimB // csep.classicalB
        for k in range(n):
            label = label * csep.classicalB + digits[k + 1] // blk
    return label


def _dense_common(csep: CSepProblem, n: int, bose: bool, cap: int, pinch: bool) -> tuple[ProblemBuilder, int]:
    dA, dB = csep.dimA, csep.dimB
    dc = dB * dB if bose else dB
    N = dA * dc ** n
    if N > cap:
        raise BuilderCapExceeded(f"dense variable side {N} exceeds the cap {cap}; use a reduced builder")
    I, J = np.triu_indices(N)
    if pinch:
        lab = _class_labels(csep, n, dc, bose)
        ok = lab[I] == lab[J]
    else:
        ok = np.ones(I.size, dtype=bool)
    vmap = np.where(ok, np.cumsum(ok) - 1, -1)
    nv = int(ok.sum())
    pb = ProblemBuilder(nv)
    pb.add_block_arrays(N, np.flatnonzero(ok), vmap[ok], np.ones(nv))
    pb.add_eq({int(v): 1.0 for v in vmap[triu_pack(np.arange(N), np.arange(N), N)]}, 1.0)
    # symmetry generators
    seen = set()
    a = vmap[triu_pack(I, J, N)]
    for k in range(n - 1):
        perm = _copy_swap_perm(dA, dc, n, k)
        if bose:
            images = [vmap[triu_pack(perm[I], J, N)], vmap[triu_pack(I, perm[J], N)]]
        else:
            images = [vmap[triu_pack(perm[I], perm[J], N)]]
        for b in images:
            sel = (a != b) & (a >= 0) & (b >= 0)
            for u, v in zip(a[sel], b[sel]):
                key = (min(u, v), max(u, v))
                if key not in seen:
                    seen.add(key)
                    pb.add_eq({int(u): 1.0, int(v): -1.0}, 0.0)
    # Alice constraints, all copies kept
    for c in _active(csep.aliceConstraints):
        L, M, R = c.factorDims
        _dense_marginal_rows(pb, vmap, N, (L, M, R, dc ** n), [0], 1, [2, 3], c.fixedOperator)
    # Bob constraints on one copy
    for c in _active(csep.bobConstraints):
        L, M, R = c.factorDims
        if bose:
            pre = dA * dc ** (n - 1)
            _dense_marginal_rows(pb, vmap, N, (pre, L, M, R, dB), [1, 4], 2, [0, 3], c.fixedOperator)
        else:
            _dense_marginal_rows(pb, vmap, N, (dA, L, M, R, dc ** (n - 1)), [1], 2, [0, 3, 4], c.fixedOperator)
    # objective on A (x) B_1, identity elsewhere
    dO = dA * dB
    arr = np.arange(N).reshape(dO, N // dO)
    G = csep.objective
    for o, op in zip(*np.nonzero(G)):
        vals = vmap[triu_pack(arr[o], arr[op], N)]
        np.add.at(pb.objective, vals[vals >= 0], csep.scale * G[o, op])
    return pb, N


def build_dense_csep_sdp(csep: CSepProblem, n: int, cap: int = DENSE_SIDE_CAP, pinch: bool = False) -> SDPProblem:
    """``pinch`` drops entries that mix classical labels (then the cap may be raised)."""
    if n < 1:
        raise ValueError("level must be at least 1")
    pb, N = _dense_common(csep, n, False, cap, pinch)
    return pb.build({"formulation": "dense", "level": n, "side": N, "pinch": pinch, "source": _source(csep)})


def build_dense_sdp(game: Game, n: int, cap: int = DENSE_SIDE_CAP, pinch: bool = False) -> SDPProblem:
    """Level-``n`` extendibility relaxation of ``game`` with one dense PSD variable."""
    return build_dense_csep_sdp(game_to_csep(game), n, cap, pinch)


def build_bose_sdp(csep: CSepProblem, n: int, cap: int = DENSE_SIDE_CAP, pinch: bool = False) -> SDPProblem:
    """Bose-symmetric relaxation on ``A (x) (B Bbar)^n`` with one dense PSD variable."""
    if n < 1:
        raise ValueError("level must be at least 1")
    pb, N = _dense_common(csep, n, True, cap, pinch)
    return pb.build({"formulation": "bose", "level": n, "side": N, "pinch": pinch, "source": _source(csep)})


def _source(csep: CSepProblem) -> str:
    import hashlib

    h = hashlib.sha256(csep.objective.tobytes())
    h.update(np.float64(csep.scale).tobytes())
    for c in csep.aliceConstraints + csep.bobConstraints:
        h.update(str(c.factorDims).encode())
        h.update(np.ascontiguousarray(np.real(c.fixedOperator)).tobytes())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------- coefficient variables


class _Coefficients:
    """Variables ``x_{i,j,key}`` identified with ``x_{j,i,key^T}`` (real symmetry)."""

    def __init__(self, dA: int, classA: int, keys: list, transpose):
        self.transpose = transpose
        self.index: dict = {}
        self.members: list[list] = []
        blk = dA // classA
        for i in range(dA):
            for j in range(dA):
                if i // blk != j // blk:
                    continue
                for k in keys:
                    a = (i, j, k)
                    b = (j, i, transpose(k))
                    if a in self.index or b in self.index:
                        continue
                    v = len(self.members)
                    self.index[a] = v
                    self.index[b] = v
                    self.members.append([a] if a == b else [a, b])

    def __len__(self) -> int:
        return len(self.members)

    def get(self, i, j, k):
        return self.index.get((i, j, k))

    def all_members(self):
        for v, mem in enumerate(self.members):
            for m in mem:
                yield v, m


def _coefficient_rows(pb: ProblemBuilder, lhs: dict, trace: dict, F: np.ndarray, M: int, R: int,
                      prefix_keys: Iterable) -> None:
    """Emit ``lhs[p, u, u'] - F[m, m'] * trace[p, r, r'] = 0`` with ``u = m*R + r``."""
    F = np.real(F)
    emitted = set()
    for p in prefix_keys:
        for u in range(M * R):
            m, r = divmod(u, R)
            for up in range(M * R):
                mp, rp = divmod(up, R)
                row = dict(lhs.get((p, u, up), {}))
                f = F[m, mp]
                if f != 0:
                    for v, c in trace.get((p, r, rp), {}).items():
                        row[v] = row.get(v, 0.0) - f * c
                row = {v: c for v, c in row.items() if abs(c) > 1e-15}
                if not row:
                    continue
                key = tuple(sorted(row.items()))
                if key in emitted:
                    continue
                emitted.add(key)
                pb.add_eq(row, 0.0)


def _acc(store: dict, key, var: int, coef: float) -> None:
    row = store.setdefault(key, {})
    row[var] = row.get(var, 0.0) + coef


def _alice_rows(pb: ProblemBuilder, X: _Coefficients, c: LinearMarginalConstraint) -> None:
    L, M, R = c.factorDims
    lhs: dict = {}
    tr: dict = {}
    for v, (i, j, k) in X.all_members():
        li, ui = divmod(i, M * R)
        lj, uj = divmod(j, M * R)
        if li != lj:
            continue
        _acc(lhs, (k, ui, uj), v, 1.0)
        mi, ri = divmod(ui, R)
        mj, rj = divmod(uj, R)
        if mi == mj:
            _acc(tr, (k, ri, rj), v, 1.0)
    prefixes = sorted({key[0] for key in lhs} | {key[0] for key in tr}, key=repr)
    _coefficient_rows(pb, lhs, tr, c.fixedOperator, M, R, prefixes)


def _check_vars(count: int, cap: int) -> None:
    if count > cap:
        raise BuilderCapExceeded(f"{count} coefficient variables exceed the cap {cap}")


# ---------------------------------------------------------------- orbit-basis builder


def _allowed(D, blk: int) -> bool:
    return all(D[w][z] == 0 or w // blk == z // blk for w in range(len(D)) for z in range(len(D)))


def build_sym_reduced_csep_sdp(csep: CSepProblem, n: int, var_cap: int = VAR_CAP) -> SDPProblem:
    if n < 1:
        raise ValueError("level must be at least 1")
    dA, d = csep.dimA, csep.dimB
    blkB = d // csep.classicalB
    cells = csep.classicalB * blkB * blkB
    _check_vars(math.comb(n + cells - 1, cells - 1) * dA * dA // csep.classicalA // 2, var_cap)
    keys = [D for D in sc.orbit_representatives(n, d) if _allowed(D, blkB)]
    X = _Coefficients(dA, csep.classicalA, keys, sc.transpose)
    _check_vars(len(X), var_cap)
    pb = ProblemBuilder(len(X))
    # PSD blocks, one per partition
    block_sides = {}
    for lam in sc.partitions(n, d):
        tabs = sc.semistandard_tableaux(lam, d)
        m = len(tabs)
        side = dA * m
        block_sides[str(lam.parts)] = side
        ents: dict[tuple[int, int, int], float] = {}
        for a, tau in enumerate(tabs):
            for b, gam in enumerate(tabs):
                g = [(D, c) for D, c in g_coefficients(tau, gam, d).items() if _allowed(D, blkB)]
                if not g:
                    continue
                for i in range(dA):
                    p = i * m + a
                    for j in range(dA):
                        q = j * m + b
                        if p > q:
                            continue
                        for D, c in g:
                            v = X.get(i, j, D)
                            if v is not None:
                                ents[(p, q, v)] = ents.get((p, q, v), 0.0) + c
        pb.add_block(side, [(p, q, v, c) for (p, q, v), c in ents.items() if c != 0])
    # unit trace
    tr: dict[int, float] = {}
    for v, (i, j, D) in X.all_members():
        if i == j and sc.is_diagonal(D):
            tr[v] = tr.get(v, 0.0) + sc.orbit_size(D)
    pb.add_eq(tr, 1.0)
    for c in _active(csep.aliceConstraints):
        _alice_rows(pb, X, c)
    # Bob constraints: trace the leading factor of copy n
    for c in _active(csep.bobConstraints):
        L, M, R = c.factorDims
        lhs: dict = {}
        trc: dict = {}
        for v, (i, j, D) in X.all_members():
            for Dp, (u, up), mult in branch_full(D, L, M * R):
                _acc(lhs, ((i, j, Dp), u, up), v, mult)
                mu, ru = divmod(u, R)
                mup, rup = divmod(up, R)
                if mu == mup:
                    _acc(trc, ((i, j, Dp), ru, rup), v, mult)
        prefixes = sorted({k[0] for k in lhs} | {k[0] for k in trc}, key=repr)
        _coefficient_rows(pb, lhs, trc, c.fixedOperator, M, R, prefixes)
    # objective on A (x) B_1
    G = csep.objective
    for v, (i, j, D) in X.all_members():
        for coef, (w, z) in ptrace_tail_full(D):
            g = G[i * d + w, j * d + z]
            if g:
                pb.objective[v] += csep.scale * coef * g
    return pb.build({"formulation": "sym", "level": n, "blocks": block_sides, "source": _source(csep)})


def build_sym_reduced_sdp(game: Game, n: int, var_cap: int = VAR_CAP) -> SDPProblem:
    """Orbit-basis, block-diagonalized level-``n`` relaxation of ``game``."""
    return build_sym_reduced_csep_sdp(game_to_csep(game), n, var_cap)


# ---------------------------------------------------------------- Bose builder


def build_bose_reduced_sdp(csep: CSepProblem, n: int, var_cap: int = VAR_CAP) -> SDPProblem:
    """Coefficients over ``|i><j| (x) C_{t,t'}`` on ``A (x) sym^n(B Bbar)``.

    A copy symbol is ``w = b * dB + bbar``.
    """
    if n < 1:
        raise ValueError("level must be at least 1")
    for c in csep.aliceConstraints + csep.bobConstraints:
        if c.kind not in LinearMarginalConstraint.KINDS:
            raise ValueError(f"unsupported constraint kind {c.kind!r}")
    dA, dB = csep.dimA, csep.dimB
    d = dB * dB
    _check_vars(math.comb(n + d - 1, d - 1) ** 2 * dA * dA // csep.classicalA // 2, var_cap)
    tys = sc.types(n, d)
    pairs = [(t, tp) for t in tys for tp in tys]
    _check_vars(len(pairs) * dA * dA // csep.classicalA // 2, var_cap)
    X = _Coefficients(dA, csep.classicalA, pairs, lambda k: (k[1], k[0]))
    _check_vars(len(X), var_cap)
    pb = ProblemBuilder(len(X))
    m = len(tys)
    pos = {t: a for a, t in enumerate(tys)}
    weight = [sc.multinomial(n, t) for t in tys]
    ents = []
    for v, (i, j, (t, tp)) in X.all_members():
        p, q = i * m + pos[t], j * m + pos[tp]
        if p <= q:
            ents.append((p, q, v, float(weight[pos[t]] * weight[pos[tp]])))
    pb.add_block(dA * m, ents)
    tr: dict[int, float] = {}
    for v, (i, j, (t, tp)) in X.all_members():
        if i == j and t == tp:
            tr[v] = tr.get(v, 0.0) + sc.multinomial(n, t)
    pb.add_eq(tr, 1.0)
    for c in _active(csep.aliceConstraints):
        _alice_rows(pb, X, c)
    for c in _active(csep.bobConstraints):
        L, M, R = c.factorDims
        # relabel so the traced part (l, bbar) leads: w' = (l * dB + bbar) * (M R) + u
        MR = M * R
        relabel = np.empty(d, dtype=int)
        for w in range(d):
            b, bb = divmod(w, dB)
            l, u = divmod(b, MR)
            relabel[w] = (l * dB + bb) * MR + u

        def to_inner(t):
            out = [0] * d
            for w, cnt in enumerate(t):
                out[relabel[w]] = cnt
            return tuple(out)

        def to_outer(t):
            return tuple(t[relabel[w]] for w in range(d))

        lhs: dict = {}
        trc: dict = {}
        for v, (i, j, (t, tp)) in X.all_members():
            for tr_, trp, (u, up), mult in branch_subfactor(to_inner(t), to_inner(tp), L * dB, MR):
                key = (i, j, to_outer(tr_), to_outer(trp))
                _acc(lhs, (key, u, up), v, mult)
                mu, ru = divmod(u, R)
                mup, rup = divmod(up, R)
                if mu == mup:
                    _acc(trc, (key, ru, rup), v, mult)
        prefixes = sorted({k[0] for k in lhs} | {k[0] for k in trc}, key=repr)
        _coefficient_rows(pb, lhs, trc, c.fixedOperator, M, R, prefixes)
    G = csep.objective
    for v, (i, j, (t, tp)) in X.all_members():
        for coef, (w, z) in ptrace_tail_bose(t, tp, n):
            bw, bbw = divmod(w, dB)
            bz, bbz = divmod(z, dB)
            if bbw != bbz:
                continue
            g = G[i * dB + bw, j * dB + bz]
            if g:
                pb.objective[v] += csep.scale * coef * g
    return pb.build({"formulation": "bose-reduced", "level": n, "blocks": {f"({n},)": dA * m},
                     "source": _source(csep)})


def rebuild(p: SDPProblem, csep: CSepProblem) -> SDPProblem:
    """Rebuild ``p`` for ``csep``; the variable layout only depends on dimensions and constraints."""
    form, n = p.metadata.get("formulation"), int(p.metadata.get("level", 0))
    if form == "dense":
        return build_dense_csep_sdp(csep, n, cap=int(p.metadata["side"]), pinch=bool(p.metadata.get("pinch")))
    if form == "bose":
        return build_bose_sdp(csep, n, cap=int(p.metadata["side"]), pinch=bool(p.metadata.get("pinch")))
    if form == "sym":
        return build_sym_reduced_csep_sdp(csep, n, var_cap=p.num_vars)
    if form == "bose-reduced":
        return build_bose_reduced_sdp(csep, n, var_cap=p.num_vars)
    raise ValueError(f"unknown formulation {form!r}")


def dense_extension(csep: CSepProblem, n: int, formulation: str, x: np.ndarray) -> np.ndarray:
    """Dense operator on ``A (x) B^n`` (or ``A (x) (B Bbar)^n``) from coefficient values ``x``."""
    dA, dB = csep.dimA, csep.dimB
    if formulation == "sym":
        d = dB
        blkB = d // csep.classicalB
        keys = [D for D in sc.orbit_representatives(n, d) if _allowed(D, blkB)]
        X = _Coefficients(dA, csep.classicalA, keys, sc.transpose)
        labels, reps = orbit_labels(n, d)
        key_of = list(reps)
    elif formulation == "bose-reduced":
        d = dB * dB
        tys = sc.types(n, d)
        X = _Coefficients(dA, csep.classicalA, [(t, tp) for t in tys for tp in tys], lambda k: (k[1], k[0]))
        strings = np.indices((d,) * n).reshape(n, -1).T
        tidx = {t: a for a, t in enumerate(tys)}
        ty = np.array([tidx[sc.type_of(s, d)] for s in strings])
        labels = ty[:, None] * len(tys) + ty[None, :]
        key_of = [(t, tp) for t in tys for tp in tys]
    else:
        raise ValueError(f"no reconstruction for formulation {formulation!r}")
    x = np.asarray(x, dtype=float)
    if x.shape != (len(X),):
        raise ValueError("coefficient vector does not match the builder")
    m = d ** n
    out = np.zeros((dA, m, dA, m))
    for i in range(dA):
        for j in range(dA):
            vals = np.zeros(len(key_of))
            for c, k in enumerate(key_of):
                v = X.get(i, j, k)
                if v is not None:
                    vals[c] = x[v]
            out[i, :, j, :] = vals[labels]
    return out.reshape(dA * m, dA * m)


# ---------------------------------------------------------------- gap bounds


def _log2(x: float) -> float:
    return math.log2(x) if x > 1 else 0.0


def distortion(dA: float, dB: float) -> float:
    """Measurement distortion ``min{18 sqrt(dA dB), 2 dB}``."""
    return min(18.0 * math.sqrt(dA * dB), 2.0 * dB)


def definetti_gap(dims: tuple, n: int, variant: str = "game") -> float:
    """De Finetti gap at level ``n``.

    ``variant`` and ``dims``:

    * ``"game"``, ``(nA, nQ, nT)``: ``2 nT^3 sqrt(4 ln 2) sqrt(log2(nA nQ nT) / n)``;
    * ``"bose"``, ``(dA, dB)``: ``min{18 sqrt(dA dB^2), 2 dB^2} sqrt(4 ln 2) sqrt(ln dA / n)``;
    * ``"bose-game"``, ``(nA, nQ, nT)``:
      ``nT^2 min{sqrt(18^3 nT^3), 2 nT^2} sqrt(4 ln 2) sqrt(log2(nA nQ nT) / n)``;
    * ``"rounding"``, ``(dA, dB)``: ``min{18 sqrt(dA dB), 2 dB} sqrt(2 ln 2 log2(dA) / n)``.
    """
    if n < 1:
        raise ValueError("level must be at least 1")
    c4 = math.sqrt(4 * math.log(2))
    if variant == "game":
        nA, nQ, nT = dims
        return 2 * nT ** 3 * c4 * math.sqrt(_log2(nA * nQ * nT) / n)
    if variant == "bose":
        dA, dB = dims
        return min(18 * math.sqrt(dA * dB * dB), 2 * dB * dB) * c4 * math.sqrt(math.log(dA) / n)
    if variant == "bose-game":
        nA, nQ, nT = dims
        return nT ** 2 * min(math.sqrt(18 ** 3 * nT ** 3), 2 * nT ** 2) * c4 * math.sqrt(_log2(nA * nQ * nT) / n)
    if variant == "rounding":
        dA, dB = dims
        return distortion(dA, dB) * math.sqrt(2 * math.log(2) * _log2(dA) / n)
    raise ValueError(f"unknown variant {variant!r}")


def level_for_epsilon(dims: tuple, eps: float, variant: str = "game") -> int:
    """Smallest ``n`` with ``definetti_gap(dims, n, variant) <= eps``."""
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    c = definetti_gap(dims, 1, variant)
    n = max(1, math.ceil((c / eps) ** 2))
    while n > 1 and definetti_gap(dims, n - 1, variant) <= eps:
        n -= 1
    while definetti_gap(dims, n, variant) > eps:
        n += 1
    return n


@dataclass(frozen=True)
class GapCertificate:
    upper: float
    lower: float
    deFinettiBound: float
    level: int
    distortion: float

    def __post_init__(self) -> None:
        if self.lower > self.upper + 1e-7:
            raise ValueError("lower bound exceeds upper bound")
        if self.deFinettiBound < 0:
            raise ValueError("de Finetti bound must be nonnegative")

    @property
    def gap(self) -> float:
        return self.upper - self.lower
