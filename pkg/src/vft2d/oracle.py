"""Brute-force references for testing the evaluator.

Nothing here reuses the evaluator's contraction code.  Structure maps are
rebuilt from the pairing inverse, elementary pieces act as dense tensors on
the direct sum of all kept levels (so level-preservation is observed, not
assumed), and the state is contracted strictly piece after piece.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, replace

import numpy as np

from .bordism import Bordism, Component, Label, LabelKind, Piece, Step, ZERO, _require_valid
from .errors import CompositionError
from .frobenius import FrobeniusAlgebra
from .spectral import SpectralVFT


def _copairing(A: FrobeniusAlgebra) -> np.ndarray:
    P = np.einsum("ijk,k->ij", A.mult, A.trace)
    return np.linalg.inv(P)


def _unit(A: FrobeniusAlgebra) -> np.ndarray:
    # theta(u x) = theta(x) for all x
    P = np.einsum("ijk,k->ij", A.mult, A.trace)
    return np.linalg.solve(P.T, A.trace)


def _coproduct(A: FrobeniusAlgebra) -> np.ndarray:
    """``w[a, b, k]``: coefficient of ``e_a ⊗ e_b`` in ``w(e_k)``."""
    # adjoint of m under the pairing: <w(x), y ⊗ z> = <x, y z>
    P = np.einsum("ijk,k->ij", A.mult, A.trace)
    Q = np.linalg.inv(P)
    rhs = np.einsum("ijl,kl->ijk", A.mult, P)
    return np.einsum("ia,jb,ijk->abk", Q, Q, rhs)


def _handle_element(A: FrobeniusAlgebra) -> np.ndarray:
    Q = _copairing(A)
    return np.einsum("ij,ijk->k", Q, A.mult)


def closed_form_genus(vft: SpectralVFT, genus: int, s: complex, lambda_max: float | None = None) -> complex:
    """``sum_lambda exp(-s lambda) theta(H^g u)`` with ``H`` the handle element."""
    s = s.value if isinstance(s, Label) else complex(s)
    total = 0j
    for lam, A in vft.entries():
        if lambda_max is not None and lam > lambda_max:
            break
        x = _unit(A)
        H = _handle_element(A)
        for _ in range(genus):
            x = A.product(H, x)
        total += np.exp(-s * lam) * complex(A.trace @ x)
    return total


@dataclass
class DenseOperator:
    matrix: np.ndarray
    n_in: int
    n_out: int
    space: SpectralVFT
    tail_bound: float = 0.0

    def to_dense(self) -> np.ndarray:
        return self.matrix

    @property
    def scalar(self) -> complex:
        if self.matrix.shape != (1, 1):
            raise ValueError("operator is not a scalar")
        return complex(self.matrix[0, 0])


class _DenseTensors:
    """Elementary tensors on the direct sum of the kept levels."""

    def __init__(self, space: SpectralVFT):
        dims = [b.dim for b in space.blocks]
        self.N = N = sum(dims)
        self.levels = np.repeat(np.asarray(space.levels, dtype=float), dims)
        self.m = np.zeros((N, N, N), dtype=complex)
        self.w = np.zeros((N, N, N), dtype=complex)
        self.u = np.zeros(N, dtype=complex)
        self.theta = np.zeros(N, dtype=complex)
        off = 0
        for d, A in zip(dims, space.blocks):
            sl = slice(off, off + d)
            self.m[sl, sl, sl] = np.transpose(A.mult, (2, 0, 1))
            self.w[sl, sl, sl] = _coproduct(A)
            self.u[sl] = _unit(A)
            self.theta[sl] = A.trace
            off += d

    def weight(self, label: Label) -> np.ndarray:
        return np.exp(-label.value * self.levels)


def _apply(T: np.ndarray, step: Step, D: _DenseTensors) -> np.ndarray:
    p, k = step.position, step.kind
    wt = D.weight(step.label)
    if k is Piece.PERMUTATION:
        order = list(step.perm) + list(range(step.width, T.ndim))
        return T.transpose(order)
    if k is Piece.CYLINDER:
        return np.moveaxis(np.tensordot(np.diag(wt), T, axes=([1], [p])), 0, p)
    if k is Piece.PANTS:
        R = np.tensordot(wt[:, None, None] * D.m, T, axes=([1, 2], [p, p + 1]))
        return np.moveaxis(R, 0, p)
    if k is Piece.COPANTS:
        R = np.tensordot(D.w * wt[None, None, :], T, axes=([2], [p]))
        return np.moveaxis(R, [0, 1], [p, p + 1])
    if k is Piece.DISK:
        return np.tensordot(wt * D.theta, T, axes=([0], [p]))
    if k is Piece.CODISK:
        return np.moveaxis(np.multiply.outer(wt * D.u, T), 0, p)
    raise ValueError(f"unknown piece {k}")


def brute_contract(vft: SpectralVFT, steps: list[Step], n_in: int, lambda_max: float | None = None) -> DenseOperator:
    """Contract a decomposition on the truncation to ``lambda_max`` (all levels by default)."""
    space = vft if lambda_max is None else vft.truncated(lambda_max)
    D = _DenseTensors(space)
    N = D.N
    T = np.eye(N**n_in, dtype=complex).reshape((N,) * (2 * n_in))
    width = n_in
    for st in steps:
        if st.width != width:
            raise CompositionError(f"step {st.kind.value} expects {st.width} strands, have {width}")
        st.bordism()  # position check
        T = _apply(T, st, D)
        width = st.width_out
    return DenseOperator(T.reshape(N**width, N**n_in), n_in, width, space)


# random decompositions -------------------------------------------------------


def _split_label(label: Label, parts: int, rng: random.Random) -> list[Label]:
    if label.kind is LabelKind.ZERO:
        return []
    w = [rng.uniform(0.2, 1.0) for _ in range(parts)]
    tot = sum(w)
    return [Label(label.kind, label.value * x / tot) for x in w]


def random_decomposition(X: Bordism, seed: int = 0) -> list[Step]:
    """A seeded random Morse decomposition of ``X``.

    Randomizes the order of components and circles, the merge and split
    positions, where handles are inserted, how the label is spread over
    pieces, and sprinkles in unit/counit detours (codisk then pants, copants
    then disk) and swaps that leave the surface unchanged.
    """
    _require_valid(X)
    rng = random.Random(seed)
    comps = list(X.components)
    rng.shuffle(comps)
    groups = []
    for c in comps:
        ins = list(c.ins)
        rng.shuffle(ins)
        groups.append(ins)
    steps: list[Step] = []
    init = tuple(s for g in groups for s in g)
    if init != tuple(range(X.n_in)):
        steps.append(Step(Piece.PERMUTATION, X.n_in, perm=init))
    width, pos = X.n_in, 0
    placed_outs: list[int] = []

    for c in comps:
        local: list[tuple[int, int]] = []  # (index into steps, strands of this component after it)
        cur = len(c.ins)

        def emit(kind, j, perm=()):
            nonlocal width, cur
            delta = {Piece.PANTS: -1, Piece.COPANTS: 1, Piece.DISK: -1, Piece.CODISK: 1}.get(kind, 0)
            steps.append(Step(kind, width, pos + j, ZERO, perm))
            width += delta
            cur += delta
            if kind is not Piece.PERMUTATION:
                local.append((len(steps) - 1, cur))

        def swap(j):
            perm = list(range(width))
            perm[pos + j], perm[pos + j + 1] = perm[pos + j + 1], perm[pos + j]
            emit(Piece.PERMUTATION, 0, tuple(perm))

        def handle():
            j = rng.randrange(cur)
            emit(Piece.COPANTS, j)
            if rng.random() < 0.5:
                swap(j)
            emit(Piece.PANTS, j)

        def detour():
            j = rng.randrange(cur)
            if rng.random() < 0.5:
                emit(Piece.CODISK, j + rng.randrange(2))
                emit(Piece.PANTS, j)
            else:
                emit(Piece.COPANTS, j)
                emit(Piece.DISK, j + rng.randrange(2))

        if cur == 0:
            emit(Piece.CODISK, 0)
        handles = c.genus
        early = rng.randint(0, handles)
        extras = rng.randint(0, 1)
        while cur > 1 or early > 0 or extras > 0:
            moves = (["merge"] if cur > 1 else []) + (["handle"] if early else []) + (["detour"] if extras else [])
            move = rng.choice(moves)
            if move == "merge":
                j = rng.randrange(cur - 1)
                if rng.random() < 0.3:
                    swap(j)
                emit(Piece.PANTS, j)
            elif move == "handle":
                handle()
                early -= 1
                handles -= 1
            else:
                detour()
                extras -= 1
        for _ in range(handles):
            handle()
        if not c.outs:
            emit(Piece.DISK, 0)
        else:
            while cur < len(c.outs):
                emit(Piece.COPANTS, rng.randrange(cur))
        # spread the label over pieces of this component
        parts = _split_label(c.label, rng.randint(1, 3), rng)
        inserts: list[tuple[int, Step]] = []
        for part in parts:
            if local and rng.random() < 0.6:
                i, _ = rng.choice(local)
                st = steps[i]
                steps[i] = replace(st, label=st.label + part)
            else:
                # a labeled cylinder on one of this component's strands
                after = [(i, n) for i, n in local if n > 0]
                if after and rng.random() < 0.7:
                    i, n = rng.choice(after)
                    w = steps[i].width_out
                else:
                    i, n, w = len(steps) - 1, cur, width
                if n == 0:
                    # closed component already capped: put it on the last piece
                    st = steps[local[-1][0]]
                    steps[local[-1][0]] = replace(st, label=st.label + part)
                    continue
                inserts.append((i, Step(Piece.CYLINDER, w, pos + rng.randrange(n), part)))
        for i, st in sorted(inserts, key=lambda e: -e[0]):
            steps.insert(i + 1, st)
        outs = list(c.outs)
        rng.shuffle(outs)
        placed_outs.extend(outs)
        pos += len(outs)
    final = tuple(placed_outs.index(j) for j in range(X.n_out))
    if final != tuple(range(X.n_out)):
        steps.append(Step(Piece.PERMUTATION, width, perm=final))
    return steps


def random_bordism(
    rng: random.Random,
    max_in: int = 2,
    max_out: int = 2,
    max_genus: int = 2,
    max_components: int = 2,
    label: str = "volume",
) -> Bordism:
    """Random valid bordism; circles are dealt to components at random."""
    n_in, n_out = rng.randint(0, max_in), rng.randint(0, max_out)
    k = rng.randint(1, max_components)
    ins, outs = [[] for _ in range(k)], [[] for _ in range(k)]
    for i in range(n_in):
        ins[rng.randrange(k)].append(i)
    for j in range(n_out):
        outs[rng.randrange(k)].append(j)
    comps = []
    for a, b in zip(ins, outs):
        if label == "volume":
            lab = Label.volume(complex(rng.uniform(0.3, 2.0), rng.uniform(-2.0, 2.0)))
        elif label == "imaginary":
            lab = Label.imaginary(rng.uniform(-5.0, 5.0))
        else:
            lab = ZERO
        comps.append(Component(rng.randint(0, max_genus), tuple(a), tuple(b), lab))
    return Bordism(n_in, n_out, tuple(comps))
