"""Evaluation of labeled bordisms on a spectral theory.

A connected component of genus ``g`` with ``a`` incoming and ``b`` outgoing
circles and volume ``s`` acts on each level ``lambda`` by
``exp(-s lambda) W_b h^g M_a`` where ``M_a`` multiplies ``a`` inputs together
(the unit when ``a = 0``), ``h`` is the handle operator and ``W_b`` splits into
``b`` outputs (the trace when ``b = 0``).  Components act on different levels
independently, so an operator is stored as one block family per open
component plus a scalar collecting the closed components.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .bordism import Bordism, Component, Label, LabelKind, _require_valid, dual
from .errors import LorentzianLabelError, TruncationError
from .frobenius import (
    FrobeniusAlgebra,
    coproduct_matrix,
    derive_unit,
    handle_operator,
    hermitian_gram,
    orthonormalizer,
)
from .jsonio import encode_array, encode_complex, encode_float
from .spectral import SpectralVFT, certify_growth, tail_bound_at

# fractions of Re(s) tried as the growth rate of per-component certificates
_T_FRACTIONS = (0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9)


class _Structure:
    """Structure maps of one block as dense matrices."""

    def __init__(self, A: FrobeniusAlgebra):
        self.dim = A.dim
        self.m = A.mult_matrix
        self.w = coproduct_matrix(A)
        self.u = derive_unit(A).reshape(-1, 1)
        self.theta = A.trace.reshape(1, -1)
        self.h = handle_operator(A)
        self.gram = hermitian_gram(A).matrix
        self.R = orthonormalizer(A)
        self.Rinv = np.linalg.inv(self.R)

    def merge(self, k: int) -> np.ndarray:
        """A^{⊗k} -> A."""
        if k == 0:
            return self.u
        M = np.eye(self.dim, dtype=complex)
        for _ in range(k - 1):
            M = self.m @ np.kron(M, np.eye(self.dim))
        return M

    def split(self, k: int) -> np.ndarray:
        """A -> A^{⊗k}."""
        if k == 0:
            return self.theta
        W = np.eye(self.dim, dtype=complex)
        for _ in range(k - 1):
            W = np.kron(W, np.eye(self.dim)) @ self.w
        return W

    def tqft(self, genus: int, n_in: int, n_out: int) -> np.ndarray:
        H = np.linalg.matrix_power(self.h, genus)
        return self.split(n_out) @ H @ self.merge(n_in)

    def onb(self, k: int, inverse: bool = False) -> np.ndarray:
        R = self.Rinv if inverse else self.R
        return reduce(np.kron, [R] * k, np.eye(1))

    def gram_norm(self, block: np.ndarray, n_in: int, n_out: int) -> float:
        """Operator norm of a block with respect to the Gram inner products."""
        B = self.onb(n_out) @ block @ self.onb(n_in, inverse=True)
        return float(np.linalg.norm(B, 2))


def eval_component_tqft(A: FrobeniusAlgebra, genus: int, n_in: int, n_out: int) -> np.ndarray:
    """Value of a connected genus-``g`` surface in the 2d TQFT of ``A``.

    Shape ``(dim^n_out, dim^n_in)``; a closed surface gives a ``1 x 1`` matrix.
    """
    if min(genus, n_in, n_out) < 0:
        raise ValueError("genus and circle counts must be nonnegative")
    return _Structure(A).tqft(genus, n_in, n_out)


def _weight(label: Label, lam: float) -> complex:
    return np.exp(-label.value * lam)


@dataclass
class ComponentBlocks:
    component: Component
    blocks: dict[float, np.ndarray]

    def to_json(self) -> dict:
        out = self.component.to_json()
        out["blocks"] = [{"lambda": lam, "matrix": encode_array(B)} for lam, B in self.blocks.items()]
        return out


@dataclass
class BlockOperator:
    """Level-indexed block families, one per open component, plus closed scalars.

    ``space`` is the theory truncated to the levels the blocks live on.
    """

    n_in: int
    n_out: int
    space: SpectralVFT
    components: list[ComponentBlocks]
    closed_scalars: list[complex] = field(default_factory=list)
    tail_bound: float = 0.0
    bounded: bool = True

    @property
    def lambda_max(self) -> float:
        return self.space.levels[-1]

    @property
    def levels(self) -> tuple[float, ...]:
        return self.space.levels

    @property
    def scalar(self) -> complex:
        return complex(np.prod(self.closed_scalars)) if self.closed_scalars else 1.0 + 0j

    @property
    def blocks(self) -> dict[float, np.ndarray]:
        """Blocks of a single open component with the closed scalars folded in."""
        if len(self.components) != 1:
            raise ValueError(f"operator has {len(self.components)} open components")
        return {lam: self.scalar * B for lam, B in self.components[0].blocks.items()}

    def to_dense(self) -> np.ndarray:
        """Matrix on the truncated space, ``(N^n_out, N^n_in)`` with ``N`` the total dimension."""
        dims = [b.dim for b in self.space.blocks]
        offsets = np.concatenate([[0], np.cumsum(dims)])
        N = int(offsets[-1])
        tensor = np.array(self.scalar, dtype=complex)
        out_axis: dict[int, int] = {}
        in_axis: dict[int, int] = {}
        for cb in self.components:
            c = cb.component
            ko, ki = len(c.outs), len(c.ins)
            D = np.zeros((N**ko, N**ki), dtype=complex)
            for i, lam in enumerate(self.space.levels):
                rows = _sector(offsets[i], dims[i], ko, N)
                cols = _sector(offsets[i], dims[i], ki, N)
                D[np.ix_(rows, cols)] = cb.blocks[lam]
            base = tensor.ndim
            for j, s in enumerate(c.outs):
                out_axis[s] = base + j
            for j, s in enumerate(c.ins):
                in_axis[s] = base + ko + j
            tensor = np.multiply.outer(tensor, D.reshape((N,) * (ko + ki)))
        perm = [out_axis[j] for j in range(self.n_out)] + [in_axis[i] for i in range(self.n_in)]
        return tensor.transpose(perm).reshape(N**self.n_out, N**self.n_in)

    def to_json(self) -> dict:
        out = {
            "n_in": self.n_in,
            "n_out": self.n_out,
            "lambda_max": self.lambda_max,
            "tail_bound": encode_float(self.tail_bound),
            "bounded": self.bounded,
            "scalar": encode_complex(self.scalar),
            "closed_scalars": [encode_complex(z) for z in self.closed_scalars],
            "components": [cb.to_json() for cb in self.components],
        }
        if len(self.components) == 1:
            out["blocks"] = [{"lambda": lam, "matrix": encode_array(B)} for lam, B in self.blocks.items()]
        return out


@dataclass
class UnboundedBlockOperator(BlockOperator):
    """Block family defined on the small (exponentially decaying) domain."""

    domain: str | None = None
    growth: dict | None = None

    def to_json(self) -> dict:
        out = super().to_json()
        if self.domain is not None:
            out["domain"] = self.domain
        if self.growth is not None:
            out["growth"] = self.growth
        return out


def _sector(offset: int, dim: int, k: int, N: int) -> np.ndarray:
    """Flat indices of ``A_lambda^{⊗k}`` inside ``(⊕ A)^{⊗k}`` in kron order."""
    idx = np.zeros(1, dtype=np.int64)
    local = np.arange(offset, offset + dim, dtype=np.int64)
    for _ in range(k):
        idx = (idx[:, None] * N + local[None, :]).reshape(-1)
    return idx


# ---------------------------------------------------------------------------


def structures(vft: SpectralVFT) -> list[_Structure]:
    return [_Structure(b) for b in vft.blocks]


def _raw_blocks(structs, comp: Component) -> list[np.ndarray]:
    return [s.tqft(comp.genus, len(comp.ins), len(comp.outs)) for s in structs]


def _component_tail_profile(vft: SpectralVFT, norms: np.ndarray, re_s: float) -> np.ndarray:
    """Bound on the neglected part of one component for each candidate cutoff.

    Stored levels above the cutoff enter with their actual norms.  Past the
    stored spectrum the component's own growth certificate (depth one) is used,
    picking the best rate whose maximizer is interior to the stored range.
    """
    levels = np.asarray(vft.levels)
    weighted = norms * np.exp(-re_s * levels)
    suffix = np.cumsum(weighted[::-1])[::-1]
    stored = np.append(suffix[1:], 0.0)
    if vft.complete:
        return stored
    best = np.full(len(levels), math.inf)
    if not re_s > 0:
        return best
    for frac in _T_FRACTIONS:
        cert = certify_growth(levels, norms, frac * re_s)
        if not cert.interior:
            continue
        last = tail_bound_at(vft, cert, 1, re_s, levels[-1], norms=norms)
        best = np.minimum(best, stored + last)
    return best


def _combine_tails(tails: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    """Telescoping bound for a tensor product of truncated factors.

    ``tails[c, L]`` bounds the neglected part and ``sizes[c, L]`` the kept
    part of factor ``c`` at cutoff ``L``.
    """
    n = tails.shape[0]
    total = np.zeros(tails.shape[1])
    for c in range(n):
        term = tails[c].copy()
        for c2 in range(n):
            if c2 < c:
                term = term * sizes[c2]
            elif c2 > c:
                term = term * (sizes[c2] + tails[c2])
        total = total + term
    with np.errstate(invalid="ignore"):
        return np.where(np.isnan(total), math.inf, total)


def _assemble(vft, X, structs, raw, factor, keep, tail, bounded, cls=BlockOperator, **extra):
    space = vft.truncated(vft.levels[keep - 1])
    comps, closed = [], []
    for c, blocks in zip(X.components, raw):
        scaled = {lam: factor(c, lam) * blocks[i] for i, lam in enumerate(vft.levels[:keep])}
        if c.closed:
            closed.append(complex(sum(B[0, 0] for B in scaled.values())))
        else:
            comps.append(ComponentBlocks(c, scaled))
    return cls(X.n_in, X.n_out, space, comps, closed, tail, bounded, **extra)


def eval(vft: SpectralVFT, X: Bordism, eps: float = 1e-10, lambda_max: float | None = None) -> BlockOperator:
    """Evaluate a bordism with volume (or zero) labels.

    Without ``lambda_max`` the smallest cutoff whose certified tail is below
    ``eps`` is chosen (``TruncationError`` if the stored spectrum is too
    short).  With ``lambda_max`` that cutoff is used and the tail is reported,
    possibly infinite.
    """
    _require_valid(X)
    for c in X.components:
        if c.label.kind is LabelKind.IMAGINARY:
            raise LorentzianLabelError("imaginary labels have no Euclidean value; use the Lorentzian evaluator")
    structs = structures(vft)
    raw = [_raw_blocks(structs, c) for c in X.components]
    levels = np.asarray(vft.levels)
    tails, sizes = [], []
    for c, blocks in zip(X.components, raw):
        k_in, k_out = len(c.ins), len(c.outs)
        norms = np.array([s.gram_norm(B, k_in, k_out) for s, B in zip(structs, blocks)])
        re_s = c.label.value.real
        tails.append(_component_tail_profile(vft, norms, re_s))
        weighted = norms * np.exp(-re_s * levels)
        if c.closed:
            partial = np.cumsum([_weight(c.label, lam) * B[0, 0] for lam, B in zip(vft.levels, blocks)])
            sizes.append(np.abs(partial))
        else:
            sizes.append(np.maximum.accumulate(weighted))
    if X.components:
        total = _combine_tails(np.array(tails), np.array(sizes))
    else:
        total = np.zeros(len(levels))
    if lambda_max is None:
        ok = np.nonzero(total < eps)[0]
        if len(ok) == 0:
            raise TruncationError(
                f"cannot certify eps={eps:.3e}: best tail bound {float(np.min(total)):.3e}; store more levels"
            )
        keep = int(ok[0]) + 1
    else:
        keep = int(np.searchsorted(levels, lambda_max, side="right"))
        if keep == 0:
            raise ValueError(f"lambda_max={lambda_max} is below the ground level")
    bounded = all(c.label.kind is LabelKind.VOLUME or c.is_cylinder for c in X.components)
    return _assemble(vft, X, structs, raw, lambda c, lam: _weight(c.label, lam), keep, float(total[keep - 1]), bounded)


def partition_function(vft: SpectralVFT, genus: int, s: complex, eps: float = 1e-10, lambda_max: float | None = None) -> complex:
    """Value of the closed genus-``g`` surface of total volume ``s``."""
    label = s if isinstance(s, Label) else Label.volume(s)
    if label.kind is not LabelKind.VOLUME:
        raise ValueError("partition function needs a volume label with Re > 0")
    return eval(vft, Bordism.closed(genus, label), eps, lambda_max).scalar


# consistency checks --------------------------------------------------------


def _common_cutoff(vft, bordisms, eps):
    if eps is None:
        return vft.levels[-1]
    return max(eval(vft, B, eps).lambda_max for B in bordisms)


def check_semigroup(vft: SpectralVFT, s: complex, s2: complex, eps: float | None = None) -> float:
    """Largest block residual of ``V(s) V(s2) - V(s + s2)`` on cylinders.

    When ``s2`` is the conjugate of ``s`` the normality residual
    ``V(s) V(s)^† - V(s)^† V(s)`` is folded into the result.  All three
    operators share one cutoff (all stored levels unless ``eps`` is given).
    """
    cyl = [Bordism.cylinder(Label.volume(z)) for z in (s, s2, s + s2)]
    L = _common_cutoff(vft, cyl, eps)
    a, b, ab = (eval(vft, C, lambda_max=L).blocks for C in cyl)
    structs = structures(vft)
    residual = 0.0
    for i, lam in enumerate(a):
        residual = max(residual, float(np.linalg.norm(a[lam] @ b[lam] - ab[lam], 2)))
        if complex(s2) == complex(s).conjugate():
            st = structs[i]
            A = st.R @ a[lam] @ st.Rinv
            residual = max(residual, float(np.linalg.norm(A @ A.conj().T - A.conj().T @ A, 2)))
    return residual


def _gram_adjoint(st: _Structure, block: np.ndarray, n_in: int, n_out: int) -> np.ndarray:
    G_in = reduce(np.kron, [st.gram] * n_in, np.eye(1))
    G_out = reduce(np.kron, [st.gram] * n_out, np.eye(1))
    return np.linalg.solve(G_in, block.conj().T @ G_out)


def check_adjoint(vft: SpectralVFT, X: Bordism, s: complex | None = None, eps: float | None = None) -> float:
    """Residual of ``V(X*, conj s)`` against the Gram adjoint of ``V(X, s)``.

    ``s`` (if given) relabels every component.  Relative to the largest block entry.
    """
    if s is not None:
        X = X.relabel(Label.volume(s))
    Xd = dual(X).with_labels([c.label.conjugate() for c in X.components])
    L = _common_cutoff(vft, [X, Xd], eps)
    fwd = eval(vft, X, lambda_max=L)
    bwd = eval(vft, Xd, lambda_max=L)
    structs = structures(vft)
    residual, scale = 0.0, 1.0
    for cf, cb in zip(fwd.components, bwd.components):
        k_in, k_out = len(cf.component.ins), len(cf.component.outs)
        for i, lam in enumerate(fwd.levels):
            adj = _gram_adjoint(structs[i], cf.blocks[lam], k_in, k_out)
            residual = max(residual, float(np.max(np.abs(adj - cb.blocks[lam]))))
            scale = max(scale, float(np.max(np.abs(adj))))
    for zf, zb in zip(fwd.closed_scalars, bwd.closed_scalars):
        residual = max(residual, abs(zf.conjugate() - zb))
        scale = max(scale, abs(zf))
    return residual / scale


def check_functoriality(vft: SpectralVFT, X: Bordism, Y: Bordism, lambda_max: float | None = None) -> float:
    """``V(Y ∘ X)`` against ``V(Y) V(X)`` as dense matrices on a common truncation."""
    from .bordism import compose

    L = vft.levels[-1] if lambda_max is None else lambda_max
    lhs = eval(vft, compose(X, Y), lambda_max=L).to_dense()
    rhs = eval(vft, Y, lambda_max=L).to_dense() @ eval(vft, X, lambda_max=L).to_dense()
    return float(np.max(np.abs(lhs - rhs), initial=0.0)) / max(1.0, float(np.max(np.abs(rhs), initial=0.0)))


def gram_dense(space: SpectralVFT, k: int) -> np.ndarray:
    """Gram matrix of ``(⊕ A_lambda)^{⊗k}``."""
    from scipy.linalg import block_diag

    G = block_diag(*[hermitian_gram(b).matrix for b in space.blocks])
    return reduce(np.kron, [G] * k, np.eye(1))


def block_norms(structs: Sequence[_Structure], comp: Component, blocks: dict[float, np.ndarray]) -> list[float]:
    k_in, k_out = len(comp.ins), len(comp.outs)
    return [st.gram_norm(B, k_in, k_out) for st, B in zip(structs, blocks.values())]
