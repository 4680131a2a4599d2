"""Finite-dimensional commutative Hermitian Frobenius algebras.

An algebra is stored in an explicit ordered basis ``e_0 .. e_{n-1}``:

* ``mult[i, j, k]`` is the coefficient of ``e_k`` in ``e_i * e_j``;
* ``trace[i]`` is the value of the trace on ``e_i``;
* ``conj`` is the matrix ``C`` of the antilinear involution, ``c(x) = C @ conj(x)``.

The unit, coproduct and handle operator are derived from these data rather
than stored.  Linear maps between tensor powers are dense matrices acting on
column vectors, with the first tensor factor most significant (``np.kron``
ordering).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DegeneratePairingError, NoUnitError, StructureError
from .jsonio import decode_array, encode_array
from .report import ValidationReport

DEFAULT_TOL = 1e-10
PIVOT_RTOL = 1e-12


class FrobeniusAlgebra:
    """Immutable commutative Frobenius algebra with a real structure."""

    __slots__ = ("mult", "trace", "conj")

    def __init__(self, mult, trace, conj=None):
        mult = np.array(mult, dtype=complex, copy=True)
        trace = np.array(trace, dtype=complex, copy=True).reshape(-1)
        if mult.ndim == 0:
            mult = mult.reshape(1, 1, 1)
        n = trace.shape[0]
        if n < 1:
            raise StructureError("algebra dimension must be at least 1")
        if mult.shape != (n, n, n):
            raise StructureError(f"mult has shape {mult.shape}, expected {(n, n, n)}")
        if conj is None:
            conj = np.eye(n, dtype=complex)
        conj = np.array(conj, dtype=complex, copy=True)
        if conj.ndim == 0:
            conj = conj.reshape(1, 1)
        if conj.shape != (n, n):
            raise StructureError(f"conj has shape {conj.shape}, expected {(n, n)}")
        for a in (mult, trace, conj):
            a.setflags(write=False)
        object.__setattr__(self, "mult", mult)
        object.__setattr__(self, "trace", trace)
        object.__setattr__(self, "conj", conj)

    def __setattr__(self, name, value):
        raise AttributeError("FrobeniusAlgebra is immutable")

    def __repr__(self) -> str:
        return f"FrobeniusAlgebra(dim={self.dim})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrobeniusAlgebra):
            return NotImplemented
        return (
            np.array_equal(self.mult, other.mult)
            and np.array_equal(self.trace, other.trace)
            and np.array_equal(self.conj, other.conj)
        )

    __hash__ = None

    @property
    def dim(self) -> int:
        return self.trace.shape[0]

    @property
    def pairing(self) -> np.ndarray:
        """P[i, j] = trace(e_i e_j)."""
        return np.einsum("ijk,k->ij", self.mult, self.trace)

    @property
    def mult_matrix(self) -> np.ndarray:
        """Multiplication as an ``n x n^2`` matrix A⊗A -> A."""
        n = self.dim
        return self.mult.reshape(n * n, n).T.copy()

    def product(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.mult)

    def left_mult(self, x) -> np.ndarray:
        """Matrix of y -> x*y."""
        return np.einsum("a,ajk->kj", x, self.mult)

    def apply_conj(self, x) -> np.ndarray:
        return self.conj @ np.conj(x)

    # constructors ---------------------------------------------------------

    @classmethod
    def scalar(cls, mult: complex, trace: complex, conj: complex = 1.0) -> "FrobeniusAlgebra":
        """One-dimensional algebra ``e*e = mult*e``, ``trace(e) = trace``."""
        return cls([[[mult]]], [trace], [[conj]])

    @classmethod
    def trivial(cls) -> "FrobeniusAlgebra":
        return cls.scalar(1.0, 1.0)

    @classmethod
    def cyclic_group(cls, order: int, scale: float = 1.0) -> "FrobeniusAlgebra":
        """Group algebra of Z/order with trace ``scale * delta_e`` and ``c(g) = g^-1``."""
        n = order
        mult = np.zeros((n, n, n), dtype=complex)
        conj = np.zeros((n, n), dtype=complex)
        for i in range(n):
            conj[(-i) % n, i] = 1.0
            for j in range(n):
                mult[i, j, (i + j) % n] = 1.0
        trace = np.zeros(n, dtype=complex)
        trace[0] = scale
        return cls(mult, trace, conj)

    @classmethod
    def direct_sum(cls, *algebras: "FrobeniusAlgebra") -> "FrobeniusAlgebra":
        n = sum(a.dim for a in algebras)
        mult = np.zeros((n, n, n), dtype=complex)
        trace = np.zeros(n, dtype=complex)
        conj = np.zeros((n, n), dtype=complex)
        o = 0
        for a in algebras:
            s = slice(o, o + a.dim)
            mult[s, s, s] = a.mult
            trace[s] = a.trace
            conj[s, s] = a.conj
            o += a.dim
        return cls(mult, trace, conj)

    def change_basis(self, S) -> "FrobeniusAlgebra":
        """Re-express the algebra in the basis ``f_j = sum_i S[i, j] e_i``."""
        S = np.asarray(S, dtype=complex)
        Sinv = np.linalg.inv(S)
        mult = np.einsum("ia,jb,ijk,lk->abl", S, S, self.mult, Sinv)
        trace = S.T @ self.trace
        conj = Sinv @ self.conj @ np.conj(S)
        return FrobeniusAlgebra(mult, trace, conj)

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "mult": encode_array(self.mult),
            "trace": encode_array(self.trace),
            "conj": encode_array(self.conj),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FrobeniusAlgebra":
        try:
            mult = decode_array(data["mult"], 3)
            trace = decode_array(data["trace"], 1)
            conj = decode_array(data["conj"], 2)
        except KeyError as exc:
            raise StructureError(f"algebra JSON missing field {exc}") from None
        alg = cls(mult, trace, conj)
        if "dim" in data and int(data["dim"]) != alg.dim:
            raise StructureError(f"declared dim {data['dim']} but tensors have dim {alg.dim}")
        return alg


class GramResult(NamedTuple):
    matrix: np.ndarray
    positive: bool


def pivoted_cholesky(G, rtol: float = PIVOT_RTOL) -> tuple[bool, float]:
    """Diagonally pivoted Cholesky of a Hermitian matrix.

    Returns ``(ok, min_pivot)``; ``ok`` is False as soon as the largest remaining
    pivot drops to ``rtol * trace(G)`` or below.
    """
    A = np.array(G, dtype=complex, copy=True)
    n = A.shape[0]
    thresh = rtol * abs(np.trace(A).real)
    min_pivot = np.inf
    for k in range(n):
        d = A.diagonal().real.copy()
        d[:k] = -np.inf
        p = int(np.argmax(d))
        A[[k, p]] = A[[p, k]]
        A[:, [k, p]] = A[:, [p, k]]
        piv = A[k, k].real
        min_pivot = min(min_pivot, piv)
        if not piv > thresh:
            return False, float(piv)
        A[k + 1:, k] /= np.sqrt(piv)
        A[k + 1:, k + 1:] -= np.outer(A[k + 1:, k], np.conj(A[k + 1:, k]))
        A[k, k + 1:] = 0.0
        A[k, k] = np.sqrt(piv)
    return True, float(min_pivot)


def hermitian_gram(A: FrobeniusAlgebra) -> GramResult:
    """G[i, j] = trace(c(e_i) e_j) together with its positive-definiteness verdict."""
    G = A.conj.T @ A.pairing
    herm = np.max(np.abs(G - G.conj().T), initial=0.0)
    scale = max(1.0, np.max(np.abs(G)))
    if herm > DEFAULT_TOL * scale:
        return GramResult(G, False)
    ok, _ = pivoted_cholesky((G + G.conj().T) / 2)
    return GramResult(G, ok)


def _max_abs(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def validate_frobenius(A: FrobeniusAlgebra, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Residual check of every axiom, scaled by the tensor magnitudes involved."""
    if not isinstance(A, FrobeniusAlgebra):
        raise StructureError(f"expected FrobeniusAlgebra, got {type(A).__name__}")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    m, C = A.mult, A.conj
    sm = max(1.0, _max_abs(m))
    sc = max(1.0, _max_abs(C))
    report = ValidationReport(f"frobenius algebra (dim {A.dim})")

    lhs = np.einsum("ijp,pkl->ijkl", m, m)
    rhs = np.einsum("jkp,ipl->ijkl", m, m)
    r = _max_abs(lhs - rhs) / sm**2
    report.add("associativity", r, r <= tol)

    r = _max_abs(m - m.transpose(1, 0, 2)) / sm
    report.add("commutativity", r, r <= tol)

    sv = np.linalg.svd(A.pairing, compute_uv=False)
    rcond = sv[-1] / sv[0] if sv[0] > 0 else 0.0
    report.add(
        "pairing_nondegenerate",
        rcond,
        rcond > tol,
        "reciprocal condition number of the pairing; must exceed tol",
    )

    r = _max_abs(np.conj(C) @ C - np.eye(A.dim)) / sc**2
    report.add("involution", r, r <= tol)

    # c(e_i e_j) versus c(e_i) c(e_j)
    c_of_prod = np.einsum("ijk,pk->ijp", np.conj(m), C)
    prod_of_c = np.einsum("pi,qj,pqr->ijr", C, C, m)
    r = _max_abs(c_of_prod - prod_of_c) / (sc**2 * sm)
    report.add("conj_algebra_map", r, r <= tol)

    G = A.conj.T @ A.pairing
    sg = max(1.0, _max_abs(G))
    r = _max_abs(G - G.conj().T) / sg
    report.add("gram_hermitian", r, r <= tol)
    ok, min_piv = pivoted_cholesky((G + G.conj().T) / 2)
    report.add("gram_positive", min_piv, ok and r <= tol, "smallest pivot of the Gram factorization")
    return report


def _pairing_inverse(A: FrobeniusAlgebra) -> np.ndarray:
    P = A.pairing
    sv = np.linalg.svd(P, compute_uv=False)
    if sv[0] == 0 or sv[-1] / sv[0] <= DEFAULT_TOL:
        raise DegeneratePairingError("Frobenius pairing is singular")
    return np.linalg.inv(P)


def derive_unit(A: FrobeniusAlgebra, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Solve ``u * e_j = e_j`` for all ``j``."""
    n = A.dim
    system = A.mult.transpose(1, 2, 0).reshape(n * n, n)  # rows (j, k), column i
    rhs = np.eye(n, dtype=complex).reshape(n * n)
    u, _, rank, _ = np.linalg.lstsq(system, rhs, rcond=None)
    resid = _max_abs(system @ u - rhs)
    if rank < n or resid > tol * max(1.0, _max_abs(A.mult)) * max(1.0, _max_abs(u)):
        raise NoUnitError(f"no unit: residual {resid:.3e}, rank {rank} of {n}")
    return u


def derive_coproduct(A: FrobeniusAlgebra) -> np.ndarray:
    """``w[k, a, b]``: coefficient of ``e_a ⊗ e_b`` in ``w(e_k)``.

    ``w(x) = sum_{i,j} Pinv[i, j] (x e_i) ⊗ e_j``.
    """
    Q = _pairing_inverse(A)
    return np.einsum("kia,ib->kab", A.mult, Q)


def coproduct_matrix(A: FrobeniusAlgebra) -> np.ndarray:
    """Coproduct as an ``n^2 x n`` matrix A -> A⊗A."""
    n = A.dim
    return derive_coproduct(A).reshape(n, n * n).T.copy()


def handle_operator(A: FrobeniusAlgebra) -> np.ndarray:
    """h = m ∘ w as an ``n x n`` matrix."""
    return A.mult_matrix @ coproduct_matrix(A)


def orthonormalizer(A: FrobeniusAlgebra) -> np.ndarray:
    """Upper-triangular ``R`` with ``G = R^H R``; ``x -> R x`` maps to orthonormal coordinates."""
    G = hermitian_gram(A).matrix
    L = np.linalg.cholesky((G + G.conj().T) / 2)
    return L.conj().T


def structure_norms(A: FrobeniusAlgebra) -> dict[str, float]:
    """Operator norms of m, trace, w and u with respect to the Gram inner product."""
    R = orthonormalizer(A)
    Rinv = np.linalg.inv(R)
    R2, R2inv = np.kron(R, R), np.kron(Rinv, Rinv)
    u = derive_unit(A)
    return {
        "m": float(np.linalg.norm(R @ A.mult_matrix @ R2inv, 2)),
        "theta": float(np.linalg.norm(A.trace @ Rinv)),
        "w": float(np.linalg.norm(R2 @ coproduct_matrix(A) @ Rinv, 2)),
        "u": float(np.linalg.norm(R @ u)),
    }
