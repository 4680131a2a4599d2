"""Evaluation at purely imaginary labels and the two topological limits.

Imaginary labels turn ``exp(-s lambda)`` into a phase, so cylinders become
unitary while every other component is unbounded on the full spectrum.  These
operators are kept as block families with a growth report (block norms per
level and exponential certificates) instead of maps on a completed space.
"""
from __future__ import annotations

import math
from dataclasses import replace
from typing import Sequence

import numpy as np

from .bordism import Bordism, Label, LabelKind, _require_valid
from .errors import LorentzianLabelError, NoLorentzianLimitError, NotNormalizedError
from .evaluator import UnboundedBlockOperator, _assemble, _raw_blocks, eval, structures
from .spectral import SpectralVFT, certify_growth

CHECK_DOMAIN = "check_space"
GROWTH_RATES = (0.05, 0.1, 0.5)


def _cutoff(vft: SpectralVFT, lambda_max: float | None) -> int:
    if lambda_max is None:
        return len(vft.levels)
    keep = int(np.searchsorted(np.asarray(vft.levels), lambda_max, side="right"))
    if keep == 0:
        raise ValueError(f"lambda_max={lambda_max} is below the ground level")
    return keep


def _growth_report(vft, X, structs, raw, keep, rates) -> dict:
    """Gram block norms per level (maximized over open components) and certificates."""
    levels = vft.levels[:keep]
    norms = np.zeros(keep)
    for c, blocks in zip(X.components, raw):
        k_in, k_out = len(c.ins), len(c.outs)
        for i in range(keep):
            norms[i] = max(norms[i], structs[i].gram_norm(blocks[i], k_in, k_out))
    certs = [certify_growth(levels, norms, t).to_json() for t in rates] if keep > 1 else []
    return {"levels": list(levels), "block_norms": norms.tolist(), "certificates": certs}


def _lorentzian(vft, X, keep, rates, use_labels: bool) -> UnboundedBlockOperator:
    _require_valid(X)
    for c in X.components:
        if c.closed:
            raise NoLorentzianLimitError(
                "no Lorentzian limit for closed components; every component needs a boundary circle"
            )
        if c.label.kind is LabelKind.VOLUME and use_labels:
            raise LorentzianLabelError("volume labels belong to the Euclidean evaluator")
    structs = structures(vft)[:keep]
    raw = [_raw_blocks(structs, c) for c in X.components]
    bounded = all(c.is_cylinder for c in X.components)
    if use_labels:
        factor = lambda c, lam: np.exp(-c.label.value * lam)
    else:
        factor = lambda c, lam: 1.0
    growth = _growth_report(vft, X, structs, raw, keep, rates)
    return _assemble(
        vft,
        X,
        structs,
        raw,
        factor,
        keep,
        0.0 if keep == len(vft.levels) and vft.complete else math.inf,
        bounded,
        cls=UnboundedBlockOperator,
        domain=None if bounded else CHECK_DOMAIN,
        growth=growth,
    )


def eval_lorentzian(
    vft: SpectralVFT,
    X: Bordism,
    lambda_max: float | None = None,
    rates: Sequence[float] = GROWTH_RATES,
) -> UnboundedBlockOperator:
    """Blocks ``exp(-i zeta lambda) F_lambda`` for imaginary (or zero) labels.

    The cutoff is the caller's choice: no absolute tail bound exists for an
    unbounded operator, so ``tail_bound`` is ``inf`` unless the whole (finite)
    spectrum is kept.
    """
    return _lorentzian(vft, X, _cutoff(vft, lambda_max), rates, use_labels=True)


def short_distance_L0(
    vft: SpectralVFT, X: Bordism, lambda_max: float | None = None, rates: Sequence[float] = GROWTH_RATES
) -> UnboundedBlockOperator:
    """The bare TQFT blocks ``F_lambda``, labels ignored."""
    return _lorentzian(vft, X, _cutoff(vft, lambda_max), rates, use_labels=False)


def unitarity_defect(vft: SpectralVFT, zeta: float, lambda_max: float | None = None) -> float:
    """Largest ``|| B^† B - 1 ||`` over cylinder blocks, in Gram-orthonormal coordinates."""
    op = eval_lorentzian(vft, Bordism.cylinder(Label.imaginary(zeta)), lambda_max, rates=())
    structs = structures(vft)
    defect = 0.0
    for st, B in zip(structs, op.blocks.values()):
        U = st.R @ B @ st.Rinv
        defect = max(defect, float(np.linalg.norm(U.conj().T @ U - np.eye(st.dim), 2)))
    return defect


def _diag_weights(space: SpectralVFT, s) -> np.ndarray:
    return np.concatenate([np.full(b.dim, np.exp(-complex(s) * lam)) for lam, b in space.entries()])


def _kron_diag(weights: Sequence[np.ndarray]) -> np.ndarray:
    d = np.ones(1, dtype=complex)
    for w in weights:
        d = np.kron(d, w)
    return d


def factorization_check(
    vft: SpectralVFT,
    X: Bordism,
    s0: complex | Sequence[complex],
    s1: complex | Sequence[complex],
    eps: float | None = None,
) -> float:
    """Compare ``eval(X)`` with ``exp(-s1 H) L0(X) exp(-s0 H)`` on a common truncation.

    ``s0`` gives one collar volume per incoming circle and ``s1`` one per
    outgoing circle (a scalar is repeated).  Each component of ``X`` carries
    the sum of the collar volumes on its boundary.  Returns the largest entry
    of the difference relative to the largest entry of ``eval(X)``.
    """
    s0 = [complex(s0)] * X.n_in if np.isscalar(s0) else [complex(z) for z in s0]
    s1 = [complex(s1)] * X.n_out if np.isscalar(s1) else [complex(z) for z in s1]
    if len(s0) != X.n_in or len(s1) != X.n_out:
        raise ValueError("one collar volume per boundary circle is required")
    labels = [
        Label.volume(sum(s0[i] for i in c.ins) + sum(s1[j] for j in c.outs)) for c in X.components
    ]
    Xs = X.with_labels(labels)
    L = vft.levels[-1] if eps is None else eval(vft, Xs, eps).lambda_max
    full = eval(vft, Xs, lambda_max=L)
    bare = short_distance_L0(vft, X, L, rates=())
    space = full.space
    E0 = _kron_diag([_diag_weights(space, z) for z in s0])
    E1 = _kron_diag([_diag_weights(space, z) for z in s1])
    lhs = full.to_dense()
    rhs = E1[:, None] * bare.to_dense() * E0[None, :]
    scale = max(1.0, float(np.max(np.abs(lhs), initial=0.0)))
    return float(np.max(np.abs(lhs - rhs), initial=0.0)) / scale


def long_distance_Linf(vft: SpectralVFT, X: Bordism) -> np.ndarray:
    """The TQFT of the kernel block: ``F_0(X)`` as a dense matrix.

    Closed components are allowed here since the kernel is finite-dimensional.
    """
    _require_valid(X)
    if vft.ground != 0.0:
        raise NotNormalizedError(f"ground level is {vft.ground}; normalize spectrum first (shift_spectrum)")
    if any(lam < 0 for lam in vft.levels):
        raise NotNormalizedError("spectrum must be nonnegative")
    structs = structures(vft)[:1]
    raw = [_raw_blocks(structs, c) for c in X.components]
    op = _assemble(vft, X, structs, raw, lambda c, lam: 1.0, 1, 0.0, True)
    return op.to_dense()


def shift_spectrum(vft: SpectralVFT, lambda_shift: float) -> SpectralVFT:
    """Move every level (and the completeness threshold) down by ``lambda_shift``."""
    return replace(
        vft,
        levels=tuple(lam - lambda_shift for lam in vft.levels),
        complete_below=vft.complete_below - lambda_shift,
    )


def ground_projector(vft: SpectralVFT, lambda_max: float | None = None) -> np.ndarray:
    """Dense projector onto the kernel block of a truncation."""
    keep = _cutoff(vft, lambda_max)
    space = vft.truncated(vft.levels[keep - 1])
    return np.diag((np.asarray(space.levels).repeat([b.dim for b in space.blocks]) == 0.0).astype(complex))
