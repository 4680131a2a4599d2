"""Spectral data of a 2d theory: eigenvalues with one Frobenius block each.

The spectrum of a real theory is countably infinite.  A :class:`SpectralVFT`
stores a finite list of levels together with ``complete_below``: every
eigenvalue ``<= complete_below`` is present in the list.  ``complete_below``
is ``inf`` for a theory whose spectrum is genuinely finite.  Beyond it, the
number of eigenvalues in any window ``(x, x + 1]`` is assumed to be at most
``density(x + 1)`` (a polynomial with the stored coefficients).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateEigenvalueError, InvalidBlockError, StructureError, TruncationError
from .frobenius import DEFAULT_TOL, FrobeniusAlgebra, structure_norms, validate_frobenius
from .jsonio import decode_float, encode_float

# count of eigenvalues per unit window; 2 + x covers rank-1 Yang-Mills
DEFAULT_DENSITY = (2.0, 1.0)

# C is reported with this relative margin so the bound is strict
_STRICT = 1.0 + 1e-12


@dataclass(frozen=True, eq=False)
class SpectralVFT:
    levels: tuple[float, ...]
    blocks: tuple[FrobeniusAlgebra, ...]
    complete_below: float = math.inf
    density: tuple[float, ...] = DEFAULT_DENSITY

    @property
    def ground(self) -> float:
        return self.levels[0]

    @property
    def complete(self) -> bool:
        return math.isinf(self.complete_below)

    def __len__(self) -> int:
        return len(self.levels)

    def entries(self):
        return zip(self.levels, self.blocks)

    def block(self, lam: float) -> FrobeniusAlgebra:
        return self.blocks[self.levels.index(lam)]

    def total_dim(self, lambda_max: float = math.inf) -> int:
        return sum(b.dim for lam, b in self.entries() if lam <= lambda_max)

    def truncated(self, lambda_max: float) -> "SpectralVFT":
        """Keep levels ``<= lambda_max``; the result is complete only up to there."""
        keep = [i for i, lam in enumerate(self.levels) if lam <= lambda_max]
        if not keep:
            raise StructureError(f"no levels at or below {lambda_max}")
        cb = self.complete_below if lambda_max >= self.levels[-1] else min(lambda_max, self.complete_below)
        return SpectralVFT(
            tuple(self.levels[i] for i in keep),
            tuple(self.blocks[i] for i in keep),
            cb,
            self.density,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpectralVFT):
            return NotImplemented
        return (
            self.levels == other.levels
            and self.blocks == other.blocks
            and self.complete_below == other.complete_below
            and tuple(self.density) == tuple(other.density)
        )

    __hash__ = None

    def to_json(self, certificates: Iterable["GrowthCertificate"] = ()) -> dict:
        out = {
            "entries": [{"lambda": lam, "block": b.to_json()} for lam, b in self.entries()],
            "complete_below": encode_float(self.complete_below),
            "density": list(self.density),
        }
        certs = [c.to_json() for c in certificates]
        if certs:
            out["growth_certificates"] = certs
        return out

    @classmethod
    def from_json(cls, data: dict, validate_tol: float = DEFAULT_TOL) -> "SpectralVFT":
        try:
            entries = [(float(e["lambda"]), FrobeniusAlgebra.from_json(e["block"])) for e in data["entries"]]
        except KeyError as exc:
            raise StructureError(f"theory JSON missing field {exc}") from None
        return build_spectral_vft(
            entries,
            validate_tol,
            complete_below=decode_float(data.get("complete_below")),
            density=tuple(data.get("density", DEFAULT_DENSITY)),
        )


def build_spectral_vft(
    entries: Sequence[tuple[float, FrobeniusAlgebra]],
    validate_tol: float = DEFAULT_TOL,
    *,
    complete_below: float = math.inf,
    density: Sequence[float] = DEFAULT_DENSITY,
) -> SpectralVFT:
    entries = sorted(((float(lam), b) for lam, b in entries), key=lambda e: e[0])
    if not entries:
        raise StructureError("a theory needs at least one level")
    for (a, _), (b, _) in zip(entries, entries[1:]):
        if a == b:
            raise DuplicateEigenvalueError(f"eigenvalue {a!r} appears twice")
    for lam, block in entries:
        if not math.isfinite(lam):
            raise StructureError(f"eigenvalue {lam!r} is not finite")
        report = validate_frobenius(block, validate_tol)
        if not report.passed:
            raise InvalidBlockError(lam, report)
    if any(c < 0 for c in density):
        raise StructureError("density majorant coefficients must be nonnegative")
    return SpectralVFT(
        tuple(lam for lam, _ in entries),
        tuple(b for _, b in entries),
        float(complete_below),
        tuple(float(c) for c in density),
    )


@dataclass(frozen=True)
class GrowthCertificate:
    """``norm(lambda) < C * exp(t * lambda)`` over the stored levels."""

    t: float
    C: float
    argmax_lambda: float
    interior: bool

    def bound(self, lam: float) -> float:
        return self.C * math.exp(self.t * lam)

    def to_json(self) -> dict:
        return {"t": self.t, "C": self.C, "argmax_lambda": self.argmax_lambda, "interior": self.interior}

    @classmethod
    def from_json(cls, data: dict) -> "GrowthCertificate":
        return cls(float(data["t"]), float(data["C"]), float(data["argmax_lambda"]), bool(data["interior"]))


def certify_growth(levels: Sequence[float], norms: Sequence[float], t: float) -> GrowthCertificate:
    """Smallest C (with a strictness margin) such that ``norms < C exp(t levels)``."""
    if t <= 0:
        raise ValueError("t must be positive")
    levels = np.asarray(levels, dtype=float)
    scaled = np.asarray(norms, dtype=float) * np.exp(-t * levels)
    i = int(np.argmax(scaled))
    C = float(scaled[i]) * _STRICT + 1e-300
    return GrowthCertificate(float(t), C, float(levels[i]), i < len(levels) - 1)


def level_norms(vft: SpectralVFT) -> np.ndarray:
    """Per level, the largest of the Gram operator norms of m, trace, w and u."""
    return np.array([max(structure_norms(b).values()) for b in vft.blocks])


def check_growth(vft: SpectralVFT, t: float) -> GrowthCertificate:
    return certify_growth(vft.levels, level_norms(vft), t)


@dataclass(frozen=True)
class Cutoff:
    lambda_max: float
    tail_bound: float


def _density_sum(density: Sequence[float], start: float, decay: float) -> float:
    """Upper bound on ``sum_{k>=0} density(start + k + 1) * exp(-decay * (start + k))``.

    Uses ``density(x) <= P (1 + x)^q`` for ``x >= 0`` and closes the series with
    a geometric remainder once the term ratio is below one.
    """
    P = float(sum(abs(c) for c in density))
    q = len(density) - 1
    if P == 0.0:
        return 0.0
    total = 0.0
    k = 0
    while True:
        x = max(start + k + 1, 0.0)
        term = P * (1.0 + x) ** q * math.exp(-decay * (start + k))
        total += term
        ratio = ((2.0 + x) / (1.0 + x)) ** q * math.exp(-decay)
        if ratio < 1.0:
            rest = term * ratio / (1.0 - ratio)
            if rest <= 1e-6 * total or k > 1_000_000:
                return total + rest
        k += 1


def _tail_profile(vft, cert, depth, re_s_min, norms):
    """Neglected-tail bound for every candidate cutoff (one per stored level)."""
    decay = re_s_min - depth * cert.t
    if not decay > 0:
        raise TruncationError(
            f"cannot certify tail: re(s)={re_s_min} must exceed depth*t={depth * cert.t}"
        )
    Cd = cert.C**depth
    levels = np.asarray(vft.levels, dtype=float)
    if norms is None:
        terms = Cd * np.exp(-decay * levels)
    else:
        terms = np.asarray(norms, dtype=float) * np.exp(-re_s_min * levels)
    beyond = 0.0 if vft.complete else Cd * _density_sum(vft.density, vft.complete_below, decay)
    # suffix sums in a fixed order, smallest terms first
    suffix = np.zeros(len(levels) + 1)
    for i in range(len(levels) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + terms[i]
    return suffix[1:] + beyond


def tail_bound_at(
    vft: SpectralVFT,
    cert: GrowthCertificate,
    depth: int,
    re_s_min: float,
    lambda_max: float,
    *,
    norms: Sequence[float] | None = None,
) -> float:
    """Tail bound when every stored level ``<= lambda_max`` is kept."""
    profile = _tail_profile(vft, cert, depth, re_s_min, norms)
    i = int(np.searchsorted(np.asarray(vft.levels), lambda_max, side="right")) - 1
    if i < 0:
        raise StructureError(f"lambda_max={lambda_max} is below the ground level")
    return float(profile[i])


def truncation_cutoff(
    vft: SpectralVFT,
    cert: GrowthCertificate,
    depth: int,
    re_s_min: float,
    eps: float,
    *,
    norms: Sequence[float] | None = None,
) -> Cutoff:
    """Smallest stored level ``lambda_max`` whose neglected tail is below ``eps``.

    Each neglected level contributes at most ``C^depth exp((depth t - re_s_min) lambda)``.
    When ``norms`` (one per stored level) is given, stored levels above the cutoff
    contribute ``norms[i] exp(-re_s_min lambda_i)`` instead, and the certificate is
    only used past ``complete_below``.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    profile = _tail_profile(vft, cert, depth, re_s_min, norms)
    for lam, tail in zip(vft.levels, profile):
        if tail < eps:
            return Cutoff(float(lam), float(tail))
    raise TruncationError(
        f"tail {float(profile[-1]):.3e} beyond the stored spectrum exceeds eps={eps:.3e}; "
        "store more levels"
    )


class RiggedClass(enum.Enum):
    CHECK_SPACE = "check_space"
    HAT_ONLY = "hat_only"
    NEITHER = "neither"


@dataclass(frozen=True)
class DecayDescriptor:
    """Coefficient sequences ``v_lambda = q(lambda) exp(-rate lambda)`` with ``deg q = degree``."""

    rate: float
    degree: int = 0

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")


def classify_rigged(desc: DecayDescriptor) -> RiggedClass:
    """Membership in the small space, the large space only, or neither.

    Against a polynomially growing spectrum, ``exp(tau lambda) v`` is square
    summable for some ``tau > 0`` iff the rate is positive; ``exp(-tau lambda) v``
    is square summable for every ``tau > 0`` iff the rate is nonnegative.  The
    polynomial degree never changes the answer.
    """
    if desc.rate > 0:
        return RiggedClass.CHECK_SPACE
    if desc.rate == 0:
        return RiggedClass.HAT_ONLY
    return RiggedClass.NEITHER
