"""2d Yang-Mills theories from compact-group root data.

Weights are integer vectors in the fundamental-weight basis and all root data
are exact rationals.  The quadratic Casimir is

    c(mu) = kappa * base * (<mu + delta, mu + delta> - <delta, delta>)

where ``base`` fixes a reference normalization (for SU(2), ``c = j(j+1)``) and
``kappa`` is a user scale.  Rescaling ``c`` only rescales the volume label.
Each irreducible representation contributes a one-dimensional block with
``m = 1/d``, ``theta = d``; representations with equal Casimir share a level.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NonDominantWeightError, UnsupportedGroupError
from .frobenius import FrobeniusAlgebra
from .spectral import GrowthCertificate, SpectralVFT, build_spectral_vft, certify_growth

Vector = tuple[Fraction, ...]

# (gram of fundamental weights, positive roots in the fundamental-weight basis,
#  base normalization, dominant cone is the full lattice)
_TABLE = {
    "trivial": ([], [], Fraction(1), False),
    "u1": ([[1]], [], Fraction(1), True),
    "a1": ([[Fraction(1, 2)]], [[2]], Fraction(1, 2), False),
    "a2": (
        [[Fraction(2, 3), Fraction(1, 3)], [Fraction(1, 3), Fraction(2, 3)]],
        [[2, -1], [-1, 2], [1, 1]],
        Fraction(1, 2),
        False,
    ),
}

# eigenvalues per unit window, as polynomial coefficients in x
_DENSITY = {"trivial": (0.0,), "u1": (1.0,), "a1": (2.0,), "a2": (8.0, 2.0)}


def _vec(v) -> Vector:
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class RootDatum:
    kind: str
    gram: tuple[Vector, ...]
    positive_roots: tuple[Vector, ...]
    simple_roots: tuple[Vector, ...]
    delta: Vector
    kappa: Fraction
    base: Fraction
    abelian_lattice: bool = False

    @property
    def rank(self) -> int:
        return len(self.gram)

    def inner(self, a: Sequence, b: Sequence) -> Fraction:
        return sum(
            (Fraction(a[i]) * self.gram[i][j] * Fraction(b[j]) for i in range(self.rank) for j in range(self.rank)),
            Fraction(0),
        )

    def check(self) -> None:
        """Exact consistency of the root data."""
        r = self.rank
        half = tuple(sum((a[i] for a in self.positive_roots), Fraction(0)) / 2 for i in range(r))
        if half != self.delta:
            raise AssertionError(f"delta {self.delta} is not the half-sum {half}")
        for a in self.positive_roots:
            if self.inner(a, a) <= 0:
                raise AssertionError(f"root {a} has nonpositive length")
        for i in range(r):
            for j in range(r):
                if self.gram[i][j] != self.gram[j][i]:
                    raise AssertionError("gram matrix is not symmetric")
        # leading principal minors
        for k in range(1, r + 1):
            if _det([row[:k] for row in self.gram[:k]]) <= 0:
                raise AssertionError("gram matrix is not positive definite")


def _det(M) -> Fraction:
    M = [list(map(Fraction, row)) for row in M]
    n, det = len(M), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return det


def build_datum(kind: str, kappa=Fraction(1)) -> RootDatum:
    """Root datum for ``trivial``, ``u1``, ``a1`` (SU(2)) or ``a2`` (SU(3))."""
    key = kind.lower()
    if key not in _TABLE:
        raise UnsupportedGroupError(f"unsupported group type {kind!r}; choose from {sorted(_TABLE)}")
    kappa = Fraction(kappa)
    if kappa <= 0:
        raise ValueError("the Casimir scale must be positive")
    gram, roots, base, lattice = _TABLE[key]
    r = len(gram)
    roots = tuple(_vec(a) for a in roots)
    simple = roots[:r] if roots else ()
    delta = tuple(sum((a[i] for a in roots), Fraction(0)) / 2 for i in range(r))
    datum = RootDatum(key, tuple(_vec(row) for row in gram), roots, simple, delta, kappa, base, lattice)
    datum.check()
    return datum


def permute(datum: RootDatum, perm: Sequence[int]) -> RootDatum:
    """Relabel the simple roots: new index ``k`` is old index ``perm[k]``."""
    P = list(perm)
    if sorted(P) != list(range(datum.rank)):
        raise ValueError(f"{perm} is not a permutation of the simple roots")
    re = lambda v: tuple(v[p] for p in P)
    return RootDatum(
        datum.kind,
        tuple(tuple(datum.gram[P[i]][P[j]] for j in range(datum.rank)) for i in range(datum.rank)),
        tuple(re(a) for a in datum.positive_roots),
        tuple(datum.simple_roots[p] for p in P) if datum.simple_roots else (),
        re(datum.delta),
        datum.kappa,
        datum.base,
        datum.abelian_lattice,
    )


@dataclass(frozen=True)
class DominantWeight:
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(x) for x in self.coords))


def _coords(datum: RootDatum, mu) -> tuple[int, ...]:
    c = mu.coords if isinstance(mu, DominantWeight) else tuple(mu)
    if len(c) != datum.rank:
        raise ValueError(f"weight {c} has the wrong rank for {datum.kind}")
    if not datum.abelian_lattice and any(x < 0 for x in c):
        raise NonDominantWeightError(f"weight {c} is not dominant")
    return tuple(int(x) for x in c)


def weyl_dim(datum: RootDatum, mu) -> int:
    mu = _coords(datum, mu)
    shifted = tuple(m + d for m, d in zip(mu, datum.delta))
    num, den = Fraction(1), Fraction(1)
    for a in datum.positive_roots:
        num *= datum.inner(a, shifted)
        den *= datum.inner(a, datum.delta)
    d = num / den
    if d.denominator != 1 or d <= 0:
        raise AssertionError(f"Weyl dimension {d} of {mu} is not a positive integer")
    return int(d)


def casimir(datum: RootDatum, mu) -> Fraction:
    mu = _coords(datum, mu)
    shifted = tuple(m + d for m, d in zip(mu, datum.delta))
    return datum.kappa * datum.base * (datum.inner(shifted, shifted) - datum.inner(datum.delta, datum.delta))


def enumerate_dominant(datum: RootDatum, c_max) -> list[DominantWeight]:
    """Every dominant weight with ``c <= c_max``, sorted by Casimir then coordinates.

    On the dominant cone ``c`` increases in every coordinate, so each axis is
    scanned until ``c`` exceeds ``c_max``.  For U(1) the scan runs both ways.
    """
    c_max = Fraction(c_max)
    if c_max < 0:
        raise ValueError("c_max must be nonnegative")
    r = datum.rank
    found: list[tuple[int, ...]] = []

    def scan(prefix: tuple[int, ...]):
        if len(prefix) == r:
            found.append(prefix)
            return
        rest = (0,) * (r - len(prefix) - 1)
        steps = (range(0, 1 << 30), range(-1, -(1 << 30), -1)) if datum.abelian_lattice else (range(0, 1 << 30),)
        for direction in steps:
            for k in direction:
                if casimir(datum, prefix + (k,) + rest) > c_max:
                    break
                scan(prefix + (k,))

    scan(())
    found.sort(key=lambda mu: (casimir(datum, mu), mu))
    return [DominantWeight(mu) for mu in found]


def ym_vft(datum: RootDatum, c_max) -> SpectralVFT:
    """Theory of all representations with ``c <= c_max``; complete up to ``c_max``."""
    groups: dict[Fraction, list[int]] = {}
    for mu in enumerate_dominant(datum, c_max):
        groups.setdefault(casimir(datum, mu), []).append(weyl_dim(datum, mu))
    entries = [
        (float(c), FrobeniusAlgebra.direct_sum(*[FrobeniusAlgebra.scalar(1.0 / d, float(d)) for d in dims]))
        for c, dims in groups.items()
    ]
    finite = datum.rank == 0
    density = _scaled_density(_DENSITY[datum.kind], datum.kappa)
    return build_spectral_vft(
        entries,
        complete_below=float("inf") if finite else float(c_max),
        density=density,
    )


def _scaled_density(coeffs: Sequence[float], kappa: Fraction) -> tuple[float, ...]:
    """Window-count majorant after multiplying every eigenvalue by ``kappa``.

    A unit window of the scaled spectrum is covered by ``n = ceil(1/kappa)``
    unit windows of the reference one.  Only constant and linear majorants occur.
    """
    a = coeffs[0]
    b = coeffs[1] if len(coeffs) > 1 else 0.0
    n = -(-Fraction(1) // kappa)
    k = float(kappa)
    c1 = n * b / k
    c0 = max(n * a + n * n * b - c1, 0.0)
    return (float(c0), float(c1)) if b else (float(n * a),)


def verify_dc_bound(datum: RootDatum, t: float, c_max) -> GrowthCertificate:
    """Smallest ``C`` with ``d(mu) < C exp(t c(mu))`` over the enumeration.

    Warns when some weight in the shell ``c_max < c <= 2 c_max + 1`` would raise
    the constant, since then the maximizer is not inside the enumeration.
    """
    weights = enumerate_dominant(datum, c_max)
    levels = [float(casimir(datum, mu)) for mu in weights]
    dims = [weyl_dim(datum, mu) for mu in weights]
    cert = certify_growth(levels, dims, t)
    if datum.rank == 0:
        return cert
    shell = [
        mu for mu in enumerate_dominant(datum, 2 * Fraction(c_max) + 1) if casimir(datum, mu) > c_max
    ]
    worst = max((weyl_dim(datum, mu) * math.exp(-t * float(casimir(datum, mu))) for mu in shell), default=0.0)
    if not cert.interior or worst >= cert.C:
        cert = GrowthCertificate(cert.t, cert.C, cert.argmax_lambda, False)
        warnings.warn(
            f"d*exp(-t c) reaches {worst:.6g} beyond c_max={c_max}; increase c_max",
            RuntimeWarning,
            stacklevel=2,
        )
    return cert
