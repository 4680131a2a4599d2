"""Allowable complex metrics, their square-root densities, and sampled volumes.

A complex symmetric metric ``g`` is allowable when some real basis makes it
diagonal with entries ``lambda_i`` off the closed negative real axis and
``sum |arg lambda_i| < pi``.  Such a basis is searched for through the real
pencil ``(Re g, Im g)``: if a real combination ``cos t Re g + sin t Im g`` is
positive definite, one generalized symmetric eigenproblem diagonalizes both.

Independently, for ``n <= 2`` allowability is decided from the definition: the
real part of ``sqrt(det g) * Lambda^p(g^{-1})`` must be positive definite for
every ``p``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import eigh

from .bordism import Label
from .errors import MixedDensityError, NotAllowableError, SingularMetricError, StructureError
from .jsonio import decode_complex

_SYM_TOL = 1e-12
_ARG_TOL = 1e-12
_PENCIL_ANGLES = 360


@dataclass(frozen=True, eq=False)
class ComplexMetric:
    """Complex symmetric ``n x n`` matrix in a fixed real basis."""

    g: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or not 1 <= g.shape[0] <= 4:
            raise StructureError(f"metric must be square of size 1..4, got shape {g.shape}")
        if np.max(np.abs(g - g.T)) > _SYM_TOL * max(1.0, np.max(np.abs(g))):
            raise StructureError("metric is not symmetric")
        g = (g + g.T) / 2
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def det(self) -> complex:
        return complex(np.linalg.det(self.g))

    def congruent(self, A) -> "ComplexMetric":
        A = np.asarray(A, dtype=float)
        return ComplexMetric(A.T @ self.g @ A)


class Verdict(enum.Enum):
    ALLOWABLE = "allowable"
    NOT_ALLOWABLE = "not_allowable"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Allowability:
    verdict: Verdict
    eigenvalues: tuple[complex, ...] = ()
    reason: str = ""
    method: str = ""
    basis: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def arg_sum(self) -> float:
        return float(sum(abs(cmath.phase(z)) for z in self.eigenvalues))


def _as_metric(g) -> ComplexMetric:
    return g if isinstance(g, ComplexMetric) else ComplexMetric(g)


def _require_nonsingular(g: ComplexMetric) -> None:
    s = np.linalg.svd(g.g, compute_uv=False)
    if s[-1] <= 1e-14 * s[0]:
        raise SingularMetricError("metric is singular")


def _is_diagonal(M) -> bool:
    return not np.any(M - np.diag(np.diag(M)))


def real_diagonalizer(g) -> np.ndarray | None:
    """Real invertible ``P`` with ``P^T g P`` diagonal, or ``None`` if none is found."""
    g = _as_metric(g)
    n = g.n
    if _is_diagonal(g.g):
        return np.eye(n)
    Re, Im = g.g.real, g.g.imag
    scale = max(np.linalg.norm(Re, 2), np.linalg.norm(Im, 2))
    best, best_t = -math.inf, None
    for t in np.linspace(0.0, 2 * math.pi, _PENCIL_ANGLES, endpoint=False):
        w = np.linalg.eigvalsh(math.cos(t) * Re + math.sin(t) * Im)[0]
        if w > best:
            best, best_t = w, t
    if best > 1e-10 * scale:
        t = best_t
        Y = math.cos(t) * Re + math.sin(t) * Im
        X = -math.sin(t) * Re + math.cos(t) * Im
        _, P = eigh(X, Y)
        return P
    # no definite combination: try an eigenbasis of Re^{-1} Im (or Im^{-1} Re)
    for A, B in ((Re, Im), (Im, Re)):
        if np.linalg.cond(A) > 1e12:
            continue
        w, V = np.linalg.eig(np.linalg.solve(A, B))
        if np.max(np.abs(w.imag)) > 1e-10 * max(1.0, np.max(np.abs(w))):
            continue
        # eigenvectors of a real matrix with real eigenvalues can be taken real
        P = np.real(V * np.exp(-1j * np.angle(V[np.argmax(np.abs(V), axis=0), range(n)])))
        if np.linalg.cond(P) > 1e10:
            continue
        D = P.T @ g.g @ P
        off = D - np.diag(np.diag(D))
        if np.max(np.abs(off)) <= 1e-10 * np.max(np.abs(D)):
            return P
    return None


def _arg_verdict(lams: Sequence[complex]) -> tuple[Verdict, str]:
    for z in lams:
        if z.imag == 0 and z.real <= 0 or abs(z.imag) <= 1e-14 * abs(z) and z.real < 0:
            return Verdict.NOT_ALLOWABLE, f"eigenvalue {z} lies on the closed negative real axis"
    total = sum(abs(cmath.phase(z)) for z in lams)
    if total < math.pi - _ARG_TOL:
        return Verdict.ALLOWABLE, ""
    return Verdict.NOT_ALLOWABLE, f"sum of |arg| is {total:.15g}, not below pi"


def pencil_verdict(g) -> Allowability:
    """Verdict from a real diagonalizing basis; UNDETERMINED if none is found."""
    g = _as_metric(g)
    _require_nonsingular(g)
    P = real_diagonalizer(g)
    if P is None:
        return Allowability(Verdict.UNDETERMINED, reason="no real diagonalizing basis found", method="pencil")
    lams = tuple(complex(z) for z in np.diag(P.T @ g.g @ P))
    verdict, reason = _arg_verdict(lams)
    return Allowability(verdict, lams, reason, "pencil", P)


def _compound(M: np.ndarray, p: int) -> np.ndarray:
    """``Lambda^p M`` for ``n <= 2``."""
    n = M.shape[0]
    if p == 0:
        return np.ones((1, 1), dtype=complex)
    if p == 1:
        return M
    if p == 2 and n == 2:
        return np.array([[np.linalg.det(M)]])
    raise ValueError("exterior powers are only assembled for n <= 2")


def exterior_verdict(g) -> Allowability:
    """Positive definiteness of ``Re(sqrt(det g) Lambda^p g^{-1})`` for ``p = 0..n`` (``n <= 2``)."""
    g = _as_metric(g)
    _require_nonsingular(g)
    if g.n > 2:
        return Allowability(Verdict.UNDETERMINED, reason="exterior check implemented for n <= 2", method="exterior")
    root = cmath.sqrt(g.det())
    ginv = np.linalg.inv(g.g)
    for p in range(g.n + 1):
        form = (root * _compound(ginv, p)).real
        form = (form + form.T) / 2
        if np.linalg.eigvalsh(form)[0] <= 0:
            return Allowability(Verdict.NOT_ALLOWABLE, reason=f"real part not positive on degree {p}", method="exterior")
    return Allowability(Verdict.ALLOWABLE, method="exterior")


def allowability(g) -> Allowability:
    """Pencil verdict, falling back to the exterior-algebra check when no basis is found."""
    res = pencil_verdict(g)
    if res.verdict is not Verdict.UNDETERMINED:
        return res
    return exterior_verdict(g)


def _lorentz_root(lams) -> complex | None:
    """Boundary value for a real metric with exactly one negative eigenvalue."""
    if any(abs(z.imag) > 0 for z in lams):
        return None
    neg = [z for z in lams if z.real < 0]
    if len(neg) != 1:
        return None
    return 1j * math.sqrt(abs(np.prod([z.real for z in lams])))


def sqrt_det(g, lorentzian: bool = True) -> complex:
    """``prod lambda_i^{1/2} / |det P|`` in any real diagonalizing basis ``P``.

    For allowable ``g`` this is the root of ``det g`` with positive real part.
    A real metric with one negative eigenvalue (Lorentzian signature) gets the
    limit from metrics with positive imaginary part, ``i sqrt|det g|``.
    """
    g = _as_metric(g)
    _require_nonsingular(g)
    res = pencil_verdict(g)
    if res.verdict is Verdict.ALLOWABLE:
        P = res.basis
        raw = np.prod(np.sqrt(np.array(res.eigenvalues))) / abs(np.linalg.det(P))
        root = cmath.sqrt(g.det())
        return root if abs(raw - root) <= abs(raw + root) else -root
    if lorentzian and not np.any(g.g.imag):
        value = _lorentz_root(tuple(complex(z) for z in np.linalg.eigvalsh(g.g.real)))
        if value is not None:
            return value
    raise NotAllowableError(f"metric is neither allowable nor Lorentzian ({res.reason or res.verdict.value})")


def right_inverse(omega: complex, h, n: int | None = None) -> ComplexMetric:
    """``(omega / vol_h)^{2/n} h``: an allowable metric whose root density is ``omega``."""
    h = np.asarray(h, dtype=float)
    n = h.shape[0] if n is None else n
    if h.shape != (n, n) or np.any(h != h.T) or np.linalg.eigvalsh(h)[0] <= 0:
        raise StructureError("h must be a real positive-definite n x n metric")
    c = complex(omega) / math.sqrt(np.linalg.det(h))
    if not c.real > 0:
        raise NotAllowableError(f"omega / vol_h = {c} must have positive real part")
    return ComplexMetric(c ** (2.0 / n) * h)


@dataclass(frozen=True, eq=False)
class SampledDensity:
    """Per-triangle constant density on a triangulated surface.

    ``components`` lists triangle indices per connected component; by default
    all triangles form one component.
    """

    areas: np.ndarray
    values: np.ndarray
    components: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        areas = np.asarray(self.areas, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if areas.shape != values.shape or areas.ndim != 1:
            raise StructureError("one area and one density value per triangle")
        if np.any(areas < 0):
            raise StructureError("triangle areas must be nonnegative")
        comps = self.components
        if comps is None:
            comps = (tuple(range(len(areas))),)
        comps = tuple(tuple(int(i) for i in c) for c in comps)
        flat = sorted(i for c in comps for i in c)
        if flat != list(range(len(areas))):
            raise StructureError("components must partition the triangles")
        object.__setattr__(self, "areas", areas)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_json(cls, data: dict) -> "SampledDensity":
        try:
            tris = data["triangles"]
            areas = [float(t["area"]) for t in tris]
            values = [decode_complex(t["density"]) for t in tris]
        except (KeyError, TypeError) as exc:
            raise StructureError(f"bad mesh JSON: {exc}") from None
        return cls(np.array(areas), np.array(values), data.get("components"))


def total_volume(d: SampledDensity) -> Label | list[Label]:
    """Integrated density per component: one label, or a list for several components."""
    labels = []
    for comp in d.components:
        idx = list(comp)
        vals = d.values[idx]
        re = vals.real
        if np.all(re > 0):
            total = complex(np.sum(d.areas[idx] * vals))
            labels.append(Label.volume(total))
        elif np.all(re == 0):
            total = complex(0.0, float(np.sum(d.areas[idx] * vals.imag)))
            labels.append(Label.of(total))
        else:
            raise MixedDensityError("a component mixes allowable and non-allowable density values")
    return labels[0] if len(labels) == 1 else labels
