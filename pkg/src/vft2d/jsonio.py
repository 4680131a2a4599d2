"""Complex-number JSON encoding: every complex scalar is a two-element [re, im] list."""
from __future__ import annotations

import math

import numpy as np

from .errors import StructureError


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise StructureError(f"complex number must be [re, im], got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def encode_array(a) -> list:
    """Nested lists of [re, im] pairs mirroring the array shape."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return encode_complex(a.item())
    return [encode_array(x) for x in a]


def decode_array(data, ndim: int) -> np.ndarray:
    """Inverse of :func:`encode_array`; ``ndim`` is the array rank (excluding the pair axis)."""
    raw = np.asarray(data, dtype=float)
    if raw.ndim != ndim + 1 or raw.shape[-1] != 2:
        raise StructureError(
            f"expected a rank-{ndim} array of [re, im] pairs, got shape {raw.shape}"
        )
    return raw[..., 0] + 1j * raw[..., 1]


def encode_float(x: float):
    """JSON has no infinity; unbounded quantities are written as null."""
    return None if math.isinf(x) else float(x)


def decode_float(x) -> float:
    return math.inf if x is None else float(x)
