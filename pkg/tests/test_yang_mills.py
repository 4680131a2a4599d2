import math
from fractions import Fraction
from itertools import permutations

import pytest

from conftest import su2_series
from vft2d.errors import NonDominantWeightError, UnsupportedGroupError
from vft2d.evaluator import eval
from vft2d.bordism import Bordism, Label
from vft2d.frobenius import validate_frobenius
from vft2d.yang_mills import (
    DominantWeight,
    build_datum,
    casimir,
    enumerate_dominant,
    permute,
    verify_dc_bound,
    weyl_dim,
    ym_vft,
)

TYPES = ("trivial", "u1", "a1", "a2")


def test_u1_datum():
    d = build_datum("u1")
    assert d.rank == 1 and d.positive_roots == () and d.delta == (0,)


def test_a1_datum():
    d = build_datum("a1")
    (alpha,) = d.positive_roots
    assert d.inner(alpha, alpha) == 2
    assert d.delta == tuple(x / 2 for x in alpha)
    assert d.inner(d.delta, d.delta) == Fraction(1, 2)


def test_a2_datum():
    d = build_datum("a2")
    assert len(d.positive_roots) == 3
    a1, a2 = d.simple_roots
    assert d.delta == tuple(x + y for x, y in zip(a1, a2))
    for a in d.positive_roots:
        assert d.inner(a, a) == 2


def test_unsupported():
    with pytest.raises(UnsupportedGroupError):
        build_datum("g2")


@pytest.mark.parametrize("kind", TYPES)
def test_zero_weight(kind):
    d = build_datum(kind)
    zero = (0,) * d.rank
    assert weyl_dim(d, zero) == 1
    assert casimir(d, zero) == 0


def test_a1_dims_and_casimir():
    d = build_datum("a1")
    for m in range(12):
        assert weyl_dim(d, (m,)) == m + 1
        j = Fraction(m, 2)
        assert casimir(d, (m,)) == j * (j + 1)


def test_a2_dims():
    d = build_datum("a2")
    assert weyl_dim(d, (1, 0)) == weyl_dim(d, (0, 1)) == 3
    assert weyl_dim(d, (1, 1)) == 8
    assert weyl_dim(d, (3, 0)) == 10
    # (a+1)(b+1)(a+b+2)/2
    for a in range(5):
        for b in range(5):
            assert weyl_dim(d, (a, b)) == (a + 1) * (b + 1) * (a + b + 2) // 2


def test_u1_casimir_scale():
    d = build_datum("u1", Fraction(3, 2))
    assert casimir(d, (-4,)) == Fraction(3, 2) * 16


def test_non_dominant():
    with pytest.raises(NonDominantWeightError):
        weyl_dim(build_datum("a2"), (1, -1))


def test_enumeration_examples():
    assert enumerate_dominant(build_datum("a1"), 0) == [DominantWeight((0,))]
    a1 = enumerate_dominant(build_datum("a1"), 2)
    assert [w.coords for w in a1] == [(0,), (1,), (2,)]
    u1 = enumerate_dominant(build_datum("u1"), 4)
    assert sorted(w.coords[0] for w in u1) == [-2, -1, 0, 1, 2]


def test_enumeration_complete_a2():
    d = build_datum("a2")
    got = {w.coords for w in enumerate_dominant(d, 30)}
    brute = {(a, b) for a in range(40) for b in range(40) if casimir(d, (a, b)) <= 30}
    assert got == brute


def test_ym_vft_examples():
    u1 = ym_vft(build_datum("u1"), 1)
    assert u1.levels == (0.0, 1.0) and [b.dim for b in u1.blocks] == [1, 2]
    a1 = ym_vft(build_datum("a1"), 2)
    assert a1.levels == (0.0, 0.75, 2.0)
    assert [complex(b.mult[0, 0, 0]) for b in a1.blocks] == [1, 0.5, pytest.approx(1 / 3)]
    assert [complex(b.trace[0]) for b in a1.blocks] == [1, 2, 3]
    triv = ym_vft(build_datum("trivial"), 10)
    assert triv.levels == (0.0,) and triv.complete
    for b in ym_vft(build_datum("a2"), 20).blocks:
        assert validate_frobenius(b).passed


def test_collisions_merge():
    vft = ym_vft(build_datum("a2"), 10)
    # the conjugate pair (1,0), (0,1) share a level
    assert vft.blocks[1].dim == 2
    assert len(set(vft.levels)) == len(vft.levels)


@pytest.mark.parametrize("kind", ["a1", "a2"])
def test_permuted_ordering_invariance(kind):
    d = build_datum(kind)
    for perm in permutations(range(d.rank)):
        p = permute(d, perm)
        for w in enumerate_dominant(d, 12):
            mu = tuple(w.coords[i] for i in perm)
            assert weyl_dim(p, mu) == weyl_dim(d, w)
            assert casimir(p, mu) == casimir(d, w)


def test_dc_bound_examples():
    assert 1.0 < verify_dc_bound(build_datum("trivial"), 0.3, 5).C < 1.0 + 1e-9
    c = verify_dc_bound(build_datum("a1"), 0.1, 400)
    direct = max((m + 1) * math.exp(-0.1 * m * (m + 2) / 4) for m in range(60))
    assert c.C == pytest.approx(direct, rel=1e-11) and c.interior
    assert verify_dc_bound(build_datum("a2"), 0.05, 400).interior


def test_dc_bound_boundary_warns():
    with pytest.warns(RuntimeWarning, match="increase c_max"):
        cert = verify_dc_bound(build_datum("a2"), 0.01, 20)
    assert not cert.interior


@pytest.mark.parametrize("kind", ["u1", "a1", "a2"])
def test_dc_bound_literal(kind):
    d = build_datum(kind)
    cert = verify_dc_bound(d, 0.1, 60)
    for w in enumerate_dominant(d, 60):
        assert weyl_dim(d, w) < cert.C * math.exp(0.1 * float(casimir(d, w)))


@pytest.mark.parametrize("g", [0, 1, 2, 3])
def test_su2_partition_matches_series(su2, g):
    op = eval(su2, Bordism.closed(g, Label.volume(1.3 + 0.5j)), eps=1e-10)
    assert abs(op.scalar - su2_series(g, 1.3 + 0.5j)) <= op.tail_bound + 1e-13


@pytest.mark.parametrize("g", [0, 1, 2])
def test_su2_tail_beyond_40_is_large_at_half_volume(su2, g):
    """At s = 0.5 + 0.5i the neglected terms beyond c = 40 alone exceed 1e-12."""
    s = 0.5 + 0.5j
    true_tail = abs(su2_series(g, s) - su2_series(g, s, 40))
    assert true_tail > 1e-12
    op = eval(su2, Bordism.closed(g, Label.volume(s)), lambda_max=40)
    assert true_tail <= op.tail_bound
