import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vft2d.errors import DegeneratePairingError, NoUnitError, StructureError
from vft2d.frobenius import (
    FrobeniusAlgebra,
    coproduct_matrix,
    derive_coproduct,
    derive_unit,
    handle_operator,
    hermitian_gram,
    structure_norms,
    validate_frobenius,
)


def test_ym_block_structure():
    d = 3.0
    A = FrobeniusAlgebra.scalar(1 / d, d)
    assert validate_frobenius(A).passed
    assert np.allclose(derive_unit(A), [d])
    assert np.allclose(coproduct_matrix(A), [[1 / d]])
    assert np.allclose(handle_operator(A), [[1 / d**2]])
    assert np.allclose(hermitian_gram(A).matrix, [[1.0]])
    norms = structure_norms(A)
    assert norms["m"] == pytest.approx(1 / d)
    assert norms["w"] == pytest.approx(1 / d)
    assert norms["theta"] == pytest.approx(d)
    assert norms["u"] == pytest.approx(d)


def test_z2_group_algebra():
    A = FrobeniusAlgebra.cyclic_group(2)
    assert validate_frobenius(A).passed
    assert np.allclose(derive_unit(A), [1, 0])
    w = derive_coproduct(A)
    # w(e) = e⊗e + g⊗g
    assert np.allclose(w[0], [[1, 0], [0, 1]])
    assert np.allclose(handle_operator(A), 2 * np.eye(2))
    norms = structure_norms(A)
    # the Gram matrix is the identity, so the group basis is orthonormal
    assert norms["m"] == pytest.approx(np.sqrt(2))
    assert norms["w"] == pytest.approx(np.sqrt(2))
    assert norms["theta"] == pytest.approx(1.0)
    assert norms["u"] == pytest.approx(1.0)


def test_bad_trace_is_rejected():
    A = FrobeniusAlgebra(FrobeniusAlgebra.cyclic_group(2).mult, [1.0, 1.0], FrobeniusAlgebra.cyclic_group(2).conj)
    report = validate_frobenius(A)
    assert not report["pairing_nondegenerate"].passed
    assert not report["gram_positive"].passed
    with pytest.raises(DegeneratePairingError):
        derive_coproduct(A)


def test_negative_trace_fails_positivity():
    report = validate_frobenius(FrobeniusAlgebra.scalar(1.0, -1.0))
    assert report["pairing_nondegenerate"].passed
    assert not report["gram_positive"].passed


def test_axiom_failures_detected():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(2, 2, 2))
    m = m + m.transpose(1, 0, 2)
    report = validate_frobenius(FrobeniusAlgebra(m, [1, 0]))
    assert not report["associativity"].passed
    assert report["commutativity"].passed
    m2 = FrobeniusAlgebra.cyclic_group(2).mult.copy()
    m2[0, 1, 0] = 0.3
    assert not validate_frobenius(FrobeniusAlgebra(m2, [1, 0]))["commutativity"].passed


def test_no_unit():
    A = FrobeniusAlgebra(np.zeros((1, 1, 1)), [1.0])
    with pytest.raises(NoUnitError):
        derive_unit(A)


def test_shapes_are_checked():
    with pytest.raises(StructureError):
        FrobeniusAlgebra(np.zeros((2, 2)), [1, 0])
    with pytest.raises(StructureError):
        FrobeniusAlgebra(np.zeros((2, 2, 2)), [1, 0, 0])


def test_json_round_trip():
    A = FrobeniusAlgebra.cyclic_group(3, 2.0)
    assert FrobeniusAlgebra.from_json(A.to_json()) == A


def test_direct_sum_dims():
    A = FrobeniusAlgebra.direct_sum(FrobeniusAlgebra.scalar(0.5, 2), FrobeniusAlgebra.cyclic_group(2))
    assert A.dim == 3
    assert validate_frobenius(A).passed


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 4))
def test_basis_change_preserves_validity_and_invariants(seed, order):
    rng = np.random.default_rng(seed)
    A = FrobeniusAlgebra.cyclic_group(order, 1.5)
    S = rng.normal(size=(order, order)) + 1j * rng.normal(size=(order, order))
    B = A.change_basis(S)
    assert validate_frobenius(B, 1e-8).passed
    # basis-free quantities: handle spectrum and theta(u)
    hA = np.sort_complex(np.linalg.eigvals(handle_operator(A)))
    hB = np.sort_complex(np.linalg.eigvals(handle_operator(B)))
    assert np.allclose(hA, hB, atol=1e-8)
    assert complex(B.trace @ derive_unit(B)) == pytest.approx(complex(A.trace @ derive_unit(A)), abs=1e-8)
    nA, nB = structure_norms(A), structure_norms(B)
    for k in nA:
        assert nB[k] == pytest.approx(nA[k], rel=1e-7)
