import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vft2d.bordism import Bordism, Label, compose
from vft2d.errors import LorentzianLabelError, NoLorentzianLimitError, NotNormalizedError
from vft2d.evaluator import eval
from vft2d.frobenius import FrobeniusAlgebra, hermitian_gram, structure_norms
from vft2d.lorentzian import (
    CHECK_DOMAIN,
    eval_lorentzian,
    factorization_check,
    ground_projector,
    long_distance_Linf,
    shift_spectrum,
    short_distance_L0,
    unitarity_defect,
)
from vft2d.spectral import build_spectral_vft
from vft2d.yang_mills import build_datum, ym_vft

U1_40 = ym_vft(build_datum("u1"), 40)


def test_zero_cylinder_is_identity(mixed):
    op = eval_lorentzian(mixed, Bordism.cylinder(Label.imaginary(0.0)))
    for B in op.blocks.values():
        assert np.array_equal(B, np.eye(B.shape[0]))
    assert op.bounded


def test_cylinder_phases_su2(su2):
    zeta = 2.3
    op = eval_lorentzian(su2, Bordism.cylinder(Label.imaginary(zeta)), lambda_max=40)
    for lam, B in op.blocks.items():
        assert B[0, 0] == pytest.approx(np.exp(-1j * zeta * lam), abs=1e-14)
    assert op.bounded and op.domain is None


def test_pants_is_unbounded_with_growth_report(su2):
    op = eval_lorentzian(su2, Bordism.pants(Label.imaginary(1.0)), lambda_max=40)
    assert not op.bounded and op.domain == CHECK_DOMAIN
    norms = op.growth["block_norms"]
    expected = [structure_norms(b)["m"] for b in su2.blocks]
    assert np.allclose(norms, expected)
    # Yang-Mills: Gram is 1 and m = 1/d
    assert all(hermitian_gram(b).matrix[0, 0] == pytest.approx(1.0) for b in su2.blocks)
    data = json.loads(json.dumps(op.to_json()))
    assert data["bounded"] is False and data["domain"] == "check_space"
    assert len(data["growth"]["certificates"]) == 3


def test_closed_imaginary_rejected(su2):
    with pytest.raises(NoLorentzianLimitError):
        eval_lorentzian(su2, Bordism.closed(1, Label.imaginary(1.0)))


def test_volume_label_rejected(su2):
    with pytest.raises(LorentzianLabelError):
        eval_lorentzian(su2, Bordism.cylinder(Label.volume(1.0)))


def test_unitarity(su2, mixed):
    assert unitarity_defect(su2, 0.0) == 0.0
    assert unitarity_defect(su2, 3.7, 40) < 1e-12
    assert unitarity_defect(mixed, -1.3) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(-20, 20), st.floats(-20, 20))
def test_phase_group_law(z1, z2):
    vft = U1_40
    a = eval_lorentzian(vft, Bordism.cylinder(Label.imaginary(z1))).blocks
    b = eval_lorentzian(vft, Bordism.cylinder(Label.imaginary(z2))).blocks
    ab = eval_lorentzian(vft, Bordism.cylinder(Label.imaginary(z1 + z2))).blocks
    for lam in a:
        assert np.max(np.abs(b[lam] @ a[lam] - ab[lam])) < 1e-12


def test_lorentzian_functoriality(mixed):
    X = Bordism.copants(Label.imaginary(0.7))
    Y = Bordism.pants(Label.imaginary(-1.1))
    lhs = eval_lorentzian(mixed, compose(X, Y)).to_dense()
    rhs = eval_lorentzian(mixed, Y).to_dense() @ eval_lorentzian(mixed, X).to_dense()
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_continuity_at_zero(mixed):
    X = Bordism.connected(1, 1, 2, Label.imaginary(1e-9))
    L = eval_lorentzian(mixed, X).to_dense()
    L0 = short_distance_L0(mixed, X).to_dense()
    assert np.max(np.abs(L - L0)) < 1e-7


def test_short_distance_examples(trivial, su2):
    cyl = short_distance_L0(su2, Bordism.cylinder(), lambda_max=10)
    assert all(np.array_equal(B, np.eye(1)) for B in cyl.blocks.values())
    assert short_distance_L0(trivial, Bordism.pants()).to_dense()[0, 0] == pytest.approx(1.0)
    disk = short_distance_L0(su2, Bordism.disk(), lambda_max=10).blocks
    for lam, B in disk.items():
        assert B[0, 0] == pytest.approx(np.sqrt(4 * lam + 1))


def test_factorization_examples(su2):
    assert factorization_check(su2, Bordism.cylinder(), 0.3 + 1j, 0.4 - 2j) < 1e-12
    assert factorization_check(su2, Bordism.pants(), (0.5, 0.5), 0.5) < 1e-10
    assert factorization_check(su2, Bordism.codisk(), (), 0.7 + 0.2j) < 1e-12
    assert factorization_check(su2, Bordism.disk(), 0.7 + 0.2j, ()) < 1e-12


def test_long_distance_examples(trivial, su2):
    assert long_distance_Linf(trivial, Bordism.pants()).shape == (1, 1)
    for g in range(4):
        assert long_distance_Linf(su2, Bordism.closed(g)) == pytest.approx(1.0)
    kernel = FrobeniusAlgebra.direct_sum(FrobeniusAlgebra.scalar(1.0, 1.0), FrobeniusAlgebra.scalar(0.5, 2.0))
    vft = build_spectral_vft([(0.0, kernel), (1.0, FrobeniusAlgebra.trivial())])
    M = long_distance_Linf(vft, Bordism.pants())
    expected = np.zeros((2, 4))
    expected[0, 0] = 1.0
    expected[1, 3] = 0.5
    assert np.allclose(M, expected)


def test_long_distance_requires_normalization(su2):
    shifted = shift_spectrum(su2, -1.0)
    with pytest.raises(NotNormalizedError):
        long_distance_Linf(shifted, Bordism.cylinder())


def test_shift_spectrum(su2):
    assert shift_spectrum(su2, 0.0) == su2
    s = shift_spectrum(shift_spectrum(su2, 1.5), 2.0)
    assert s.levels == tuple(lam - 3.5 for lam in su2.levels)
    assert shift_spectrum(shift_spectrum(su2, 2.0), su2.ground - 2.0).ground == 0.0


def test_long_distance_convergence(su2):
    vft = shift_spectrum(su2, su2.ground)
    lam1 = vft.levels[1]
    P0 = ground_projector(vft)
    for s in (1.0, 2.0, 4.0):
        V = eval(vft, Bordism.cylinder(Label.volume(s)), lambda_max=vft.levels[-1]).to_dense()
        assert np.linalg.norm(V - P0, 2) <= np.exp(-s * lam1) * (1 + 1e-12)
