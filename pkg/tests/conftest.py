import math

import numpy as np
import pytest

from vft2d.frobenius import FrobeniusAlgebra
from vft2d.spectral import build_spectral_vft
from vft2d.yang_mills import build_datum, ym_vft

# filled by tests/test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture(scope="session")
def trivial():
    return build_spectral_vft([(0.0, FrobeniusAlgebra.trivial())])


@pytest.fixture(scope="session")
def su2():
    return ym_vft(build_datum("a1"), 40)


@pytest.fixture(scope="session")
def su2_small():
    return ym_vft(build_datum("a1"), 12)


@pytest.fixture(scope="session")
def u1():
    return ym_vft(build_datum("u1"), 40)


@pytest.fixture(scope="session")
def mixed():
    """Finite theory with multi-dimensional, non-diagonal-basis blocks."""
    rng = np.random.default_rng(7)
    S = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return build_spectral_vft(
        [
            (0.0, FrobeniusAlgebra.cyclic_group(2)),
            (1.0, FrobeniusAlgebra.cyclic_group(3, 2.0).change_basis(S)),
            (2.5, FrobeniusAlgebra.direct_sum(FrobeniusAlgebra.scalar(0.5, 2.0), FrobeniusAlgebra.cyclic_group(2))),
        ]
    )


def rel_err(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b), initial=0.0)) / max(1.0, float(np.max(np.abs(b), initial=0.0)))


def su2_series(genus: int, s: complex, c_max: float = math.inf) -> complex:
    """Direct SU(2) heat-kernel series: sum over j of (2j+1)^(2-2g) exp(-s j(j+1))."""
    total, m = 0j, 0
    while True:
        c = m * (m + 2) / 4
        if c > c_max:
            return total
        term = (m + 1) ** (2 - 2 * genus) * np.exp(-s * c)
        total += term
        if math.isinf(c_max) and abs(term) < 1e-30 and m > 10:
            return total
        m += 1
