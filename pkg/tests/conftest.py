import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qldpc_transversal import codelib  # noqa: E402

# criterion number -> one summary line, filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in range(1, 10):
        terminalreporter.write_line(ACCEPTANCE_RESULTS.get(number, f"criterion {number}: NOT RUN"))


@pytest.fixture(scope="session")
def steane():
    return codelib.build_named("steane")


@pytest.fixture(scope="session")
def kirkman():
    return codelib.build_named("kirkman")


@pytest.fixture(scope="session")
def k16():
    return codelib.build_named("k16")


@pytest.fixture(scope="session")
def cycle10():
    return codelib.build_named("cycle10")


@pytest.fixture
def rng():
    return np.random.default_rng(20251016)


def random_css(rng, n, m_x, m_z):
    """Random commuting check pair: Z checks drawn from the kernel of the X checks."""
    from qldpc_transversal.css import assemble
    from qldpc_transversal.gf2 import BitMatrix, kernel

    h_x = BitMatrix.from_dense(rng.integers(0, 2, (m_x, n), dtype=np.uint8))
    ker = kernel(h_x).to_dense()
    coeffs = rng.integers(0, 2, (m_z, ker.shape[0]), dtype=np.int64)
    h_z = BitMatrix.from_dense((coeffs @ ker) % 2) if ker.shape[0] else BitMatrix.zeros(0, n)
    return assemble(h_x, h_z, name="random")
