import numpy as np
import pytest

from optdual.numkernel import make_rng


@pytest.fixture
def rng():
    return make_rng(20240601)


def random_frame_matrix(rng, n, d, complex_=False):
    D = rng.standard_normal((n, d))
    if complex_:
        D = D + 1j * rng.standard_normal((n, d))
    return D


def random_spd(rng, n, complex_=False):
    M = random_frame_matrix(rng, n, n + 3, complex_)
    return M @ M.conj().T + 0.1 * np.eye(n)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
