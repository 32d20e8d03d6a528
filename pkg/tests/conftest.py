import numpy as np
import pytest

from eigenbundle import build_sphere_grid, fixture_A, fixture_B, order_globally


@pytest.fixture(scope="session")
def g64():
    return build_sphere_grid(64, 32)


@pytest.fixture(scope="session")
def g32():
    return build_sphere_grid(32, 16)


@pytest.fixture(scope="session")
def g200():
    return build_sphere_grid(200, 100)


@pytest.fixture(scope="session")
def sd_A(g64):
    return order_globally(fixture_A(g64))


@pytest.fixture(scope="session")
def sd_B(g64):
    return order_globally(fixture_B(g64))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unitary(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_rank1(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


# one "criterion N: PASS|FAIL ..." line per acceptance criterion, echoed in the summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
