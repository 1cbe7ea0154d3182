import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from laminar.lamination import LeafFamily

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

BUILTINS = {
    "product": LeafFamily.product(),
    "shear": LeafFamily.shear(0.5),
    "exp": LeafFamily.exp(0.2),
    "nonlinear": LeafFamily.nonlinear(0.05),
}


@pytest.fixture(params=list(BUILTINS), ids=list(BUILTINS))
def family(request):
    return BUILTINS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def fd_gradient(psi, z, w, h=1e-7):
    """Central differences along x1, x2, y1, y2."""
    cols = []
    for dz, dw in ((h, 0), (1j * h, 0), (0, h), (0, 1j * h)):
        cols.append((psi(z + dz, w + dw) - psi(z - dz, w - dw)) / (2 * h))
    return np.stack(cols, axis=-1)


# one line per acceptance criterion, printed after the run whatever the capture mode
ACCEPTANCE_LINES = {}


def record_criterion(number: int, title: str, passed: bool, detail: str = ""):
    ACCEPTANCE_LINES[number] = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}" + (
        f": {detail}" if detail else "")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
