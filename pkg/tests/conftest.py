import numpy as np
import pytest

from leo_hybrid.channel import ArrayGeometry, draw_user_stats, steering_matrix
from leo_hybrid.digital_opt import EEProblem
from leo_hybrid.npa import NpaModel
from leo_hybrid.power import ArchitectureSpec, ComponentPowers

# Criterion id -> (passed, detail); filled by test_acceptance.py.
ACCEPTANCE = {}


def crandn(rng, *shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def make_problem(rng, nx=2, ny=2, k=2, gain=1e-10, n0=1e-12, kind="fully_digital", mt=None):
    geometry = ArrayGeometry(nx, ny)
    stats = draw_user_stats(k, gain, 10.0, rng)
    steering = steering_matrix(geometry, stats)
    nt = geometry.nt
    mt = nt if mt is None else mt
    spec = ArchitectureSpec.build(kind, nt, mt)
    return EEProblem(steering, np.full(k, gain), NpaModel(), n0, 0.25e9, spec, ComponentPowers())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"criterion {cid:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
