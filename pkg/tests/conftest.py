import random

import numpy as np
import pytest
import sympy
from hypothesis import settings

from coarse_complex import fixtures as F
from coarse_complex.complex import build_simplicial

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def random_complex(seed: int, max_cells: int = 200):
    """Random simplicial complex (dim <= 3) with at most ``max_cells`` cells."""
    rng = random.Random(seed)
    while True:
        n = rng.randint(3, 14)
        facets = []
        for _ in range(rng.randint(1, 3 * n)):
            k = rng.randint(1, min(4, n))
            facets.append(tuple(rng.sample(range(n), k)))
        K = build_simplicial(facets, name=f"random{seed}")
        if len(K.cells()) <= max_cells:
            return K


def exact_rank(op) -> int:
    """Oracle: sympy rank of the dense integer matrix."""
    if op.shape[0] == 0 or op.shape[1] == 0:
        return 0
    return sympy.Matrix(op.to_fraction_rows()).rank()


def exact_betti(K, q: int) -> int:
    n_q = len(K.cells(q))
    r_down = exact_rank(K.boundary_matrix(q - 1)) if q > 0 else 0
    r_up = exact_rank(K.boundary_matrix(q)) if K.cells(q + 1) else 0
    return n_q - r_down - r_up


def as_dense(op) -> np.ndarray:
    return op.toarray()


@pytest.fixture(scope="session")
def closed_fixtures():
    return F.all_closed_fixtures()


@pytest.fixture(scope="session")
def fixture_complexes():
    return F.all_fixtures()


_ACCEPTANCE: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" in report.nodeid and report.when == "call":
        n = int(report.nodeid.split("test_criterion_")[1][:2])
        _ACCEPTANCE[n] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    import test_acceptance

    terminalreporter.section("acceptance criteria")
    for n, title in test_acceptance.CRITERIA.items():
        outcome = _ACCEPTANCE.get(n, "not run")
        mark = "PASS" if outcome == "passed" else "FAIL" if outcome == "failed" else outcome.upper()
        terminalreporter.write_line(f"criterion {n:2d}: {mark}  {title}")
