import json

import numpy as np
import pytest

from app.services.cohomology import CohomologyService
from app.services.hermitian_core import HermitianCoreService
from app.services.positivity import PositivityService
from app.services.torus_solver import TorusSolverService


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def hermitian():
    return HermitianCoreService()


@pytest.fixture
def cohomology():
    return CohomologyService()


@pytest.fixture
def positivity(cohomology):
    return PositivityService(cohomology)


@pytest.fixture(scope="module")
def solver():
    return TorusSolverService()


@pytest.fixture
def write_manifold(tmp_path):
    """Write a manifold dict to a JSON file and return its path as a string."""

    def _write(data, name="manifold.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return _write


def torus_manifold(n, A, **torus):
    """Manifold file for omega = A chi on a flat torus, A a scalar."""
    data = {
        "n": n,
        "intersection": [A**k for k in range(n + 1)],
        "subvarieties": [],
    }
    if torus:
        data["torus"] = {"A": {"real": (A * np.eye(n)).tolist()}, **torus}
    return data


@pytest.fixture
def torus_file(write_manifold):
    def _make(n, A, **torus):
        return write_manifold(torus_manifold(n, A, **torus))

    return _make
