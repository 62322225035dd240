import numpy as np
import pytest
from hypothesis import settings

from rabiq import ModelParams

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def dense_hamiltonian(p: ModelParams, n_max: int) -> np.ndarray:
    """Element-by-element assembly, independent of the banded builder."""
    dim = 2 * (n_max + 1)
    h = np.zeros((dim, dim))
    for n in range(n_max + 1):
        for s, sig in ((0, 1.0), (1, -1.0)):
            i = 2 * n + s
            h[i, i] = p.omega * n + sig * p.g2 * p.chi * (2 * n + 1)
            if n + 1 <= n_max:
                j = 2 * (n + 1) + s
                h[i, j] = h[j, i] = sig * p.g1 * np.sqrt(n + 1)
            if n + 2 <= n_max:
                j = 2 * (n + 2) + s
                h[i, j] = h[j, i] = sig * p.g2 * np.sqrt((n + 1) * (n + 2))
        h[2 * n, 2 * n + 1] = h[2 * n + 1, 2 * n] = p.Omega / 2
    return h


def dense_ground(p: ModelParams, n_max: int):
    w, v = np.linalg.eigh(dense_hamiltonian(p, n_max))
    return w, v


@pytest.fixture
def dense():
    return dense_hamiltonian
