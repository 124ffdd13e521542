import math
import sys

import numpy as np
import pytest

from qgs.game import build_artificial_game


def projector(*amplitudes):
    v = np.asarray(amplitudes, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def basis_state(index, dim=4):
    p = np.zeros((dim, dim), dtype=complex)
    p[index, index] = 1
    return p


BB, BS, SB, SS = range(4)

# (|BB> + |SS>)/sqrt(2) and (|BS> + |SB>)/sqrt(2)
RHO_GES = projector(1, 0, 0, 1)
RHO_GES_ANTI = projector(0, 1, 1, 0)
CLASSICAL_MIX = 0.5 * basis_state(BB) + 0.5 * basis_state(SS)


def random_hermitian(rng, n, scale=1.0):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (g + g.conj().T) / 2


def random_state(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    r = g @ g.conj().T
    return r / np.trace(r).real


@pytest.fixture
def game21():
    return build_artificial_game(2, 1)


@pytest.fixture
def game12():
    return build_artificial_game(1, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


SQRT_HALF = math.sqrt(0.5)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
