"""
Shared realizations and quadruples with hand-checked answers.
"""
from pathlib import Path

import numpy as np
import pytest

from src.models.schemas import Convention
from src.services.quadruple import AdmissibleQuadruple
from src.services.realization import Realization

ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = ROOT / "data" / "corpus"
SQRT3 = np.sqrt(3.0)


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture
def sech_realization() -> Realization:
    """phi(z) = i/z; recovers v(x) = 2 sech(2x) from X = 1."""
    return Realization([[0.0]], [[1.0]], [[1j]], Convention.CONTINUOUS)


@pytest.fixture
def sqrt3_realization() -> Realization:
    """phi(z) = sqrt(3)/(z + i); recovers (2i, 1, sqrt(3), i)."""
    return Realization([[-1j]], [[1.0]], [[SQRT3]], Convention.DISCRETE)


@pytest.fixture
def two_by_two_quadruple() -> AdmissibleQuadruple:
    return AdmissibleQuadruple.create(
        np.diag([1 + 1j, -1 + 1j]),
        np.eye(2),
        np.array([[1.0], [1.0]]),
        np.array([[1.0], [-1.0]]),
    )


@pytest.fixture
def two_by_two_continuous() -> Realization:
    """A = alpha - i theta1 theta1*, B = theta1, C = -i theta2* for the order-2 quadruple (X = I)."""
    A = np.array([[1.0, -1j], [-1j, -1.0]])
    return Realization(A, [[1.0], [1.0]], [[1j, -1j]], Convention.CONTINUOUS)


@pytest.fixture
def two_by_two_discrete() -> Realization:
    """A = -alpha + i theta2 theta2*, B = -i theta2, C = theta1* (X = I)."""
    A = np.array([[-1.0, -1j], [-1j, 1.0]])
    return Realization(A, [[-1j], [1j]], [[1.0, 1.0]], Convention.DISCRETE)


@pytest.fixture
def balanced_quadruple() -> AdmissibleQuadruple:
    """alpha = 2i, theta1 = theta2 = sqrt(2); C_0 = [[-0.6, 0.8], [0.8, 0.6]]."""
    root2 = np.sqrt(2.0)
    return AdmissibleQuadruple.create([[2j]], [[1.0]], [[root2]], [[root2]])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)
