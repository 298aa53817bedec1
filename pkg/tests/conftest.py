import numpy as np
import pytest

from entgeo.algebra import AlgebraSpec, HermElem, State

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)


@pytest.fixture
def mat2():
    return AlgebraSpec((2,))


@pytest.fixture
def mat2_plus_bit():
    return AlgebraSpec((2, 1))


@pytest.fixture
def bit():
    return AlgebraSpec((1, 1))


def elem(algebra, *blocks):
    return HermElem(algebra, [np.asarray(b, dtype=complex) for b in blocks])


def diag_state(*weights):
    alg = AlgebraSpec(tuple([1] * len(weights)))
    return State(HermElem(alg, [np.array([[complex(w)]]) for w in weights]))
