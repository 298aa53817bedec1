"""Reference exponential families used throughout the tests and the CLI.

The Staffelberg and Swallow families live in Mat(2, C) + C; they are the
smallest families exhibiting, respectively, a divergence closure strictly
inside the norm closure (a boundary segment missing except for its top end)
and a non-exposed extreme point of the mean value set (reachable only by a
two-step access sequence).
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraSpec, HermElem
from .expfam import ExpFamilySpec

SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def qubit_plus_bit() -> AlgebraSpec:
    """The algebra Mat(2, C) + C."""
    return AlgebraSpec((2, 1))


def _m2c(block2: np.ndarray, scalar: float) -> HermElem:
    return HermElem(qubit_plus_bit(), [block2, np.array([[scalar]], dtype=complex)])


def staffelberg() -> ExpFamilySpec:
    """Gibbs family of span(sigma1 + 0, sigma2 + 1) in Mat(2, C) + C."""
    alg = qubit_plus_bit()
    return ExpFamilySpec(
        alg,
        alg.zero(),
        (_m2c(SIGMA1, 0.0), _m2c(SIGMA2, 1.0)),
    )


def swallow() -> ExpFamilySpec:
    """Gibbs family of span(sigma1 + 1, sigma2 + 1) in Mat(2, C) + C."""
    alg = qubit_plus_bit()
    return ExpFamilySpec(
        alg,
        alg.zero(),
        (_m2c(SIGMA1, 1.0), _m2c(SIGMA2, 1.0)),
    )


def bloch_point(x: float, y: float, z: float, weight: float = 1.0) -> HermElem:
    """weight * (1 + x sigma1 + y sigma2 + z sigma3)/2 in the qubit block."""
    block = 0.5 * weight * (np.eye(2, dtype=complex) + x * SIGMA1 + y * SIGMA2 + z * SIGMA3)
    return _m2c(block, 0.0)


def diagonal_algebra(n: int) -> AlgebraSpec:
    """The commutative algebra C^n (n one-dimensional blocks)."""
    return AlgebraSpec(tuple([1] * n))


def diagonal_element(values) -> HermElem:
    alg = diagonal_algebra(len(values))
    return HermElem(alg, [np.array([[complex(v)]]) for v in values])


def triangle_family() -> ExpFamilySpec:
    """C^3 with constraints diag(1,-1,0) and diag(0,1,-1); mean value set a triangle."""
    alg = diagonal_algebra(3)
    return ExpFamilySpec(
        alg,
        alg.zero(),
        (diagonal_element([1, -1, 0]), diagonal_element([0, 1, -1])),
    )


def bit_independence(bits: int = 2) -> ExpFamilySpec:
    """Independence family of `bits` binary variables in C^(2^bits).

    Constraints are the bit marginals; Gibbs states factorize, so the
    entropy distance from this family is the multi-information.
    """
    size = 2**bits
    alg = diagonal_algebra(size)
    dirs = []
    for b in range(bits):
        dirs.append(
            diagonal_element([1.0 if (j >> b) & 1 else 0.0 for j in range(size)])
        )
    return ExpFamilySpec(alg, alg.zero(), tuple(dirs))
