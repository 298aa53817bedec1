"""Von Neumann entropy, relative entropy and divergences with support handling.

The relative entropy S(rho, sigma) = tr rho (log rho - log sigma) is finite
exactly when the support of rho is dominated by the support of sigma; the
logarithms are taken by functional calculus on the respective supports.
Infinity is carried as an explicit extended-real marker, never as a large
float, because the support-mismatch logic must be exact.

A near-singular second argument within the spectral zero threshold of
singular is treated as singular, which is conservative: the divergence may
be reported as infinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import HermElem, State, hs_inner, norm
from .spectral import ZERO_REL, eig, ordered_leq, support_projection

NEGATIVE_CLAMP = 1e-9


@dataclass(frozen=True, order=True)
class ExtReal:
    """A nonnegative extended real: a float value or the +infinity marker.

    Arithmetic and comparisons follow extended-real rules (inf == inf).
    Finite values may dip to -1e-9 from roundoff and are clamped to 0;
    anything more negative is rejected.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isinf(v):
            if v < -NEGATIVE_CLAMP:
                raise ValueError(f"extended real {v!r} is negative beyond tolerance")
            v = max(v, 0.0)
        elif v < 0:
            raise ValueError("-inf is not a valid divergence value")
        object.__setattr__(self, "value", v)

    @classmethod
    def infinite(cls) -> "ExtReal":
        return cls(math.inf)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def __float__(self) -> float:
        return self.value

    def __add__(self, other) -> "ExtReal":
        return ExtReal(self.value + float(other))

    __radd__ = __add__

    def __repr__(self) -> str:
        return "ExtReal(inf)" if self.is_infinite else f"ExtReal({self.value!r})"


def _entropy_terms(rho: State) -> tuple[float, object]:
    """(sum of lambda log lambda over the support, spectral form of rho)."""
    sf = eig(rho.elem)
    tol = ZERO_REL * max(1.0, max(abs(v) for v in sf.values))
    acc = 0.0
    for v, p in zip(sf.values, sf.projections):
        if v > tol:
            acc += v * math.log(v) * p.rank
    return acc, sf


def von_neumann_entropy(rho: State) -> float:
    """S(rho) = -tr rho log rho, the logarithm taken on the support of rho.

    Ranges over [0, log n]; zero exactly for pure states.
    """
    acc, _ = _entropy_terms(rho)
    return max(0.0, -acc)


def _support_elem(sf) -> object:
    """Support projection element assembled from a spectral form."""
    tol = ZERO_REL * max(1.0, max(abs(v) for v in sf.values))
    alg = sf.projections[0].algebra
    out = alg.zero()
    for v, p in zip(sf.values, sf.projections):
        if abs(v) > tol:
            out = out + p.elem
    return out


def relative_entropy(rho: State, sigma: State) -> ExtReal:
    """Umegaki relative entropy with support handling.

    Returns +inf unless s(rho) <= s(sigma); otherwise
    tr rho (log rho - log sigma) with support-compressed logarithms.
    Nonnegative, and zero iff rho = sigma.
    """
    rho.elem._check_same(sigma.elem)
    term1, sf_rho = _entropy_terms(rho)
    sf_sigma = eig(sigma.elem)
    if not ordered_leq(_support_elem(sf_rho), _support_elem(sf_sigma)):
        return ExtReal.infinite()

    tol = ZERO_REL * max(1.0, max(abs(v) for v in sf_sigma.values))
    term2 = 0.0
    for v, p in zip(sf_sigma.values, sf_sigma.projections):
        if v > tol:
            term2 += math.log(v) * hs_inner(rho.elem, p.elem)
    return ExtReal(term1 - term2)


def omega_divergence(rho: State, sigma: State, omega: str) -> ExtReal:
    """S^I(rho, sigma) = S(sigma, rho); S^rI(rho, sigma) = S(rho, sigma)."""
    if omega == "I":
        return relative_entropy(sigma, rho)
    if omega == "rI":
        return relative_entropy(rho, sigma)
    raise ValueError(f"omega must be 'I' or 'rI', got {omega!r}")


def divergence_to_set(rho: State, xs: Sequence[State], omega: str) -> ExtReal:
    """Minimum omega-divergence of rho from a finite list of states."""
    if len(xs) == 0:
        raise ValueError("divergence to the empty set is undefined")
    return min((omega_divergence(rho, tau, omega) for tau in xs), key=float)


def pinsker_slack(rho: State, sigma: State) -> ExtReal:
    """Slack 2 S(rho, sigma) - |rho - sigma|_1^2 of the Pinsker-Csiszar bound."""
    s = relative_entropy(rho, sigma)
    if s.is_infinite:
        return ExtReal.infinite()
    t1 = norm(rho.elem - sigma.elem, "trace")
    return ExtReal(2.0 * s.value - t1 * t1)
