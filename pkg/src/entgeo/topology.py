"""Empirical testers for divergence-based convergence on the state space.

A sequence converges to rho in the I sense when S(rho_i, rho) -> 0 and in
the rI sense when S(rho, rho_i) -> 0.  Both are strictly finer than norm
convergence (I-convergence implies rI-convergence implies norm convergence,
never the reverse in a noncommutative algebra), and taking a closure in
either sense cannot lower the infimum of the divergence from a set.

These facts are sequence-level and testable; the testers here work on a
finite window and report converging / diverging / inconclusive verdicts
over the tail half of the sampled indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import State, norm
from .entropy import omega_divergence
from .spectral import ordered_leq, support_projection

DEFAULT_WINDOW = 200


@dataclass(frozen=True)
class StateSequence:
    """A lazily evaluated sequence of states (1-based indexing)."""

    generator: Callable[[int], State]
    length: int | None = None

    @staticmethod
    def from_states(states: Sequence[State]) -> "StateSequence":
        states = list(states)
        return StateSequence(lambda i: states[i - 1], length=len(states))

    def __call__(self, i: int) -> State:
        if self.length is not None and not (1 <= i <= self.length):
            raise IndexError(f"index {i} outside 1..{self.length}")
        return self.generator(i)


@dataclass(frozen=True)
class ConvergenceReport:
    verdict: str  # "converging" | "diverging" | "inconclusive"
    trace: tuple[float, ...]
    tail_max: float
    tail_min: float


def omega_converges(
    seq: StateSequence,
    rho: State,
    omega: str,
    N: int = DEFAULT_WINDOW,
    eps: float = 1e-3,
) -> ConvergenceReport:
    """Empirical convergence verdict from the divergence trace.

    Converging when the whole tail window [N/2, N] sits below eps,
    diverging when it stays at or above eps, inconclusive otherwise.
    """
    if N < 1:
        raise ValueError("window must contain at least one index")
    if seq.length is not None:
        N = min(N, seq.length)
    trace = tuple(float(omega_divergence(rho, seq(i), omega)) for i in range(1, N + 1))
    tail = trace[max(N // 2 - 1, 0):]
    tail_max = max(tail)
    tail_min = min(tail)
    if tail_max < eps:
        verdict = "converging"
    elif tail_min >= eps:
        verdict = "diverging"
    else:
        verdict = "inconclusive"
    return ConvergenceReport(verdict, trace, tail_max, tail_min)


def norm_converges(
    seq: StateSequence, rho: State, N: int = DEFAULT_WINDOW, eps: float = 1e-3
) -> ConvergenceReport:
    """Same verdict logic on the trace-norm distance."""
    if seq.length is not None:
        N = min(N, seq.length)
    trace = tuple(
        norm(rho.elem - seq(i).elem, "trace") for i in range(1, N + 1)
    )
    tail = trace[max(N // 2 - 1, 0):]
    tail_max, tail_min = max(tail), min(tail)
    if tail_max < eps:
        verdict = "converging"
    elif tail_min >= eps:
        verdict = "diverging"
    else:
        verdict = "inconclusive"
    return ConvergenceReport(verdict, trace, tail_max, tail_min)


@dataclass(frozen=True)
class ImplicationReport:
    """Verdicts for I, rI and norm convergence plus any one-way-arrow violations."""

    i_report: ConvergenceReport
    ri_report: ConvergenceReport
    norm_report: ConvergenceReport
    violations: tuple[str, ...]


def implication_suite(
    seq: StateSequence,
    rho: State,
    N: int = DEFAULT_WINDOW,
    eps: float = 1e-3,
) -> ImplicationReport:
    """Check the one-way arrows: I-convergent => rI-convergent => norm-convergent.

    An observed reversal (premise converging, conclusion diverging) is a
    hard failure and is returned in ``violations``.
    """
    rep_i = omega_converges(seq, rho, "I", N, eps)
    rep_ri = omega_converges(seq, rho, "rI", N, eps)
    rep_norm = norm_converges(seq, rho, N, eps)
    violations = []
    if rep_i.verdict == "converging" and rep_ri.verdict == "diverging":
        violations.append("I-convergence without rI-convergence")
    if rep_ri.verdict == "converging" and rep_norm.verdict == "diverging":
        violations.append("rI-convergence without norm convergence")
    return ImplicationReport(rep_i, rep_ri, rep_norm, tuple(violations))


def disk_membership(
    rho: State, sigma: State, eps: float, omega: str, kind: str = "open"
) -> bool:
    """Membership in the open/closed divergence disk of radius eps about rho.

    Radius may be infinite: the open I-disk of infinite radius about rho is
    exactly the face of states supported inside the support of rho.
    """
    if not (eps > 0):
        raise ValueError("radius must be positive (possibly inf)")
    v = float(omega_divergence(rho, sigma, omega))
    if kind == "open":
        return v < eps
    if kind == "closed":
        return v <= eps
    raise ValueError(f"kind must be 'open' or 'closed', got {kind!r}")


@dataclass(frozen=True)
class ClosureInfimumReport:
    inf_set: float
    inf_closure: float
    monotone_ok: bool
    equality_gap: float


def closure_infimum_experiment(
    rho: State,
    sample_set: Callable[[np.random.Generator, int], Sequence[State]],
    sample_closure: Callable[[np.random.Generator, int], Sequence[State]],
    omega: str,
    budget: int,
    *,
    seed=0,
    tol: float = 1e-9,
) -> ClosureInfimumReport:
    """Compare the sampled infimum over a set with the infimum over its closure.

    Closure points cannot lower the infimum: inf over the set must weakly
    dominate inf over closure samples (up to tolerance), and for a family
    with computed closure points the two agree within sampling error.
    """
    rng = np.random.default_rng(seed)
    xs = sample_set(rng, budget)
    cs = sample_closure(rng, budget)
    inf_set = min(float(omega_divergence(rho, s, omega)) for s in xs)
    inf_closure = min(float(omega_divergence(rho, s, omega)) for s in cs)
    return ClosureInfimumReport(
        inf_set=inf_set,
        inf_closure=inf_closure,
        monotone_ok=inf_set >= inf_closure - tol,
        equality_gap=abs(inf_set - inf_closure),
    )
