"""Exponential families, free energy, BKM metric and the mean value chart.

A family is the set of normalized matrix exponentials R(theta) =
exp(theta)/tr exp(theta) over an affine parameter space theta0 + U with
U = span(u_1, ..., u_k).  The free energy F(theta) = log tr exp(theta) has
gradient <u, R(theta)> and Hessian equal to the Bogoliubov-Kubo-Mori (BKM)
metric, which this module evaluates in closed form through the logarithmic
mean of the Gibbs state's eigenvalues (no quadrature).

Inverting the mean value chart (finding theta with prescribed mean values)
is done by damped Newton steps on the convex dual F(theta) - <lambda, xi>.
Interior mean values converge to a full-rank Gibbs state; mean values on the
relative boundary drive the parameter off to infinity and are reported as
diverged together with the normalized escape direction.  Mean values outside
the convex support are rejected with a support-function certificate: a
coefficient vector c with <c, xi> exceeding the top spectral value of
sum c_i u_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import AlgebraSpec, HermElem, State, hs_inner, norm
from .spectral import (
    Compression,
    ZERO_REL,
    compress,
    eig,
    kernel_projection,
    max_projection,
    ordered_leq,
    support_projection,
)

NEWTON_MAX_ITER = 200
NEWTON_MAX_NORM = 1e3
NEWTON_RESIDUAL_TOL = 1e-9
ENGINE_RESIDUAL_TOL = 1e-12
OUTSIDE_TOL = 1e-6


class OutsideConvexSupportError(ValueError):
    """Target mean values lie outside the convex support.

    Carries a separating certificate: coefficients c with
    <c, xi> > lambda_plus(sum c_i u_i).
    """

    def __init__(self, coefficients: np.ndarray, violation: float):
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.violation = float(violation)
        super().__init__(
            f"mean values outside the convex support "
            f"(support-function violation {violation:.3e})"
        )


class BudgetExhaustedError(RuntimeError):
    """The solver hit its iteration or norm budget; carries the residual."""

    def __init__(self, residual: float, message: str = "solver budget exhausted"):
        self.residual = float(residual)
        super().__init__(f"{message} (residual {residual:.3e})")


@dataclass(frozen=True)
class ExpFamilySpec:
    """Base point theta0 plus spanning directions u_1, ..., u_k."""

    algebra: AlgebraSpec
    theta0: HermElem
    directions: tuple[HermElem, ...]

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        if self.theta0.algebra != self.algebra:
            raise ValueError("base point lives in a different algebra")
        for u in self.directions:
            if u.algebra != self.algebra:
                raise ValueError("direction lives in a different algebra")
        if not self.directions:
            raise ValueError("a family needs at least one direction")
        gram = np.array(
            [[hs_inner(a, b) for b in self.directions] for a in self.directions]
        )
        w = np.linalg.eigvalsh(gram)
        if w[0] <= 1e-12 * max(1.0, w[-1]):
            raise ValueError("directions are not linearly independent")

    @property
    def k(self) -> int:
        return len(self.directions)

    def combination(self, coeffs: Sequence[float]) -> HermElem:
        """The element sum_i c_i u_i of U."""
        out = self.algebra.zero()
        for c, u in zip(coeffs, self.directions):
            out = out + float(c) * u
        return out

    def point(self, coeffs: Sequence[float]) -> HermElem:
        """theta0 + sum_i c_i u_i."""
        return self.theta0 + self.combination(coeffs)


@dataclass(frozen=True)
class MeanValue:
    """Coordinates (<u_1, rho>, ..., <u_k, rho>) of a state."""

    coords: tuple[float, ...]

    def __iter__(self):
        return iter(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)


def _coords(xi) -> np.ndarray:
    if isinstance(xi, MeanValue):
        return xi.as_array()
    return np.asarray(xi, dtype=float)


@dataclass(frozen=True)
class NewtonReport:
    """Outcome of a mean value chart inversion.

    ``diverged`` means the target sits on the relative boundary of the mean
    value set: the limit Gibbs state is rank-deficient and
    ``escape_direction`` is one normalized divergent parameter direction
    (accumulation directions need not be unique; one representative is
    recorded).
    """

    theta: HermElem
    residual: float
    iterations: int
    diverged: bool
    escape_direction: HermElem | None = None


# ---------------------------------------------------------------------------
# Gibbs states, free energy, derivatives
# ---------------------------------------------------------------------------


@dataclass
class _GibbsSpectral:
    """Per-block eigendata of a parameter and the Gibbs weights it induces.

    Weights are carried together with the parameter eigenvalues so that
    ratios of exponentially small weights stay exact in log space.
    """

    nus: list[np.ndarray]
    vecs: list[np.ndarray]
    weights: list[np.ndarray]
    state: State


def _gibbs_spectral(theta: HermElem) -> _GibbsSpectral:
    per = [np.linalg.eigh(b) for b in theta.data]
    shift = max(float(nu.max()) for nu, _ in per)
    raw = [np.exp(nu - shift) for nu, _ in per]
    z = sum(float(r.sum()) for r in raw)
    weights = [r / z for r in raw]
    data = [(v * w) @ v.conj().T for (nu, v), w in zip(per, weights)]
    return _GibbsSpectral(
        nus=[nu for nu, _ in per],
        vecs=[v for _, v in per],
        weights=weights,
        state=State(HermElem(theta.algebra, data)),
    )


def gibbs_state(theta: HermElem) -> State:
    """R(theta) = exp(theta) / tr exp(theta), a full-rank state.

    Overflow is guarded by subtracting the top spectral value before
    exponentiating; the result is invariant under theta -> theta + c*1.
    """
    return _gibbs_spectral(theta).state


def free_energy(theta: HermElem) -> float:
    """F(theta) = log tr exp(theta); satisfies F(theta + c*1) = F(theta) + c."""
    eigs = np.concatenate([np.linalg.eigvalsh(b) for b in theta.data])
    shift = float(eigs.max())
    return shift + math.log(float(np.exp(eigs - shift).sum()))


def dF(theta: HermElem, u: HermElem) -> float:
    """Directional derivative of the free energy: <u, R(theta)>."""
    return hs_inner(u, gibbs_state(theta).elem)


def _logmean_kernel(nu: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Kernel L[a, b] of logarithmic means of Gibbs weights within one block.

    L(w_a, w_b) = (w_a - w_b)/(log w_a - log w_b) with L(w, w) = w; the log
    difference equals the parameter eigenvalue difference nu_a - nu_b, so
    the kernel stays accurate when weights underflow.
    """
    dnu = nu[:, None] - nu[None, :]
    dw = w[:, None] - w[None, :]
    near = np.abs(dnu) < 1e-9
    return np.where(
        near, 0.5 * (w[:, None] + w[None, :]), dw / np.where(near, 1.0, dnu)
    )


def _bkm_gram(gs: _GibbsSpectral, us: Sequence[HermElem]) -> np.ndarray:
    """Gram matrix of the BKM form for the given directions at a Gibbs state.

    In the parameter eigenbasis the form is sum_{a,b} L(w_a, w_b) *
    |ubar[a,b]|^2-type products with ubar = u - <u, R> 1, which evaluates
    the defining integral over interpolation powers of R exactly.
    """
    k = len(us)
    centers = [hs_inner(u, gs.state.elem) for u in us]
    gram = np.zeros((k, k))
    for b, (nu, v, w) in enumerate(zip(gs.nus, gs.vecs, gs.weights)):
        kernel = _logmean_kernel(nu, w)
        mats = []
        for u, c in zip(us, centers):
            m = v.conj().T @ u.data[b] @ v
            m[np.diag_indices_from(m)] -= c
            mats.append(m)
        for i in range(k):
            for j in range(i, k):
                gram[i, j] += float(np.sum(kernel * (mats[i] * mats[j].conj())).real)
    for i in range(k):
        for j in range(i):
            gram[i, j] = gram[j, i]
    return gram


def bkm(theta: HermElem, u: HermElem, v: HermElem) -> float:
    """BKM metric <<u, v>>_theta, the Hessian of the free energy.

    Symmetric, positive definite on any subspace not containing the
    identity, and <<1, v>> = 0.  Evaluated in closed form through the
    logarithmic-mean kernel of the Gibbs state's eigenvalues.
    """
    gs = _gibbs_spectral(theta)
    return float(_bkm_gram(gs, [u, v])[0, 1])


def mean_value(rho: State, spec: ExpFamilySpec) -> MeanValue:
    """Mean value coordinates (<u_1, rho>, ..., <u_k, rho>)."""
    if rho.algebra != spec.algebra:
        raise ValueError("state lives in a different algebra")
    return MeanValue(tuple(hs_inner(u, rho.elem) for u in spec.directions))


# ---------------------------------------------------------------------------
# Newton engine for the mean value chart
# ---------------------------------------------------------------------------


@dataclass
class _MeanSolve:
    lambdas: np.ndarray
    state: State
    theta: HermElem
    residual: float
    iterations: int
    converged: bool
    trail: list = field(default_factory=list)


def _gauge_fixed(spec: ExpFamilySpec) -> list[HermElem]:
    """Traceless representatives of the directions (Newton gauge fixing)."""
    one = spec.algebra.identity()
    n = spec.algebra.n
    return [u - (u.trace() / n) * one for u in spec.directions]


def _solve_mean(
    spec: ExpFamilySpec,
    xi: np.ndarray,
    *,
    residual_tol: float = ENGINE_RESIDUAL_TOL,
    max_iter: int = NEWTON_MAX_ITER,
    max_norm: float = NEWTON_MAX_NORM,
) -> _MeanSolve:
    """Damped Newton on lambda -> mean(R(theta0 + sum lambda_i u_i)) = xi.

    Backtracks on the convex dual F(theta) - <lambda, xi~>; the Newton
    matrix is the BKM Gram of the gauge-fixed directions, inverted by
    pseudoinverse so dependent directions (after removing the trace part)
    are harmless.
    """
    k = spec.k
    n = spec.algebra.n
    tilde = _gauge_fixed(spec)
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (k,):
        raise ValueError(f"expected {k} mean values, got shape {xi.shape}")
    # <u_i, R> - xi_i equals <tilde_i, R> - xi~_i for xi~_i = xi_i - tr(u_i)/n
    xi_t = xi - np.array([u.trace() / n for u in spec.directions])

    def theta_of(lam: np.ndarray) -> HermElem:
        out = spec.theta0
        for c, u in zip(lam, tilde):
            out = out + float(c) * u
        return out

    def residual_at(lam: np.ndarray) -> tuple[np.ndarray, _GibbsSpectral, HermElem]:
        theta = theta_of(lam)
        gs = _gibbs_spectral(theta)
        r = np.array([hs_inner(u, gs.state.elem) for u in spec.directions]) - xi
        return r, gs, theta

    lam = np.zeros(k)
    trail: list[np.ndarray] = []
    best_res = math.inf
    best = None
    stall = 0
    iterations = 0

    r, gs, theta = residual_at(lam)
    for iterations in range(1, max_iter + 1):
        res = float(np.linalg.norm(r))
        trail.append(lam.copy())

        if res < best_res * 0.9:
            stall = 0
        else:
            stall += 1
        if res < best_res:
            best_res = res
            best = (lam.copy(), gs.state, theta)

        if res <= residual_tol:
            return _MeanSolve(lam.copy(), gs.state, theta, res, iterations, True, trail)
        if float(np.linalg.norm(lam)) > max_norm:
            break
        if stall > 30:
            break

        gram = _bkm_gram(gs, tilde)
        step = -np.linalg.pinv(gram, rcond=1e-14, hermitian=True) @ r
        if float(r @ step) >= 0.0:
            step = -r

        alpha = 1.0
        accepted = False
        for _ in range(50):
            cand = lam + alpha * step
            r_c, gs_c, theta_c = residual_at(cand)
            if float(np.linalg.norm(r_c)) <= res * (1.0 - 1e-4 * alpha) + 1e-16:
                lam, r, gs, theta = cand, r_c, gs_c, theta_c
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break

    lam_b, rho_b, theta_b = best if best is not None else (lam, gs.state, theta)
    return _MeanSolve(lam_b, rho_b, theta_b, best_res, iterations, False, trail)


def _escape_direction(spec: ExpFamilySpec, trail: Sequence[np.ndarray]) -> HermElem | None:
    """Normalized sum(lambda_i u_i), averaged over the last ten iterates."""
    tail = [lam for lam in trail[-10:] if float(np.linalg.norm(lam)) > 1e-12]
    if not tail:
        return None
    acc = spec.algebra.zero()
    count = 0
    for lam in tail:
        u = spec.combination(lam)
        nrm = norm(u, "two")
        if nrm > 1e-12:
            acc = acc + (1.0 / nrm) * u
            count += 1
    if count == 0:
        return None
    nrm = norm(acc, "two")
    if nrm <= 1e-12:
        return None
    return (1.0 / nrm) * acc


def support_violation(
    spec: ExpFamilySpec,
    xi,
    *,
    init: np.ndarray | None = None,
    iters: int = 200,
) -> tuple[float, np.ndarray]:
    """Best found value of the concave certificate g(c) = <c, xi> - lambda_plus(sum c_i u_i).

    A positive value certifies that xi lies outside the convex support;
    supergradient ascent over the unit sphere of coefficient vectors.
    """
    xi = _coords(xi)
    k = spec.k
    starts = [np.eye(k)[i] for i in range(k)] + [-np.eye(k)[i] for i in range(k)]
    nz = np.linalg.norm(xi)
    if nz > 0:
        starts.append(xi / nz)
        starts.append(-xi / nz)
    if init is not None and np.linalg.norm(init) > 0:
        starts.insert(0, np.asarray(init, dtype=float) / np.linalg.norm(init))

    def value(c: np.ndarray) -> float:
        lam_plus, _ = max_projection(spec.combination(c))
        return float(c @ xi) - lam_plus

    best_v = -math.inf
    best_c = starts[0]
    for c0 in starts:
        c = c0.copy()
        for t in range(1, iters + 1):
            lam_plus, p = max_projection(spec.combination(c))
            v = float(c @ xi) - lam_plus
            if v > best_v:
                best_v, best_c = v, c.copy()
            omega = (1.0 / max(p.rank, 1)) * p.elem
            grad = xi - np.array([hs_inner(u, omega) for u in spec.directions])
            c = c + (0.5 / t) * grad
            nc = np.linalg.norm(c)
            if nc < 1e-12:
                break
            c = c / nc
    return best_v, best_c


def invert_mean_chart(
    spec: ExpFamilySpec,
    xi,
    *,
    residual_tol: float = NEWTON_RESIDUAL_TOL,
    max_iter: int = NEWTON_MAX_ITER,
    max_norm: float = NEWTON_MAX_NORM,
) -> NewtonReport:
    """Invert the mean value chart of the family at the coordinates xi.

    Interior targets return a converged report whose Gibbs state has the
    requested mean values; relative-boundary targets return diverged=True
    with the normalized escape direction.  Targets outside the convex
    support raise :class:`OutsideConvexSupportError` with a certificate.
    """
    xi = _coords(xi)
    out = _solve_mean(
        spec,
        xi,
        residual_tol=min(residual_tol, ENGINE_RESIDUAL_TOL),
        max_iter=max_iter,
        max_norm=max_norm,
    )
    escape = _escape_direction(spec, out.trail)
    if out.converged:
        s = support_projection(out.state.elem)
        if s.rank == spec.algebra.n:
            theta = spec.point(out.lambdas)  # original directions; same state
            return NewtonReport(theta, out.residual, out.iterations, False)
        return NewtonReport(
            spec.point(out.lambdas), out.residual, out.iterations, True, escape
        )
    # Not converged: outside the support, or boundary with a budget-bound escape.
    init = out.lambdas if float(np.linalg.norm(out.lambdas)) > 0 else None
    violation, cert = support_violation(spec, xi, init=init)
    if violation > OUTSIDE_TOL:
        raise OutsideConvexSupportError(cert, violation)
    if out.residual <= residual_tol:
        return NewtonReport(
            spec.point(out.lambdas), out.residual, out.iterations, True, escape
        )
    raise BudgetExhaustedError(out.residual, "mean value chart inversion stalled")


# ---------------------------------------------------------------------------
# exponential limits along directions
# ---------------------------------------------------------------------------


def e_geodesic_limit(theta: HermElem, u: HermElem) -> tuple[State, Compression]:
    """Limit of R(theta + t*u) as t grows: the compressed Gibbs state.

    The limit lives on the top spectral projection p of u and equals the
    Gibbs state of p*theta*p in the compressed algebra pAp, lifted back.
    """
    _, p = max_projection(u)
    comp = compress(p)
    limit = gibbs_state(comp.apply(theta))
    return State(comp.lift(limit.elem)), comp


def free_energy_asymptote(theta: HermElem, u: HermElem) -> float:
    """Limit of F(theta + t*u) - t*lambda_plus(u): the compressed free energy."""
    _, p = max_projection(u)
    comp = compress(p)
    return free_energy(comp.apply(theta))


def exp_limit_nonpositive(theta: HermElem, u: HermElem) -> HermElem:
    """Limit of exp(theta + t*u) for directions with nonpositive spectrum.

    Equals the compressed exponential on the kernel projection of u; a
    positive top spectral value makes the limit diverge and is rejected.
    """
    lam_plus, _ = max_projection(u)
    if lam_plus > 1e-12 * max(1.0, norm(u, "spectral")):
        raise ValueError(f"direction has positive top spectral value {lam_plus!r}")
    kern = kernel_projection(u)
    if kern.is_zero():
        return theta.algebra.zero()
    comp = compress(kern)
    compressed = comp.apply(theta)
    w_exp = [np.linalg.eigh(b) for b in compressed.data]
    data = [(v * np.exp(w)) @ v.conj().T for w, v in w_exp]
    return comp.lift(HermElem(compressed.algebra, data))


def monotone_geodesic_divergence(
    rho: State,
    theta: HermElem,
    u: HermElem,
    t_grid: Sequence[float],
) -> list[float]:
    """S(rho, R(theta + t*u)) along a t-grid.

    Requires s(rho) <= p_plus(u) (rho in the exposed face of u) and u not
    proportional to the identity; the values then decrease strictly in t.
    """
    from .entropy import relative_entropy

    n = u.algebra.n
    centered = u - (u.trace() / n) * u.algebra.identity()
    if norm(centered, "two") <= 1e-12 * max(1.0, norm(u, "two")):
        raise ValueError("direction is proportional to the identity")
    _, p = max_projection(u)
    if not ordered_leq(support_projection(rho.elem).elem, p.elem):
        raise ValueError("state is not supported inside the exposed face of the direction")
    return [
        float(relative_entropy(rho, gibbs_state(theta + float(t) * u)))
        for t in t_grid
    ]
