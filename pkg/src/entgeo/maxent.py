"""Divergence projection onto an exponential family and entropy maximization.

Every state rho has a unique projection onto the divergence closure of an
exponential family: the closure member sharing rho's mean values.  Its
divergence from rho is the entropy distance (the infimum of the relative
entropy over the family), and the projection satisfies the complete
Pythagorean identity S(rho, pi) + S(pi, sigma) = S(rho, sigma) against any
closure member sigma, with a consistent case split when terms are infinite.

Maximizing the von Neumann entropy under linear constraints <u_i, rho> =
xi_i is the same machinery with base point zero: the unique maximizer is
the closure member over xi, of the form R_{pAp}(p(-sum beta_i u_i)p) for
the face projection p of xi, with entropy F_{pAp} + sum beta_i xi_i.

Local maximizers of the entropy distance obey two necessary conditions
checked by :func:`maximizer_certificate`: a rank bound (the face of the
maximizer has dimension at most the family's) and a cutoff identity (the
maximizer is the compressed Gibbs state of its projection's parameters,
with the distance a difference of free energies).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import HermElem, State, hs_inner, norm, random_state
from .entropy import ExtReal, relative_entropy, von_neumann_entropy
from .expfam import (
    BudgetExhaustedError,
    ExpFamilySpec,
    MeanValue,
    _coords,
    free_energy,
    gibbs_state,
    mean_value,
)
from .lattice import FaceStep, locate_face
from .spectral import (
    Projection,
    compress,
    func_calc,
    max_projection,
    ordered_leq,
    support_projection,
)

CLOSURE_MEMBERSHIP_TOL = 1e-6
PYTHAGORAS_GAP_TOL = 1e-7
ORTHOGONALITY_TOL = 1e-9


class ClosureMembershipError(ValueError):
    """A state claimed to lie in the divergence closure does not."""


class OrthogonalityError(ValueError):
    """The Pythagorean orthogonality hypothesis fails; carries the inner product."""

    def __init__(self, inner: float):
        self.inner = float(inner)
        super().__init__(f"orthogonality hypothesis violated (inner product {inner:.3e})")


class ProjectionInternalError(RuntimeError):
    """The projection's support failed to dominate the input state's."""


@dataclass(frozen=True)
class ProjectionResult:
    """Divergence projection of a state onto the closure of a family."""

    pi: State
    face: Projection
    parameters: tuple[float, ...]
    distance: ExtReal
    residual: float
    steps: tuple[FaceStep, ...] = ()


@dataclass(frozen=True)
class MaxEntResult:
    """Unique entropy maximizer under linear constraints."""

    rho: State
    face: Projection
    betas: tuple[float, ...]
    entropy: float
    free_energy_face: float
    residual: float


@dataclass(frozen=True)
class PythagorasReport:
    """The three divergences of the complete Pythagorean identity."""

    s_rho_pi: ExtReal
    s_pi_sigma: ExtReal
    s_rho_sigma: ExtReal
    gap: float
    infinite_consistent: bool


@dataclass(frozen=True)
class MaximizerCertificate:
    """Necessary-condition diagnostics for a local entropy-distance maximizer."""

    rank_bound_ok: bool
    dim_face: int
    dim_family: int
    cutoff_ok: bool
    cutoff_residual: float
    free_energy_outer: float
    free_energy_inner: float
    distance_gap: float
    gradient_norm: float


# ---------------------------------------------------------------------------
# projection and distance
# ---------------------------------------------------------------------------


def rI_projection(spec: ExpFamilySpec, rho: State) -> ProjectionResult:
    """Project a state onto the divergence closure of the family.

    The projection is the unique closure member with the same mean values
    as rho (fibers are linear: rho + U-orthogonal directions project
    identically); its divergence from rho realizes the entropy distance.
    """
    xi = mean_value(rho, spec)
    loc = locate_face(spec, xi)
    distance = relative_entropy(rho, loc.state)
    if distance.is_infinite:
        raise ProjectionInternalError(
            "projection support does not dominate the state; face location failed"
        )
    return ProjectionResult(
        pi=loc.state,
        face=loc.face,
        parameters=tuple(float(x) for x in loc.lambdas),
        distance=distance,
        residual=loc.residual,
        steps=loc.steps,
    )


def entropy_distance(spec: ExpFamilySpec, rho: State) -> ExtReal:
    """Infimum of S(rho, .) over the family; attained at the projection."""
    return rI_projection(spec, rho).distance


def _require_closure_member(spec: ExpFamilySpec, sigma: State) -> ProjectionResult:
    proj = rI_projection(spec, sigma)
    moved = norm(sigma.elem - proj.pi.elem, "trace")
    if moved > CLOSURE_MEMBERSHIP_TOL:
        raise ClosureMembershipError(
            f"state moved {moved:.3e} under its own projection; not a closure member"
        )
    return proj


def pythagoras_check(spec: ExpFamilySpec, rho: State, sigma: State) -> PythagorasReport:
    """Evaluate S(rho, pi) + S(pi, sigma) against S(rho, sigma).

    ``sigma`` must lie in the divergence closure of the family (validated by
    projecting it).  When S(pi, sigma) is infinite the identity degenerates:
    S(rho, sigma) must be infinite too, and the gap is zero by convention.
    """
    _require_closure_member(spec, sigma)
    proj = rI_projection(spec, rho)
    a = proj.distance
    b = relative_entropy(proj.pi, sigma)
    c = relative_entropy(rho, sigma)
    if b.is_infinite or c.is_infinite:
        consistent = b.is_infinite == c.is_infinite
        return PythagorasReport(a, b, c, 0.0 if consistent else math.inf, consistent)
    gap = abs(a.value + b.value - c.value)
    return PythagorasReport(a, b, c, gap, True)


def classic_pythagoras_check(rho: State, sigma: State, tau: State) -> float:
    """Gap of S(rho, sigma) + S(sigma, tau) = S(rho, tau) for invertible sigma, tau.

    Requires the orthogonality hypothesis <rho - sigma, log tau - log sigma>
    = 0 within tolerance; violations raise with the offending inner product.
    """
    for name, s in (("sigma", sigma), ("tau", tau)):
        if support_projection(s.elem).rank != s.algebra.n:
            raise ValueError(f"{name} must be invertible")
    log_sigma = func_calc(math.log, sigma.elem)
    log_tau = func_calc(math.log, tau.elem)
    inner = hs_inner(rho.elem - sigma.elem, log_tau - log_sigma)
    if abs(inner) > ORTHOGONALITY_TOL:
        raise OrthogonalityError(inner)
    lhs = relative_entropy(rho, sigma).value + relative_entropy(sigma, tau).value
    rhs = relative_entropy(rho, tau).value
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# entropy maximization under linear constraints
# ---------------------------------------------------------------------------


def max_entropy(spec: ExpFamilySpec, xi) -> MaxEntResult:
    """Maximize the von Neumann entropy subject to <u_i, rho> = xi_i.

    The family must have base point zero (Gibbs ensembles over U).  The
    maximizer is the closure member over xi; on the boundary of the convex
    support it is rank-deficient, supported on the face projection, and the
    reported inverse temperatures are one (minimum-norm) representative of
    the generally non-unique solution.
    """
    if norm(spec.theta0, "two") > 1e-12:
        raise ValueError("entropy maximization requires a zero base point")
    xi = _coords(xi)
    loc = locate_face(spec, xi)
    betas = tuple(-float(x) for x in loc.lambdas)
    rho = loc.state

    if loc.face.is_identity():
        f_face = free_energy(spec.combination([-b for b in betas]))
    else:
        comp = compress(loc.face)
        f_face = free_energy(comp.apply(spec.combination([-b for b in betas])))
    entropy = f_face + float(np.dot(betas, xi))
    return MaxEntResult(
        rho=rho,
        face=loc.face,
        betas=betas,
        entropy=entropy,
        free_energy_face=f_face,
        residual=loc.residual,
    )


# ---------------------------------------------------------------------------
# local maximizers of the entropy distance
# ---------------------------------------------------------------------------


def _family_dimension(spec: ExpFamilySpec) -> int:
    """Dimension of the family: rank of the gauge-fixed direction Gram."""
    one = spec.algebra.identity()
    n = spec.algebra.n
    tilde = [u - (u.trace() / n) * one for u in spec.directions]
    gram = np.array([[hs_inner(a, b) for b in tilde] for a in tilde])
    return int(np.linalg.matrix_rank(gram, tol=1e-10))


def _traceless_basis(comp) -> list[HermElem]:
    basis = comp.target.herm_basis()
    one = comp.target.identity()
    n = comp.target.n
    out = []
    for b in basis:
        t = b - (b.trace() / n) * one
        nrm = norm(t, "two")
        if nrm > 1e-12:
            out.append((1.0 / nrm) * t)
    return out


def maximizer_certificate(spec: ExpFamilySpec, rho: State) -> MaximizerCertificate:
    """Diagnostics for the two necessary local-maximizer conditions.

    (i) dim of the state-space face of rho is at most the family dimension;
    (ii) rho equals the compressed Gibbs state of its projection's
    parameters, and the distance equals the free-energy difference between
    the projection's face and rho's face; (iii) first-order stationarity of
    the distance inside rho's face via <u, log rho - p theta p>.
    """
    proj = rI_projection(spec, rho)
    p = support_projection(rho.elem)
    dim_face = sum(r * r for r in p.block_ranks()) - 1
    dim_family = _family_dimension(spec)
    rank_bound_ok = dim_face <= dim_family

    theta = spec.point(proj.parameters)
    comp_p = compress(p)
    inner_theta = comp_p.apply(theta)
    f_inner = free_energy(inner_theta)
    cutoff_state = comp_p.lift(gibbs_state(inner_theta).elem)
    cutoff_residual = norm(rho.elem - cutoff_state, "trace")

    q = proj.face
    if q.is_identity():
        f_outer = free_energy(theta)
    else:
        f_outer = free_energy(compress(q).apply(theta))
    distance_gap = abs((f_outer - f_inner) - proj.distance.value)

    log_rho = func_calc(math.log, rho.elem, domain_proj=p)
    grad = comp_p.apply(log_rho - theta)
    gradient_norm = max(
        (abs(hs_inner(u, grad)) for u in _traceless_basis(comp_p)), default=0.0
    )
    return MaximizerCertificate(
        rank_bound_ok=rank_bound_ok,
        dim_face=dim_face,
        dim_family=dim_family,
        cutoff_ok=cutoff_residual <= 1e-6,
        cutoff_residual=cutoff_residual,
        free_energy_outer=f_outer,
        free_energy_inner=f_inner,
        distance_gap=distance_gap,
        gradient_norm=gradient_norm,
    )


@dataclass(frozen=True)
class AscentResult:
    """Trace of a projected-gradient ascent of the entropy distance."""

    states: tuple[State, ...]
    distances: tuple[float, ...]
    certificate: MaximizerCertificate


def _clip_to_state(elem: HermElem) -> State:
    """Project onto the state space: clip negative eigenvalues, renormalize."""
    data = []
    total = 0.0
    for block in elem.data:
        w, v = np.linalg.eigh(block)
        w = np.clip(w, 0.0, None)
        m = (v * w) @ v.conj().T
        data.append(m)
        total += w.sum()
    if total <= 0:
        raise ValueError("clipped element has no positive mass")
    return State(HermElem(elem.algebra, [d / total for d in data]))


def ascend_entropy_distance(
    spec: ExpFamilySpec,
    seed,
    *,
    max_steps: int = 200,
    probes: int = 4,
) -> AscentResult:
    """Best-effort projected-gradient ascent of the entropy distance.

    Climbs rho -> d(rho) using the in-face directional derivative
    <u, log rho - p theta p>, clipping back onto the state space (which may
    reduce rank), with random face-escape probes when the in-face gradient
    vanishes.  Deterministic for a fixed seed; the endpoint comes with its
    maximizer certificate and no global-optimality claim.
    """
    rng = np.random.default_rng(seed)
    rho = random_state(spec.algebra, rng)
    states = [rho]
    dist = [float(entropy_distance(spec, rho))]
    eta = 0.5

    for _ in range(max_steps):
        rho = states[-1]
        proj = rI_projection(spec, rho)
        p = support_projection(rho.elem)
        comp = compress(p)
        theta = spec.point(proj.parameters)
        log_rho = func_calc(math.log, rho.elem, domain_proj=p)
        grad_c = comp.apply(log_rho - theta)
        grad_c = grad_c - (grad_c.trace() / comp.target.n) * comp.target.identity()
        grad = comp.lift(grad_c)
        gnorm = norm(grad, "two")

        improved = False
        if gnorm > 1e-10:
            step = eta
            for _ in range(12):
                try:
                    cand = _clip_to_state(rho.elem + step * grad)
                except ValueError:
                    step /= 2
                    continue
                d_cand = float(entropy_distance(spec, cand))
                if d_cand > dist[-1] + 1e-12:
                    states.append(cand)
                    dist.append(d_cand)
                    improved = True
                    eta = min(1.0, step * 2)
                    break
                step /= 2
        if not improved:
            # face-escape probing: mix toward random full-rank states
            for _ in range(probes):
                tau = random_state(spec.algebra, rng)
                cand = _clip_to_state(0.98 * rho.elem + 0.02 * tau.elem)
                d_cand = float(entropy_distance(spec, cand))
                if d_cand > dist[-1] + 1e-10:
                    states.append(cand)
                    dist.append(d_cand)
                    improved = True
                    break
        if not improved:
            break

    cert = maximizer_certificate(spec, states[-1])
    return AscentResult(tuple(states), tuple(dist), cert)
