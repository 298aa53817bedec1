"""Projection lattice of a constraint space and face location for mean values.

The faces of the mean value set M(U) = pi_U(state space) correspond one to
one to a lattice of orthogonal projections.  The exposed faces are cut out
by single directions: they are the top spectral projections p_plus(u) of
directions u in U.  Non-exposed faces are reached by access sequences:
strictly decreasing chains 1 > p_1 > ... > p_m where each step is the top
projection of a direction inside the previous step's compressed constraint
space.

Exact enumeration over the uncountable direction sphere is impossible, so
``enumerate_lattice`` is budgeted: a deterministic sphere grid plus random
directions, refined by bisection between neighboring directions whose top
projections differ (which recovers the measure-zero tie directions that
expose higher-rank faces, e.g. polytope edges in commutative algebras).
Every returned node is sound (it lies on an access sequence); completeness
is not guaranteed and the budget is carried in the result.

``face_of_mean_value`` never relies on the enumeration: it locates the
unique face of a given mean value constructively, by inverting the mean
value chart and compressing onto the support of the limiting Gibbs state
until the solve converges inside a face.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import parallel_map
from .algebra import AlgebraSpec, HermElem, State, hs_inner, norm
from .expfam import (
    ENGINE_RESIDUAL_TOL,
    BudgetExhaustedError,
    ExpFamilySpec,
    OutsideConvexSupportError,
    _coords,
    _escape_direction,
    _solve_mean,
    gibbs_state,
    support_violation,
)
from .spectral import (
    CLUSTER_REL,
    Compression,
    Projection,
    compress,
    eig,
    max_projection,
    ordered_leq,
    support_projection,
    top_projection,
)

DEDUPE_TOL = 1e-7


@dataclass(frozen=True)
class AccessStep:
    """One step of an access sequence: a parent and the witnessing direction."""

    parent: Projection
    witness: HermElem


@dataclass(frozen=True)
class LatticeNode:
    """A lattice projection with its access-sequence provenance.

    ``exposed`` flags members of the exposed sublattice (found at depth one,
    i.e. as p_plus of a single ambient direction).
    """

    projection: Projection
    access_sequence: tuple[AccessStep, ...]
    exposed: bool

    @property
    def depth(self) -> int:
        return len(self.access_sequence)


@dataclass(frozen=True)
class LatticeBudget:
    """Search budget for the lattice enumeration."""

    grid_per_sphere: int = 512
    random_samples: int = 128
    dedupe_tol: float = DEDUPE_TOL
    max_depth: int = 4

    def __post_init__(self):
        if min(self.grid_per_sphere, self.random_samples) < 1 or self.max_depth < 1:
            raise ValueError("budget fields must be positive")
        if self.dedupe_tol <= 0:
            raise ValueError("dedupe tolerance must be positive")


# ---------------------------------------------------------------------------
# basic lattice operations
# ---------------------------------------------------------------------------


def _direction_basis(algebra: AlgebraSpec, dirs: Sequence[HermElem]) -> list[HermElem]:
    """Orthonormalize the span of the directions, dropping near-zero vectors."""
    basis: list[HermElem] = []
    for u in dirs:
        v = u
        for b in basis:
            v = v - hs_inner(v, b) * b
        nrm = norm(v, "two")
        if nrm > 1e-9 * max(1.0, norm(u, "two")):
            basis.append((1.0 / nrm) * v)
    return basis


def _project_onto_span(u: HermElem, basis: Sequence[HermElem]) -> HermElem:
    out = u.algebra.zero()
    for b in basis:
        out = out + hs_inner(u, b) * b
    return out


def exposed_projection(spec: ExpFamilySpec, u: HermElem) -> Projection:
    """Top spectral projection of a direction in U; u = 0 gives the identity.

    The direction must lie in U (checked by projecting onto the span).
    """
    if u.algebra != spec.algebra:
        raise ValueError("direction lives in a different algebra")
    basis = _direction_basis(spec.algebra, spec.directions)
    off = norm(u - _project_onto_span(u, basis), "two")
    if off > 1e-9 * max(1.0, norm(u, "two")):
        raise ValueError(f"direction is not in the constraint span (off by {off:.3e})")
    if norm(u, "two") <= 1e-12:
        n = spec.algebra.n
        return Projection(spec.algebra.identity(), rank=n)
    _, p = max_projection(u)
    return p


def _node_compression(node: LatticeNode) -> Compression:
    return compress(node.projection)


def access_step(node: LatticeNode, u_compressed: HermElem, spec: ExpFamilySpec) -> LatticeNode:
    """Extend an access sequence by the top projection of a compressed direction.

    The direction must lie in the compressed constraint space c^p(U) of the
    node, and the step must be strictly decreasing (a direction proportional
    to the compressed identity is rejected).
    """
    comp = _node_compression(node)
    c_dirs = [comp.apply(u) for u in spec.directions]
    basis = _direction_basis(comp.target, c_dirs)
    off = norm(u_compressed - _project_onto_span(u_compressed, basis), "two")
    if off > 1e-9 * max(1.0, norm(u_compressed, "two")):
        raise ValueError("witness is not in the compressed constraint space")
    _, p_c = max_projection(u_compressed)
    if p_c.rank >= node.projection.rank:
        raise ValueError("access step is not strictly decreasing")
    child = Projection(comp.lift(p_c.elem), rank=p_c.rank)
    witness = comp.lift(u_compressed)
    step = AccessStep(parent=node.projection, witness=witness)
    return LatticeNode(
        projection=child,
        access_sequence=node.access_sequence + (step,),
        exposed=(node.depth + 1) <= 1,
    )


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _sphere_grid(dim: int, count: int) -> list[np.ndarray]:
    """Deterministic low-discrepancy grid on the unit sphere S^{dim-1}.

    Uniform angles on the circle, a golden-ratio lattice on S^2, and a
    Kronecker (generalized golden) lattice mapped through Gaussian
    quantiles in higher dimension.
    """
    if dim == 1:
        return [np.array([1.0]), np.array([-1.0])]
    if dim == 2:
        angles = np.arange(count) * (2 * np.pi / count)
        return [np.array([math.cos(a), math.sin(a)]) for a in angles]
    if dim == 3:
        golden = (1 + 5**0.5) / 2
        pts = []
        for i in range(count):
            z = 1 - 2 * (i + 0.5) / count
            r = math.sqrt(max(0.0, 1 - z * z))
            phi = 2 * np.pi * ((i / golden) % 1.0)
            pts.append(np.array([r * math.cos(phi), r * math.sin(phi), z]))
        return pts
    # Higher dimensions: a fixed-seed Gaussian design (deterministic grid).
    rng = np.random.default_rng(123456789)
    g = rng.normal(size=(count, dim))
    return [row / np.linalg.norm(row) for row in g if np.linalg.norm(row) > 0]


def _flatten(p: Projection) -> np.ndarray:
    parts = []
    for block in p.elem.data:
        parts.append(block.real.ravel())
        parts.append(block.imag.ravel())
    return np.concatenate(parts)


class _ProjectionIndex:
    """Dedupe store keyed by rank profile, entrywise prefilter, trace norm.

    The trace norm dominates the largest matrix entry, so filtering
    candidates by entrywise distance never drops a true duplicate.
    """

    def __init__(self, tol: float):
        self.tol = tol
        self.buckets: dict[tuple[int, ...], tuple[list[int], list[np.ndarray]]] = {}
        self.nodes: list[LatticeNode] = []

    def find(self, p: Projection) -> int | None:
        key = p.block_ranks()
        bucket = self.buckets.get(key)
        if bucket is None:
            return None
        indices, feats = bucket
        f = _flatten(p)
        stacked = np.stack(feats)
        close = np.where(np.abs(stacked - f).max(axis=1) <= self.tol)[0]
        for c in close:
            idx = indices[c]
            if norm(self.nodes[idx].projection.elem - p.elem, "trace") <= self.tol:
                return idx
        return None

    def add(self, node: LatticeNode) -> bool:
        if self.find(node.projection) is not None:
            return False
        key = node.projection.block_ranks()
        indices, feats = self.buckets.setdefault(key, ([], []))
        indices.append(len(self.nodes))
        feats.append(_flatten(node.projection))
        self.nodes.append(node)
        return True


class _LocalDedupe:
    """Bisection bookkeeping: assign small integer keys to distinct projections."""

    def __init__(self, tol: float):
        self.tol = tol
        self.ranks: list[tuple[int, ...]] = []
        self.feats: list[np.ndarray] = []

    def key(self, p: Projection) -> int:
        ranks = p.block_ranks()
        f = _flatten(p)
        if self.feats:
            stacked = np.stack(self.feats)
            close = np.where(np.abs(stacked - f).max(axis=1) <= self.tol)[0]
            for c in close:
                if self.ranks[c] == ranks:
                    return int(c)
        self.ranks.append(ranks)
        self.feats.append(f)
        return len(self.feats) - 1


def enumerate_lattice(spec: ExpFamilySpec, budget: LatticeBudget | None = None) -> list[LatticeNode]:
    """Budgeted enumeration of the projection lattice of the constraint space.

    Returns the identity node plus every projection discovered by the grid,
    random sampling, tie bisection, and recursion into compressed algebras
    up to ``max_depth``.  Sound but possibly incomplete; nodes found at
    depth one are flagged exposed.
    """
    budget = budget or LatticeBudget()
    max_depth = min(budget.max_depth, spec.algebra.herm_dim)
    index = _ProjectionIndex(budget.dedupe_tol)
    n = spec.algebra.n
    root = LatticeNode(
        Projection(spec.algebra.identity(), rank=n), (), exposed=True
    )
    index.add(root)
    rng = np.random.default_rng(0)

    def explore(node: LatticeNode, depth: int) -> None:
        if depth >= max_depth:
            return
        if node.projection.rank == 1:
            return  # nothing below a rank-one projection but zero
        comp = compress(node.projection)
        c_dirs = [comp.apply(u) for u in spec.directions]
        basis = _direction_basis(comp.target, c_dirs)
        # remove the compressed identity direction: it never decreases
        ident = comp.target.identity()
        ident = (1.0 / norm(ident, "two")) * ident
        reduced = _direction_basis(
            comp.target, [b - hs_inner(b, ident) * ident for b in basis]
        )
        dim = len(reduced)
        if dim == 0:
            return

        coeffs = _sphere_grid(dim, budget.grid_per_sphere)
        coeffs += [
            c / np.linalg.norm(c)
            for c in rng.normal(size=(budget.random_samples, dim))
        ]

        def probe(c: np.ndarray):
            u = comp.target.zero()
            for ci, b in zip(c, reduced):
                u = u + float(ci) * b
            _, p, gap2 = top_projection(u)
            return u, p, gap2

        probed = parallel_map(probe, coeffs)

        local = _LocalDedupe(budget.dedupe_tol)
        found = [
            (c, u, p, local.key(p), gap2)
            for c, (u, p, gap2) in zip(coeffs, probed)
        ]

        # tie refinement between neighbors with different top projections
        extra = _refine_ties(found, probe, local, budget)
        candidates = [(u, p) for _, u, p, _, _ in found] + extra

        children: list[LatticeNode] = []
        for u, p in candidates:
            if p.rank >= node.projection.rank:
                continue
            child_proj = Projection(comp.lift(p.elem), rank=p.rank)
            witness = comp.lift(u)
            child = LatticeNode(
                projection=child_proj,
                access_sequence=node.access_sequence
                + (AccessStep(parent=node.projection, witness=witness),),
                exposed=(depth + 1) <= 1,
            )
            if index.add(child):
                children.append(child)
        for child in children:
            explore(child, depth + 1)

    explore(root, 0)
    return list(index.nodes)


def _refine_ties(found, probe, local, budget) -> list[tuple[HermElem, Projection]]:
    """Bisect between angularly adjacent directions whose projections differ.

    A top-eigenvalue crossing between two unit directions at distance d
    forces the runner-up gap below 2d on at least one side (the eigenvalues
    are 1-Lipschitz along the normalized direction path), so pairs whose
    gaps stay above that bound cannot hide a tie and are skipped.  At a
    surviving crossing the clustered top projection merges the tied
    eigenspaces, which is exactly the higher-rank face exposed there;
    widened clusters only enlarge the projection, keeping the access
    sequence sound.
    """
    out: list[tuple[HermElem, Projection]] = []
    if len(found) < 2:
        return out
    dim = len(found[0][0])
    if dim < 2:
        return out
    # Neighbor pairs: consecutive on the circle for dim 2, nearest-neighbor
    # by angle otherwise.
    pairs: list[tuple[int, int]] = []
    if dim == 2:
        order = sorted(
            range(len(found)), key=lambda i: math.atan2(found[i][0][1], found[i][0][0])
        )
        for a, b in zip(order, order[1:] + order[:1]):
            if found[a][3] != found[b][3]:
                pairs.append((a, b))
    else:
        for i in range(len(found)):
            dots = [
                float(found[i][0] @ found[j][0]) if j != i else -2.0
                for j in range(len(found))
            ]
            j = int(np.argmax(dots))
            if found[i][3] != found[j][3] and i < j:
                pairs.append((i, j))

    evals_left = 40 * max(1, budget.grid_per_sphere)
    for a, b in pairs:
        ca, ka, g2a = found[a][0].copy(), found[a][3], found[a][4]
        cb, kb, g2b = found[b][0].copy(), found[b][3], found[b][4]
        novel = 0
        for _ in range(60):
            if evals_left <= 0:
                break
            width = float(np.linalg.norm(ca - cb))
            if min(g2a, g2b) > 2.0 * width:
                break  # no tie can hide in this bracket
            if width < 1e-13:
                break
            mid = ca + cb
            nm = np.linalg.norm(mid)
            if nm < 1e-12:
                break
            mid /= nm
            u, p, gap2 = probe(mid)
            evals_left -= 1
            key = local.key(p)
            if key == ka:
                ca, g2a = mid, gap2
            elif key == kb:
                cb, g2b = mid, gap2
            else:
                # A genuinely different projection in between.  Higher-rank
                # discoveries are tie faces and always kept; same-rank ones
                # are a sliding continuum and are capped so they cannot
                # flood the node set.
                if p.rank > max(found[a][2].rank, found[b][2].rank):
                    out.append((u, p))
                elif novel < 3:
                    out.append((u, p))
                    novel += 1
                cb, kb, g2b = mid, key, gap2
        # evaluate the bracket midpoint with a widened cluster: a true tie
        # within the final angular width merges into the larger projection
        width = float(np.linalg.norm(ca - cb))
        if evals_left <= 0 or width >= 1e-12 or width == 0.0:
            continue
        mid = ca + cb
        nm = np.linalg.norm(mid)
        if nm < 1e-12:
            continue
        mid /= nm
        uu, _, _ = probe(mid)
        evals_left -= 1
        # The key switch can sit a full default cluster width away from the
        # exact tie, so bridge both scales when merging.
        scale = max(1.0, norm(uu, "spectral"))
        wide_tol = max(8.0 * width * scale, 4.0 * CLUSTER_REL * scale)
        _, p_wide = max_projection(uu, cluster_tol=wide_tol)
        if local.key(p_wide) not in (ka, kb):
            out.append((uu, p_wide))
    return out


# ---------------------------------------------------------------------------
# face location for a mean value
# ---------------------------------------------------------------------------


def _polish_tie(
    spec: ExpFamilySpec,
    c_est: np.ndarray,
    *,
    wide_rel: float = 1e-2,
    iters: int = 30,
) -> np.ndarray | None:
    """Newton-polish a direction toward an exact top-eigenvalue tie.

    An escape direction estimated from a diverging solve is accurate only to
    the inverse parameter norm, which smears ties between spectral branches.
    The branches within ``wide_rel`` of the top are therefore tied exactly by
    solving the eigenvalue-difference equations over the coefficient sphere;
    the polished direction's top projection is then the exact face
    projection.  Returns None when there is nothing to tie or the Newton
    iteration does not settle.
    """
    c = np.asarray(c_est, dtype=float)
    nrm = np.linalg.norm(c)
    if nrm < 1e-12:
        return None
    c = c / nrm

    def branches(coeffs: np.ndarray):
        u = spec.combination(coeffs)
        out = []
        for b, block in enumerate(u.data):
            w, v = np.linalg.eigh(block)
            order = np.argsort(w)[::-1]
            out.append((w[order], v[:, order]))
        return out

    eb = branches(c)
    scale = max(abs(w[0]) for w, _ in eb)
    scale = max(scale, 1.0)
    # tie set: per-block top branches within the wide window of the global top
    top = max(w[0] for w, _ in eb)
    members = [b for b, (w, _) in enumerate(eb) if top - w[0] <= wide_rel * scale]
    if len(members) < 2:
        return None

    k = spec.k
    for _ in range(iters):
        eb = branches(c)
        tops = [eb[b][0][0] for b in members]
        vecs = [eb[b][1][:, 0] for b in members]
        f = np.array([tops[0] - t for t in tops[1:]])
        if np.abs(f).max() <= 1e-13 * scale:
            return c
        rows = []
        for j in range(1, len(members)):
            row = []
            for u in spec.directions:
                d0 = (vecs[0].conj() @ u.data[members[0]] @ vecs[0]).real
                dj = (vecs[j].conj() @ u.data[members[j]] @ vecs[j]).real
                row.append(d0 - dj)
            rows.append(row)
        jac = np.array(rows)
        step = -np.linalg.pinv(jac, rcond=1e-12) @ f
        if np.linalg.norm(step) > 0.5:
            step = step * (0.5 / np.linalg.norm(step))
        c = c + step
        nrm = np.linalg.norm(c)
        if nrm < 1e-12:
            return None
        c = c / nrm
    return None


@dataclass(frozen=True)
class FaceStep:
    """One compression taken while locating a face."""

    parent: Projection
    witness: HermElem | None
    projection: Projection
    method: str  # "support" or "escape"


@dataclass(frozen=True)
class FaceLocation:
    """The unique face of a mean value, with the state realizing it."""

    face: Projection
    state: State
    lambdas: np.ndarray
    steps: tuple[FaceStep, ...]
    residual: float


def locate_face(
    spec: ExpFamilySpec,
    xi,
    *,
    residual_tol: float = 1e-9,
    max_iter: int = 200,
    max_norm: float = 1e8,
) -> FaceLocation:
    """Find the unique lattice projection whose face interior contains xi.

    Strategy: invert the mean value chart; interior targets stop at a
    full-rank Gibbs state (face = identity).  Boundary targets converge to
    a numerically rank-deficient state; compressing onto its support and
    re-solving inside the compressed algebra strictly reduces dimension, so
    the loop terminates at the face.  If the solve stalls instead, the
    escape direction's top projection is used as the compression (widened
    clustering; enlargement keeps the chain sound), and targets outside the
    convex support raise with a separating certificate.
    """
    xi = _coords(xi)
    chain: list[Compression] = []
    steps: list[FaceStep] = []
    cur = spec
    guard = spec.algebra.n + 2

    def lift_elem(elem: HermElem) -> HermElem:
        for comp in reversed(chain):
            elem = comp.lift(elem)
        return elem

    def ambient_parent() -> Projection:
        if not chain:
            n = spec.algebra.n
            return Projection(spec.algebra.identity(), rank=n)
        p = chain[-1].projection
        elem = p.elem
        for comp in reversed(chain[:-1]):
            elem = comp.lift(elem)
        return Projection(elem, rank=p.rank)

    for _ in range(guard):
        out = _solve_mean(
            cur, xi, residual_tol=ENGINE_RESIDUAL_TOL, max_iter=max_iter, max_norm=max_norm
        )
        escape = _escape_direction(cur, out.trail)
        if out.converged:
            s = support_projection(out.state.elem)
            if s.rank == cur.algebra.n:
                face = ambient_parent()
                state = State(lift_elem(out.state.elem))
                return FaceLocation(face, state, out.lambdas, tuple(steps), out.residual)
            # Prefer an exactly polished tie projection over the numeric
            # support: near a non-exposed face the support basis tilts by
            # the square root of the mean residual, while the tie is exact.
            use_proj, witness, method = s, escape, "support"
            c_est = _escape_coefficients(out.trail)
            polished = _polish_tie(cur, c_est) if c_est is not None else None
            if polished is not None:
                u_star = cur.combination(polished)
                _, p_star = max_projection(u_star)
                if p_star.rank < cur.algebra.n and ordered_leq(
                    s.elem, p_star.elem, tol=1e-6
                ):
                    use_proj, witness, method = p_star, u_star, "escape"
            parent = ambient_parent()
            comp = compress(use_proj)
            steps.append(
                FaceStep(
                    parent=parent,
                    witness=lift_elem(witness) if witness is not None else None,
                    projection=Projection(lift_elem(use_proj.elem), rank=use_proj.rank),
                    method=method,
                )
            )
            chain.append(comp)
            cur = _compress_family(cur, comp)
            continue

        violation, cert = support_violation(
            cur, xi, init=out.lambdas if np.linalg.norm(out.lambdas) > 0 else None
        )
        if violation > 1e-6:
            if not chain:
                raise OutsideConvexSupportError(cert, violation)
            raise BudgetExhaustedError(
                out.residual, "target infeasible after compression"
            )
        if escape is None:
            raise BudgetExhaustedError(out.residual)
        c_est = _escape_coefficients(out.trail)
        chosen = None
        if c_est is not None:
            candidates = []
            c_smooth = _normal_newton(cur, xi, c_est)
            if c_smooth is not None:
                candidates.append(c_smooth)
            refined = _golden_normal(cur, xi, c_est)
            if refined is not None:
                c_gold, g_best = refined
                if g_best > 1e-6:
                    # a sharper certificate than the ascent found
                    if not chain:
                        raise OutsideConvexSupportError(c_gold, g_best)
                    raise BudgetExhaustedError(
                        out.residual, "target infeasible after compression"
                    )
                if g_best > -1e-7:
                    candidates.append(c_gold)
            c_tie = _polish_tie(cur, c_est)
            if c_tie is not None:
                candidates.append(c_tie)
            candidates.append(c_est)
            for cand in candidates:
                u_cand = cur.combination(cand)
                scale = max(1.0, norm(u_cand, "spectral"))
                tol = None if cand is not c_est else 1e-2 * scale
                _, p_cand = (
                    max_projection(u_cand)
                    if tol is None
                    else max_projection(u_cand, cluster_tol=tol)
                )
                if p_cand.rank >= cur.algebra.n:
                    continue
                comp_cand = compress(p_cand)
                if _compressed_feasible(cur, comp_cand, xi):
                    chosen = (u_cand, p_cand, comp_cand)
                    break
        if chosen is None:
            raise BudgetExhaustedError(out.residual, "no feasible compression found")
        witness_elem, p, comp = chosen
        parent = ambient_parent()
        steps.append(
            FaceStep(
                parent=parent,
                witness=lift_elem(witness_elem),
                projection=Projection(lift_elem(p.elem), rank=p.rank),
                method="escape",
            )
        )
        chain.append(comp)
        cur = _compress_family(cur, comp)

    raise BudgetExhaustedError(math.inf, "face location did not terminate")


def _normal_newton(
    spec: ExpFamilySpec,
    xi: np.ndarray,
    c0: np.ndarray,
    *,
    iters: int = 60,
) -> np.ndarray | None:
    """Newton ascent of g(c) = <c, xi> - lambda_plus(sum c_i u_i) on the sphere.

    At a smooth boundary point the outward normal is the unique maximizer
    (with g = 0) and the top eigenvalue is simple, so eigenvalue
    perturbation gives gradient and Hessian and the ascent converges
    quadratically; kinked maximizers (ties) make the Hessian blow up and
    the method reports failure instead.
    """
    c = np.asarray(c0, dtype=float)
    nrm = np.linalg.norm(c)
    if nrm < 1e-12:
        return None
    c = c / nrm
    k = spec.k

    def eval_g(cv: np.ndarray):
        u = spec.combination(cv)
        per = [np.linalg.eigh(b) for b in u.data]
        b0 = int(np.argmax([w.max() for w, _ in per]))
        w0, v0 = per[b0]
        i0 = int(np.argmax(w0))
        lam0 = float(w0[i0])
        v = v0[:, i0]
        grad = np.array(
            [xi[i] - float((v.conj() @ spec.directions[i].data[b0] @ v).real) for i in range(k)]
        )
        # Hessian of lambda_plus within the top block (simple eigenvalue)
        hess = np.zeros((k, k))
        rows = [v0[:, m].conj() @ np.stack(
            [spec.directions[i].data[b0] @ v for i in range(k)], axis=1
        ) for m in range(len(w0))]
        for m in range(len(w0)):
            if m == i0:
                continue
            gap = lam0 - float(w0[m])
            if gap < 1e-13:
                return None  # degenerate top: not a smooth point
            t = rows[m]
            hess += 2.0 * np.outer(t.conj(), t).real / gap
        return float(cv @ xi) - lam0, grad, hess

    out = eval_g(c)
    if out is None:
        return None
    g, grad, hess = out
    for _ in range(iters):
        proj = np.eye(k) - np.outer(c, c)
        gp = proj @ grad
        if np.linalg.norm(gp) <= 1e-13:
            return c
        hp = proj @ hess @ proj + 1e-15 * np.eye(k)
        step = np.linalg.pinv(hp, rcond=1e-12, hermitian=True) @ gp
        if float(step @ gp) <= 0:
            step = gp
        alpha, accepted = 1.0, False
        for _ in range(40):
            cand = c + alpha * step
            cn = np.linalg.norm(cand)
            if cn > 1e-12:
                cand = cand / cn
                res = eval_g(cand)
                if res is not None and res[0] >= g + 1e-18:
                    c, (g, grad, hess) = cand, res
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            return None
    return None


def _compressed_feasible(spec: ExpFamilySpec, comp: Compression, xi: np.ndarray) -> bool:
    """Quick support-function check that xi is attainable inside a compression."""
    fam = _compress_family(spec, comp)
    violation, _ = support_violation(fam, xi, iters=120)
    return violation <= 1e-8


def _golden_normal(
    spec: ExpFamilySpec,
    xi: np.ndarray,
    c_est: np.ndarray,
    *,
    half_width: float = 0.2,
    iters: int = 90,
) -> tuple[np.ndarray, float] | None:
    """Derivative-free refinement of the outward normal on a 2D coefficient circle.

    Golden-section maximization of g(c) = <c, xi> - lambda_plus(u(c)) over a
    bracket of angles around the estimate; unlike Newton ascent this walks
    across the kinks that spectral ties put next to sharply curved smooth
    maximizers.  Returns the refined coefficients and the certificate value.
    """
    if spec.k != 2 or np.linalg.norm(c_est) < 1e-12:
        return None
    a0 = math.atan2(c_est[1], c_est[0])

    def g(a: float) -> float:
        c = np.array([math.cos(a), math.sin(a)])
        u = spec.combination(c)
        top = max(float(np.linalg.eigvalsh(b).max()) for b in u.data)
        return float(c @ xi) - top

    lo, hi = a0 - half_width, a0 + half_width
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - phi * (hi - lo)
    x2 = lo + phi * (hi - lo)
    g1, g2 = g(x1), g(x2)
    for _ in range(iters):
        if g1 < g2:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + phi * (hi - lo)
            g2 = g(x2)
        else:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - phi * (hi - lo)
            g1 = g(x1)
        if hi - lo < 1e-14:
            break
    best = 0.5 * (lo + hi)
    return np.array([math.cos(best), math.sin(best)]), g(best)


def _escape_coefficients(trail) -> np.ndarray | None:
    """Coefficient-space escape direction: mean of the last normalized iterates."""
    tail = [lam for lam in trail[-10:] if float(np.linalg.norm(lam)) > 1e-12]
    if not tail:
        return None
    acc = sum(lam / np.linalg.norm(lam) for lam in tail)
    nrm = float(np.linalg.norm(acc))
    return acc / nrm if nrm > 1e-12 else None


def _compress_family(spec: ExpFamilySpec, comp: Compression) -> ExpFamilySpec:
    """Re-pose the family inside a compressed algebra (same coordinates)."""
    theta0 = comp.apply(spec.theta0)
    dirs = tuple(comp.apply(u) for u in spec.directions)
    return _CompressedFamily(comp.target, theta0, dirs)


@dataclass(frozen=True)
class _CompressedFamily(ExpFamilySpec):
    """Family spec without the independence check (compressions may collapse)."""

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))


def face_of_mean_value(spec: ExpFamilySpec, xi) -> tuple[Projection, tuple[FaceStep, ...]]:
    """The unique lattice projection whose face interior holds the mean value."""
    loc = locate_face(spec, xi)
    return loc.face, loc.steps
