"""Acceptance suites: identity and property checks at desk scale.

Each suite checks one contract of the toolkit against an independent
oracle (finite differences, brute-force simplex maximization, polytope face
enumeration, batched divergence sampling) and returns a pass/fail result
with details.  The CLI ``verify`` command and the acceptance tests both run
these; seeds make every run reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import (
    AlgebraSpec,
    EmbeddingSpec,
    HermElem,
    State,
    embed,
    embed_adjoint,
    hs_inner,
    norm,
    random_herm,
    random_state,
    shift_family,
)
from .entropy import pinsker_slack, relative_entropy, von_neumann_entropy
from .expfam import (
    ExpFamilySpec,
    bkm,
    dF,
    e_geodesic_limit,
    exp_limit_nonpositive,
    free_energy,
    free_energy_asymptote,
    gibbs_state,
    mean_value,
)
from .families import (
    SIGMA1,
    SIGMA2,
    bit_independence,
    diagonal_algebra,
    diagonal_element,
    qubit_plus_bit,
    staffelberg,
    swallow,
)
from .figures import family_tables, staffelberg_segment
from .lattice import LatticeBudget, enumerate_lattice
from .maxent import entropy_distance, max_entropy, pythagoras_check, rI_projection
from .spectral import (
    compress,
    eig,
    kernel_projection,
    max_projection,
    support_projection,
)
from .topology import StateSequence, implication_suite, omega_converges


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# batched divergence oracle (independent of the projection machinery)
# ---------------------------------------------------------------------------


def _batch_divergences(rho: State, spec: ExpFamilySpec, lam: np.ndarray) -> np.ndarray:
    """S(rho, R(theta0 + sum lam_j u)) for a batch of coefficient rows.

    Works in log space: log R = V (nu - logZ) V*, so no underflow for large
    parameters.  Requires a full-rank rho contribution only through
    tr rho log rho, which is computed on the support.
    """
    alg = spec.algebra
    base = 0.0
    sf = eig(rho.elem)
    tol = 1e-12 * max(1.0, max(abs(v) for v in sf.values))
    for v, p in zip(sf.values, sf.projections):
        if v > tol:
            base += v * math.log(v) * p.rank

    B = lam.shape[0]
    blocks_nu = []
    blocks_vecs = []
    for b, k in enumerate(alg.blocks):
        theta_b = np.broadcast_to(spec.theta0.data[b], (B, k, k)).copy()
        for j, u in enumerate(spec.directions):
            theta_b += lam[:, j, None, None] * u.data[b]
        w, v = np.linalg.eigh(theta_b)
        blocks_nu.append(w)
        blocks_vecs.append(v)
    shift = np.max(np.concatenate([w for w in blocks_nu], axis=1), axis=1)
    logz = shift + np.log(
        sum(np.exp(w - shift[:, None]).sum(axis=1) for w in blocks_nu)
    )
    cross = np.zeros(B)
    for b in range(alg.num_blocks):
        w, v = blocks_nu[b], blocks_vecs[b]
        log_sigma = np.einsum(
            "bik,bk,bjk->bij", v, w - logz[:, None], v.conj()
        )
        cross += np.einsum("bij,ji->b", log_sigma, rho.elem.data[b]).real
    return base - cross


def _family_sample(spec: ExpFamilySpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """Coefficient rows mixing several scales, covering the family densely."""
    scales = np.array([0.5, 2.0, 8.0, 20.0])
    pick = rng.integers(0, len(scales), size=count)
    return rng.normal(size=(count, spec.k)) * scales[pick][:, None]


# ---------------------------------------------------------------------------
# 1. complete Pythagorean identity
# ---------------------------------------------------------------------------


def _closure_member(spec: ExpFamilySpec, rng: np.random.Generator) -> State:
    if rng.random() < 0.5:
        return gibbs_state(spec.point(rng.normal(size=spec.k) * 1.5))
    theta = spec.point(rng.normal(size=spec.k) * 0.8)
    u = spec.combination(rng.normal(size=spec.k))
    limit, _ = e_geodesic_limit(theta, u)
    return limit


def suite_pythagoras(seed: int = 0, pairs_per_family: int = 50) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    infinite_cases = 0
    failures = []
    for spec in (staffelberg(), swallow()):
        for i in range(pairs_per_family):
            if rng.random() < 0.3:
                ranks = [rng.integers(1, k + 1) for k in spec.algebra.blocks]
                rho = random_state(spec.algebra, rng, rank_profile=ranks)
            else:
                rho = random_state(spec.algebra, rng)
            sigma = _closure_member(spec, rng)
            rep = pythagoras_check(spec, rho, sigma)
            if rep.s_pi_sigma.is_infinite or rep.s_rho_sigma.is_infinite:
                infinite_cases += 1
                if not rep.infinite_consistent:
                    failures.append(f"inconsistent infinity at pair {i}")
                continue
            worst = max(worst, rep.gap)
            if rep.gap > 1e-7:
                failures.append(f"gap {rep.gap:.3e} at pair {i}")
    return SuiteResult(
        "pythagoras",
        not failures,
        {"worst_gap": worst, "infinite_cases": infinite_cases, "failures": failures},
    )


# ---------------------------------------------------------------------------
# 2. projection optimality by sampling
# ---------------------------------------------------------------------------


def suite_projection_optimality(
    seed: int = 0, states_per_family: int = 20, samples: int = 10_000
) -> SuiteResult:
    rng = np.random.default_rng(seed + 1)
    failures = []
    min_margin = math.inf
    for spec in (staffelberg(), swallow()):
        for i in range(states_per_family):
            rho = random_state(spec.algebra, rng)
            proj = rI_projection(spec, rho)
            d = proj.distance.value
            lam = _family_sample(spec, rng, samples)
            vals = _batch_divergences(rho, spec, lam)
            below = vals < d - 1e-9
            if below.any():
                # optimality violated unless the sample coincides with pi
                for j in np.where(below)[0]:
                    sigma = gibbs_state(spec.point(lam[j]))
                    if norm(sigma.elem - proj.pi.elem, "trace") > 1e-6:
                        failures.append(
                            f"sample below distance by {d - vals[j]:.3e} (state {i})"
                        )
                        break
            min_margin = min(min_margin, float(vals.min() - d))
    return SuiteResult(
        "projection-optimality",
        not failures,
        {"min_margin": min_margin, "failures": failures},
    )


# ---------------------------------------------------------------------------
# 3. maximum entropy vs brute-force simplex oracle
# ---------------------------------------------------------------------------


def simplex_maxent_oracle(
    u_rows: np.ndarray, xi: np.ndarray, q0: np.ndarray, iters: int = 30_000
) -> tuple[np.ndarray, float]:
    """Projected-gradient entropy maximization on the probability simplex.

    Maximizes -sum q log q subject to u_rows @ q = xi and sum q = 1 from a
    feasible interior start; gradient steps are projected onto the
    constraint null space and backtracked to stay positive.
    """
    a_mat = np.vstack([u_rows, np.ones(u_rows.shape[1])])
    _, _, vt = np.linalg.svd(a_mat)
    null = vt[np.linalg.matrix_rank(a_mat):].T
    q = q0.astype(float).copy()

    def entropy(p: np.ndarray) -> float:
        mask = p > 0
        return float(-(p[mask] * np.log(p[mask])).sum())

    for _ in range(iters):
        grad = -(np.log(np.clip(q, 1e-300, None)) + 1.0)
        step = null @ (null.T @ grad)
        gn = float(np.linalg.norm(step))
        if gn < 1e-12:
            break
        eta = 1.0
        improved = False
        s0 = entropy(q)
        for _ in range(60):
            cand = q + eta * step
            if cand.min() > 0 and entropy(cand) > s0:
                q = cand
                improved = True
                break
            eta *= 0.5
        if not improved:
            break
    return q, entropy(q)


def _polygon_faces(points: np.ndarray, tol: float = 1e-9) -> set[frozenset]:
    """Face lattice of the convex hull of planar points, as index sets.

    Returns the full face plus every edge and vertex; points on an edge
    segment (or coincident with a vertex) are absorbed into that face.
    """
    m = len(points)
    faces: set[frozenset] = {frozenset(range(m))}
    # exposed faces over a dense set of outer normals: all pair normals
    # (edge candidates) and their perturbations (vertex candidates)
    normals = []
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            d = points[j] - points[i]
            n = np.array([-d[1], d[0]])
            ln = np.linalg.norm(n)
            if ln < tol:
                continue
            n = n / ln
            normals.extend([n, _rot(n, 1e-4), _rot(n, -1e-4)])
    for n in normals:
        h = (points @ n).max()
        supp = frozenset(np.where(points @ n >= h - tol)[0])
        if len(supp) < m:
            faces.add(supp)
    return faces


def _rot(v: np.ndarray, a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def suite_maxent_oracle(seed: int = 0, targets: int = 20) -> SuiteResult:
    rng = np.random.default_rng(seed + 2)
    failures = []
    worst = 0.0
    for n in (4, 6):
        alg = diagonal_algebra(n)
        u_rows = rng.normal(size=(2, n))
        dirs = tuple(diagonal_element(row) for row in u_rows)
        spec = ExpFamilySpec(alg, alg.zero(), dirs)
        for _ in range(targets):
            q0 = rng.dirichlet(np.ones(n) * 5.0)
            xi = u_rows @ q0
            res = max_entropy(spec, xi)
            _, s_oracle = simplex_maxent_oracle(u_rows, xi, q0)
            gap = abs(res.entropy - s_oracle)
            worst = max(worst, gap)
            if gap > 1e-6:
                failures.append(f"interior entropy gap {gap:.3e} (n={n})")
        # boundary: vertices and edge midpoints of the convex support
        points = u_rows.T
        faces = _polygon_faces(points)
        proper = [f for f in faces if len(f) < n]
        for f in proper:
            idx = sorted(f)
            if len(idx) == 1:
                xi_b = points[idx[0]]
                expect_support = frozenset(
                    j for j in range(n) if np.linalg.norm(points[j] - xi_b) <= 1e-9
                )
            else:
                xi_b = points[idx].mean(axis=0)
                expect_support = f
            res = max_entropy(spec, xi_b)
            got_support = frozenset(
                j for j in range(n) if res.face.elem.data[j].real[0, 0] > 0.5
            )
            if got_support != expect_support:
                failures.append(f"boundary face mismatch at {sorted(f)} (n={n})")
                continue
            # exact closed form: uniform-conditional entropy maximization on
            # the face, solved directly on the supported atoms
            sub_rows = u_rows[:, sorted(expect_support)]
            m = len(expect_support)
            q0_b = np.ones(m) / m
            if m == 1:
                s_expect = 0.0
            else:
                _, s_expect = simplex_maxent_oracle(sub_rows, xi_b, q0_b)
            if abs(res.entropy - s_expect) > 1e-8:
                failures.append(
                    f"boundary entropy gap {abs(res.entropy - s_expect):.3e}"
                )
    return SuiteResult(
        "maxent-oracle", not failures, {"worst_interior_gap": worst, "failures": failures}
    )


# ---------------------------------------------------------------------------
# 4. derivative and metric identities
# ---------------------------------------------------------------------------


def _random_family_algebras(rng) -> AlgebraSpec:
    choices = [(2, 1), (2, 2), (3,), (1, 1, 1, 1), (2, 1, 1)]
    return AlgebraSpec(choices[rng.integers(0, len(choices))])


def suite_calculus(seed: int = 0, grad_trials: int = 100, hess_trials: int = 50) -> SuiteResult:
    rng = np.random.default_rng(seed + 3)
    failures = []
    worst_grad = 0.0
    worst_hess = 0.0
    for i in range(grad_trials):
        alg = _random_family_algebras(rng)
        theta = random_herm(alg, rng)
        u = random_herm(alg, rng)
        h = 1e-5
        fd = (free_energy(theta + h * u) - free_energy(theta + (-h) * u)) / (2 * h)
        val = dF(theta, u)
        err = abs(val - fd) / max(1.0, abs(val))
        worst_grad = max(worst_grad, err)
        if err > 1e-6:
            failures.append(f"gradient mismatch {err:.3e} (trial {i})")
    for i in range(hess_trials):
        alg = _random_family_algebras(rng)
        theta = random_herm(alg, rng)
        u = random_herm(alg, rng)
        v = random_herm(alg, rng)
        h = 1e-4
        fd = (
            free_energy(theta + h * u + h * v)
            - free_energy(theta + h * u - h * v)
            - free_energy(theta - h * u + h * v)
            + free_energy(theta - h * u - h * v)
        ) / (4 * h * h)
        val = bkm(theta, u, v)
        sym = abs(val - bkm(theta, v, u))
        err = abs(val - fd)
        worst_hess = max(worst_hess, err)
        if err > 1e-5:
            failures.append(f"metric mismatch {err:.3e} (trial {i})")
        if sym > 1e-10:
            failures.append(f"metric asymmetry {sym:.3e} (trial {i})")
    # positive definiteness away from the identity
    for i in range(10):
        alg = _random_family_algebras(rng)
        theta = random_herm(alg, rng)
        us = [random_herm(alg, rng, traceless=True) for _ in range(3)]
        gram = np.array([[bkm(theta, a, b) for b in us] for a in us])
        if np.linalg.eigvalsh(gram).min() <= 0:
            failures.append(f"metric not positive definite (trial {i})")
    return SuiteResult(
        "calculus",
        not failures,
        {"worst_gradient_err": worst_grad, "worst_hessian_err": worst_hess, "failures": failures},
    )


# ---------------------------------------------------------------------------
# 5. limit lemmas
# ---------------------------------------------------------------------------


def suite_limits(seed: int = 0, trials: int = 30) -> SuiteResult:
    rng = np.random.default_rng(seed + 4)
    failures = []
    worst_state = 0.0
    worst_f = 0.0
    worst_exp = 0.0
    # The ray approaches its limit at first order in 1/t (eigenvector mixing
    # across the spectral gap), so t must beat both the exponential tail and
    # the 1/t rotation to reach the 1e-6 tolerance.
    for i in range(trials):
        alg = _random_family_algebras(rng)
        theta = random_herm(alg, rng)
        u = random_herm(alg, rng)
        sf = eig(u)
        if len(sf.values) < 2:
            continue
        gap = sf.values[0] - sf.values[1]
        t = max(40.0, 1e7 * (1.0 + norm(theta, "two"))) / gap
        limit, comp = e_geodesic_limit(theta, u)
        direct = gibbs_state(theta + t * u)
        err = norm(limit.elem - direct.elem, "trace")
        worst_state = max(worst_state, err)
        if err > 1e-6:
            failures.append(f"geodesic limit mismatch {err:.3e} (trial {i})")
        f_err = abs(
            free_energy(theta + t * u) - t * sf.values[0] - free_energy_asymptote(theta, u)
        )
        worst_f = max(worst_f, f_err)
        if f_err > 1e-6:
            failures.append(f"free energy asymptote mismatch {f_err:.3e} (trial {i})")
    for i in range(trials):
        alg = _random_family_algebras(rng)
        theta = random_herm(alg, rng)
        w = random_herm(alg, rng)
        lam_plus, _ = max_projection(w)
        u = w - lam_plus * alg.identity()
        sf = eig(u)
        if len(sf.values) < 2:
            continue
        gap = -sf.values[1]
        t = max(50.0, 1e7 * (1.0 + norm(theta, "two")) / gap)
        limit = exp_limit_nonpositive(theta, u)
        target = theta + t * u
        direct_blocks = []
        for block in target.data:
            ew, vv = np.linalg.eigh(block)
            direct_blocks.append((vv * np.exp(ew)) @ vv.conj().T)
        direct = HermElem(alg, direct_blocks)
        err = norm(limit - direct, "trace")
        worst_exp = max(worst_exp, err)
        if err > 1e-6:
            failures.append(f"exponential limit mismatch {err:.3e} (trial {i})")
    return SuiteResult(
        "limits",
        not failures,
        {
            "worst_state_err": worst_state,
            "worst_free_energy_err": worst_f,
            "worst_exp_err": worst_exp,
            "failures": failures,
        },
    )


# ---------------------------------------------------------------------------
# 6. Pinsker bound
# ---------------------------------------------------------------------------


def suite_pinsker(seed: int = 0, pairs: int = 1000) -> SuiteResult:
    rng = np.random.default_rng(seed + 5)
    failures = []
    worst = math.inf
    for i in range(pairs):
        alg = _random_family_algebras(rng)
        if rng.random() < 0.3:
            ranks = [rng.integers(0, k + 1) for k in alg.blocks]
            if sum(ranks) == 0:
                ranks[0] = 1
            rho = random_state(alg, rng, rank_profile=ranks)
        else:
            rho = random_state(alg, rng)
        sigma = random_state(alg, rng)
        slack = pinsker_slack(rho, sigma)
        if slack.is_infinite:
            continue
        worst = min(worst, slack.value)
        if slack.value < -1e-8:
            failures.append(f"negative slack {slack.value:.3e} (pair {i})")
    return SuiteResult("pinsker", not failures, {"min_slack": worst, "failures": failures})


# ---------------------------------------------------------------------------
# 7. closure dichotomies
# ---------------------------------------------------------------------------


def suite_closure_dichotomies(seed: int = 0) -> SuiteResult:
    failures = []
    spec = staffelberg()
    rows = staffelberg_segment(spec, 9)  # t = 0.5, ..., 1.0
    top = rows[0]
    mid = rows[4]  # t = 0.75
    if top[4] > 1e-6:
        failures.append(f"segment top end has distance {top[4]:.3e}")
    if mid[4] < 0.05:
        failures.append(f"mid-segment distance {mid[4]:.3e} below floor")
    # sampling oracle for the mid-segment floor
    rng = np.random.default_rng(seed + 6)
    alg = qubit_plus_bit()
    block = 0.5 * 0.75 * (np.eye(2, dtype=complex) + SIGMA2)
    rho_mid = State(HermElem(alg, [block, np.array([[0.25]], dtype=complex)]))
    lam = _family_sample(spec, rng, 10_000)
    sampled = float(_batch_divergences(rho_mid, spec, lam).min())
    if sampled < 0.05:
        failures.append(f"sampled divergence floor {sampled:.3e} below 0.05")
    # swallow: a non-exposed depth-2 node must exist and certify non-exposed
    nodes = enumerate_lattice(swallow(), LatticeBudget(grid_per_sphere=256, random_samples=64))
    deep = [n for n in nodes if n.depth >= 2 and not n.exposed]
    if not deep:
        failures.append("no depth-2 non-exposed node found in the swallow lattice")
    else:
        for node in deep:
            if _is_exposed(swallow(), node.projection):
                failures.append("a depth-2 node turned out to be exposed")
    return SuiteResult(
        "closure-dichotomies",
        not failures,
        {
            "top_end_distance": top[4],
            "mid_segment_distance": mid[4],
            "sampled_floor": sampled,
            "failures": failures,
        },
    )


def _is_exposed(spec: ExpFamilySpec, p) -> bool:
    """Exact exposedness oracle for a lattice projection.

    A direction exposing p must commute with p and act as a scalar on its
    range; these are linear conditions on the coefficients, so the
    candidate directions form a linear slice.  The projection is exposed
    iff some candidate's top projection equals p; the slice is sampled by
    its basis, signs, and random combinations.
    """
    alg = spec.algebra
    k = spec.k
    rows = []
    for j in range(k + 1):  # unknowns: c_1..c_k and the scalar value
        cols = []
        for b, kb in enumerate(alg.blocks):
            if j < k:
                ub = spec.directions[j].data[b]
                pb = p.elem.data[b]
                comm = ub @ pb - pb @ ub
                inside = pb @ ub @ pb
            else:
                comm = np.zeros((kb, kb), dtype=complex)
                inside = -p.elem.data[b]
            cols.append(np.concatenate([comm.ravel(), inside.ravel()]))
        col = np.concatenate(cols)
        rows.append(np.concatenate([col.real, col.imag]))
    a_mat = np.stack(rows, axis=1)
    _, sv, vt = np.linalg.svd(a_mat)
    tol = 1e-10 * max(1.0, sv[0] if len(sv) else 1.0)
    null = vt[int((sv > tol).sum()):]
    candidates = []
    for row in null:
        c = row[:k]
        if np.linalg.norm(c) > 1e-9:
            candidates.extend([c, -c])
    rng = np.random.default_rng(12)
    for _ in range(50):
        if null.shape[0] == 0:
            break
        mix = rng.normal(size=null.shape[0]) @ null
        c = mix[:k]
        if np.linalg.norm(c) > 1e-9:
            candidates.append(c)
    for c in candidates:
        u = spec.combination(c / np.linalg.norm(c))
        _, q = max_projection(u)
        if q.rank == p.rank and norm(q.elem - p.elem, "trace") <= 1e-7:
            return True
    return False


# ---------------------------------------------------------------------------
# 8. topology counterexamples and one-way arrows
# ---------------------------------------------------------------------------


def suite_topology(seed: int = 0, sequences: int = 200, window: int = 24) -> SuiteResult:
    failures = []
    # classical bit: reverse divergence converges at rate 1/i (window sized
    # so the tail sits below the threshold), forward divergence is infinite
    seq = StateSequence(
        lambda i: State(diagonal_element([i / (i + 1), 1 / (i + 1)])), None
    )
    rho = State(diagonal_element([1.0, 0.0]))
    r_ri = omega_converges(seq, rho, "rI", 2500, 1e-3)
    r_i = omega_converges(seq, rho, "I", 2500, 1e-3)
    if r_ri.verdict != "converging":
        failures.append(f"bit sequence rI verdict {r_ri.verdict}")
    if r_i.verdict != "diverging":
        failures.append(f"bit sequence I verdict {r_i.verdict}")
    # qubit: norm converges, reverse divergence stays infinite
    qalg = AlgebraSpec((2,))

    def qubit_path(i: int) -> State:
        a = 1.0 / (i + 1)
        block = 0.5 * (
            np.eye(2, dtype=complex) + math.cos(a) * SIGMA1 + math.sin(a) * SIGMA2
        )
        return State(HermElem(qalg, [block]))

    rho_q = State(HermElem(qalg, [0.5 * (np.eye(2, dtype=complex) + SIGMA1)]))
    qseq = StateSequence(qubit_path, None)
    from .topology import norm_converges

    q_ri = omega_converges(qseq, rho_q, "rI", 2500, 1e-3)
    q_norm = norm_converges(qseq, rho_q, 2500, 1e-3)
    if q_ri.verdict != "diverging":
        failures.append(f"qubit sequence rI verdict {q_ri.verdict}")
    if q_norm.verdict != "converging":
        failures.append(f"qubit sequence norm verdict {q_norm.verdict}")
    # random full-rank sequences never violate the one-way arrows
    rng = np.random.default_rng(seed + 7)
    violations = 0
    conclusive = 0
    for _ in range(sequences):
        alg = _random_family_algebras(rng)
        target = random_state(alg, rng)
        tau = random_state(alg, rng)
        kind = rng.random()

        def make(i: int, target=target, tau=tau, kind=kind) -> State:
            if kind < 0.5:
                eps = 1.0 / (i**4 + 1)
            else:
                eps = 0.5 * math.exp(-0.6 * i)
            return State(
                HermElem(
                    alg,
                    [
                        (1 - eps) * a + eps * b
                        for a, b in zip(target.elem.data, tau.elem.data)
                    ],
                )
            )

        rep = implication_suite(StateSequence(make, None), target, window, 1e-3)
        violations += len(rep.violations)
        if rep.i_report.verdict == "converging":
            conclusive += 1
    if violations:
        failures.append(f"{violations} one-way arrow violations observed")
    if conclusive < sequences // 2:
        failures.append(f"only {conclusive} sequences were conclusive")
    return SuiteResult(
        "topology", not failures, {"conclusive": conclusive, "failures": failures}
    )


# ---------------------------------------------------------------------------
# 9. commutative lattice against the polytope oracle
# ---------------------------------------------------------------------------


def suite_lattice_oracle(seed: int = 0, instances: int = 10) -> SuiteResult:
    rng = np.random.default_rng(seed + 8)
    failures = []
    n = 5
    alg = diagonal_algebra(n)
    for inst in range(instances):
        u_rows = rng.normal(size=(2, n))
        spec = ExpFamilySpec(
            alg, alg.zero(), tuple(diagonal_element(row) for row in u_rows)
        )
        nodes = enumerate_lattice(
            spec, LatticeBudget(grid_per_sphere=512, random_samples=64)
        )
        got = {
            frozenset(
                j for j in range(n) if node.projection.elem.data[j].real[0, 0] > 0.5
            )
            for node in nodes
        }
        expected = _polygon_faces(u_rows.T)
        if got != expected:
            failures.append(
                f"instance {inst}: found {sorted(map(sorted, got))} expected "
                f"{sorted(map(sorted, expected))}"
            )
    return SuiteResult("lattice-oracle", not failures, {"failures": failures})


# ---------------------------------------------------------------------------
# 10. representation change
# ---------------------------------------------------------------------------


def suite_representation(seed: int = 0, trials: int = 20) -> SuiteResult:
    rng = np.random.default_rng(seed + 9)
    failures = []
    worst = 0.0
    for i in range(trials):
        source = AlgebraSpec(((2, 1), (2, 2), (1, 1))[rng.integers(0, 3)])
        phi = EmbeddingSpec(
            tuple(int(m) for m in rng.integers(1, 4, size=source.num_blocks)),
            padding=int(rng.integers(0, 3)),
        )
        g = random_state(source, rng)
        h = random_state(source, rng)
        big_g = embed(phi, _scale_blocks(g.elem, phi))
        big_h = embed(phi, _scale_blocks(h.elem, phi))
        s_small = relative_entropy(g, h)
        s_big = relative_entropy(State(big_g), State(big_h))
        gap = abs(s_small.value - s_big.value)
        worst = max(worst, gap)
        if gap > 1e-10:
            failures.append(f"relative entropy changed by {gap:.3e} (trial {i})")
        back_g = embed_adjoint(phi, big_g)
        if norm(back_g - g.elem, "trace") > 1e-12:
            failures.append(f"adjoint round trip failed (trial {i})")
        # family shift: states of the shifted family pull back to the family
        spec = ExpFamilySpec(
            source,
            random_herm(source, rng, 0.4),
            tuple(random_herm(source, rng) for _ in range(2)),
        )
        shifted = shift_family(phi, spec)
        lam = rng.normal(size=2)
        direct = gibbs_state(spec.point(lam))
        phi0 = EmbeddingSpec(phi.multiplicities, padding=0)
        pulled = embed_adjoint(phi0, gibbs_state(shifted.point(lam)).elem)
        gap2 = norm(direct.elem - pulled, "trace")
        worst = max(worst, gap2)
        if gap2 > 1e-10:
            failures.append(f"family shift round trip off by {gap2:.3e} (trial {i})")
    # closing example: collapse of a uniform state over n points
    for n in (3, 5):
        phi = EmbeddingSpec((1, n - 1), padding=0)
        target = diagonal_algebra(n)
        uniform = HermElem(
            target, [np.array([[1.0 / n]], dtype=complex)] * n
        )
        back = embed_adjoint(phi, uniform)
        vals = [float(b.real[0, 0]) for b in back.data]
        if vals != [1.0 / n, (n - 1) / n]:
            failures.append(f"uniform collapse for n={n} gave {vals}")
    return SuiteResult(
        "representation", not failures, {"worst_gap": worst, "failures": failures}
    )


def _scale_blocks(elem: HermElem, phi: EmbeddingSpec) -> HermElem:
    data = [b / m for b, m in zip(elem.data, phi.multiplicities)]
    return HermElem(elem.algebra, data)


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

SUITES: dict[str, Callable[[int], SuiteResult]] = {
    "pythagoras": suite_pythagoras,
    "projection-optimality": suite_projection_optimality,
    "maxent-oracle": suite_maxent_oracle,
    "calculus": suite_calculus,
    "limits": suite_limits,
    "pinsker": suite_pinsker,
    "closure-dichotomies": suite_closure_dichotomies,
    "topology": suite_topology,
    "lattice-oracle": suite_lattice_oracle,
    "representation": suite_representation,
}


def run_suites(names: list[str] | None = None, seed: int = 0) -> list[SuiteResult]:
    selected = names or list(SUITES)
    unknown = [n for n in selected if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites: {unknown}")
    return [SUITES[n](seed) for n in selected]
