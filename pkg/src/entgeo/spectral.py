"""Spectral forms, functional calculus and compressed algebras.

Self-adjoint elements decompose as a = sum_i c_i p_i with distinct spectral
values c_i and mutually orthogonal projections p_i summing to the identity.
Functional calculus applies a scalar function to the spectral values, either
in the ambient algebra or inside a compressed algebra pAp whose spectrum
excludes the kernel of p (so e.g. the logarithm of a rank-deficient state is
defined on its support).

Numerical policy: eigenvalues within ``CLUSTER_REL * max(1, |a|)`` of each
other are merged into one spectral value so the projections stay stable
under degeneracy, and values within ``ZERO_REL * max(1, |a|)`` of zero count
as zero for support and kernel projections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import AlgebraSpec, HermElem, hs_inner, norm

CLUSTER_REL = 1e-8
ZERO_REL = 1e-10
PROJECTION_TOL = 1e-9


class FunctionDomainError(ValueError):
    """A scalar function is undefined at a spectral value."""


class ZeroProjectionError(ValueError):
    """The zero projection has no compressed algebra."""


@dataclass(frozen=True)
class Projection:
    """An orthogonal projection p = p* = p^2 together with its rank."""

    elem: HermElem
    rank: int

    def __post_init__(self):
        p = self.elem
        for block in p.data:
            err = np.linalg.norm(block @ block - block)
            if err > PROJECTION_TOL * max(1.0, np.linalg.norm(block)):
                raise ValueError(f"not idempotent within tolerance ({err:.3e})")
        tr = p.trace()
        if abs(tr - round(tr)) > PROJECTION_TOL * max(1.0, abs(tr)) + PROJECTION_TOL:
            raise ValueError(f"projection trace {tr!r} is not near an integer")
        object.__setattr__(self, "rank", int(round(tr)))

    @property
    def algebra(self) -> AlgebraSpec:
        return self.elem.algebra

    def block_ranks(self) -> tuple[int, ...]:
        return tuple(int(round(np.trace(b).real)) for b in self.elem.data)

    def is_identity(self) -> bool:
        return self.rank == self.algebra.n

    def is_zero(self) -> bool:
        return self.rank == 0


@dataclass(frozen=True)
class SpectralForm:
    """Distinct spectral values (descending) with their spectral projections."""

    values: tuple[float, ...]
    projections: tuple[Projection, ...]

    def reconstruct(self) -> HermElem:
        alg = self.projections[0].algebra
        out = alg.zero()
        for v, p in zip(self.values, self.projections):
            out = out + v * p.elem
        return out


def _scale(eigs: np.ndarray) -> float:
    return max(1.0, float(np.abs(eigs).max())) if eigs.size else 1.0


def eig(a: HermElem, cluster_tol: float | None = None) -> SpectralForm:
    """Spectral form of a self-adjoint element.

    Eigenvalues are computed per block and clustered across blocks; each
    cluster becomes one spectral value (the mean) with the summed projection.
    """
    alg = a.algebra
    per_block = [np.linalg.eigh(block) for block in a.data]
    all_eigs = np.concatenate([w for w, _ in per_block])
    tol = cluster_tol if cluster_tol is not None else CLUSTER_REL * _scale(all_eigs)

    tagged = []
    for b, (w, _) in enumerate(per_block):
        for i, lam in enumerate(w):
            tagged.append((float(lam), b, i))
    tagged.sort(key=lambda t: -t[0])

    clusters: list[list[tuple[float, int, int]]] = []
    for item in tagged:
        if clusters and clusters[-1][-1][0] - item[0] <= tol:
            clusters[-1].append(item)
        else:
            clusters.append([item])

    values = []
    projections = []
    for cluster in clusters:
        values.append(sum(lam for lam, _, _ in cluster) / len(cluster))
        data = [np.zeros((k, k), dtype=complex) for k in alg.blocks]
        for _, b, i in cluster:
            v = per_block[b][1][:, i]
            data[b] = data[b] + np.outer(v, v.conj())
        projections.append(Projection(HermElem(alg, data), rank=len(cluster)))
    return SpectralForm(tuple(values), tuple(projections))


def func_calc(
    f: Callable[[float], float],
    a: HermElem,
    domain_proj: Projection | None = None,
) -> HermElem:
    """Functional calculus f(a) = sum f(c_i) p_i.

    With ``domain_proj`` given, the calculus runs in the compressed algebra
    pAp, so spectral values coming from the kernel of p are excluded; the
    result then satisfies p * result * p = result.
    """
    if domain_proj is None:
        sf = eig(a)
        out = a.algebra.zero()
        for v, p in zip(sf.values, sf.projections):
            out = out + _apply_scalar(f, v) * p.elem
        return out

    comp = compress(domain_proj)
    compressed = comp.apply(a)
    mismatch = norm(comp.lift(compressed) - a, "two")
    if mismatch > 1e-8 * max(1.0, norm(a, "two")):
        raise ValueError("element does not live in the compressed algebra (a != pap)")
    sf = eig(compressed)
    out = compressed.algebra.zero()
    for v, p in zip(sf.values, sf.projections):
        out = out + _apply_scalar(f, v) * p.elem
    return comp.lift(out)


def _apply_scalar(f: Callable[[float], float], v: float) -> float:
    try:
        out = float(f(float(v)))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise FunctionDomainError(f"function undefined at spectral value {v!r}") from exc
    if not math.isfinite(out):
        raise FunctionDomainError(f"function not finite at spectral value {v!r}")
    return out


def support_projection(a: HermElem, zero_tol: float | None = None) -> Projection:
    """Sum of spectral projections over the nonzero spectral values."""
    sf = eig(a)
    tol = zero_tol if zero_tol is not None else ZERO_REL * max(
        1.0, max((abs(v) for v in sf.values), default=0.0)
    )
    data = [np.zeros((k, k), dtype=complex) for k in a.algebra.blocks]
    rank = 0
    for v, p in zip(sf.values, sf.projections):
        if abs(v) > tol:
            data = [d + q for d, q in zip(data, p.elem.data)]
            rank += p.rank
    return Projection(HermElem(a.algebra, data), rank=rank)


def kernel_projection(a: HermElem, zero_tol: float | None = None) -> Projection:
    """Complement of the support: identity minus the support projection."""
    s = support_projection(a, zero_tol)
    return Projection(a.algebra.identity() - s.elem, rank=a.algebra.n - s.rank)


def max_projection(
    u: HermElem, cluster_tol: float | None = None
) -> tuple[float, Projection]:
    """Top spectral value and its spectral projection."""
    lam, p, _ = top_projection(u, cluster_tol=cluster_tol)
    return lam, p


def top_projection(
    u: HermElem, cluster_tol: float | None = None
) -> tuple[float, Projection, float]:
    """Top spectral value, its projection, and the gap to the next value.

    Builds only the top cluster, so it is cheap enough for direction sweeps.
    """
    alg = u.algebra
    per_block = [np.linalg.eigh(block) for block in u.data]
    all_eigs = np.concatenate([w for w, _ in per_block])
    tol = cluster_tol if cluster_tol is not None else CLUSTER_REL * _scale(all_eigs)
    order = np.sort(all_eigs)[::-1]
    top = float(order[0])
    # chain-merge downward from the top
    cut = top
    gap2 = math.inf
    for lam in order[1:]:
        if cut - lam <= tol:
            cut = float(lam)
        else:
            gap2 = cut - float(lam)
            break
    data = []
    rank = 0
    members = []
    for b, (w, v) in enumerate(per_block):
        sel = w >= cut - 0.5 * tol
        cols = v[:, sel]
        data.append(cols @ cols.conj().T)
        rank += int(sel.sum())
        members.extend(float(x) for x in w[sel])
    value = sum(members) / len(members)
    return value, Projection(HermElem(alg, data), rank=rank), gap2


# ---------------------------------------------------------------------------
# compressed algebras pAp
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Compression:
    """Isometries onto the range of a projection, block by block.

    ``apply`` maps a = pap to its matrix V* a V in the compressed algebra's
    own coordinates; ``lift`` is the reverse V b V*.  Zero-rank blocks are
    dropped from the target, so spectral values in pAp need no special
    handling of padded zeros.
    """

    projection: Projection
    isometries: tuple[np.ndarray, ...]
    target: AlgebraSpec
    kept: tuple[int, ...]

    def apply(self, a: HermElem) -> HermElem:
        if a.algebra != self.projection.algebra:
            raise ValueError("element lives in a different algebra")
        data = [
            self.isometries[b].conj().T @ a.data[b] @ self.isometries[b]
            for b in self.kept
        ]
        return HermElem(self.target, data)

    def lift(self, b: HermElem) -> HermElem:
        if b.algebra != self.target:
            raise ValueError("element does not live in the compressed algebra")
        source = self.projection.algebra
        data = [np.zeros((k, k), dtype=complex) for k in source.blocks]
        for j, bi in enumerate(self.kept):
            v = self.isometries[bi]
            data[bi] = v @ b.data[j] @ v.conj().T
        return HermElem(source, data)


def compress(p: Projection) -> Compression:
    """Build the compression onto the range of ``p``."""
    if p.is_zero():
        raise ZeroProjectionError("cannot compress by the zero projection")
    isometries: list[np.ndarray] = []
    kept: list[int] = []
    target_blocks: list[int] = []
    for b, block in enumerate(p.elem.data):
        w, v = np.linalg.eigh(block)
        cols = v[:, w > 0.5]
        isometries.append(cols)
        if cols.shape[1] > 0:
            kept.append(b)
            target_blocks.append(cols.shape[1])
    return Compression(
        projection=p,
        isometries=tuple(isometries),
        target=AlgebraSpec(tuple(target_blocks)),
        kept=tuple(kept),
    )


# ---------------------------------------------------------------------------
# order and perturbation
# ---------------------------------------------------------------------------


def ordered_leq(a: HermElem, b: HermElem, tol: float = 1e-9) -> bool:
    """Positive-semidefinite order: a <= b iff b - a has no eigenvalue below -tol."""
    a._check_same(b)
    diff = b - a
    lo = min(float(np.linalg.eigvalsh(block).min()) for block in diff.data)
    return lo >= -tol


def weyl_gap(a: HermElem, b: HermElem) -> float:
    """Largest gap between sorted eigenvalue lists; bounded by |a - b| (spectral)."""
    a._check_same(b)
    ea = np.sort(np.concatenate([np.linalg.eigvalsh(x) for x in a.data]))[::-1]
    eb = np.sort(np.concatenate([np.linalg.eigvalsh(x) for x in b.data]))[::-1]
    return float(np.abs(ea - eb).max())
