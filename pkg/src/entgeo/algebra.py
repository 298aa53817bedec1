"""Block-diagonal C*-algebra arithmetic.

An algebra here is a direct sum of full complex matrix blocks
Mat(k_1, C) + ... + Mat(k_N, C), stored in its canonical representation
where the algebra identity is the full identity matrix.  Self-adjoint
elements carry observables, natural parameters and directions; states are
self-adjoint elements with unit trace and nonnegative spectrum (density
matrices).  Representation changes with multiplicities and padding are
explicit maps, never implicit.

All values are immutable after construction and every operation is a pure
function, so they can be shared freely across threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Hermiticity is enforced on construction; asymmetry beyond this (relative
# to the block norm) triggers a warning before symmetrizing.
HERMITIZE_WARN_TOL = 1e-9

# State invariants: |tr - 1| and the amount the smallest eigenvalue may dip
# below zero.
STATE_TRACE_TOL = 1e-10
STATE_EIG_TOL = 1e-10


class AlgebraMismatchError(ValueError):
    """Two elements that should live in one algebra do not."""


class EmbeddingError(ValueError):
    """An element is not compatible with a representation-change map."""


@dataclass(frozen=True)
class AlgebraSpec:
    """A direct sum of full complex matrix blocks Mat(k_1) + ... + Mat(k_N)."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(k) for k in self.blocks)
        if len(blocks) < 1:
            raise ValueError("an algebra needs at least one block")
        if any(k < 1 for k in blocks):
            raise ValueError(f"block sizes must be positive, got {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        """Total matrix dimension (sum of block sizes)."""
        return sum(self.blocks)

    @property
    def herm_dim(self) -> int:
        """Real dimension of the space of self-adjoint elements."""
        return sum(k * k for k in self.blocks)

    def identity(self) -> "HermElem":
        return HermElem(self, [np.eye(k, dtype=complex) for k in self.blocks])

    def zero(self) -> "HermElem":
        return HermElem(self, [np.zeros((k, k), dtype=complex) for k in self.blocks])

    def herm_basis(self) -> list["HermElem"]:
        """Orthonormal (Hilbert-Schmidt) basis of the self-adjoint part.

        Per block: diagonal units, then symmetric and antisymmetric pair
        combinations scaled by 1/sqrt(2).
        """
        basis = []
        for b, k in enumerate(self.blocks):
            for i in range(k):
                m = np.zeros((k, k), dtype=complex)
                m[i, i] = 1.0
                basis.append(self._single_block(b, m))
            for i in range(k):
                for j in range(i + 1, k):
                    m = np.zeros((k, k), dtype=complex)
                    m[i, j] = m[j, i] = 1.0 / np.sqrt(2.0)
                    basis.append(self._single_block(b, m))
                    m = np.zeros((k, k), dtype=complex)
                    m[i, j] = -1j / np.sqrt(2.0)
                    m[j, i] = 1j / np.sqrt(2.0)
                    basis.append(self._single_block(b, m))
        return basis

    def _single_block(self, index: int, block: np.ndarray) -> "HermElem":
        data = [np.zeros((k, k), dtype=complex) for k in self.blocks]
        data[index] = block
        return HermElem(self, data)


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class HermElem:
    """A self-adjoint element, stored as one complex matrix per block.

    Construction symmetrizes the input as (a + a*)/2 and warns when the
    asymmetry exceeds ``HERMITIZE_WARN_TOL`` relative to the block norm.
    """

    algebra: AlgebraSpec
    data: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.data) != self.algebra.num_blocks:
            raise ValueError(
                f"expected {self.algebra.num_blocks} blocks, got {len(self.data)}"
            )
        blocks = []
        for k, raw in zip(self.algebra.blocks, self.data):
            m = np.asarray(raw, dtype=complex)
            if m.shape != (k, k):
                raise ValueError(f"block of shape {m.shape} does not match size {k}")
            asym = np.linalg.norm(m - m.conj().T)
            if asym > HERMITIZE_WARN_TOL * max(1.0, np.linalg.norm(m)):
                warnings.warn(
                    f"symmetrizing a block with asymmetry {asym:.3e}", stacklevel=3
                )
            blocks.append(_as_readonly((m + m.conj().T) / 2.0))
        object.__setattr__(self, "data", tuple(blocks))

    # -- arithmetic (self-adjoint combinations only) --------------------

    def _check_same(self, other: "HermElem") -> None:
        if self.algebra != other.algebra:
            raise AlgebraMismatchError(
                f"algebras differ: {self.algebra.blocks} vs {other.algebra.blocks}"
            )

    def __add__(self, other: "HermElem") -> "HermElem":
        self._check_same(other)
        return HermElem(self.algebra, [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other: "HermElem") -> "HermElem":
        self._check_same(other)
        return HermElem(self.algebra, [a - b for a, b in zip(self.data, other.data)])

    def __mul__(self, scalar: float) -> "HermElem":
        s = float(scalar)
        return HermElem(self.algebra, [s * a for a in self.data])

    __rmul__ = __mul__

    def __neg__(self) -> "HermElem":
        return self * -1.0

    def trace(self) -> float:
        return float(sum(np.trace(a).real for a in self.data))

    def to_dense(self) -> np.ndarray:
        """Assemble the full n x n block-diagonal matrix."""
        n = self.algebra.n
        out = np.zeros((n, n), dtype=complex)
        pos = 0
        for k, a in zip(self.algebra.blocks, self.data):
            out[pos : pos + k, pos : pos + k] = a
            pos += k
        return out


@dataclass(frozen=True)
class State:
    """A density matrix: unit trace, nonnegative spectrum."""

    elem: HermElem

    def __post_init__(self):
        tr = self.elem.trace()
        if abs(tr - 1.0) > STATE_TRACE_TOL:
            raise ValueError(f"state trace {tr!r} is not 1")
        lo = min(
            float(np.linalg.eigvalsh(a).min()) if a.size else 0.0
            for a in self.elem.data
        )
        if lo < -STATE_EIG_TOL:
            raise ValueError(f"state has eigenvalue {lo:.3e} < 0")

    @property
    def algebra(self) -> AlgebraSpec:
        return self.elem.algebra


@dataclass(frozen=True)
class EmbeddingSpec:
    """Representation change: repeat block i with multiplicity m_i, pad with zeros.

    The map sends b_1 + ... + b_N to (b_1 repeated m_1 times) + ... +
    (b_N repeated m_N times) + 0_l, a C*-morphism onto its image.
    """

    multiplicities: tuple[int, ...]
    padding: int = 0

    def __post_init__(self):
        mult = tuple(int(m) for m in self.multiplicities)
        if any(m < 1 for m in mult):
            raise ValueError("multiplicities must be positive")
        if self.padding < 0:
            raise ValueError("padding must be nonnegative")
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "padding", int(self.padding))

    def target_algebra(self, source: AlgebraSpec) -> AlgebraSpec:
        if len(self.multiplicities) != source.num_blocks:
            raise EmbeddingError("multiplicity list does not match the source algebra")
        blocks: list[int] = []
        for k, m in zip(source.blocks, self.multiplicities):
            blocks.extend([k] * m)
        if self.padding:
            blocks.append(self.padding)
        return AlgebraSpec(tuple(blocks))


# ---------------------------------------------------------------------------
# inner products and norms
# ---------------------------------------------------------------------------


def hs_inner(a: HermElem, b: HermElem) -> float:
    """Hilbert-Schmidt inner product tr(a b*), real for self-adjoint inputs."""
    a._check_same(b)
    return float(
        sum(np.trace(x @ y).real for x, y in zip(a.data, b.data))
    )


def norm(a: HermElem, kind: str = "two") -> float:
    """Trace norm ``tr|a|``, two-norm ``sqrt(tr a*a)`` or spectral norm.

    The three norms are ordered: spectral <= two <= trace.
    """
    if kind == "two":
        return float(np.sqrt(sum(np.linalg.norm(x) ** 2 for x in a.data)))
    eigs = np.concatenate([np.linalg.eigvalsh(x) for x in a.data])
    if kind == "trace":
        return float(np.abs(eigs).sum())
    if kind == "spectral":
        return float(np.abs(eigs).max()) if eigs.size else 0.0
    raise ValueError(f"unknown norm kind {kind!r}")


# ---------------------------------------------------------------------------
# representation change
# ---------------------------------------------------------------------------


def embed(phi: EmbeddingSpec, b: HermElem) -> HermElem:
    """Apply the representation change: repeat each block, append zero padding."""
    target = phi.target_algebra(b.algebra)
    data: list[np.ndarray] = []
    for block, m in zip(b.data, phi.multiplicities):
        data.extend([block] * m)
    if phi.padding:
        data.append(np.zeros((phi.padding, phi.padding), dtype=complex))
    return HermElem(target, data)


def embed_adjoint(phi: EmbeddingSpec, f: HermElem) -> HermElem:
    """Trace-adjoint of :func:`embed`: collapse repeated copies to m_i * F_i.

    The input must be block-constant over the repeated copies (i.e. of the
    form ``embed(...)`` up to the padding block); states map to states.
    """
    source_blocks: list[int] = []
    # Reconstruct the source block structure from the target layout.
    pos = 0
    data: list[np.ndarray] = []
    for m in phi.multiplicities:
        k = f.algebra.blocks[pos]
        copies = f.data[pos : pos + m]
        if any(f.algebra.blocks[pos + j] != k for j in range(m)):
            raise EmbeddingError("target block sizes do not match the embedding")
        for c in copies[1:]:
            if np.linalg.norm(c - copies[0]) > 1e-8 * max(1.0, np.linalg.norm(copies[0])):
                raise EmbeddingError("repeated copies differ; not in the image of the embedding")
        data.append(m * copies[0])
        source_blocks.append(k)
        pos += m
    if phi.padding:
        if pos != f.algebra.num_blocks - 1 or f.algebra.blocks[pos] != phi.padding:
            raise EmbeddingError("padding block missing or mis-sized")
    elif pos != f.algebra.num_blocks:
        raise EmbeddingError("target has extra blocks beyond the embedding layout")
    return HermElem(AlgebraSpec(tuple(source_blocks)), data)


def shift_family(phi: EmbeddingSpec, spec):
    """Push an exponential family through a representation change.

    The base point picks up a correction of -log(m_i) per block so that the
    states of the shifted family pull back to the states of the original
    family under :func:`embed_adjoint`.  The family lives in the canonical
    (padding-free) form of the image algebra: a zero padding block carries
    no states and would corrupt the Gibbs normalization.
    """
    from .expfam import ExpFamilySpec  # deferred: expfam imports this module

    source = spec.algebra
    if len(phi.multiplicities) != source.num_blocks:
        raise EmbeddingError("multiplicity list does not match the family's algebra")
    canonical = EmbeddingSpec(phi.multiplicities, padding=0)
    correction = HermElem(
        source,
        [np.log(m) * np.eye(k, dtype=complex) for k, m in zip(source.blocks, phi.multiplicities)],
    )
    theta0 = embed(canonical, spec.theta0 - correction)
    directions = tuple(embed(canonical, u) for u in spec.directions)
    return ExpFamilySpec(theta0.algebra, theta0, directions)


# ---------------------------------------------------------------------------
# random elements
# ---------------------------------------------------------------------------


def _rng_of(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_state(
    algebra: AlgebraSpec,
    seed,
    rank_profile: Sequence[int] | None = None,
) -> State:
    """Draw a random state, deterministic for a fixed seed.

    Full rank by default (Wishart per block); ``rank_profile`` prescribes
    per-block ranks, with 0 allowed to zero out a block, for boundary
    states.
    """
    rng = _rng_of(seed)
    if rank_profile is None:
        ranks = list(algebra.blocks)
    else:
        ranks = [int(r) for r in rank_profile]
        if len(ranks) != algebra.num_blocks:
            raise ValueError("rank profile length does not match the algebra")
        for r, k in zip(ranks, algebra.blocks):
            if r < 0 or r > k:
                raise ValueError(f"rank {r} not in [0, {k}]")
        if sum(ranks) == 0:
            raise ValueError("rank profile is identically zero")
    data = []
    for k, r in zip(algebra.blocks, ranks):
        if r == 0:
            data.append(np.zeros((k, k), dtype=complex))
            continue
        g = rng.normal(size=(k, r)) + 1j * rng.normal(size=(k, r))
        data.append(g @ g.conj().T)
    total = sum(np.trace(d).real for d in data)
    return State(HermElem(algebra, [d / total for d in data]))


def random_herm(
    algebra: AlgebraSpec,
    seed,
    scale: float = 1.0,
    traceless: bool = False,
) -> HermElem:
    """Gaussian random self-adjoint element (GUE-like per block)."""
    rng = _rng_of(seed)
    data = []
    for k in algebra.blocks:
        g = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
        data.append(scale * (g + g.conj().T) / 2.0)
    elem = HermElem(algebra, data)
    if traceless:
        elem = elem - (elem.trace() / algebra.n) * algebra.identity()
    return elem
