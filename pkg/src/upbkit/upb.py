"""Unextendible product bases: construction, certification, and product hunting.

The three-qubit family built here is parametrized by one angle per party:

    |psi_1> = |0>|0>|0>          |psi_3> = |A>|1>|C~>
    |psi_2> = |1>|B>|C>          |psi_4> = |A~>|B~>|1>

with |A> = cos(a)|0> + sin(a)|1> and |A~> = sin(a)|0> - cos(a)|1> (the phase
convention for the orthogonal partner is fixed for determinism), similarly
for B and C.  For angles strictly inside (0, pi/2) the four vectors are
pairwise orthogonal and their complement contains no product vector; at the
boundary the complement acquires one and the family degenerates.

Unextendibility is certified numerically: a multi-start alternating ("seesaw")
maximization of <phi|Q|phi> over product vectors, Q the complementary
projector.  Each local update is an extremal eigenvector problem, so the
objective never decreases; the best value over all restarts, bounded away
from 1 by a fixed gap, is the certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .states import (
    DensityMatrix,
    PartyStructure,
    ProductVector,
    expand,
    product_projector,
)

UNEXTENDIBILITY_GAP = 1e-3       # certified when max_overlap < 1 - gap
PAIRWISE_ORTHO_TOL = 1e-10
SEESAW_IMPROVEMENT_TOL = 1e-12
SEESAW_MAX_SWEEPS = 500
DEFAULT_RESTARTS = 64
DISTINCT_FIDELITY_TOL = 1e-6     # hits with fidelity > 1 - tol are the same solution
PROJECTOR_TOL = 1e-10


@dataclass(frozen=True)
class ShiftsParams:
    """Angles (radians) for the three local pairs; each strictly inside (0, pi/2)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name, val in (("a", self.a), ("b", self.b), ("c", self.c)):
            if not 0.0 < val < np.pi / 2:
                raise ValueError(
                    f"angle {name}={val!r} is at or outside (0, pi/2); "
                    "the family degenerates there and the complement acquires product vectors"
                )

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class UnextendibilityCertificate:
    """Best product overlap with the complementary projector found by the seesaw."""

    max_overlap: float
    restarts: int
    best_product_vector: ProductVector

    @property
    def certifies_unextendible(self) -> bool:
        return self.max_overlap < 1.0 - UNEXTENDIBILITY_GAP


@dataclass
class UPB:
    """Ordered orthogonal product vectors with m < D, optionally certified."""

    parts: PartyStructure
    members: tuple[ProductVector, ...]
    certificate: UnextendibilityCertificate | None = None

    def __post_init__(self):
        self.members = tuple(self.members)
        if len(self.members) >= self.parts.dim:
            raise ValueError("an unextendible product basis must be incomplete (m < D)")
        full = [expand(v) for v in self.members]
        for i in range(len(full)):
            if full[i].shape[0] != self.parts.dim:
                raise ValueError(f"member {i} does not match the party structure")
            for j in range(i + 1, len(full)):
                ov = abs(np.vdot(full[i], full[j]))
                if ov > PAIRWISE_ORTHO_TOL:
                    raise ValueError(f"members {i} and {j} are not orthogonal: |<i|j>| = {ov:.3e}")

    @property
    def size(self) -> int:
        return len(self.members)

    def member_sum_projector(self) -> np.ndarray:
        s = np.zeros((self.parts.dim, self.parts.dim), dtype=complex)
        for v in self.members:
            s += product_projector(v)
        return s

    def complement_projector(self) -> np.ndarray:
        return np.eye(self.parts.dim) - self.member_sum_projector()


def _angle_pair(theta: float) -> tuple[np.ndarray, np.ndarray]:
    v = np.array([np.cos(theta), np.sin(theta)], dtype=complex)
    w = np.array([np.sin(theta), -np.cos(theta)], dtype=complex)
    return v, w


def shifts_family(params: ShiftsParams) -> UPB:
    """The one-angle-per-party three-qubit family; orthogonal by construction."""
    va, wa = _angle_pair(params.a)
    vb, wb = _angle_pair(params.b)
    vc, wc = _angle_pair(params.c)
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([0.0, 1.0], dtype=complex)
    members = (
        ProductVector((e0, e0, e0)),
        ProductVector((e1, vb, vc)),
        ProductVector((va, e1, wc)),
        ProductVector((wa, wb, e1)),
    )
    return UPB(PartyStructure((2, 2, 2)), members)


def upb_state(u: UPB) -> DensityMatrix:
    """Maximally mixed state on the orthogonal complement of the UPB."""
    d = u.parts.dim
    m = u.size
    rho = (np.eye(d) - u.member_sum_projector()) / (d - m)
    # spectrum is exactly {0 x m, 1/(D-m) x (D-m)}, so no PSD re-check needed
    return DensityMatrix(rho, u.parts, validate=False)


def _site_operator(p_tensor: np.ndarray, locs: list[np.ndarray], site: int) -> np.ndarray:
    """Contract every party except ``site``; the result is Hermitian d_site x d_site."""
    n = len(locs)
    operands: list = [p_tensor, list(range(2 * n))]
    for j in range(n):
        if j == site:
            continue
        operands += [np.conj(locs[j]), [j], locs[j], [n + j]]
    operands.append([site, n + site])
    m = np.einsum(*operands)
    return (m + m.conj().T) / 2.0


def _seesaw_single(
    p_tensor: np.ndarray,
    dims: Sequence[int],
    rng: np.random.Generator,
    improvement_tol: float = SEESAW_IMPROVEMENT_TOL,
) -> tuple[float, list[np.ndarray]]:
    """One restart: alternate extremal local updates until improvement stalls."""
    n = len(dims)
    locs = []
    for d in dims:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        locs.append(v / np.linalg.norm(v))
    objective = -np.inf
    for _ in range(SEESAW_MAX_SWEEPS):
        sweep_start = objective
        for k in range(n):
            site = _site_operator(p_tensor, locs, k)
            vals, vecs = linalg.hermitian_eig(site)
            locs[k] = vecs[:, -1]
            # each local update is an exact maximization, so the objective is monotone
            assert vals[-1] >= objective - improvement_tol, "seesaw objective decreased"
            objective = float(vals[-1])
        if objective - sweep_start < improvement_tol:
            break
    return objective, locs


def seesaw_max_product_overlap(
    projector: np.ndarray,
    parts: PartyStructure,
    restarts: int = DEFAULT_RESTARTS,
    seed: int | Sequence[int] = 0,
    improvement_tol: float = SEESAW_IMPROVEMENT_TOL,
) -> UnextendibilityCertificate:
    """Maximize <phi|P|phi> over product vectors by multi-start seesaw.

    Restart r draws its start from ``default_rng([*seed, r])``, so runs are
    reproducible and restarts are independent; the best overlap wins, ties
    broken by the lowest restart index.
    """
    p = linalg.as_hermitian(projector)
    if float(np.max(np.abs(p @ p - p))) > PROJECTOR_TOL:
        raise ValueError("input is not an orthogonal projector within tolerance")
    if restarts < 1:
        raise ValueError("need at least one restart")
    dims = parts.local_dims
    if p.shape[0] != parts.dim:
        raise ValueError("projector dimension does not match the party structure")
    p_tensor = p.reshape(dims + dims)
    base = list(seed) if isinstance(seed, (list, tuple)) else [int(seed)]
    best_overlap = -np.inf
    best_locs: list[np.ndarray] | None = None
    for r in range(restarts):
        rng = np.random.default_rng(base + [r])
        overlap, locs = _seesaw_single(p_tensor, dims, rng, improvement_tol)
        if overlap > best_overlap:
            best_overlap = overlap
            best_locs = locs
    assert best_locs is not None
    best = ProductVector(tuple(v / np.linalg.norm(v) for v in best_locs))
    return UnextendibilityCertificate(
        max_overlap=float(min(max(best_overlap, 0.0), 1.0)),
        restarts=restarts,
        best_product_vector=best,
    )


def certify_unextendible(
    u: UPB,
    restarts: int = DEFAULT_RESTARTS,
    seed: int | Sequence[int] = 0,
    improvement_tol: float = SEESAW_IMPROVEMENT_TOL,
) -> UnextendibilityCertificate:
    """Run the seesaw on the complementary projector and attach the certificate."""
    cert = seesaw_max_product_overlap(
        u.complement_projector(), u.parts, restarts, seed, improvement_tol
    )
    u.certificate = cert
    return cert


@dataclass(frozen=True)
class HuntResult:
    """Distinct product vectors found inside a subspace, with their overlaps."""

    vectors: tuple[ProductVector, ...]
    overlaps: tuple[float, ...]
    rank: int

    @property
    def distinct_count(self) -> int:
        return len(self.vectors)


def subspace_product_hunt(
    basis: Sequence[np.ndarray],
    parts: PartyStructure,
    restarts: int = DEFAULT_RESTARTS,
    seed: int | Sequence[int] = 0,
    improvement_tol: float = SEESAW_IMPROVEMENT_TOL,
) -> HuntResult:
    """Hunt product vectors in the span of ``basis`` by multi-start seesaw.

    The basis is orthonormalized first (a dependent basis is rejected); every
    restart landing at overlap >= 1 - gap counts as a hit, and hits are
    clustered into distinct solutions by mutual fidelity.  The reported rank
    is the linear-independence rank of the expanded hits, computed from their
    Gram spectrum at the default tolerance.
    """
    ortho = linalg.orthonormalize(basis)
    if len(ortho) != len(basis):
        raise ValueError("basis vectors are linearly dependent")
    dim = parts.dim
    if any(b.shape[0] != dim for b in ortho):
        raise ValueError("basis vectors do not match the party structure")
    proj = np.zeros((dim, dim), dtype=complex)
    for b in ortho:
        proj += np.outer(b, b.conj())

    p_tensor = ((proj + proj.conj().T) / 2).reshape(parts.local_dims + parts.local_dims)
    base = list(seed) if isinstance(seed, (list, tuple)) else [int(seed)]
    hits: list[tuple[np.ndarray, ProductVector, float]] = []
    for r in range(restarts):
        rng = np.random.default_rng(base + [r])
        overlap, locs = _seesaw_single(p_tensor, parts.local_dims, rng, improvement_tol)
        if overlap < 1.0 - UNEXTENDIBILITY_GAP:
            continue
        pv = ProductVector(tuple(v / np.linalg.norm(v) for v in locs))
        full = expand(pv)
        for known, _, _ in hits:
            if abs(np.vdot(known, full)) ** 2 > 1.0 - DISTINCT_FIDELITY_TOL:
                break
        else:
            hits.append((full, pv, float(overlap)))

    if hits:
        stacked = np.column_stack([h[0] for h in hits])
        gram = stacked.conj().T @ stacked
        rank = linalg.numerical_rank(gram)
    else:
        rank = 0
    return HuntResult(
        vectors=tuple(h[1] for h in hits),
        overlaps=tuple(h[2] for h in hits),
        rank=rank,
    )
