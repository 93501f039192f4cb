"""Multipartite state representations and PPT testing.

Holds the party bookkeeping (local dimensions, bipartitions), product
vectors, density matrices, and the completely separable projector family
indexed by per-qubit labels ``{0, 1, phi1, phi2}``:

    |0>, |1>, |phi1> = (|0>+|1>)/sqrt(2), |phi2> = (|0>+i|1>)/sqrt(2)

The 4^n projectors onto tensor products of these vectors form a (nonsingular
Gram) basis of the n-qubit operator space, which is what makes "perturb in
every independent direction" a finite computation.
"""

from __future__ import annotations

import itertools
from dataclasses import InitVar, dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg

LABELS = ("0", "1", "phi1", "phi2")

UNIT_NORM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
PPT_TOL = 1e-9
PROJECTOR_BASIS_MAX_QUBITS = 6

_LOCAL_VECTORS = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "phi1": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    "phi2": np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0),
}


def local_vector(label: str) -> np.ndarray:
    """Single-qubit vector for one projector-basis label."""
    try:
        return _LOCAL_VECTORS[label].copy()
    except KeyError:
        raise ValueError(f"unknown label {label!r}; expected one of {LABELS}") from None


@dataclass(frozen=True)
class PartyStructure:
    """Local dimensions of the parties, e.g. (2, 2, 2) for three qubits."""

    local_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.local_dims)
        object.__setattr__(self, "local_dims", dims)
        if any(d < 1 for d in dims):
            raise ValueError(f"local dimensions must be positive, got {dims}")
        if self.dim < 2:
            raise ValueError("total dimension must be at least 2")

    @property
    def n_parties(self) -> int:
        return len(self.local_dims)

    @property
    def dim(self) -> int:
        total = 1
        for d in self.local_dims:
            total *= d
        return total

    @property
    def all_qubits(self) -> bool:
        return all(d == 2 for d in self.local_dims)


def qubits(n: int) -> PartyStructure:
    return PartyStructure((2,) * n)


@dataclass(frozen=True)
class Bipartition:
    """One side of a cut through the parties; the complement is the other side."""

    side_a: tuple[int, ...]

    def __post_init__(self):
        side = tuple(sorted(set(int(k) for k in self.side_a)))
        object.__setattr__(self, "side_a", side)
        if not side:
            raise ValueError("side_a must be nonempty")

    def validate_for(self, parts: PartyStructure) -> None:
        n = parts.n_parties
        if any(k < 0 or k >= n for k in self.side_a):
            raise ValueError(f"cut {self.side_a} references parties outside 0..{n - 1}")
        if len(self.side_a) >= n:
            raise ValueError("side_a must be a proper subset of the parties")

    def side_b(self, parts: PartyStructure) -> tuple[int, ...]:
        return tuple(k for k in range(parts.n_parties) if k not in self.side_a)


def bipartitions(parts: PartyStructure) -> list[Bipartition]:
    """All cuts up to complement symmetry, deterministic order.

    The canonical representative is the side containing party 0; cuts are
    listed by binary counting over the remaining parties.
    """
    n = parts.n_parties
    if n < 2:
        raise ValueError("need at least two parties to bipartition")
    rest = list(range(1, n))
    out = []
    for mask in range(2 ** len(rest) - 1):
        side = (0,) + tuple(rest[i] for i in range(len(rest)) if mask >> i & 1)
        out.append(Bipartition(side))
    return out


@dataclass(frozen=True)
class ProductVector:
    """One normalized local vector per party."""

    locals: tuple[np.ndarray, ...]

    def __post_init__(self):
        vecs = tuple(np.asarray(v, dtype=complex) for v in self.locals)
        object.__setattr__(self, "locals", vecs)
        for k, v in enumerate(vecs):
            if v.ndim != 1:
                raise ValueError(f"local vector {k} is not one-dimensional")
            if abs(np.linalg.norm(v) - 1.0) > UNIT_NORM_TOL:
                raise ValueError(f"local vector {k} is not normalized")

    @property
    def parts(self) -> PartyStructure:
        return PartyStructure(tuple(len(v) for v in self.locals))


def expand(vector: ProductVector) -> np.ndarray:
    """Full tensor-product vector in the composite space."""
    return linalg.kron_all(vector.locals)


def product_projector(vector: ProductVector) -> np.ndarray:
    full = expand(vector)
    return np.outer(full, full.conj())


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite (within tolerance) operator."""

    matrix: np.ndarray
    parts: PartyStructure
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        m = linalg.as_hermitian(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.shape[0] != self.parts.dim:
            raise ValueError(
                f"matrix dimension {m.shape[0]} does not match party structure {self.parts.local_dims}"
            )
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise ValueError(f"trace is {np.trace(m).real!r}, expected 1")
        if validate:
            vals, _ = linalg.hermitian_eig(m)
            if vals[0] < -PSD_TOL:
                raise ValueError(f"operator is not positive semidefinite: min eigenvalue {vals[0]:.3e}")

    @property
    def dim(self) -> int:
        return self.parts.dim


def validate_labels(labels: Sequence[str]) -> tuple[str, ...]:
    mu = tuple(labels)
    for l in mu:
        if l not in LABELS:
            raise ValueError(f"unknown label {l!r}; expected one of {LABELS}")
    return mu


def basis_projector(labels: Sequence[str]) -> DensityMatrix:
    """Rank-1 completely separable projector onto the labeled product vector."""
    mu = validate_labels(labels)
    if not mu:
        raise ValueError("need at least one label")
    vec = ProductVector(tuple(local_vector(l) for l in mu))
    return DensityMatrix(product_projector(vec), qubits(len(mu)), validate=False)


def basis_labels(n_qubits: int) -> list[tuple[str, ...]]:
    """The 4^n label tuples in lexicographic order over ``LABELS``."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    return list(itertools.product(LABELS, repeat=n_qubits))


def projector_basis(n_qubits: int) -> list[DensityMatrix]:
    """All 4^n separable basis projectors, lexicographic label order."""
    if not 1 <= n_qubits <= PROJECTOR_BASIS_MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{PROJECTOR_BASIS_MAX_QUBITS}")
    return [basis_projector(mu) for mu in basis_labels(n_qubits)]


def projector_basis_gram(n_qubits: int) -> np.ndarray:
    """Real Gram matrix G[uv] = tr(E_u E_v) of the separable projector basis.

    Overlaps factor over parties, so entries are products of squared local
    overlaps; still computed directly from the expanded vectors.
    """
    vecs = [linalg.kron_all([local_vector(l) for l in mu]) for mu in basis_labels(n_qubits)]
    m = np.column_stack(vecs)
    return np.abs(m.conj().T @ m) ** 2


def decompose_in_projector_basis(rho: DensityMatrix) -> np.ndarray:
    """Unique real coefficients c with rho = sum_mu c[mu] * E_mu.

    Solves the Gram system via eigendecomposition; valid because the Gram
    matrix is nonsingular for qubit parties.
    """
    if not rho.parts.all_qubits:
        raise ValueError("projector basis decomposition requires qubit parties")
    n = rho.parts.n_parties
    gram = projector_basis_gram(n)
    rhs = np.array(
        [np.vdot(linalg.kron_all([local_vector(l) for l in mu]),
                 rho.matrix @ linalg.kron_all([local_vector(l) for l in mu])).real
         for mu in basis_labels(n)]
    )
    vals, vecs = linalg.hermitian_eig(gram)
    coeffs = vecs @ ((vecs.conj().T @ rhs) / vals)
    return coeffs.real


class CutVerdict(NamedTuple):
    ppt: bool
    min_eigenvalue: float


def min_pt_eigenvalue(rho: DensityMatrix, cut: Bipartition) -> float:
    """Smallest eigenvalue of the partial transpose of rho across the cut."""
    cut.validate_for(rho.parts)
    pt = linalg.partial_transpose(rho.matrix, rho.parts.local_dims, cut.side_a)
    vals, _ = linalg.hermitian_eig(pt)
    return float(vals[0])


def is_ppt_all_cuts(rho: DensityMatrix, tol: float = PPT_TOL) -> dict[Bipartition, CutVerdict]:
    """PPT verdict and min PT eigenvalue for every cut, up to complement symmetry."""
    report: dict[Bipartition, CutVerdict] = {}
    for cut in bipartitions(rho.parts):
        mn = min_pt_eigenvalue(rho, cut)
        report[cut] = CutVerdict(mn >= -tol, mn)
    return report


def random_product_vector(parts: PartyStructure, rng: np.random.Generator) -> ProductVector:
    """Product vector with each local drawn uniformly on the complex unit sphere."""
    locs = []
    for d in parts.local_dims:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        locs.append(v / np.linalg.norm(v))
    return ProductVector(tuple(locs))


def random_density_matrix(parts: PartyStructure, rng: np.random.Generator) -> DensityMatrix:
    """Full-rank state G G^dag / tr from a complex Gaussian G (Ginibre sampling)."""
    d = parts.dim
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, parts, validate=False)
