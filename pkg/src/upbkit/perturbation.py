"""Noise constructors and first-order analysis of partial-transpose spectra.

Two ways of perturbing a state are implemented:

- local noise: rho -> (rho + sum_mu eps_mu E_mu) / (1 + sum_mu eps_mu), with
  E_mu the separable projector basis.  Nonnegative coefficients preserve
  positivity and every separability property automatically; with negative
  coefficients positivity is checked post hoc via the full spectrum (exact
  and cheap at these dimensions).
- mixing noise: rho -> (rho + eps * rho1) / (1 + eps) for any state rho1 and
  small eps.

For a UPB state the kernel of the partially transposed state is spanned by
the UPB members with the cut parties conjugated entrywise.  Compressing the
noise's partial transpose onto that basis gives a small Hermitian matrix
whose eigenvalues lam_r predict the lowest eigenvalues of the perturbed
partial transpose to first order, eps * lam_r + O(eps^2).  The sign of the
smallest lam_r therefore classifies the noise: positive keeps the state PPT
across the cut, negative makes it NPT, and a vanishing lam_r is reported as
degenerate (first order is silent; callers resolve those instances by exact
diagonalization at their eps).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import linalg
from .states import (
    Bipartition,
    DensityMatrix,
    ProductVector,
    basis_labels,
    basis_projector,
    expand,
    validate_labels,
)
from .upb import UPB

COEFFICIENT_BOUND = 1.0      # sanity bound on |eps_mu|
EPSILON_GUARD = 0.1          # perturbative regime for mixing / predictions
DEGENERACY_BAND = 1e-9       # |lam_min| below this is degenerate
POSITIVITY_TOL = 1e-9


class PositivityError(RuntimeError):
    """A perturbation drove an eigenvalue below the admissible tolerance."""


@dataclass(frozen=True)
class LocalNoiseSpec:
    """Real coefficient per separable basis projector."""

    coefficients: Mapping[tuple[str, ...], float]

    def __post_init__(self):
        clean: dict[tuple[str, ...], float] = {}
        width = None
        for mu, eps in self.coefficients.items():
            mu = validate_labels(mu)
            if width is None:
                width = len(mu)
            elif len(mu) != width:
                raise ValueError("all labels must address the same number of qubits")
            eps = float(eps)
            if abs(eps) > COEFFICIENT_BOUND:
                raise ValueError(f"|eps| for {mu} exceeds the sanity bound {COEFFICIENT_BOUND}")
            clean[mu] = eps
        if not clean:
            raise ValueError("need at least one coefficient")
        object.__setattr__(self, "coefficients", clean)

    @property
    def n_qubits(self) -> int:
        return len(next(iter(self.coefficients)))

    @property
    def all_nonnegative(self) -> bool:
        return all(eps >= 0.0 for eps in self.coefficients.values())

    @property
    def total(self) -> float:
        return float(sum(self.coefficients.values()))

    def scaled(self, factor: float) -> "LocalNoiseSpec":
        return LocalNoiseSpec({mu: factor * eps for mu, eps in self.coefficients.items()})


def uniform_direction(n_qubits: int) -> LocalNoiseSpec:
    """Equal weight on every basis projector, summing to 1."""
    labels = basis_labels(n_qubits)
    w = 1.0 / len(labels)
    return LocalNoiseSpec({mu: w for mu in labels})


@dataclass(frozen=True)
class MixNoiseSpec:
    """Convex admixture of a noise state at weight eps."""

    rho1: DensityMatrix
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon <= EPSILON_GUARD:
            raise ValueError(f"epsilon must lie in (0, {EPSILON_GUARD}]")


def perturb_local(rho: DensityMatrix, spec: LocalNoiseSpec) -> DensityMatrix:
    """Add the weighted separable projectors and renormalize.

    Each basis projector has unit trace, so the normalization constant is
    1 + sum of the coefficients.  Raises PositivityError if the result has an
    eigenvalue below -POSITIVITY_TOL (only possible with negative
    coefficients).
    """
    if spec.n_qubits != rho.parts.n_parties or not rho.parts.all_qubits:
        raise ValueError("noise spec does not match the state's party structure")
    out = rho.matrix.copy()
    for mu, eps in spec.coefficients.items():
        if eps != 0.0:
            out += eps * basis_projector(mu).matrix
    norm = 1.0 + spec.total
    if norm <= 0.0:
        raise PositivityError("total noise weight drives the trace nonpositive")
    out /= norm
    vals, _ = linalg.hermitian_eig(out)
    if vals[0] < -POSITIVITY_TOL:
        raise PositivityError(
            f"perturbed operator has eigenvalue {vals[0]:.3e} < -{POSITIVITY_TOL:g}"
        )
    return DensityMatrix(out, rho.parts, validate=False)


def perturb_mix(rho: DensityMatrix, spec: MixNoiseSpec) -> DensityMatrix:
    """Convex combination (rho + eps * rho1) / (1 + eps); positivity is automatic."""
    if spec.rho1.parts != rho.parts:
        raise ValueError("noise state does not match the party structure")
    out = (rho.matrix + spec.epsilon * spec.rho1.matrix) / (1.0 + spec.epsilon)
    return DensityMatrix(out, rho.parts, validate=False)


def kernel_product_basis(u: UPB, cut: Bipartition) -> list[ProductVector]:
    """Members with the cut parties conjugated entrywise.

    These product vectors are orthonormal (conjugation preserves the zero
    pattern of the local overlaps) and span the kernel of the partially
    transposed UPB state.  For a real family the output equals the members.
    """
    cut.validate_for(u.parts)
    side = set(cut.side_a)
    out = []
    for member in u.members:
        locs = tuple(
            np.conj(v) if k in side else v.copy() for k, v in enumerate(member.locals)
        )
        out.append(ProductVector(locs))
    return out


@dataclass(frozen=True)
class KernelCompression:
    """Noise partial transpose compressed onto the kernel product basis."""

    matrix: np.ndarray        # m x m Hermitian
    eigenvalues: np.ndarray   # real, ascending

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def kernel_compression(noise: DensityMatrix, u: UPB, cut: Bipartition) -> KernelCompression:
    """Compress noise^{T_cut} onto the conjugated-member basis of the cut."""
    if noise.parts != u.parts:
        raise ValueError("noise state does not match the UPB's party structure")
    basis = [expand(v) for v in kernel_product_basis(u, cut)]
    pt = linalg.partial_transpose(noise.matrix, noise.parts.local_dims, cut.side_a)
    m = len(basis)
    comp = np.empty((m, m), dtype=complex)
    for i in range(m):
        row = pt @ basis[i]
        for j in range(m):
            comp[j, i] = np.vdot(basis[j], row)
    comp = (comp + comp.conj().T) / 2.0
    vals, _ = linalg.hermitian_eig(comp)
    return KernelCompression(matrix=comp, eigenvalues=vals)


def predict_first_order(compression: KernelCompression, epsilon: float) -> np.ndarray:
    """First-order prediction eps * lam_r for the lowest PT eigenvalues, ascending."""
    if not 0.0 <= epsilon <= EPSILON_GUARD:
        raise ValueError(f"epsilon must lie in [0, {EPSILON_GUARD}] for a first-order prediction")
    return np.sort(epsilon * compression.eigenvalues)


def entangled_pair_noise(
    parts_n: int = 3, pair: tuple[int, int] = (0, 1)
) -> DensityMatrix:
    """Maximally entangled projector on two qubits, ground state elsewhere.

    The partial transpose across any cut separating the pair has a negative
    eigenvalue, so this is the canonical NPT-inducing noise fixture.
    """
    from .states import qubits  # local import to keep module load order simple

    i, j = pair
    if i == j or not (0 <= i < parts_n and 0 <= j < parts_n):
        raise ValueError(f"pair {pair} must name two distinct parties among {parts_n}")
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([0.0, 1.0], dtype=complex)
    low = [e0] * parts_n
    high = [e0] * parts_n
    high[i], high[j] = e1, e1
    vec = (linalg.kron_all(low) + linalg.kron_all(high)) / np.sqrt(2.0)
    return DensityMatrix(np.outer(vec, vec.conj()), qubits(parts_n), validate=False)


class NoiseEffect(enum.Enum):
    PPT_PRESERVING = "PPT_PRESERVING"
    NPT_INDUCING = "NPT_INDUCING"
    DEGENERATE = "DEGENERATE"


@dataclass(frozen=True)
class NoiseClassification:
    verdict: NoiseEffect
    lambda_min: float
    compression: KernelCompression


def classify_noise(
    noise: DensityMatrix, u: UPB, cut: Bipartition, band: float = DEGENERACY_BAND
) -> NoiseClassification:
    """Classify the noise by the sign of the smallest compression eigenvalue.

    PPT_PRESERVING requires lam_min > band and NPT_INDUCING lam_min < -band;
    anything inside the band is DEGENERATE and must be resolved by exact
    diagonalization at the working epsilon.
    """
    comp = kernel_compression(noise, u, cut)
    lam_min = float(comp.eigenvalues[0])
    if lam_min > band:
        verdict = NoiseEffect.PPT_PRESERVING
    elif lam_min < -band:
        verdict = NoiseEffect.NPT_INDUCING
    else:
        verdict = NoiseEffect.DEGENERATE
    return NoiseClassification(verdict=verdict, lambda_min=lam_min, compression=comp)
