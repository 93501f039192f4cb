"""Dense complex linear algebra kernel.

Everything downstream works on small (dim <= 64) dense complex matrices, so
the module favors exactness and determinism over asymptotic speed:

- ``hermitian_eig`` is a cyclic Jacobi solver for complex Hermitian matrices.
  Jacobi gives orthonormal eigenvectors for free, converges quadratically at
  these sizes, and is bit-reproducible for identical input.
- ``partial_transpose`` is a pure index permutation (reshape + axis swap),
  never a similarity transform, so traces and involution hold exactly.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

HERMITIAN_RTOL = 1e-12      # admissible |H - H^dag| relative to 1 + maxabs(H)
JACOBI_CONV_RTOL = 1e-14    # off-diagonal Frobenius norm target, relative to 1 + ||H||_F
JACOBI_MAX_SWEEPS = 100
DEFAULT_TOL = 1e-9          # rank / kernel threshold for unit-trace operators


class ConvergenceError(RuntimeError):
    """Eigensolver failed to reach the off-diagonal target within the sweep cap."""


class EigDecomposition(NamedTuple):
    """Full Hermitian eigendecomposition, eigenvalues ascending."""

    eigenvalues: np.ndarray   # real, shape (n,)
    eigenvectors: np.ndarray  # complex, shape (n, n), orthonormal columns


def as_hermitian(matrix: np.ndarray) -> np.ndarray:
    """Validate Hermiticity within tolerance and return the symmetrized copy.

    Raises ValueError if the matrix is not square or deviates from its
    conjugate transpose by more than ``HERMITIAN_RTOL * (1 + maxabs)``.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = 1.0 + (np.max(np.abs(m)) if m.size else 0.0)
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > HERMITIAN_RTOL * scale:
        raise ValueError(f"matrix is not Hermitian: max |H - H^dag| = {dev:.3e}")
    return (m + m.conj().T) / 2.0


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, (i*dimB + k, j*dimB + l) -> A[i,j] * B[k,l]."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Left-to-right Kronecker product of a nonempty sequence."""
    if not len(factors):
        raise ValueError("need at least one factor")
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def _off_norm(a: np.ndarray) -> float:
    d = np.abs(a) ** 2
    np.fill_diagonal(d, 0.0)
    return float(np.sqrt(d.sum()))


def hermitian_eig(matrix: np.ndarray) -> EigDecomposition:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation is a 2x2 unitary annihilating one off-diagonal pair: the
    pair's phase is absorbed first, then a real Givens rotation zeroes it.
    Sweeps run in fixed (p, q) order, so the output is deterministic for
    identical input.  Eigenvectors inside a degenerate cluster are
    re-orthonormalized by Gram-Schmidt in stable index order.

    Raises ConvergenceError if the off-diagonal norm has not dropped below
    ``JACOBI_CONV_RTOL * (1 + ||H||_F)`` after ``JACOBI_MAX_SWEEPS`` sweeps.
    """
    h = as_hermitian(matrix)
    n = h.shape[0]
    if n == 1:
        return EigDecomposition(np.array([h[0, 0].real]), np.eye(1, dtype=complex))

    a = h.copy()
    v = np.eye(n, dtype=complex)
    fro = float(np.sqrt((np.abs(a) ** 2).sum()))
    target = JACOBI_CONV_RTOL * (1.0 + fro)
    skip = target / (n * n)

    converged = False
    for _ in range(JACOBI_MAX_SWEEPS):
        if _off_norm(a) < target:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # 2x2 block of the rotation: [[c, s], [u10, u11]]
                u10 = -s * np.conj(phase)
                u11 = c * np.conj(phase)

                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp + u10 * colq
                a[:, q] = s * colp + u11 * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp + np.conj(u10) * rowq
                a[q, :] = s * rowp + np.conj(u11) * rowq
                # the annihilated pair is exact by construction
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp + u10 * vq
                v[:, q] = s * vp + u11 * vq
    else:
        converged = _off_norm(a) < target
    if not converged:
        raise ConvergenceError(
            f"Jacobi sweeps exhausted ({JACOBI_MAX_SWEEPS}); "
            f"off-diagonal norm {_off_norm(a):.3e} above target {target:.3e}"
        )

    vals = np.diag(a).real.copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = v[:, order]
    _regramschmidt_degenerate(vals, vecs, 1.0 + float(np.max(np.abs(h))))
    return EigDecomposition(vals, vecs)


def _regramschmidt_degenerate(vals: np.ndarray, vecs: np.ndarray, scale: float) -> None:
    """Gram-Schmidt eigenvector columns within each degenerate cluster, in place."""
    n = len(vals)
    tol = 1e-9 * scale
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and vals[stop] - vals[stop - 1] <= tol:
            stop += 1
        if stop - start > 1:
            for j in range(start, stop):
                col = vecs[:, j]
                for i in range(start, j):
                    col = col - vecs[:, i] * np.vdot(vecs[:, i], col)
                vecs[:, j] = col / np.sqrt(np.vdot(col, col).real)
        start = stop


def partial_transpose(
    matrix: np.ndarray, local_dims: Sequence[int], transposed: Iterable[int]
) -> np.ndarray:
    """Transpose the row/column indices of the parties listed in ``transposed``.

    Implemented as an index permutation on the composite multi-indices, so the
    operation is exact: applying it twice returns the input bit for bit, and
    the trace is untouched.
    """
    m = np.asarray(matrix)
    dims = tuple(int(d) for d in local_dims)
    n = len(dims)
    total = 1
    for d in dims:
        total *= d
    if m.shape != (total, total):
        raise ValueError(f"matrix shape {m.shape} does not match local dims {dims}")
    cut = sorted(set(int(k) for k in transposed))
    if not cut or len(cut) >= n or cut[0] < 0 or cut[-1] >= n:
        raise ValueError(f"transposed parties {cut} must be a nonempty proper subset of 0..{n - 1}")
    t = m.reshape(dims + dims)
    perm = list(range(2 * n))
    for k in cut:
        perm[k], perm[n + k] = perm[n + k], perm[k]
    return t.transpose(perm).reshape(total, total)


def kernel(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal eigenvectors of a Hermitian matrix with |eigenvalue| < tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals, vecs = hermitian_eig(matrix)
    return [vecs[:, k].copy() for k in range(len(vals)) if abs(vals[k]) < tol]


def numerical_rank(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Number of eigenvalues of a Hermitian matrix with |eigenvalue| >= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals, _ = hermitian_eig(matrix)
    return int(np.count_nonzero(np.abs(vals) >= tol))


def orthonormalize(vectors: Sequence[np.ndarray], drop_tol: float = 1e-10) -> list[np.ndarray]:
    """Modified Gram-Schmidt; vectors whose residual norm falls below drop_tol are dropped."""
    basis: list[np.ndarray] = []
    for vec in vectors:
        w = np.asarray(vec, dtype=complex).copy()
        for b in basis:
            w = w - b * np.vdot(b, w)
        nrm = float(np.sqrt(np.vdot(w, w).real))
        if nrm > drop_tol:
            basis.append(w / nrm)
    return basis


def subspace_distance(first: Sequence[np.ndarray], second: Sequence[np.ndarray]) -> float:
    """Max-entry distance between the orthogonal projectors onto the two spans.

    Both vector lists are orthonormalized internally; the result is zero
    exactly when the spans coincide.
    """
    def projector(vectors: Sequence[np.ndarray]) -> np.ndarray:
        ortho = orthonormalize(vectors)
        if not ortho:
            raise ValueError("empty span")
        dim = ortho[0].shape[0]
        p = np.zeros((dim, dim), dtype=complex)
        for b in ortho:
            p += np.outer(b, b.conj())
        return p

    return float(np.max(np.abs(projector(first) - projector(second))))
