"""Small dense linear algebra for 2x2 and 4x4 Hermitian problems.

Diagonalization is delegated to LAPACK through :func:`numpy.linalg.eigh`;
the wrappers here add the input checks, tolerances and orderings the rest of
the package relies on. Stacked inputs ``(..., n, n)`` are accepted where the
oracles need to evaluate many matrices at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending) and the matching eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m, max_dim=4):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise InvalidArgumentError(f"expected a matrix, got shape {m.shape}")
    if m.shape[0] > max_dim or m.shape[1] > max_dim:
        raise InvalidArgumentError(f"matrix dimensions {m.shape} exceed {max_dim}x{max_dim}")
    if not np.all(np.isfinite(m)):
        raise InvalidArgumentError("matrix has non-finite entries")
    return m


def max_norm(m):
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def is_hermitian(m, tol=1e-12):
    """Entrywise Hermiticity check, relative to the largest entry."""
    m = np.asarray(m)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        return False
    scale = max_norm(m) or 1.0
    return max_norm(m - np.swapaxes(m.conj(), -1, -2)) <= tol * scale


def _require_hermitian(m, tol):
    if m.shape[-1] != m.shape[-2]:
        raise InvalidArgumentError(f"matrix must be square, got {m.shape}")
    scale = max_norm(m) or 1.0
    if max_norm(m - np.swapaxes(m.conj(), -1, -2)) > tol * scale:
        raise InvalidArgumentError("matrix is not Hermitian")


def eig_hermitian(m, tol=1e-12):
    """Diagonalize a Hermitian matrix.

    Returns a :class:`Spectrum` with eigenvalues ascending. Hermiticity is
    checked relative to the largest entry so that matrices in joules
    (entries ~1e-20) are treated the same as dimensionless ones.
    """
    m = as_matrix(m)
    _require_hermitian(m, tol)
    h = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(h)
    return Spectrum(w, v)


def eigvalsh_stack(m):
    """Eigenvalues of a stack of Hermitian matrices, no checks."""
    return np.linalg.eigvalsh(m)


def trace_norm(m):
    """Schatten 1-norm, the sum of singular values."""
    m = np.asarray(m, dtype=complex)
    if m.shape[-1] != m.shape[-2]:
        raise InvalidArgumentError(f"trace norm needs a square matrix, got {m.shape}")
    return np.linalg.svd(m, compute_uv=False).sum(axis=-1)


def trace_norm_hermitian(m):
    """Faster path for Hermitian (stacked) input: sum of |eigenvalues|."""
    return np.abs(np.linalg.eigvalsh(m)).sum(axis=-1)


def matrix_sqrt_psd(m, neg_tol=1e-10):
    """PSD square root via the spectral decomposition.

    Eigenvalues in ``[-neg_tol, 0)`` are treated as round-off and clamped;
    anything more negative is rejected.
    """
    s = eig_hermitian(m, tol=1e-10)
    lam = s.eigenvalues
    if lam.min() < -neg_tol:
        raise InvalidArgumentError(f"matrix is not positive semidefinite (eigenvalue {lam.min():.3e})")
    lam = np.clip(lam, 0.0, None)
    v = s.eigenvectors
    return (v * np.sqrt(lam)) @ v.conj().T


def kron(*ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def partial_trace(rho, keep):
    """Reduced state of a two-qubit ``rho``; ``keep`` is 0 (first) or 1 (second)."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    if keep == 1:
        return np.einsum("ijik->jk", r)
    raise InvalidArgumentError("keep must be 0 or 1")


def commutator(a, b):
    return a @ b - b @ a


def haar_random_unitary(dim, seed=None, size=None):
    """Haar-distributed unitary (or a stack of ``size`` of them).

    QR of a complex Ginibre matrix with the phases of ``diag(R)`` divided
    out, which makes the distribution exactly Haar. ``seed`` may be an int
    or a :class:`numpy.random.Generator`.
    """
    if dim not in (2, 4):
        raise InvalidArgumentError(f"dim must be 2 or 4, got {dim}")
    rng = np.random.default_rng(seed)
    shape = (dim, dim) if size is None else (size, dim, dim)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[..., None, :]


def unitary_from_hermitian(k):
    """``exp(i K)`` for Hermitian ``K`` via its eigendecomposition."""
    w, v = np.linalg.eigh(0.5 * (k + k.conj().T))
    return (v * np.exp(1j * w)) @ v.conj().T
