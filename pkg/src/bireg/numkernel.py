"""Dense numerical kernels shared by every other module.

Symmetric eigendecomposition, SVD, and complex log-determinants are thin,
contract-checked wrappers around LAPACK (via numpy.linalg); randomness is
a counter-based Philox generator fully determined by its seed.
"""

from dataclasses import dataclass

import numpy as np

SINGULAR_CLAMP = 1e-13  # singular values below this fraction of s_1 become exactly 0
SYMMETRY_RTOL = 1e-12


def rng_from_seed(seed):
    """Counter-based generator fully specified by a 64-bit seed. No global state."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def rng_substream(seed, index):
    """Independent stream derived deterministically from (seed, index)."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), int(index)]))
    )


def _as_matrix(M, dtype=float):
    M = np.asarray(M, dtype=dtype)
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={M.ndim}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


def _fix_column_signs(V, tol=1e-12):
    """Flip columns so the first significantly-nonzero coordinate is positive."""
    V = V.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        big = np.abs(col) > tol * max(np.abs(col).max(), 1e-300)
        if big.any() and col[np.argmax(big)] < 0:
            V[:, j] = -col
    return V


def sym_eig(M):
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues descending, eigenvector columns, orthonormal), with
    each eigenvector's first nonzero coordinate positive.  Raises on
    non-square or asymmetric input.
    """
    M = _as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"sym_eig needs a square matrix, got {M.shape}")
    fro = np.linalg.norm(M)
    if np.linalg.norm(M - M.T) > SYMMETRY_RTOL * max(fro, 1e-300):
        raise ValueError("matrix is not symmetric within 1e-12 relative")
    w, V = np.linalg.eigh(M)
    order = np.argsort(-w, kind="stable")
    return w[order], _fix_column_signs(V[:, order])


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray  # n x k, orthonormal columns
    s: np.ndarray  # k, descending, >= 0, tiny values clamped to exactly 0
    v: np.ndarray  # m x k, orthonormal columns; X ~= u @ diag(s) @ v.T


def svd(X):
    """Thin SVD with descending singular values and a deterministic sign fix.

    Values below SINGULAR_CLAMP * s_1 are clamped to exactly 0 for rank
    purposes (the looser application tolerance lives in the spectra module).
    """
    X = _as_matrix(X)
    u, s, vt = np.linalg.svd(X, full_matrices=False)
    if s.size and s[0] > 0:
        s = np.where(s < SINGULAR_CLAMP * s[0], 0.0, s)
    v = vt.T
    for j in range(u.shape[1]):
        col = u[:, j]
        big = np.abs(col) > 1e-12 * max(np.abs(col).max(), 1e-300)
        if big.any() and col[np.argmax(big)] < 0:
            u[:, j] = -col
            v[:, j] = -v[:, j]
    return SvdResult(u=u, s=s, v=v)


def singular_values(X):
    res = np.linalg.svd(_as_matrix(X), compute_uv=False)
    if res.size and res[0] > 0:
        res = np.where(res < SINGULAR_CLAMP * res[0], 0.0, res)
    return res


def complex_log_det(M):
    """det(M) of a square complex matrix as (log_modulus, argument).

    exp(log_modulus) * exp(i * argument) = det(M). Pivoted LU underneath, so
    no overflow for large well-conditioned matrices.  An exactly singular
    matrix reports log_modulus = -inf (argument 0).
    """
    M = _as_matrix(M, dtype=complex)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"complex_log_det needs a square matrix, got {M.shape}")
    sign, logabs = np.linalg.slogdet(M)
    if logabs == -np.inf or sign == 0:
        return -np.inf, 0.0
    return float(logabs), float(np.angle(sign))


def wrap_angle(a):
    """Wrap an angle difference into (-pi, pi]."""
    return float(np.pi - (np.pi - a) % (2.0 * np.pi))
