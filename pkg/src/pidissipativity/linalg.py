"""Dense real-matrix kernels used by the dissipativity computations.

Everything here is a pure function of its arguments and works on small
(n <= 100) dense ``numpy`` arrays.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

__all__ = ["SpectrumSummary", "NotHurwitzError", "spectrum",
           "spectral_abscissa", "solve_lyapunov", "matrix_exponential",
           "spectral_norm", "estimate_M", "is_negative_semidefinite",
           "DIAGONALIZABLE_COND", "M_SAMPLE_TIMES"]

# eigenvector condition number above which A^T is treated as defective
DIAGONALIZABLE_COND = 1e8
# fallback time grid for sup_t ||exp((A^T + eps I) t)||
M_SAMPLE_TIMES = np.logspace(-4, np.log10(200.0), 400)
M_SAFETY = 1.05


class NotHurwitzError(ValueError):
    """Raised when a stable (Hurwitz) matrix is required but not given."""


@dataclass(frozen=True)
class SpectrumSummary:
    eigenvalues: np.ndarray
    spectral_abscissa: float
    is_diagonalizable: bool
    eigvec_condition: float


def _square(A, name="A"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def spectrum(A):
    """Eigenvalues, spectral abscissa and eigenvector conditioning of `A`."""
    A = _square(A)
    w, V = np.linalg.eig(A)
    if not np.all(np.isfinite(w)):
        raise np.linalg.LinAlgError("eigenvalue computation returned non-finite values")
    cond = float(np.linalg.cond(V)) if A.size else 1.0
    if not np.isfinite(cond):
        cond = np.inf
    return SpectrumSummary(eigenvalues=w,
                           spectral_abscissa=float(np.max(w.real)),
                           is_diagonalizable=bool(cond < DIAGONALIZABLE_COND),
                           eigvec_condition=max(cond, 1.0))


def spectral_abscissa(A):
    """Largest real part over the eigenvalues of `A`."""
    A = _square(A)
    w = np.linalg.eigvals(A)
    if not np.all(np.isfinite(w)):
        raise np.linalg.LinAlgError("eigenvalue computation returned non-finite values")
    return float(np.max(w.real))


def solve_lyapunov(A, Q):
    """Solve ``A^T X + X A + Q = 0`` for symmetric positive definite `X`.

    The equation is vectorized with Kronecker products,
    ``(I kron A^T + A^T kron I) vec(X) = -vec(Q)``, and solved densely.
    This is O(n^6) and intended for the small augmented systems
    (2n = 4 in the guidance benchmark).

    Parameters
    ----------
    A : (n, n) array_like
        Hurwitz matrix.
    Q : (n, n) array_like
        Symmetric positive definite right-hand side.

    Returns
    -------
    X : (n, n) ndarray
        Equal to the integral of ``exp(A^T t) Q exp(A t)`` over [0, inf).

    Raises
    ------
    NotHurwitzError
        If `A` has an eigenvalue with non-negative real part; the defining
        integral diverges in that case.
    """
    A = _square(A)
    Q = _square(Q, "Q")
    if Q.shape != A.shape:
        raise ValueError("A and Q must have the same shape")
    if not np.allclose(Q, Q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(Q).max())):
        raise ValueError("Q must be symmetric")
    alpha = spectral_abscissa(A)
    if alpha >= 0:
        raise NotHurwitzError(f"A is not Hurwitz (spectral abscissa {alpha:.6g})")
    n = A.shape[0]
    eye = np.eye(n)
    # column-major vec: vec(A^T X) = (I kron A^T) vec X, vec(X A) = (A^T kron I) vec X
    L = np.kron(eye, A.T) + np.kron(A.T, eye)
    try:
        x = np.linalg.solve(L, -Q.reshape(-1, order="F"))
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("singular Kronecker system") from exc
    X = x.reshape(n, n, order="F")
    return 0.5 * (X + X.T)


def matrix_exponential(A):
    """Matrix exponential by scaling and squaring (Pade approximation)."""
    A = _square(A)
    with np.errstate(over="raise", invalid="raise"):
        try:
            E = expm(A)
        except FloatingPointError as exc:
            raise OverflowError("matrix exponential overflowed") from exc
    if not np.all(np.isfinite(E)):
        raise OverflowError("matrix exponential overflowed")
    return E


def spectral_norm(A):
    """Largest singular value of `A`."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def _sampled_transient(At, eps, times):
    shifted = At + eps * np.eye(At.shape[0])
    return max(spectral_norm(matrix_exponential(shifted * t)) for t in times)


def estimate_M(A):
    """Transient-growth constant for a Hurwitz matrix.

    Returns ``(M_tilde, eps)`` with ``eps = -spectral_abscissa(A)`` such that
    ``||exp(A^T t)|| <= M_tilde * exp(-eps t)``.

    When ``A^T = P J P^{-1}`` is diagonalizable, ``M_tilde = ||P|| ||P^{-1}||``
    (the transient factor of the diagonal part is exactly one). Numerically
    defective matrices (eigenvector condition number >= 1e8) fall back to
    ``1.05 * max ||exp((A^T + eps I) t)||`` sampled on 400 log-spaced times
    in [1e-4, 200].
    """
    A = _square(A)
    At = A.T
    summ = spectrum(At)
    if summ.spectral_abscissa >= 0:
        raise NotHurwitzError(
            f"A is not Hurwitz (spectral abscissa {summ.spectral_abscissa:.6g})")
    eps = -summ.spectral_abscissa
    if summ.is_diagonalizable:
        return summ.eigvec_condition, eps
    peak = max(1.0, _sampled_transient(At, eps, M_SAMPLE_TIMES))
    return M_SAFETY * peak, eps


def is_negative_semidefinite(S, tol=1e-9):
    """True iff the largest eigenvalue of the symmetric part of `S` is <= tol."""
    S = _square(S, "S")
    return bool(np.linalg.eigvalsh(0.5 * (S + S.T)).max() <= tol)
