"""Small dense real linear algebra used by the trigger design procedures.

Matrices are plain ``numpy.ndarray`` objects. All norms are Euclidean for
vectors and induced-2 for matrices. The systems this toolkit targets are
tiny (n <= 10 or so), so the solvers favour determinism and verifiability
over asymptotic speed: the symmetric eigensolver is a cyclic Jacobi sweep
and the Lyapunov equation is solved densely through its Kronecker
vectorization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DesignError

__all__ = [
    "SpectralSummary",
    "sym_eig",
    "spectral_summary",
    "spectral_norm",
    "solve_lyapunov",
    "is_hurwitz",
]

# Relative asymmetry tolerated before an input is rejected as non-symmetric.
_SYMMETRY_RTOL = 1e-12
# Jacobi convergence: off-diagonal Frobenius mass below this times ||M||_F.
_JACOBI_RTOL = 1e-14
_JACOBI_MAX_SWEEPS = 60


@dataclass(frozen=True)
class SpectralSummary:
    """Extreme eigenvalues of a symmetric matrix."""

    min_eigenvalue: float
    max_eigenvalue: float


def _as_matrix(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def _require_symmetric(M, name="matrix"):
    M = _as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    scale = np.linalg.norm(M)
    if np.linalg.norm(M - M.T) > _SYMMETRY_RTOL * max(scale, 1e-300):
        raise ValueError(f"{name} is not symmetric within tolerance {_SYMMETRY_RTOL}")
    return 0.5 * (M + M.T)


def sym_eig(M, vectors=False):
    """Eigenvalues (and optionally eigenvectors) of a symmetric matrix.

    Uses cyclic Jacobi rotations, iterating full sweeps until the
    off-diagonal Frobenius mass drops below ``1e-14 * ||M||_F``.

    Parameters
    ----------
    M : array_like
        Symmetric matrix. Asymmetry beyond a 1e-12 relative tolerance is
        rejected.
    vectors : bool, optional
        When true, also return the orthonormal eigenvector matrix.

    Returns
    -------
    values : ndarray
        Eigenvalues in ascending order.
    basis : ndarray, optional
        Columns are eigenvectors aligned with ``values``; only returned
        when ``vectors`` is true.
    """
    A = _require_symmetric(M, "sym_eig input")
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        vals = np.zeros(n)
        return (vals, V) if vectors else vals
    A = A.copy()
    for _ in range(_JACOBI_MAX_SWEEPS):
        # Off-diagonal Frobenius mass, summed directly; subtracting diagonal
        # mass from the total cancels catastrophically near convergence.
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= _JACOBI_RTOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= _JACOBI_RTOL * scale / (n * n):
                    continue
                # Classic Jacobi rotation annihilating A[p, q].
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(tau, 1.0)) if tau != 0.0 else 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise ArithmeticError("Jacobi eigensolver did not converge")
    vals = np.diag(A).copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    if vectors:
        return vals, V[:, order]
    return vals


def spectral_summary(M):
    """Smallest and largest eigenvalues of a symmetric matrix."""
    vals = sym_eig(M)
    return SpectralSummary(float(vals[0]), float(vals[-1]))


def spectral_norm(M):
    """Induced 2-norm of a matrix, or Euclidean norm of a vector.

    Computed as the square root of the largest eigenvalue of the Gram
    matrix on the smaller side of ``M``.
    """
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("spectral_norm input has non-finite entries")
    if M.ndim == 1:
        return float(np.linalg.norm(M))
    if M.ndim != 2:
        raise ValueError(f"spectral_norm expects a vector or matrix, got shape {M.shape}")
    if min(M.shape) == 0:
        return 0.0
    if min(M.shape) == 1:
        return float(np.linalg.norm(M))
    gram = M @ M.T if M.shape[0] <= M.shape[1] else M.T @ M
    top = sym_eig(gram)[-1]
    return float(np.sqrt(max(top, 0.0)))


def _char_poly(M):
    """Characteristic polynomial coefficients via Faddeev-LeVerrier.

    Returns coefficients of ``det(lambda I - M)`` from the leading power
    down to the constant term.
    """
    n = M.shape[0]
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    N = np.zeros_like(M)
    I = np.eye(n)
    for k in range(1, n + 1):
        N = M @ N + coeffs[k - 1] * I
        coeffs[k] = -np.trace(M @ N) / k
    return coeffs


def is_hurwitz(M):
    """Whether every eigenvalue of ``M`` has a strictly negative real part.

    Eigenvalues are taken as roots of the characteristic polynomial
    (companion-matrix form), which is adequate for the small systems this
    toolkit handles.
    """
    M = _as_matrix(M, "is_hurwitz input")
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"is_hurwitz input must be square, got shape {M.shape}")
    roots = np.roots(_char_poly(M))
    return bool(np.all(roots.real < 0.0))


def solve_lyapunov(A_cl, Q):
    """Solve ``P A_cl + A_cl^T P = -Q`` for symmetric positive definite P.

    The equation is vectorized into an n^2 x n^2 dense linear system and
    solved by partial-pivot elimination. The residual is verified against
    ``1e-10 * ||Q||`` before the result is returned.

    Parameters
    ----------
    A_cl : array_like
        Hurwitz closed-loop matrix.
    Q : array_like
        Symmetric positive definite weight.

    Returns
    -------
    ndarray
        Symmetric positive definite solution P.

    Raises
    ------
    DesignError
        If ``A_cl`` is not Hurwitz or the computed solution fails the
        residual or definiteness checks.
    """
    A = _as_matrix(A_cl, "A_cl")
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"A_cl must be square, got shape {A.shape}")
    Qs = _require_symmetric(Q, "Q")
    if Qs.shape != A.shape:
        raise ValueError(f"Q shape {Qs.shape} does not match A_cl shape {A.shape}")
    if not is_hurwitz(A):
        raise DesignError("closed-loop matrix is not Hurwitz; Lyapunov design fails")
    n = A.shape[0]
    I = np.eye(n)
    # Column-stacking vectorization: vec(P A) = (A^T (x) I) vec(P),
    # vec(A^T P) = (I (x) A^T) vec(P).
    coeff = np.kron(A.T, I) + np.kron(I, A.T)
    vec_p = np.linalg.solve(coeff, -Qs.flatten(order="F"))
    P = vec_p.reshape((n, n), order="F")
    P = 0.5 * (P + P.T)
    residual = np.linalg.norm(P @ A + A.T @ P + Qs)
    if residual > 1e-10 * np.linalg.norm(Qs):
        raise DesignError(f"Lyapunov residual {residual:.3e} exceeds tolerance")
    if sym_eig(P)[0] <= 0.0:
        raise DesignError("Lyapunov solution is not positive definite")
    return P
