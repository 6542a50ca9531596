"""Dense real matrix kernels used by the higher-level routines.

All decompositions are thin wrappers around LAPACK (through scipy) that
enforce the conventions the rest of the package relies on: orthogonal
transformations accumulated as plain ndarrays, rank decisions driven by a
single tolerance rule, and generalized Schur forms whose 2x2 blocks hold
complex-conjugate eigenvalue pairs only.
"""

import numpy as np
import scipy.linalg as sla

__all__ = [
    "DecompositionError",
    "ReorderError",
    "GeneralizedSchur",
    "svd",
    "rank_with_tol",
    "qr_col_pivot",
    "generalized_schur",
    "reorder_gschur",
    "eigvals_pair",
]

EPS = np.finfo(float).eps


class DecompositionError(RuntimeError):
    """An iterative matrix decomposition failed to converge."""


class ReorderError(RuntimeError):
    """Eigenvalue reordering failed or was too ill-conditioned."""


def _as_matrix(m):
    a = np.atleast_2d(np.asarray(m, dtype=float))
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def svd(m):
    """Singular value decomposition ``m = u @ diag(s) @ v.T``.

    Returns
    -------
    u, s, v : ndarray
        `u` and `v` are orthogonal; `s` holds the singular values in
        non-increasing order.  Note that `v` is returned, not ``v.T``.
    """
    a = _as_matrix(m)
    try:
        u, s, vh = sla.svd(a, full_matrices=True, lapack_driver="gesdd")
    except sla.LinAlgError:
        try:
            u, s, vh = sla.svd(a, full_matrices=True, lapack_driver="gesvd")
        except sla.LinAlgError as exc:
            raise DecompositionError("SVD did not converge") from exc
    return u, s, vh.T


def rank_with_tol(m, tol=0.0):
    """Numerical rank: number of singular values above ``tol * smax``.

    With ``tol = 0`` the conventional default ``max(rows, cols) * eps``
    relative threshold is applied.
    """
    a = np.atleast_2d(np.asarray(m, dtype=float))
    if a.size == 0:
        return 0
    s = sla.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    if tol <= 0.0:
        tol = max(a.shape) * EPS
    return int(np.count_nonzero(s > tol * s[0]))


def qr_col_pivot(m):
    """QR decomposition with column pivoting, ``m[:, perm] = q @ r``.

    `r` is upper trapezoidal with non-increasing absolute diagonal, which
    makes it usable for rank estimation.
    """
    a = _as_matrix(m)
    if a.size == 0:
        q = np.eye(a.shape[0])
        return q, a.copy(), np.arange(a.shape[1])
    q, r, perm = sla.qr(a, pivoting=True)
    return q, r, perm


class GeneralizedSchur:
    """Generalized real Schur form of a square pencil ``a - lam*b``.

    Holds ``s = q.T @ a @ z`` (quasi upper triangular), ``t = q.T @ b @ z``
    (upper triangular) and the eigenvalues as ``(alpha, beta)`` pairs with
    ``lam_i = alpha_i / beta_i`` (infinite when ``beta_i == 0``).
    """

    def __init__(self, s, t, q, z, alpha, beta):
        self.s = s
        self.t = t
        self.q = q
        self.z = z
        self.alpha = alpha
        self.beta = beta

    @property
    def eigenvalues(self):
        """Eigenvalues as a complex array, ``inf`` for beta == 0."""
        return eig_from_pairs(self.alpha, self.beta)

    @property
    def n(self):
        return self.s.shape[0]


def eig_from_pairs(alpha, beta):
    lam = np.empty(alpha.shape, dtype=complex)
    small = np.abs(beta) <= np.abs(alpha) * EPS * 4 + np.finfo(float).tiny
    lam[~small] = alpha[~small] / beta[~small]
    lam[small] = complex(np.inf)
    return lam


def generalized_schur(a, b):
    """Generalized real Schur decomposition of the pair ``(a, b)``.

    The returned 2x2 diagonal blocks of `s` correspond to complex
    conjugate eigenvalue pairs only; real eigenvalues occupy 1x1 blocks
    (this is the LAPACK standardization).
    """
    a = _as_matrix(a)
    b = _as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError("need two square matrices of equal order")
    if a.size == 0:
        e = np.zeros((0, 0))
        return GeneralizedSchur(e, e, e.copy(), e.copy(),
                                np.zeros(0, complex), np.zeros(0))
    try:
        s, t, q, z = sla.qz(a, b, output="real")
    except Exception as exc:  # pragma: no cover - QZ failures are rare
        raise DecompositionError("QZ iteration failed") from exc
    alpha, beta = schur_diag_eigs(s, t)
    return GeneralizedSchur(s, t, q, z, alpha, beta)


def schur_diag_eigs(s, t):
    """(alpha, beta) pairs read off a generalized real Schur form."""
    n = s.shape[0]
    alpha = np.zeros(n, dtype=complex)
    beta = np.zeros(n)
    i = 0
    while i < n:
        if i + 1 < n and s[i + 1, i] != 0.0:
            w = sla.eigvals(s[i:i + 2, i:i + 2], t[i:i + 2, i:i + 2],
                            homogeneous_eigvals=True)
            alpha[i:i + 2] = w[0]
            beta[i:i + 2] = np.real(w[1])
            i += 2
        else:
            alpha[i] = s[i, i]
            beta[i] = t[i, i]
            i += 1
    return alpha, beta


def reorder_gschur(gs, select):
    """Reorder a GRSF so the selected eigenvalues lead.

    Parameters
    ----------
    gs : GeneralizedSchur
    select : callable
        Predicate ``select(alpha, beta) -> bool array`` evaluated on the
        eigenvalue pairs; selected eigenvalues are moved to the leading
        diagonal blocks.

    Returns
    -------
    GeneralizedSchur
        With transformations composed onto ``gs.q`` and ``gs.z``.
    """
    n = gs.n
    if n == 0:
        return gs
    old = np.sort_complex(np.where(np.isinf(gs.eigenvalues), 1e300 + 0j,
                                   gs.eigenvalues))
    try:
        s, t, alpha, beta, q2, z2 = sla.ordqz(gs.s, gs.t, sort=select,
                                              output="real")
    except Exception as exc:
        raise ReorderError("eigenvalue reordering failed") from exc
    new = eig_from_pairs(alpha, beta)
    new = np.sort_complex(np.where(np.isinf(new), 1e300 + 0j, new))
    scale = max(1.0, float(np.max(np.abs(old)))) if old.size else 1.0
    if old.size and np.max(np.abs(old - new)) > 1e-6 * scale:
        raise ReorderError("reordering perturbed the spectrum beyond "
                           "tolerance")
    return GeneralizedSchur(s, t, gs.q @ q2, gs.z @ z2, alpha, beta)


def eigvals_pair(a, e):
    """Generalized eigenvalues of ``a - lam*e`` as (alpha, beta) arrays."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    e = np.atleast_2d(np.asarray(e, dtype=float))
    if a.size == 0:
        return np.zeros(0, complex), np.zeros(0)
    w = sla.eigvals(a, e, homogeneous_eigvals=True)
    return w[0], np.real(w[1])
