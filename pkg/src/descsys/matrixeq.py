"""Generalized Lyapunov/Stein and Riccati equation solvers.

The Lyapunov-type solvers return Cholesky-like factors of the positive
semidefinite Gramians.  The Riccati solvers compute stabilizing solutions
through the deflating subspaces of the associated extended pencils.
"""

import numpy as np
import scipy.linalg as sla

from .linalg import EPS, eig_from_pairs, eigvals_pair, generalized_schur, \
    reorder_gschur

__all__ = [
    "SolverError",
    "RiccatiError",
    "GramianPair",
    "solve_gen_lyapunov",
    "gramians",
    "solve_gcare",
    "solve_gdare",
]


class SolverError(RuntimeError):
    """A matrix equation could not be solved under its preconditions."""


class RiccatiError(SolverError):
    """No stabilizing Riccati solution could be computed."""


class GramianPair:
    """Controllability/observability Gramians with their factors.

    ``p = s @ s.T`` and ``q = r.T @ r``.
    """

    def __init__(self, p, q, s, r):
        self.p = p
        self.q = q
        self.s = s
        self.r = r


def _check_stable(a, e, discrete):
    lam = eig_from_pairs(*eigvals_pair(a, e))
    if lam.size == 0:
        return
    if np.any(np.isinf(lam)):
        raise SolverError("descriptor matrix must be invertible")
    if discrete:
        if np.max(np.abs(lam)) >= 1.0:
            raise SolverError("spectrum not inside the unit disk")
    elif np.max(np.real(lam)) >= 0.0:
        raise SolverError("spectrum not in the open left half-plane")


def _psd_factor(p):
    """Factor s with p = s s.T for a (numerically) psd symmetric p."""
    p = 0.5 * (p + p.T)
    w, v = sla.eigh(p)
    w = np.where(w > 0, w, 0.0)
    return v @ np.diag(np.sqrt(w))


def solve_gen_lyapunov(a, e, rhs_factor, transposed=False, discrete=False):
    """Factor of the psd solution of a generalized Lyapunov/Stein equation.

    Solves, for stable ``a - lam*e`` with invertible ``e``,

    - continuous, controllability:  A P E^T + E P A^T + B B^T = 0
    - continuous, observability:    A^T Q E + E^T Q A + C^T C = 0
    - discrete, controllability:    A P A^T - E P E^T + B B^T = 0
    - discrete, observability:      A^T Q A - E^T Q E + C^T C = 0

    with ``rhs_factor`` being B (or C when ``transposed``).  Returns the
    factor ``s`` with ``P = s s.T`` (or ``Q = s.T s``).
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if e is None:
        e = np.eye(a.shape[0])
    e = np.atleast_2d(np.asarray(e, dtype=float))
    f = np.atleast_2d(np.asarray(rhs_factor, dtype=float))
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    sv = sla.svd(e, compute_uv=False)
    if sv[-1] <= n * EPS * sv[0]:
        raise SolverError("descriptor matrix must be invertible")
    _check_stable(a, e, discrete)
    if transposed:
        # observability form: reduce to the controllability form of the
        # transposed data
        s = solve_gen_lyapunov(a.T, e.T, f.T, transposed=False,
                               discrete=discrete)
        return s.T
    abar = sla.solve(e, a)
    bbar = sla.solve(e, f)
    w = bbar @ bbar.T
    if discrete:
        p = sla.solve_discrete_lyapunov(abar, w)
    else:
        p = sla.solve_continuous_lyapunov(abar, -w)
    return _psd_factor(p)


def gramians(a, e, b, c, discrete=False):
    """Both Gramians of a stable realization, with factors."""
    s = solve_gen_lyapunov(a, e, b, transposed=False, discrete=discrete)
    r = solve_gen_lyapunov(a, e, c, transposed=True, discrete=discrete)
    return GramianPair(s @ s.T, r.T @ r, s, r)


def _stable_deflating(m, n_mat, nx, discrete):
    """Basis of the stable deflating subspace of the pencil m - lam*n.

    Selects the ``nx`` finite eigenvalues strictly inside the stability
    domain; raises RiccatiError when their count is wrong (eigenvalues on
    the boundary of the domain).
    """
    gs = generalized_schur(m, n_mat)
    scale = max(np.linalg.norm(m), np.linalg.norm(n_mat), 1.0)

    def select(alpha, beta):
        lam = eig_from_pairs(np.atleast_1d(np.asarray(alpha)),
                             np.atleast_1d(np.asarray(beta)))
        out = []
        for x in lam:
            if np.isinf(x):
                out.append(False)
            elif discrete:
                out.append(abs(x) < 1.0)
            else:
                out.append(x.real < 0.0)
        return np.array(out)

    gs = reorder_gschur(gs, select)
    lam = gs.eigenvalues
    k = 0
    for x in lam:
        if np.isinf(x):
            continue
        inside = abs(x) < 1.0 if discrete else x.real < 0.0
        if inside:
            k += 1
    if k != nx:
        raise RiccatiError("pencil has %d stable eigenvalues, expected %d "
                           "(spectrum on the stability boundary?)"
                           % (k, nx))
    # verify the selected ones actually lead
    lead = lam[:nx]
    for x in lead:
        if np.isinf(x):
            raise RiccatiError("reordering failed to isolate the stable "
                               "deflating subspace")
        if discrete and abs(x) >= 1.0:
            raise RiccatiError("closed-loop eigenvalue on/outside the "
                               "unit circle")
        if not discrete and x.real >= 0.0:
            raise RiccatiError("closed-loop eigenvalue in the closed "
                               "right half-plane")
    return gs.z[:, :nx]


def _riccati_common(a, e, b, c, d, discrete):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    n = a.shape[0]
    if e is None:
        e = np.eye(n)
    e = np.atleast_2d(np.asarray(e, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    c = np.atleast_2d(np.asarray(c, dtype=float))
    d = np.atleast_2d(np.asarray(d, dtype=float))
    m = b.shape[1]
    q = c.T @ c
    s = c.T @ d
    r = d.T @ d
    return a, e, b, c, d, n, m, q, s, r


def _residual_gcare(a, e, b, c, d, x):
    r = d.T @ d
    s = c.T @ d
    t1 = a.T @ x @ e + e.T @ x @ a + c.T @ c
    t2 = (e.T @ x @ b + s) @ sla.solve(r, b.T @ x @ e + s.T)
    res = t1 - t2
    return np.linalg.norm(res) / (1.0 + np.linalg.norm(x))


def solve_gcare(a, e, b, c, d, balance=True):
    """Stabilizing solution of the continuous-time generalized Riccati
    equation

        A^T X E + E^T X A - (E^T X B + C^T D)(D^T D)^{-1}
            (B^T X E + D^T C) + C^T C = 0.

    Returns (x, f, rel_residual) with ``f = -(D^T D)^{-1}(B^T X E + D^T C)``
    the stabilizing feedback: Lambda(A + B F - lam E) in the open left
    half-plane.
    """
    a, e, b, c, d, n, m, q, s, r = _riccati_common(a, e, b, c, d, False)
    if m > 0:
        sv = sla.svd(r, compute_uv=False)
        if sv[-1] <= m * EPS * max(sv[0], 1.0):
            raise RiccatiError("D^T D must be invertible")
    if n == 0:
        return np.zeros((0, 0)), np.zeros((m, 0)), 0.0
    big_m = np.block([
        [a, np.zeros((n, n)), b],
        [-q, -a.T, -s],
        [s.T, b.T, r],
    ])
    big_n = np.block([
        [e, np.zeros((n, n + m))],
        [np.zeros((n, n)), e.T, np.zeros((n, m))],
        [np.zeros((m, 2 * n + m))],
    ])
    zv = _stable_deflating(big_m, big_n, n, discrete=False)
    z11 = zv[:n, :]
    z21 = zv[n:2 * n, :]
    z31 = zv[2 * n:, :]
    ez = e @ z11
    if np.linalg.cond(ez) > 1.0 / (n * EPS * 100):
        raise RiccatiError("singular basis; no stabilizing solution")
    x = sla.solve(ez.T, z21.T).T @ np.eye(n)
    x = np.real(x)
    x = 0.5 * (x + x.T)
    f = np.real(sla.solve(z11.T, z31.T).T)
    res = _residual_gcare(a, e, b, c, d, x)
    if res > 1e-4:
        raise RiccatiError("Riccati residual too large (%.2e)" % res)
    return x, f, res


def _residual_gdare(a, e, b, c, d, x):
    r = d.T @ d + b.T @ x @ b
    s = c.T @ d
    t1 = a.T @ x @ a - e.T @ x @ e + c.T @ c
    t2 = (a.T @ x @ b + s) @ sla.solve(r, b.T @ x @ a + s.T)
    res = t1 - t2
    return np.linalg.norm(res) / (1.0 + np.linalg.norm(x))


def solve_gdare(a, e, b, c, d, balance=True):
    """Stabilizing solution of the discrete-time generalized Riccati
    equation

        A^T X A - E^T X E - (A^T X B + C^T D)(D^T D + B^T X B)^{-1}
            (B^T X A + D^T C) + C^T C = 0.

    Returns (x, f, rel_residual) with the closed-loop spectrum of
    ``A + B F - lam E`` inside the open unit disk.
    """
    a, e, b, c, d, n, m, q, s, r = _riccati_common(a, e, b, c, d, True)
    if n == 0:
        return np.zeros((0, 0)), np.zeros((m, 0)), 0.0
    big_m = np.block([
        [a, np.zeros((n, n)), b],
        [-q, e.T, -s],
        [s.T, np.zeros((m, n)), r],
    ])
    big_n = np.block([
        [e, np.zeros((n, n + m))],
        [np.zeros((n, n)), a.T, np.zeros((n, m))],
        [np.zeros((m, n)), -b.T, np.zeros((m, m))],
    ])
    zv = _stable_deflating(big_m, big_n, n, discrete=True)
    z11 = zv[:n, :]
    z21 = zv[n:2 * n, :]
    z31 = zv[2 * n:, :]
    ez = e @ z11
    if np.linalg.cond(ez) > 1.0 / (n * EPS * 100):
        raise RiccatiError("singular basis; no stabilizing solution")
    x = sla.solve(ez.T, z21.T).T
    x = np.real(0.5 * (x + x.T))
    f = np.real(sla.solve(z11.T, z31.T).T)
    res = _residual_gdare(a, e, b, c, d, x)
    if res > 1e-4:
        raise RiccatiError("Riccati residual too large (%.2e)" % res)
    return x, f, res
