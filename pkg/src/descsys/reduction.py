"""Order reduction of descriptor realizations.

Covers the elimination of uncontrollable/unobservable eigenvalues
(:func:`irreducible`), the removal of non-dynamic modes and minimal
realization (:func:`minreal`), conversion to SVD-like coordinate forms and
standard state space (:func:`to_standard`) and balancing-related
truncation of stable systems (:func:`bal_truncate`).
"""

import numpy as np
import scipy.linalg as sla

from .linalg import EPS
from .matrixeq import SolverError, gramians
from .pencils import ctrb_staircase
from .system import DescriptorSystem, dual

__all__ = [
    "ReductionInfo",
    "irreducible",
    "minreal",
    "to_standard",
    "bal_truncate",
]


class ReductionInfo:
    """Bookkeeping for removed eigenvalues."""

    def __init__(self, removed_unctrb=0, removed_unobs=0, removed_nondyn=0):
        self.removed_unctrb = removed_unctrb
        self.removed_unobs = removed_unobs
        self.removed_nondyn = removed_nondyn

    @property
    def total(self):
        return (self.removed_unctrb + self.removed_unobs
                + self.removed_nondyn)


def _ctrb_reduce(sys, tol, swap):
    """Remove uncontrollable eigenvalues; swap=True targets the infinite
    ones by working on the reversed pencil (E - lam A)."""
    a, e = (sys.e, sys.a) if swap else (sys.a, sys.e)
    at, et, bt, q, z, dims = ctrb_staircase(a, e, sys.b, tol)
    nc = int(sum(dims))
    n = sys.order
    if nc == n:
        return sys, 0
    ar, er = (et, at) if swap else (at, et)
    ct = sys.c @ z
    return DescriptorSystem(ar[:nc, :nc], er[:nc, :nc], bt[:nc, :],
                            ct[:, :nc], sys.d, sys.ts), n - nc


def _obs_reduce(sys, tol, swap):
    red, k = _ctrb_reduce(dual(sys), tol, swap)
    return dual(red), k


def irreducible(sys, tol=0.0, job="irreducible"):
    """Transfer-equivalent realization with reduced order.

    ``job`` selects which properties to enforce: 'irreducible' (default)
    removes all uncontrollable and unobservable eigenvalues, the other
    options restrict the work to the finite or infinite part and/or to
    controllability or observability only.
    """
    steps = {
        "irreducible": ("ic", "fc", "io", "fo"),
        "finite": ("fc", "fo"),
        "infinite": ("ic", "io"),
        "contr": ("ic", "fc"),
        "obs": ("io", "fo"),
        "finite_contr": ("fc",),
        "infinite_contr": ("ic",),
        "finite_obs": ("fo",),
        "infinite_obs": ("io",),
    }
    if job not in steps:
        raise ValueError("unknown job %r" % job)
    nc = no = 0
    out = sys
    for step in steps[job]:
        if step == "fc":
            out, k = _ctrb_reduce(out, tol, swap=False)
            nc += k
        elif step == "ic":
            out, k = _ctrb_reduce(out, tol, swap=True)
            nc += k
        elif step == "fo":
            out, k = _obs_reduce(out, tol, swap=False)
            no += k
        else:
            out, k = _obs_reduce(out, tol, swap=True)
            no += k
    return out


def _irreducible_counted(sys, tol):
    out, nc, no = sys, 0, 0
    out, k = _ctrb_reduce(out, tol, swap=True)
    nc += k
    out, k = _ctrb_reduce(out, tol, swap=False)
    nc += k
    out, k = _obs_reduce(out, tol, swap=True)
    no += k
    out, k = _obs_reduce(out, tol, swap=False)
    no += k
    return out, nc, no


def _svd_coordinate_form(sys, tol):
    """Rotate to coordinates where E = diag(sigma, 0); returns the pieces.

    The trailing A22 part (rows/cols beyond rank E) is further split into
    an invertible part and the residual infinite structure.
    """
    n = sys.order
    e = sys.e
    u, sv, vt = sla.svd(e) if n else (np.eye(0), np.zeros(0), np.eye(0))
    rel = tol if tol > 0 else n * EPS
    scale = sv[0] if n and sv[0] > 0 else 1.0
    re = int(np.count_nonzero(sv > rel * scale)) if n else 0
    q = u.T
    z = vt.T
    a = q @ sys.a @ z
    b = q @ sys.b
    c = sys.c @ z
    return a, np.diag(sv[:re]), b, c, re, sv


def _eliminate_nondynamic(sys, tol):
    """Remove the simple infinite eigenvalues (non-dynamic modes).

    Returns (reduced_system, removed_count).  Higher-order infinite
    structure (true infinite poles) is retained.
    """
    n = sys.order
    if n == 0 or sys.has_identity_e:
        return sys, 0
    a, e11, b, c, re, sv = _svd_coordinate_form(sys, tol)
    k = n - re
    if k == 0:
        return DescriptorSystem(a, e11, b, c, sys.d, sys.ts), 0
    # rotate the trailing block to a22 = diag(s2, 0); the invertible part
    # holds the non-dynamic modes and is eliminated by a Schur complement
    a22 = a[re:, re:]
    u2, s2, v2t = sla.svd(a22)
    rel = tol if tol > 0 else k * EPS
    r2 = int(np.count_nonzero(s2 > rel * max(s2[0] if s2.size else 0.0,
                                             1.0)))
    if r2 == 0:
        return sys, 0
    a = a.copy()
    a[re:, :] = u2.T @ a[re:, :]
    a[:, re:] = a[:, re:] @ v2t.T
    b = b.copy()
    b[re:, :] = u2.T @ b[re:, :]
    c = c.copy()
    c[:, re:] = c[:, re:] @ v2t.T
    i1 = re + r2
    a11, a12, a13 = a[:re, :re], a[:re, re:i1], a[:re, i1:]
    a21, a22i = a[re:i1, :re], a[re:i1, re:i1]
    a31 = a[i1:, :re]
    b1, b2, b3 = b[:re, :], b[re:i1, :], b[i1:, :]
    c1, c2, c3 = c[:, :re], c[:, re:i1], c[:, i1:]
    sol_a = sla.solve(a22i, a21)
    sol_b = sla.solve(a22i, b2)
    k3 = n - i1
    am = np.block([[a11 - a12 @ sol_a, a13],
                   [a31, a[i1:, i1:]]])
    em = sla.block_diag(np.diag(sv[:re]), np.zeros((k3, k3)))
    bm = np.vstack([b1 - a12 @ sol_b, b3])
    cm = np.hstack([c1 - c2 @ sol_a, c3])
    dm = sys.d - c2 @ sol_b
    return DescriptorSystem(am, em, bm, cm, dm, sys.ts), r2


def minreal(sys, tol=0.0, ndm_only=False):
    """Minimal realization: irreducible and without non-dynamic modes.

    Returns (system, ReductionInfo).
    """
    if ndm_only:
        out, nd = _eliminate_nondynamic(sys, tol)
        return out, ReductionInfo(0, 0, nd)
    out, nc, no = _irreducible_counted(sys, tol)
    out, nd = _eliminate_nondynamic(out, tol)
    return out, ReductionInfo(nc, no, nd)


def to_standard(sys, tol=0.0, eshape="ident"):
    """Convert to an SVD-like coordinate form without non-dynamic modes.

    With ``eshape='ident'`` and invertible resulting E the output is a
    standard state-space system.  Raises when the system is improper
    (non-simple infinite eigenvalues make A22 singular).

    Returns (system, rank_e).
    """
    if eshape not in ("diag", "triu", "ident"):
        raise ValueError("unknown eshape %r" % eshape)
    n = sys.order
    if sys.has_identity_e or n == 0:
        return sys, n
    a, e11d, b, c, re, sv = _svd_coordinate_form(sys, tol)
    if re == n:
        if eshape == "ident":
            si = 1.0 / np.sqrt(sv)
            am = (a * si[None, :]) * si[:, None]
            bm = b * si[:, None]
            cm = c * si[None, :]
            return DescriptorSystem(am, None, bm, cm, sys.d, sys.ts), n
        return DescriptorSystem(a, np.diag(sv), b, c, sys.d, sys.ts), n
    a22 = a[re:, re:]
    s2 = sla.svd(a22, compute_uv=False) if a22.size else np.zeros(0)
    if a22.size and (s2.size == 0 or
                     s2[-1] <= max(tol, (n - re) * EPS) *
                     max(s2[0], 1.0)):
        raise SolverError("system is improper: non-simple infinite "
                          "eigenvalues present")
    a11 = a[:re, :re]
    a12 = a[:re, re:]
    a21 = a[re:, :re]
    b1 = b[:re, :]
    b2 = b[re:, :]
    c1 = c[:, :re]
    c2 = c[:, re:]
    sol_a = sla.solve(a22, a21)
    sol_b = sla.solve(a22, b2)
    ar = a11 - a12 @ sol_a
    br = b1 - a12 @ sol_b
    cr = c1 - c2 @ sol_a
    dr = sys.d - c2 @ sol_b
    ev = sv[:re]
    if eshape == "ident":
        si = 1.0 / np.sqrt(ev)
        ar = (ar * si[None, :]) * si[:, None]
        br = br * si[:, None]
        cr = cr * si[None, :]
        return DescriptorSystem(ar, None, br, cr, dr, sys.ts), re
    return DescriptorSystem(ar, np.diag(ev), br, cr, dr, sys.ts), re


def bal_truncate(sys, tol=None, balance=False):
    """Balancing-related truncation of a stable system.

    The reduced order is the number of Hankel singular values exceeding
    ``tol * max(hsv)`` (default tol = sqrt(eps)).  With ``balance`` the
    returned realization is balanced (E = I, equal diagonal Gramians);
    otherwise a balancing-free orthogonal projection is used.

    Returns (reduced_system, hsv).
    """
    work, _ = minreal(sys, 0.0)
    if not work.has_identity_e:
        work, _ = to_standard(work, 0.0, "ident")
    n = work.order
    if n == 0:
        return work, np.zeros(0)
    gp = gramians(work.a, None, work.b, work.c, discrete=work.is_discrete)
    u, hsv, vt = sla.svd(gp.r @ gp.s)
    if tol is None or tol <= 0:
        tol = np.sqrt(EPS)
    k = int(np.count_nonzero(hsv > tol * max(hsv[0], EPS))) \
        if hsv.size else 0
    u1 = u[:, :k]
    v1 = vt[:k, :].T
    s1 = hsv[:k]
    lw = gp.r.T @ u1
    rw = gp.s @ v1
    if balance:
        li = lw / np.sqrt(s1)[None, :]
        ri = rw / np.sqrt(s1)[None, :]
        ar = li.T @ work.a @ ri
        br = li.T @ work.b
        cr = work.c @ ri
        return DescriptorSystem(ar, None, br, cr, work.d, work.ts), hsv
    # balancing-free: orthonormal bases of the projection subspaces
    ql, _ = sla.qr(lw, mode="economic")
    qr_, _ = sla.qr(rw, mode="economic")
    ee = ql.T @ qr_
    ar = sla.solve(ee, ql.T @ work.a @ qr_)
    br = sla.solve(ee, ql.T @ work.b)
    cr = work.c @ qr_
    return DescriptorSystem(ar, None, br, cr, work.d, work.ts), hsv
