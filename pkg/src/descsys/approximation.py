"""Nehari approximation, least-distance problems and approximate model
matching.

The optimal Nehari solution uses the balanced construction on the
antistable part (largest Hankel singular value isolated); the suboptimal
one uses the corresponding central formulas at level gamma.  Discrete
systems are mapped to continuous time by the bilinear transformation.
The two-block least-distance problem runs the standard bisection on
gamma with a left spectral factorization and a one-block Nehari step per
iteration.
"""

import numpy as np
import scipy.linalg as sla

from .analysis import hankel_norm, zeros as _zeros
from .factorizations import inner_outer, spectral_factor_gamma
from .linalg import EPS
from .matrixeq import SolverError
from .norms import NormUnboundedError, h2_norm, linf_norm
from .reduction import irreducible, minreal, to_standard
from .solvers import bilinear, rational_solve, spectral_decompose
from .system import (DEFAULT_OFFSET, DescriptorSystem, conjugate, dual,
                     eval_freq, neg, parallel, row_concat, series,
                     static_gain, subsystem)

__all__ = ["LdpResult", "nehari", "ldp", "approx_solve"]


class LdpResult:
    """Solution of a least-distance problem."""

    def __init__(self, x, mindist, iterations, gamma_bounds):
        self.x = x
        self.mindist = mindist
        self.iterations = iterations
        self.gamma_bounds = gamma_bounds


def _antistable_gramians(a, b, c):
    """Gramians of an antistable standard system:
    A P + P A' = B B',  A' Q + Q A = C' C."""
    p = sla.solve_continuous_lyapunov(a, b @ b.T)
    q = sla.solve_continuous_lyapunov(a.T, c.T @ c)
    return p, q


def _balance_antistable(sys):
    """Balanced realization of a minimal antistable standard system."""
    a, b, c = sys.a, sys.b, sys.c
    p, q = _antistable_gramians(a, b, c)
    p = 0.5 * (p + p.T)
    q = 0.5 * (q + q.T)
    wp, vp = sla.eigh(p)
    wp = np.maximum(wp, 0.0)
    r = vp @ np.diag(np.sqrt(wp))          # p = r r'
    u, s2, _ = sla.svd(r.T @ q @ r)
    sig = np.sqrt(np.maximum(s2, 0.0))
    t = r @ u @ np.diag(sig ** -0.5)
    ti = np.diag(sig ** 0.5) @ u.T @ np.linalg.pinv(r)
    ab = ti @ a @ t
    bb = ti @ b
    cb = c @ t
    return ab, bb, cb, sig


def _nehari_antistable_ct(sys, gamma, tol):
    """Stable approximation of an antistable continuous-time system."""
    work, _ = minreal(sys, tol)
    if not work.has_identity_e:
        work, _ = to_standard(work, tol, "ident")
    n = work.order
    d = work.d
    if n == 0:
        return static_gain(d, work.ts), 0.0
    ab, bb, cb, sig = _balance_antistable(work)
    s1 = float(sig[0])
    if gamma is None:
        # isolate the sigma_1 cluster (trailing it)
        r = int(np.count_nonzero(sig >= s1 * (1.0 - 1e-9)))
        idx = np.concatenate([np.arange(r, n), np.arange(r)])
        a2 = ab[np.ix_(idx, idx)]
        b2 = bb[idx, :]
        c2 = cb[:, idx]
        sig1 = sig[r:]
        k = n - r
        a11 = a2[:k, :k]
        b1 = b2[:k, :]
        c1 = c2[:, :k]
        b2b = b2[k:, :]
        c2b = c2[:, k:]
        # u solves b2b = c2b' u (antistable balanced sign convention)
        u = np.linalg.pinv(c2b.T) @ b2b
        gam = s1
        gamma2 = np.diag(sig1 ** 2) - gam ** 2 * np.eye(k)
        sig_d = np.diag(sig1)
        ahat = np.linalg.solve(gamma2,
                               gam ** 2 * a11.T + sig_d @ a11 @ sig_d
                               - gam * c1.T @ u @ b1.T)
        bhat = np.linalg.solve(gamma2, sig_d @ b1 - gam * c1.T @ u)
        chat = c1 @ sig_d - gam * u @ b1.T
        dhat = d - gam * u
        x = DescriptorSystem(ahat, None, bhat, chat, dhat, work.ts)
        return _stable_side(x, tol), s1
    if gamma <= s1:
        raise ValueError("gamma must exceed the Hankel norm %.6g" % s1)
    sig_d = np.diag(sig)
    gamma2 = sig_d @ sig_d - gamma ** 2 * np.eye(n)
    u = np.zeros((d.shape[0], d.shape[1]))
    ahat = np.linalg.solve(gamma2, gamma ** 2 * ab.T + sig_d @ ab @ sig_d)
    bhat = np.linalg.solve(gamma2, sig_d @ bb)
    chat = cb @ sig_d
    x = DescriptorSystem(ahat, None, bhat, chat, d.copy(), work.ts)
    return _stable_side(x, tol), s1


def _stable_side(x, tol):
    """Keep the stable part of an (almost) stable construction."""
    xm = minreal(x, tol)[0]
    xs, xu, _, _ = spectral_decompose(xm, tol=tol, job="stable")
    if xu.order:
        rest = np.linalg.norm(xu.b) * np.linalg.norm(xu.c)
        if rest > 1e-7 * max(1.0, np.linalg.norm(xm.b) *
                             np.linalg.norm(xm.c)):
            raise SolverError("approximation construction left unstable "
                              "dynamics of weight %.2e" % rest)
    return minreal(xs, tol)[0]


def nehari(sys, gamma=None, tol=0.0):
    """Optimal or suboptimal stable Nehari approximation.

    Without `gamma`, returns (x, s1) with ||G - X||inf = s1, where s1 is
    the Hankel norm of the conjugate of the antistable part of G; with
    `gamma` > s1, returns a suboptimal X with ||G - X||inf < gamma.
    Boundary poles are rejected.
    """
    work = minreal(sys, tol)[0]
    discrete = work.is_discrete
    if discrete:
        wct, _ = bilinear(work, (1.0, 1.0, -1.0, 1.0), tol=tol,
                          minimal=True, ts_out=0.0)
        xct, s1 = nehari(wct, gamma=gamma, tol=tol)
        xz, _ = bilinear(xct, (1.0, -1.0, 1.0, 1.0), tol=tol,
                         minimal=True, ts_out=work.ts)
        return xz, s1
    gs, gu, _, _ = spectral_decompose(work, tol=tol, job="stable")
    gu = minreal(gu, tol)[0]
    if gu.order == 0:
        return work, 0.0
    xs_u, s1 = _nehari_antistable_ct(gu, gamma, tol)
    x = minreal(parallel(gs, xs_u), tol)[0]
    return x, s1


def ldp(g1, g2=None, tol=0.0, reltol=1e-4, gamma=None):
    """Least-distance problem min over stable X of
    ||[G1 - X, G2]||inf (two-block) or ||G1 - X||inf (one-block).

    Returns an LdpResult; `gamma` requests a suboptimal solution.
    """
    if g2 is None or g2.shape[1] == 0:
        x, s1 = nehari(g1, gamma=gamma, tol=tol)
        err = minreal(parallel(g1, neg(x)), tol)[0]
        dist, _ = linf_norm(err) if err.order or np.any(err.d) else (0.0,
                                                                     0.0)
        return LdpResult(x, dist, 0, (s1, dist))
    gl, _ = linf_norm(g2)
    gju, _ = linf_norm(minreal(row_concat(g1, g2), tol)[0])
    if gamma is not None:
        if gamma <= gl:
            raise ValueError("gamma must exceed ||G2||inf = %.6g" % gl)
        x = _ldp_for_gamma(g1, g2, gamma, tol)
        err = minreal(row_concat(parallel(g1, neg(x)), g2), tol)[0]
        dist, _ = linf_norm(err)
        return LdpResult(x, dist, 1, (gl, gju))
    lo, hi = gl, gju
    span = max(hi - lo, EPS)
    it = 0
    # bisection on gamma
    while hi - lo > reltol * span and it < 60:
        it += 1
        gam = 0.5 * (lo + hi)
        if gam <= gl * (1 + 1e-12):
            break
        gh = _ldp_hankel(g1, g2, gam, tol)
        if gh < 1.0:
            hi = gam
        else:
            lo = gam
    x = _ldp_for_gamma(g1, g2, hi, tol)
    err = minreal(row_concat(parallel(g1, neg(x)), g2), tol)[0]
    dist, _ = linf_norm(err)
    return LdpResult(x, dist, it, (lo, hi))


def _ldp_split(g1, g2, gam, tol):
    v = spectral_factor_gamma("left", g2, gam, tol=tol)
    l_all = minreal(series(_stable_inverse(v, tol), g1), tol)[0]
    ls, lu, _, _ = spectral_decompose(l_all, tol=tol, job="stable")
    return v, ls, minreal(lu, tol)[0]


def _stable_inverse(v, tol):
    from .system import inverse
    return inverse(v, tol)


def _ldp_hankel(g1, g2, gam, tol):
    _, _, lu = _ldp_split(g1, g2, gam, tol)
    if lu.order == 0:
        return 0.0
    gh, _ = hankel_norm(minreal(conjugate(lu), tol)[0])
    return gh


def _ldp_for_gamma(g1, g2, gam, tol):
    v, ls, lu = _ldp_split(g1, g2, gam, tol)
    if lu.order == 0:
        y = ls
    else:
        xs, _ = nehari(lu, gamma=None, tol=tol)
        y = minreal(parallel(ls, xs), tol)[0]
    return minreal(series(v, y), tol)[0]


def approx_solve(side, sys_joint, f_dims, tol=0.0, offset=DEFAULT_OFFSET,
                 sdeg=None, poles=None, mindeg=False, h2sol=False,
                 reltol=1e-4, gamma=None):
    """Approximate solution of G X = F ('right') or X G = F ('left')
    minimizing (or gamma-bounding) the error in the L-infinity or H2
    norm.

    ``sys_joint``/``f_dims`` follow the conventions of
    :func:`descsys.solvers.rational_solve`.  Returns (x, info) with
    info = {nrank, mindist, nonstandard}.
    """
    if side == "right":
        xd, info = approx_solve("left", dual(sys_joint), f_dims, tol=tol,
                                offset=offset, sdeg=sdeg, poles=poles,
                                mindeg=mindeg, h2sol=h2sol, reltol=reltol,
                                gamma=gamma)
        return dual(xd), info
    if side != "left":
        raise ValueError("side must be 'right' or 'left'")
    mf = int(f_dims)
    p, m = sys_joint.shape
    pg = p - mf
    gsys = subsystem(sys_joint, rows=np.arange(pg))
    fsys = subsystem(sys_joint, rows=np.arange(pg, p))
    zrep = _zeros(irreducible(gsys, tol), tol=tol, offset=offset)
    nonstandard = zrep.nfsbz > 0 or (not gsys.is_discrete
                                     and zrep.niz > 0)
    # step 1: quasi-co-outer--coinner factorization of G
    gi, go, info_f = inner_outer(gsys, side="oi", tol=tol, offset=offset)
    r = info_f["nrank"]
    # step 2: split F Gi~ = [F1~, F2~] and solve the LDP
    fgi = minreal(series(fsys, conjugate(gi)), tol)[0]
    f1 = subsystem(fgi, cols=np.arange(r))
    f2 = subsystem(fgi, cols=np.arange(r, gi.shape[0]))
    f1 = minreal(f1, tol)[0]
    f2 = minreal(f2, tol)[0] if f2.shape[1] else None
    if h2sol:
        ls, lu, _, _ = spectral_decompose(f1, tol=tol, job="stable")
        y = minreal(ls, tol)[0]
        pieces = minreal(lu, tol)[0]
        if f2 is not None:
            if not gsys.is_discrete and np.linalg.norm(f2.d) > 1e-10:
                raise NormUnboundedError("H2 error is infinite: the "
                                         "second block is not strictly "
                                         "proper")
            pieces = row_concat(pieces, f2) if pieces.shape[1] else f2
        mindist = _l2_norm_mixed(pieces, tol)
        iterations = 0
    else:
        res = ldp(f1, f2, tol=tol, reltol=reltol, gamma=gamma)
        y = res.x
        mindist = res.mindist
        iterations = res.iterations
    # step 3: exact solve X Go = Y
    from .system import col_concat
    joint = col_concat(go, y)
    sol = rational_solve("left", irreducible(joint, tol), y.shape[0],
                         tol=tol, sdeg=sdeg, poles=poles, mindeg=mindeg)
    x = minreal(sol.x, tol)[0]
    info = {"nrank": r, "mindist": float(mindist),
            "nonstandard": bool(nonstandard),
            "iterations": iterations}
    return x, info


def _l2_norm_mixed(sys, tol):
    if sys is None or sys.shape[1] == 0:
        return 0.0
    work = minreal(sys, tol)[0]
    ls, lu, _, _ = spectral_decompose(work, tol=tol, job="stable")
    val = 0.0
    ls = minreal(ls, tol)[0]
    lu = minreal(lu, tol)[0]
    if ls.order or np.any(ls.d):
        val += h2_norm(ls) ** 2
    if lu.order:
        lu0 = DescriptorSystem(lu.a, lu._e, lu.b, lu.c,
                               np.zeros(lu.shape), lu.ts)
        val += h2_norm(minreal(conjugate(lu0), tol)[0]) ** 2
    return float(np.sqrt(val))
