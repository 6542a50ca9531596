"""Rational nullspace, range and coimage bases.

The nullspace bases are read off a Kronecker-like form of the system
matrix pencil.  Range bases come from a two-stage construction: a
zero-free basis (the right nullspace of the left nullspace) followed by
an exact factor extraction moving the selected zeros of the given matrix
into the basis; inner bases add a Riccati-based inner-outer step.
"""

import numpy as np
import scipy.linalg as sla

from .linalg import EPS, eig_from_pairs, eigvals_pair
from .matrixeq import RiccatiError
from .pencils import _classify, _TargetPool, klf, sfstab
from .reduction import irreducible, minreal, to_standard
from .system import (DEFAULT_OFFSET, DescriptorSystem, dual, eval_freq,
                     inverse, row_concat, series, static_gain, subsystem)

__all__ = [
    "NullspaceResult",
    "nullspace",
    "range_basis",
]


class NullspaceResult:
    """Nullspace basis plus the companion product sharing its dynamics."""

    def __init__(self, basis, companion, nrank, stdim, degs, tcond=1.0,
                 fnorm=0.0, inner_ok=True):
        self.basis = basis
        self.companion = companion
        self.nrank = nrank
        self.stdim = stdim
        self.degs = degs
        self.tcond = tcond
        self.fnorm = fnorm
        self.inner_ok = inner_ok


def _right_nullspace_data(sys_joint, p1, tol):
    """Kronecker-like data of the system pencil of the leading p1 rows."""
    n = sys_joint.order
    p, m = sys_joint.shape
    c1 = sys_joint.c[:p1, :]
    d1 = sys_joint.d[:p1, :]
    smat = np.block([[sys_joint.a, sys_joint.b], [c1, d1]])
    emat = np.block([[sys_joint.e, np.zeros((n, m))],
                     [np.zeros((p1, n + m))]])
    res = klf(smat, emat, tol=tol, variant="right")
    return res


def nullspace(side, sys_joint, aux_count=0, tol=0.0, simple=False,
              inner=False, offset=DEFAULT_OFFSET, tcond_max=1e4,
              sdeg=None, poles=None):
    """Proper rational nullspace basis of the leading part of a system.

    side='right': ``sys_joint`` realizes the stacked [G1; G2] with
    ``aux_count`` trailing outputs forming G2; the result satisfies
    G1 @ Nr = 0 and carries G2 @ Nr as companion.  side='left' is the
    dual on [G1, G2] with ``aux_count`` trailing inputs.

    With ``simple`` the basis is refined to one minimal realization per
    basis vector (block-diagonal dynamics); with ``inner`` the basis is
    made inner (falls back with ``inner_ok=False`` when boundary zeros
    prevent it).
    """
    if side == "left":
        res = nullspace("right", dual(sys_joint), aux_count, tol=tol,
                        simple=simple, inner=inner, offset=offset,
                        tcond_max=tcond_max, sdeg=sdeg, poles=poles)
        return NullspaceResult(dual(res.basis), dual(res.companion),
                               res.nrank, res.stdim, res.degs, res.tcond,
                               res.fnorm, res.inner_ok)
    if side != "right":
        raise ValueError("side must be 'right' or 'left'")
    p, m = sys_joint.shape
    p1 = p - aux_count
    n = sys_joint.order
    res = _right_nullspace_data(sys_joint, p1, tol)
    r_rows = sum(res.mr)
    r_cols = sum(res.nr)
    mr_free = r_cols - r_rows
    nrank = m - mr_free
    ts = sys_joint.ts
    ar = res.at[:r_rows, mr_free:r_cols]
    er = res.et[:r_rows, mr_free:r_cols]
    br = res.at[:r_rows, :mr_free]
    zin = res.z[n:, :]
    f = np.zeros((mr_free, r_rows))
    fnorm = 0.0
    if r_rows and (sdeg is not None or (poles is not None
                                        and len(np.atleast_1d(poles)))):
        f, _ = sfstab(ar, er, br, poles=poles, sdeg=sdeg,
                      discrete=ts > 0, tol=tol)
        fnorm = float(np.linalg.norm(f))
    acl = ar + br @ f
    # grade the free directions: input directions that excite no state
    # (the constant basis vectors) come first
    vrot = _degree_rotation(acl, er, br)
    br = br @ vrot
    cbas = zin[:, mr_free:r_cols] + zin[:, :mr_free] @ f
    dbas = zin[:, :mr_free] @ vrot
    basis = DescriptorSystem(acl, er, br, cbas, dbas, ts)
    # companion: rows of [C2 D2] Z on the same dynamics
    c2 = sys_joint.c[p1:, :]
    d2 = sys_joint.d[p1:, :]
    cd2 = np.hstack([c2, d2]) @ res.z
    comp_c = cd2[:, mr_free:r_cols] + cd2[:, :mr_free] @ f
    comp_d = cd2[:, :mr_free] @ vrot
    companion = DescriptorSystem(acl, er, br, comp_c, comp_d, ts)
    degs = sorted(_kronecker_degrees(res.nr, res.mr))
    stdim = [x for x in res.mr if x > 0]
    inner_ok = True
    if simple and mr_free > 1:
        basis, companion, stdim = _simple_refine(basis, companion,
                                                 aux_count, tol)
    elif simple:
        joint = _stack_rows(basis, companion)
        joint = minreal(joint, tol)[0]
        basis = subsystem(joint, rows=np.arange(m))
        companion = subsystem(joint, rows=np.arange(m, m + aux_count))
        stdim = [joint.order] if joint.order else []
    if inner:
        basis, companion, inner_ok = _innerize_basis(basis, companion,
                                                     simple, stdim, tol)
    return NullspaceResult(basis, companion, nrank, stdim, degs,
                           1.0, fnorm, inner_ok)


def _degree_rotation(a, e, b):
    """Orthogonal input rotation putting ker-of-reachability directions
    (degree-zero basis vectors) first."""
    n, m = b.shape
    if n == 0 or m == 0:
        return np.eye(m)
    try:
        eb = sla.solve(e, b)
        ea = sla.solve(e, a)
    except sla.LinAlgError:
        return np.eye(m)
    blocks = [eb]
    w = eb
    for _ in range(n - 1):
        w = ea @ w
        blocks.append(w)
    k = np.vstack(blocks)
    u, sv, vt = sla.svd(k)
    scale = max(sv[0], 1.0) if sv.size else 1.0
    rho = int(np.count_nonzero(sv > n * EPS * 100 * scale))
    if rho == m:
        return np.eye(m)
    return np.hstack([vt[rho:, :].T, vt[:rho, :].T])


def _kronecker_degrees(nr, mr):
    degs = []
    for i in range(len(nr)):
        degs.extend([i] * (nr[i] - mr[i]))
    return degs


def _stack_rows(top, bottom):
    """Stack two systems sharing identical (a, e, b) on one state."""
    return DescriptorSystem(top.a, top._e, top.b,
                            np.vstack([top.c, bottom.c]),
                            np.vstack([top.d, bottom.d]), top.ts)


def _simple_refine(basis, companion, aux_count, tol):
    """Per-vector type-1 covers giving a block-diagonal simple basis.

    The companion rows ride along in the cover so that the reduced
    per-vector companion shares the per-vector dynamics.
    """
    from .solvers import min_cover
    nb = basis.shape[1]
    m = basis.shape[0]
    stacked = _stack_rows(basis, companion)
    vecs = []
    stdim = []
    for i in range(nb):
        order_cols = [i] + [j for j in range(nb) if j != i]
        joint = subsystem(stacked, cols=order_cols)
        cov = min_cover("right", 1, joint, 1, tol)
        vecs.append(minreal(cov.x, tol)[0])
        stdim.append(vecs[-1].order)
    out = vecs[0]
    for v in vecs[1:]:
        out = row_concat(out, v)
    out_basis = subsystem(out, rows=np.arange(m))
    out_comp = subsystem(out, rows=np.arange(m, m + aux_count))
    return out_basis, out_comp, stdim


def _innerize_basis(basis, companion, simple, stdim, tol):
    """Inner (or per-vector inner) refinement of a nullspace basis."""
    from .factorizations import _standard_inner_outer
    if simple and basis.shape[1] > 1:
        # column-wise innerization preserving the block-diagonal shape
        cols_b = []
        cols_c = []
        ok = True
        for i in range(basis.shape[1]):
            vb = subsystem(basis, cols=[i])
            vc = subsystem(companion, cols=[i])
            nb, nc, good = _innerize_basis(minreal(vb, tol)[0],
                                           minreal(vc, tol)[0],
                                           False, None, tol)
            ok = ok and good
            cols_b.append(nb)
            cols_c.append(nc)
        out_b = cols_b[0]
        out_c = cols_c[0]
        for b2, c2 in zip(cols_b[1:], cols_c[1:]):
            out_b = row_concat(out_b, b2)
            out_c = row_concat(out_c, c2)
        return out_b, out_c, ok
    work = basis if basis.has_identity_e else basis
    try:
        gi, go, iof = _standard_inner_outer(work)
    except (RiccatiError, sla.LinAlgError):
        return basis, companion, False
    f = iof["_f"]
    h = iof["_h"]
    hinv = sla.solve_triangular(h, np.eye(h.shape[0]))
    comp_i = DescriptorSystem(basis.a + basis.b @ f, basis._e,
                              basis.b @ hinv,
                              companion.c + companion.d @ f,
                              companion.d @ hinv, basis.ts)
    return gi, comp_i, True


def range_basis(kind, sys, tol=0.0, offset=DEFAULT_OFFSET, zeros="none",
                inner=False, balance=True):
    """Full-rank factorization G = R X (kind='image') or G = X R
    (kind='coimage').

    The basis R has full column (row) rank equal to the normal rank of
    G and contains exactly the zeros of G selected by ``zeros``; with
    ``inner`` the basis is inner (coinner), which requires the selection
    'none', 'unstable' or 's-unstable'.

    Returns (r, x, info) with info carrying nrank, nfuz, niuz, ricrez.
    """
    if kind == "coimage":
        r, x, info = range_basis("image", dual(sys), tol=tol,
                                 offset=offset, zeros=zeros, inner=inner,
                                 balance=balance)
        info.pop("_inner_arg", None)
        info.pop("_iof_info", None)
        return dual(r), dual(x), info
    if kind != "image":
        raise ValueError("kind must be 'image' or 'coimage'")
    from .analysis import zeros as _zeros
    from .solvers import rational_solve
    work = irreducible(sys, tol)
    p, m = work.shape
    ts = work.ts
    discrete = work.is_discrete
    zrep = _zeros(work, tol=tol, offset=offset)
    info = {
        "nrank": zrep.nrank - work.order,
        "nfuz": zrep.nfsbz,
        "niuz": 0 if discrete else zrep.niz,
        "ricrez": 0.0,
    }
    r = info["nrank"]
    if zeros in ("all", "finite"):
        # dual construction: zero-free (or infinite-zero) coimage basis,
        # then R solves G = R X exactly and inherits the leftover zeros
        dual_sel = "none" if zeros == "all" else "infinite"
        x, _, _ = range_basis("coimage", work, tol=tol, offset=offset,
                              zeros=dual_sel, inner=False)
        stacked = _stack_cols(x, work)
        sol = rational_solve("left", stacked, p, tol=tol,
                             sdeg=-0.5 if not discrete else 0.4,
                             mindeg=True)
        rbas = minreal(sol.x, tol)[0]
        return rbas, x, info
    # stage 1: zero-free basis of the range = right nullspace of the
    # left nullspace of G
    if r == p:
        r0 = static_gain(np.eye(p), ts)
    else:
        nl = nullspace("left", work, 0, tol=tol,
                       sdeg=-0.7 if not discrete else 0.3)
        r0 = nullspace("right", nl.basis, 0, tol=tol,
                       sdeg=-0.7 if not discrete else 0.3).basis
        r0 = minreal(r0, tol)[0]
    joint = row_concat(r0, work)
    x0 = rational_solve("right", joint, m, tol=tol,
                        sdeg=-0.5 if not discrete else 0.4,
                        mindeg=True).x
    x0 = minreal(x0, tol)[0]
    rbas, xfac = r0, x0
    if zeros != "none":
        rbas, xfac = _extract_zeros(r0, x0, work, zeros, tol, offset)
    if inner:
        if zeros not in ("none", "unstable", "s-unstable"):
            raise ValueError("inner bases require zero selection 'none',"
                             " 'unstable' or 's-unstable'")
        rbas, xfac, info = _inner_range(rbas, xfac, info, tol, balance)
    return rbas, xfac, info


def _stack_cols(top, bottom):
    from .system import col_concat
    return col_concat(top, bottom)


def _extract_zeros(r0, x0, work, zeros, tol, offset):
    """Move the selected zeros of X0 into a square left factor."""
    from .factorizations import _dislocate, FactorizationError
    from .solvers import rational_solve
    discrete = work.is_discrete
    m = x0.shape[1]
    r = x0.shape[0]
    eye = static_gain(np.eye(r), work.ts)
    joint = row_concat(x0, eye)
    sdeg_free = -0.5 if not discrete else 0.4
    if zeros == "stable":
        sdeg_free = 1.0 if not discrete else 1.9
    z0 = rational_solve("right", joint, r, tol=tol, sdeg=sdeg_free,
                        mindeg=False).x
    z0 = minreal(z0, tol)[0]
    bad = _bad_zero_pred(zeros, discrete, offset)
    pool = _TargetPool(None, -1.0 if not discrete else 0.25, discrete)
    dislocate_inf = zeros in ("infinite", "s-unstable", "all") or \
        (zeros == "unstable" and discrete) or \
        (zeros == "stable" and False)
    _, mden, _ = _dislocate(z0, bad, pool, inner=False, tol=tol,
                            dislocate_inf=dislocate_inf)
    mden = minreal(mden, tol, ndm_only=True)[0]
    rbas = minreal(series(r0, mden), tol)[0]
    xfac = minreal(series(inverse(mden), x0), tol)[0]
    return rbas, xfac


def _bad_zero_pred(zeros, discrete, offset):
    if zeros == "unstable":
        return lambda lam: _classify(lam, discrete,
                                     1.0 if discrete else 0.0,
                                     offset) > 0
    if zeros == "s-unstable":
        return lambda lam: _classify(lam, discrete,
                                     1.0 if discrete else 0.0,
                                     offset) >= 0
    if zeros == "stable":
        return lambda lam: _classify(lam, discrete,
                                     1.0 if discrete else 0.0,
                                     offset) < 0
    if zeros == "infinite":
        return lambda lam: False
    raise ValueError("unsupported zero selection %r" % zeros)


def _inner_range(rbas, xfac, info, tol, balance):
    from .factorizations import _standard_inner_outer
    work = minreal(rbas, tol)[0]
    if not work.has_identity_e:
        work = to_standard(work, tol, "ident")[0]
    try:
        gi, go, iof = _standard_inner_outer(work, balance=balance)
    except RiccatiError as exc:
        info["ricrez"] = -1.0
        raise RiccatiError("inner range basis failed: %s" % exc)
    info["ricrez"] = iof["ricrez"]
    info["_inner_arg"] = work
    info["_iof_info"] = iof
    xnew = minreal(series(go, xfac), tol)[0]
    return gi, xnew, info
