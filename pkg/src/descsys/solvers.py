"""Exact rational-equation solvers, spectral decomposition, dynamic
covers and the bilinear frequency transformation."""

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .linalg import EPS, eig_from_pairs, eigvals_pair
from .pencils import (PencilError, _classify, _col_compress_kernel_first,
                      _order_pair, _p1_local, _p2_local, _row_compress_top,
                      klf, sfstab)
from .reduction import irreducible, minreal, to_standard
from .system import (DescriptorSystem, dual, eval_freq, freq_samples,
                     row_concat, series)

__all__ = [
    "NoSolutionError",
    "RationalSolveResult",
    "CoverResult",
    "spectral_decompose",
    "bilinear",
    "min_cover",
    "rational_solve",
]


class NoSolutionError(RuntimeError):
    """The rational matrix equation is incompatible."""


# ---------------------------------------------------------------------------
# additive spectral decomposition


def _gen_sylvester_split(s, t, k):
    """Invertible W_l, W_r making a block-triangular GRSF block diagonal.

    Given s, t block upper triangular with leading k x k blocks whose
    spectrum is disjoint from the trailing one, returns (wl, wr) with
    ``wl @ s @ wr`` block diagonal (and same for t).
    """
    n = s.shape[0]
    a11 = s[:k, :k]
    a22 = s[k:, k:]
    e11 = t[:k, :k]
    e22 = t[k:, k:]
    a12 = s[:k, k:]
    e12 = t[:k, k:]
    if k == 0 or k == n:
        return np.eye(n), np.eye(n)
    r, l, scale, dif, info = lapack.dtgsyl(a11, a22, a12, e11, e22, e12)
    if info != 0:
        raise PencilError("generalized Sylvester equation failed "
                          "(spectra not disjoint?)")
    # a11 r - l a22 = -scale a12  =>  wl s wr block-diagonalizes with
    x = r / scale
    y = l / scale
    wl = np.eye(n)
    wl[:k, k:] = -y
    wr = np.eye(n)
    wr[:k, k:] = x
    return wl, wr


def spectral_decompose(sys, tol=0.0, smarg=None, job="finite"):
    """Additive decomposition G = G1 + G2 along a spectral splitting.

    job selects the poles of G1: 'finite' (G2 polynomial), 'infinite'
    (G2 strictly proper), 'stable' (G2 unstable+polynomial part) or
    'unstable' (G1 unstable+polynomial).  Returns (sys1, sys2, q, z)
    with the (generally non-orthogonal) transformations applied to the
    pole pencil.
    """
    if job not in ("finite", "infinite", "stable", "unstable"):
        raise ValueError("unknown job %r" % job)
    n = sys.order
    if n == 0:
        zero = DescriptorSystem(np.zeros((0, 0)), None,
                                np.zeros((0, sys.shape[1])),
                                np.zeros((sys.shape[0], 0)),
                                np.zeros(sys.shape), sys.ts)
        return sys, zero, np.eye(0), np.eye(0)
    discrete = sys.is_discrete
    if smarg is None:
        smarg = 1.0 - np.sqrt(EPS) if discrete else -np.sqrt(EPS)
    a, e = sys.a, sys.e
    rel = tol if tol > 0 else n * n * EPS * 10
    atol = max(np.linalg.norm(a), np.linalg.norm(e), 1.0) * rel

    if job in ("finite", "stable"):
        # finite part leading, infinite trailing
        q1, z1, s, t, tr_r, tr_c, _, _ = _p2_local(a, e, atol)
        nf = n - tr_r
    else:
        # infinite leading
        q1, z1, s, t, lead_r, lead_c, _, _ = _p1_local(a, e, atol)
        nf = n - lead_r
    if job == "finite":
        k = nf
    elif job == "infinite":
        k = n - nf
    elif job == "stable":
        # order the finite block: stable leading
        sf, tf, qf, zf, ns = _order_pair(
            s[:nf, :nf], t[:nf, :nf],
            lambda lam: (not np.isinf(lam)) and
            _classify(lam, discrete, smarg) <= 0)
        s = s.copy()
        t = t.copy()
        s[:nf, :nf] = sf
        t[:nf, :nf] = tf
        s[:nf, nf:] = qf.T @ s[:nf, nf:]
        t[:nf, nf:] = qf.T @ t[:nf, nf:]
        q1[:, :nf] = q1[:, :nf] @ qf
        z1[:, :nf] = z1[:, :nf] @ zf
        k = ns
    else:
        # infinite leading; within trailing finite block put unstable first
        ninf = n - nf
        sf, tf, qf, zf, nu = _order_pair(
            s[ninf:, ninf:], t[ninf:, ninf:],
            lambda lam: (not np.isinf(lam)) and
            _classify(lam, discrete, smarg) > 0)
        s = s.copy()
        t = t.copy()
        s[ninf:, ninf:] = sf
        t[ninf:, ninf:] = tf
        s[:ninf, ninf:] = s[:ninf, ninf:] @ zf
        t[:ninf, ninf:] = t[:ninf, ninf:] @ zf
        q1[:, ninf:] = q1[:, ninf:] @ qf
        z1[:, ninf:] = z1[:, ninf:] @ zf
        k = ninf + nu
    wl, wr = _gen_sylvester_split(s, t, k)
    qq = wl @ q1.T
    zz = z1 @ wr
    at = qq @ sys.a @ zz
    et = qq @ sys.e @ zz
    bt = qq @ sys.b
    ct = sys.c @ zz
    sys1 = DescriptorSystem(at[:k, :k], et[:k, :k], bt[:k, :],
                            ct[:, :k], sys.d, sys.ts)
    sys2 = DescriptorSystem(at[k:, k:], et[k:, k:], bt[k:, :],
                            ct[:, k:], np.zeros(sys.shape), sys.ts)
    return sys1, sys2, qq, zz


# ---------------------------------------------------------------------------
# bilinear transformation


def bilinear(sys, g, tol=0.0, compact=True, minimal=False, ss=False,
             ts_out=None):
    """Composition G(g(delta)) for a first-order rational g.

    Parameters
    ----------
    g : sequence (a, b, c, d)
        Coefficients of g(delta) = (a*delta + b)/(c*delta + d), with
        a*d - b*c != 0.

    Returns
    -------
    syst : DescriptorSystem
        Realization of G(g(delta)).
    ginv : tuple
        Coefficients (d, -b, -c, a) of the inverse transformation.
    """
    a_, b_, c_, d_ = [float(x) for x in g]
    ts_new = sys.ts if ts_out is None else float(ts_out)
    if abs(a_ * d_ - b_ * c_) <= 100 * EPS * max(
            abs(a_ * d_), abs(b_ * c_), 1.0):
        raise ValueError("degenerate coefficients: a*d - b*c == 0")
    n = sys.order
    ginv = (d_, -b_, -c_, a_)
    if abs(c_) <= 100 * EPS * max(abs(a_), abs(d_), 1.0):
        # polynomial transformation lam = (a delta + b)/d
        aa, bb = a_ / d_, b_ / d_
        if sys.has_identity_e:
            at = (sys.a - bb * np.eye(n)) / aa
            return DescriptorSystem(at, None, sys.b / aa, sys.c, sys.d,
                                    ts_new), ginv
        at = sys.a - bb * sys.e
        et = aa * sys.e
        out = DescriptorSystem(at, et, sys.b, sys.c, sys.d, ts_new)
    else:
        m = sys.shape[1]
        at = np.block([[d_ * sys.a - b_ * sys.e, d_ * sys.b],
                       [np.zeros((m, n)), -np.eye(m)]])
        et = np.block([[a_ * sys.e - c_ * sys.a, -c_ * sys.b],
                       [np.zeros((m, n + m))]])
        bt = np.vstack([np.zeros((n, m)), np.eye(m)])
        ct = np.hstack([sys.c, sys.d])
        out = DescriptorSystem(at, et, bt, ct,
                               np.zeros(sys.shape), ts_new)
    if minimal:
        out = minreal(out, tol)[0]
    elif compact:
        from .reduction import _eliminate_nondynamic
        out = _eliminate_nondynamic(out, tol)[0]
    if ss:
        out = to_standard(out, tol, "ident")[0]
    return out, ginv


# ---------------------------------------------------------------------------
# minimum dynamic covers


class CoverResult:
    """Reduced X and the corresponding Y of a minimum-cover problem."""

    def __init__(self, x, y, stdim, tcond, fnorm, gnorm=0.0):
        self.x = x
        self.y = y
        self.stdim = stdim
        self.tcond = tcond
        self.fnorm = fnorm
        self.gnorm = gnorm


def _cover_staircase(a, b1, b2, atol, b1_first):
    """Interleaved two-source controllability staircase of (a, [b1, b2]).

    Returns (q, nu, mu, levels) where q is orthogonal, nu/mu are the
    per-level block sizes of the chains seeded by the first/second
    source, and `levels` lists the row ranges [(src, start, size), ...]
    in the interleaved order.
    """
    n = a.shape[0]
    q = np.eye(n)
    at = a.copy()
    w1 = b1.copy()
    w2 = b2.copy()
    i0 = 0
    nu, mu = [], []
    levels = []
    prev1 = prev2 = None
    while i0 < n:
        grow = 0
        for src in ((1, 2) if b1_first else (2, 1)):
            if src == 1:
                blk = w1[i0:, :] if prev1 is None else \
                    at[i0:, prev1[0]:prev1[1]]
            else:
                blk = w2[i0:, :] if prev2 is None else \
                    at[i0:, prev2[0]:prev2[1]]
            if blk.shape[1] == 0:
                rho = 0
            else:
                qk, rho = _row_compress_top(blk, atol)
            if rho > 0:
                at[i0:, :] = qk.T @ at[i0:, :]
                w1[i0:, :] = qk.T @ w1[i0:, :]
                w2[i0:, :] = qk.T @ w2[i0:, :]
                at[:, i0:] = at[:, i0:] @ qk
                q[:, i0:] = q[:, i0:] @ qk
            blkrange = (i0, i0 + rho)
            if src == 1:
                nu.append(rho)
                if prev1 is not None or np.linalg.norm(w1) > 0:
                    prev1 = blkrange
            else:
                mu.append(rho)
                prev2 = blkrange
            if rho > 0:
                levels.append((src, i0, rho))
            grow += rho
            i0 += rho
        if grow == 0:
            break
    return q, at, w1, w2, nu, mu, levels


def _cover_reduce(a, b1, b2, c, d1, d2, ts, cover_type, tol):
    """Core right-cover computation on a standard-form realization."""
    n = a.shape[0]
    m1 = b1.shape[1]
    m2 = b2.shape[1]
    scale = max(np.linalg.norm(a), np.linalg.norm(b1),
                np.linalg.norm(b2), 1.0)
    atol = max(tol, n * EPS * 10) * scale
    b1_first = (cover_type == 1)
    q, at, w1, w2, nu, mu, levels = _cover_staircase(a, b1, b2, atol,
                                                     b1_first)
    ct = c @ q
    ncon = sum(sz for _, _, sz in levels)
    # drop the uncontrollable tail right away
    at = at[:ncon, :ncon]
    w1 = w1[:ncon, :]
    w2 = w2[:ncon, :]
    ct = ct[:, :ncon]
    idx1 = np.concatenate([np.arange(st, st + sz)
                           for s, st, sz in levels if s == 1]) \
        if any(s == 1 for s, _, _ in levels) else np.zeros(0, int)
    idx2 = np.concatenate([np.arange(st, st + sz)
                           for s, st, sz in levels if s == 2]) \
        if any(s == 2 for s, _, _ in levels) else np.zeros(0, int)
    n1 = idx1.size
    n2 = idx2.size
    perm = np.concatenate([idx1, idx2]).astype(int)
    ag = at[np.ix_(perm, perm)]
    b1g = w1[perm, :]
    b2g = w2[perm, :]
    cg = ct[:, perm]
    if n2 == 0 or n1 == ncon:
        xs = DescriptorSystem(ag, None, b1g, cg, d1, ts)
        ys = DescriptorSystem(ag, None, b1g, np.zeros((m2, ncon)),
                              np.zeros((m2, m1)), ts)
        return xs, ys, [sz for s, _, sz in levels if s == 1], 1.0, 0.0, 0.0
    f, g, w, ok = _cover_equations(ag, b1g, b2g, n1, cover_type)
    if not ok:
        xs = DescriptorSystem(at, None, w1, ct, d1, ts)
        ys = DescriptorSystem(at, None, w1, np.zeros((m2, ncon)),
                              np.zeros((m2, m1)), ts)
        return xs, ys, [sz for s, _, sz in levels if s == 1], np.inf, \
            0.0, 0.0
    # closed-loop restriction to the tilted leading subspace
    m_cl = ag + b2g @ f
    b_cl = b1g + b2g @ g
    c_cl = cg + d2 @ f
    # similarity s = [[I, 0], [w, I]]: x = s zeta
    a11 = m_cl[:n1, :n1] + m_cl[:n1, n1:] @ w
    bx = b_cl[:n1, :]
    cx = c_cl[:, :n1] + c_cl[:, n1:] @ w
    cy = f[:, :n1] + f[:, n1:] @ w
    xs = DescriptorSystem(a11, None, bx, cx, d1 + d2 @ g, ts)
    ys = DescriptorSystem(a11, None, bx, cy, g, ts)
    tcond = np.linalg.cond(np.block([
        [np.eye(n1), np.zeros((n1, n2))], [w, np.eye(n2)]]))
    return xs, ys, [sz for s, _, sz in levels if s == 1], tcond, \
        float(np.linalg.norm(f)), float(np.linalg.norm(g))


def _cover_equations(ag, b1g, b2g, n1, cover_type, iters=80):
    """Solve the invariance equations of a dynamic cover.

    Unknowns: feedback f (m2 x n), feedforward g (m2 x m1, type 2 only)
    and the tilt w (n2 x n1) making span[[I], [w]] invariant for
    a + b2 f and containing the columns of b1 + b2 g.  Gauss-Newton from
    zero; returns (f, g, w, converged).
    """
    n = ag.shape[0]
    n2 = n - n1
    m2 = b2g.shape[1]
    m1 = b1g.shape[1]
    f = np.zeros((m2, n))
    g = np.zeros((m2, m1))
    w = np.zeros((n2, n1))
    scale = max(np.linalg.norm(ag), 1.0)

    def residuals(f, g, w):
        m = ag + b2g @ f
        r1 = m[n1:, :n1] + m[n1:, n1:] @ w - w @ (m[:n1, :n1]
                                                  + m[:n1, n1:] @ w)
        bb = b1g + b2g @ g
        r2 = bb[n1:, :] - w @ bb[:n1, :]
        return r1, r2

    nunk = m2 * n + n2 * n1 + (m2 * m1 if cover_type == 2 else 0)

    def pack(f, g, w):
        parts = [f.ravel(), w.ravel()]
        if cover_type == 2:
            parts.append(g.ravel())
        return np.concatenate(parts)

    def unpack(v):
        f = v[:m2 * n].reshape(m2, n)
        w = v[m2 * n:m2 * n + n2 * n1].reshape(n2, n1)
        g = v[m2 * n + n2 * n1:].reshape(m2, m1) if cover_type == 2 \
            else np.zeros((m2, m1))
        return f, g, w

    v = pack(f, g, w)
    for it in range(iters):
        f, g, w = unpack(v)
        r1, r2 = residuals(f, g, w)
        rv = np.concatenate([r1.ravel(), r2.ravel()])
        if np.linalg.norm(rv) <= 1e-13 * scale * max(1.0,
                                                     np.linalg.norm(w) + 1):
            return f, g, w, True
        # numerical Jacobian (small problems only)
        jac = np.zeros((rv.size, nunk))
        h = 1e-7 * scale
        for j in range(nunk):
            vp = v.copy()
            vp[j] += h
            fp, gp, wp = unpack(vp)
            p1, p2 = residuals(fp, gp, wp)
            jac[:, j] = (np.concatenate([p1.ravel(), p2.ravel()]) - rv) / h
        dv, *_ = np.linalg.lstsq(jac, -rv, rcond=None)
        step = 1.0
        nr0 = np.linalg.norm(rv)
        for _ in range(20):
            f2, g2, w2 = unpack(v + step * dv)
            t1, t2 = residuals(f2, g2, w2)
            if np.linalg.norm(np.concatenate([t1.ravel(), t2.ravel()])) \
                    < nr0:
                break
            step *= 0.5
        v = v + step * dv
    f, g, w = unpack(v)
    r1, r2 = residuals(f, g, w)
    ok = np.linalg.norm(np.concatenate([r1.ravel(), r2.ravel()])) \
        <= 1e-8 * scale
    return f, g, w, ok


def min_cover(side, cover_type, sys_joint, first_dims, tol=0.0):
    """Minimum dynamic cover reduction X = X1 + X2 Y (right) or
    X = X1 + Y X2 (left).

    ``sys_joint`` holds [X1 X2] (right: input-concatenated with
    ``first_dims`` inputs for X1) or [X1; X2] (left: output-concatenated
    with ``first_dims`` outputs for X1).  Type 1 produces a strictly
    proper Y, type 2 a proper Y.  Improper X1 is handled by splitting
    off its polynomial part unchanged.

    Returns a :class:`CoverResult`.
    """
    if side == "left":
        res = min_cover("right", cover_type, dual(sys_joint), first_dims,
                        tol)
        return CoverResult(dual(res.x), dual(res.y), res.stdim, res.tcond,
                           res.fnorm, res.gnorm)
    if cover_type not in (1, 2):
        raise ValueError("cover_type must be 1 or 2")
    m1 = int(first_dims)
    p, mtot = sys_joint.shape
    m2 = mtot - m1
    work = irreducible(sys_joint, tol)
    # split off an improper part of X1 (X2 must be proper)
    from .analysis import poles as _poles
    rep = _poles(work, tol=tol)
    polypart = None
    if rep.nip > 0:
        from .system import subsystem
        fin, infin, _, _ = spectral_decompose(work, tol=tol, job="finite")
        polypart = subsystem(infin, cols=np.arange(m1))
        if np.linalg.norm(subsystem(infin,
                                    cols=np.arange(m1, mtot)).b) > \
                1e-8 * max(1.0, np.linalg.norm(infin.b)):
            raise ValueError("X2 must be proper")
        work = fin
    if not work.has_identity_e:
        work = to_standard(work, tol, "ident")[0]
    a = work.a
    b1 = work.b[:, :m1]
    b2 = work.b[:, m1:]
    c = work.c
    d1 = work.d[:, :m1]
    d2 = work.d[:, m1:]
    xs, ys, stdim, tcond, fnorm, gnorm = _cover_reduce(
        a, b1, b2, c, d1, d2, work.ts, cover_type, tol)
    if polypart is not None:
        from .system import parallel
        xs = parallel(xs, polypart)
    return CoverResult(xs, ys, stdim, tcond, fnorm, gnorm)


# ---------------------------------------------------------------------------
# linear rational matrix equations


class RationalSolveResult:
    """Solution of G X = F (or X G = F) with its generator."""

    def __init__(self, x, x0, nullbasis, nrank, rdeg, tcond, fnorm,
                 nfree, nf, ninf):
        self.x = x
        self.generator = (x0, nullbasis)
        self.nrank = nrank
        self.rdeg = rdeg
        self.tcond = tcond
        self.fnorm = fnorm
        self.nfree = nfree
        self.nf = nf
        self.ninf = ninf


def _joint_realization(sysg, sysf):
    if sysg.shape[0] != sysf.shape[0]:
        raise ValueError("row dimensions of G and F differ")
    joint = irreducible(row_concat(sysg, sysf), 0.0)
    return joint


def rational_solve(side, sys_joint, f_dims, tol=0.0, sdeg=None, poles=None,
                   mindeg=False):
    """Solve the linear rational equation G X = F (side='right') or
    X G = F (side='left').

    ``sys_joint`` holds [G F] sharing the state (right case; ``f_dims``
    counts the trailing inputs belonging to F) or [G; F] (left case;
    ``f_dims`` counts the trailing outputs).  Free poles of the solution
    are placed per `sdeg`/`poles`; with `mindeg` a least McMillan degree
    solution is computed through a type-2 dynamic cover.

    Returns a :class:`RationalSolveResult`.
    """
    if side == "left":
        res = rational_solve("right", dual(sys_joint), f_dims, tol=tol,
                             sdeg=sdeg, poles=poles, mindeg=mindeg)
        x0, nb = res.generator
        return RationalSolveResult(dual(res.x), dual(x0), dual(nb),
                                   res.nrank, res.rdeg, res.tcond,
                                   res.fnorm, res.nfree, res.nf, res.ninf)
    if side != "right":
        raise ValueError("side must be 'right' or 'left'")
    mf = int(f_dims)
    p, mtot = sys_joint.shape
    m = mtot - mf
    n = sys_joint.order
    a, e, c = sys_joint.a, sys_joint.e, sys_joint.c
    bg = sys_joint.b[:, :m]
    bf = sys_joint.b[:, m:]
    dg = sys_joint.d[:, :m]
    df = sys_joint.d[:, m:]
    ts = sys_joint.ts
    smat = np.block([[a, bg], [c, dg]])
    emat = np.block([[e, np.zeros((n, m))], [np.zeros((p, n + m))]])
    res = klf(smat, emat, tol=tol, variant="standard")
      # blocks: right staircase | infinite | finite | left staircase
    r_rows = sum(res.mr)
    r_cols = sum(res.nr)
    ninf = sum(res.minf)
    nf = res.mf
    nl_cols = sum(res.nl)
    l_rows = (n + p) - r_rows - ninf - nf
    mr_free = r_cols - r_rows           # free input directions
    nrank = r_rows + ninf + nf + nl_cols - n
    rhs = res.q.T @ np.vstack([bf, df])
    at = res.at
    et = res.et
    # generator state: [w (r_rows) | reg (ninf+nf) | left-state (nl_cols)]
    nreg = ninf + nf
    i1, i2 = r_rows, r_rows + nreg
    j0, j1, j2 = mr_free, r_cols, r_cols + nreg
    ngen = r_rows + nreg + nl_cols
    a_gen = np.zeros((ngen, ngen))
    e_gen = np.zeros((ngen, ngen))
    rows = slice(0, i2)
    a_gen[:i2, :r_rows] = at[rows, j0:j1]
    a_gen[:i2, r_rows:r_rows + nreg] = at[rows, j1:j2]
    a_gen[:i2, r_rows + nreg:] = at[rows, j2:j2 + nl_cols]
    e_gen[:i2, :r_rows] = et[rows, j0:j1]
    e_gen[:i2, r_rows:r_rows + nreg] = et[rows, j1:j2]
    e_gen[:i2, r_rows + nreg:] = et[rows, j2:j2 + nl_cols]
    # left block rows: the leading nl_cols rows of the tall left pencil
    lrows = slice(i2, i2 + nl_cols)
    a_gen[i2:, r_rows + nreg:] = at[lrows, j2:j2 + nl_cols]
    e_gen[i2:, r_rows + nreg:] = et[lrows, j2:j2 + nl_cols]
    b0 = np.vstack([-rhs[:i2, :], -rhs[lrows, :]])
    # compatibility: the trailing left rows must be consistent; checked
    # numerically on the final residual instead of symbolically here.
    br = at[:i1, :mr_free]
    b_null = np.vstack([br, np.zeros((nreg + nl_cols, mr_free))])
    # free-pole placement on the controllable right part
    f = np.zeros((mr_free, r_rows))
    fnorm = 0.0
    if r_rows > 0 and (sdeg is not None or poles is not None):
        ar = at[:i1, j0:j1]
        er = et[:i1, j0:j1]
        f, _ = sfstab(ar, er, br, poles=poles, sdeg=sdeg,
                      discrete=ts > 0, tol=tol)
        fnorm = float(np.linalg.norm(f))
        a_gen[:i1, :r_rows] += br @ f
    # outputs: X = [0 I_m] Z W,  W = [u; w; reg; left] with u = F w (+ nu)
    zsel = res.z[n:, :]                 # input rows of Z
    cw = np.zeros((m, ngen))
    cw[:, :r_rows] = zsel[:, j0:j1] + zsel[:, :mr_free] @ f
    cw[:, r_rows:r_rows + nreg] = zsel[:, j1:j2]
    cw[:, r_rows + nreg:] = zsel[:, j2:j2 + nl_cols]
    d0 = np.zeros((m, mf))
    d_null = zsel[:, :mr_free]
    x0 = DescriptorSystem(a_gen, e_gen, b0, cw, d0, ts)
    nullb = DescriptorSystem(a_gen, e_gen, b_null, cw, d_null, ts)
    # verify compatibility at probe frequencies
    gsys = DescriptorSystem(a, e, bg, c, dg, ts)
    fsys = DescriptorSystem(a, e, bf, c, df, ts)
    x0_min = minreal(x0, tol)[0]
    okscale = max(1.0, _freq_scale(fsys))
    for lam in freq_samples(2, ts, seed=11):
        try:
            lhs = eval_freq(gsys, lam) @ eval_freq(x0_min, lam)
            rhsv = eval_freq(fsys, lam)
        except sla.LinAlgError:
            continue
        if np.linalg.norm(lhs - rhsv) > 1e-6 * okscale:
            raise NoSolutionError("equation is incompatible: residual "
                                  "%.2e" % np.linalg.norm(lhs - rhsv))
    rdeg = _relative_degrees(x0_min)
    tcond = 1.0
    if mindeg and mr_free > 0:
        gen_joint = DescriptorSystem(a_gen, e_gen,
                                     np.hstack([b0, b_null]), cw,
                                     np.hstack([d0, d_null]), ts)
        cov = min_cover("right", 2, gen_joint, mf, tol)
        x = cov.x
        tcond = cov.tcond
        fnorm = max(fnorm, cov.fnorm)
        # guard: fall back to the particular solution when the cover
        # reduction went numerically astray
        bad = not np.isfinite(tcond) or tcond > 1e8
        if not bad:
            for lam in freq_samples(2, ts, seed=23):
                try:
                    lhs = eval_freq(gsys, lam) @ eval_freq(x, lam)
                    rhsv = eval_freq(fsys, lam)
                except sla.LinAlgError:
                    continue
                if np.linalg.norm(lhs - rhsv) > 1e-5 * okscale:
                    bad = True
                    break
        if bad:
            x = x0_min
            tcond = 1.0
    else:
        x = x0_min
    x = minreal(x, tol)[0]
    return RationalSolveResult(x, x0, nullb, nrank, rdeg, tcond, fnorm,
                               r_rows, nf, ninf)


def _freq_scale(sys):
    vals = []
    for lam in freq_samples(2, sys.ts, seed=5):
        try:
            vals.append(np.linalg.norm(eval_freq(sys, lam)))
        except sla.LinAlgError:
            pass
    return max(vals) if vals else 1.0


def _relative_degrees(sys):
    """Number of infinite poles of each column (0 for proper columns)."""
    from .analysis import poles as _poles
    from .system import subsystem
    out = []
    for j in range(sys.shape[1]):
        col = minreal(subsystem(sys, cols=[j]), 0.0)[0]
        out.append(_poles(col).nip)
    return out
