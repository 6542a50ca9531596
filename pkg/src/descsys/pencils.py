"""Structural reductions of linear matrix pencils.

The central routine is :func:`klf`, which reduces a general (possibly
singular) pencil ``a - lam*e`` by orthogonal row/column transformations to
a block upper-triangular Kronecker-like form separating the right singular
structure, the infinite eigenvalues, the finite eigenvalues and the left
singular structure.  On top of it sit the specially ordered generalized
real Schur form (:func:`sorsf`), the controllability staircase form,
state-feedback stabilization (:func:`sfstab`) and the special form of a
system matrix pencil with zero selection (:func:`sklf`).
"""

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .linalg import EPS, eig_from_pairs, eigvals_pair, generalized_schur

__all__ = [
    "KlfResult",
    "SklfResult",
    "PencilError",
    "klf",
    "sklf",
    "sorsf",
    "sfstab",
    "ctrb_staircase",
    "kronecker_structure",
]


class PencilError(RuntimeError):
    """A pencil reduction could not be carried out as requested."""


# ---------------------------------------------------------------------------
# compression primitives


def _atol(m, n, rel):
    scale = max(np.linalg.norm(m), np.linalg.norm(n), 1.0)
    return rel * scale


def _col_compress_kernel_first(x, atol):
    """Orthogonal z with ``x @ z = [0 | xc]``, xc of full column rank."""
    m, n = x.shape
    if n == 0:
        return np.eye(0), 0
    if m == 0 or np.linalg.norm(x) <= atol:
        return np.eye(n), n
    u, s, vt = sla.svd(x)
    rho = int(np.count_nonzero(s > atol))
    z = np.hstack([vt[rho:, :].T, vt[:rho, :].T])
    return z, n - rho


def _row_compress_top(x, atol):
    """Orthogonal q with ``q.T @ x = [xr; 0]``, xr of full row rank."""
    m, n = x.shape
    if m == 0:
        return np.eye(0), 0
    if n == 0 or np.linalg.norm(x) <= atol:
        return np.eye(m), 0
    u, s, vt = sla.svd(x)
    rho = int(np.count_nonzero(s > atol))
    return u, rho


def _pert(x):
    """Pertranspose: transpose flipped about the anti-diagonal."""
    return x.T[::-1, ::-1].copy()


def _p1_local(m, n, atol):
    """Staircase split {right + infinite} leading | {finite + left} trailing.

    Returns ``u, v, mt, nt, lead_rows, lead_cols, nus, mus`` with
    ``u.T @ (m - lam n) @ v = mt - lam nt`` block upper triangular; the
    stage dimensions satisfy: nus[i]-mus[i] right blocks of index i and
    mus[i]-nus[i+1] elementary infinite blocks of size i+1.
    """
    mt = m.copy()
    nt = n.copy()
    rows, cols = mt.shape
    u = np.eye(rows)
    v = np.eye(cols)
    i0 = j0 = 0
    nus, mus = [], []
    while True:
        mm, nn = rows - i0, cols - j0
        if nn == 0:
            break
        if mm == 0:
            nus.append(nn)
            mus.append(0)
            j0 += nn
            break
        z1, nu = _col_compress_kernel_first(nt[i0:, j0:], atol)
        if nu == 0:
            break
        mt[:, j0:] = mt[:, j0:] @ z1
        nt[:, j0:] = nt[:, j0:] @ z1
        v[:, j0:] = v[:, j0:] @ z1
        q1, mu = _row_compress_top(mt[i0:, j0:j0 + nu], atol)
        mt[i0:, :] = q1.T @ mt[i0:, :]
        nt[i0:, :] = q1.T @ nt[i0:, :]
        u[:, i0:] = u[:, i0:] @ q1
        # the compressed positions are exact zeros by construction
        nt[i0:, j0:j0 + nu] = 0.0
        mt[i0 + mu:, j0:j0 + nu] = 0.0
        nus.append(nu)
        mus.append(mu)
        i0 += mu
        j0 += nu
    return u, v, mt, nt, i0, j0, nus, mus


def _p2_local(m, n, atol):
    """Staircase split {right + finite} leading | {infinite + left} trailing.

    Dual of :func:`_p1_local` through pertransposition.  Returns
    ``q, z, mt, nt, trail_rows, trail_cols, nus, mus`` where the stage
    dimensions refer to the pertransposed run (so they describe the
    trailing staircase read bottom-right to top-left).
    """
    up, vp, mp, npp, lr, lc, nus, mus = _p1_local(_pert(m), _pert(n), atol)
    # pert(u.T X v) = pert(v).T X pert(u) with pert(w) = flip(w)
    q = vp[::-1, ::-1]
    z = up[::-1, ::-1]
    return q, z, _pert(mp), _pert(npp), lc, lr, nus, mus


class KlfResult:
    """Kronecker-like form of a pencil plus block-dimension bookkeeping.

    Attributes
    ----------
    at, et : ndarray
        Transformed pencil ``q.T @ (a - lam e) @ z = at - lam et``.
    q, z : ndarray or None
        Orthogonal transformations (q is None when not accumulated).
    mr, nr : list of int
        Row/column dims of the full-row-rank diagonal blocks of
        ``[Br | Ar - lam Er]`` (right Kronecker staircase).  A negative
        singleton flags a merged, unreduced trailing/leading block.
    minf : list of int
        Dims of the square diagonal blocks of the infinite part, in the
        order they appear in the form.
    mf : int
        Order of the square regular block holding the finite eigenvalues.
    ml, nl : list of int
        Row/column dims of the full-column-rank diagonal blocks of
        ``[Al - lam El; Cl]`` (left staircase); negative singleton flags
        a merged block.
    """

    def __init__(self, at, et, q, z, mr, nr, minf, mf, ml, nl):
        self.at = at
        self.et = et
        self.q = q
        self.z = z
        self.mr = mr
        self.nr = nr
        self.minf = minf
        self.mf = mf
        self.ml = ml
        self.nl = nl

    def _merged(self, dims):
        return len(dims) == 1 and dims[0] < 0

    @property
    def right_indices(self):
        """Right Kronecker indices, one entry per elementary block."""
        if self._merged(self.mr):
            raise ValueError("right structure left merged in this variant")
        return _stage_indices(self.nr, self.mr)

    @property
    def left_indices(self):
        """Left Kronecker indices."""
        if self._merged(self.ml):
            raise ValueError("left structure left merged in this variant")
        # ml/nl are stored in form order (top-left to bottom-right); the
        # stage numbering runs bottom-up.
        return _stage_indices(self.ml[::-1], self.nl[::-1])

    @property
    def inf_divisors(self):
        """Sizes of the elementary infinite blocks, with multiplicity."""
        return _inf_sizes(self.minf)

    @property
    def n_right(self):
        return 0 if self._merged(self.mr) else sum(self.mr)

    @property
    def n_left(self):
        return 0 if self._merged(self.nl) else sum(self.nl)


def _stage_indices(big, small):
    idx = []
    for i in range(len(big)):
        idx.extend([i] * (big[i] - small[i]))
    return idx


def _inf_sizes(minf):
    d = sorted(minf, reverse=True)
    sizes = []
    for i in range(len(d)):
        nxt = d[i + 1] if i + 1 < len(d) else 0
        sizes.extend([i + 1] * (d[i] - nxt))
    return sizes


def _triangularize_er(m0, n0, q, nus, mus):
    """Upper-triangularize the square invertible E-blocks of the leading
    right staircase (rows/cols start at 0)."""
    i0 = 0
    j0 = 0
    for k in range(len(nus)):
        mu = mus[k]
        nu_next = nus[k + 1] if k + 1 < len(nus) else 0
        if mu > 0 and nu_next == mu:
            blk = n0[i0:i0 + mu, j0 + nus[k]:j0 + nus[k] + mu]
            qk, _ = sla.qr(blk)
            m0[i0:i0 + mu, :] = qk.T @ m0[i0:i0 + mu, :]
            n0[i0:i0 + mu, :] = qk.T @ n0[i0:i0 + mu, :]
            if q is not None:
                q[:, i0:i0 + mu] = q[:, i0:i0 + mu] @ qk
        i0 += mu
        j0 += nus[k]


def klf(a, e, tol=0.0, variant="standard", accumulate_q=True):
    """Kronecker-like staircase form of the pencil ``a - lam*e``.

    Parameters
    ----------
    a, e : (m, n) array_like
        Pencil matrices (any shape, possibly singular pencil).
    tol : float
        Relative tolerance for rank decisions (0 selects a default).
    variant : {'standard', 'reverse', 'right', 'left'}
        'standard': right | infinite | finite | left;
        'reverse':  right | finite | infinite | left;
        'right':    right | infinite | merged(finite+left);
        'left':     merged(right+finite) | infinite | left.
    accumulate_q : bool
        Whether to accumulate (and return) the left transformation.

    Returns
    -------
    KlfResult
    """
    m0 = np.atleast_2d(np.asarray(a, dtype=float)).copy()
    n0 = np.atleast_2d(np.asarray(e, dtype=float)).copy()
    if m0.shape != n0.shape:
        raise ValueError("pencil matrices must have equal shapes")
    rows, cols = m0.shape
    rel = tol if tol > 0 else max(rows, cols, 1) * EPS * 10
    atol = _atol(m0, n0, rel)
    q = np.eye(rows)
    z = np.eye(cols)
    if variant not in ("standard", "reverse", "right", "left"):
        raise ValueError("unknown variant %r" % variant)

    mr = nr = minf = ml = nl = None
    mf = 0

    if variant in ("standard", "right"):
        u1, v1, m0, n0, ri_r, ri_c, _, _ = _p1_local(m0, n0, atol)
        q = q @ u1
        z = z @ v1
        # split the leading {right+infinite} block: right | infinite
        u2, z2, mt2, nt2, inf_r, inf_c, nus2, _ = _p2_local(
            m0[:ri_r, :ri_c], n0[:ri_r, :ri_c], atol)
        m0[:ri_r, :ri_c] = mt2
        n0[:ri_r, :ri_c] = nt2
        m0[:ri_r, ri_c:] = u2.T @ m0[:ri_r, ri_c:]
        n0[:ri_r, ri_c:] = u2.T @ n0[:ri_r, ri_c:]
        q[:, :ri_r] = q[:, :ri_r] @ u2
        z[:, :ri_c] = z[:, :ri_c] @ z2
        minf = nus2[::-1]
        r_rows, r_cols = ri_r - inf_r, ri_c - inf_c
        # restaircase the now pure-right leading block
        u3, v3, mt3, nt3, _, _, nus3, mus3 = _p1_local(
            m0[:r_rows, :r_cols], n0[:r_rows, :r_cols], atol)
        m0[:r_rows, :r_cols] = mt3
        n0[:r_rows, :r_cols] = nt3
        m0[:r_rows, r_cols:] = u3.T @ m0[:r_rows, r_cols:]
        n0[:r_rows, r_cols:] = u3.T @ n0[:r_rows, r_cols:]
        q[:, :r_rows] = q[:, :r_rows] @ u3
        z[:, :r_cols] = z[:, :r_cols] @ v3
        _triangularize_er(m0, n0, q, nus3, mus3)
        mr, nr = mus3, nus3
        if variant == "standard":
            u4, z4, mt4, nt4, l_r, l_c, nus4, mus4 = _p2_local(
                m0[ri_r:, ri_c:], n0[ri_r:, ri_c:], atol)
            m0[ri_r:, ri_c:] = mt4
            n0[ri_r:, ri_c:] = nt4
            m0[:ri_r, ri_c:] = m0[:ri_r, ri_c:] @ z4
            n0[:ri_r, ri_c:] = n0[:ri_r, ri_c:] @ z4
            q[:, ri_r:] = q[:, ri_r:] @ u4
            z[:, ri_c:] = z[:, ri_c:] @ z4
            mf = (rows - ri_r) - l_r
            ml = nus4[::-1]
            nl = mus4[::-1]
        else:
            mf = 0
            ml = [-(rows - ri_r)]
            nl = [-(cols - ri_c)]
    else:
        u1, z1, m0, n0, il_r, il_c, _, _ = _p2_local(m0, n0, atol)
        q = q @ u1
        z = z @ z1
        rf_r, rf_c = rows - il_r, cols - il_c
        # split the trailing {infinite+left} block: infinite | left
        u2, v2, mt2, nt2, i_r, i_c, nus2, _ = _p1_local(
            m0[rf_r:, rf_c:], n0[rf_r:, rf_c:], atol)
        m0[rf_r:, rf_c:] = mt2
        n0[rf_r:, rf_c:] = nt2
        m0[:rf_r, rf_c:] = m0[:rf_r, rf_c:] @ v2
        n0[:rf_r, rf_c:] = n0[:rf_r, rf_c:] @ v2
        q[:, rf_r:] = q[:, rf_r:] @ u2
        z[:, rf_c:] = z[:, rf_c:] @ v2
        minf = list(nus2)
        l_r, l_c = il_r - i_r, il_c - i_c
        # restaircase the trailing pure-left block
        u3, z3, mt3, nt3, _, _, nus3, mus3 = _p2_local(
            m0[rows - l_r:, cols - l_c:], n0[rows - l_r:, cols - l_c:],
            atol)
        m0[rows - l_r:, cols - l_c:] = mt3
        n0[rows - l_r:, cols - l_c:] = nt3
        m0[:rows - l_r, cols - l_c:] = m0[:rows - l_r, cols - l_c:] @ z3
        n0[:rows - l_r, cols - l_c:] = n0[:rows - l_r, cols - l_c:] @ z3
        q[:, rows - l_r:] = q[:, rows - l_r:] @ u3
        z[:, cols - l_c:] = z[:, cols - l_c:] @ z3
        ml = nus3[::-1]
        nl = mus3[::-1]
        if variant == "reverse":
            u4, v4, mt4, nt4, _, _, nus4, mus4 = _p1_local(
                m0[:rf_r, :rf_c], n0[:rf_r, :rf_c], atol)
            m0[:rf_r, :rf_c] = mt4
            n0[:rf_r, :rf_c] = nt4
            m0[:rf_r, rf_c:] = u4.T @ m0[:rf_r, rf_c:]
            n0[:rf_r, rf_c:] = u4.T @ n0[:rf_r, rf_c:]
            q[:, :rf_r] = q[:, :rf_r] @ u4
            z[:, :rf_c] = z[:, :rf_c] @ v4
            _triangularize_er(m0, n0, q, nus4, mus4)
            mr, nr = mus4, nus4
            mf = rf_r - sum(mus4)
        else:
            mr = [-rf_r]
            nr = [-rf_c]
            mf = 0
    return KlfResult(m0, n0, q if accumulate_q else None, z,
                     mr, nr, minf, mf, ml, nl)


def kronecker_structure(a, e, tol=0.0):
    """Complete Kronecker structure of a pencil.

    Returns a dict with the finite eigenvalues of the regular part, the
    sizes of the elementary infinite blocks, the right/left Kronecker
    indices and the normal rank of the pencil.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    e = np.atleast_2d(np.asarray(e, dtype=float))
    res = klf(a, e, tol=tol, variant="standard", accumulate_q=False)
    rows = sum(res.mr)
    cols = sum(res.nr)
    ninf = sum(res.minf)
    i0, j0 = rows + ninf, cols + ninf
    af = res.at[i0:i0 + res.mf, j0:j0 + res.mf]
    ef = res.et[i0:i0 + res.mf, j0:j0 + res.mf]
    alpha, beta = eigvals_pair(af, ef)
    fin = eig_from_pairs(alpha, beta)
    nrank = rows + ninf + res.mf + sum(res.nl)
    return {
        "finite": fin,
        "inf_divisors": res.inf_divisors,
        "kr": res.right_indices,
        "kl": res.left_indices,
        "nrank": nrank,
    }


# ---------------------------------------------------------------------------
# regular pencils: ordered GRSF, block moves, eigenvalue assignment


def _classify(lam, discrete, smarg, offset=0.0):
    """-1 inside the margin region, 0 on its boundary band, +1 outside."""
    if np.isinf(lam):
        return 1
    if discrete:
        r = abs(lam)
        if r < smarg - offset:
            return -1
        return 0 if r <= smarg + offset else 1
    x = lam.real
    if x < smarg - offset:
        return -1
    return 0 if x <= smarg + offset else 1


def _grsf_block_starts(s):
    n = s.shape[0]
    starts = []
    i = 0
    while i < n:
        starts.append(i)
        if i + 1 < n and s[i + 1, i] != 0.0:
            i += 2
        else:
            i += 1
    return starts


def _move_block(s, t, q, z, ifst, ilst):
    """Move the diagonal block starting at index ``ifst`` to ``ilst``."""
    if ifst == ilst:
        return s, t, q, z
    s2, t2, q2, z2, _, info = lapack.dtgexc(s, t, q, z, ifst + 1, ilst + 1)
    if info not in (0, 1):
        raise PencilError("generalized Schur block move failed")
    return s2, t2, q2, z2


def _order_pair(a, e, select):
    """GRSF of (a, e) with selected eigenvalues leading.

    ``select`` maps a complex eigenvalue to True/False.  Returns
    (s, t, q, z, k) with k the number of selected eigenvalues.
    """
    n = a.shape[0]
    if n == 0:
        return (a.copy(), e.copy(), np.eye(0), np.eye(0), 0)

    def pred(alpha, beta):
        lam = eig_from_pairs(np.atleast_1d(alpha), np.atleast_1d(beta))
        return np.array([bool(select(x)) for x in lam])

    s, t, alpha, beta, qq, zz = sla.ordqz(a, e, sort=pred, output="real")
    lam = eig_from_pairs(alpha, beta)
    k = int(np.count_nonzero([select(x) for x in lam]))
    return s, t, qq, zz, k


def sorsf(a, e, disc=False, smarg=None, reverse=False, sepinf=True,
          fast=True, tol=0.0):
    """Specially ordered generalized real Schur form of a regular pencil.

    Reduces (a, e) by orthogonal similarity to the block ordering
    [inf_simple | good | bad_finite | inf_higher] (or its reverse), where
    'good' finite eigenvalues satisfy the stability margin `smarg`.

    Returns
    -------
    at, et, q, z : ndarray
    dims : list of 4 ints
        Orders of the four diagonal blocks.
    ni : list of int
        Dims of the staircase blocks of the higher-order infinite part.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    e = np.atleast_2d(np.asarray(e, dtype=float))
    n = a.shape[0]
    if a.shape != e.shape or a.shape[0] != a.shape[1]:
        raise ValueError("need a square pencil")
    if smarg is None:
        smarg = 1.0 - np.sqrt(EPS) if disc else -np.sqrt(EPS)
    if reverse:
        at, et, q, z, dims, ni = sorsf(_pert(a), _pert(e), disc=disc,
                                       smarg=smarg, reverse=False,
                                       sepinf=sepinf, fast=fast, tol=tol)
        return (_pert(at), _pert(et), z[::-1, ::-1], q[::-1, ::-1],
                dims[::-1], ni)

    rel = tol if tol > 0 else n * n * EPS * 10
    atol = _atol(a, e, rel)
    s = a.copy()
    t = e.copy()
    q = np.eye(n)
    z = np.eye(n)

    # peel one layer of infinite eigenvalues (the eigenvector layer)
    z1, nu = _col_compress_kernel_first(t, atol)
    ninf1 = nu
    if nu > 0:
        s = s @ z1
        t = t @ z1
        z = z @ z1
        q1, mu = _row_compress_top(s[:, :nu], atol)
        if mu < nu:
            raise PencilError("pencil is singular (not regular)")
        s = q1.T @ s
        t = q1.T @ t
        q = q @ q1
        t[:, :nu] = 0.0
        s[nu:, :nu] = 0.0
    # trailing pencil (s2, t2) holds the remaining structure
    k0 = ninf1
    s2 = s[k0:, k0:]
    t2 = t[k0:, k0:]
    # push remaining higher-order infinite eigenvalues to the trailing end
    u2, z2, mt2, nt2, hi_r, hi_c, nus2, mus2 = _p2_local(s2, t2, atol)
    if hi_r != hi_c:
        raise PencilError("pencil is singular (not regular)")
    s[k0:, k0:] = mt2
    t[k0:, k0:] = nt2
    s[:k0, k0:] = s[:k0, k0:] @ z2
    t[:k0, k0:] = t[:k0, k0:] @ z2
    q[:, k0:] = q[:, k0:] @ u2
    z[:, k0:] = z[:, k0:] @ z2
    ni = nus2[::-1] if sepinf else []
    nbinf = hi_r
    # finite middle part: GRSF with good eigenvalues leading
    nf = n - k0 - nbinf
    if nf > 0:
        af = s[k0:k0 + nf, k0:k0 + nf]
        ef = t[k0:k0 + nf, k0:k0 + nf]
        sf, tf, qf, zf, ngood = _order_pair(
            af, ef, lambda lam: _classify(lam, disc, smarg) <= 0)
        s[k0:k0 + nf, k0:k0 + nf] = sf
        t[k0:k0 + nf, k0:k0 + nf] = tf
        s[k0:k0 + nf, k0 + nf:] = qf.T @ s[k0:k0 + nf, k0 + nf:]
        t[k0:k0 + nf, k0 + nf:] = qf.T @ t[k0:k0 + nf, k0 + nf:]
        s[:k0, k0:k0 + nf] = s[:k0, k0:k0 + nf] @ zf
        t[:k0, k0:k0 + nf] = t[:k0, k0:k0 + nf] @ zf
        q[:, k0:k0 + nf] = q[:, k0:k0 + nf] @ qf
        z[:, k0:k0 + nf] = z[:, k0:k0 + nf] @ zf
    else:
        ngood = 0
    dims = [ninf1, ngood, nf - ngood, nbinf]
    return s, t, q, z, dims, ni


class SklfResult:
    """Special Kronecker-like form of a system matrix pencil."""

    def __init__(self, at, et, q, z, dimsc):
        self.at = at
        self.et = et
        self.q = q
        self.z = z
        self.dimsc = dimsc


def _zero_select(zerosel, discrete, offset):
    """Predicate: True when a zero belongs to the 'bad' set C_b."""
    if zerosel == "none":
        return lambda lam: False, False
    if zerosel == "all":
        return lambda lam: True, True
    if zerosel == "finite":
        return lambda lam: not np.isinf(lam), False
    if zerosel == "infinite":
        return lambda lam: np.isinf(lam), True
    if zerosel == "unstable":
        # C_b = open instability domain; infinity is on the boundary in
        # continuous time but strictly unstable in discrete time
        def bad(lam):
            if np.isinf(lam):
                return discrete
            return _classify(lam, discrete, 1.0 if discrete else 0.0,
                             offset) > 0
        return bad, discrete
    if zerosel == "s-unstable":
        def bad(lam):
            if np.isinf(lam):
                return True
            return _classify(lam, discrete, 1.0 if discrete else 0.0,
                             offset) >= 0
        return bad, True
    if zerosel == "stable":
        def bad(lam):
            if np.isinf(lam):
                return False
            return _classify(lam, discrete, 1.0 if discrete else 0.0,
                             offset) < 0
        return bad, False
    raise ValueError("unknown zero selection %r" % zerosel)


def sklf(sys, tol=0.0, zerosel="none", offset=1.4901e-8):
    """Special Kronecker-like form of the system matrix pencil of ``sys``.

    The system pencil S(lam) = [[A - lam E, B], [C, D]] is reduced by
    orthogonal transformations to a block upper triangular form whose
    leading group collects the right Kronecker structure together with
    the zeros selected into the 'good' region, and whose trailing group
    (of full column rank over the good region) carries the remaining
    zeros and the left Kronecker structure.

    Returns an :class:`SklfResult` whose ``dimsc`` holds six counts:
    columns of the leading group, order of the trailing 'bad-zeros+left'
    group, the normal rank r of the transfer-function matrix, the extra
    state rows, the number of boundary finite zeros and the number of
    infinite zeros (continuous time only).
    """
    n = sys.order
    p, m = sys.shape
    smat = np.block([[sys.a, sys.b], [sys.c, sys.d]])
    emat = np.block([[sys.e, np.zeros((n, m))], [np.zeros((p, n + m))]])
    bad, inf_bad = _zero_select(zerosel, sys.is_discrete, offset)
    variant = "reverse" if inf_bad else "standard"
    res = klf(smat, emat, tol=tol, variant=variant)
    nr_rows = sum(res.mr)
    nr_cols = sum(res.nr)
    ninf = sum(res.minf)
    mf = res.mf
    # locate the finite block within the form
    if variant == "standard":
        f_r0 = nr_rows + ninf
        f_c0 = nr_cols + ninf
    else:
        f_r0 = nr_rows
        f_c0 = nr_cols
    af = res.at[f_r0:f_r0 + mf, f_c0:f_c0 + mf]
    ef = res.et[f_r0:f_r0 + mf, f_c0:f_c0 + mf]
    sf, tf, qf, zf, ngood = _order_pair(af, ef,
                                        lambda lam: not bad(lam))
    at = res.at.copy()
    et = res.et.copy()
    q = res.q.copy()
    z = res.z.copy()
    at[f_r0:f_r0 + mf, f_c0:f_c0 + mf] = sf
    et[f_r0:f_r0 + mf, f_c0:f_c0 + mf] = tf
    at[f_r0:f_r0 + mf, f_c0 + mf:] = qf.T @ at[f_r0:f_r0 + mf, f_c0 + mf:]
    et[f_r0:f_r0 + mf, f_c0 + mf:] = qf.T @ et[f_r0:f_r0 + mf, f_c0 + mf:]
    at[:f_r0, f_c0:f_c0 + mf] = at[:f_r0, f_c0:f_c0 + mf] @ zf
    et[:f_r0, f_c0:f_c0 + mf] = et[:f_r0, f_c0:f_c0 + mf] @ zf
    q[:, f_r0:f_r0 + mf] = q[:, f_r0:f_r0 + mf] @ qf
    z[:, f_c0:f_c0 + mf] = z[:, f_c0:f_c0 + mf] @ zf
    # structural counts
    lam_f = eig_from_pairs(*eigvals_pair(sf, tf))
    nfin_bad = int(np.count_nonzero([bad(x) for x in lam_f]))
    inf_zero_sizes = [sz - 1 for sz in res.inf_divisors if sz > 1]
    niz = sum(inf_zero_sizes)
    r = nr_rows + ninf + mf + sum(res.nl) - n   # normal rank of G
    kr0 = res.right_indices.count(0)
    lead_rows = nr_rows + (ninf if not inf_bad else 0) + ngood
    lead_cols = (nr_cols - kr0) + (ninf if not inf_bad else 0) + ngood
    n_bl = nfin_bad + (niz if inf_bad else 0) + sum(res.nl)
    n_bn = max(n - lead_rows - n_bl, 0)
    bd = 0
    if zerosel in ("unstable", "s-unstable", "stable"):
        bd = int(np.count_nonzero(
            [_classify(x, sys.is_discrete,
                       1.0 if sys.is_discrete else 0.0, offset) == 0
             for x in lam_f]))
    niuz = 0 if sys.is_discrete else niz
    dimsc = [lead_cols, n_bl, r, n_bn, bd, niuz]
    return SklfResult(at, et, q, z, dimsc)


# ---------------------------------------------------------------------------
# controllability staircase form and state feedback


def ctrb_staircase(a, e, b, tol=0.0):
    """Orthogonal controllability staircase form of (A - lam E, B).

    Returns (at, et, bt, q, z, dims): ``q.T @ (a - lam e) @ z`` has the
    controllable part leading in staircase form (full-row-rank
    subdiagonal blocks of sizes `dims`), `et` upper triangular, and the
    trailing block carries the uncontrollable eigenvalues.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float)).copy()
    if e is None:
        e = np.eye(a.shape[0])
    e = np.atleast_2d(np.asarray(e, dtype=float)).copy()
    b = np.atleast_2d(np.asarray(b, dtype=float)).copy()
    n = a.shape[0]
    m = b.shape[1]
    rel = tol if tol > 0 else n * max(n, m, 1) * EPS * 10
    atol = max(np.linalg.norm(a), np.linalg.norm(e),
               np.linalg.norm(b), 1.0) * rel
    q = np.eye(n)
    z = np.eye(n)
    qe, re_ = sla.qr(e)
    e = re_
    a = qe.T @ a
    b = qe.T @ b
    q = q @ qe
    i0 = 0
    prev = None  # column range of the previous stage block
    dims = []
    while i0 < n:
        blk = b[i0:, :] if prev is None else a[i0:, prev[0]:prev[1]]
        qk, rho = _row_compress_top(blk, atol)
        if rho == 0:
            break
        a[i0:, :] = qk.T @ a[i0:, :]
        e[i0:, :] = qk.T @ e[i0:, :]
        b[i0:, :] = qk.T @ b[i0:, :]
        q[:, i0:] = q[:, i0:] @ qk
        if prev is None:
            b[i0 + rho:, :] = 0.0
        else:
            a[i0 + rho:, prev[0]:prev[1]] = 0.0
        # restore the triangular form of e by a column RQ
        r2, q2 = sla.rq(e[i0:, i0:])
        e[i0:, i0:] = r2
        e[:i0, i0:] = e[:i0, i0:] @ q2.T
        a[:, i0:] = a[:, i0:] @ q2.T
        z[:, i0:] = z[:, i0:] @ q2.T
        dims.append(rho)
        prev = (i0, i0 + rho)
        i0 += rho
    return a, e, b, q, z, dims


class _TargetPool:
    """Dispenses desired eigenvalues: explicit poles first, then sdeg."""

    def __init__(self, poles, sdeg, discrete):
        poles = [] if poles is None else list(np.atleast_1d(poles))
        self.reals = [float(np.real(p)) for p in poles
                      if abs(np.imag(p)) < 1e-12]
        cplx = sorted([complex(p) for p in poles if np.imag(p) > 1e-12],
                      key=lambda v: (v.real, v.imag))
        conj = sorted([complex(p) for p in poles if np.imag(p) < -1e-12],
                      key=lambda v: (v.real, -v.imag))
        if len(cplx) != len(conj) or any(
                abs(c - np.conj(d)) > 1e-9 * max(1.0, abs(c))
                for c, d in zip(cplx, conj)):
            raise ValueError("desired pole set is not conjugate closed")
        self.pairs = cplx
        self.sdeg = sdeg
        self.discrete = discrete

    def _nearest(self, lam):
        sdeg = self.sdeg
        if sdeg is None:
            sdeg = 0.95 if self.discrete else -0.05
        if lam is None or np.isinf(abs(lam)):
            return complex(sdeg, 0.0)
        if self.discrete:
            r = abs(lam)
            if r == 0.0:
                return complex(sdeg, 0.0)
            return lam * (sdeg / r)
        return complex(sdeg, np.imag(lam))

    def real_target(self, lam=None):
        if self.reals:
            return self.reals.pop(0)
        t = self._nearest(lam)
        return float(np.real(t))

    def pair_target(self, lam=None):
        """Target for a 2x2 block: ('cplx', z) or ('reals', r1, r2)."""
        if self.pairs:
            return ("cplx", self.pairs.pop(0))
        if len(self.reals) >= 2:
            return ("reals", self.reals.pop(0), self.reals.pop(0))
        t = self._nearest(lam)
        if abs(np.imag(t)) > 1e-12:
            return ("cplx", complex(t))
        return ("reals", float(np.real(t)), float(np.real(t)))


def _assign_block(s_w, t_w, b_w, target):
    """Feedback f (m x k) placing the eigenvalues of a trailing block.

    ``target`` is a float for 1x1 blocks or a _TargetPool.pair_target
    tuple for 2x2 blocks.  Returns None when the block is numerically
    uncontrollable (or the placement equations are inconsistent).
    """
    k = s_w.shape[0]
    m = b_w.shape[1]
    scale = max(np.linalg.norm(s_w), np.linalg.norm(t_w), 1.0)
    if np.linalg.norm(b_w) <= 1e4 * EPS * scale:
        return None
    if k == 1:
        gamma = float(np.real(target))
        denom = float(b_w[0] @ b_w[0])
        rhs = gamma * t_w[0, 0] - s_w[0, 0]
        return (b_w[0] * (rhs / denom)).reshape(m, 1)
    if target[0] == "cplx":
        x, y = np.real(target[1]), abs(np.imag(target[1]))
        m_t = np.array([[x, y], [-y, x]])
        roots = [complex(x, y), complex(x, -y)]
    else:
        m_t = np.array([[target[1], 0.0], [0.0, target[2]]])
        roots = [target[1], target[2]]
    delta = m_t @ t_w - s_w
    f, *_ = np.linalg.lstsq(b_w, delta, rcond=None)
    if np.linalg.norm(b_w @ f - delta) <= 1e-8 * scale:
        return f
    # rank-one input direction: match the characteristic polynomial
    u_, sv, vt_ = sla.svd(b_w)
    if sv[0] <= 1e4 * EPS * scale:
        return None
    u1 = u_[:, 0]

    def quad_coeffs(w):
        vals = []
        for lam in (0.0, 1.0, -1.0):
            vals.append(np.linalg.det(s_w + np.outer(u1, w) - lam * t_w))
        c0 = vals[0]
        c2 = 0.5 * (vals[1] + vals[2]) - c0
        c1 = 0.5 * (vals[1] - vals[2])
        return np.array([c2, c1, c0])  # coefficients of lam^2, lam, 1

    base = quad_coeffs(np.zeros(2))
    col1 = quad_coeffs(np.array([1.0, 0.0])) - base
    col2 = quad_coeffs(np.array([0.0, 1.0])) - base
    want = np.real(np.poly(roots)) * np.linalg.det(t_w) - base
    mat = np.column_stack([col1, col2])
    w, *_ = np.linalg.lstsq(mat, want, rcond=None)
    if np.linalg.norm(mat @ w - want) > 1e-6 * max(np.linalg.norm(want),
                                                   scale):
        return None
    return np.outer(vt_[0], w) / sv[0]


def sfstab(a, e, b, poles=None, sdeg=None, discrete=False, tol=0.0,
           sepinf=True):
    """State feedback moving the controllable 'bad' finite eigenvalues.

    Finite eigenvalues of ``a - lam e`` outside the stability region (set
    by `sdeg`, default -0.2 continuous / 0.2 discrete when no poles are
    given) are moved to the locations in `poles`; when `poles` runs out,
    to the nearest admissible values.  Infinite eigenvalues are left in
    place; uncontrollable bad eigenvalues are detected and skipped.

    Returns
    -------
    f : ndarray
        State-feedback matrix in the original coordinates.
    info : dict
        Keys: acl, ecl, bcl, q, z (closed-loop GRSF data), and the
        counts ninf, nfg, naf, nuf partitioning the spectrum.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if e is None:
        e = np.eye(a.shape[0])
    e = np.atleast_2d(np.asarray(e, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    n = a.shape[0]
    m = b.shape[1]
    npoles = 0 if poles is None else len(np.atleast_1d(poles))
    if sdeg is None and npoles == 0:
        sdeg = 0.2 if discrete else -0.2
    pool = _TargetPool(poles, sdeg, discrete)
    smarg = sdeg if sdeg is not None else (
        1.0 - np.sqrt(EPS) if discrete else -np.sqrt(EPS))
    scale = max(np.linalg.norm(a), np.linalg.norm(e), 1.0)

    # pre-classify uncontrollable bad eigenvalues by rank probes
    lam_all = eig_from_pairs(*eigvals_pair(a, e))
    frozen = []
    for lam in lam_all:
        if np.isinf(lam) or _classify(lam, discrete, smarg) <= 0:
            continue
        mat = np.hstack([a - lam * e, b])
        sv = sla.svd(mat, compute_uv=False)
        if sv[-1] <= max(tol, 1e-9) * max(sv[0], scale):
            frozen.append(lam)
    nuf = len(frozen)

    def is_frozen(lam):
        return any(abs(lam - u) <= 1e-7 * max(1.0, abs(u))
                   for u in frozen)

    def keep(lam):
        if np.isinf(lam):
            return True
        return _classify(lam, discrete, smarg) <= 0 or is_frozen(lam)

    gs = generalized_schur(a, e)
    s, t, q, z = gs.s, gs.t, gs.q, gs.z
    s, t, qq, zz, _ = _order_pair(s, t, keep)
    q = q @ qq
    z = z @ zz
    bt = q.T @ b
    f_tot = np.zeros((m, n))
    naf = 0
    guard = 0
    while guard <= 2 * n + 8:
        guard += 1
        starts = _grsf_block_starts(s)
        lam = eig_from_pairs(*eigvals_pair(s, t))
        bad = [st for st in starts if not keep(lam[st])]
        if not bad:
            break
        st = bad[-1]
        k = 2 if (st + 1 < n and s[st + 1, st] != 0.0) else 1
        if st + k < n:
            s, t, q, z = _move_block(s, t, q, z, st, n - k)
            bt = q.T @ b
            continue
        if k == 1:
            tgt = pool.real_target(lam[st])
        else:
            tgt = pool.pair_target(lam[st])
        fk = _assign_block(s[st:, st:], t[st:, st:], bt[st:, :], tgt)
        if fk is None:
            frozen.append(lam[st])
            if k == 2:
                frozen.append(np.conj(lam[st]))
            nuf += k
            continue
        fk_full = np.zeros((m, n))
        fk_full[:, st:] = fk
        s = s + bt @ fk_full
        f_tot = f_tot + fk_full @ z.T
        gs2 = generalized_schur(s[st:, st:], t[st:, st:])
        s[st:, st:] = gs2.s
        t[st:, st:] = gs2.t
        s[:st, st:] = s[:st, st:] @ gs2.z
        t[:st, st:] = t[:st, st:] @ gs2.z
        q[:, st:] = q[:, st:] @ gs2.q
        z[:, st:] = z[:, st:] @ gs2.z
        bt = q.T @ b
        naf += k
    lam = eig_from_pairs(*eigvals_pair(s, t))
    ninf = int(np.count_nonzero(np.isinf(lam)))
    nfg = int(np.count_nonzero(
        [not np.isinf(x) and _classify(x, discrete, smarg) <= 0
         for x in lam])) - naf
    info = {"acl": s, "ecl": t, "bcl": bt, "q": q, "z": z,
            "ninf": ninf, "nfg": max(nfg, 0), "naf": naf, "nuf": nuf}
    return f_tot, info
