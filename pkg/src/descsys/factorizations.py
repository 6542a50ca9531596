"""Coprime, inner-outer and spectral factorizations of rational matrices.

Coprime factorizations are computed by a recursive pole-dislocation
scheme: each selected pole is moved by a state feedback acting on a
trailing window of an ordered generalized real Schur form of the pole
pencil, one elementary denominator factor per step.  The composition of
all steps keeps the closed form

    N = (A + B F - lam E, B V, C + D F, D V),
    M = (A + B F - lam E, B V, F, V),

with F the accumulated feedback and V the accumulated constant input
transformation, so G = N M^{-1} holds exactly by construction.  Inner
variants reflect unstable poles across the stability boundary and choose
each elementary feedback from a Riccati equation so that M is inner.

Infinite poles are dislocated through trailing chain-tail windows of the
infinite structure, which is separated and shaped by a staircase and the
kernel filtration of the associated nilpotent map (plain QZ is unreliable
on such pencils).
"""

import numpy as np
import scipy.linalg as sla

from .linalg import EPS, eig_from_pairs, eigvals_pair, generalized_schur
from .matrixeq import RiccatiError, _stable_deflating, solve_gcare, \
    solve_gdare
from .pencils import (PencilError, _assign_block, _classify,
                      _grsf_block_starts, _move_block, _order_pair,
                      _p1_local, _p2_local, _TargetPool,
                      kronecker_structure)
from .reduction import irreducible, minreal, to_standard
from .system import (DEFAULT_OFFSET, DescriptorSystem, dual, eval_freq,
                     static_gain)

__all__ = [
    "FactorizationError",
    "FactorPair",
    "coprime",
    "coprime_inner_den",
    "normalized_coprime",
    "inner_outer",
    "spectral_factor_gamma",
]


class FactorizationError(RuntimeError):
    """A factorization does not exist or could not be computed."""


class FactorPair:
    """Two descriptor systems returned by a factorization."""

    def __init__(self, first, second, info=None):
        self.first = first
        self.second = second
        self.info = info if info is not None else {}

    def __iter__(self):
        return iter((self.first, self.second))


# ---------------------------------------------------------------------------
# ordered forms for the dislocation recursion


def _inf_tail_form(s_inf, t_inf, layers, atol):
    """Orthogonal (u, v) shaping a pure-infinite subpencil.

    After the transformation S is upper triangular and T strictly upper
    triangular with only the first row of the trailing chain-tail window
    nonzero, so that a one-column feedback can dislocate one infinite
    pole.  ``layers`` are the kernel-filtration increments of inv(S) T
    (layers[0] = number of chains).
    """
    k = s_inf.shape[0]
    if k == 0:
        return np.eye(0), np.eye(0)
    nhat = sla.solve(s_inf, t_inf)
    levels = [d for d in layers if d > 0]
    v = np.zeros((k, 0))
    power = np.eye(k)
    filled = 0
    for dim in np.cumsum(levels):
        power = power @ nhat
        _, _, vt = sla.svd(power)
        kerb = vt[k - dim:, :].T
        resid = kerb - v @ (v.T @ kerb)
        qq, _, _ = sla.qr(resid, pivoting=True)
        v = np.hstack([v, qq[:, :dim - filled]])
        filled = dim
    nlev = len(levels)
    if nlev > 1:
        d_last = levels[-1]
        d_prev = levels[-2]
        j0 = k - d_last
        i0 = j0 - d_prev
        r = v.T @ nhat @ v
        if d_last > 1:
            # strongest chain direction last within the deepest block
            _, _, vt = sla.svd(r[:j0, j0:])
            v[:, j0:] = v[:, j0:] @ vt.T[:, ::-1]
            r = v.T @ nhat @ v
        if d_prev > 1:
            row = r[i0:j0, k - 1].copy()
            nrm = np.linalg.norm(row)
            if nrm > 0:
                w = row / nrm
                target = np.zeros(d_prev)
                target[-1] = 1.0
                uvec = w - target
                if np.linalg.norm(uvec) > 1e-14:
                    uvec /= np.linalg.norm(uvec)
                    hh = np.eye(d_prev) - 2.0 * np.outer(uvec, uvec)
                    v[:, i0:j0] = v[:, i0:j0] @ hh
    u, _ = sla.qr(s_inf @ v)
    return u, v


def _grsf_fin_inf(a, e, atol):
    """GRSF with finite eigenvalues leading and the infinite structure
    trailing in tail form.  Returns (s, t, q, z, nf, layers)."""
    n = a.shape[0]
    q, z, s, t, inf_r, inf_c, nus, _ = _p2_local(a, e, atol)
    if inf_r != inf_c:
        raise PencilError("pole pencil is singular")
    nf = n - inf_r
    if nf > 0:
        gs = generalized_schur(s[:nf, :nf], t[:nf, :nf])
        s[:nf, :nf] = gs.s
        t[:nf, :nf] = gs.t
        s[:nf, nf:] = gs.q.T @ s[:nf, nf:]
        t[:nf, nf:] = gs.q.T @ t[:nf, nf:]
        q[:, :nf] = q[:, :nf] @ gs.q
        z[:, :nf] = z[:, :nf] @ gs.z
    if inf_r > 0:
        u2, v2 = _inf_tail_form(s[nf:, nf:], t[nf:, nf:], nus, atol)
        s[nf:, nf:] = u2.T @ s[nf:, nf:] @ v2
        t[nf:, nf:] = u2.T @ t[nf:, nf:] @ v2
        s[:nf, nf:] = s[:nf, nf:] @ v2
        t[:nf, nf:] = t[:nf, nf:] @ v2
        q[:, nf:] = q[:, nf:] @ u2
        z[:, nf:] = z[:, nf:] @ v2
        s[nf:, nf:] = np.triu(s[nf:, nf:])
        t[nf:, nf:] = np.triu(t[nf:, nf:], 1)
    return s, t, q, z, nf, [d for d in nus if d > 0]


def _grsf_inf_first(a, e, atol):
    """GRSF with the infinite structure leading and the finite part
    quasi-triangular trailing.  Returns (s, t, q, z, ninf)."""
    n = a.shape[0]
    q, z, s, t, inf_r, inf_c, _, _ = _p1_local(a, e, atol)
    if inf_r != inf_c:
        raise PencilError("pole pencil is singular")
    nf = n - inf_r
    if nf > 0:
        gs = generalized_schur(s[inf_r:, inf_r:], t[inf_r:, inf_r:])
        s[inf_r:, inf_r:] = gs.s
        t[inf_r:, inf_r:] = gs.t
        s[:inf_r, inf_r:] = s[:inf_r, inf_r:] @ gs.z
        t[:inf_r, inf_r:] = t[:inf_r, inf_r:] @ gs.z
        q[:, inf_r:] = q[:, inf_r:] @ gs.q
        z[:, inf_r:] = z[:, inf_r:] @ gs.z
    if inf_r > 0:
        qk, _ = sla.qr(s[:inf_r, :inf_r])
        s[:inf_r, :] = qk.T @ s[:inf_r, :]
        t[:inf_r, :] = qk.T @ t[:inf_r, :]
        q[:, :inf_r] = q[:, :inf_r] @ qk
        s[:inf_r, :inf_r] = np.triu(s[:inf_r, :inf_r])
        t[:inf_r, :inf_r] = np.triu(t[:inf_r, :inf_r], 1)
    return s, t, q, z, inf_r


# ---------------------------------------------------------------------------
# elementary dislocation steps


def _infinite_pole_step(s, t, bt, w, target, atol):
    """Feedback on the last window column dislocating one infinite pole
    of the trailing chain to the finite real ``target``.

    The trailing w x w window has triangular S and T with only its first
    row nonzero; the determinant of the closed-loop window pencil is then
    linear in lambda and linear in the feedback column.
    """
    n = s.shape[0]
    sw = s[n - w:, n - w:]
    tw = t[n - w:, n - w:]
    bw = bt[n - w:, :]
    m = bw.shape[1]

    def detpair(u):
        mm = sw.copy()
        mm[:, -1] = mm[:, -1] + u
        d0 = np.linalg.det(mm)
        dl = 0.0
        for j in range(1, w):
            if tw[0, j] == 0.0:
                continue
            minor = np.delete(np.delete(mm, 0, axis=0), j, axis=1)
            cof = (-1.0) ** (1 + j) * np.linalg.det(minor)
            dl -= tw[0, j] * cof
        return d0, dl

    a0, l0 = detpair(np.zeros(w))
    acol = np.zeros(w)
    lcol = np.zeros(w)
    for i in range(w):
        ei = np.zeros(w)
        ei[i] = 1.0
        ai, li = detpair(ei)
        acol[i] = ai - a0
        lcol[i] = li - l0
    # det(lam) = (a0 + a.u) + lam (l0 + l.u), u = bw f; root at target
    coef = (acol + float(target) * lcol) @ bw
    rhs = -(a0 + float(target) * l0)
    scale = max(abs(a0), abs(l0), np.linalg.norm(acol),
                np.linalg.norm(lcol), 1.0)
    if np.linalg.norm(coef) <= 1e4 * EPS * scale:
        return None
    f, *_ = np.linalg.lstsq(coef.reshape(1, -1), np.array([rhs]),
                            rcond=None)
    fk = np.zeros((m, w))
    fk[:, -1] = f
    return fk


def _inner_feedback(s_w, t_w, b_w, discrete):
    """Riccati feedback (plus input scaling in discrete time) reflecting
    the trailing block across the stability boundary, inner factor."""
    k = s_w.shape[0]
    m = b_w.shape[1]
    c0 = np.zeros((m, k))
    d0 = np.eye(m)
    try:
        if discrete:
            x, f, _ = solve_gdare(s_w, t_w, b_w, c0, d0)
            h = sla.cholesky(np.eye(m) + b_w.T @ x @ b_w, lower=False)
            v = sla.solve_triangular(h, np.eye(m))
        else:
            x, f, _ = solve_gcare(s_w, t_w, b_w, c0, d0)
            v = None
    except RiccatiError as exc:
        raise FactorizationError("pole cannot be reflected: %s" % exc)
    return f, v


def _elementary_innerize(m_e):
    """Constant input transformation making an elementary factor inner
    (its poles/zeros are boundary reflections by construction)."""
    lam = np.exp(0.7853j) if m_e.is_discrete else 0.7853j
    val = eval_freq(m_e, lam)
    gram = np.real(val.conj().T @ val)
    gram = 0.5 * (gram + gram.T)
    try:
        r = sla.cholesky(gram, lower=False)
        return sla.solve_triangular(r, np.eye(gram.shape[0]))
    except sla.LinAlgError:
        return None


# ---------------------------------------------------------------------------
# the dislocation recursion


def _dislocate(sys, select_bad, pool, inner=False, tol=0.0,
               dislocate_inf=True):
    """Right factorization core G = N M^{-1}; returns (N, M, naf).

    ``select_bad`` flags the finite poles to dislocate; infinite poles
    are dislocated first (to pool targets, or to the origin for inner
    discrete-time factors).  With ``inner`` every elementary factor is
    inner, making M inner.
    """
    n = sys.order
    m = sys.shape[1]
    discrete = sys.is_discrete
    a, e, b, c, d = sys.a, sys.e, sys.b, sys.c, sys.d
    scale = max(np.linalg.norm(a), np.linalg.norm(e), 1.0)
    atol = max(tol, n * EPS * 100) * scale
    f_acc = np.zeros((m, n))
    v_acc = np.eye(m)
    naf = 0

    if dislocate_inf and n > 0:
        ks = kronecker_structure(a, e, tol)
        n_steps = sum(dd - 1 for dd in ks["inf_divisors"])
        for _ in range(n_steps):
            a_cur = a + b @ f_acc
            b_cur = b @ v_acc
            s, t, q, z, nf, layers = _grsf_fin_inf(a_cur, e, atol)
            if len(layers) < 2:
                raise FactorizationError(
                    "infinite pole structure could not be exposed")
            w = layers[-1] + 1
            bt = q.T @ b_cur
            target = 0.0 if inner else pool.real_target(None)
            fk = _infinite_pole_step(s, t, bt, w, target, atol)
            if fk is None:
                raise FactorizationError(
                    "infinite pole is not dislocatable (realization is "
                    "not infinite controllable)")
            vk = None
            if inner:
                s_cl = s[n - w:, n - w:] + bt[n - w:, :] @ fk
                m_e = DescriptorSystem(s_cl, t[n - w:, n - w:],
                                       bt[n - w:, :], fk, np.eye(m),
                                       sys.ts)
                vk = _elementary_innerize(m_e)
            fk_full = np.zeros((m, n))
            fk_full[:, n - w:] = fk
            f_acc = f_acc + v_acc @ (fk_full @ z.T)
            if vk is not None:
                v_acc = v_acc @ vk
            naf += 1

    # finite phase: infinite structure leading, finite trailing
    a_cur = a + b @ f_acc
    b_cur = b @ v_acc
    s, t, q, z, ninf = _grsf_inf_first(a_cur, e, atol)
    s, t, qq, zz, _ = _order_pair_sub(s, t, ninf,
                                      lambda x: np.isinf(x) or
                                      not select_bad(x))
    q = q @ qq
    z = z @ zz
    guard = 0
    while guard <= 2 * n + 4:
        guard += 1
        bt = q.T @ b_cur
        lam = eig_from_pairs(*eigvals_pair(s, t))
        bad = [st for st in _grsf_block_starts(s)
               if (not np.isinf(lam[st])) and select_bad(lam[st])]
        if not bad:
            break
        st = bad[-1]
        k = 2 if (st + 1 < n and s[st + 1, st] != 0.0) else 1
        if st + k < n:
            s, t, q, z = _move_block(s, t, q, z, st, n - k)
            continue
        s_w = s[st:, st:]
        t_w = t[st:, st:]
        b_w = bt[st:, :]
        if inner:
            fk, vk = _inner_feedback(s_w, t_w, b_w, discrete)
        else:
            tgt = pool.real_target(lam[st]) if k == 1 else \
                pool.pair_target(lam[st])
            fk = _assign_block(s_w, t_w, b_w, tgt)
            vk = None
            if fk is None:
                raise FactorizationError(
                    "pole at %s is not dislocatable (not stabilizable "
                    "with respect to the good region)" % lam[st])
        fk_full = np.zeros((m, n))
        fk_full[:, st:] = fk
        s = s + bt @ fk_full
        f_acc = f_acc + v_acc @ (fk_full @ z.T)
        gs2 = generalized_schur(s[st:, st:], t[st:, st:])
        s[st:, st:] = gs2.s
        t[st:, st:] = gs2.t
        s[:st, st:] = s[:st, st:] @ gs2.z
        t[:st, st:] = t[:st, st:] @ gs2.z
        q[:, st:] = q[:, st:] @ gs2.q
        z[:, st:] = z[:, st:] @ gs2.z
        if vk is not None:
            v_acc = v_acc @ vk
        naf += k

    bv = q.T @ (b @ v_acc)
    ft = f_acc @ z
    n_sys = DescriptorSystem(s, t, bv, c @ z + d @ ft, d @ v_acc, sys.ts)
    m_sys = DescriptorSystem(s, t, bv, ft, v_acc, sys.ts)
    return n_sys, m_sys, naf


def _order_pair_sub(s, t, k0, select):
    """Order the trailing GRSF block (positions k0:) so the selected
    eigenvalues of that block lead within it."""
    n = s.shape[0]
    if n == k0:
        return s, t, np.eye(n), np.eye(n), 0
    sf, tf, qf, zf, nsel = _order_pair(s[k0:, k0:], t[k0:, k0:], select)
    s = s.copy()
    t = t.copy()
    s[k0:, k0:] = sf
    t[k0:, k0:] = tf
    s[:k0, k0:] = s[:k0, k0:] @ zf
    t[:k0, k0:] = t[:k0, k0:] @ zf
    q = np.eye(n)
    z = np.eye(n)
    q[k0:, k0:] = qf
    z[k0:, k0:] = zf
    return s, t, q, z, nsel


# ---------------------------------------------------------------------------
# public factorizations


def _finish_pair(nsys, msys, naf, mindeg, mininf, tol):
    if mindeg:
        msys = irreducible(msys, tol)
    if mininf:
        nsys = minreal(nsys, tol, ndm_only=True)[0]
        msys = minreal(msys, tol, ndm_only=True)[0]
    return FactorPair(nsys, msys, {"naf": naf})


def coprime(side, sys, tol=0.0, smarg=None, sdeg=None, poles=None,
            mindeg=False, mininf=False):
    """Coprime factorization with proper factors over a stability region.

    side='right': G = N M^{-1}; side='left': G = M^{-1} N (computed on
    the permuted dual).  Finite poles outside the region set by ``smarg``
    and all infinite poles are moved to ``poles`` / ``sdeg`` (infinite
    ones first, to the real values of ``poles``).

    Returns a FactorPair (N, M) with both pole pencils in GRSF.
    """
    if side == "left":
        pr = coprime("right", dual(sys), tol=tol, smarg=smarg,
                     sdeg=sdeg, poles=poles, mindeg=mindeg, mininf=mininf)
        return FactorPair(dual(pr.first), dual(pr.second), pr.info)
    if side != "right":
        raise ValueError("side must be 'right' or 'left'")
    discrete = sys.is_discrete
    if smarg is None:
        smarg = 1.0 - np.sqrt(EPS) if discrete else -np.sqrt(EPS)
    sdeg_eff = sdeg
    if sdeg is None and poles is None:
        sdeg_eff = 0.2 if discrete else -0.2
    pool = _TargetPool(poles, sdeg_eff, discrete)

    def bad(lam):
        return _classify(lam, discrete, smarg, 0.0) > 0

    nsys, msys, naf = _dislocate(sys, bad, pool, inner=False, tol=tol)
    return _finish_pair(nsys, msys, naf, mindeg, mininf, tol)


def coprime_inner_den(side, sys, tol=0.0, mindeg=False, mininf=False,
                      offset=DEFAULT_OFFSET):
    """Coprime factorization with an inner denominator.

    Unstable poles are reflected across the stability boundary; poles on
    the boundary (within ``offset``) are rejected.  In continuous time an
    improper system is rejected (its poles at infinity lie on the
    boundary); in discrete time infinite poles are reflected into the
    origin.
    """
    if side == "left":
        pr = coprime_inner_den("right", dual(sys), tol=tol,
                               mindeg=mindeg, mininf=mininf, offset=offset)
        return FactorPair(dual(pr.first), dual(pr.second), pr.info)
    if side != "right":
        raise ValueError("side must be 'right' or 'left'")
    discrete = sys.is_discrete
    lam_all = eig_from_pairs(*eigvals_pair(sys.a, sys.e))
    for lam in lam_all:
        if np.isinf(lam):
            continue
        if _classify(lam, discrete, 1.0 if discrete else 0.0,
                     offset) == 0:
            raise FactorizationError("pole on the stability boundary")
    if not discrete:
        from .analysis import poles as _poles
        if _poles(irreducible(sys, tol), tol=tol).nip > 0:
            raise FactorizationError("improper continuous-time system: "
                                     "poles at infinity lie on the "
                                     "boundary")

    def bad(lam):
        return _classify(lam, discrete, 1.0 if discrete else 0.0,
                         offset) > 0

    pool = _TargetPool(None, 0.0 if discrete else -1.0, discrete)
    nsys, msys, naf = _dislocate(sys, bad, pool, inner=True, tol=tol,
                                 dislocate_inf=discrete)
    return _finish_pair(nsys, msys, naf, mindeg, mininf, tol)


def _standard_inner_outer(sys, balance=True):
    """Inner-outer factorization in the standard case: full column rank,
    no boundary zeros, invertible E.

    Returns (gi, go, info) with gi inner (same column count as sys) and
    go square invertible minimum phase.
    """
    a, e, b, c, d = sys.a, sys.e, sys.b, sys.c, sys.d
    een = None if sys.has_identity_e else e
    if sys.is_discrete:
        x, f, rez = solve_gdare(a, sys.e, b, c, d)
        h = sla.cholesky(d.T @ d + b.T @ x @ b, lower=False)
    else:
        x, f, rez = solve_gcare(a, sys.e, b, c, d)
        h = sla.cholesky(d.T @ d, lower=False)
    hinv = sla.solve_triangular(h, np.eye(h.shape[0]))
    gi = DescriptorSystem(a + b @ f, een, b @ hinv, c + d @ f, d @ hinv,
                          sys.ts)
    go = DescriptorSystem(a, een, b, -h @ f, h, sys.ts)
    info = {"ricrez": rez, "_xs": x, "_f": f, "_h": h}
    return gi, go, info


def _inner_complement(sys, info):
    """Complementary inner factor of the standard-problem inner factor;
    None when the inner factor is already square."""
    a, e, b, c, d = sys.a, sys.e, sys.b, sys.c, sys.d
    x = info["_xs"]
    f = info["_f"]
    h = info["_h"]
    p, m = sys.shape
    if p == m:
        return None
    hinv = sla.solve_triangular(h, np.eye(m))
    dh = d @ hinv
    u, _, _ = sla.svd(dh, full_matrices=True)
    dperp = u[:, m:]
    een = None if sys.has_identity_e else e
    if not sys.is_discrete:
        xp = np.linalg.pinv(x, rcond=1e-10)
        y = -xp @ sla.solve(e.T, c.T @ dperp)
        return DescriptorSystem(a + b @ f, een, y, c + d @ f, dperp,
                                sys.ts)
    # discrete: A'X Y + C'W = 0, B'X Y + D'W = 0, W'W + Y'X Y = I
    n = a.shape[0]
    k = p - m
    mat = np.block([[a.T @ x, c.T], [b.T @ x, d.T]])
    ns = sla.null_space(mat, rcond=1e-10)
    if ns.shape[1] < k:
        return None
    metric = sla.block_diag(0.5 * (x + x.T), np.eye(p))
    gram = ns.T @ metric @ ns
    w_, v_ = sla.eigh(gram)
    order = np.argsort(w_)[::-1][:k]
    basis = ns @ v_[:, order] / np.sqrt(w_[order])[None, :]
    return DescriptorSystem(a + b @ f, een, basis[:n, :], c + d @ f,
                            basis[n:, :], sys.ts)


def inner_outer(sys, side="io", tol=0.0, offset=DEFAULT_OFFSET,
                minphase=True, balance=True):
    """Extended inner--(quasi-)outer (side='io') or co-outer--coinner
    (side='oi') factorization of a general rational matrix.

    Returns (inner_sq, outer, info): ``inner_sq`` is square inner whose
    leading r columns (rows for 'oi') compose with ``outer`` to G; with
    ``minphase`` the outer factor keeps only zeros in the closed stable
    region, otherwise it keeps all zeros of G.
    """
    from .nullrange import range_basis
    from .system import row_concat
    if side == "oi":
        gi_sq, go, info = inner_outer(dual(sys), side="io", tol=tol,
                                      offset=offset, minphase=minphase,
                                      balance=balance)
        return dual(gi_sq), dual(go), info
    if side != "io":
        raise ValueError("side must be 'io' or 'oi'")
    if minphase:
        zsel = "s-unstable" if sys.is_discrete else "unstable"
    else:
        zsel = "none"
    r, x, info = range_basis("image", sys, tol=tol, offset=offset,
                             zeros=zsel, inner=True, balance=balance)
    arg = info.pop("_inner_arg", None)
    iof = info.pop("_iof_info", None)
    comp = _inner_complement(arg, iof) if arg is not None else None
    gi = r if comp is None else row_concat(r, comp)
    return gi, x, info


def normalized_coprime(side, sys, tol=0.0, ss=False, balance=True):
    """Normalized coprime factorization.

    side='right': G = N M^{-1} with [N; M] inner; side='left':
    G = M^{-1} N with [N, M] coinner.  Both factors are stable.
    """
    from .nullrange import range_basis
    from .system import col_concat, subsystem
    if side == "left":
        pr = normalized_coprime("right", dual(sys), tol=tol, ss=ss,
                                balance=balance)
        return FactorPair(dual(pr.first), dual(pr.second), pr.info)
    if side != "right":
        raise ValueError("side must be 'right' or 'left'")
    p, m = sys.shape
    eye = static_gain(np.eye(m), sys.ts)
    stacked = col_concat(sys, eye)
    r, x, info = range_basis("image", stacked, tol=tol,
                             zeros="s-unstable" if sys.is_discrete
                             else "unstable",
                             inner=True, balance=balance)
    info.pop("_inner_arg", None)
    info.pop("_iof_info", None)
    nfac = subsystem(r, rows=np.arange(p))
    mfac = subsystem(r, rows=np.arange(p, p + m))
    if ss:
        nfac = to_standard(minreal(nfac, tol)[0], tol, "ident")[0]
        mfac = to_standard(minreal(mfac, tol)[0], tol, "ident")[0]
    return FactorPair(nfac, mfac, info)


def spectral_factor_gamma(side, sys, gamma, tol=0.0, stabilize=True):
    """Stable minimum-phase spectral factor F.

    side='right': gamma^2 I - G~ G = F~ F; side='left':
    gamma^2 I - G G~ = F F~.  Requires gamma > ||G||inf and no poles on
    the stability boundary.
    """
    from .norms import linf_norm
    if side == "right":
        f = spectral_factor_gamma("left", dual(sys), gamma, tol=tol,
                                  stabilize=stabilize)
        return dual(f)
    if side != "left":
        raise ValueError("side must be 'left' or 'right'")
    gnorm, _ = linf_norm(sys)
    if gamma <= gnorm:
        raise ValueError("gamma must exceed the L-infinity norm "
                         "(%.6g)" % gnorm)
    if stabilize:
        pr = coprime_inner_den("right", sys, tol=tol, mininf=True)
        work = minreal(pr.first, tol)[0]
    else:
        work = minreal(sys, tol)[0]
    if not work.has_identity_e:
        work = to_standard(work, tol, "ident")[0]
    a, b, c, d = work.a, work.b, work.c, work.d
    p = work.shape[0]
    if work.is_discrete:
        rd = gamma ** 2 * np.eye(p) - d @ d.T
        y, rez = _filter_riccati_disc(a, b, c, d, rd)
        r = rd - c @ y @ c.T
        ks = (a @ y @ c.T + b @ d.T) @ sla.inv(r)
    else:
        r = gamma ** 2 * np.eye(p) - d @ d.T
        y, rez = _filter_riccati_cont(a, b, c, d, r)
        ks = (y @ c.T + b @ d.T) @ sla.inv(r)
    rhalf = sla.cholesky(0.5 * (r + r.T), lower=True)
    return DescriptorSystem(a, None, -ks @ rhalf, c, rhalf, work.ts)


def _filter_riccati_cont(a, b, c, d, r):
    """Stabilizing Y of
    A Y + Y A' + (Y C' + B D') R^{-1} (C Y + D B') + B B' = 0."""
    n = a.shape[0]
    p = c.shape[0]
    big_m = np.block([
        [a.T, np.zeros((n, n)), c.T],
        [b @ b.T, a, b @ d.T],
        [d @ b.T, c, -r],
    ])
    big_n = np.block([
        [np.eye(n), np.zeros((n, n + p))],
        [np.zeros((n, n)), np.eye(n), np.zeros((n, p))],
        [np.zeros((p, 2 * n + p))],
    ])
    zv = _stable_deflating(big_m, big_n, n, discrete=False)
    z11 = zv[:n, :]
    z21 = zv[n:2 * n, :]
    y = np.real(sla.solve(z11.T, z21.T).T)
    y = 0.5 * (y + y.T)
    res = a @ y + y @ a.T + (y @ c.T + b @ d.T) @ sla.solve(
        r, c @ y + d @ b.T) + b @ b.T
    rez = np.linalg.norm(res) / (1.0 + np.linalg.norm(y))
    if rez > 1e-6:
        raise RiccatiError("spectral-factor Riccati residual %.2e" % rez)
    return y, rez


def _filter_riccati_disc(a, b, c, d, rd):
    """Stabilizing Y of
    A Y A' - Y - (A Y C' + B D')(-R_D + C Y C')^{-1}(C Y A' + D B')
    + B B' = 0."""
    n = a.shape[0]
    p = c.shape[0]
    big_m = np.block([
        [a.T, np.zeros((n, n)), c.T],
        [-b @ b.T, np.eye(n), -b @ d.T],
        [-d @ b.T, np.zeros((p, n)), rd],
    ])
    big_n = np.block([
        [np.eye(n), np.zeros((n, n + p))],
        [np.zeros((n, n)), a, np.zeros((n, p))],
        [np.zeros((p, n)), c, np.zeros((p, p))],
    ])
    zv = _stable_deflating(big_m, big_n, n, discrete=True)
    z11 = zv[:n, :]
    z21 = zv[n:2 * n, :]
    y = np.real(sla.solve(z11.T, z21.T).T)
    y = 0.5 * (y + y.T)
    res = a @ y @ a.T - y - (a @ y @ c.T + b @ d.T) @ sla.solve(
        -rd + c @ y @ c.T, c @ y @ a.T + d @ b.T) + b @ b.T
    rez = np.linalg.norm(res) / (1.0 + np.linalg.norm(y))
    if rez > 1e-6:
        raise RiccatiError("spectral-factor Riccati residual %.2e" % rez)
    return y, rez
