"""Structural analysis of descriptor systems.

Pole and zero reports are derived from the Kronecker structure of the
pole pencil ``A - lam E`` and of the system matrix pencil
``[[A - lam E, B], [C, D]]``.  Infinite poles/zeros are reported as
complex infinities; rank deficiencies of a singular pole pencil yield
NaN entries.
"""

import numpy as np
import scipy.linalg as sla

from .linalg import EPS, eig_from_pairs, eigvals_pair
from .matrixeq import SolverError, gramians
from .pencils import klf, _classify
from .reduction import minreal, to_standard
from .system import DEFAULT_OFFSET, eval_freq, freq_samples

__all__ = [
    "PoleReport",
    "ZeroReport",
    "poles",
    "zeros",
    "normal_rank",
    "hankel_norm",
    "nugap",
    "mcmillan_degree",
]


class _StructReport:
    def __init__(self, **kw):
        self.__dict__.update(kw)

    def __repr__(self):
        keys = sorted(self.__dict__)
        return "%s(%s)" % (type(self).__name__, ", ".join(
            "%s=%r" % (k, self.__dict__[k]) for k in keys))


class PoleReport(_StructReport):
    """Eigenvalue/Kronecker data of the pole pencil; see :func:`poles`."""


class ZeroReport(_StructReport):
    """Eigenvalue/Kronecker data of the system pencil; see :func:`zeros`."""


def _pencil_structure(m, n, tol, discrete, offset):
    res = klf(m, n, tol=tol, variant="standard", accumulate_q=False)
    rows = sum(res.mr)
    cols = sum(res.nr)
    ninf = sum(res.minf)
    i0, j0 = rows + ninf, cols + ninf
    af = res.at[i0:i0 + res.mf, j0:j0 + res.mf]
    ef = res.et[i0:i0 + res.mf, j0:j0 + res.mf]
    fin = eig_from_pairs(*eigvals_pair(af, ef))
    fin = fin[np.argsort(fin.real + 1e-9 * np.abs(fin.imag))]
    divisors = res.inf_divisors
    kr = res.right_indices
    kl = res.left_indices
    nrank = rows + ninf + res.mf + sum(res.nl)
    cls = np.array([_classify(x, discrete, 1.0 if discrete else 0.0,
                              offset) for x in fin], dtype=int) \
        if fin.size else np.zeros(0, int)
    return {
        "finite": fin,
        "divisors": divisors,
        "kr": kr,
        "kl": kl,
        "nrank": nrank,
        "class": cls,
    }


def poles(sys, tol=0.0, offset=DEFAULT_OFFSET):
    """Pole report of a descriptor system.

    The entries of ``report.poles`` are the finite eigenvalues of the
    pole pencil, one infinity per infinite zero of the pencil (the
    infinite poles of the system), and NaN markers for the rank
    deficiency of a singular pole pencil.
    """
    st = _pencil_structure(sys.a, sys.e, tol, sys.is_discrete, offset)
    n = sys.order
    divisors = st["divisors"]
    niev = sum(divisors)
    nisev = sum(1 for d in divisors if d == 1)
    # one infinite pole of multiplicity d-1 per elementary block of size d
    nip = niev - len(divisors)
    miev = sorted(divisors)
    mip = _zero_multiplicity_table(divisors)
    nfev = st["finite"].size
    ndef = n - st["nrank"]
    vals = np.concatenate([
        st["finite"],
        np.full(nip, complex(np.inf)),
        np.full(ndef, complex(np.nan)),
    ])
    regular = (len(st["kr"]) == 0 and len(st["kl"]) == 0)
    proper = regular and nip == 0
    nfsev = int(np.count_nonzero(st["class"] < 0))
    nfsbev = int(np.count_nonzero(st["class"] == 0))
    nfuev = int(np.count_nonzero(st["class"] > 0))
    stable = proper and (nfuev + nfsbev == 0)
    return PoleReport(
        poles=vals, nfev=nfev, niev=niev, nisev=nisev, nip=nip,
        nfsev=nfsev, nfsbev=nfsbev, nfuev=nfuev,
        nhev=len(st["kr"]) + len(st["kl"]), nrank=st["nrank"],
        miev=miev, mip=mip, kr=st["kr"], kl=st["kl"],
        regular=regular, proper=proper, stable=stable)


def zeros(sys, tol=0.0, offset=DEFAULT_OFFSET):
    """Invariant zero report of a descriptor system."""
    n = sys.order
    p, m = sys.shape
    smat = np.block([[sys.a, sys.b], [sys.c, sys.d]])
    emat = np.block([[sys.e, np.zeros((n, m))], [np.zeros((p, n + m))]])
    st = _pencil_structure(smat, emat, tol, sys.is_discrete, offset)
    divisors = st["divisors"]
    niev = sum(divisors)
    nisev = sum(1 for d in divisors if d == 1)
    niz = niev - len(divisors)
    vals = np.concatenate([st["finite"], np.full(niz, complex(np.inf))])
    nfsz = int(np.count_nonzero(st["class"] < 0))
    nfsbz = int(np.count_nonzero(st["class"] == 0))
    nfuz = int(np.count_nonzero(st["class"] > 0))
    return ZeroReport(
        zeros=vals, nfz=st["finite"].size, niev=niev, nisev=nisev,
        niz=niz, nfsz=nfsz, nfsbz=nfsbz, nfuz=nfuz, nrank=st["nrank"],
        miev=sorted(divisors), miz=_zero_multiplicity_table(divisors),
        kr=st["kr"], kl=st["kl"],
        minphase=(nfuz == 0 and nfsbz == 0 and niz == 0))


def _zero_multiplicity_table(divisors):
    """mip[i-1] = number of infinite zeros of multiplicity i."""
    orders = [d - 1 for d in divisors if d > 1]
    if not orders:
        return []
    table = [0] * max(orders)
    for o in orders:
        table[o - 1] += 1
    return table


def normal_rank(sys, tol=0.0):
    """Normal rank of the transfer-function matrix.

    Computed structurally as rank S(lam) - n and cross-checked against
    the rank of two random frequency evaluations.
    """
    n = sys.order
    rep = zeros(sys, tol=tol)
    r_struct = rep.nrank - n
    r_probe = 0
    for lam in freq_samples(2, sys.ts, seed=97):
        try:
            val = eval_freq(sys, lam)
        except sla.LinAlgError:
            continue
        if val.size:
            sv = sla.svd(val, compute_uv=False)
            thresh = max(tol, np.sqrt(EPS)) * max(sv[0], 1.0)
            r_probe = max(r_probe, int(np.count_nonzero(sv > thresh)))
    return max(r_struct, r_probe) if r_struct != r_probe else r_struct


def mcmillan_degree(sys, tol=0.0):
    """Total pole count (finite and infinite, with multiplicities)."""
    rep = poles(minreal(sys, tol)[0], tol=tol)
    return rep.nfev + rep.nip


def hankel_norm(sys, tol=0.0):
    """Hankel norm and Hankel singular values of a stable proper system.

    Returns (norm, hsv).
    """
    work, _ = minreal(sys, tol)
    rep = poles(work, tol=tol)
    if not rep.proper:
        raise SolverError("system is improper")
    if rep.nfuev + rep.nfsbev > 0:
        raise SolverError("system is unstable")
    if not work.has_identity_e:
        work, _ = to_standard(work, tol, "triu")
    n = work.order
    if n == 0:
        return 0.0, np.zeros(0)
    gp = gramians(work.a, work.e if not work.has_identity_e else None,
                  work.b, work.c, discrete=work.is_discrete)
    hsv = sla.svd(gp.r @ work.e @ gp.s, compute_uv=False)
    return (float(hsv[0]) if hsv.size else 0.0), hsv


def nugap(sys1, sys2, tol=0.0, offset=DEFAULT_OFFSET):
    """nu-gap distance between two systems; returns (dist, fpeak).

    Computed from the normalized left coprime factorization of the
    second system and normalized right coprime factorizations of both,
    with the winding-number condition evaluated through the poles and
    zeros of an irreducible realization of R2~ R1.
    """
    from .factorizations import normalized_coprime
    from .norms import linf_norm
    from .system import col_concat, conjugate, row_concat, series

    if sys1.shape != sys2.shape or sys1.ts != sys2.ts:
        raise ValueError("systems must have equal dimensions and "
                         "sampling time")
    n1, m1 = normalized_coprime("right", sys1, tol=tol)
    n2, m2 = normalized_coprime("right", sys2, tol=tol)
    nl2, ml2 = normalized_coprime("left", sys2, tol=tol)
    r1 = col_concat(n1.first, n1.second)
    r2 = col_concat(n2.first, n2.second)
    h = minreal(series(conjugate(r2), r1), tol)[0]
    rep_p = poles(h, tol=tol, offset=offset)
    rep_z = zeros(h, tol=tol, offset=offset)
    # g = det(R2~ R1) must be nonzero on the boundary with zero winding
    mm = sys1.shape[1]
    if rep_z.nrank - h.order < mm:
        return 1.0, None
    if rep_z.nfsbz > 0:
        return 1.0, None
    discrete = sys1.is_discrete
    if discrete:
        nz_u = rep_z.nfuz + rep_z.niz
        np_u = rep_p.nfuev + rep_p.nip
    else:
        nz_u = rep_z.nfuz
        np_u = rep_p.nfuev
    if nz_u != np_u:
        return 1.0, None
    ltil = row_concat(ml2, _neg(nl2))
    err = minreal(series(ltil, r1), tol)[0]
    dist, fpeak = linf_norm(err)
    return min(dist, 1.0), fpeak


def _neg(sys):
    from .system import neg
    return neg(sys)
