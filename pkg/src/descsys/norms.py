"""Frequency-domain norms of descriptor systems.

The L-infinity norm uses the standard level-set bisection on the
stability boundary driven by imaginary-axis eigenvalue tests of a
Hamiltonian matrix; discrete-time (and improper discrete-time) systems
are mapped to continuous time by a bilinear transformation first.
"""

import numpy as np
import scipy.linalg as sla

from .linalg import EPS
from .matrixeq import SolverError, gramians
from .reduction import minreal, to_standard
from .system import eval_freq

__all__ = ["linf_norm", "h2_norm", "NormUnboundedError"]


class NormUnboundedError(SolverError):
    """The requested norm is infinite (boundary poles or improperness)."""


def _sigma_max(sys, w):
    lam = 1j * w if not sys.is_discrete else np.exp(1j * w)
    val = eval_freq(sys, lam)
    if val.size == 0:
        return 0.0
    return sla.svd(val, compute_uv=False)[0]


def _ct_linf(sys, reltol):
    """Level-set algorithm for a continuous-time standard system."""
    a, b, c, d = sys.a, sys.b, sys.c, sys.d
    n = a.shape[0]
    if n == 0:
        sv = sla.svd(d, compute_uv=False) if d.size else np.zeros(1)
        return float(sv[0] if sv.size else 0.0), 0.0
    lam = np.linalg.eigvals(a)
    if np.any(np.abs(lam.real) <= 1e-10 * np.maximum(1.0, np.abs(lam))):
        raise NormUnboundedError("poles on the imaginary axis")
    # initial lower bound from structured frequency samples
    ws = [0.0]
    for x in lam:
        if abs(x.imag) > 1e-12:
            ws.append(abs(x.imag))
        ws.append(abs(x))
    ws.append(1e6)
    glb = 0.0
    wpeak = 0.0
    for w in ws:
        s = _sigma_max_ct(a, b, c, d, w)
        if s > glb:
            glb, wpeak = s, w
    dsv = sla.svd(d, compute_uv=False) if d.size else np.zeros(1)
    dnorm = float(dsv[0]) if dsv.size else 0.0
    if dnorm > glb:
        glb, wpeak = dnorm, np.inf
    if glb == 0.0:
        return 0.0, 0.0
    m = b.shape[1]
    for _ in range(60):
        gam = glb * (1.0 + 2.0 * reltol)
        r = gam ** 2 * np.eye(m) - d.T @ d
        try:
            ri = sla.inv(r)
        except sla.LinAlgError:
            glb = gam
            continue
        h11 = a + b @ ri @ d.T @ c
        h12 = b @ ri @ b.T
        h21 = -c.T @ (np.eye(c.shape[0]) + d @ ri @ d.T) @ c
        ham = np.block([[h11, h12], [h21, -h11.T]])
        ev = np.linalg.eigvals(ham)
        scale = max(1.0, np.max(np.abs(ev)))
        imag_ev = sorted(x.imag for x in ev
                         if abs(x.real) <= 1e-8 * scale and x.imag > 0)
        if not imag_ev:
            return glb * (1.0 + reltol), wpeak
        cand = []
        for i in range(len(imag_ev) - 1):
            cand.append(0.5 * (imag_ev[i] + imag_ev[i + 1]))
        if len(imag_ev) == 1:
            cand.append(imag_ev[0])
        improved = False
        for w in cand:
            s = _sigma_max_ct(a, b, c, d, w)
            if s > glb:
                glb, wpeak = s, w
                improved = True
        if not improved:
            return glb * (1.0 + reltol), wpeak
    return glb, wpeak


def _sigma_max_ct(a, b, c, d, w):
    n = a.shape[0]
    try:
        x = sla.solve(1j * w * np.eye(n) - a, b.astype(complex))
    except sla.LinAlgError:
        return np.inf
    val = c @ x + d
    if val.size == 0:
        return 0.0
    return sla.svd(val, compute_uv=False)[0]


def linf_norm(sys, reltol=1e-6):
    """L-infinity norm of the transfer-function matrix.

    Returns (norm, fpeak); fpeak is a frequency in rad/s (continuous
    time) or an angle in [0, pi] (discrete time).  Raises
    NormUnboundedError for boundary poles (including improper
    continuous-time systems).
    """
    work = minreal(sys, 0.0)[0]
    if work.is_discrete:
        from .solvers import bilinear
        # z = (1 + s)/(1 - s) maps the open left half-plane onto the
        # open unit disk; infinite poles go to s = -1
        wct, _ = bilinear(work, (1.0, 1.0, -1.0, 1.0), minimal=True,
                          ts_out=0.0)
        gam, wp = linf_norm(wct, reltol)
        fpeak = np.pi if np.isinf(wp) else 2.0 * np.arctan(wp)
        return gam, fpeak
    try:
        work, _ = to_standard(work, 0.0, "ident")
    except SolverError:
        raise NormUnboundedError("improper continuous-time system")
    return _ct_linf(work, reltol)


def _as_ct(sys):
    from .system import DescriptorSystem
    return DescriptorSystem(sys.a, None if sys.has_identity_e else sys.e,
                            sys.b, sys.c, sys.d, 0.0)


def h2_norm(sys):
    """H2 norm of a stable system (strictly proper in continuous time)."""
    from .analysis import poles as _poles
    work = minreal(sys, 0.0)[0]
    rep = _poles(work)
    if not rep.proper:
        raise NormUnboundedError("system has infinite poles")
    if rep.nfuev + rep.nfsbev > 0:
        raise NormUnboundedError("system is unstable")
    if not work.has_identity_e:
        work, _ = to_standard(work, 0.0, "triu")
    if not work.is_discrete and np.linalg.norm(work.d) > 0:
        raise NormUnboundedError("continuous-time system is not strictly "
                                 "proper")
    n = work.order
    if n == 0:
        return float(np.linalg.norm(work.d))
    gp = gramians(work.a, work.e if not work.has_identity_e else None,
                  work.b, work.c, discrete=work.is_discrete)
    val = float(np.trace(work.c @ gp.p @ work.c.T))
    if work.is_discrete:
        val += float(np.trace(work.d @ work.d.T))
    return float(np.sqrt(max(val, 0.0)))
