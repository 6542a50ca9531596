"""Descriptor system representations of rational transfer-function matrices.

A descriptor system is the quadruple (A - lam*E, B, C, D) realizing

    G(lam) = C (lam*E - A)^{-1} B + D,

with lam the Laplace variable s for continuous-time systems (ts == 0) or
the Z-transform variable z for discrete-time systems (ts > 0).  E may be
singular; regularity of A - lam*E is assumed, not enforced.
"""

import numpy as np
import scipy.linalg as sla

__all__ = [
    "DescriptorSystem",
    "ToleranceConfig",
    "new_system",
    "eval_freq",
    "dual",
    "conjugate",
    "inverse",
    "series",
    "parallel",
    "row_concat",
    "col_concat",
    "subsystem",
    "neg",
]

EPS = np.finfo(float).eps

#: default stability-boundary offset beta (sqrt(eps) rounded as commonly used)
DEFAULT_OFFSET = 1.4901e-8


class ToleranceConfig:
    """Numerical policy knobs shared by the structural algorithms.

    Parameters
    ----------
    rank_tol : float
        Relative tolerance for rank decisions; 0 selects the internal
        default ``max(m, n) * eps`` (relative to the largest singular
        value).
    offset : float
        Stability-boundary offset beta: continuous-time eigenvalues with
        real part in [-beta, beta], or discrete-time eigenvalues with
        modulus in [1-beta, 1+beta], count as boundary eigenvalues.
    smarg : float or None
        Stability margin; None selects -sqrt(eps) in continuous time and
        1 - sqrt(eps) in discrete time.
    """

    def __init__(self, rank_tol=0.0, offset=DEFAULT_OFFSET, smarg=None):
        if rank_tol < 0:
            raise ValueError("rank_tol must be >= 0")
        if offset <= 0:
            raise ValueError("offset must be > 0")
        self.rank_tol = float(rank_tol)
        self.offset = float(offset)
        self.smarg = smarg

    def smarg_for(self, discrete):
        if self.smarg is not None:
            return float(self.smarg)
        return 1.0 - np.sqrt(EPS) if discrete else -np.sqrt(EPS)


def _mat(x, name):
    a = np.atleast_2d(np.asarray(x, dtype=float))
    if a.ndim != 2:
        raise ValueError("%s must be two-dimensional" % name)
    if not np.all(np.isfinite(a)):
        raise ValueError("%s has non-finite entries" % name)
    return a


class DescriptorSystem:
    """Immutable (A - lam*E, B, C, D) realization with a sampling time tag.

    ``e`` may be None, which marks the identity (a standard state-space
    system).  All matrices are copied and frozen on construction.
    """

    def __init__(self, a, e, b, c, d, ts=0.0):
        a = _mat(a, "a")
        b = _mat(b, "b")
        c = _mat(c, "c")
        d = _mat(d, "d")
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("a must be square")
        if e is not None:
            e = _mat(e, "e")
            if e.shape != (n, n):
                raise ValueError("e must match the order of a")
        if b.shape[0] != n and not (n == 0 and b.size == 0):
            raise ValueError("b must have as many rows as a")
        if n == 0:
            b = b.reshape(0, b.shape[1] if b.ndim == 2 else 0)
            c = c.reshape(c.shape[0] if c.ndim == 2 else 0, 0)
        if c.shape[1] != n and n > 0:
            raise ValueError("c must have as many columns as a")
        if d.shape != (c.shape[0], b.shape[1]):
            raise ValueError("d must be %d x %d" % (c.shape[0], b.shape[1]))
        if ts < 0:
            raise ValueError("sampling time must be >= 0")
        for m in (a, b, c, d):
            m.setflags(write=False)
        if e is not None:
            e.setflags(write=False)
        self._a, self._e, self._b, self._c, self._d = a, e, b, c, d
        self._ts = float(ts)

    a = property(lambda self: self._a)
    b = property(lambda self: self._b)
    c = property(lambda self: self._c)
    d = property(lambda self: self._d)
    ts = property(lambda self: self._ts)

    @property
    def e(self):
        """Descriptor matrix; identity is materialized on access."""
        if self._e is None:
            return np.eye(self.order)
        return self._e

    @property
    def has_identity_e(self):
        return self._e is None

    @property
    def order(self):
        return self._a.shape[0]

    @property
    def shape(self):
        """(outputs, inputs) of the transfer-function matrix."""
        return self._c.shape[0], self._b.shape[1]

    @property
    def is_discrete(self):
        return self._ts > 0

    def __repr__(self):
        kind = "discrete" if self.is_discrete else "continuous"
        return "DescriptorSystem(order=%d, outputs=%d, inputs=%d, %s)" % (
            self.order, self.shape[0], self.shape[1], kind)

    # Small conveniences used across the package; the full algebra lives in
    # module-level functions so that signatures stay explicit.
    def __add__(self, other):
        return parallel(self, _coerce(other, self))

    def __sub__(self, other):
        return parallel(self, neg(_coerce(other, self)))

    def __neg__(self):
        return neg(self)

    def __mul__(self, other):
        return series(_coerce(other, self), self)

    def __rmul__(self, other):
        return series(self, _coerce(other, self))


def _coerce(x, like):
    if isinstance(x, DescriptorSystem):
        return x
    d = np.atleast_2d(np.asarray(x, dtype=float))
    return static_gain(d, ts=like.ts)


def static_gain(d, ts=0.0):
    d = np.atleast_2d(np.asarray(d, dtype=float))
    return DescriptorSystem(np.zeros((0, 0)), None, np.zeros((0, d.shape[1])),
                            np.zeros((d.shape[0], 0)), d, ts)


def new_system(a, e, b, c, d, ts=0.0):
    """Construct a DescriptorSystem; ``e=None`` marks identity."""
    return DescriptorSystem(a, e, b, c, d, ts)


def eval_freq(sys, lam):
    """Evaluate the transfer-function matrix at the complex point ``lam``.

    Raises LinAlgError when ``lam*E - A`` is singular (lam is a pole).
    """
    n = sys.order
    if n == 0:
        return sys.d.astype(complex)
    m = lam * sys.e - sys.a
    x = sla.solve(m, np.asarray(sys.b, dtype=complex))
    return sys.c @ x + sys.d


def freq_samples(k, ts=0.0, seed=1234):
    """Reproducible probe frequencies on/near the stability boundary."""
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.3, 3.0, size=k)
    if ts > 0:
        return np.exp(1j * w)
    return 1j * w


def dual(sys):
    """Transpose of the transfer-function matrix, as a permuted dual.

    Uses the reversal permutation so a quasi-triangular pole pencil stays
    quasi-triangular: (P A^T P - lam P E^T P, P C^T, B^T P, D^T).
    """
    n = sys.order
    p = np.eye(n)[::-1]
    a = p @ sys.a.T @ p
    e = None if sys.has_identity_e else p @ sys.e.T @ p
    return DescriptorSystem(a, e, p @ sys.c.T, sys.b.T @ p, sys.d.T, sys.ts)


def conjugate(sys):
    """Conjugate system: G~(s) = G^T(-s), or G~(z) = G^T(1/z).

    In discrete time the result is the augmented descriptor realization
    coupling E^T - z A^T with an identity block; it usually carries
    non-dynamic modes which are not eliminated here.
    """
    n = sys.order
    p, m = sys.shape
    if not sys.is_discrete:
        a = -sys.a.T
        e = None if sys.has_identity_e else sys.e.T
        return DescriptorSystem(a, e, sys.c.T, -sys.b.T, sys.d.T, sys.ts)
    # z-domain: realization of G^T(1/z) with the pencil
    #   [ E^T - z A^T   0 ]      [ -C^T ]
    #   [    z B^T      I ] x  + [  D^T ] ...
    a = np.block([[sys.e.T, np.zeros((n, m))],
                  [np.zeros((m, n)), np.eye(m)]])
    e = np.block([[sys.a.T, np.zeros((n, m))],
                  [-sys.b.T, np.zeros((m, m))]])
    b = np.vstack([-sys.c.T, sys.d.T])
    c = np.hstack([np.zeros((m, n)), -np.eye(m)])
    d = np.zeros((m, p))
    return DescriptorSystem(a, e, b, c, d, sys.ts)


def inverse(sys, tol=0.0):
    """Realization of G^{-1} for square invertible G.

    Uses the compact formula when E is the identity marker and D is
    well-conditioned; otherwise the inversion-free augmented realization.
    """
    p, m = sys.shape
    if p != m:
        raise ValueError("only square transfer-function matrices can be "
                         "inverted")
    n = sys.order
    d = sys.d
    use_compact = False
    if sys.has_identity_e and m > 0:
        sv = sla.svd(d, compute_uv=False) if d.size else np.zeros(0)
        if sv.size and sv[-1] > max(1e-8, tol) * max(sv[0], 1.0):
            use_compact = True
    if use_compact:
        di = sla.inv(d)
        return DescriptorSystem(sys.a - sys.b @ di @ sys.c, None,
                                -sys.b @ di, di @ sys.c, di, sys.ts)
    a = np.block([[sys.a, sys.b], [sys.c, sys.d]])
    e = np.block([[sys.e, np.zeros((n, m))],
                  [np.zeros((m, n)), np.zeros((m, m))]])
    b = np.vstack([np.zeros((n, m)), np.eye(m)])
    c = np.hstack([np.zeros((m, n)), -np.eye(m)])
    return DescriptorSystem(a, e, b, c, np.zeros((m, m)), sys.ts)


def _check_ts(s1, s2):
    if s1.ts != s2.ts:
        raise ValueError("sampling times differ")


def series(sys1, sys2):
    """Realization of the product G1(lam) G2(lam) (sys2 feeds sys1)."""
    _check_ts(sys1, sys2)
    p2, m2 = sys2.shape
    p1, m1 = sys1.shape
    if m1 != p2:
        raise ValueError("inner dimensions do not compose")
    n1, n2 = sys1.order, sys2.order
    a = np.block([[sys1.a, sys1.b @ sys2.c],
                  [np.zeros((n2, n1)), sys2.a]])
    e = None
    if not (sys1.has_identity_e and sys2.has_identity_e):
        e = np.block([[sys1.e, np.zeros((n1, n2))],
                      [np.zeros((n2, n1)), sys2.e]])
    b = np.vstack([sys1.b @ sys2.d, sys2.b])
    c = np.hstack([sys1.c, sys1.d @ sys2.c])
    return DescriptorSystem(a, e, b, c, sys1.d @ sys2.d, sys1.ts)


def parallel(sys1, sys2):
    """Realization of the sum G1(lam) + G2(lam)."""
    _check_ts(sys1, sys2)
    if sys1.shape != sys2.shape:
        raise ValueError("shapes do not match")
    n1, n2 = sys1.order, sys2.order
    a = sla.block_diag(sys1.a, sys2.a)
    e = None
    if not (sys1.has_identity_e and sys2.has_identity_e):
        e = sla.block_diag(sys1.e, sys2.e)
    b = np.vstack([sys1.b, sys2.b])
    c = np.hstack([sys1.c, sys2.c])
    return DescriptorSystem(a, e, b, c, sys1.d + sys2.d, sys1.ts)


def row_concat(sys1, sys2):
    """Realization of [G1(lam)  G2(lam)] (inputs concatenated)."""
    _check_ts(sys1, sys2)
    if sys1.shape[0] != sys2.shape[0]:
        raise ValueError("output dimensions do not match")
    n1, n2 = sys1.order, sys2.order
    a = sla.block_diag(sys1.a, sys2.a)
    e = None
    if not (sys1.has_identity_e and sys2.has_identity_e):
        e = sla.block_diag(sys1.e, sys2.e)
    b = sla.block_diag(sys1.b, sys2.b)
    c = np.hstack([sys1.c, sys2.c])
    d = np.hstack([sys1.d, sys2.d])
    return DescriptorSystem(a, e, b, c, d, sys1.ts)


def col_concat(sys1, sys2):
    """Realization of [G1(lam); G2(lam)] (outputs stacked)."""
    _check_ts(sys1, sys2)
    if sys1.shape[1] != sys2.shape[1]:
        raise ValueError("input dimensions do not match")
    n1, n2 = sys1.order, sys2.order
    a = sla.block_diag(sys1.a, sys2.a)
    e = None
    if not (sys1.has_identity_e and sys2.has_identity_e):
        e = sla.block_diag(sys1.e, sys2.e)
    b = np.vstack([sys1.b, sys2.b])
    c = sla.block_diag(sys1.c, sys2.c)
    d = np.vstack([sys1.d, sys2.d])
    return DescriptorSystem(a, e, b, c, d, sys1.ts)


def subsystem(sys, rows=None, cols=None):
    """Select output rows / input columns of the transfer matrix."""
    p, m = sys.shape
    rows = np.arange(p) if rows is None else np.atleast_1d(rows)
    cols = np.arange(m) if cols is None else np.atleast_1d(cols)
    return DescriptorSystem(sys.a, sys._e, sys.b[:, cols],
                            sys.c[rows, :], sys.d[np.ix_(rows, cols)],
                            sys.ts)


def neg(sys):
    return DescriptorSystem(sys.a, sys._e, sys.b, -sys.c, -sys.d, sys.ts)
