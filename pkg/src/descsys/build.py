"""Construction of descriptor realizations from rational-function data.

Coefficient vectors follow the usual descending-power convention, e.g.
``[1, 0, -2]`` is ``lam**2 - 2``.  Improper entries are realized exactly by
splitting off the polynomial part into a nilpotent-E descriptor chain, so
arbitrary rational matrices can be entered without preliminary properness
checks.
"""

import numpy as np

from .system import DescriptorSystem, col_concat, row_concat, static_gain

__all__ = ["from_transfer", "from_rational_matrix"]


def _trim(p):
    p = np.atleast_1d(np.asarray(p, dtype=float)).ravel()
    nz = np.flatnonzero(np.abs(p) > 0)
    if nz.size == 0:
        return np.zeros(1)
    return p[nz[0]:]


def _strictly_proper_realization(num, den, ts):
    # controllable companion form of num/den with deg num < deg den
    den = _trim(den)
    n = den.size - 1
    if n == 0:
        return static_gain([[num[0] / den[0] if num.size else 0.0]], ts)
    monic = den / den[0]
    num = np.concatenate([np.zeros(n - num.size), num / den[0]])
    a = np.zeros((n, n))
    a[0, :] = -monic[1:]
    if n > 1:
        a[1:, :-1] = np.eye(n - 1)
    b = np.zeros((n, 1))
    b[0, 0] = 1.0
    c = num.reshape(1, n)
    return DescriptorSystem(a, None, b, c, np.zeros((1, 1)), ts)


def _polynomial_realization(q, ts):
    # exact descriptor realization of the polynomial q(lam), deg q = k >= 1
    q = _trim(q)
    k = q.size - 1
    if k == 0:
        return static_gain([[q[0]]], ts)
    nn = k + 1
    e = np.zeros((nn, nn))
    e[np.arange(nn - 1), np.arange(1, nn)] = 1.0
    a = np.eye(nn)
    b = np.zeros((nn, 1))
    b[-1, 0] = 1.0
    # (lam*E - A)^{-1} b = -sum_i lam^i e_{nn-i};  c picks the coefficients
    c = np.zeros((1, nn))
    qa = q[::-1]  # ascending
    for i in range(k + 1):
        c[0, nn - 1 - i] = -qa[i]
    return DescriptorSystem(a, e, b, c, np.zeros((1, 1)), ts)


def from_transfer(num, den, ts=0.0):
    """Descriptor realization of the scalar rational function num/den."""
    num = _trim(num)
    den = _trim(den)
    if np.all(num == 0):
        return static_gain([[0.0]], ts)
    if num.size <= den.size:
        return _strictly_proper_realization(num, den, ts) \
            if num.size < den.size else _biproper(num, den, ts)
    q, r = np.polydiv(num, den)
    sys = _polynomial_realization(q, ts)
    r = _trim(r)
    if np.any(r != 0):
        sys = sys + _strictly_proper_realization(r, den, ts)
    return sys


def _biproper(num, den, ts):
    d = num[0] / den[0]
    r = _trim(num - d * den)
    sys = static_gain([[d]], ts)
    if np.any(r != 0):
        sys = sys + _strictly_proper_realization(r, den, ts)
    return sys


def from_rational_matrix(entries, ts=0.0):
    """Build a MIMO realization from a nested list of (num, den) pairs.

    ``entries[i][j]`` is a tuple of coefficient vectors for the (i, j)
    element.  The realization is assembled entry by entry and is usually
    non-minimal; pass it through ``reduction.irreducible`` if a minimal
    one is needed.
    """
    rows = []
    for row in entries:
        cells = [from_transfer(num, den, ts) for num, den in row]
        r = cells[0]
        for c in cells[1:]:
            r = row_concat(r, c)
        rows.append(r)
    out = rows[0]
    for r in rows[1:]:
        out = col_concat(out, r)
    return out
