"""Scalar bracketing root finders and golden-section maximization."""

import math

import numpy as np

from .errors import SolverError

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi


def bisect(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, max_iter=300,
           f_lo=None, f_hi=None):
    """Bisection on ``[lo, hi]``; ``f(lo)`` and ``f(hi)`` must differ in sign.

    Iterates until the bracket is narrower than ``xtol + rtol * |mid|`` or
    the midpoint is an exact zero.
    """
    f_lo = f(lo) if f_lo is None else f_lo
    f_hi = f(hi) if f_hi is None else f_hi
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise SolverError(f"no sign change on [{lo!r}, {hi!r}]", bracket=(lo, hi))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo <= xtol + rtol * abs(mid):
            break
    return 0.5 * (lo + hi)


def first_sign_change(values):
    """Index ``i`` of the first pair ``values[i], values[i+1]`` that changes sign.

    Exact zeros are skipped. Returns ``None`` if the sequence never changes sign.
    """
    changes = sign_changes(values)
    return changes[0] if changes else None


def sign_changes(values):
    """Indices where consecutive nonzero entries of ``values`` change sign.

    For each change the returned index ``i`` refers to the last nonzero entry
    before the change.
    """
    s = np.sign(np.asarray(values, dtype=float))
    nz = np.flatnonzero(s)
    if nz.size < 2:
        return []
    flips = np.flatnonzero(s[nz[1:]] != s[nz[:-1]])
    return [int(nz[k]) for k in flips]


def golden_section_max(f, lo, hi, xtol=1e-12, max_iter=500):
    """Maximize a unimodal ``f`` on ``[lo, hi]`` by golden-section search.

    Returns ``(x, f(x))`` for the best point visited.
    """
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return c, fc
    return d, fd
