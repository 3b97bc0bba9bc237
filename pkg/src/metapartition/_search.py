"""Sign-scan and bisection shared by the marginal-condition solvers."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import BracketError

TOL_TIME = 1e-9
TOL_FOC = 1e-8


def call(g: Callable, x):
    with np.errstate(all="ignore"):
        return np.asarray(g(x), dtype=float)


def expand_until(g: Callable, hi: float, max_doublings: int, *, lo: float = 0.0) -> float:
    """Double ``hi`` until ``g(hi) > 0``."""
    for _ in range(max_doublings + 1):
        if float(call(g, hi)) > 0:
            return hi
        hi = lo + 2.0 * (hi - lo)
    raise BracketError(f"no sign change within {max_doublings} doublings")


def bisect(g: Callable, lo: float, hi: float, tol: float = 0.0) -> float:
    """Root of ``g`` in ``[lo, hi]`` given opposite signs at the ends.

    With the default ``tol = 0`` the bracket is halved until adjacent
    floats, so the result is limited only by the rounding of ``g``.
    """
    glo = float(call(g, lo))
    for _ in range(400):
        if hi - lo <= 0.25 * tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = float(call(g, mid))
        if gm == 0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_roots(g: Callable, lo: float, hi: float, n: int, tol: float = 0.0) -> list[float]:
    """All sign changes of ``g`` on a uniform ``n``-point scan, each bisected."""
    x = np.linspace(lo, hi, n)
    s = np.sign(call(g, x))
    s[np.isnan(s)] = 0
    roots = [float(v) for v in x[s == 0]]
    nz = np.nonzero(s)[0]
    for i, j in zip(nz[:-1], nz[1:]):
        if s[i] != s[j] and j == i + 1:
            roots.append(bisect(g, float(x[i]), float(x[j]), tol))
    return sorted(roots)


def best_of(candidates, key, *, maximize: bool = True):
    """Pick the best candidate; ties go to the earliest (smallest) one."""
    best, best_val = None, None
    for cand in candidates:
        v = key(cand)
        if best is None or (v > best_val if maximize else v < best_val):
            best, best_val = cand, v
    return best, best_val
