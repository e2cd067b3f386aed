"""Bracketed scalar root finding for monotone-on-a-chart secular functions."""

from __future__ import annotations

from .errors import NoRoot


def bisect(f, lo: float, hi: float, rtol: float = 1e-13, maxit: int = 200) -> float:
    """Bisection on [lo, hi]; f(lo) and f(hi) must not share a strict sign."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise NoRoot(f"no sign change on [{lo:g}, {hi:g}]")
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * abs(mid):
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def expand_bracket(f, lo: float, hi: float, lo_min: float, hi_max: float,
                   grow: float = 1.6, max_steps: int = 80):
    """Grow [lo, hi] geometrically (within [lo_min, hi_max]) until f changes sign."""
    flo = f(lo)
    fhi = f(hi)
    for _ in range(max_steps):
        if flo == 0.0 or fhi == 0.0 or (flo > 0.0) != (fhi > 0.0):
            return lo, hi
        moved = False
        if lo > lo_min:
            lo = max(lo / grow, lo_min)
            flo = f(lo)
            moved = True
            if (flo > 0.0) != (fhi > 0.0) or flo == 0.0:
                return lo, hi
        if hi < hi_max:
            hi = min(hi * grow, hi_max)
            fhi = f(hi)
            moved = True
        if not moved:
            break
    raise NoRoot(f"no sign change found in [{lo_min:g}, {hi_max:g}]")
