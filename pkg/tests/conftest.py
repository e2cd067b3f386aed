"""Shared test helpers: an independent bisection oracle and frozen roots.

The oracle below was written first and used to freeze the expected root
values; it shares no code with the package (plain math.tanh plus interval
halving) and stays available so the frozen constants can be re-derived.
"""

import math

import pytest


def oracle_bisect(f, lo, hi, iters=200):
    flo, fhi = f(lo), f(hi)
    assert flo * fhi <= 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def oracle_kcoth_root(rhs):
    """Unique positive root of k/tanh(k) = rhs (rhs > 1), by pure bisection."""
    return oracle_bisect(lambda k: k / math.tanh(k) - rhs, 1e-9, max(10.0, rhs + 2.0))


# frozen from oracle_kcoth_root before the build
KAPPA_RHS2 = 1.9150080481545375   # k coth k = 2
KAPPA_RHS3 = 2.9847045853578864   # k coth k = 3
KAPPA_RHS4 = 3.9973026920604324   # k coth k = 4


@pytest.fixture(scope="session")
def frozen_roots():
    return {2.0: KAPPA_RHS2, 3.0: KAPPA_RHS3, 4.0: KAPPA_RHS4}
