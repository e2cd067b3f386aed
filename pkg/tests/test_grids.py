import numpy as np
import pytest

from shrinkedge.errors import GridTooCoarse
from shrinkedge.grids import GridFunction, cumulative_simpson, default_grid_size, simpson


def test_grid_validation():
    with pytest.raises(GridTooCoarse):
        GridFunction(np.zeros(7))
    with pytest.raises(GridTooCoarse):
        GridFunction(np.zeros(10))  # even count
    with pytest.raises(ValueError):
        GridFunction(np.array([np.nan] * 9))
    g = GridFunction.zeros(9)
    assert g.n == 9 and g.x[0] == 0.0 and g.x[-1] == 1.0


def test_grid_arithmetic():
    f = GridFunction.from_callable(lambda x: x, 17)
    g = GridFunction.from_callable(lambda x: 1.0 - x, 17)
    assert np.allclose((f + g).values, 1.0)
    assert np.allclose((2.0 * f - f).values, f.values)
    assert abs(f.sup_norm() - 1.0) < 1e-15
    assert abs(f.l2_norm_sq() - 1.0 / 3.0) < 1e-15  # Simpson exact for x^2


def test_simpson_exact_for_cubics():
    n = 33
    x = np.linspace(0, 1, n)
    val = simpson(x**3 - 2 * x**2 + x, 1.0 / (n - 1))
    assert abs(val - (0.25 - 2.0 / 3.0 + 0.5)) < 1e-15


def test_cumulative_simpson_polynomials():
    n = 65
    x = np.linspace(0, 1, n)
    dx = 1.0 / (n - 1)
    # quadratic: exact at every node, both parities
    got = cumulative_simpson(x**2, dx)
    assert np.max(np.abs(got - x**3 / 3.0)) < 1e-16
    # quartic: fourth-order accurate
    got = cumulative_simpson(x**4, dx)
    assert np.max(np.abs(got - x**5 / 5.0)) < 1e-7


def test_cumulative_simpson_trig_converges():
    errs = []
    for n in (65, 129, 257):
        x = np.linspace(0, 1, n)
        got = cumulative_simpson(np.sin(3 * np.pi * x), 1.0 / (n - 1))
        want = (1.0 - np.cos(3 * np.pi * x)) / (3 * np.pi)
        errs.append(np.max(np.abs(got - want)))
    assert errs[0] / errs[1] > 12.0  # ~16 for an O(h^4) rule
    assert errs[1] / errs[2] > 12.0


def test_default_grid_size():
    assert default_grid_size() == 257
    n = default_grid_size(100.0)
    assert n >= 10000 and n % 2 == 1
