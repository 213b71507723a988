import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oswave.errors import ParameterError
from oswave.grid import GridFunction, MappedChebyshevGrid, PanelGrid, clenshaw_curtis


@pytest.fixture(scope="module")
def grid():
    return PanelGrid.clustered(30.0, (0.0, 0.4), (0.05, 0.01), m=16)


def test_quadrature(grid):
    assert grid.integrate(np.exp(-grid.nodes)) == pytest.approx(1 - math.exp(-30), abs=1e-13)
    cum = grid.cumulative(np.cos(grid.nodes))
    assert np.max(np.abs(cum - np.sin(grid.nodes))) < 1e-12
    rev = grid.reverse_cumulative(np.exp(-grid.nodes))
    assert np.max(np.abs(rev - (np.exp(-grid.nodes) - math.exp(-30)))) < 1e-13


def test_derivatives(grid):
    z = grid.nodes
    f = np.sin(z) * np.exp(-0.1 * z)
    d1 = np.exp(-0.1 * z) * (np.cos(z) - 0.1 * np.sin(z))
    assert np.max(np.abs(grid.derivative(f) - d1)) < 1e-10
    assert np.max(np.abs(grid.diff_matrix() @ f - d1)) < 1e-10


@given(points=st.lists(st.floats(0.0, 30.0), min_size=1, max_size=20))
def test_interpolation(grid, points):
    zq = np.array(points)
    vals = grid.interpolate(np.sin(grid.nodes), zq)
    assert np.max(np.abs(vals - np.sin(zq))) < 1e-11


def test_bad_breaks():
    with pytest.raises(ParameterError):
        PanelGrid([0.0, 1.0, 1.0])
    with pytest.raises(ParameterError):
        PanelGrid([0.0, 1.0], m=3)


def test_mapped_grid_clustering():
    g = MappedChebyshevGrid(128, 50.0, 0.5)
    assert g.nodes[0] == 0.0 and g.nodes[-1] == pytest.approx(50.0)
    assert np.count_nonzero(g.nodes <= 0.5 + 1e-12) == 65
    assert g.integrate(np.exp(-g.nodes)) == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(g.derivative(np.exp(-g.nodes)) + np.exp(-g.nodes))) < 1e-8


def test_clenshaw_curtis_weights():
    w = clenshaw_curtis(16)
    assert w.sum() == pytest.approx(2.0)


def test_grid_function_checks(grid):
    with pytest.raises(ParameterError):
        GridFunction(grid, np.zeros(3))
    f = GridFunction(grid, np.exp(-grid.nodes))
    assert f.sup() == pytest.approx(1.0)
    assert f.integral() == pytest.approx(1.0, abs=1e-12)
