import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oswave import extensions as ext
from oswave import orrsommerfeld as os_
from oswave.errors import IllPosedError, ParameterError
from oswave.grid import GridFunction, PanelGrid

ALPHA_M = 2.7159


@pytest.fixture(scope="module")
def c0m(expo):
    return os_.solve_c0(ALPHA_M, expo).c0


@given(st.floats(1e-8, 1e-4), st.floats(0.5, 6.0), st.floats(-0.5, 1.5), st.floats(-0.5, 0.5))
def test_no_slip_limit_is_exact(nu, alpha0, re_c, im_c):
    from oswave.profile import make_builtin
    p = make_builtin("exponential")
    sp = os_.ScaledParameters(nu, alpha0, complex(re_c, im_c), p)
    slip = ext.SlipParameters(0.0, nu)
    assert ext.navier_dispersion_residual(sp, p, slip) == os_.dispersion_residual(sp, p)
    if abs(sp.c) < 0.5:
        assert ext.navier_full_residual(sp, p, slip) == os_.full_residual(sp, p)


def test_slip_parameters():
    s = ext.SlipParameters(0.5, 1e-8)
    assert s.beta == 0.5 * 1e-2
    with pytest.raises(ParameterError):
        ext.SlipParameters(-1.0, 1e-6)


def test_small_slip_stays_unstable(expo):
    c = ext.navier_branch(expo, ALPHA_M, np.linspace(0.005, 0.05, 10))[-1]
    assert c.imag > 0


def test_slip_branch_is_lipschitz(expo, c0m):
    betas = np.linspace(0.01, 0.1, 10)
    cs = ext.navier_branch(expo, ALPHA_M, betas)
    assert np.max(np.abs(cs - c0m) / betas) < 10.0


def test_instability_margin(expo):
    b = ext.navier_instability_margin(expo, ALPHA_M)
    assert 0 < b < ext.BETA0_MAX
    cs = ext.navier_branch(expo, ALPHA_M, np.arange(0.01, b, 0.01).tolist() + [b])
    assert abs(cs[-1].imag) < 1e-6
    coarse = ext.navier_instability_margin(expo, ALPHA_M, tol=1e-4)
    assert abs(coarse - b) < 1e-4


def test_margin_needs_unstable_root(expo):
    with pytest.raises(ParameterError):
        ext.navier_instability_margin(expo, 0.3)


@pytest.fixture(scope="module")
def rotation(expo, c0m):
    nu = 1e-6
    sp = os_.ScaledParameters(nu, ALPHA_M, c0m, expo)
    ctx = ext.OracleContext(N=128)
    return sp, ctx, ext.rotation_first_order(sp, expo, ctx)


def test_rotation_routes_agree(rotation):
    _, _, rot = rotation
    assert abs(rot.c1 - rot.c1_perturbation) <= 1e-4 * abs(rot.c1)
    assert rot.c_of(0.0) == rot.c0


def test_rotation_v0_solves_its_equation(rotation, expo):
    sp, ctx, rot = rotation
    from oswave import oracle
    pair = oracle.build_pencil(expo, sp.alpha, sp.nu, ctx.N, ctx.L)
    c0, x = oracle.polish(pair, rot.c0)
    m = ext._airy_matrix(pair, c0)
    rhs = pair.grid.D1 @ x[:pair.n] / (1j * sp.alpha)
    v0 = ext.solve_v0(pair, c0, x[:pair.n])
    res = (m @ v0 - rhs)[1:-1]
    assert np.max(np.abs(res)) < 1e-8 * np.max(np.abs(rhs))


def _mode(expo, c0m, nu=1e-4):
    sp = os_.ScaledParameters(nu, ALPHA_M, c0m, expo)
    h = 0.5 * nu ** 0.25
    grid = PanelGrid.clustered(30.0, (0.0, sp.zc.zc.real), (h, h), growth=0.5)
    return os_.assemble_eigenmode(sp, expo, grid)


def test_compressible_correction(expo, c0m):
    mode = _mode(expo, c0m)
    small = ext.compressible_leading_order(mode, expo, 1e-3)
    large = ext.compressible_leading_order(mode, expo, 1e-2)
    assert ext.continuity_residual(small, expo) < 1e-8
    assert large.rho.sup() / small.rho.sup() == pytest.approx(100.0)
    assert np.array_equal(small.rho2.values, -small.p0.values)
    th = small.theta2
    assert abs(th.grid.derivative(th.values, 1)[0]) < 1e-8 * th.sup()


def test_theta_against_green_function(expo, c0m):
    mode = _mode(expo, c0m)
    corr = ext.compressible_leading_order(mode, expo, 1e-3)
    z = mode.grid.nodes
    rhs = 1j * corr.alpha * (corr.c - expo.eval(z)) * corr.rho2.values
    ref = ext.helmholtz_green(mode.grid, corr.alpha, rhs)
    assert np.max(np.abs(ref - corr.theta2.values)) < 1e-6 * np.max(np.abs(ref))


@given(st.integers(0, 2 ** 31 - 1))
def test_theta_weak_form(seed):
    grid = PanelGrid.clustered(30.0, (0.0,), (0.1,), growth=0.5)
    z = grid.nodes
    rng = np.random.default_rng(seed)
    a = 0.2
    rhs = np.exp(-z) * (rng.standard_normal() + 1j * rng.standard_normal())
    th = ext._helmholtz_neumann(grid, a, rhs)
    w = np.exp(-(z - rng.uniform(2, 8)) ** 2)
    lhs = grid.integrate((grid.derivative(th, 2) - a * a * th) * w)
    assert abs(lhs - grid.integrate(rhs * w)) < 1e-9 * max(1.0, abs(lhs))


def test_zero_wavenumber_is_ill_posed(expo):
    grid = PanelGrid.clustered(10.0, (0.0,), (0.1,))
    sp = os_.ScaledParameters(1e-6, 0.0, 0.1j, expo)
    z = grid.nodes
    mode = os_.EigenmodeProfile(grid, z, z, z, z, 1.0, params=sp)
    with pytest.raises(IllPosedError):
        ext.compressible_leading_order(mode, expo, 1e-3)
    with pytest.raises(ParameterError):
        ext.compressible_leading_order(mode, expo, 0.0)
