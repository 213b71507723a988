import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oswave import orrsommerfeld as os_
from oswave import rayleigh as ray
from oswave.errors import ParameterError
from oswave.grid import GridFunction, PanelGrid
from oswave.profile import ShearProfile, critical_layer
from oswave.specfun import airy

LINEAR = ShearProfile("linear", 1.0, lambda z: np.asarray(z) * 1.0, lambda z: np.ones_like(np.asarray(z)) * 1.0,
                      lambda z: np.zeros_like(np.asarray(z)) * 1.0, lambda z: np.zeros_like(np.asarray(z)) * 1.0,
                      math.inf)


@pytest.fixture(scope="module")
def root3(expo):
    return os_.solve_c0(3.0, expo)


@given(st.floats(1e-8, 1e-4), st.floats(0.5, 6.0))
def test_scaling_invariants(nu, alpha0):
    from oswave.profile import make_builtin
    p = make_builtin("exponential")
    sp = os_.ScaledParameters(nu, alpha0, 0.3 + 0.1j, p)
    assert abs(sp.epsilon * 1j * sp.alpha - nu) <= 1e-12 * nu
    assert sp.alpha == pytest.approx(alpha0 * nu ** 0.25)
    s = complex(p.deriv1(sp.zc.zc))
    assert abs(cmath.phase(sp.gamma) - cmath.phase((1j * s) ** (1 / 3))) < 1e-9
    assert sp.lam.real == pytest.approx(sp.alpha * sp.c.imag)


def test_slow_wall_data(expo, tanh_profile):
    # alpha = 0.01 and c = 0.02i
    sp = os_.ScaledParameters(1e-8, 1.0, 2.0j, expo)
    a, b = os_.slow_mode_wall_data(sp, expo)
    assert a == pytest.approx(0.01 - 0.02j)
    assert b == 1.0
    assert os_.slow_mode_wall_data(sp, tanh_profile) == (a, b)


def test_fast_wall_data(expo):
    sp = os_.ScaledParameters(1e-6, 3.0, 0.5 + 0.2j, expo)
    a2, a1, a0 = os_.fast_mode_wall_data(sp, expo)
    w = -sp.gamma * sp.zc.zc
    assert a1 / a2 == pytest.approx(sp.gamma * airy(1, w) / airy(2, w))
    assert a0 / a1 == pytest.approx(sp.gamma * airy(0, w) / airy(1, w))


def test_langer_linear_profile():
    zc = critical_layer(LINEAR, 0.1 + 0.02j)
    z = np.linspace(0.0, 3.0, 13)
    assert np.max(np.abs(os_.langer(LINEAR, zc, z) - (z - zc.zc))) < 1e-13


def test_langer_at_critical_layer(expo):
    zc = critical_layer(expo, 0.2 + 0.05j)
    g, g1, g2 = os_.langer_derivatives(expo, zc, np.array([zc.zc]))
    assert abs(g[0]) < 1e-12
    assert abs(g1[0] - 1.0) < 1e-12
    h = 1e-5
    z = np.array([0.3, 1.0, 2.0])
    fd = (os_.langer(expo, zc, z + h) - os_.langer(expo, zc, z - h)) / (2 * h)
    _, d1, _ = os_.langer_derivatives(expo, zc, z)
    assert np.max(np.abs(fd - d1)) < 1e-7


def test_root_at_three(root3, expo):
    assert root3.c0.imag > 0
    assert root3.residual < 1e-12
    assert abs(os_.residual_core(3.0, root3.c0, expo)) < 1e-12
    assert abs(os_.tietjens_form_residual(3.0, root3.c0, expo)) < 1e-10


def test_stable_side(expo):
    assert os_.solve_c0(0.3, expo).c0.imag < 0


@pytest.mark.parametrize("delta", [0.05, -0.05j, 0.03 + 0.03j])
def test_root_is_attracting(root3, expo, delta):
    again = os_.solve_c0(3.0, expo, guess=root3.c0 + delta)
    assert abs(again.c0 - root3.c0) < 1e-10


def test_parameter_range(expo):
    with pytest.raises(ParameterError):
        os_.solve_c0(30.0, expo)
    with pytest.raises(ParameterError):
        os_.growth_curve(expo, 0.5, 6.0, 10)
    with pytest.raises(ParameterError):
        os_.dispersion_residual(os_.ScaledParameters(1e-6, 3.0, 1.0, expo), expo, variant="navier")


def test_growth_curve(expo):
    pts, alpha_c, alpha_m = os_.growth_curve(expo, 0.5, 6.0, 60)
    assert 0.5 < alpha_c < alpha_m < 6.0
    assert abs(os_.solve_c0(alpha_c, expo).c0.imag) < 1e-9
    sig = [q.sigma for q in pts]
    assert max(sig) <= os_.solve_c0(alpha_m, expo).sigma + 1e-9


def test_full_residual_tends_to_scaled(root3, expo):
    vals = []
    for nu in (1e-4, 1e-6, 1e-8):
        sp = os_.ScaledParameters(nu, 3.0, root3.c0, expo)
        vals.append(abs(os_.full_residual(sp, expo)) / nu ** 0.25)
    assert vals[0] > vals[1] > vals[2]


def test_viscous_part(expo):
    sp = os_.ScaledParameters(1e-6, 3.0, 0.4 + 0.1j, expo)
    g = PanelGrid.clustered(20.0, (0.0,), (0.1,))
    f = GridFunction(g, np.exp(-g.nodes) * np.sin(g.nodes))
    ctx = ray.make_context(expo, sp.c, sp.alpha)
    diff = os_.orr_apply(sp, expo, f).values - ray.ray_apply(ctx, f).values
    assert np.max(np.abs(diff + sp.epsilon * os_.diff_apply(sp, f).values)) < 1e-14


def test_eigenmode(root3, expo):
    z = np.linspace(0.0, 10.0, 401)
    out = []
    for nu in (1e-4, 1e-6, 1e-8):
        sp = os_.ScaledParameters(nu, 3.0, root3.c0, expo)
        em = os_.assemble_eigenmode(sp, expo, z)
        assert abs(em.u[0]) < 1e-12
        assert np.allclose(em.v, -1j * sp.alpha * em.psi)
        out.append(em.wall_residual)
    slope = np.polyfit(np.log([1e-4, 1e-6, 1e-8]), np.log(out), 1)[0]
    assert slope > 0.25
