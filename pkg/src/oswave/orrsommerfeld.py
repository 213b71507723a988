"""Direct Orr-Sommerfeld asymptotics in the alpha, c ~ nu^{1/4} regime.

Scaling: alpha = alpha0 nu^{1/4}, c = c0 nu^{1/4}, eps = nu / (i alpha),
gamma = (i alpha U_s'(z_c) / nu)^{1/3}.  The leading-order dispersion relation
reads

    alpha0 U+^2 / U'(0) - c0 - Ai(2, w) / (k [Ai(1, w) + kappa Ai(w)]) = 0,

with k = (i U'(0) alpha0)^{1/3} / U'(0), w = -k c0 and kappa = 0 for no-slip
walls.  Since c0 Ti(-k c0 e^{5i pi/6}) = -Ai(2, w) / (k Ai(1, w)) this is the
Tietjens form, written so that c0 = 0 is a regular point.
"""

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq
from scipy.special import roots_jacobi

from .errors import (BranchAmbiguityError, BranchJumpError, NoConvergenceError,
                     ParameterError, PoleError)
from .grid import GridFunction
from .profile import critical_layer
from .specfun import airy, airy_scaled, tietjens_complex

SEED_ALPHA0 = 20.0
CONT_STEP = 0.1


@dataclass(frozen=True)
class ScaledParameters:
    """(nu, alpha0, c0) together with the derived unscaled quantities."""

    nu: float
    alpha0: float
    c0: complex
    profile: object = field(repr=False, compare=False)

    @property
    def alpha(self):
        return self.alpha0 * self.nu ** 0.25

    @property
    def c(self):
        return complex(self.c0) * self.nu ** 0.25

    @property
    def epsilon(self):
        return self.nu / (1j * self.alpha)

    @cached_property
    def zc(self):
        return critical_layer(self.profile, self.c)

    @cached_property
    def gamma(self):
        s = complex(self.profile.deriv1(self.zc.zc))
        return (1j * self.alpha * s / self.nu) ** (1.0 / 3.0)

    @property
    def Z(self):
        return self.gamma * self.zc.zc

    @property
    def lam(self):
        # growth eigenvalue of e^{i alpha (x - c t)}: Re lam = alpha Im c
        return -1j * self.alpha * self.c

    def with_c0(self, c0):
        return ScaledParameters(self.nu, self.alpha0, complex(c0), self.profile)


@dataclass(frozen=True)
class DispersionPoint:
    alpha0: float
    c0: complex
    sigma: float
    residual: float
    variant: str = "dirichlet"


@dataclass
class EigenmodeProfile:
    grid: object
    psi: np.ndarray
    u: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    a_coeff: complex
    b_coeff: complex = 1.0 + 0j
    wall_residual: float = 0.0
    params: object = None

    @property
    def z(self):
        return np.asarray(getattr(self.grid, "nodes", self.grid))


# ---------------------------------------------------------------- operators

def orr_apply(sp, p, f):
    """(U-c)(D^2 - a^2) f - U'' f - eps (D^2 - a^2)^2 f on the grid of f."""
    g = f.grid
    z = g.nodes
    a2 = sp.alpha ** 2
    lf = g.derivative(f.values, 2) - a2 * f.values
    llf = g.derivative(lf, 2) - a2 * lf
    out = (p.eval(z) - sp.c) * lf - p.deriv2(z) * f.values - sp.epsilon * llf
    return GridFunction(g, out)


def diff_apply(sp, f):
    """(D^2 - a^2)^2 f, the viscous part of the operator."""
    g = f.grid
    a2 = sp.alpha ** 2
    lf = g.derivative(f.values, 2) - a2 * f.values
    return GridFunction(g, g.derivative(lf, 2) - a2 * lf)


# ----------------------------------------------------------------- Langer

_GJ_CACHE = {}


def _gauss_jacobi(n):
    if n not in _GJ_CACHE:
        x, w = roots_jacobi(n, 0.0, 0.5)
        # int_0^1 s^{1/2} F(s) ds with s = (1 + x) / 2
        _GJ_CACHE[n] = (0.5 * (1.0 + x), w * 2.0 ** -1.5)
    return _GJ_CACHE[n]


def _h(p, zc, t):
    # (U(t) - c) / (U'(z_c) (t - z_c)), Taylor-filled near z_c
    c = zc.c
    s1 = complex(p.deriv1(zc.zc))
    u = t - zc.zc
    small = np.abs(u) < 1e-4
    us = np.where(small, 1.0, u)
    out = (p.eval(t) - c) / (s1 * us)
    ser = 1.0 + p.deriv2(zc.zc) / (2 * s1) * u + p.deriv3(zc.zc) / (6 * s1) * u * u
    return np.where(small, ser, out)


def langer(p, zc, z, n=40):
    """Langer variable g(z), with g ~ z - z_c near the critical layer."""
    z = np.asarray(z, dtype=complex)
    s, w = _gauss_jacobi(n)
    u = z - zc.zc
    t = zc.zc + s[None, :] * u.reshape(-1, 1)
    h = _h(p, zc, t)
    if np.any(np.abs(np.angle(h)) > 0.9 * math.pi):
        raise BranchAmbiguityError("U_s - c winds around zero on the Langer path")
    j = (np.sqrt(h) * w[None, :]).sum(axis=1)
    g = u.ravel() * (1.5 * j) ** (2.0 / 3.0)
    g = g.reshape(z.shape)
    return complex(g) if g.ndim == 0 else g


def _langer_coeffs(p, zc):
    s1 = complex(p.deriv1(zc.zc))
    k2 = complex(p.deriv2(zc.zc)) / (2 * s1)
    k3 = complex(p.deriv3(zc.zc)) / (6 * s1)
    b2 = k2 / 5.0
    b3 = (k3 - 8.0 * b2 * b2) / 7.0
    return s1, b2, b3


def langer_derivatives(p, zc, z, n=40):
    """g, g', g'' from g g'^2 = (U - c) / U'(z_c)."""
    z = np.asarray(z, dtype=complex)
    g = np.asarray(langer(p, zc, z, n), dtype=complex)
    s1, b2, b3 = _langer_coeffs(p, zc)
    u = z - zc.zc
    q = (p.eval(z) - zc.c) / s1
    dq = p.deriv1(z) / s1
    small = np.abs(u) < 1e-3
    gs = np.where(small, 1.0, g)
    g1 = np.sqrt(q / gs)
    g1 = np.where(small, 1.0 + 2 * b2 * u + 3 * b3 * u * u, g1)
    g2 = (dq - g1 ** 3) / (2.0 * g1 * gs)
    g2 = np.where(small, 2 * b2 + 6 * b3 * u, g2)
    return g, g1, g2


# ---------------------------------------------------------------- wall data

def fast_mode_wall_data(sp, p):
    """(Ai(2, -g zc), g Ai(1, -g zc), g^2 Ai(-g zc)) with g = gamma."""
    gam = sp.gamma
    w = -gam * sp.zc.zc
    return airy(2, w), gam * airy(1, w), gam * gam * airy(0, w)


def slow_mode_wall_data(sp, p):
    """(-c + alpha U+^2 / U'(0), U'(0))."""
    s1 = p.wall_shear
    return -sp.c + sp.alpha * p.u_plus ** 2 / s1, complex(s1)


# -------------------------------------------------------- dispersion relation

def _k(alpha0, p):
    s1 = p.wall_shear
    return (1j * s1 * alpha0) ** (1.0 / 3.0) / s1


def residual_core(alpha0, c0, p, kappa=0.0):
    """Leading-order residual shared by the no-slip and slip relations."""
    s1 = p.wall_shear
    k = _k(alpha0, p)
    w = -k * complex(c0)
    _, m = airy_scaled(w)
    den = m[2] + kappa * m[1]
    if abs(den) < 1e-300:
        raise PoleError("dispersion denominator vanishes")
    return alpha0 * p.u_plus ** 2 / s1 - complex(c0) - m[3] / (k * den)


def dispersion_residual(sp, p, variant="dirichlet"):
    """Leading-order (Tietjens) residual at (sp.alpha0, sp.c0)."""
    if variant != "dirichlet":
        raise ParameterError("slip walls are handled by extensions.navier_dispersion_residual")
    return residual_core(sp.alpha0, sp.c0, p, 0.0)


def tietjens_form_residual(alpha0, c0, p):
    """alpha0 U+^2/U'(0) - c0 [1 - Ti(-Z)], Z = (i alpha0 U'(0))^{1/3} c0 / U'(0); c0 != 0."""
    s1 = p.wall_shear
    Z = _k(alpha0, p) * complex(c0)
    return alpha0 * p.u_plus ** 2 / s1 - c0 * (1.0 - tietjens_complex(-Z))


def full_residual(sp, p, beta=0.0):
    """Finite-nu form: a U+^2/U'(0)^2 - c/U'(0) - Ai(2,W)/(gamma [Ai(1,W) + beta gamma Ai(W)]).

    W = -gamma z_c with the exact critical layer and gamma built on U'(z_c).
    """
    s1 = p.wall_shear
    gam = sp.gamma
    w = -gam * sp.zc.zc
    _, m = airy_scaled(w)
    den = m[2] + beta * gam * m[1]
    if abs(den) < 1e-300:
        raise PoleError("dispersion denominator vanishes")
    return sp.alpha * p.u_plus ** 2 / s1 ** 2 - sp.c / s1 - m[3] / (gam * den)


def newton(fun, x0, tol=1e-12, maxiter=50, what="root"):
    """Complex Newton iteration with a central-difference derivative."""
    x = complex(x0)
    trace = []
    for _ in range(maxiter):
        f = fun(x)
        trace.append((x, abs(f)))
        if abs(f) <= tol:
            return x, abs(f)
        h = 1e-6 * max(1.0, abs(x))
        df = (fun(x + h) - fun(x - h)) / (2 * h)
        if df == 0:
            break
        x = x - f / df
    f = fun(x)
    if abs(f) <= max(tol, 1e-10):
        return x, abs(f)
    raise NoConvergenceError(f"Newton iteration for {what} did not converge", last=x, trace=trace)


def _continue(alpha_from, c_from, alpha_to, p, kappa=0.0, step=CONT_STEP):
    n = max(1, int(math.ceil(abs(alpha_to - alpha_from) / step)))
    alphas = np.linspace(alpha_from, alpha_to, n + 1)
    c_prev = None
    c = complex(c_from)
    for i in range(1, n + 1):
        guess = c if c_prev is None else 2 * c - c_prev
        c_new, _ = newton(lambda x: residual_core(alphas[i], x, p, kappa), guess,
                          what="dispersion continuation")
        c_prev, c = c, c_new
    return c


def seed_c0(p):
    """Root at the continuation seed alpha0 = 20 from the balance c0 ~ alpha0 U+^2/U'(0)."""
    guess = SEED_ALPHA0 * p.u_plus ** 2 / p.wall_shear
    c, _ = newton(lambda x: residual_core(SEED_ALPHA0, x, p), guess, what="dispersion seed")
    return c


def solve_c0(alpha0, p, guess=None, kappa=0.0, variant="dirichlet"):
    """Root c0 of the leading-order dispersion relation at alpha0."""
    alpha0 = float(alpha0)
    if not 0.1 <= alpha0 <= 20.0:
        raise ParameterError("alpha0 must lie in [0.1, 20]")
    if guess is None:
        guess = _continue(SEED_ALPHA0, seed_c0(p), alpha0, p, kappa)
    c0, res = newton(lambda x: residual_core(alpha0, x, p, kappa), guess, what="dispersion")
    return DispersionPoint(alpha0, c0, alpha0 * c0.imag, res, variant)


def _golden_max(fun, a, b, tol=1e-5):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - g * (b - a)
    x2 = a + g * (b - a)
    f1, f2 = fun(x1), fun(x2)
    while b - a > tol:
        if f1 > f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - g * (b - a)
            f1 = fun(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + g * (b - a)
            f2 = fun(x2)
    return 0.5 * (a + b)


def growth_curve(p, alpha0_min, alpha0_max, n):
    """Continuation sweep of the root; returns (points, alpha_c, alpha_M).

    alpha_c is nan when Im c0 keeps one sign on the sweep.
    """
    if n < 50:
        raise ParameterError("growth_curve needs n >= 50")
    if not 0.1 <= alpha0_min < alpha0_max <= 20.0:
        raise ParameterError("need 0.1 <= alpha0_min < alpha0_max <= 20")
    c = _continue(SEED_ALPHA0, seed_c0(p), alpha0_max, p)
    alphas = np.linspace(alpha0_max, alpha0_min, n)
    roots = []
    c_prev = None
    for a0 in alphas:
        guess = c if c_prev is None or not roots else 2 * c - c_prev
        pt = solve_c0(a0, p, guess=guess)
        c_prev, c = c, pt.c0
        roots.append(pt)
    steps = np.abs(np.diff([r.c0 for r in roots]))
    med = np.median(steps)
    if med > 0 and np.any(steps > 10 * med):
        raise BranchJumpError("root jumped between neighbouring sweep points")
    roots = roots[::-1]
    al = np.array([r.alpha0 for r in roots])
    ci = np.array([r.c0.imag for r in roots])
    sig = np.array([r.sigma for r in roots])

    def near(a0):
        i = int(np.argmin(np.abs(al - a0)))
        return roots[i].c0

    def imag_c(a0):
        return solve_c0(a0, p, guess=near(a0)).c0.imag

    alpha_c = math.nan
    flips = np.nonzero(np.sign(ci[:-1]) * np.sign(ci[1:]) < 0)[0]
    if flips.size:
        i = flips[-1]
        alpha_c = brentq(imag_c, al[i], al[i + 1], xtol=1e-12, rtol=1e-14)

    i = int(np.argmax(sig))
    lo = al[max(i - 1, 0)]
    hi = al[min(i + 1, al.size - 1)]
    alpha_m = _golden_max(lambda a0: solve_c0(a0, p, guess=near(a0)).sigma, lo, hi)
    return roots, alpha_c, alpha_m


# --------------------------------------------------------------- eigenmode

def assemble_eigenmode(sp, p, grid):
    """psi = U - c + alpha U+^2/U'(0) + a Ai(2, gamma g(z)) with fields u, v, omega.

    The fast amplitude a cancels the wall slope, a = -U'(0) / (gamma Ai(1, -gamma g(0)));
    what is left of the wall conditions is |psi(0)|, stored as wall_residual.
    """
    z = np.asarray(getattr(grid, "nodes", grid), dtype=float)
    zc = sp.zc
    gam = sp.gamma
    a = sp.alpha
    c = sp.c
    s1 = p.wall_shear
    g, g1, g2 = langer_derivatives(p, zc, z)
    g0, g01, _ = langer_derivatives(p, zc, np.array([0.0]))
    e, m = airy_scaled(gam * g)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        scale = np.exp(e)
    scale = np.where(np.isfinite(scale), scale, 0.0)
    ai, ai1, ai2 = m[:, 1] * scale, m[:, 2] * scale, m[:, 3] * scale
    w0 = gam * g0[0]
    d0 = gam * g01[0] * airy(1, w0)
    amp = -s1 / d0
    shift = a * p.u_plus ** 2 / s1
    psi = p.eval(z) - c + shift + amp * ai2
    u = p.deriv1(z) + amp * gam * g1 * ai1
    dd = p.deriv2(z) + amp * (gam * g2 * ai1 + gam * gam * g1 * g1 * ai)
    omega = -(dd - a * a * psi)
    v = -1j * a * psi
    wall = abs(-c + shift + amp * airy(2, w0))
    return EigenmodeProfile(grid, psi, u, v, omega, amp, 1.0 + 0j, wall, sp)
