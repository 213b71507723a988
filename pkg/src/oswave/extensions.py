"""Navier slip walls, slow rotation and the low Mach number correction."""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sl
from scipy.optimize import brentq

from . import oracle
from .adjoint import perturb_eigenvalue
from .errors import BranchLossError, DegeneratePairingError, IllPosedError, NoConvergenceError, ParameterError
from .grid import GridFunction
from .orrsommerfeld import full_residual, newton, residual_core, solve_c0

BETA0_MAX = 10.0


# ------------------------------------------------------------------ slip

@dataclass(frozen=True)
class SlipParameters:
    beta0: float
    nu: float

    def __post_init__(self):
        if self.beta0 < 0:
            raise ParameterError("slip length must be non-negative")

    @property
    def beta(self):
        return self.beta0 * self.nu ** 0.25


def slip_kappa(alpha0, beta0, p):
    """beta gamma at leading order: beta0 (i alpha0 U'(0))^{1/3}."""
    return beta0 * (1j * alpha0 * p.wall_shear) ** (1.0 / 3.0)


def navier_dispersion_residual(sp, p, slip):
    """Scaled slip relation alpha0 U+^2/U'(0) - c0 - Ai(2,w) / (k [Ai(1,w) + beta gamma Ai(w)])."""
    return residual_core(sp.alpha0, sp.c0, p, slip_kappa(sp.alpha0, slip.beta0, p))


def navier_full_residual(sp, p, slip):
    """The same relation at finite nu with the exact critical layer."""
    return full_residual(sp, p, slip.beta)


def navier_root(alpha0, beta0, p, guess):
    kappa = slip_kappa(alpha0, beta0, p)
    c, _ = newton(lambda x: residual_core(alpha0, x, p, kappa), guess, what="slip dispersion")
    return c


def navier_branch(p, alpha0, beta0_values):
    """Roots continued along increasing beta0 from the no-slip root."""
    c = solve_c0(alpha0, p).c0
    out = []
    for b in beta0_values:
        guess = c if len(out) < 2 else 2 * out[-1] - out[-2]
        try:
            c = navier_root(alpha0, b, p, guess)
        except NoConvergenceError as exc:
            raise BranchLossError(f"slip branch lost at beta0 = {b:g}") from exc
        out.append(c)
    return np.array(out)


def navier_instability_margin(p, alpha0, step=0.01, tol=1e-12):
    """Largest beta0 <= 10 keeping Im c0 > 0 on the continued branch, or inf."""
    c = solve_c0(alpha0, p).c0
    if not c.imag > 0:
        raise ParameterError("alpha0 is not in the no-slip unstable range")
    b = 0.0
    while b < BETA0_MAX:
        b_next = min(b + step, BETA0_MAX)
        try:
            c_next = navier_root(alpha0, b_next, p, c)
        except NoConvergenceError as exc:
            raise BranchLossError(f"slip branch lost at beta0 = {b_next:g}") from exc
        if c_next.imag <= 0:
            anchor = c

            def imag_c(beta0):
                return navier_root(alpha0, beta0, p, anchor).imag

            return brentq(imag_c, b, b_next, xtol=tol, rtol=4 * np.finfo(float).eps)
        b, c = b_next, c_next
    return math.inf


# ------------------------------------------------------------------ rotation

@dataclass
class OracleContext:
    N: int = 256
    L: float = 50.0
    zh_factor: float = oracle.ZH_FACTOR


@dataclass
class RotationExpansion:
    eta: float
    c0: complex
    c1: complex
    v0: GridFunction
    c1_perturbation: complex = 0j
    terms: tuple = ()
    adjoint_mismatch: float = 0.0

    def c_of(self, eta):
        return self.c0 + eta ** 2 * self.c1


def _airy_matrix(pair, c):
    # (U - c + eps a^2) - eps D^2 with v(0) = v(L) = 0
    g = pair.grid
    z = g.nodes
    n = g.size
    eps = pair.epsilon
    m = np.diag(pair.profile.eval(z) - c + eps * pair.alpha ** 2) - eps * g.D2
    m = m.astype(complex)
    for r in (0, n - 1):
        m[r] = 0
        m[r, r] = 1.0
    return m


def solve_v0(pair, c0, psi0):
    """Airy(c0, v0) = psi0' / (i a) with Dirichlet ends."""
    g = pair.grid
    rhs = g.D1 @ psi0 / (1j * pair.alpha)
    rhs[[0, g.size - 1]] = 0
    return np.linalg.solve(_airy_matrix(pair, c0), rhs)


def rotation_perturbation_matrix(pair, c0):
    """d A / d(eta^2) after eliminating v at order eta: -(1/(i a))^2 D Airy(c0)^{-1} D psi."""
    n = pair.n
    last = n - 1
    g = pair.grid
    d1 = g.D1.copy()
    rhs = d1.copy()
    rhs[[0, last]] = 0
    r = np.linalg.solve(_airy_matrix(pair, c0), rhs)
    k2 = (1.0 / (1j * pair.alpha)) ** 2
    a1 = np.zeros_like(pair.A)
    a1[n:2 * n, :n] = -k2 * d1 @ r
    a1[[n, n + last]] = 0
    return a1


def rotation_first_order(sp, p, oracle_ctx=None):
    """c1 in c(eta) = c0 + eta^2 c1 from the solvability condition, plus a second route.

    The solvability integrals use omega = (D^2 - a^2) psi; with that convention
    the five-term formula holds as written (the last four terms sum to
    -(Orr(c0) psi0, psi^t), which vanishes).  The velocity pairing carries the
    boundary term at z = L so that it equals -(D^2 - a^2) paired on a finite domain.
    """
    ctx = OracleContext() if oracle_ctx is None else oracle_ctx
    a, nu = sp.alpha, sp.nu
    direct = oracle.build_pencil(p, a, nu, ctx.N, ctx.L, "direct", zh_factor=ctx.zh_factor)
    adj = oracle.build_pencil(p, a, nu, ctx.N, ctx.L, "adjoint", zh_factor=ctx.zh_factor)
    c0, x = oracle.polish(direct, sp.c)
    ca, y = oracle.polish(adj, c0)
    mismatch = abs(ca - c0)
    if mismatch > 1e-6 * max(1.0, abs(c0)):
        raise DegeneratePairingError(f"adjoint eigenvalue differs from the direct one by {mismatch:.2e}")
    g = direct.grid
    n = g.size
    psi0 = x[:n]
    psit = np.conj(y[:n])
    v0 = solve_v0(direct, c0, psi0)
    z = g.nodes
    w = g.weights
    lap = g.D2 - a * a * np.eye(n)
    om = lap @ psi0
    omt = lap @ psit
    d_psi, d_psit = g.D1 @ psi0, g.D1 @ psit
    eps = direct.epsilon
    u = p.eval(z)
    t1 = -1j / a * np.sum(w * (g.D1 @ v0) * np.conj(psit))
    t2 = -np.sum(w * u * om * np.conj(psit))
    t3 = np.sum(w * p.deriv2(z) * psi0 * np.conj(psit))
    t4 = eps * np.sum(w * om * np.conj(omt))
    t5 = c0 * np.sum(w * om * np.conj(psit))
    vel = np.sum(w * (d_psi * np.conj(d_psit) + a * a * psi0 * np.conj(psit)))
    bterm = psi0[-1] * np.conj(d_psit[-1]) - psi0[0] * np.conj(d_psit[0])
    den = vel - bterm
    if abs(den) < 1e-12 * np.linalg.norm(psi0) * np.linalg.norm(psit):
        raise DegeneratePairingError("velocity pairing vanishes")
    c1 = (t1 + t2 + t3 + t4 + t5) / den
    c1_pert = rotation_c1_perturbation(direct, c0, x)
    return RotationExpansion(0.0, c0, c1, GridFunction(g, v0), c1_pert,
                             (t1, t2, t3, t4, t5, den), mismatch)


def rotation_c1_perturbation(pair, c0, x0=None):
    """c1 from perturb_eigenvalue applied to the shift-inverted pencil.

    With T = (A - s B)^{-1} B the pencil becomes T x = mu x, mu = 1 / (c - s), and
    the rotation enters as dT = -(A - s B)^{-1} A1 T.
    """
    sigma = c0 + 1e-2 * abs(c0) * (1 + 1j)
    shifted = pair.A - sigma * pair.B
    t = np.linalg.solve(shifted, pair.B)
    t1 = -np.linalg.solve(shifted, rotation_perturbation_matrix(pair, c0)) @ t
    mu0 = 1.0 / (c0 - sigma)
    x = oracle.inverse_iteration(pair.A, pair.B, c0, iters=6) if x0 is None else x0
    lu = sl.lu_factor(t.conj().T - np.conj(mu0) * np.eye(t.shape[0]))
    y = np.random.default_rng(2).standard_normal(t.shape[0]) + 0j
    for _ in range(4):
        y = sl.lu_solve(lu, y)
        y /= np.linalg.norm(y)
    mu1, _ = perturb_eigenvalue(lambda e: t @ e, lambda e: t1 @ e, x, mu0, y)
    return -mu1 / mu0 ** 2


def rotation_eigenvalue(sp, p, eta, c_guess, oracle_ctx=None):
    """Eigenvalue of the coupled (psi, v) pencil nearest c_guess."""
    ctx = OracleContext() if oracle_ctx is None else oracle_ctx
    pair = oracle.build_pencil(p, sp.alpha, sp.nu, ctx.N, ctx.L, "coupled_rotation", eta=eta,
                               zh_factor=ctx.zh_factor)
    c, _ = oracle.polish(pair, c_guess)
    return c


# ------------------------------------------------------------------ compressible

@dataclass
class CompressibleCorrection:
    mach: float
    rho2: GridFunction
    theta2: GridFunction
    p0: GridFunction
    h_prime: float = 1.0
    alpha: float = 0.0
    c: complex = 0j

    @property
    def rho(self):
        return self.rho2.with_values(self.mach ** 2 * self.rho2.values)

    @property
    def grad_potential(self):
        return self.theta2.with_values(self.mach ** 2 * self.theta2.values)


def recover_pressure(mode, p):
    """p0 = -(U - c) psi' + U' psi + eps ((D^2 - a^2) psi)' from the x-momentum balance."""
    sp = mode.params
    grid = mode.grid
    z = grid.nodes
    d_omega = grid.derivative(mode.omega, 1)
    p0 = -(p.eval(z) - sp.c) * mode.u + p.deriv1(z) * mode.psi - sp.epsilon * d_omega
    return GridFunction(grid, p0)


def _helmholtz_neumann(grid, alpha, rhs):
    # (D^2 - a^2) theta = rhs, theta'(0) = 0, theta' + a theta = 0 at the far end
    d = grid.diff_matrix()
    n = grid.size
    m = (d @ d - alpha ** 2 * np.eye(n)).astype(complex)
    b = np.array(rhs, dtype=complex)
    m[0] = d[0]
    b[0] = 0
    m[-1] = d[-1] + alpha * np.eye(n)[-1]
    b[-1] = 0
    return np.linalg.solve(m, b)


def helmholtz_green(grid, alpha, rhs):
    """Neumann half-line Green function solution, used as an independent check."""
    z = grid.nodes
    a = alpha
    r = np.asarray(rhs, dtype=complex)
    left = grid.cumulative(np.exp(a * (z - z[-1])) * r)
    right = grid.reverse_cumulative(np.exp(-a * z) * r)
    total = grid.integrate(np.exp(-a * z) * r)
    return -(np.exp(-a * z) * left * np.exp(a * z[-1]) + np.exp(a * z) * right
             + np.exp(-a * z) * total) / (2 * a)


def compressible_leading_order(planar_mode, p, mach, h_prime=1.0):
    """rho2 = -p0 / h'(1) and (D^2 - a^2) theta2 = i a (c - U) rho2 with theta2'(0) = 0."""
    sp = planar_mode.params
    if sp is None or not hasattr(planar_mode.grid, "diff_matrix"):
        raise ParameterError("planar mode must come from assemble_eigenmode on a panel grid")
    if not mach > 0:
        raise ParameterError("mach must be positive")
    if sp.alpha == 0:
        raise IllPosedError("alpha = 0 leaves theta2 undetermined")
    grid = planar_mode.grid
    z = grid.nodes
    p0 = recover_pressure(planar_mode, p)
    rho2 = -p0.values / h_prime
    rhs = 1j * sp.alpha * (sp.c - p.eval(z)) * rho2
    theta2 = _helmholtz_neumann(grid, sp.alpha, rhs)
    return CompressibleCorrection(mach, GridFunction(grid, rho2), GridFunction(grid, theta2), p0,
                                  h_prime, sp.alpha, sp.c)


def continuity_residual(corr, p):
    """Relative size of -i a c rho2 + i a U rho2 + (D^2 - a^2) theta2 at interior nodes."""
    grid = corr.theta2.grid
    z = grid.nodes
    a = corr.alpha
    src = 1j * a * (p.eval(z) - corr.c) * corr.rho2.values
    lap = grid.derivative(corr.theta2.values, 2) - a * a * corr.theta2.values
    return float(np.max(np.abs(src + lap)[1:-1]) / max(np.max(np.abs(src)), 1e-300))
