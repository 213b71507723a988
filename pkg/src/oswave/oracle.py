"""Chebyshev collocation solver for the Orr-Sommerfeld eigenproblem.

Unknowns are psi and phi = (D^2 - a^2) psi on a mapped Chebyshev grid, giving
a pencil A x = c B x that is linear in the phase speed c:

    (D^2 - a^2) psi - phi = 0,
    -U'' psi + (U - eps (D^2 - a^2)) phi = c phi.

Wall rows impose psi = psi' = 0 (or the slip condition psi' = beta omega);
far rows impose psi' + a psi = 0 and phi = 0, which is exact for the decaying
slow mode outside the shear layer.  The adjoint pencil discretizes the
transposed operator directly.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sl

from .errors import EigensolverError, ParameterError
from .grid import MappedChebyshevGrid, cheb_lobatto

KINDS = ("direct", "adjoint", "coupled_rotation")
ZH_FACTOR = 40.0
FILTER_TOL = 1e-4


@dataclass
class DiscreteOperatorPair:
    A: np.ndarray
    B: np.ndarray
    grid: object
    bc_rows: tuple
    kind: str
    alpha: float
    nu: float
    profile: object = field(repr=False)
    eta: float = 0.0
    beta: float = 0.0
    zh_factor: float = ZH_FACTOR

    @property
    def n(self):
        return self.grid.size

    @property
    def epsilon(self):
        return self.nu / (1j * self.alpha)


@dataclass
class Spectrum:
    values: np.ndarray
    vectors: np.ndarray
    retained: np.ndarray
    pair: DiscreteOperatorPair = field(repr=False)

    def __iter__(self):
        # unpacks as (eigenvalues, eigenvectors)
        return iter((self.values, self.vectors))


def _blocks(p, alpha, nu, n_cheb, length, zh_factor):
    zh = zh_factor * nu ** 0.25
    if not 2 * zh < length:
        raise ParameterError("length too short for the wall clustering")
    g = MappedChebyshevGrid(n_cheb, length, zh)
    n = g.size
    eye = np.eye(n)
    lap = g.D2 - alpha ** 2 * eye
    z = g.nodes
    return g, n, eye, lap, z


def build_pencil(p, alpha, nu, N, L, kind="direct", eta=0.0, beta=0.0, zh_factor=ZH_FACTOR):
    """Dense pencil (A, B) in the phase speed c for the chosen operator."""
    if kind not in KINDS:
        raise ParameterError(f"kind must be one of {KINDS}")
    if not 64 <= N <= 1024:
        raise ParameterError("N must lie in [64, 1024]")
    if not L >= 30:
        raise ParameterError("L must be at least 30")
    if not (alpha > 0 and nu > 0):
        raise ParameterError("alpha and nu must be positive")
    if beta < 0 or eta < 0:
        raise ParameterError("beta and eta must be non-negative")
    g, n, eye, lap, z = _blocks(p, alpha, nu, N, L, zh_factor)
    eps = nu / (1j * alpha)
    u = p.eval(z)
    u2 = p.deriv2(z)
    m = 3 * n if kind == "coupled_rotation" else 2 * n
    A = np.zeros((m, m), dtype=complex)
    B = np.zeros((m, m), dtype=complex)
    A[:n, :n] = lap
    A[:n, n:2 * n] = -eye
    if kind == "adjoint":
        # (D^2 - a^2)[(U - c) chi] - U'' chi - eps (D^2 - a^2) phi with phi = (D^2 - a^2) chi
        A[n:2 * n, :n] = lap * u[None, :] - np.diag(u2)
        A[n:2 * n, n:2 * n] = -eps * lap
    else:
        A[n:2 * n, :n] = -np.diag(u2)
        A[n:2 * n, n:2 * n] = np.diag(u) - eps * lap
    B[n:2 * n, n:2 * n] = eye
    last = n - 1
    rows = [0, last, n, n + last]
    A[0] = 0
    A[0, 0] = 1.0
    A[last] = 0
    A[last, :n] = g.D1[last] + alpha * eye[last]
    A[n] = 0
    B[n] = 0
    A[n, :n] = g.D1[0]
    if beta:
        # u = beta omega at the wall with omega = -phi
        A[n, n] = beta
    A[n + last] = 0
    B[n + last] = 0
    A[n + last, n + last] = 1.0
    if kind == "coupled_rotation":
        k = eta / (1j * alpha)
        A[n:2 * n, 2 * n:] = -k * g.D1
        A[[n, n + last], 2 * n:] = 0
        A[2 * n:, 2 * n:] = np.diag(u) - eps * lap
        A[2 * n:, :n] = -k * g.D1
        B[2 * n:, 2 * n:] = eye
        for r in (2 * n, 2 * n + last):
            A[r] = 0
            B[r] = 0
            A[r, r] = 1.0
        rows += [2 * n, 2 * n + last]
    return DiscreteOperatorPair(A, B, g, tuple(rows), kind, float(alpha), float(nu), p,
                                float(eta), float(beta), float(zh_factor))


def build_strip_pencil(alpha, nu, N, height=math.pi):
    """U = 0 on [0, height] with psi = phi = 0 at both ends.

    sin(k pi z / height) is an eigenfunction with c = eps (k^2 + a^2), k integer
    multiples of pi / height.
    """
    x, d = cheb_lobatto(N)
    z = 0.5 * height * (1.0 - x)
    d1 = -2.0 / height * d
    n = N + 1
    eye = np.eye(n)
    lap = d1 @ d1 - alpha ** 2 * eye
    eps = nu / (1j * alpha)
    A = np.zeros((2 * n, 2 * n), dtype=complex)
    B = np.zeros((2 * n, 2 * n), dtype=complex)
    A[:n, :n] = lap
    A[:n, n:] = -eye
    A[n:, n:] = -eps * lap
    B[n:, n:] = eye
    for r in (0, N):
        A[r] = 0
        A[r, r] = 1.0
        A[n + r] = 0
        B[n + r] = 0
        A[n + r, n + r] = 1.0
    return A, B, z


def _eigvals(A, B):
    try:
        w = sl.eigvals(A, B, overwrite_a=False, check_finite=True)
    except (sl.LinAlgError, ValueError) as exc:
        raise EigensolverError(f"generalized eigensolver failed: {exc}") from exc
    return w[np.isfinite(w) & (np.abs(w) < 1e8)]


def inverse_iteration(A, B, c, iters=3):
    """Right eigenvector of A x = c B x near c."""
    lu = sl.lu_factor(A - c * B)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(A.shape[0]) + 0j
    for _ in range(iters):
        x = sl.lu_solve(lu, B @ x)
        x /= np.linalg.norm(x)
    return x


def refine(A, B, x):
    """c minimizing ||A x - c B x|| for a fixed vector x."""
    bx = B @ x
    return complex(np.vdot(bx, A @ x) / np.vdot(bx, bx))


def left_eigenvector(A, B, c, iters=3):
    """y with y^H (A - c B) = 0."""
    lu = sl.lu_factor((A - c * B).conj().T)
    rng = np.random.default_rng(1)
    y = rng.standard_normal(A.shape[0]) + 0j
    for _ in range(iters):
        y = sl.lu_solve(lu, B.conj().T @ y)
        y /= np.linalg.norm(y)
    return y


def polish(pair, c):
    """Inverse iteration followed by one Rayleigh-quotient step; returns (c, x)."""
    x = inverse_iteration(pair.A, pair.B, c, iters=6)
    c = refine(pair.A, pair.B, x)
    x = inverse_iteration(pair.A, pair.B, c, iters=2)
    return refine(pair.A, pair.B, x), x


def solve_spectrum(pair, filter_tol=FILTER_TOL, vectors=True):
    """Eigenvalues sorted by Im c descending, eigenvectors, and the N/2 retained flags."""
    w = _eigvals(pair.A, pair.B)
    w = w[np.argsort(-w.imag, kind="stable")]
    n_cheb = pair.grid.n
    half = max(64, n_cheb // 2)
    coarse = build_pencil(pair.profile, pair.alpha, pair.nu, half, pair.grid.length, pair.kind,
                          pair.eta, pair.beta, pair.zh_factor)
    wc = _eigvals(coarse.A, coarse.B)
    if wc.size:
        moved = np.min(np.abs(w[:, None] - wc[None, :]), axis=1)
    else:
        moved = np.full(w.size, np.inf)
    retained = moved < filter_tol
    vecs = np.zeros((pair.A.shape[0], w.size), dtype=complex)
    if vectors:
        for j in np.nonzero(retained)[0]:
            w[j], vecs[:, j] = polish(pair, w[j])
    return Spectrum(w, vecs, retained, pair)


def leading_unstable(p, alpha0, nu, N=384, L=50.0, zh_factor=ZH_FACTOR, with_flag=False):
    """Most unstable retained eigenvalue at alpha = alpha0 nu^{1/4}, rescaled by nu^{1/4}.

    The far-field continuum (Re c = U+, damped by viscosity only) is skipped.
    With ``with_flag`` the result comes with a flag telling whether Im c > 0.
    """
    if not 1e-9 <= nu <= 1e-4:
        raise ParameterError("nu must lie in [1e-9, 1e-4]")
    pair = build_pencil(p, alpha0 * nu ** 0.25, nu, N, L, "direct", zh_factor=zh_factor)
    spec = solve_spectrum(pair, vectors=False)
    keep = spec.retained & ~far_field_continuum(spec.values, p)
    vals = spec.values[keep]
    if vals.size == 0:
        vals = spec.values
    c = vals[np.argmax(vals.imag)] / nu ** 0.25
    return (c, c.imag > 0) if with_flag else c


def far_field_continuum(values, p, tol=1e-3):
    """Mask of eigenvalues on the line Re c = U+ generated outside the shear layer."""
    return np.abs(np.real(values) - p.u_plus) <= tol * p.u_plus


def mode_fields(pair, x):
    """(psi, phi, v) nodal values from a pencil eigenvector."""
    n = pair.n
    v = x[2 * n:] if pair.kind == "coupled_rotation" else None
    return x[:n], x[n:2 * n], v


def eigenpair(pair, c_guess):
    """Eigenvalue of the pencil closest to c_guess together with its right eigenvector."""
    w = _eigvals(pair.A, pair.B)
    c = w[np.argmin(np.abs(w - c_guess))]
    return polish(pair, c)


def residual_norm(pair, c, x):
    return float(np.linalg.norm(pair.A @ x - c * (pair.B @ x)) / np.linalg.norm(x))
