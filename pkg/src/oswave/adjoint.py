"""Transposed Orr-Sommerfeld operator: Airy Green function, slow adjoint mode, pairings.

Airy(f) = (U - c + eps a^2) f - eps f'' so that Orr^t = (D^2 - a^2) Airy - U''
holds exactly.  The fast solutions are Langer-transformed Airy functions

    phi_- = g'^{-1/2} Ai(gamma g),   phi_+ = g'^{-1/2} Ci(gamma g),

with Ci = Bi + i Ai, whose Wronskian is exactly gamma / pi.  Kernels are
evaluated on a layer window [0, Re z_c + M / |gamma|]; beyond it the outer
expansion Airy^{-1} f = f / (U - c) + eps (f / (U - c))'' / (U - c) is used.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import rayleigh
from .errors import DegeneratePairingError, ResonanceError, SplitFailureError, WronskianDegeneracyError
from .grid import GridFunction, PanelGrid
from .orrsommerfeld import langer_derivatives
from .specfun import airy_scaled, ci_scaled

WINDOW = 40.0


@dataclass
class AdjointModePieces:
    base: GridFunction
    f1_at_zc: complex
    g1: GridFunction
    psi3: GridFunction
    assembled: GridFunction
    f1: GridFunction = None
    wall_ratio: complex = 0j


@dataclass
class NormalizedPair:
    direct_mode: GridFunction
    adjoint_mode: GridFunction
    pairing_value: complex
    velocity_pairing: complex = 0j
    boundary_term: complex = 0j


def _lap(sp, f):
    return f.grid.derivative(f.values, 2) - sp.alpha ** 2 * f.values


def airy_apply(sp, p, f):
    """(U - c + eps a^2) f - eps f''."""
    z = f.z
    eps = sp.epsilon
    out = (p.eval(z) - sp.c + eps * sp.alpha ** 2) * f.values - eps * f.grid.derivative(f.values, 2)
    return GridFunction(f.grid, out)


def orr_adjoint_apply(sp, p, f):
    """(D^2 - a^2)[(U - c) f] - U'' f - eps (D^2 - a^2)^2 f."""
    z = f.z
    w = GridFunction(f.grid, (p.eval(z) - sp.c) * f.values)
    lf = _lap(sp, f)
    llf = f.grid.derivative(lf, 2) - sp.alpha ** 2 * lf
    return GridFunction(f.grid, _lap(sp, w) - p.deriv2(z) * f.values - sp.epsilon * llf)


def airy_split_apply(sp, p, f):
    """(D^2 - a^2) Airy(f) - U'' f, equal to orr_adjoint_apply."""
    a = airy_apply(sp, p, f)
    return GridFunction(f.grid, _lap(sp, a) - p.deriv2(f.z) * f.values)


# ------------------------------------------------------------ fast solutions

def langer_modes(sp, p, z):
    """phi_-, phi_-', phi_+, phi_+' at real points z (direct values)."""
    z = np.asarray(z, dtype=float)
    gam = sp.gamma
    g, g1, g2 = langer_derivatives(p, sp.zc, z)
    w = gam * g
    ea, ma = airy_scaled(w)
    ec, dc, ac = ci_scaled(w)
    amp = g1 ** -0.5
    damp = -0.5 * g2 * g1 ** -1.5
    with np.errstate(over="raise", under="ignore"):
        sa = np.exp(ea)
        sc = np.exp(ec)
    ai, dai = ma[:, 1] * sa, ma[:, 0] * sa
    ci, dci = ac * sc, dc * sc
    phi_m = amp * ai
    dphi_m = damp * ai + amp * gam * g1 * dai
    phi_p = amp * ci
    dphi_p = damp * ci + amp * gam * g1 * dci
    return phi_m, dphi_m, phi_p, dphi_p


def wronskian(sp, p, z):
    pm, dpm, pp, dpp = langer_modes(sp, p, np.atleast_1d(z))
    return pm * dpp - dpm * pp


def layer_window(sp, p, m=16, extent=WINDOW):
    """Panel grid on [0, Re z_c + extent / |gamma|] resolving the 1/|gamma| scale."""
    scale = 1.0 / abs(sp.gamma)
    zr = max(sp.zc.zc.real, 0.0)
    zmax = zr + extent * scale
    grid = PanelGrid.clustered(zmax, (0.0, zr), (0.25 * scale, 0.25 * scale), m=m,
                               max_width=0.5 * scale, growth=0.5)
    return grid


def _check_wronskian(sp, p):
    w = wronskian(sp, p, [max(sp.zc.zc.real, 0.0)])[0]
    ratio = abs(w / sp.gamma)
    if not 1e-3 <= ratio <= 1e3:
        raise WronskianDegeneracyError(f"|W/gamma| = {ratio:.3e} is off the gamma scale")
    return sp.gamma / math.pi


def _green_window(sp, p, grid, fvals):
    # two-integral formula on the window, with the tail beyond the window end estimated
    pm, dpm, pp, dpp = langer_modes(sp, p, grid.nodes)
    wr = _check_wronskian(sp, p)
    eps = sp.epsilon
    i_plus = grid.cumulative(pp * fvals)
    i_minus = grid.reverse_cumulative(pm * fvals)
    zend = grid.nodes[-1:]
    g, g1, _ = langer_derivatives(p, sp.zc, zend)
    w = sp.gamma * g[0]
    i_minus = i_minus + pm[-1] * fvals[-1] / (sp.gamma * g1[0] * np.sqrt(w))
    u = (pm * i_plus + pp * i_minus) / (eps * wr)
    du = (dpm * i_plus + dpp * i_minus) / (eps * wr)
    return u, du


def _outer(sp, p, z, fvals, dfvals=None, d2fvals=None):
    # f/(U-c) + eps (f/(U-c))''/(U-c) for smooth f; derivatives of f default to e^{-a z}
    a = sp.alpha
    w = p.eval(z) - sp.c
    u1, u2 = p.deriv1(z), p.deriv2(z)
    if dfvals is None:
        dfvals = -a * fvals
        d2fvals = a * a * fvals
    h = fvals / w
    dh = dfvals / w - fvals * u1 / w ** 2
    d2h = d2fvals / w - 2 * dfvals * u1 / w ** 2 - fvals * u2 / w ** 2 + 2 * fvals * u1 ** 2 / w ** 3
    return h + sp.epsilon * d2h / w, dh


def airy_green_apply(sp, p, f):
    """G^Ai * f on the grid of f: window formula near the layer, outer expansion beyond."""
    grid = f.grid
    win = layer_window(sp, p)
    zmax = win.nodes[-1]
    z = grid.nodes
    inside = z <= zmax
    out = np.empty(z.size, dtype=complex)
    if hasattr(grid, "interpolate"):
        fw = grid.interpolate(f.values, np.minimum(win.nodes, z[-1]))
    else:
        fw = np.interp(win.nodes, z, f.values.real) + 1j * np.interp(win.nodes, z, f.values.imag)
    u, _ = _green_window(sp, p, win, fw)
    out[inside] = win.interpolate(u, z[inside])
    if np.any(~inside):
        df = grid.derivative(f.values, 1)
        d2f = grid.derivative(f.values, 2)
        o, _ = _outer(sp, p, z[~inside], f.values[~inside], df[~inside], d2f[~inside])
        out[~inside] = o
    return GridFunction(grid, out)


def build_psi3(sp, p, grid=None):
    """psi_3 = G^Ai * e^{-a z} from the explicit two-integral formula.

    With no grid the result lives on the layer window.  Otherwise nodes inside
    the window are interpolated and nodes beyond use the outer expansion.
    """
    win = layer_window(sp, p)
    u, du = _green_window(sp, p, win, np.exp(-sp.alpha * win.nodes))
    if grid is None:
        return GridFunction(win, u)
    return GridFunction(grid, _extend(sp, p, win, u, grid.nodes))


def _extend(sp, p, win, vals, z):
    zmax = win.nodes[-1]
    inside = z <= zmax
    out = np.empty(z.size, dtype=complex)
    out[inside] = win.interpolate(vals, z[inside])
    if np.any(~inside):
        out[~inside], _ = _outer(sp, p, z[~inside], np.exp(-sp.alpha * z[~inside]))
    return out


def psi3_wall(sp, p):
    """(psi_3(0), psi_3'(0)) from the window formula."""
    win = layer_window(sp, p)
    u, du = _green_window(sp, p, win, np.exp(-sp.alpha * win.nodes))
    return u[0], du[0]


def airy_defect(sp, p, f=None):
    """sup |Airy(G^Ai * f) - f| / sup |G^Ai * f| on the layer window (f = e^{-a z} by default)."""
    win = layer_window(sp, p)
    fv = np.exp(-sp.alpha * win.nodes) if f is None else f(win.nodes)
    u, _ = _green_window(sp, p, win, fv)
    res = airy_apply(sp, p, GridFunction(win, u)).values - fv
    # the last panels feel the truncated tail; measure up to 3/4 of the window
    zr = max(sp.zc.zc.real, 0.0)
    keep = win.nodes <= zr + 0.75 * (win.nodes[-1] - zr)
    return float(np.max(np.abs(res[keep])) / np.max(np.abs(u)))


# ------------------------------------------------------------ slow adjoint mode

def adjoint_grid(sp, p, length=30.0, m=16):
    scale = min(0.25 / abs(sp.gamma), 0.5 * max(abs(sp.zc.zc.imag), 1e-4))
    zr = max(sp.zc.zc.real, 0.0)
    return PanelGrid.clustered(length, (0.0, zr), (scale, scale), m=m, max_width=1.0, growth=0.5)


def f1_at_zc(sp, p):
    """Closed form -a (U+ - c)^2 e^{-a z_c} / U'(z_c)."""
    zc = sp.zc.zc
    return -sp.alpha * (p.u_plus - sp.c) ** 2 * np.exp(-sp.alpha * zc) / complex(p.deriv1(zc))


def build_adjoint_slow_mode(sp, p, grid=None):
    """e^{-a z} - f1(z_c) psi_3 - g1 with f1 = RaySolver((U - c) e0), e0 = -2 a U' e^{-a z}."""
    grid = adjoint_grid(sp, p) if grid is None else grid
    z = grid.nodes
    a = sp.alpha
    ctx = rayleigh.make_context(p, sp.c, a)
    uc = p.eval(z) - sp.c
    e0 = -2.0 * a * p.deriv1(z) * np.exp(-a * z)
    f1, _ = rayleigh.raysolver_direct(ctx, GridFunction(grid, uc * e0))
    fz = f1_at_zc(sp, p)
    g1 = (f1.values - fz) / uc
    bound = 1e4 * (1.0 + np.max(np.abs(f1.values))) * (1.0 + abs(math.log(max(abs(sp.zc.zc.imag), 1e-300))))
    if not np.all(np.isfinite(g1)) or np.max(np.abs(g1)) > bound:
        raise SplitFailureError("(f1 - f1(z_c)) / (U - c) is not bounded near the critical layer")
    base = np.exp(-a * z)
    win = layer_window(sp, p)
    u, du = _green_window(sp, p, win, np.exp(-a * win.nodes))
    psi3 = _extend(sp, p, win, u, z)
    assembled = base - fz * psi3 - g1
    dg1 = grid.derivative(g1, 1)
    d0 = -a - fz * du[0] - dg1[0]
    ratio = d0 / assembled[0]
    return AdjointModePieces(GridFunction(grid, base), fz, GridFunction(grid, g1),
                             GridFunction(grid, psi3), GridFunction(grid, assembled),
                             f1, ratio)


def fast_wall_ratio(sp):
    """gamma Ai'(-gamma z_c) / Ai(-gamma z_c)."""
    w = -sp.gamma * sp.zc.zc
    _, m = airy_scaled(w)
    return sp.gamma * m[0] / m[1]


def adjoint_dispersion_residual(sp, p, pieces=None):
    """Slow-mode wall ratio minus the fast-mode wall ratio."""
    pieces = build_adjoint_slow_mode(sp, p) if pieces is None else pieces
    return pieces.wall_ratio - fast_wall_ratio(sp)


# ------------------------------------------------------------ pairings

def stream_pairing(psi1, psi2, alpha):
    """int psi1 conj((D^2 - a^2) psi2)."""
    g = psi1.grid
    lap2 = g.derivative(psi2.values, 2) - alpha ** 2 * psi2.values
    return g.integrate(psi1.values * np.conj(lap2))


def velocity_pairing(psi1, psi2, alpha):
    """int v1 . conj(v2) with v = (psi', -i a psi)."""
    g = psi1.grid
    d1 = g.derivative(psi1.values, 1)
    d2 = g.derivative(psi2.values, 1)
    return g.integrate(d1 * np.conj(d2) + alpha ** 2 * psi1.values * np.conj(psi2.values))


def boundary_term(psi1, psi2):
    """[psi1 conj(psi2')] between the end points of the grid."""
    d2 = psi2.grid.derivative(psi2.values, 1)
    v = psi1.values * np.conj(d2)
    z = psi1.z
    i0, i1 = int(np.argmin(z)), int(np.argmax(z))
    return v[i1] - v[i0]


def hilbert_adjoint(chi):
    """Eigenfunction of the formal L^2 adjoint from an eigenfunction of Orr^t."""
    return chi.with_values(np.conj(chi.values))


def normalize_pair(direct, adjoint_mode, alpha):
    """Scale the adjoint mode so that int psi1 conj((D^2 - a^2) psi2) = 1.

    The pairing counts as degenerate below 1e-12 of its Cauchy-Schwarz bound.

    The velocity pairing equals minus the stream pairing plus the boundary term
    [psi1 conj(psi2')]; both are reported.
    """
    raw = stream_pairing(direct, adjoint_mode, alpha)
    g = direct.grid
    lap2 = g.derivative(adjoint_mode.values, 2) - alpha ** 2 * adjoint_mode.values
    scale = math.sqrt(abs(g.integrate(np.abs(direct.values) ** 2)) * abs(g.integrate(np.abs(lap2) ** 2)))
    if abs(raw) < 1e-12 * scale or scale == 0.0:
        raise DegeneratePairingError("stream-function pairing vanishes")
    scaled = adjoint_mode.with_values(adjoint_mode.values / np.conj(raw))
    vel = velocity_pairing(direct, scaled, alpha)
    bt = boundary_term(direct, scaled)
    return NormalizedPair(direct, scaled, stream_pairing(direct, scaled, alpha), vel, bt)


def sesquilinear(x, y):
    return complex(np.vdot(np.asarray(y), np.asarray(x)))


def _values(x):
    return x.values if isinstance(x, GridFunction) else np.asarray(x, dtype=complex)


def perturb_eigenvalue(A0_apply, A1_apply, e0, lambda0, v_adj, pairing=sesquilinear, tol=1e-6):
    """First-order eigenvalue shift and eigenvector correction of A0 + t A1.

    lambda1 = (A1 e0, v) / (e0, v); e1 solves (A0 - lambda0) e1 = lambda1 e0 - A1 e0
    in the least-squares sense with e1 orthogonal to e0.
    """
    ev = _values(e0)
    vv = _values(v_adj)
    wrap = e0.with_values if isinstance(e0, GridFunction) else (lambda x: x)
    den = pairing(wrap(ev), wrap(vv))
    if abs(den) < 1e-14:
        raise DegeneratePairingError("eigenvector and adjoint are orthogonal")
    a1e = _values(A1_apply(wrap(ev)))
    lam1 = pairing(wrap(a1e), wrap(vv)) / den
    n = ev.size
    cols = np.empty((n, n), dtype=complex)
    for j in range(n):
        unit = np.zeros(n, dtype=complex)
        unit[j] = 1.0
        cols[:, j] = _values(A0_apply(wrap(unit)))
    mat = np.vstack([cols - lambda0 * np.eye(n), np.conj(ev)[None, :]])
    rhs = np.concatenate([lam1 * ev - a1e, [0.0]])
    e1, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    res = np.linalg.norm(mat @ e1 - rhs) / max(1.0, np.linalg.norm(rhs))
    if res > tol:
        raise ResonanceError(f"complement solve residual {res:.2e} exceeds {tol:g}")
    return lam1, wrap(e1)


def second_order_eigenvalue(A1_apply, e0, e1, lambda1, v_adj, pairing=sesquilinear):
    """lambda2 = ((A1 - lambda1) e1, v) / (e0, v) from one more step of the scheme."""
    ev, e1v, vv = _values(e0), _values(e1), _values(v_adj)
    wrap = e0.with_values if isinstance(e0, GridFunction) else (lambda x: x)
    num = pairing(wrap(_values(A1_apply(wrap(e1v))) - lambda1 * e1v), wrap(vv))
    return num / pairing(wrap(ev), wrap(vv))
