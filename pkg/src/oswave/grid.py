"""Wall-normal grids and sampled functions.

``PanelGrid`` glues Chebyshev-Lobatto panels together.  Differentiation is
spectral inside each panel (interface nodes take the average of both sides);
integration is Clenshaw-Curtis, cumulative in either direction.
``MappedChebyshevGrid`` is the single-domain algebraically mapped grid used by
the collocation oracle.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as npc

from .errors import ParameterError


def cheb_lobatto(n):
    """Nodes cos(pi j / n), j = 0..n, and the differentiation matrix."""
    if n == 0:
        return np.array([1.0]), np.zeros((1, 1))
    j = np.arange(n + 1)
    x = np.cos(np.pi * j / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c = c * (-1.0) ** j
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    d -= np.diag(d.sum(axis=1))
    return x, d


def clenshaw_curtis(n):
    """Clenshaw-Curtis weights on the nodes of :func:`cheb_lobatto`."""
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k * k - 1)
        v -= np.cos(n * theta[1:-1]) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / n
    return w


@lru_cache(maxsize=16)
def _reference_panel(m):
    # ascending Lobatto nodes on [-1, 1], derivative and cumulative-integral matrices
    x, d = cheb_lobatto(m - 1)
    x = x[::-1].copy()
    d = d[::-1, ::-1].copy()
    vander = npc.chebvander(x, m - 1)
    to_coef = np.linalg.inv(vander)
    integ = np.empty((m, m))
    for k in range(m):
        e = np.zeros(m)
        e[k] = 1.0
        integ[:, k] = npc.chebval(x, npc.chebint(e, lbnd=-1.0))
    q = integ @ to_coef
    return x, d, q


class PanelGrid:
    """Piecewise Chebyshev-Lobatto grid on [breaks[0], breaks[-1]]."""

    def __init__(self, breaks, m=16):
        b = np.asarray(breaks, dtype=float)
        if b.ndim != 1 or b.size < 2 or np.any(np.diff(b) <= 0):
            raise ParameterError("panel breakpoints must be strictly increasing")
        if m < 4:
            raise ParameterError("need at least 4 nodes per panel")
        self.breaks = b
        self.m = m
        x, self._d, self._q = _reference_panel(m)
        npan = b.size - 1
        half = 0.5 * np.diff(b)
        mid = 0.5 * (b[:-1] + b[1:])
        pts = mid[:, None] + half[:, None] * x[None, :]
        self.index = (np.arange(npan)[:, None] * (m - 1) + np.arange(m)[None, :])
        nodes = np.empty(npan * (m - 1) + 1)
        nodes[self.index] = pts
        nodes[0] = b[0]
        nodes[self.index[:, -1]] = b[1:]
        self.nodes = nodes
        self._half = half
        self._count = np.bincount(self.index.ravel(), minlength=nodes.size).astype(float)
        w = np.zeros(nodes.size)
        np.add.at(w, self.index, half[:, None] * self._q[-1][None, :])
        self.weights = w

    @classmethod
    def clustered(cls, length, centers=(0.0,), scales=(0.05,), m=16, max_width=1.0, growth=0.6):
        """Panels of width ~scale near each center, growing linearly away from it."""
        if length <= 0:
            raise ParameterError("grid length must be positive")
        centers = np.asarray(centers, dtype=float)
        scales = np.asarray(scales, dtype=float)

        def width(z):
            return min(max_width, float(np.min(scales + growth * np.abs(z - centers))))

        b = [0.0]
        while b[-1] < length:
            b.append(b[-1] + width(b[-1] + 0.5 * width(b[-1])))
        b[-1] = length
        if len(b) > 2 and b[-1] - b[-2] < 0.3 * (b[-2] - b[-3]):
            del b[-2]
        return cls(b, m)

    @property
    def size(self):
        return self.nodes.size

    def _panels(self, values):
        return np.asarray(values)[self.index]

    def derivative(self, values, order=1):
        out = np.asarray(values, dtype=complex)
        for _ in range(order):
            loc = (self._panels(out) @ self._d.T) / self._half[:, None]
            acc = np.zeros(self.size, dtype=complex)
            np.add.at(acc, self.index, loc)
            out = acc / self._count
        return out

    def cumulative(self, values):
        """Integral from the left end to every node."""
        loc = (self._panels(values) @ self._q.T) * self._half[:, None]
        offs = np.concatenate(([0.0], np.cumsum(loc[:, -1])))
        out = np.empty(self.size, dtype=complex)
        out[self.index] = loc + offs[:-1, None]
        return out

    def reverse_cumulative(self, values):
        """Integral from every node to the right end, summed from the right."""
        loc = (self._panels(values) @ self._q.T) * self._half[:, None]
        tot = loc[:, -1]
        tail = np.concatenate((np.cumsum(tot[::-1])[::-1][1:], [0.0]))
        out = np.empty(self.size, dtype=complex)
        out[self.index] = (tot[:, None] - loc) + tail[:, None]
        return out

    def integrate(self, values):
        return complex(self.weights @ np.asarray(values))

    def interpolate(self, values, zq):
        """Barycentric interpolation of nodal values at points zq."""
        zq = np.atleast_1d(np.asarray(zq, dtype=float))
        vals = self._panels(values)
        x, _, _ = _reference_panel(self.m)
        bw = (-1.0) ** np.arange(self.m)
        bw[0] *= 0.5
        bw[-1] *= 0.5
        bw = bw * (-1.0) ** (self.m - 1)  # ascending order flips the sign pattern
        k = np.clip(np.searchsorted(self.breaks, zq, side="right") - 1, 0, self.breaks.size - 2)
        t = (zq - 0.5 * (self.breaks[k] + self.breaks[k + 1])) / self._half[k]
        diff = t[:, None] - x[None, :]
        exact = np.isclose(diff, 0.0, atol=1e-15)
        diff[exact] = 1.0
        c = bw[None, :] / diff
        out = (c * vals[k]).sum(axis=1) / c.sum(axis=1)
        hit = exact.any(axis=1)
        out[hit] = vals[k[hit], exact[hit].argmax(axis=1)]
        return out

    def diff_matrix(self):
        """Dense first-derivative matrix consistent with :meth:`derivative`."""
        n = self.size
        d = np.zeros((n, n))
        for p, idx in enumerate(self.index):
            d[np.ix_(idx, idx)] += self._d / self._half[p]
        return d / self._count[:, None]


class MappedChebyshevGrid:
    """Chebyshev nodes mapped to [0, L] by z = L k xi / (1 + k - xi), xi = (1 - x)/2.

    Node 0 is the wall and node n is z = L.  ``k`` is chosen so that z = zh
    sits at xi = 1/2, i.e. half the nodes lie in [0, zh].
    """

    def __init__(self, n, length, zh):
        if not 0 < 2 * zh < length:
            raise ParameterError("need 0 < 2 zh < L for the mapping")
        self.n = n
        self.length = float(length)
        self.kappa = zh / (length - 2.0 * zh)
        x, dx = cheb_lobatto(n)
        xi = 0.5 * (1.0 - x)
        k = self.kappa
        self.nodes = length * k * xi / (1.0 + k - xi)
        dzdxi = length * k * (1.0 + k) / (1.0 + k - xi) ** 2
        self.D1 = (-2.0 * dx) / dzdxi[:, None]
        self.D2 = self.D1 @ self.D1
        self.weights = clenshaw_curtis(n) * 0.5 * dzdxi

    @property
    def size(self):
        return self.nodes.size

    def derivative(self, values, order=1):
        out = np.asarray(values, dtype=complex)
        for _ in range(order):
            out = self.D1 @ out
        return out

    def integrate(self, values):
        return complex(self.weights @ np.asarray(values))


@dataclass
class GridFunction:
    """Samples of a complex function on a grid, quadrature weights from the grid."""

    grid: object
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.nodes.shape:
            raise ParameterError("values do not match the grid")
        if self.grid.size < 17:
            raise ParameterError("a grid function needs at least 17 nodes")

    @property
    def z(self):
        return self.grid.nodes

    @property
    def weights(self):
        return self.grid.weights

    def d(self, order=1):
        return GridFunction(self.grid, self.grid.derivative(self.values, order))

    def integral(self):
        return self.grid.integrate(self.values)

    def sup(self):
        return float(np.max(np.abs(self.values)))

    def with_values(self, values):
        return GridFunction(self.grid, values)
