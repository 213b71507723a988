"""Shear profiles U_s(z) and critical layers U_s(z_c) = c."""

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erf

from .errors import NoConvergenceError, ParameterError, UnknownProfileError

BUILTINS = ("exponential", "tanh", "erf")


@dataclass(frozen=True)
class ShearProfile:
    """A wall-bounded shear flow with U_s(0) = 0 and U_s -> u_plus.

    The callables accept real or complex scalars and arrays.
    """

    name: str
    u_plus: float
    eval: Callable
    deriv1: Callable
    deriv2: Callable
    deriv3: Callable
    decay_rate: float

    def __call__(self, z):
        return self.eval(z)

    @property
    def wall_shear(self):
        return float(np.real(self.deriv1(0.0)))


def make_builtin(name, u_plus=1.0):
    """Exponential, tanh or erf profile scaled so that U_s'(0) = u_plus."""
    u = float(u_plus)
    if not u > 0:
        raise ParameterError("u_plus must be positive")
    if name == "exponential":
        return ShearProfile(
            name, u,
            lambda z: u * (1.0 - np.exp(-np.asarray(z))),
            lambda z: u * np.exp(-np.asarray(z)),
            lambda z: -u * np.exp(-np.asarray(z)),
            lambda z: u * np.exp(-np.asarray(z)),
            1.0,
        )
    if name == "tanh":
        def d1(z):
            t = np.tanh(z)
            return u * (1.0 - t * t)

        def d2(z):
            t = np.tanh(z)
            return -2.0 * u * t * (1.0 - t * t)

        def d3(z):
            t = np.tanh(z)
            return -2.0 * u * (1.0 - t * t) * (1.0 - 3.0 * t * t)

        return ShearProfile(name, u, lambda z: u * np.tanh(z), d1, d2, d3, 2.0)
    if name == "erf":
        k = math.sqrt(math.pi) / 2.0

        def g(z):
            z = np.asarray(z)
            return np.exp(-math.pi * z * z / 4.0)

        return ShearProfile(
            name, u,
            lambda z: u * erf(k * np.asarray(z)),
            lambda z: u * g(z),
            lambda z: -u * (math.pi / 2.0) * np.asarray(z) * g(z),
            lambda z: u * (math.pi ** 2 / 4.0 * np.asarray(z) ** 2 - math.pi / 2.0) * g(z),
            math.inf,
        )
    raise UnknownProfileError(f"unknown profile {name!r}; choose from {BUILTINS}")


@dataclass(frozen=True)
class CriticalLayer:
    zc: complex
    c: complex


def _residual(p, z, c):
    return complex(p.eval(z)) - c


def critical_layer(p, c, maxiter=100):
    """Root z_c of U_s(z) = c continuously connected to c / U_s'(0)."""
    c = complex(c)
    if not abs(c) < p.u_plus / 2.0:
        raise ParameterError("critical_layer needs |c| < u_plus / 2")
    tol = 1e-12 * max(1.0, abs(c))
    z = c / p.wall_shear
    trace = []
    best = abs(_residual(p, z, c))
    stall = 0
    rescued = False
    for it in range(maxiter):
        r = _residual(p, z, c)
        trace.append(z)
        if abs(r) <= tol:
            return CriticalLayer(z, c)
        z = z - r / complex(p.deriv1(z))
        now = abs(_residual(p, z, c))
        if now < 0.5 * best:
            best = now
            stall = 0
        else:
            stall += 1
        if stall >= 10 and not rescued:
            z = _modulus_bisection(p, c)
            best = abs(_residual(p, z, c))
            stall = 0
            rescued = True
    raise NoConvergenceError("critical layer Newton iteration failed", last=z, trace=trace)


def _modulus_bisection(p, c, steps=20):
    # golden-section on |U_s - c| along the segment [0, 2c/U_s'(0)]
    end = 2.0 * c / p.wall_shear
    a, b = 0.0, 1.0
    g = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(steps):
        t1 = b - g * (b - a)
        t2 = a + g * (b - a)
        if abs(_residual(p, t1 * end, c)) < abs(_residual(p, t2 * end, c)):
            b = t2
        else:
            a = t1
    return 0.5 * (a + b) * end


def exponential_critical_layer(c, u_plus=1.0):
    """Closed form z_c = -log(1 - c/U+) for the exponential profile."""
    return -cmath.log(1.0 - complex(c) / u_plus)
