"""Complex Airy function, its derivative, its decaying primitives and Ti.

``Ai(k, z)`` uses k = -1 for Ai', 0 for Ai, 1 and 2 for the first and second
primitives normalized to vanish as z -> +inf in |arg z| < pi/3.  Hence
Ai(1, 0) = -1/3 and Ai(2, z) = -Ai'(z) + z Ai(1, z), so Ai(2, 0) = -Ai'(0).

The heavy lifting happens in a batch kernel that returns a complex exponent
and four mantissas.  A compiled version is used when available; setting
``OSWAVE_PURE_PYTHON=1`` forces the pure-Python one.
"""

import cmath
import math
import os

import numpy as np

from . import _airy_py
from .errors import AiryOverflowError, ParameterError, PoleError

if os.environ.get("OSWAVE_PURE_PYTHON"):
    _kernel = _airy_py
else:
    try:
        from . import _airy_core as _kernel
    except ImportError:  # extension not built
        _kernel = _airy_py

BACKEND = "compiled" if _kernel is not _airy_py else "python"

AI0 = _airy_py.AI0
AIP0 = _airy_py.AIP0
AI1_0 = _airy_py.AI1_0
AI2_0 = _airy_py.AI2_0

ORDERS = (-1, 0, 1, 2)
LOG_MAX = math.log(np.finfo(float).max)
MAX_MODULUS = 1e4
TI_ROTATION = cmath.exp(-5j * math.pi / 6)
OMEGA = cmath.exp(2j * math.pi / 3)


def _check_order(k):
    if k not in ORDERS:
        raise ParameterError(f"Airy order must be one of {ORDERS}, got {k!r}")
    return k + 1


def airy_scaled(z):
    """Exponent E and mantissas m with Ai(k, z) = m[..., k+1] * exp(E).

    Works on scalars and arrays; the mantissa gets a trailing axis of length 4.
    """
    za = np.asarray(z, dtype=np.complex128)
    expo, mant = _kernel.airy_scaled_array(za.ravel())
    return expo.reshape(za.shape), mant.reshape(za.shape + (4,))


def _finish(expo, m):
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        size = expo.real + np.log(np.abs(m))
    if np.any(size > LOG_MAX):
        raise AiryOverflowError("Airy value exceeds the floating range; use airy_log_ratio")
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        out = m * np.exp(expo)
    return np.where(m == 0, 0j, out)


def airy(k, z):
    """Ai(k, z) for k in {-1, 0, 1, 2}; scalar in, scalar out."""
    col = _check_order(k)
    za = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(za) > MAX_MODULUS):
        raise ParameterError("|z| > 1e4 is outside the direct evaluation range")
    expo, mant = airy_scaled(za)
    out = _finish(expo, mant[..., col])
    return complex(out) if out.ndim == 0 else out


def airy_log_ratio(k1, k2, z):
    """Ai(k1, z) / Ai(k2, z) with the shared exponential factor cancelled."""
    c1 = _check_order(k1)
    c2 = _check_order(k2)
    _, mant = airy_scaled(z)
    den = mant[..., c2]
    if np.any(np.abs(den) < 1e-300):
        raise PoleError(f"Ai({k2}, z) vanishes to working precision")
    out = mant[..., c1] / den
    return complex(out) if np.ndim(out) == 0 else out


def airy_bi(k, z):
    """Bi(z) (k = 0) or Bi'(z) (k = -1) through the rotation formula."""
    if k not in (-1, 0):
        raise ParameterError("Bi is provided for k in {-1, 0} only")
    z = np.asarray(z, dtype=np.complex128)
    if k == 0:
        out = (cmath.exp(1j * math.pi / 6) * airy(0, OMEGA * z)
               + cmath.exp(-1j * math.pi / 6) * airy(0, OMEGA.conjugate() * z))
    else:
        out = (cmath.exp(5j * math.pi / 6) * airy(-1, OMEGA * z)
               + cmath.exp(-5j * math.pi / 6) * airy(-1, OMEGA.conjugate() * z))
    return complex(out) if np.ndim(out) == 0 else out


def ci_scaled(z):
    """Exponent and (Ci', Ci) mantissas, with Ci = Bi + i Ai = 2 e^{i pi/6} Ai(wz)."""
    expo, mant = airy_scaled(OMEGA * np.asarray(z, dtype=np.complex128))
    d = 2.0 * cmath.exp(5j * math.pi / 6) * mant[..., 0]
    a = 2.0 * cmath.exp(1j * math.pi / 6) * mant[..., 1]
    return expo, d, a


def airy_ci(k, z):
    """Ci(z) (k = 0) or Ci'(z) (k = -1)."""
    if k not in (-1, 0):
        raise ParameterError("Ci is provided for k in {-1, 0} only")
    expo, d, a = ci_scaled(z)
    out = _finish(expo, a if k == 0 else d)
    return complex(out) if np.ndim(out) == 0 else out


def tietjens_complex(w, kappa=0.0):
    """Ai(2, w) / (w [Ai(1, w) + kappa Ai(w)]) for complex w.

    With kappa = 0 and w = s e^{-5i pi/6} this is Ti(s); a nonzero kappa gives
    the slip-modified variant.
    """
    w = complex(w)
    _, mant = airy_scaled(w)
    den = mant[2] + kappa * mant[1]
    if abs(den) < 1e-300 or w == 0:
        raise PoleError("modified Tietjens denominator vanishes")
    return complex(mant[3] / (w * den))


def tietjens(s):
    """Ti(s) = Ai(2, w) / (w Ai(1, w)) with w = s e^{-5i pi/6}, s > 0."""
    s = float(s)
    if not s > 0.0:
        raise ParameterError("Tietjens argument must be positive")
    return tietjens_complex(s * TI_ROTATION)
