"""Pure-Python Airy kernel.

Evaluates Ai', Ai and the two decaying primitives Ai(1, .), Ai(2, .) at a
batch of complex points.  Every result is returned as a common complex
exponent plus four mantissas so that callers can form ratios and products
far outside the floating range.  The compiled kernel in ``_airy_core.pyx``
mirrors this file line by line; keep the two in sync.
"""

import cmath
import math

import numpy as np

AI0 = 0.35502805388781723926
AIP0 = -0.25881940379280679841
AI1_0 = -1.0 / 3.0
AI2_0 = 0.25881940379280679841  # Ai(2, 0) = -Ai'(0)

R_SERIES = 12.0       # largest modulus handled by the Maclaurin series
SERIES_GROWTH = 11.5  # bound on zeta*(1 + cos(3 arg z / 2)), i.e. cancellation e^11.5
X_ASYM = 32.0         # |zeta| beyond which the asymptotic series is used
R_ASYM = (1.5 * X_ASYM) ** (2.0 / 3.0)
STEP = 1.0            # Taylor step length for continuation paths
TOL = 1e-17
MAX_TERMS = 400

OMEGA = cmath.exp(2j * math.pi / 3)
OMEGA2 = OMEGA * OMEGA
INV_2SQRTPI = 0.5 / math.sqrt(math.pi)


def taylor_step(z0, d0, a0, p1, p2, h):
    """Advance (Ai', Ai, Ai1, Ai2) from z0 to z0 + h with one Taylor expansion."""
    # Ai'' = z Ai gives (n+2)(n+1) a_{n+2} = z0 a_n + a_{n-1}
    am1 = 0j
    an = a0
    an1 = d0
    hn = 1.0 + 0j
    s0 = 0j
    sd = 0j
    s1 = 0j
    s2 = 0j
    habs = abs(h)
    quiet = 0
    n = 0
    while n < MAX_TERMS:
        t = an * hn
        s0 += t
        if n > 0:
            sd += n * an * hn / h
        s1 += t * h / (n + 1)
        s2 += t * h * h / ((n + 1) * (n + 2))
        mag = abs(t) * (1.0 + habs * habs)
        scale = abs(s0) + abs(sd) * habs + abs(s1) + abs(s2) + 1e-300
        if mag <= TOL * scale:
            quiet += 1
            if quiet >= 3 and n > 4:
                break
        else:
            quiet = 0
        an2 = (z0 * an + am1) / ((n + 2) * (n + 1))
        am1 = an
        an = an1
        an1 = an2
        hn = hn * h
        n += 1
    return sd, s0, p1 + s1, p2 + p1 * h + s2


def asymptotic(z):
    """Exponent and mantissas from the large-|z| expansions, |arg z| <= 2pi/3."""
    sz = cmath.sqrt(z)
    zeta = 2.0 / 3.0 * z * sz
    q = cmath.sqrt(sz)
    r = 1.0 / zeta
    u = 1.0
    b = 1.0
    d = 1.0
    rk = 1.0 + 0j
    su = 1.0 + 0j
    sv = 1.0 + 0j
    sb = 1.0 + 0j
    sd = 1.0 + 0j
    prev = 1.0
    k = 1
    while k < 80:
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        sgn = -1.0 if k % 2 else 1.0
        v = -(6 * k + 1) / (6 * k - 1) * u
        b = sgn * u - (k - 0.5) * b
        d = b - (k - 1.0 / 6.0) * d
        rk = rk * r
        mag = max(abs(u), abs(v), abs(b), abs(d)) * abs(rk)
        if mag > prev:
            break
        su += sgn * u * rk
        sv += sgn * v * rk
        sb += b * rk
        sd += d * rk
        if mag < TOL:
            break
        prev = mag
        k += 1
    pre = INV_2SQRTPI
    return (-zeta, -pre * q * sv, pre / q * su,
            -pre / (q * q * q) * sb, pre / (q * q * q * q * q) * sd)


def _anchor():
    return asymptotic(R_ASYM + 0j)


ANCHOR = None


def _direct(z):
    """Regions that need no connection formula."""
    r = abs(z)
    if r == 0.0:
        return 0j, AIP0 + 0j, AI0 + 0j, AI1_0 + 0j, AI2_0 + 0j
    th = cmath.phase(z)
    x = 2.0 / 3.0 * r ** 1.5
    if r <= R_SERIES and x * (1.0 + math.cos(1.5 * th)) <= SERIES_GROWTH:
        d, a, p1, p2 = taylor_step(0j, AIP0, AI0, AI1_0, AI2_0, z)
        return 0j, d, a, p1, p2
    if x >= X_ASYM:
        return asymptotic(z)
    return anchored(z)


def anchored(z):
    """Asymptotic values at the real anchor R_ASYM carried to z by Taylor steps.

    Walks in along the real axis, then round the arc.  Ai grows along both
    legs, so the recessive error component never gets amplified.
    """
    global ANCHOR
    z = complex(z)
    r = abs(z)
    th = cmath.phase(z)
    if ANCHOR is None:
        ANCHOR = _anchor()
    e, d, a, p1, p2 = ANCHOR
    n = max(1, int(math.ceil((R_ASYM - r) / STEP)))
    h = (r - R_ASYM) / n
    zi = R_ASYM + 0j
    for _ in range(n):
        d, a, p1, p2 = taylor_step(zi, d, a, p1, p2, h)
        zi = zi + h
    n = int(math.ceil(r * abs(th) / STEP))
    zi = r + 0j
    for j in range(1, n + 1):
        zj = cmath.rect(r, th * j / n)
        d, a, p1, p2 = taylor_step(zi, d, a, p1, p2, zj - zi)
        zi = zj
    return e, d, a, p1, p2


def airy_scaled_point(z):
    """Return (E, m) with Ai(k, z) = m[k+1] * exp(E) for k = -1, 0, 1, 2."""
    z = complex(z)
    r = abs(z)
    th = cmath.phase(z)
    x = 2.0 / 3.0 * r ** 1.5
    series_ok = r <= R_SERIES and x * (1.0 + math.cos(1.5 * th)) <= SERIES_GROWTH
    if series_ok or abs(th) <= 2.0 * math.pi / 3.0:
        e, d, a, p1, p2 = _direct(z)
        return e, (d, a, p1, p2)
    # Ai(z) = -w Ai(wz) - w^2 Ai(w^2 z) and its derivative/primitive analogues
    e1, d1, a1, q1, s1 = _direct(OMEGA * z)
    e2, d2, a2, q2, s2 = _direct(OMEGA2 * z)
    big = e1 if e1.real >= e2.real else e2
    if big.real < 0.0:
        big = 0j
    f1 = cmath.exp(e1 - big)
    f2 = cmath.exp(e2 - big)
    f0 = cmath.exp(-big)
    d = -OMEGA2 * d1 * f1 - OMEGA * d2 * f2
    a = -OMEGA * a1 * f1 - OMEGA2 * a2 * f2
    p1 = -f0 - q1 * f1 - q2 * f2
    p2 = -z * f0 - OMEGA2 * s1 * f1 - OMEGA * s2 * f2
    return big, (d, a, p1, p2)


def airy_scaled_array(z):
    """Batch version of :func:`airy_scaled_point` on a 1-D complex array."""
    z = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    expo = np.empty(z.size, dtype=np.complex128)
    mant = np.empty((z.size, 4), dtype=np.complex128)
    for i, zi in enumerate(z):
        e, m = airy_scaled_point(zi)
        expo[i] = e
        mant[i] = m
    return expo, mant
