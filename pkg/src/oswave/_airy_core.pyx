# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Airy kernel.

Line-by-line mirror of ``_airy_py``; see that module for the algorithm.
"""

from libc.math cimport atan2, ceil, copysign, cos, exp, fabs, hypot, pi, pow, sin, sqrt

import numpy as np

cdef double AI0 = 0.35502805388781723926
cdef double AIP0 = -0.25881940379280679841
cdef double AI1_0 = -1.0 / 3.0
cdef double AI2_0 = 0.25881940379280679841

cdef double R_SERIES = 12.0
cdef double SERIES_GROWTH = 11.5
cdef double X_ASYM = 32.0
cdef double R_ASYM = pow(1.5 * X_ASYM, 2.0 / 3.0)
cdef double STEP = 1.0
cdef double TOL = 1e-17
cdef int MAX_TERMS = 400
cdef double INV_2SQRTPI = 0.5 / sqrt(pi)

cdef double complex OMEGA = cos(2.0 * pi / 3.0) + 1j * sin(2.0 * pi / 3.0)
cdef double complex OMEGA2 = OMEGA * OMEGA


cdef inline double cabs_(double complex z) nogil:
    return hypot(z.real, z.imag)


cdef inline double complex cexp_(double complex z) nogil:
    cdef double m = exp(z.real)
    return m * cos(z.imag) + 1j * (m * sin(z.imag))


cdef inline double complex csqrt_(double complex z) nogil:
    cdef double r = hypot(z.real, z.imag)
    cdef double a, b
    if r == 0.0:
        return 0.0
    if z.real >= 0.0:
        a = sqrt(0.5 * (r + z.real))
        return a + 1j * (z.imag / (2.0 * a))
    b = sqrt(0.5 * (r - z.real))
    if copysign(1.0, z.imag) < 0.0:
        b = -b
    return z.imag / (2.0 * b) + 1j * b


cdef inline double complex crect_(double r, double th) nogil:
    return r * cos(th) + 1j * (r * sin(th))


cdef struct Vec:
    double complex e
    double complex d
    double complex a
    double complex p1
    double complex p2


cdef Vec taylor_step(double complex z0, Vec v, double complex h) nogil:
    cdef double complex am1 = 0.0, an = v.a, an1 = v.d, an2
    cdef double complex hn = 1.0, t
    cdef double complex s0 = 0.0, sd = 0.0, s1 = 0.0, s2 = 0.0
    cdef double habs = cabs_(h), mag, scale
    cdef int quiet = 0, n = 0
    cdef Vec out
    while n < MAX_TERMS:
        t = an * hn
        s0 = s0 + t
        if n > 0:
            sd = sd + n * an * hn / h
        s1 = s1 + t * h / (n + 1)
        s2 = s2 + t * h * h / ((n + 1) * (n + 2))
        mag = cabs_(t) * (1.0 + habs * habs)
        scale = cabs_(s0) + cabs_(sd) * habs + cabs_(s1) + cabs_(s2) + 1e-300
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
    out.e = v.e
    out.d = sd
    out.a = s0
    out.p1 = v.p1 + s1
    out.p2 = v.p2 + v.p1 * h + s2
    return out


cdef Vec asymptotic(double complex z) nogil:
    cdef double complex sz = csqrt_(z)
    cdef double complex zeta = 2.0 / 3.0 * z * sz
    cdef double complex q = csqrt_(sz)
    cdef double complex r = 1.0 / zeta
    cdef double u = 1.0, b = 1.0, d = 1.0, v, sgn, mag, prev = 1.0
    cdef double complex rk = 1.0, su = 1.0, sv = 1.0, sb = 1.0, sdd = 1.0
    cdef int k = 1
    cdef Vec out
    while k < 80:
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        sgn = -1.0 if k % 2 else 1.0
        v = -(6.0 * k + 1) / (6.0 * k - 1) * u
        b = sgn * u - (k - 0.5) * b
        d = b - (k - 1.0 / 6.0) * d
        rk = rk * r
        mag = fabs(u)
        if fabs(v) > mag:
            mag = fabs(v)
        if fabs(b) > mag:
            mag = fabs(b)
        if fabs(d) > mag:
            mag = fabs(d)
        mag = mag * cabs_(rk)
        if mag > prev:
            break
        su = su + sgn * u * rk
        sv = sv + sgn * v * rk
        sb = sb + b * rk
        sdd = sdd + d * rk
        if mag < TOL:
            break
        prev = mag
        k += 1
    out.e = -zeta
    out.d = -INV_2SQRTPI * q * sv
    out.a = INV_2SQRTPI / q * su
    out.p1 = -INV_2SQRTPI / (q * q * q) * sb
    out.p2 = INV_2SQRTPI / (q * q * q * q * q) * sdd
    return out


cdef Vec ANCHOR = asymptotic(R_ASYM + 0j)


cdef Vec direct(double complex z) nogil:
    cdef double r = cabs_(z), th, x
    cdef Vec v
    cdef int n, j
    cdef double complex h, zi, zj
    if r == 0.0:
        v.e = 0.0
        v.d = AIP0
        v.a = AI0
        v.p1 = AI1_0
        v.p2 = AI2_0
        return v
    th = atan2(z.imag, z.real)
    x = 2.0 / 3.0 * pow(r, 1.5)
    if r <= R_SERIES and x * (1.0 + cos(1.5 * th)) <= SERIES_GROWTH:
        v.e = 0.0
        v.d = AIP0
        v.a = AI0
        v.p1 = AI1_0
        v.p2 = AI2_0
        return taylor_step(0.0, v, z)
    if x >= X_ASYM:
        return asymptotic(z)
    v = ANCHOR
    n = <int>ceil((R_ASYM - r) / STEP)
    if n < 1:
        n = 1
    h = (r - R_ASYM) / n
    zi = R_ASYM
    for j in range(n):
        v = taylor_step(zi, v, h)
        zi = zi + h
    n = <int>ceil(r * fabs(th) / STEP)
    zi = r
    for j in range(1, n + 1):
        zj = crect_(r, th * j / n)
        v = taylor_step(zi, v, zj - zi)
        zi = zj
    return v


cdef Vec scaled_point(double complex z) nogil:
    cdef double r = cabs_(z), th = atan2(z.imag, z.real)
    cdef double x = 2.0 / 3.0 * pow(r, 1.5)
    cdef Vec v1, v2, out
    cdef double complex big, f0, f1, f2
    if (r <= R_SERIES and x * (1.0 + cos(1.5 * th)) <= SERIES_GROWTH) or fabs(th) <= 2.0 * pi / 3.0:
        return direct(z)
    v1 = direct(OMEGA * z)
    v2 = direct(OMEGA2 * z)
    big = v1.e if v1.e.real >= v2.e.real else v2.e
    if big.real < 0.0:
        big = 0.0
    f1 = cexp_(v1.e - big)
    f2 = cexp_(v2.e - big)
    f0 = cexp_(-big)
    out.e = big
    out.d = -OMEGA2 * v1.d * f1 - OMEGA * v2.d * f2
    out.a = -OMEGA * v1.a * f1 - OMEGA2 * v2.a * f2
    out.p1 = -f0 - v1.p1 * f1 - v2.p1 * f2
    out.p2 = -z * f0 - OMEGA2 * v1.p2 * f1 - OMEGA * v2.p2 * f2
    return out


def airy_scaled_point(z):
    """Return (E, m) with Ai(k, z) = m[k+1] * exp(E) for k = -1, 0, 1, 2."""
    cdef Vec v = scaled_point(complex(z))
    return v.e, (v.d, v.a, v.p1, v.p2)


def airy_scaled_array(z):
    """Batch version of :func:`airy_scaled_point` on a 1-D complex array."""
    zz = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    expo = np.empty(zz.size, dtype=np.complex128)
    mant = np.empty((zz.size, 4), dtype=np.complex128)
    cdef double complex[::1] zv = zz
    cdef double complex[::1] ev = expo
    cdef double complex[:, ::1] mv = mant
    cdef Py_ssize_t i, n = zz.shape[0]
    cdef Vec v
    with nogil:
        for i in range(n):
            v = scaled_point(zv[i])
            ev[i] = v.e
            mv[i, 0] = v.d
            mv[i, 1] = v.a
            mv[i, 2] = v.p1
            mv[i, 3] = v.p2
    return expo, mant
