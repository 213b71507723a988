import cmath
import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import trapezoid

from oswave import _airy_py, specfun
from oswave.errors import AiryOverflowError, ParameterError, PoleError
from oswave.specfun import airy, airy_bi, airy_ci, airy_log_ratio, airy_scaled, tietjens

# mpmath at 30 digits: Ai', Ai, Ai1 = -int_0^inf Ai(z+t) dt, Ai2 = int_0^inf t Ai(z+t) dt
GOLDEN = [
    (1 + 0.5j, (-0.15515939167449752 + 0.07138312043218834j, 0.11791053318992208 - 0.07897644336959969j,
                -0.07719302508868123 + 0.06478040170562509j, 0.045576165733003736 - 0.045199231270903854j)),
    (-2 + 1j, (1.1349598127621308 - 0.8858793656453342j, 0.5563045393711925 + 0.7898014381882759j,
               -1.5869342869210867 + 0.3228027128576251j, 1.7161060482224177 - 1.3466603469910028j)),
    (0.5 - 2j, (-0.03674926477766766 - 0.7457372872160632j, -0.26626152971283157 + 0.45548648549281234j,
                0.2945127601915397 - 0.201579803003809j, -0.21915396113418048 + 0.05592186533107925j)),
    (-2.598076211353316 - 1.5j, (4.252353852572411 + 0.06365120650223019j, -0.5156140343649812 - 2.443785788232975j,
                                 -2.470657762872706 + 0.4869107437728296j, 2.8969694232018135 + 2.377304217358291j)),
    (4 + 0j, (-0.001958640950204179, 0.0009515638512048018, -0.0004406879472112064, 0.00019588916135935346)),
    (-3 - 0.5j, (0.49990997337087834 - 0.6268792167466216j, -0.5281723418823496 - 0.18682298552967844j,
                 -1.1777269457902937 + 0.213811574782893j, 3.1401766513914495 + 0.5743079652930895j)),
]

TI_GOLDEN = [
    (0.5, 1.5396677471128264 - 0.7616423226882586j),
    (1.0, 0.8916242122250893 - 0.3502785582758421j),
    (2.0, 0.6014310647848722 - 0.06741725035168487j),
    (3.0, 0.46458313817284375 + 0.17390142233657874j),
    (4.0, 0.11804664550037702 + 0.3072137882842249j),
    (6.0, 0.048358976258713084 + 0.042549417916047105j),
    (10.0, 0.02223097161338519 + 0.023712008840814505j),
    (20.0, 0.007900592264164667 + 0.00806657991796862j),
]

disk = st.builds(lambda r, t: r * cmath.exp(1j * t),
                 st.floats(0.0, 10.0), st.floats(-math.pi, math.pi))


@pytest.mark.parametrize("z,vals", GOLDEN)
def test_matches_mpmath(z, vals):
    for k, ref in zip(specfun.ORDERS, vals):
        assert abs(airy(k, z) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_values_at_origin():
    assert airy(0, 0) == pytest.approx(0.355028053887817239, rel=1e-14)
    assert airy(-1, 0) == pytest.approx(-0.258819403792806798, rel=1e-14)
    assert airy(1, 0) == pytest.approx(-1.0 / 3.0, rel=1e-14)
    assert airy(2, 0) == pytest.approx(0.25881940379280679841, rel=1e-14)


def test_second_primitive_against_trapezoid():
    # Ai2(x) - Ai2(0) = int_0^x Ai1
    x = np.linspace(0.0, 1.0, 10001)
    vals = np.array([airy(1, t) for t in x])
    integral = trapezoid(vals, x)
    assert abs((airy(2, 1.0) - airy(2, 0.0)) - integral) < 1e-8


def test_order_is_validated():
    with pytest.raises(ParameterError):
        airy(3, 1.0)
    with pytest.raises(ParameterError):
        airy_log_ratio(0, 5, 1.0)


def test_overflow_is_reported():
    with pytest.raises(AiryOverflowError):
        airy(0, -1000.0 * cmath.exp(0.2j))
    expo, m = airy_scaled(-1000.0 * cmath.exp(0.2j))
    assert np.all(np.isfinite(m)) and expo.real > 700


def test_modulus_limit():
    with pytest.raises(ParameterError):
        airy(0, 2e4)


def test_log_ratio_far_out():
    z = 50.0 * cmath.exp(1j * math.pi / 6)
    r = airy_log_ratio(0, -1, z)
    assert abs(r / (-z ** -0.5) - 1.0) < 0.1
    assert airy_log_ratio(1, 1, z) == pytest.approx(1.0)


def test_tietjens_pole():
    with pytest.raises(PoleError):
        specfun.tietjens_complex(0.0)


@given(disk)
def test_wronskian(z):
    ai, dai = airy(0, z), airy(-1, z)
    bi, dbi = airy_bi(0, z), airy_bi(-1, z)
    scale = max(1.0, abs(ai * dbi) + abs(dai * bi))
    assert abs(ai * dbi - dai * bi - 1.0 / math.pi) <= 1e-10 * scale


@given(st.builds(complex, st.floats(-5, 5), st.floats(-5, 5)).filter(lambda z: abs(z) <= 5))
def test_airy_equation_and_derivative_chain(z):
    h = 1e-5
    for k in (0, 1, 2):
        fd = (airy(k, z + h) - airy(k, z - h)) / (2 * h)
        lower = airy(k - 1, z)
        assert abs(fd - lower) <= 1e-6 * max(1.0, abs(lower))
    d2 = (airy(-1, z + h) - airy(-1, z - h)) / (2 * h)
    ref = z * airy(0, z)
    assert abs(d2 - ref) <= 1e-6 * max(1.0, abs(ref))


def test_ci_combination():
    z = 0.7 - 0.4j
    assert abs(airy_ci(0, z) - (airy_bi(0, z) + 1j * airy(0, z))) < 1e-13
    assert abs(airy_ci(-1, z) - (airy_bi(-1, z) + 1j * airy(-1, z))) < 1e-13


@pytest.mark.parametrize("s,ref", TI_GOLDEN)
def test_tietjens_values(s, ref):
    assert abs(tietjens(s) - ref) <= 1e-12 * abs(ref)


def test_tietjens_decay_and_extremum():
    assert abs(tietjens(40)) < abs(tietjens(20)) < abs(tietjens(10))
    s = np.arange(1.0, 4.0, 1e-3)
    im = np.array([tietjens(v).imag for v in s])
    inner = np.nonzero((im[1:-1] > im[:-2]) & (im[1:-1] > im[2:]))[0] + 1
    assert inner.size == 1
    assert abs(s[inner[0]] - 3.805818583231249) < 2e-3


def test_tietjens_domain():
    with pytest.raises(ParameterError):
        tietjens(0.0)


@given(st.lists(disk, min_size=1, max_size=8))
def test_array_and_scalar_agree(zs):
    arr = airy(0, np.array(zs))
    for z, v in zip(zs, arr):
        assert v == airy(0, z)


def test_backends_agree():
    rng = np.random.default_rng(5)
    z = 12 * (rng.random(200) - 0.5) + 12j * (rng.random(200) - 0.5)
    e1, m1 = _airy_py.airy_scaled_array(z)
    e2, m2 = specfun.airy_scaled(z)
    v1 = m1 * np.exp(e1)[:, None]
    v2 = m2 * np.exp(e2)[:, None]
    assert np.max(np.abs(v1 - v2) / np.maximum(1.0, np.abs(v1))) < 1e-12


def test_pure_python_switch():
    code = "from oswave import specfun; print(specfun.BACKEND, specfun.airy(0, 1.0))"
    env = dict(os.environ, OSWAVE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, value = out.stdout.split()
    assert backend == "python"
    assert complex(value) == pytest.approx(0.1352924163128814, rel=1e-13)
