import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import IntegrationWarning, quad

from imspekit.errors import DomainError
from imspekit.special import (
    chord_primitive,
    erf_accurate,
    erf_sum,
    gauss_pair_integral,
    gauss_pair_integral_offset,
    gauss_strip_integral,
    gauss_strip_integral_offset,
)


def _quad(f, lo, hi):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(f, lo, hi, epsabs=1e-15, epsrel=1e-14, limit=200)
    return val


def _erf_series(x, dps=40):
    # Maclaurin series, independent of mpmath.erf
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        term, total, k = x, x, 0
        while abs(term) > mpmath.mpf(10) ** (-dps):
            k += 1
            term *= -x * x / k
            total += term / (2 * k + 1)
        return 2 / mpmath.sqrt(mpmath.pi) * total


@pytest.mark.parametrize("x", [0.0, 1e-8, 0.3, -0.7, 1.5, 2.5])
def test_erf_matches_series(x):
    assert math.isclose(erf_accurate(x), float(_erf_series(x)), rel_tol=2e-16, abs_tol=1e-300)
    assert abs(erf_accurate(x, digits=30) - _erf_series(x)) < mpmath.mpf(10) ** -28


def test_erf_sum_avoids_cancellation():
    u, v = 6.0, -5.5
    with mpmath.workdps(50):
        ref = mpmath.erf(u) + mpmath.erf(v)
    assert math.isclose(erf_sum(u, v), float(ref), rel_tol=1e-13)
    assert math.isclose(erf_sum(v, u), float(ref), rel_tol=1e-13)


def test_strip_integral_examples():
    assert math.isclose(gauss_strip_integral(1.0, 0.0, 1.0), math.sqrt(math.pi) * math.erf(1.0), rel_tol=1e-15)
    # tiny theta: integral tends to the interval length
    assert math.isclose(gauss_strip_integral(1e-12, 0.3, 1.0), 2.0, rel_tol=1e-11)


def test_pair_integral_reduces_to_strip_rate_doubled():
    assert math.isclose(gauss_pair_integral(0.7, 0.2, 0.2, 1.0), gauss_strip_integral(1.4, 0.2, 1.0), rel_tol=1e-15)


@pytest.mark.parametrize("theta,a,W", [(1.0, 0.0, 1.0), (0.128, 0.7, 0.4), (10.0, -0.9, 1.0), (1e-4, 0.5, 0.1)])
def test_strip_integral_quadrature(theta, a, W):
    ref = _quad(lambda x: math.exp(-theta * (a - x) ** 2), -W, W)
    assert abs(gauss_strip_integral(theta, a, W) - ref) <= 1e-13


def test_random_tuples_against_quadrature():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        theta = 10 ** rng.uniform(-4, 1)
        a, b, c = rng.uniform(-1, 1, 3)
        W, half = rng.uniform(0, 1, 2)
        got = [
            gauss_strip_integral(theta, a, W),
            gauss_strip_integral_offset(theta, a, c, half),
            gauss_pair_integral(theta, a, b, W),
            gauss_pair_integral_offset(theta, a, b, c, half),
        ]
        ref = [
            _quad(lambda x: math.exp(-theta * (a - x) ** 2), -W, W),
            _quad(lambda x: math.exp(-theta * (a - x) ** 2), c - half, c + half),
            _quad(lambda x: math.exp(-theta * ((a - x) ** 2 + (b - x) ** 2)), -W, W),
            _quad(lambda x: math.exp(-theta * ((a - x) ** 2 + (b - x) ** 2)), c - half, c + half),
        ]
        worst = max(worst, max(abs(g - r) for g, r in zip(got, ref)))
    assert worst <= 1e-12


def test_mp_context_agrees_with_double():
    with mpmath.workdps(40):
        mp_val = gauss_pair_integral_offset(mpmath.mpf("0.3"), mpmath.mpf("0.1"), mpmath.mpf("-0.4"),
                                            mpmath.mpf("0.2"), mpmath.mpf("0.5"), mpmath.mp)
    assert math.isclose(float(mp_val), gauss_pair_integral_offset(0.3, 0.1, -0.4, 0.2, 0.5), rel_tol=1e-14)


def test_pair_offset_far_apart_log_space():
    theta, a, b = 500.0, 0.6, -0.6
    with mpmath.workdps(50):
        ref = gauss_pair_integral_offset(mpmath.mpf(theta), mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(0),
                                         mpmath.mpf(1), mpmath.mp)
    got = gauss_pair_integral_offset(theta, a, b, 0.0, 1.0)
    assert got > 0
    assert math.isclose(got, float(ref), rel_tol=1e-12)


def test_chord_primitive_area_and_derivative():
    assert math.isclose(chord_primitive(1.0, 1.0) - chord_primitive(-1.0, 1.0), math.pi / 2, rel_tol=1e-15)
    x, h = 0.4, 1e-6
    slope = (chord_primitive(x + h, 2.0) - chord_primitive(x - h, 2.0)) / (2 * h)
    assert math.isclose(slope, math.sqrt(4.0 - x * x), rel_tol=1e-9)
    assert chord_primitive(0.0, 0.0) == 0.0


@pytest.mark.parametrize("x,a", [(1.1, 1.0), (0.0, -1.0)])
def test_chord_primitive_domain(x, a):
    with pytest.raises(DomainError):
        chord_primitive(x, a)


@pytest.mark.parametrize("theta,half", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1)])
def test_integral_domain_errors(theta, half):
    with pytest.raises(DomainError):
        gauss_strip_integral_offset(theta, 0.0, 0.0, half)
    with pytest.raises(DomainError):
        gauss_pair_integral_offset(theta, 0.0, 0.1, 0.0, half)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(1e-4, 10), st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 1),
)
def test_pair_integral_symmetric_and_bounded(theta, a, b, W):
    v = gauss_pair_integral(theta, a, b, W)
    assert v == pytest.approx(gauss_pair_integral(theta, b, a, W), rel=1e-14, abs=1e-300)
    assert v == pytest.approx(gauss_pair_integral(theta, -a, -b, W), rel=1e-12, abs=1e-300)
    assert 0 <= v <= 2 * W + 1e-15
