import math
import warnings

import mpmath
import numpy as np
import pytest
from scipy.integrate import IntegrationWarning, dblquad

from imspekit.design import Design, Hyperparameters
from imspekit.errors import DomainError
from imspekit.rmatrix import (
    DiskSpec,
    RectDomain,
    build_r_disk,
    build_r_rect,
    strip_center,
    strip_geometry,
    strips,
    width_avg,
    width_simple,
)


def _dblquad(f, xlo, xhi, ylo, yhi):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        return dblquad(f, xlo, xhi, ylo, yhi, epsabs=1e-13, epsrel=1e-12)[0]


def test_strip_widths_examples():
    assert 2 * width_simple(strip_center(3, 4)) == pytest.approx(math.sqrt(15) / 2, abs=1e-12)
    assert 2 * width_avg(3, 4) == pytest.approx((3 * math.sqrt(3) + 2 * math.pi) / 6, abs=1e-12)


def test_strip_center_formula():
    assert strip_center(1, 2) == -0.5
    assert strip_center(3, 4) == 0.25
    assert strip_center(4, 4) == 0.75
    with pytest.raises(DomainError):
        strip_center(0, 4)
    with pytest.raises(DomainError):
        strip_center(1, 3)


@pytest.mark.parametrize("n_int", [2, 4, 64, 1024])
def test_strip_areas_sum_to_pi(n_int):
    _, _, wa = strip_geometry(n_int)
    assert math.fsum(4 * wa / n_int) == pytest.approx(math.pi, abs=1e-12)


def test_vectorized_geometry_matches_scalar():
    c, ws, wa = strip_geometry(8)
    for s in strips(8):
        assert c[s.index - 1] == strip_center(s.index, 8)
        assert ws[s.index - 1] == pytest.approx(width_simple(s.center2), rel=1e-15)
        assert wa[s.index - 1] == pytest.approx(width_avg(s.index, 8), rel=1e-13)
        assert s.half_height == 1 / 8


def test_width_simple_domain():
    with pytest.raises(DomainError):
        width_simple(1.0)


def test_rect_r_against_quadrature():
    d = Design([(0.3, 0.9), (-0.5, 0.2)])
    h = Hyperparameters(0.8, 2.5)
    dom = RectDomain(center2=0.5, half_width=0.7, half_height=0.6)
    R = build_r_rect(d, h, dom)
    area = 4 * 0.7 * 0.6

    def k(p, x1, x2):
        return math.exp(-h.theta1 * (p[0] - x1) ** 2 - h.theta2 * (p[1] - x2) ** 2)

    p, q = d[0], d[1]
    lim = (-0.7, 0.7, lambda x: -0.1, lambda x: 1.1)
    r01 = _dblquad(lambda y, x: k(p, x, y), *lim) / area
    r12 = _dblquad(lambda y, x: k(p, x, y) * k(q, x, y), *lim) / area
    r22 = _dblquad(lambda y, x: k(q, x, y) ** 2, *lim) / area
    assert R[0, 0] == 1.0
    assert R[0, 1] == pytest.approx(r01, abs=1e-12)
    assert R[1, 2] == pytest.approx(r12, abs=1e-12)
    assert R[2, 2] == pytest.approx(r22, abs=1e-12)
    assert np.array_equal(R, R.T)


def test_rect_mp_matches_double():
    d = Design([(0.3, 0.9), (-0.5, 0.2)])
    h = Hyperparameters(0.8, 2.5)
    dom = RectDomain(0.5, 0.7, 0.6)
    with mpmath.workdps(40):
        Rm = build_r_rect(d, h, dom, digits=40)
    assert np.allclose(Rm.astype(float), build_r_rect(d, h, dom), rtol=1e-14, atol=0)


@pytest.mark.parametrize("method", ["A", "B", "C"])
def test_disk_origin_moment_tends_to_polar_value(method):
    # (1/pi) * integral of exp(-r^2) over the disk = 1 - 1/e
    R = build_r_disk(Design([(0.0, 0.0)]), Hyperparameters(1, 1), DiskSpec(1024, method), pairs=False)
    assert R[0, 1] == pytest.approx(1 - math.exp(-1), abs=2e-5)
    assert np.isnan(R[1, 1])


def test_disk_pair_entry_against_quadrature():
    d = Design([(0.4, -0.3), (-0.2, 0.5)])
    h = Hyperparameters(1.5, 0.7)

    def f(y, x):
        return math.exp(-h.theta1 * ((0.4 - x) ** 2 + (-0.2 - x) ** 2) - h.theta2 * ((-0.3 - y) ** 2 + (0.5 - y) ** 2))

    ref = _dblquad(f, -1, 1, lambda x: -math.sqrt(1 - x * x), lambda x: math.sqrt(1 - x * x)) / math.pi
    for method in ("B", "C"):
        R = build_r_disk(d, h, DiskSpec(2048, method))
        assert R[1, 2] == pytest.approx(ref, abs=5e-7)


def test_disk_area_normalization():
    d = Design([(0.1, 0.2)])
    h = Hyperparameters(1, 1)
    assert build_r_disk(d, h, DiskSpec(16, "C"))[0, 0] == pytest.approx(1.0, abs=1e-15)
    assert build_r_disk(d, h, DiskSpec(16, "B"))[0, 0] == pytest.approx(1.0, abs=1e-15)
    # simple widths over-cover the disk area
    assert build_r_disk(d, h, DiskSpec(16, "A"))[0, 0] > 1.0


@pytest.mark.parametrize("method", ["A", "B", "C"])
def test_disk_mp_matches_double(method):
    d = Design([(0.4, -0.3), (-0.2, 0.5), (0.0, 0.1)])
    h = Hyperparameters(1.5, 0.7)
    spec = DiskSpec(32, method)
    with mpmath.workdps(40):
        Rm = build_r_disk(d, h, spec, digits=40)
    R = build_r_disk(d, h, spec)
    assert np.allclose(Rm.astype(float), R, rtol=1e-13, atol=1e-16)


def test_disk_r_symmetric_and_psd():
    rng = np.random.default_rng(11)
    pts = rng.uniform(-0.6, 0.6, (4, 2))
    R = build_r_disk(Design(pts), Hyperparameters(2.0, 0.5), DiskSpec(64, "C"))
    assert np.array_equal(R, R.T)
    assert np.linalg.eigvalsh(R).min() > -1e-14


def test_diskspec_validation():
    for bad in (0, 3, 2.0, True):
        with pytest.raises(ValueError):
            DiskSpec(bad)
    with pytest.raises(ValueError):
        DiskSpec(4, "D")
    assert DiskSpec(4).with_n_int(8).n_int == 8
    with pytest.raises(ValueError):
        RectDomain(half_width=0)
