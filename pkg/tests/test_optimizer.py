import math

import numpy as np
import pytest

from imspekit import DiskSpec, Hyperparameters, RectDomain
from imspekit.errors import BracketError, DomainError, DuplicatePointError
from imspekit.optimizer import (
    FAMILY_PARAMS,
    DesignFamily,
    minimize_family,
    minimize_scalar,
    realize,
    scan_family,
)

H1 = Hyperparameters(1.0, 1.0)


def test_realize_examples():
    d = realize(DesignFamily("rhomboid", {"x11": 0.69945, "x32": 0.001}))
    assert [tuple(p) for p in d] == [(0.69945, 0.0), (-0.69945, 0.0), (0.0, 0.001), (0.0, -0.001)]
    d = realize(DesignFamily("inversion_pair", {"x11": 0.5468}))
    assert [tuple(p) for p in d] == [(0.5468, 0.0), (-0.5468, 0.0)]
    with pytest.raises(DuplicatePointError):
        realize(DesignFamily("rectangle_centered", {"x11": 0.0, "x32": 0.0}))


def test_realize_domain_checks():
    fam = DesignFamily("rectangle_centered", {"x11": 0.9, "x32": 0.9})
    with pytest.raises(DomainError):
        realize(fam)
    assert len(realize(fam, RectDomain())) == 4


@pytest.mark.parametrize("kind", sorted(FAMILY_PARAMS))
def test_families_inversion_symmetric(kind):
    params = {"x11": 0.3, "x12": 0.2, "x32": 0.4, "x42": 0.7, "x31": 0.6}
    fam = DesignFamily(kind, {k: params[k] for k in FAMILY_PARAMS[kind]})
    pts = {tuple(p) for p in fam.realize()}
    if kind != "singleton":
        assert pts == {(-a, -b) for a, b in pts}


def test_family_defaults_and_validation():
    assert DesignFamily("four_in_line_ordinate", {"x32": 0.1}).params["x42"] == 0.7
    assert DesignFamily("four_in_line_abscissa", {"x11": 0.1}).params["x31"] == 0.7
    with pytest.raises(DomainError):
        DesignFamily("hexagon", {})
    with pytest.raises(DomainError):
        DesignFamily("rhomboid", {"x11": 0.5})
    with pytest.raises(DomainError):
        DesignFamily("rhomboid", {"x11": 0.5, "x32": 0.1, "x99": 0.0})
    fam = DesignFamily("rhomboid", {"x11": 0.5, "x32": 0.1})
    assert fam.twin_param == "x32"
    assert fam.twin_design(1e-3)[2].x2 == 1e-3
    with pytest.raises(DomainError):
        DesignFamily("singleton", {"x11": 0, "x12": 0}).twin_design(0.1)


def test_minimize_scalar_quadratic():
    x, fx = minimize_scalar(lambda x: (x - 0.3) ** 2, 0.0, 1.0, 1e-6)[:2]
    assert x == pytest.approx(0.3, abs=1e-6)
    assert fx <= 1e-12


def test_minimize_scalar_boundary_and_bracket():
    res = minimize_scalar(lambda x: x, 0.0, 1.0, 1e-6)
    assert res.x == 0.0 and res.at_boundary
    with pytest.raises(BracketError):
        minimize_scalar(lambda x: -((x - 0.5) ** 2), 0.0, 1.0, 1e-6)
    with pytest.raises(DomainError):
        minimize_scalar(lambda x: x, 1.0, 0.0, 1e-6)


def test_minimize_scalar_best_found_contract():
    res = minimize_scalar(lambda x: math.cos(8 * x), 0.0, 1.0, 1e-6)
    assert all(res.fx <= fx for _, fx in res.history)
    assert res.evaluations == len(res.history)


def test_minimize_family_pair():
    r = minimize_family("inversion_pair", {"x11": (0.05, 0.95)}, H1, DiskSpec(), tol=1e-6)
    assert r.best_params["x11"] == pytest.approx(0.546820, abs=1e-4)
    assert r.best_value == pytest.approx(0.426149, abs=1e-5)
    assert all(r.probe_value <= v for _, v in r.history)
    assert r.boundary == ()
    assert r.twin is None


def test_minimize_family_singleton_origin():
    r = minimize_family("singleton", {"x11": (-0.5, 0.5), "x12": (-0.5, 0.5)}, H1, DiskSpec(), tol=1e-5)
    assert math.hypot(r.best_params["x11"], r.best_params["x12"]) <= 1e-4
    assert r.best_value == pytest.approx(0.735759, abs=1e-5)


def test_minimize_family_boundary_diagnostic():
    r = minimize_family("inversion_pair", {"x11": (0.7, 0.95)}, H1, DiskSpec(), tol=1e-5)
    assert r.best_params["x11"] == 0.7
    assert r.boundary == ("x11 at lower bound",)


def test_minimize_family_restart_stability():
    rng = np.random.default_rng(2)
    vals = []
    for _ in range(5):
        start = {"x11": rng.uniform(0.1, 0.9)}
        vals.append(minimize_family("inversion_pair", {"x11": (0.05, 0.95)}, H1, DiskSpec(), tol=1e-5,
                                    start=start).best_value)
    assert max(vals) - min(vals) <= 10 * 1e-5


def test_minimize_family_rect_twin():
    h = Hyperparameters(0.128, 0.00016)
    r = minimize_family("rhomboid", {"x11": (0.5, 0.95), "x32": (1e-3, 0.5)}, h, RectDomain(), tol=1e-5)
    assert r.best_params["x11"] == pytest.approx(0.76711, abs=5e-4)
    assert r.twin is not None
    assert float(r.best_value) == pytest.approx(6.6822e-5, rel=1e-3)


def test_scan_flags_and_values():
    h = Hyperparameters(0.128, 0.00016)
    s = scan_family("rhomboid", {"x32": 0.2}, "x11", [0.0, 0.3, 0.6, 1.5], h, DiskSpec(), ladder=(16, 64))
    assert s.flags == ("coincident", "ok", "ok", "out_of_domain")
    assert math.isnan(s.values[0]) and math.isnan(s.values[3])
    assert all(0 < v < 1 for v, ok in zip(s.values, s.ok()) if ok)
    assert s.n_int[1] == 64
    with pytest.raises(DomainError):
        scan_family("rhomboid", {"x32": 0.2}, "x11", [0.3, 0.2], h, DiskSpec())
    with pytest.raises(DomainError):
        scan_family("rhomboid", {"x32": 0.2}, "x11", [], h, DiskSpec())


def test_scan_fixed_n_int_and_workers():
    s1 = scan_family("inversion_pair", {}, "x11", [0.2, 0.5], H1, DiskSpec(), n_int=64)
    s2 = scan_family("inversion_pair", {}, "x11", [0.2, 0.5], H1, DiskSpec(), n_int=64, workers=2)
    assert s1.values == s2.values
    assert s1.n_int == (64, 64)


def test_four_in_line_scans_coincide_when_isotropic():
    grid = [0.1, 0.3, 0.5]
    a = scan_family("four_in_line_ordinate", {"x42": 0.7}, "x32", grid, H1, DiskSpec(), ladder=(32, 512))
    b = scan_family("four_in_line_abscissa", {"x31": 0.7}, "x11", grid, H1, DiskSpec(), ladder=(32, 512))
    np.testing.assert_allclose(a.values, b.values, rtol=0, atol=1e-7)
