import math

import pytest

from imspekit.convergence import ConvergenceSeries, doubling_ladder, extrapolate, fit_tail, local_slopes
from imspekit.errors import DomainError, NonConvergenceError


def _power_law(limit, c, p, ns):
    return ConvergenceSeries([(n, limit + c * n ** -p) for n in ns])


def test_doubling_ladder():
    assert doubling_ladder(16, 1024) == [16, 32, 64, 128, 256, 512, 1024]
    with pytest.raises(DomainError):
        doubling_ladder(16, 1000)
    with pytest.raises(DomainError):
        doubling_ladder(3, 12)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 2.5])
@pytest.mark.parametrize("c", [3.0, -0.7])
def test_extrapolate_exact_on_power_law(p, c):
    est = extrapolate(_power_law(0.42, c, p, doubling_ladder(16, 1024)))
    assert est.limit == pytest.approx(0.42, abs=1e-12)
    assert est.order == pytest.approx(p, abs=1e-8)
    assert all(s == pytest.approx(-p, abs=1e-6) for s in est.local_slopes)
    assert est.residual < 1e-12


def test_three_samples_only():
    est = extrapolate(_power_law(1.0, 1.0, 2.0, [16, 32, 64]))
    assert est.limit == pytest.approx(1.0, abs=1e-14)
    assert est.residual == pytest.approx(64.0 ** -2, rel=1e-9)


def test_series_sorted_and_validated():
    s = ConvergenceSeries([(64, 3.0), (16, 1.0), (32, 2.0)])
    assert s.n_values == [16, 32, 64]
    with pytest.raises(DomainError):
        ConvergenceSeries([(16, 1.0), (32, 2.0)])
    with pytest.raises(DomainError):
        ConvergenceSeries([(16, 1.0), (16, 2.0), (32, 3.0)])


def test_non_geometric_ladder():
    with pytest.raises(DomainError):
        extrapolate(ConvergenceSeries([(16, 1.0), (32, 0.5), (48, 0.4)]))


@pytest.mark.parametrize("vals", [[1.0, 2.0, 1.5], [1.0, 1.1, 1.3], [1.0, 1.0, 1.0]])
def test_non_convergence(vals):
    with pytest.raises(NonConvergenceError):
        extrapolate(ConvergenceSeries(list(zip([16, 32, 64], vals))))


def test_local_slopes_strict():
    s = _power_law(0.0, 1.0, 2.0, [16, 32, 64])
    assert local_slopes(s, 0.0) == pytest.approx([-2.0, -2.0])
    s = ConvergenceSeries([(16, 0.0), (32, 1.0), (64, 2.0)])
    with pytest.raises(DomainError):
        local_slopes(s, 0.0)
    assert math.isnan(local_slopes(s, 0.0, strict=False)[0])


def test_fit_tail_recovers_noisy_series():
    ns = doubling_ladder(16, 1024)
    noise = [1e-13, -2e-13, 1.5e-13, -1e-13, 2e-13, -1.5e-13, 1e-13]
    s = ConvergenceSeries([(n, 0.7 + 0.5 * n ** -2 + e) for n, e in zip(ns, noise)])
    est = fit_tail(s)
    assert est.limit == pytest.approx(0.7, abs=1e-11)
    assert est.order == pytest.approx(2.0, abs=1e-2)
    with pytest.raises(DomainError):
        fit_tail(s, 2)
