"""Power-law convergence analysis over the strip count.

Samples sit on a geometric (normally doubling) ladder of ``n_int`` values
and are assumed to behave like ``v(n) = limit + c * n**-p`` in the tail.
Three consecutive samples determine ``p`` and ``limit`` exactly for that
model; a least-squares fit over a longer tail is available when the
three-point estimate is noisy.
"""

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, NonConvergenceError

__all__ = [
    "ConvergenceSeries",
    "ConvergenceEstimate",
    "doubling_ladder",
    "extrapolate",
    "local_slopes",
    "fit_tail",
]


def doubling_ladder(lo=16, hi=1024):
    """``[lo, 2 lo, 4 lo, ..., hi]``; ``lo`` must be even and ``hi / lo`` a power of two."""
    lo, hi = int(lo), int(hi)
    if lo < 2 or lo % 2:
        raise DomainError(f"ladder start must be even and >= 2, got {lo}")
    out = [lo]
    while out[-1] < hi:
        out.append(out[-1] * 2)
    if out[-1] != hi:
        raise DomainError(f"ladder end {hi} is not {lo} times a power of two")
    return out


@dataclass(frozen=True)
class ConvergenceSeries:
    """``(n_int, value)`` samples, sorted by ``n_int`` on construction."""

    samples: Tuple[Tuple[int, object], ...]

    def __init__(self, samples: Sequence[Tuple[int, object]]):
        pts = tuple(sorted(((int(n), v) for n, v in samples), key=lambda s: s[0]))
        if len(pts) < 3:
            raise DomainError(f"a convergence series needs at least 3 samples, got {len(pts)}")
        ns = [n for n, _ in pts]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise DomainError(f"n_int values must be strictly increasing, got {ns}")
        object.__setattr__(self, "samples", pts)

    @property
    def n_values(self):
        return [n for n, _ in self.samples]

    @property
    def values(self):
        return [v for _, v in self.samples]

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class ConvergenceEstimate:
    limit: object
    order: float
    local_slopes: Tuple[float, ...] = field(default_factory=tuple)
    residual: float = 0.0


def _ratio(ns):
    r = ns[1] / ns[0]
    if not math.isclose(ns[2] / ns[1], r, rel_tol=1e-12):
        raise DomainError(f"samples {ns} are not on a geometric ladder")
    return r


def _three_point(ns, vs):
    """Order and limit from three samples on a geometric ladder."""
    r = _ratio(ns)
    d1 = vs[0] - vs[1]
    d2 = vs[1] - vs[2]
    if d1 == 0 or d2 == 0:
        raise NonConvergenceError(f"tail differences vanish at n_int={ns}; nothing to extrapolate")
    q = d1 / d2
    if q <= 1:
        raise NonConvergenceError(
            f"tail differences do not shrink at n_int={ns} (ratio {float(q):.4g}); "
            + ("values alternate" if q < 0 else "series is not contracting")
        )
    p = math.log(float(q)) / math.log(r)
    limit = vs[2] - d2 / (q - 1)
    return p, limit


def extrapolate(series):
    """Aitken/Richardson extrapolation from the last three samples.

    Returns
    -------
    ConvergenceEstimate
        ``order`` is ``p`` in ``|v(n) - limit| ~ n**-p``.  ``residual`` is the
        misfit of the fitted model at the fourth-to-last sample, or the size
        of the extrapolation step when only three samples exist.

    Raises
    ------
    NonConvergenceError
        When consecutive tail differences do not shrink with one sign.
    """
    ns, vs = series.n_values, series.values
    p, limit = _three_point(ns[-3:], vs[-3:])
    if len(ns) >= 4:
        r = ns[-3] / ns[-4]
        predicted = limit + (vs[-3] - limit) * r**p
        residual = abs(float(predicted - vs[-4]))
    else:
        residual = abs(float(vs[-1] - limit))
    slopes = local_slopes(series, limit, strict=False)
    return ConvergenceEstimate(limit=limit, order=p, local_slopes=tuple(slopes), residual=residual)


def local_slopes(series, reference_limit, strict=True):
    """Slopes of ``log|v - limit|`` against ``log n_int`` between consecutive samples.

    With ``strict`` a sample equal to the limit raises; otherwise that slope is NaN.
    """
    ns, vs = series.n_values, series.values
    errs = [abs(float(v - reference_limit)) for v in vs]
    out = []
    for k in range(len(ns) - 1):
        e0, e1 = errs[k], errs[k + 1]
        if e0 == 0 or e1 == 0:
            if strict:
                raise DomainError(f"sample at n_int={ns[k] if e0 == 0 else ns[k + 1]} equals the reference limit")
            out.append(float("nan"))
            continue
        out.append((math.log(e1) - math.log(e0)) / (math.log(ns[k + 1]) - math.log(ns[k])))
    return out


def fit_tail(series, m=None):
    """Least-squares fit of ``limit + c * n**-p`` over the last ``m`` samples.

    Starts from the three-point estimate; useful when the last three samples
    carry roundoff that makes the exact three-point solve jumpy.
    """
    ns, vs = series.n_values, series.values
    m = len(ns) if m is None else m
    if m < 3 or m > len(ns):
        raise DomainError(f"tail length must be in [3, {len(ns)}], got {m}")
    ns, vs = ns[-m:], [float(v) for v in vs[-m:]]
    p0, l0 = _three_point(ns[-3:], vs[-3:])
    l0 = float(l0)
    n_arr = np.asarray(ns, dtype=float)
    v_arr = np.asarray(vs)
    scale = max(abs(vs[0] - l0), 1e-300)
    c0 = (vs[-1] - l0) * ns[-1] ** p0 / scale
    weights = n_arr / n_arr[-1]

    def resid(x):
        lim, c, p = x
        return weights * ((v_arr - l0) / scale - lim - c * n_arr ** (-p))

    sol = least_squares(resid, x0=[0.0, c0, p0], method="lm", xtol=1e-15, ftol=1e-15)
    lim, c, p = sol.x
    limit = l0 + lim * scale
    slopes = local_slopes(ConvergenceSeries(list(zip(ns, vs))), limit, strict=False)
    residual = float(np.max(np.abs(sol.fun / weights))) * scale
    return ConvergenceEstimate(limit=limit, order=float(p), local_slopes=tuple(slopes), residual=residual)
