"""The IMSPE objective ``1 - tr(L^-1 R)`` and its limits.

Evaluation starts in double precision and climbs a ladder of mpmath
precisions whenever the bordered matrix is too ill-conditioned for the
current one, which is what happens as a twin pair of points closes up.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import mpmath

from .convergence import ConvergenceEstimate, ConvergenceSeries, doubling_ladder, extrapolate
from .design import Design, DesignPoint, build_bordered, build_cov, trace_of_solve
from .errors import BoundsError, DomainError, NonConvergenceError, SingularMatrixError
from .rmatrix import DiskSpec, RectDomain, build_r_disk, build_r_rect

__all__ = [
    "PRECISION_LADDER",
    "ImspeValue",
    "TwinLimitResult",
    "imspe",
    "imspe_converged",
    "imspe_batch",
    "imspe_n1_closed",
    "imspe_n2_symmetric",
    "twin_limit",
    "precision_ladder",
]

#: decimal digits tried in turn; ``None`` is IEEE double
PRECISION_LADDER = (None, 50, 100, 160)
#: escalate when cond(L) * unit roundoff exceeds this fraction of the value
DEFAULT_RTOL = 1e-6
DEFAULT_LADDER = (16, 1024)
#: the unknown-mean predictor never does worse than copying the nearest datum,
#: whose squared error is 2 - 2 k <= 2, so values outside (0, 2) are numerical failures
IMSPE_UPPER = 2
_DOUBLE_UNIT = 2.0**-53
_DOUBLE_DIGITS = 16


@dataclass(frozen=True)
class ImspeValue:
    """An IMSPE value with the diagnostics of how it was obtained.

    ``value`` is a float in double precision and an ``mpmath.mpf`` when
    ``digits`` is set.  For converged evaluations ``n_int_used`` is the
    finest rung and ``estimate`` holds the extrapolation.
    """

    value: object
    n_int_used: Optional[int]
    method_used: Optional[str]
    cond_estimate: float
    digits: Optional[int] = None
    estimate: Optional[ConvergenceEstimate] = None
    samples: Tuple[Tuple[int, object], ...] = ()

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class TwinLimitResult:
    delta_sequence: Tuple[float, ...]
    values: Tuple[ImspeValue, ...]
    limit: object
    error: float
    precision_digits_used: int
    coefficient: float = 0.0
    notes: Tuple[str, ...] = field(default_factory=tuple)


def precision_ladder(start=None):
    """Rungs of :data:`PRECISION_LADDER` from ``start`` upward (custom digits go first)."""
    if start is None:
        return PRECISION_LADDER
    higher = tuple(d for d in PRECISION_LADDER if d is not None and d > start)
    return (int(start),) + higher


def _unit(digits):
    return _DOUBLE_UNIT if digits is None else mpmath.mpf(10) ** (-digits)


def _check_domain(design, domain):
    if isinstance(domain, DiskSpec):
        bad = [p for p in design if not domain.contains(p)]
        if bad:
            raise DomainError(f"design points outside the unit disk: {bad}")
    elif isinstance(domain, RectDomain):
        bad = [p for p in design if not domain.contains(p)]
        if bad:
            raise DomainError(f"design points outside the rectangle: {bad}")
    else:
        raise TypeError(f"domain must be a DiskSpec or RectDomain, got {type(domain).__name__}")


def _evaluate(design, h, domain, digits, backend):
    V = build_cov(design, h, digits)
    L = build_bordered(V)
    if isinstance(domain, DiskSpec):
        R = build_r_disk(design, h, domain, digits=digits, backend=backend)
    else:
        R = build_r_rect(design, h, domain, digits=digits)
    tr, cond = trace_of_solve(L, R)
    return 1 - tr, cond


def imspe(design, h, domain, *, digits=None, escalate=True, rtol=DEFAULT_RTOL, backend=None):
    """IMSPE of a design over a rectangle (exact) or the unit disk (strip rule).

    Parameters
    ----------
    design : Design
    h : Hyperparameters
    domain : RectDomain or DiskSpec
    digits : int, optional
        Starting precision in decimal digits; ``None`` starts in double.
    escalate : bool
        Climb the precision ladder when the bordered matrix is too
        ill-conditioned for the working precision.
    rtol : float
        Escalation also happens while ``cond(L) * unit_roundoff`` exceeds
        ``rtol * |value|``.

    Raises
    ------
    DuplicatePointError, SingularMatrixError, BoundsError, DomainError
    """
    design.check_distinct()
    _check_domain(design, domain)
    rungs = precision_ladder(digits) if escalate else (digits,)
    failure = None
    for pos, dg in enumerate(rungs):
        last = pos == len(rungs) - 1
        try:
            if dg is None:
                value, cond = _evaluate(design, h, domain, None, backend)
            else:
                with mpmath.workdps(dg):
                    value, cond = _evaluate(design, h, domain, dg, backend)
                    value = +value
        except SingularMatrixError as exc:
            failure = exc
            if last:
                raise
            continue
        if not last and cond * _unit(dg) > rtol * abs(value):
            continue
        if not 0 < value < IMSPE_UPPER:
            failure = BoundsError(f"IMSPE {_fmt(value)} outside (0, {IMSPE_UPPER}) at {dg or _DOUBLE_DIGITS} digits", value)
            if last:
                raise failure
            continue
        n_int = domain.n_int if isinstance(domain, DiskSpec) else None
        method = domain.method if isinstance(domain, DiskSpec) else None
        return ImspeValue(value, n_int, method, _as_float(cond), dg)
    raise failure  # pragma: no cover - loop always returns or raises


def _as_float(x):
    try:
        return float(x)
    except OverflowError:  # pragma: no cover
        return math.inf


def _fmt(v):
    return mpmath.nstr(v, 8) if isinstance(v, mpmath.mpf) else f"{v:.8g}"


def imspe_converged(design, h, domain, *, ladder=DEFAULT_LADDER, digits=None, escalate=True, rtol=DEFAULT_RTOL,
                    backend=None):
    """IMSPE extrapolated to ``n_int -> infinity`` over a doubling ladder.

    Rectangles need no extrapolation and are evaluated once.  On the disk
    each rung is evaluated with :func:`imspe`, every later rung starting at
    the precision the previous one settled on.  When the tail differences
    sit at the roundoff floor the finest rung is returned unextrapolated.
    """
    if isinstance(domain, RectDomain):
        return imspe(design, h, domain, digits=digits, escalate=escalate, rtol=rtol)
    rungs = doubling_ladder(*ladder)
    samples = []
    dg = digits
    cond = 0.0
    for n_int in rungs:
        v = imspe(design, h, domain.with_n_int(n_int), digits=dg, escalate=escalate, rtol=rtol, backend=backend)
        dg = v.digits
        cond = max(cond, v.cond_estimate)
        samples.append(v)
    # re-run coarse rungs that finished at lower precision than the final one
    samples = [
        s if s.digits == dg else imspe(design, h, domain.with_n_int(s.n_int_used), digits=dg, escalate=False, rtol=rtol,
                                       backend=backend)
        for s in samples
    ]
    pairs = [(s.n_int_used, s.value) for s in samples]
    series = ConvergenceSeries(pairs)
    vals = series.values
    # trace errors are absolute and scale with cond(L)
    floor = (64 + cond) * _unit(dg)
    d1, d2 = abs(vals[-3] - vals[-2]), abs(vals[-2] - vals[-1])
    if d1 <= floor and d2 <= floor:
        est = ConvergenceEstimate(limit=vals[-1], order=float("nan"), local_slopes=(), residual=float(d2))
    else:
        try:
            est = extrapolate(series)
        except NonConvergenceError:
            if d2 <= floor:
                est = ConvergenceEstimate(limit=vals[-1], order=float("nan"), local_slopes=(), residual=float(d2))
            else:
                raise
    return ImspeValue(est.limit, rungs[-1], domain.method, cond, dg, est, tuple(pairs))


def _batch_worker(args):
    design, h, domain, kwargs = args
    fn = imspe_converged if kwargs.pop("converged", False) else imspe
    return fn(design, h, domain, **kwargs)


def imspe_batch(designs, h, domain, *, workers=1, converged=False, **kwargs):
    """Evaluate many designs; ``workers > 1`` fans out over processes. Order is preserved."""
    jobs = [(d, h, domain, dict(kwargs, converged=converged)) for d in designs]
    if workers <= 1 or len(jobs) <= 1:
        return [_batch_worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_batch_worker, jobs))


def imspe_n1_closed(p, h, spec, digits=None):
    """Single-point IMSPE on the disk from the top-row moment alone.

    With ``L^-1 = [[-1, 1], [1, 0]]`` the objective is ``1 + R00 - 2 R01``,
    i.e. ``2 - 2 R01`` whenever the strip areas sum to the disk area.
    """
    p = DesignPoint(float(p[0]), float(p[1]))
    if not DiskSpec.contains(p):
        raise DomainError(f"point {tuple(p)} lies outside the unit disk")
    if digits is None:
        R = build_r_disk(Design([p]), h, spec, pairs=False)
        return 1.0 + R[0, 0] - 2.0 * R[0, 1]
    with mpmath.workdps(digits):
        R = build_r_disk(Design([p]), h, spec, digits=digits, pairs=False)
        return +(1 + R[0, 0] - 2 * R[0, 1])


def imspe_n2_symmetric(x11, h, spec, digits=None):
    """IMSPE of the pair ``(x11, 0), (-x11, 0)`` on the disk from three moments.

    Uses the explicit inverse of the bordered matrix with ``A = exp(-4 theta1 x11**2)``:
    ``1 + (1 + A) R00 / 2 - 2 R01 - (R11 - R12) / (1 - A)``.
    """
    if x11 == 0:
        raise DomainError("x11 = 0 collapses the pair onto one point (singular configuration)")
    if not abs(x11) <= 1:
        raise DomainError(f"|x11| = {abs(x11)} lies outside the unit disk")
    design = Design([(x11, 0.0), (-x11, 0.0)])
    if digits is None:
        R = build_r_disk(design, h, spec)
        A = math.exp(-4.0 * h.theta1 * x11 * x11)
        one_minus_A = -math.expm1(-4.0 * h.theta1 * x11 * x11)
        return 1.0 + (1.0 + A) * R[0, 0] / 2 - 2.0 * R[0, 1] - (R[1, 1] - R[1, 2]) / one_minus_A
    with mpmath.workdps(digits):
        R = build_r_disk(design, h, spec, digits=digits)
        arg = -4 * mpmath.mpf(h.theta1) * mpmath.mpf(x11) ** 2
        A = mpmath.exp(arg)
        return +(1 + (1 + A) * R[0, 0] / 2 - 2 * R[0, 1] - (R[1, 1] - R[1, 2]) / (-mpmath.expm1(arg)))


def twin_limit(family, h, domain, deltas, *, ladder=DEFAULT_LADDER, digits=None, rtol=DEFAULT_RTOL, backend=None):
    """Extrapolate the IMSPE of a twin-point family to zero separation.

    Parameters
    ----------
    family : callable or object with ``twin_design(delta)``
        Maps a separation parameter ``delta > 0`` to a Design.
    h : Hyperparameters
    domain : RectDomain or DiskSpec
        On the disk every delta is first extrapolated in ``n_int`` over ``ladder``.
    deltas : sequence of float
        Strictly decreasing, positive.

    Notes
    -----
    The families used here are inversion symmetric, so the objective is even
    in ``delta`` and the tail is fitted with ``v0 + c * delta**2`` over the
    last three points.  ``error`` combines the fit residual with the size of
    the remaining ``c * delta_min**2`` correction.
    """
    make = family.twin_design if hasattr(family, "twin_design") else family
    deltas = [float(d) for d in deltas]
    if len(deltas) < 3:
        raise DomainError("twin_limit needs at least three separations")
    if any(d <= 0 for d in deltas) or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise DomainError(f"separations must be positive and strictly decreasing, got {deltas}")

    values = []
    dg = digits
    for d in deltas:
        v = imspe_converged(make(d), h, domain, ladder=ladder, digits=dg, rtol=rtol, backend=backend)
        dg = v.digits
        values.append(v)
    top = max((v.digits or _DOUBLE_DIGITS) for v in values)
    work = top + 10
    with mpmath.workdps(work):
        vs = [mpmath.mpf(v.value) for v in values]
        ds = [mpmath.mpf(d) for d in deltas]
        diffs = [abs(vs[k + 1] - vs[k]) for k in range(len(vs) - 1)]
        noise = max(
            mpmath.mpf(2) ** -50 if v.digits is None else mpmath.mpf(10) ** (-(v.digits - 6)) for v in values
        ) * max(abs(x) for x in vs) + max(
            mpmath.mpf(v.estimate.residual) if v.estimate is not None else 0 for v in values
        )
        tail = diffs[-2:]
        if tail[1] > tail[0] + noise:
            raise NonConvergenceError(
                "twin-limit tail differences grow: " + ", ".join(mpmath.nstr(x, 4) for x in diffs)
            )
        # least squares v = v0 + c d^2 over the last three points
        x = [d * d for d in ds[-3:]]
        y = vs[-3:]
        xm = mpmath.fsum(x) / 3
        ym = mpmath.fsum(y) / 3
        sxx = mpmath.fsum((xi - xm) ** 2 for xi in x)
        c = mpmath.fsum((xi - xm) * (yi - ym) for xi, yi in zip(x, y)) / sxx
        v0 = ym - c * xm
        fit_resid = max(abs(yi - (v0 + c * xi)) for xi, yi in zip(x, y))
        error = float(max(abs(c) * x[-1], fit_resid, noise))
        limit = +v0
    if top == _DOUBLE_DIGITS and all(v.digits is None for v in values):
        limit = float(limit)
    return TwinLimitResult(
        delta_sequence=tuple(deltas),
        values=tuple(values),
        limit=limit,
        error=error,
        precision_digits_used=top,
        coefficient=float(c),
    )
