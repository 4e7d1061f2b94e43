"""Symmetry-reduced design families, their minimization and grid scans.

Every family has at most two free coordinates, so the search is plain
coordinate descent with a bounded Brent (golden-section plus parabolic)
solve per coordinate.  Probes use a coarse ``n_int`` ladder; the winner is
re-evaluated on the full ladder and, if it sits on a twin boundary, pushed
to zero separation with :func:`~imspekit.imspe.twin_limit`.
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping, NamedTuple, Optional, Tuple

import numpy as np
import scipy.optimize

from .design import Design
from .errors import BracketError, DomainError, DuplicatePointError, ImspeError
from .imspe import DEFAULT_LADDER, ImspeValue, TwinLimitResult, imspe_converged, twin_limit
from .rmatrix import DiskSpec, RectDomain

__all__ = [
    "FAMILY_PARAMS",
    "TWIN_PARAM",
    "DesignFamily",
    "realize",
    "ScalarMinimum",
    "minimize_scalar",
    "OptimizationResult",
    "minimize_family",
    "ScanResult",
    "scan_family",
    "DEFAULT_TWIN_DELTAS",
]

FAMILY_PARAMS = {
    "singleton": ("x11", "x12"),
    "inversion_pair": ("x11",),
    "four_in_line_ordinate": ("x32", "x42"),
    "four_in_line_abscissa": ("x11", "x31"),
    "rectangle_centered": ("x11", "x32"),
    "rhomboid": ("x11", "x32"),
}

#: coordinate whose approach to zero produces a twin pair at the centre
TWIN_PARAM = {
    "four_in_line_ordinate": "x32",
    "four_in_line_abscissa": "x11",
    "rectangle_centered": "x32",
    "rhomboid": "x32",
}

#: duet offset used by the four-in-line families when none is given
DEFAULT_DUET_OFFSET = 0.7
DEFAULT_TWIN_DELTAS = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4)
DEFAULT_PROBE_LADDER = (16, 64)


def _points(kind, p):
    if kind == "singleton":
        return [(p["x11"], p["x12"])]
    if kind == "inversion_pair":
        return [(p["x11"], 0.0), (-p["x11"], 0.0)]
    if kind == "four_in_line_ordinate":
        return [(0.0, p["x32"]), (0.0, -p["x32"]), (0.0, p["x42"]), (0.0, -p["x42"])]
    if kind == "four_in_line_abscissa":
        return [(p["x11"], 0.0), (-p["x11"], 0.0), (p["x31"], 0.0), (-p["x31"], 0.0)]
    if kind == "rectangle_centered":
        return [(p["x11"], p["x32"]), (-p["x11"], -p["x32"]), (p["x11"], -p["x32"]), (-p["x11"], p["x32"])]
    if kind == "rhomboid":
        return [(p["x11"], 0.0), (-p["x11"], 0.0), (0.0, p["x32"]), (0.0, -p["x32"])]
    raise DomainError(f"unknown family kind {kind!r}")


@dataclass(frozen=True)
class DesignFamily:
    """A family kind together with values for all of its coordinates.

    >>> DesignFamily("rhomboid", {"x11": 0.69945, "x32": 0.001}).realize().points[2]
    DesignPoint(x1=0.0, x2=0.001)
    """

    kind: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FAMILY_PARAMS:
            raise DomainError(f"unknown family kind {self.kind!r}; expected one of {sorted(FAMILY_PARAMS)}")
        names = FAMILY_PARAMS[self.kind]
        p = dict(self.params)
        for dflt in ("x42", "x31"):
            if dflt in names and dflt not in p:
                p[dflt] = DEFAULT_DUET_OFFSET
        unknown = set(p) - set(names)
        if unknown:
            raise DomainError(f"{self.kind} has no parameters {sorted(unknown)}; expected {names}")
        missing = [n for n in names if n not in p]
        if missing:
            raise DomainError(f"{self.kind} is missing parameters {missing}")
        object.__setattr__(self, "params", MappingProxyType({k: float(p[k]) for k in names}))

    @property
    def param_names(self):
        return FAMILY_PARAMS[self.kind]

    @property
    def twin_param(self):
        return TWIN_PARAM.get(self.kind)

    def with_params(self, **updates):
        return replace(self, params={**self.params, **updates})

    def realize(self, domain=None):
        return realize(self, domain)

    def twin_design(self, delta):
        if self.twin_param is None:
            raise DomainError(f"{self.kind} has no twin coordinate")
        return self.with_params(**{self.twin_param: delta}).realize()


def realize(family, domain=None):
    """Concrete design for a family; ``domain`` defaults to the unit disk.

    Raises
    ------
    DuplicatePointError
        When the parameters make two points coincide.
    DomainError
        When a point falls outside the domain.
    """
    design = Design(_points(family.kind, family.params))
    design.check_distinct()
    dom = domain if domain is not None else DiskSpec
    bad = [p for p in design if not dom.contains(p)]
    if bad:
        raise DomainError(f"{family.kind} with {dict(family.params)} puts points outside the domain: {bad}")
    return design


class ScalarMinimum(NamedTuple):
    x: float
    fx: float
    evaluations: int
    bracket: Tuple[float, float]
    at_boundary: bool
    history: Tuple[Tuple[float, float], ...] = ()


def minimize_scalar(f, lo, hi, tol=1e-6, grid=9):
    """Minimize ``f`` on ``[lo, hi]``: a coarse grid, then bounded Brent in the best cell.

    The returned point is the best one probed.  Points where ``f`` raises an
    :class:`ImspeError` count as ``+inf``.

    Raises
    ------
    BracketError
        If both endpoints beat every interior grid probe.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    history = []

    def g(x):
        x = float(x)
        try:
            fx = float(f(x))
        except ImspeError:
            fx = math.inf
        if math.isnan(fx):
            fx = math.inf
        history.append((x, fx))
        return fx

    xs = np.linspace(lo, hi, max(int(grid), 3))
    fs = [g(x) for x in xs]
    inner = min(fs[1:-1])
    if fs[0] < inner and fs[-1] < inner:
        raise BracketError(f"both ends of [{lo}, {hi}] lie below every interior probe; the minimum is not bracketed")
    i = int(np.argmin(fs))
    a, b = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, len(xs) - 1)])
    if math.isfinite(fs[i]):
        # infeasible probes come back as inf and make the parabolic step NaN; Brent then falls back to golden
        with np.errstate(invalid="ignore"), warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            scipy.optimize.minimize_scalar(g, bounds=(a, b), method="bounded", options={"xatol": tol / 3})
    best_x, best_f = min(history, key=lambda t: (t[1], abs(t[0])))
    at_boundary = best_x - lo <= tol or hi - best_x <= tol
    return ScalarMinimum(best_x, best_f, len(history), (a, b), at_boundary, tuple(history))


@dataclass(frozen=True)
class OptimizationResult:
    kind: str
    best_params: Mapping[str, float]
    best_value: object
    evaluations: int
    bracket: Mapping[str, Tuple[float, float]]
    tolerance_achieved: float
    probe_value: float = math.nan
    final: Optional[ImspeValue] = None
    twin: Optional[TwinLimitResult] = None
    boundary: Tuple[str, ...] = ()
    history: Tuple[Tuple[Tuple[float, ...], float], ...] = ()
    notes: Tuple[str, ...] = ()


def _evaluator(family, h, domain, ladder, digits):
    def F(params):
        design = realize(family.with_params(**params), domain)
        return imspe_converged(design, h, domain, ladder=ladder, digits=digits)

    return F


def minimize_family(
    kind,
    bounds,
    h,
    domain,
    tol=1e-5,
    *,
    fixed=None,
    start=None,
    probe_ladder=DEFAULT_PROBE_LADDER,
    final_ladder=DEFAULT_LADDER,
    twin_deltas=DEFAULT_TWIN_DELTAS,
    max_sweeps=8,
    digits=None,
):
    """Coordinate-descent minimization of IMSPE over a family's free coordinates.

    Parameters
    ----------
    kind : str
        Family kind, see :data:`FAMILY_PARAMS`.
    bounds : dict
        ``{name: (lo, hi)}`` for every free coordinate.  Coordinates not in
        ``bounds`` must appear in ``fixed`` (or have a default).
    h : Hyperparameters
    domain : DiskSpec or RectDomain
        For the disk, ``method`` is honoured and ``n_int`` is replaced by
        the probe and final ladders.
    tol : float
        Coordinate tolerance.  A final-versus-probe value gap above
        ``10 * tol`` triggers a re-search with a doubled probe ladder.

    Returns
    -------
    OptimizationResult
        ``best_params`` is the best probe.  ``best_value`` is its full-ladder
        value, or the zero-separation limit when the twin coordinate ends on
        its lower bound.
    """
    names = FAMILY_PARAMS.get(kind)
    if names is None:
        raise DomainError(f"unknown family kind {kind!r}")
    fixed = dict(fixed or {})
    bounds = {k: (float(v[0]), float(v[1])) for k, v in bounds.items()}
    for k, (lo, hi) in bounds.items():
        if k not in names:
            raise DomainError(f"{kind} has no parameter {k!r}")
        if not lo < hi:
            raise DomainError(f"empty bounds for {k}: [{lo}, {hi}]")
    free = [n for n in names if n in bounds]
    if not free:
        raise DomainError("no free coordinates to optimize")
    base = DesignFamily(kind, {**{n: 0.5 * sum(bounds[n]) for n in free}, **fixed})
    current = {n: base.params[n] for n in names}
    if start:
        current.update({k: float(v) for k, v in start.items()})

    notes = []
    ladder = tuple(probe_ladder)
    while True:
        F = _evaluator(base, h, domain, ladder, digits)
        history = []
        brackets = {}

        def probe(params):
            v = F(params)
            history.append((tuple(params[n] for n in names), float(v.value)))
            return v.value

        change = math.inf
        sweeps = 0
        while change > tol and sweeps < max_sweeps:
            change = 0.0
            for name in free:
                lo, hi = bounds[name]
                res = minimize_scalar(lambda x: probe({**current, name: x}), lo, hi, tol)
                brackets[name] = res.bracket
                change = max(change, abs(res.x - current[name]))
                current[name] = res.x
            sweeps += 1
            if len(free) == 1:
                break

        finite = [hv for hv in history if math.isfinite(hv[1])]
        if not finite:
            raise ImspeError(f"every probe of {kind} failed to evaluate")
        best_vec, probe_value = min(finite, key=lambda t: (t[1], float(np.linalg.norm(t[0]))))
        best = dict(zip(names, best_vec))
        final = _evaluator(base, h, domain, final_ladder, digits)(best)
        disc = abs(float(final.value) - probe_value)
        if disc <= 10 * tol or isinstance(domain, RectDomain) or ladder[1] >= final_ladder[1]:
            break
        notes.append(f"probe/final discrepancy {disc:.3g} at ladder {ladder}; re-searching at higher fidelity")
        ladder = (ladder[0] * 2, ladder[1] * 2)
        current = dict(best)

    boundary = tuple(
        f"{n} at {'lower' if best[n] - bounds[n][0] <= tol else 'upper'} bound"
        for n in free
        if best[n] - bounds[n][0] <= tol or bounds[n][1] - best[n] <= tol
    )
    twin = None
    best_value = final.value
    tp = TWIN_PARAM.get(kind)
    if tp in free and best[tp] - bounds[tp][0] <= tol:
        fam = DesignFamily(kind, best)
        twin = twin_limit(fam, h, domain, twin_deltas, ladder=final_ladder, digits=digits)
        best_value = twin.limit
        notes.append(f"{tp} converged to its lower bound; reported value is the zero-separation limit")
        if twin.precision_digits_used > 16:
            notes.append(f"twin limit evaluated with {twin.precision_digits_used}-digit arithmetic")

    return OptimizationResult(
        kind=kind,
        best_params=MappingProxyType(best),
        best_value=best_value,
        evaluations=len(history),
        bracket=MappingProxyType(brackets),
        tolerance_achieved=change,
        probe_value=probe_value,
        final=final,
        twin=twin,
        boundary=boundary,
        history=tuple(history),
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class ScanResult:
    kind: str
    fixed: Mapping[str, float]
    param: str
    abscissa: Tuple[float, ...]
    values: Tuple[float, ...]
    n_int: Tuple[Optional[int], ...]
    flags: Tuple[str, ...]
    digits: Tuple[Optional[int], ...] = ()

    def ok(self):
        """Mask of grid points that evaluated cleanly."""
        return np.array([f == "ok" for f in self.flags])


def _scan_point(args):
    kind, fixed, param, x, h, domain, ladder, n_int, digits = args
    try:
        design = realize(DesignFamily(kind, {**fixed, param: x}), domain)
        if n_int is not None and isinstance(domain, DiskSpec):
            from .imspe import imspe

            v = imspe(design, h, domain.with_n_int(n_int), digits=digits)
        else:
            v = imspe_converged(design, h, domain, ladder=ladder, digits=digits)
    except DuplicatePointError:
        return math.nan, None, "coincident", None
    except DomainError:
        return math.nan, None, "out_of_domain", None
    except ImspeError as exc:
        return math.nan, None, type(exc).__name__, None
    return float(v.value), v.n_int_used, "ok", v.digits


def scan_family(kind, fixed, param, grid, h, domain, *, ladder=DEFAULT_LADDER, n_int=None, digits=None, workers=1):
    """IMSPE along one coordinate of a family with the others held fixed.

    Points that cannot be evaluated are kept in the result with NaN value and
    a flag naming the failure; the scan carries on.
    """
    grid = [float(x) for x in grid]
    if not grid:
        raise DomainError("scan grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("scan grid must be strictly increasing")
    names = FAMILY_PARAMS.get(kind)
    if names is None:
        raise DomainError(f"unknown family kind {kind!r}")
    if param not in names:
        raise DomainError(f"{kind} has no parameter {param!r}")
    fixed = {k: float(v) for k, v in dict(fixed).items() if k != param}
    jobs = [(kind, fixed, param, x, h, domain, tuple(ladder), n_int, digits) for x in grid]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_point, jobs))
    else:
        rows = [_scan_point(j) for j in jobs]
    return ScanResult(
        kind=kind,
        fixed=MappingProxyType(dict(DesignFamily(kind, {**fixed, param: grid[0]}).params, **{param: math.nan})),
        param=param,
        abscissa=tuple(grid),
        values=tuple(r[0] for r in rows),
        n_int=tuple(r[1] for r in rows),
        flags=tuple(r[2] for r in rows),
        digits=tuple(r[3] for r in rows),
    )
