"""Designs, hyperparameters and the linear algebra behind ``tr(L^-1 R)``.

Matrices are numpy arrays throughout.  Double-precision matrices have dtype
``float64``; extended-precision ones are ``object`` arrays of ``mpmath.mpf``
built under the caller's ``mpmath.workdps`` context.
"""

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import mpmath
import numpy as np
import scipy.linalg

from .errors import DuplicatePointError, SingularMatrixError

__all__ = [
    "Hyperparameters",
    "DesignPoint",
    "Design",
    "kernel",
    "build_cov",
    "build_bordered",
    "condition_number",
    "trace_of_solve",
    "MAX_COND_DOUBLE",
]

#: condition number above which a double-precision solve is refused
MAX_COND_DOUBLE = 1e12


@dataclass(frozen=True)
class Hyperparameters:
    """Rates of the separable Gaussian kernel along the two factors."""

    theta1: float
    theta2: float

    def __post_init__(self):
        for name in ("theta1", "theta2"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a finite positive number, got {v!r}")

    @classmethod
    def isotropic(cls, theta):
        return cls(theta, theta)


class DesignPoint(NamedTuple):
    x1: float
    x2: float


class Design:
    """An ordered, nonempty sequence of planar design points."""

    __slots__ = ("_points",)

    def __init__(self, points: Iterable[Sequence[float]]):
        pts = tuple(DesignPoint(float(p[0]), float(p[1])) for p in points)
        if not pts:
            raise ValueError("a design needs at least one point")
        for p in pts:
            if not (math.isfinite(p.x1) and math.isfinite(p.x2)):
                raise ValueError(f"design coordinates must be finite, got {p!r}")
        self._points = pts

    @property
    def points(self):
        return self._points

    @property
    def array(self):
        """Coordinates as an ``(n, 2)`` float array (a fresh copy)."""
        return np.array(self._points, dtype=float).reshape(len(self._points), 2)

    def __len__(self):
        return len(self._points)

    def __iter__(self):
        return iter(self._points)

    def __getitem__(self, i):
        return self._points[i]

    def __eq__(self, other):
        return isinstance(other, Design) and self._points == other._points

    def __hash__(self):
        return hash(self._points)

    def __repr__(self):
        inner = ", ".join(f"({p.x1!r}, {p.x2!r})" for p in self._points)
        return f"Design([{inner}])"

    def permuted(self, order):
        return Design([self._points[i] for i in order])

    def transformed(self, fn):
        """Apply ``fn(x1, x2) -> (y1, y2)`` to every point."""
        return Design([fn(p.x1, p.x2) for p in self._points])

    def inside_unit_disk(self, slack=1e-12):
        return all(p.x1 * p.x1 + p.x2 * p.x2 <= 1.0 + slack for p in self._points)

    def check_distinct(self):
        seen = {}
        for i, p in enumerate(self._points):
            if p in seen:
                raise DuplicatePointError(f"design points {seen[p]} and {i} coincide at {tuple(p)}")
            seen[p] = i


def kernel(p, q, h, ctx=math):
    """Gaussian covariance ``exp(-theta1 * dx1**2 - theta2 * dx2**2)`` between two points."""
    d1 = p[0] - q[0]
    d2 = p[1] - q[1]
    return ctx.exp(-h.theta1 * d1 * d1 - h.theta2 * d2 * d2)


def build_cov(d, h, digits=None):
    """Covariance matrix ``V`` of a design.

    Raises
    ------
    DuplicatePointError
        If two points coincide, which would make ``V`` singular.
    """
    d.check_distinct()
    n = len(d)
    if digits is None:
        x = d.array
        d1 = x[:, 0, None] - x[None, :, 0]
        d2 = x[:, 1, None] - x[None, :, 1]
        V = np.exp(-h.theta1 * d1 * d1 - h.theta2 * d2 * d2)
        np.fill_diagonal(V, 1.0)
        return V
    mp = mpmath.mp
    t1, t2 = mpmath.mpf(h.theta1), mpmath.mpf(h.theta2)
    pts = [(mpmath.mpf(p.x1), mpmath.mpf(p.x2)) for p in d]
    V = np.empty((n, n), dtype=object)
    for i in range(n):
        V[i, i] = mpmath.mpf(1)
        for j in range(i + 1, n):
            V[i, j] = V[j, i] = mp.exp(-t1 * (pts[i][0] - pts[j][0]) ** 2 - t2 * (pts[i][1] - pts[j][1]) ** 2)
    return V


def build_bordered(V):
    """Bordered matrix ``L = [[0, 1^T], [1, V]]``."""
    n = V.shape[0]
    if V.dtype == object:
        L = np.empty((n + 1, n + 1), dtype=object)
        L[0, 0] = mpmath.mpf(0)
        L[0, 1:] = mpmath.mpf(1)
        L[1:, 0] = mpmath.mpf(1)
    else:
        L = np.zeros((n + 1, n + 1))
        L[0, 1:] = 1.0
        L[1:, 0] = 1.0
    L[1:, 1:] = V
    return L


def condition_number(A):
    """Condition number, ``inf`` for a numerically singular matrix.

    Double arrays use the 2-norm; object (``mpf``) arrays use mpmath's
    1-norm estimate, which agrees with it to within a factor of ``n + 1``.
    """
    if A.dtype == object:
        M = mpmath.matrix(A.tolist())
        try:
            return mpmath.cond(M)
        except ZeroDivisionError:
            return mpmath.inf
    with np.errstate(all="ignore"):
        c = np.linalg.cond(A)
    return float(c) if np.isfinite(c) else math.inf


def trace_of_solve(L, R, max_cond=None):
    """``tr(L^-1 R)`` via a symmetric-indefinite factorization of ``L``.

    Parameters
    ----------
    L : ndarray
        Bordered matrix, float64 or an object array of ``mpf``.
    R : ndarray
        Symmetric moment matrix of the same shape and kind.
    max_cond : float, optional
        Refuse to solve (raising :class:`SingularMatrixError`) when the
        condition number of ``L`` exceeds this.  Defaults to ``1e12`` for
        double precision and ``10**(dps - 4)`` for extended precision.

    Returns
    -------
    value : float or mpmath.mpf
    cond : float or mpmath.mpf
        Condition number estimate of ``L``.
    """
    if L.dtype == object or R.dtype == object:
        return _trace_of_solve_mp(L, R, max_cond)
    cond = condition_number(L)
    limit = MAX_COND_DOUBLE if max_cond is None else max_cond
    if not cond <= limit:
        raise SingularMatrixError(
            f"bordered matrix condition number {cond:.3g} exceeds {limit:.3g}; use extended precision",
            cond=cond,
        )
    try:
        Y = scipy.linalg.solve(L, R, assume_a="sym", check_finite=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularMatrixError(f"factorization failed: {exc}", cond=cond) from exc
    return float(np.trace(Y)), cond


def _trace_of_solve_mp(L, R, max_cond):
    dps = mpmath.mp.dps
    Lm = mpmath.matrix(L.tolist())
    Rm = mpmath.matrix(R.tolist())
    cond = condition_number(L)
    limit = mpmath.mpf(10) ** (dps - 4) if max_cond is None else max_cond
    if not cond <= limit:
        raise SingularMatrixError(
            f"bordered matrix condition number {mpmath.nstr(cond, 3)} exceeds the {dps}-digit limit",
            cond=float(cond) if cond != mpmath.inf else math.inf,
            digits=dps,
        )
    try:
        # mpmath has no Bunch-Kaufman; LU with partial pivoting serves the indefinite L
        Y = mpmath.lu_solve(Lm, Rm) if Rm.cols == 1 else _mp_solve_columns(Lm, Rm)
    except ZeroDivisionError as exc:
        raise SingularMatrixError("factorization failed (exact zero pivot)", cond=math.inf, digits=dps) from exc
    return mpmath.fsum(Y[i, i] for i in range(Y.rows)), cond


def _mp_solve_columns(Lm, Rm):
    n = Lm.rows
    Y = mpmath.matrix(n, Rm.cols)
    for j in range(Rm.cols):
        col = mpmath.lu_solve(Lm, Rm.column(j))
        for i in range(n):
            Y[i, j] = col[i]
    return Y
