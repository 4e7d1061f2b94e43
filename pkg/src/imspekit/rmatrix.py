"""Moment matrix ``R`` for rectangular and unit-disk prediction domains.

Rectangles are handled exactly with the erf closed forms.  The disk is cut
into ``n_int`` horizontal strips of height ``2 / n_int``; each strip is
replaced by a rectangle whose half-width is either the chord half-length at
mid-height ("simple") or the strip area divided by its height ("avg").  The
three strip rules:

======  =============  ===================================
method  half-width     outer (x2) factor
======  =============  ===================================
A       simple         midpoint value times strip height
B       avg            exact erf integral over the strip
C       avg            midpoint value times strip height
======  =============  ===================================
"""

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import mpmath
import numpy as np

from . import kernels
from .errors import DomainError
from .special import (
    chord_primitive,
    gauss_pair_integral,
    gauss_pair_integral_offset,
    gauss_strip_integral,
    gauss_strip_integral_offset,
)

__all__ = [
    "METHODS",
    "RectDomain",
    "DiskSpec",
    "Strip",
    "strip_center",
    "width_simple",
    "width_avg",
    "strip_geometry",
    "strips",
    "build_r_rect",
    "build_r_disk",
]

METHODS = ("A", "B", "C")


@dataclass(frozen=True)
class RectDomain:
    """Axis-aligned rectangle centred at ``(0, center2)``."""

    center2: float = 0.0
    half_width: float = 1.0
    half_height: float = 1.0

    def __post_init__(self):
        if not (self.half_width > 0 and self.half_height > 0):
            raise ValueError("rectangle half-width and half-height must be positive")
        if not all(math.isfinite(v) for v in (self.center2, self.half_width, self.half_height)):
            raise ValueError("rectangle parameters must be finite")

    def contains(self, p, slack=1e-12):
        return abs(p[0]) <= self.half_width + slack and abs(p[1] - self.center2) <= self.half_height + slack


@dataclass(frozen=True)
class DiskSpec:
    """Strip decomposition of the unit disk."""

    n_int: int = 256
    method: str = "C"

    def __post_init__(self):
        if isinstance(self.n_int, bool) or not isinstance(self.n_int, (int, np.integer)):
            raise ValueError(f"n_int must be an integer, got {self.n_int!r}")
        if self.n_int < 2 or self.n_int % 2:
            raise ValueError(f"n_int must be even and at least 2, got {self.n_int}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")

    def with_n_int(self, n_int):
        return replace(self, n_int=int(n_int))

    @staticmethod
    def contains(p, slack=1e-12):
        return p[0] * p[0] + p[1] * p[1] <= 1.0 + slack


class Strip(NamedTuple):
    index: int
    center2: float
    half_height: float
    width_simple: float
    width_avg: float


def _check_k(k, n_int):
    if n_int < 2 or n_int % 2:
        raise DomainError(f"n_int must be even and at least 2, got {n_int}")
    if not 1 <= k <= n_int:
        raise DomainError(f"strip index {k} outside 1..{n_int}")


def strip_center(k, n_int):
    """Mid-height ordinate of strip ``k`` (counted from the bottom): ``-1 - D + 2 k D`` with ``D = 1/n_int``."""
    _check_k(k, n_int)
    return (2 * k - 1 - n_int) / n_int


def width_simple(center2):
    """Chord half-length at ordinate ``center2``."""
    if not abs(center2) < 1:
        raise DomainError(f"strip centre {center2!r} is not strictly inside the disk")
    return math.sqrt(1.0 - center2 * center2)


def width_avg(k, n_int):
    """Half-width of the rectangle with the same area as strip ``k``."""
    _check_k(k, n_int)
    lo = (2 * (k - 1) - n_int) / n_int
    hi = (2 * k - n_int) / n_int
    return n_int / 2 * (chord_primitive(hi, 1.0) - chord_primitive(lo, 1.0))


def strip_geometry(n_int):
    """Vectorized ``(centers, widths_simple, widths_avg)`` for all strips."""
    if n_int < 2 or n_int % 2:
        raise DomainError(f"n_int must be even and at least 2, got {n_int}")
    j = np.arange(n_int + 1)
    # integer-exact edges make the strip areas telescope to pi
    edges = (2 * j - n_int) / n_int
    edges[0], edges[-1] = -1.0, 1.0
    prim = 0.5 * (edges * np.sqrt(np.clip(1.0 - edges * edges, 0.0, None)) + np.arcsin(np.clip(edges, -1.0, 1.0)))
    k = np.arange(1, n_int + 1)
    centers = (2 * k - 1 - n_int) / n_int
    w_simple = np.sqrt(1.0 - centers * centers)
    w_avg = n_int / 2 * np.diff(prim)
    return centers, w_simple, w_avg


def strips(n_int):
    centers, ws, wa = strip_geometry(n_int)
    half = 1.0 / n_int
    return [Strip(k + 1, float(centers[k]), half, float(ws[k]), float(wa[k])) for k in range(n_int)]


def _strip_geometry_mp(n_int, method):
    mp = mpmath.mp
    n = mpmath.mpf(n_int)
    edges = [mpmath.mpf(2 * j - n_int) / n for j in range(n_int + 1)]
    centers = [mpmath.mpf(2 * k - 1 - n_int) / n for k in range(1, n_int + 1)]
    if method == "A":
        widths = [mp.sqrt(1 - c * c) for c in centers]
    else:
        prim = [chord_primitive(x, mpmath.mpf(1), mp) for x in edges]
        widths = [n / 2 * (prim[k + 1] - prim[k]) for k in range(n_int)]
    return centers, widths


def build_r_rect(d, h, dom, digits=None):
    """Exact moment matrix over a rectangle.

    Parameters
    ----------
    d : Design
    h : Hyperparameters
    dom : RectDomain
    digits : int, optional
        Decimal digits for an extended-precision (object-array) result.
    """
    if digits is not None:
        with mpmath.workdps(digits):
            return _build_r_rect(d, h, dom, mpmath.mp, mpmath.mpf)
    return _build_r_rect(d, h, dom, math, float)


def _build_r_rect(d, h, dom, ctx, num):
    n = len(d)
    W, D, c = num(dom.half_width), num(dom.half_height), num(dom.center2)
    t1, t2 = num(h.theta1), num(h.theta2)
    pts = [(num(p.x1), num(p.x2)) for p in d]
    norm = 1 / (4 * W * D)
    R = np.empty((n + 1, n + 1), dtype=float if num is float else object)
    R[0, 0] = num(1)
    for j, (a1, a2) in enumerate(pts):
        R[0, j + 1] = R[j + 1, 0] = (
            norm * gauss_strip_integral(t1, a1, W, ctx) * gauss_strip_integral_offset(t2, a2, c, D, ctx)
        )
        for i in range(j + 1):
            b1, b2 = pts[i]
            R[i + 1, j + 1] = R[j + 1, i + 1] = (
                norm * gauss_pair_integral(t1, b1, a1, W, ctx) * gauss_pair_integral_offset(t2, b2, a2, c, D, ctx)
            )
    return R


def build_r_disk(d, h, spec, digits=None, backend=None, pairs=True):
    """Strip-decomposition estimate of the moment matrix over the unit disk.

    Parameters
    ----------
    d : Design
    h : Hyperparameters
    spec : DiskSpec
        Strip count and method.
    digits : int, optional
        Decimal digits for an extended-precision (object-array) result.
    backend : {"numba", "numpy"}, optional
        Double-precision kernel; defaults from ``IMSPEKIT_DISABLE_NUMBA``.
    pairs : bool
        When false only the top row (and ``R[0, 0]``) is filled; the
        remaining entries are NaN.

    Notes
    -----
    ``R[0, 0]`` is the summed rectangle area over ``pi`` for the chosen
    widths, so Method A shows its area excess there.
    """
    if digits is not None:
        with mpmath.workdps(digits):
            return _build_r_disk_mp(d, h, spec, pairs)
    n = len(d)
    half = 1.0 / spec.n_int
    centers, ws, wa = strip_geometry(spec.n_int)
    widths = ws if spec.method == "A" else wa
    outer = kernels.OUTER_ERF if spec.method == "B" else kernels.OUTER_MIDPOINT
    ei, ej = kernels.entry_index(n, pairs)
    x = d.array
    terms = kernels.disk_terms(x[:, 0], x[:, 1], ei, ej, h.theta1, h.theta2, centers, widths, half, outer, backend)
    R = np.full((n + 1, n + 1), np.nan)
    R[0, 0] = math.fsum(4.0 * widths * half) / math.pi
    for e in range(ei.shape[0]):
        s = math.fsum(terms[:, e]) / math.pi
        r, c = ei[e] + 1, ej[e] + 1
        R[r, c] = R[c, r] = s
    return R


def _build_r_disk_mp(d, h, spec, pairs):
    mp = mpmath.mp
    n = len(d)
    n_int = spec.n_int
    half = mpmath.mpf(1) / n_int
    height = 2 * half
    t1, t2 = mpmath.mpf(h.theta1), mpmath.mpf(h.theta2)
    pts = [(mpmath.mpf(p.x1), mpmath.mpf(p.x2)) for p in d]
    raw = [(p.x1, p.x2) for p in d]
    ei, ej = kernels.entry_index(n, pairs)
    centers, widths = _strip_geometry_mp(n_int, spec.method)
    erf_outer = spec.method == "B"

    entries = []
    for i, j in zip(ei.tolist(), ej.tolist()):
        if i < 0:
            entries.append(((None, raw[j][0]), (None, raw[j][1]), None, j))
        else:
            k1 = tuple(sorted((raw[i][0], raw[j][0])))
            k2 = tuple(sorted((raw[i][1], raw[j][1])))
            entries.append((k1, k2, i, j))

    acc = [[] for _ in entries]
    for c, w in zip(centers, widths):
        f1, f2 = {}, {}
        for slot, (k1, k2, i, j) in enumerate(entries):
            if k1 not in f1:
                if i is None:
                    f1[k1] = gauss_strip_integral(t1, pts[j][0], w, mp)
                else:
                    f1[k1] = gauss_pair_integral(t1, pts[i][0], pts[j][0], w, mp)
            if k2 not in f2:
                if i is None:
                    a2 = pts[j][1]
                    f2[k2] = (
                        gauss_strip_integral_offset(t2, a2, c, half, mp)
                        if erf_outer
                        else mp.exp(-t2 * (a2 - c) ** 2) * height
                    )
                else:
                    a2, b2 = pts[i][1], pts[j][1]
                    f2[k2] = (
                        gauss_pair_integral_offset(t2, a2, b2, c, half, mp)
                        if erf_outer
                        else mp.exp(-t2 * ((a2 - c) ** 2 + (b2 - c) ** 2)) * height
                    )
            acc[slot].append(f1[k1] * f2[k2])

    R = np.full((n + 1, n + 1), mpmath.mpf("nan"), dtype=object)
    R[0, 0] = mpmath.fsum(4 * w * half for w in widths) / mp.pi
    for slot, (_, _, i, j) in enumerate(entries):
        r = 0 if i is None else i + 1
        s = mpmath.fsum(acc[slot]) / mp.pi
        R[r, j + 1] = R[j + 1, r] = s
    return R
