"""Per-strip moment contributions for the disk, in double precision.

``disk_terms`` returns an ``(n_int, n_entries)`` array whose column ``e``
holds the unnormalized contribution of every strip to moment entry
``(ei[e] + 1, ej[e] + 1)`` (``ei[e] == -1`` marks the top row).  The strip
sums themselves are taken by the caller with :func:`math.fsum`, so the
result does not depend on the order strips are evaluated in.

Two interchangeable backends exist: a numba loop nest and a numpy
broadcast.  :func:`disk_terms` picks one from ``IMSPEKIT_DISABLE_NUMBA``
unless told otherwise.
"""

import math

import numpy as np
from scipy.special import erf as _np_erf
from scipy.special import erfc as _np_erfc

from ._accel import NUMBA_AVAILABLE, default_backend, njit

__all__ = ["entry_index", "disk_terms", "disk_terms_numba", "disk_terms_numpy", "OUTER_MIDPOINT", "OUTER_ERF"]

OUTER_MIDPOINT = 0
OUTER_ERF = 1

_SWITCH = 0.5


def entry_index(n, pairs=True):
    """Upper-triangle entry layout for an ``n``-point design.

    Top-row entries come first (``ei == -1``), then ``(i, j)`` with ``i <= j``.
    """
    ei = [-1] * n
    ej = list(range(n))
    if pairs:
        for i in range(n):
            for j in range(i, n):
                ei.append(i)
                ej.append(j)
    return np.asarray(ei, dtype=np.int64), np.asarray(ej, dtype=np.int64)


@njit(cache=True)
def _erf_sum(u, v):
    if u > _SWITCH and -v > _SWITCH:
        return math.erfc(-v) - math.erfc(u)
    if v > _SWITCH and -u > _SWITCH:
        return math.erfc(-u) - math.erfc(v)
    return math.erf(u) + math.erf(v)


@njit(cache=True)
def _disk_terms_loop(x1, x2, ei, ej, theta1, theta2, centers, widths, half, outer):
    nk = centers.shape[0]
    ne = ei.shape[0]
    out = np.empty((nk, ne))
    r1 = math.sqrt(theta1)
    r1p = math.sqrt(2.0 * theta1)
    r2 = math.sqrt(theta2)
    r2p = math.sqrt(2.0 * theta2)
    c1 = math.sqrt(math.pi / (4.0 * theta1))
    c1p = math.sqrt(math.pi / (8.0 * theta1))
    c2 = math.sqrt(math.pi / (4.0 * theta2))
    c2p = math.sqrt(math.pi / (8.0 * theta2))
    height = 2.0 * half
    for e in range(ne):
        i = ei[e]
        j = ej[e]
        if i < 0:
            a1 = x1[j]
            a2 = x2[j]
            for k in range(nk):
                w = widths[k]
                c = centers[k]
                f1 = c1 * _erf_sum(r1 * (w + a1), r1 * (w - a1))
                if outer == 1:
                    f2 = c2 * _erf_sum(r2 * (half - c + a2), r2 * (half + c - a2))
                else:
                    f2 = math.exp(-theta2 * (a2 - c) * (a2 - c)) * height
                out[k, e] = f1 * f2
        else:
            a1 = x1[i]
            a2 = x2[i]
            b1 = x1[j]
            b2 = x2[j]
            m1 = 0.5 * (a1 + b1)
            m2 = 0.5 * (a2 + b2)
            sep = math.exp(-0.5 * (theta1 * (a1 - b1) * (a1 - b1) + theta2 * (a2 - b2) * (a2 - b2)))
            sep1 = math.exp(-0.5 * theta1 * (a1 - b1) * (a1 - b1))
            for k in range(nk):
                w = widths[k]
                c = centers[k]
                g1 = c1p * _erf_sum(r1p * (w + m1), r1p * (w - m1))
                if outer == 1:
                    g2 = c2p * _erf_sum(r2p * (half - c + m2), r2p * (half + c - m2))
                    out[k, e] = g1 * g2 * sep
                else:
                    g2 = math.exp(-theta2 * ((a2 - c) * (a2 - c) + (b2 - c) * (b2 - c))) * height
                    out[k, e] = g1 * g2 * sep1
    return out


def _erf_sum_np(u, v):
    direct = _np_erf(u) + _np_erf(v)
    pos = (u > _SWITCH) & (-v > _SWITCH)
    neg = (v > _SWITCH) & (-u > _SWITCH)
    if pos.any():
        direct = np.where(pos, _np_erfc(-v) - _np_erfc(u), direct)
    if neg.any():
        direct = np.where(neg, _np_erfc(-u) - _np_erfc(v), direct)
    return direct


def disk_terms_numpy(x1, x2, ei, ej, theta1, theta2, centers, widths, half, outer):
    """Broadcast implementation of the strip contributions."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    w = np.asarray(widths, dtype=float)[:, None]
    c = np.asarray(centers, dtype=float)[:, None]
    out = np.empty((w.shape[0], ei.shape[0]))
    height = 2.0 * half

    top = ei < 0
    if top.any():
        a1 = x1[ej[top]][None, :]
        a2 = x2[ej[top]][None, :]
        r1 = math.sqrt(theta1)
        f1 = math.sqrt(math.pi / (4.0 * theta1)) * _erf_sum_np(r1 * (w + a1), r1 * (w - a1))
        if outer == OUTER_ERF:
            r2 = math.sqrt(theta2)
            f2 = math.sqrt(math.pi / (4.0 * theta2)) * _erf_sum_np(r2 * (half - c + a2), r2 * (half + c - a2))
        else:
            f2 = np.exp(-theta2 * (a2 - c) * (a2 - c)) * height
        out[:, top] = f1 * f2

    pair = ~top
    if pair.any():
        a1 = x1[ei[pair]][None, :]
        a2 = x2[ei[pair]][None, :]
        b1 = x1[ej[pair]][None, :]
        b2 = x2[ej[pair]][None, :]
        m1 = 0.5 * (a1 + b1)
        m2 = 0.5 * (a2 + b2)
        r1p = math.sqrt(2.0 * theta1)
        g1 = math.sqrt(math.pi / (8.0 * theta1)) * _erf_sum_np(r1p * (w + m1), r1p * (w - m1))
        if outer == OUTER_ERF:
            r2p = math.sqrt(2.0 * theta2)
            g2 = math.sqrt(math.pi / (8.0 * theta2)) * _erf_sum_np(r2p * (half - c + m2), r2p * (half + c - m2))
            sep = np.exp(-0.5 * (theta1 * (a1 - b1) * (a1 - b1) + theta2 * (a2 - b2) * (a2 - b2)))
        else:
            g2 = np.exp(-theta2 * ((a2 - c) * (a2 - c) + (b2 - c) * (b2 - c))) * height
            sep = np.exp(-0.5 * theta1 * (a1 - b1) * (a1 - b1))
        out[:, pair] = g1 * g2 * sep
    return out


def disk_terms_numba(x1, x2, ei, ej, theta1, theta2, centers, widths, half, outer):
    """Compiled implementation of the strip contributions."""
    if not NUMBA_AVAILABLE:  # pragma: no cover
        raise RuntimeError("numba is not installed")
    return _disk_terms_loop(
        np.ascontiguousarray(x1, dtype=np.float64),
        np.ascontiguousarray(x2, dtype=np.float64),
        ei,
        ej,
        float(theta1),
        float(theta2),
        np.ascontiguousarray(centers, dtype=np.float64),
        np.ascontiguousarray(widths, dtype=np.float64),
        float(half),
        int(outer),
    )


def disk_terms(x1, x2, ei, ej, theta1, theta2, centers, widths, half, outer, backend=None):
    backend = backend or default_backend()
    if backend == "numba":
        return disk_terms_numba(x1, x2, ei, ej, theta1, theta2, centers, widths, half, outer)
    if backend == "numpy":
        return disk_terms_numpy(x1, x2, ei, ej, theta1, theta2, centers, widths, half, outer)
    raise ValueError(f"unknown backend {backend!r}")
