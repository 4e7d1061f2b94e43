"""Closed-form scalar integrals of the Gaussian kernel.

Every moment-matrix entry reduces to products of the one-dimensional
integrals below.  Each function takes an optional ``ctx`` that supplies
``erf``, ``erfc``, ``exp``, ``log``, ``sqrt``, ``asin`` and ``pi``: the
:mod:`math` module for double precision (the default) or ``mpmath.mp`` for
extended precision.  Callers choose the working precision of ``mpmath.mp``
themselves, typically with ``mpmath.workdps``.
"""

import math

import mpmath

from .errors import DomainError

__all__ = [
    "erf_accurate",
    "erf_sum",
    "chord_primitive",
    "gauss_strip_integral",
    "gauss_strip_integral_offset",
    "gauss_pair_integral",
    "gauss_pair_integral_offset",
]

# exp(-x) for x above this is recombined in log space (theta * (a - b)**2 > 700)
_LOG_SPACE_THRESHOLD = 350.0
# below this the direct erf sum is at least as accurate as the erfc form
_ERFC_SWITCH = 0.5


def erf_accurate(x, digits=None):
    """Error function.

    Parameters
    ----------
    x : float
        Argument.
    digits : int, optional
        Decimal digits for an extended-precision result.  ``None`` gives the
        double-precision libm value.

    Returns
    -------
    float or mpmath.mpf
    """
    if digits is None:
        return math.erf(x)
    with mpmath.workdps(digits):
        return mpmath.erf(mpmath.mpf(x))


def erf_sum(u, v, ctx=math):
    """``erf(u) + erf(v)`` without cancellation when ``u`` and ``-v`` are both large."""
    if u > _ERFC_SWITCH and -v > _ERFC_SWITCH:
        return ctx.erfc(-v) - ctx.erfc(u)
    if v > _ERFC_SWITCH and -u > _ERFC_SWITCH:
        return ctx.erfc(-u) - ctx.erfc(v)
    return ctx.erf(u) + ctx.erf(v)


def chord_primitive(x, a, ctx=math):
    """Antiderivative of ``sqrt(a**2 - x**2)``.

    ``x * sqrt(a**2 - x**2) / 2 + a**2 / 2 * asin(x / a)``; zero when ``a == 0``.
    """
    if a < 0:
        raise DomainError(f"radius must be nonnegative, got {a!r}")
    if abs(x) > a:
        raise DomainError(f"|x| = {abs(x)!r} exceeds the radius {a!r}")
    if a == 0:
        return 0 * x
    r = x / a
    if r > 1:
        r = 1
    elif r < -1:
        r = -1
    return x * ctx.sqrt(a * a - x * x) / 2 + a * a / 2 * ctx.asin(r)


def gauss_strip_integral(theta, a, W, ctx=math):
    """Integral of ``exp(-theta * (a - x)**2)`` over ``[-W, W]``."""
    return gauss_strip_integral_offset(theta, a, 0 * W, W, ctx)


def gauss_strip_integral_offset(theta, a, center, half, ctx=math):
    """Integral of ``exp(-theta * (a - x)**2)`` over ``[center - half, center + half]``."""
    _check(theta, half)
    r = ctx.sqrt(theta)
    total = erf_sum(r * (half - center + a), r * (half + center - a), ctx)
    return ctx.sqrt(ctx.pi / (4 * theta)) * total


def gauss_pair_integral(theta, a, b, W, ctx=math):
    """Integral of ``exp(-theta * ((a - x)**2 + (b - x)**2))`` over ``[-W, W]``."""
    return gauss_pair_integral_offset(theta, a, b, 0 * W, W, ctx)


def gauss_pair_integral_offset(theta, a, b, center, half, ctx=math):
    """Integral of ``exp(-theta * ((a - x)**2 + (b - x)**2))`` over ``[center - half, center + half]``.

    The product of the two kernels is a single Gaussian centred at the
    midpoint ``(a + b) / 2`` with rate ``2 * theta``, scaled by
    ``exp(-theta * (a - b)**2 / 2)``.
    """
    _check(theta, half)
    mid = (a + b) / 2
    r = ctx.sqrt(2 * theta)
    total = erf_sum(r * (half - center + mid), r * (half + center - mid), ctx)
    pref = ctx.sqrt(ctx.pi / (8 * theta))
    expo = theta * (a - b) ** 2 / 2
    if ctx is math and expo > _LOG_SPACE_THRESHOLD:
        if total <= 0.0:
            return 0.0
        return math.exp(math.log(pref * total) - expo)
    return pref * total * ctx.exp(-expo)


def _check(theta, half):
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta!r}")
    if half < 0:
        raise DomainError(f"interval half-length must be nonnegative, got {half!r}")

