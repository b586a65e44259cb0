"""
Special functions for the channel model and the error-probability formulas.

``bessel_i0`` evaluates the modified Bessel function of the first kind and
order zero for complex arguments by its power series. ``marcum_q1`` is the
first-order Marcum Q-function computed from its Bessel-series expansion with
exponentially scaled Bessel functions, which keeps it finite for large
arguments.
"""

import math

import numpy as np
from scipy import special

from .exceptions import DomainError

__all__ = ["MAX_ARGUMENT", "bessel_i0", "bessel_i0_of_square", "bessel_j0", "marcum_q1"]

#: Largest supported ``|z|`` for the Bessel evaluators.
MAX_ARGUMENT = 30.0

_SERIES_RTOL = 1e-17
# sum|terms| / |sum| above this means the series has lost too many digits
_MAX_CONDITION = 1e2
_MARCUM_TERMS_PER_BLOCK = 64
_MARCUM_MAX_TERMS = 200_000


def _check_finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise DomainError("non-finite argument")


def bessel_i0_of_square(w):
    """Return ``I0(sqrt(w))`` for complex ``w``.

    ``I0(sqrt(w))`` is an entire function of ``w``, so no square-root branch
    has to be chosen. This is the form the scattering correlation model
    needs, because its argument is naturally available squared.

    Parameters
    ----------
    w : complex or array_like of complex
        Squared argument, ``|w| <= MAX_ARGUMENT**2``.

    Returns
    -------
    complex or ndarray of complex
    """
    w = np.asarray(w, dtype=complex)
    _check_finite(w)
    if np.any(np.abs(w) > MAX_ARGUMENT ** 2):
        raise DomainError(f"|z| exceeds the supported range {MAX_ARGUMENT}")

    q = w / 4.0
    term = np.ones_like(q)
    total = np.ones_like(q)
    magnitude = np.ones(q.shape)
    k = 0
    active = np.ones(q.shape, dtype=bool)
    while np.any(active):
        k += 1
        term = term * q / (k * k)
        total = total + np.where(active, term, 0.0)
        magnitude = magnitude + np.where(active, np.abs(term), 0.0)
        active = active & (np.abs(term) >= _SERIES_RTOL * np.abs(total))

    bad = magnitude > _MAX_CONDITION * np.abs(total)
    if np.any(bad):
        total = np.where(bad, special.iv(0, np.sqrt(w)), total)
    return complex(total) if total.ndim == 0 else total


def bessel_i0(z):
    """
    Modified Bessel function of the first kind, order zero, complex argument.

    Evaluated as ``sum_k (z**2/4)**k / (k!)**2``, stopping once a term drops
    below 1e-17 of the partial sum. Where the terms cancel heavily (large
    arguments near the imaginary axis) the AMOS routine in scipy is used
    instead, since double precision cannot hold the series result there.

    Parameters
    ----------
    z : complex or array_like of complex
        Argument with ``|z| <= 30``.

    Returns
    -------
    complex or ndarray of complex

    Raises
    ------
    DomainError
        If ``|z| > 30`` or ``z`` is not finite.

    Examples
    --------
    >>> bessel_i0(0)
    (1+0j)
    >>> round(bessel_i0(3).real, 6)
    4.880793
    """
    z = np.asarray(z, dtype=complex)
    _check_finite(z)
    if np.any(np.abs(z) > MAX_ARGUMENT):
        raise DomainError(f"|z| exceeds the supported range {MAX_ARGUMENT}")
    return bessel_i0_of_square(z * z)


def bessel_j0(x):
    """Bessel function of the first kind, order zero, for real ``|x| <= 30``."""
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    if np.any(np.abs(x) > MAX_ARGUMENT):
        raise DomainError(f"|x| exceeds the supported range {MAX_ARGUMENT}")
    out = special.j0(x)
    return float(out) if out.ndim == 0 else out


def _scaled_bessel_series(ratio, x, start):
    """Sum ``ratio**k * ive(k, x)`` for ``k >= start`` (``0 <= ratio <= 1``)."""
    total = 0.0
    k0 = start
    while k0 < _MARCUM_MAX_TERMS:
        k = np.arange(k0, k0 + _MARCUM_TERMS_PER_BLOCK)
        with np.errstate(under="ignore"):
            terms = np.power(ratio, k) * special.ive(k, x)
        total += float(terms.sum())
        if terms[-1] <= _SERIES_RTOL * max(total, 1e-300):
            return total
        k0 += _MARCUM_TERMS_PER_BLOCK
    raise DomainError("Marcum Q series did not converge")


def marcum_q1(a, b):
    """
    First-order Marcum Q-function ``Q1(a, b)``.

    ``Q1(a, b) = integral_b^inf x exp(-(x**2 + a**2)/2) I0(a x) dx``, i.e.
    the probability that a Rician variable with noncentrality ``a`` (unit
    per-dimension variance) exceeds ``b``.

    The Bessel-series expansions used are

    * ``a < b``: ``Q1 = exp(-(a**2+b**2)/2) * sum_{k>=0} (a/b)**k I_k(ab)``
    * ``a > b``: ``1 - Q1 = exp(-(a**2+b**2)/2) * sum_{k>=1} (b/a)**k I_k(ab)``
    * ``a == b``: ``Q1 = (1 + exp(-a**2) I_0(a**2)) / 2``

    with ``exp(-(a**2+b**2)/2) I_k(ab) = exp(-(a-b)**2/2) ive(k, ab)``. The
    complement in the ``a > b`` case is summed directly, so small values of
    ``1 - Q1`` keep their absolute accuracy.

    Parameters
    ----------
    a, b : float
        Non-negative, finite.

    Returns
    -------
    float
        ``Q1(a, b)`` in ``[0, 1]``.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("Marcum Q arguments must be finite")
    if a < 0.0 or b < 0.0:
        raise DomainError("Marcum Q arguments must be non-negative")
    if b == 0.0:
        return 1.0
    if a == 0.0:
        return math.exp(-0.5 * b * b)

    x = a * b
    scale = math.exp(-0.5 * (a - b) ** 2)
    if a == b:
        q = 0.5 * (1.0 + float(special.ive(0, x)))
    elif a < b:
        if scale == 0.0:
            return 0.0
        q = scale * _scaled_bessel_series(a / b, x, 0)
    else:
        if scale == 0.0:
            return 1.0
        q = 1.0 - scale * _scaled_bessel_series(b / a, x, 1)
    return min(1.0, max(0.0, q))
