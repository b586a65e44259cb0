"""Independent reference computations used by the tests.

Nothing here calls into ``mdpsk_div``; each routine takes a different
route (high-precision series, direct quadrature, brute-force enumeration)
to the quantity the package computes.
"""

import math

import mpmath
import numpy as np
from scipy import integrate, special, stats


def i0_series_mp(z, terms=200):
    """Power series of I0 in 50-digit arithmetic."""
    with mpmath.workdps(50):
        z = mpmath.mpc(z)
        q = z * z / 4
        term = mpmath.mpc(1)
        total = mpmath.mpc(1)
        for k in range(1, terms):
            term = term * q / (k * k)
            total += term
        return complex(total)


def j0_series_mp(x, terms=200):
    with mpmath.workdps(50):
        x = mpmath.mpf(x)
        q = -x * x / 4
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        for k in range(1, terms):
            term = term * q / (k * k)
            total += term
        return float(total)


def bisect(f, lo, hi, tol=1e-13):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def marcum_q1_integral(a, b):
    """Defining integral ``int_b^inf x exp(-(x^2+a^2)/2) I0(a x) dx``."""
    f = lambda x: x * math.exp(-0.5 * (x - a) ** 2) * special.i0e(a * x)
    upper = max(a, b) + 40.0
    val, _ = integrate.quad(f, b, upper, epsabs=1e-13, epsrel=1e-12, limit=400, points=[a] if b < a < upper else None)
    return val


def marcum_q1_ncx2(a, b):
    return float(stats.ncx2.sf(b * b, 2, a * a))


def snr_for_lambda(lam, rho_mag=1.0):
    """Branch SNR giving a target lambda, ``(r g)^2 / ((1+g)^2 - (r g)^2) = lam``."""
    f = lambda g: (rho_mag * g) ** 2 / ((1 + g) ** 2 - (rho_mag * g) ** 2) - lam
    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
    return float(bisect(f, 0.0, hi, tol=1e-15 * hi))


def half_plane_bep_quad(lam, cos_angle):
    """``int Phi(-c sqrt(2 g)) exp(-g/lam)/lam dg`` -- the error probability of a
    Gaussian decision variable whose SNR is exponentially distributed."""
    f = lambda t: stats.norm.sf(cos_angle * math.sqrt(2.0 * lam * t)) * math.exp(-t)
    return integrate.quad(f, 0.0, 60.0, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


def lambda_of(snr, rho_mag):
    rg = rho_mag * snr
    return rg * rg / ((1 + snr) ** 2 - rg * rg)


def g_weights(lams):
    """Partial-fraction weights by solving the Vandermonde-type system.

    ``prod_i 1/(1 + s lam_i) = sum_i G_i / (1 + s lam_i)``; evaluating at
    ``L`` distinct points ``s`` gives a linear system for ``G``.
    """
    lams = np.asarray(lams, dtype=float)
    n = len(lams)
    s = np.linspace(0.3, 2.7, n) / lams.mean()
    a = 1.0 / (1.0 + s[:, None] * lams[None, :])
    b = np.prod(a, axis=1)
    return np.linalg.solve(a, b)


def xy_positive_mc(lam, n, rng):
    """Monte Carlo of the event ``X*Y > 0`` for a single branch, averaging the
    four conditional symbols; ``X, Y`` unit-variance Gaussians with means
    ``sqrt(2g) (cos a, sin a)`` and ``g`` exponential with mean ``lam``."""
    g = rng.exponential(lam, n)
    l = rng.choice([0, 3, 4, 7], n)
    a = l * np.pi / 4 - np.pi / 8
    r = np.sqrt(2 * g)
    x = r * np.cos(a) + rng.standard_normal(n)
    y = r * np.sin(a) + rng.standard_normal(n)
    return float(np.mean(x * y > 0))


def xy_positive_quad(lam, angle):
    """``P(X*Y > 0)`` averaged over exponential ``g`` by quadrature, with the
    conditional written as a sum of two Gaussian quadrant probabilities."""
    def f(t):
        r = math.sqrt(2.0 * lam * t)
        px, py = stats.norm.cdf(r * math.cos(angle)), stats.norm.cdf(r * math.sin(angle))
        return (px * py + (1 - px) * (1 - py)) * math.exp(-t)
    return integrate.quad(f, 0.0, 60.0, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
