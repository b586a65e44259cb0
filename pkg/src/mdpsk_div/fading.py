"""
Branch fading statistics for Rayleigh channels with a non-isotropic
(von Mises) angle-of-arrival distribution.

The complex gain of a branch is a zero-mean circular Gaussian process whose
normalized autocorrelation is

    rho(tau) = I0(sqrt(kappa**2 - (2 pi fd tau)**2 + 1j 4 pi kappa fd tau)) / I0(kappa)

``kappa = 0`` gives the isotropic Jakes model ``J0(2 pi fd tau)``; ``kappa > 0``
makes the Doppler spectrum asymmetric and ``rho`` complex, so the in-phase
and quadrature fading components become cross-correlated.

Only the lag-one pair ``(c(k-1), c(k))`` matters to a differential
detector. ``sample_fading_pair`` draws such pairs, and the remaining
functions reduce a Doppler model to the per-branch statistics the receivers
and the error-probability formulas consume.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .specfun import bessel_i0, bessel_i0_of_square

__all__ = [
    "DopplerModel",
    "LagCovariance",
    "BranchStatistics",
    "correlation_coefficient",
    "symbol_covariance",
    "covariance_matrix",
    "sample_fading_pair",
    "branch_statistics",
]

RhoMode = Literal["direct", "integrated"]

#: Fading power per quadrature giving unit-power fading, ``E|c|**2 = 2*c0 = 1``.
DEFAULT_C0 = 0.5
DEFAULT_QUAD_POINTS = 64


@dataclass(frozen=True)
class DopplerModel:
    """Non-isotropic scattering parameters of one branch.

    Attributes
    ----------
    kappa : float
        Width parameter of the von Mises angle-of-arrival distribution
        (0 is isotropic scattering).
    fd_T : float
        Maximum Doppler frequency times the symbol period.
    """

    kappa: float
    fd_T: float

    def __post_init__(self):
        if not (self.kappa >= 0.0 and math.isfinite(self.kappa)):
            raise ValueError(f"kappa must be finite and >= 0, got {self.kappa}")
        if not (self.fd_T >= 0.0 and math.isfinite(self.fd_T)):
            raise ValueError(f"fd_T must be finite and >= 0, got {self.fd_T}")


@dataclass(frozen=True)
class LagCovariance:
    """Quadrature covariances of the matched-filter fading samples at one lag.

    ``c0 = E[a(k)^2]``, ``c_l = E[a(k-l) a(k)]`` and ``d_l = E[a(k) b(k-l)]``,
    where ``a`` and ``b`` are the in-phase and quadrature fading samples.
    """

    c0: float
    c_l: float
    d_l: float

    def __post_init__(self):
        if not self.c0 > 0.0:
            raise ValueError("c0 must be positive")
        if self.c_l ** 2 + self.d_l ** 2 > self.c0 ** 2 * (1.0 + 1e-12):
            raise ValueError("correlation magnitude exceeds one")

    @property
    def rho(self) -> complex:
        """Normalized complex correlation ``(c_l - j d_l) / c0``."""
        return complex(self.c_l, -self.d_l) / self.c0


@dataclass(frozen=True)
class BranchStatistics:
    """What a receiver needs to know about one diversity branch.

    Attributes
    ----------
    noise_psd : float
        One-sided noise level ``N``, the variance of the complex
        matched-filter noise sample.
    snr : float
        Mean received SNR per symbol, ``2 Es c0 / N``.
    rho_mag, rho_phase : float
        Magnitude and angle of the lag-one fading correlation coefficient.
    energy_per_symbol : float
        Transmitted symbol energy ``Es``.
    """

    noise_psd: float
    snr: float
    rho_mag: float
    rho_phase: float
    energy_per_symbol: float = 1.0

    def __post_init__(self):
        if not self.noise_psd > 0.0:
            raise ValueError("noise_psd must be positive")
        if not self.snr >= 0.0:
            raise ValueError("snr must be non-negative")
        if not 0.0 <= self.rho_mag <= 1.0:
            raise ValueError(f"rho_mag must lie in [0, 1], got {self.rho_mag}")
        if not -math.pi < self.rho_phase <= math.pi:
            raise ValueError("rho_phase must lie in (-pi, pi]")
        if not self.energy_per_symbol > 0.0:
            raise ValueError("energy_per_symbol must be positive")

    @property
    def rho(self) -> complex:
        return cmath.rect(self.rho_mag, self.rho_phase)

    @property
    def fading_power(self) -> float:
        """Per-quadrature fading variance ``c0`` implied by ``snr``."""
        return self.snr * self.noise_psd / (2.0 * self.energy_per_symbol)

    def snr_per_bit(self, m_ary: int) -> float:
        return self.snr / math.log2(m_ary)

    @classmethod
    def from_rho(cls, rho: complex, snr: float, noise_psd: float = 1.0, energy_per_symbol: float = 1.0):
        mag = abs(rho)
        phase = cmath.phase(rho) if mag > 0 else 0.0
        if phase == -math.pi:
            phase = math.pi
        return cls(noise_psd, snr, min(mag, 1.0), phase, energy_per_symbol)


def correlation_coefficient(model: DopplerModel, tau_over_T):
    """
    Normalized autocorrelation of the fading gain at lag ``tau``.

    Parameters
    ----------
    model : DopplerModel
    tau_over_T : float or array_like
        Lag in symbol periods.

    Returns
    -------
    complex or ndarray of complex
        ``E[c(t) c*(t - tau)] / E|c(t)|**2``.

    Examples
    --------
    >>> r = correlation_coefficient(DopplerModel(3.0, 0.03), 1.0)
    >>> round(r.real, 4), round(r.imag, 4)
    (0.9871, 0.1519)
    """
    tau = np.asarray(tau_over_T, dtype=float)
    if not np.all(np.isfinite(tau)):
        raise ValueError("tau_over_T must be finite")
    x = 2.0 * math.pi * model.fd_T * tau
    # squared argument of I0; for kappa == 0 the imaginary part is exactly 0
    w = (model.kappa ** 2 - x * x) + 1j * (2.0 * model.kappa * x)
    out = bessel_i0_of_square(w) / bessel_i0(model.kappa).real
    return complex(out) if np.ndim(out) == 0 else out


def symbol_covariance(model: DopplerModel, lag: int, c0_continuous: float = DEFAULT_C0,
                      quad_points: int = DEFAULT_QUAD_POINTS) -> LagCovariance:
    """
    Covariance of the matched-filter fading samples ``lag`` symbols apart.

    The rectangular matched filter averages the continuous gain over one
    symbol, so ``C(l)`` and ``D(l)`` are double integrals of the continuous
    covariances over two unit intervals, with ``tau = l + x - y``,
    ``x, y`` in ``[0, 1]``:

        C(l) = R(0) * int int Re rho(tau) dx dy
        D(l) = -R(0) * int int Im rho(tau) dx dy

    Both are evaluated by tensor-product Gauss-Legendre quadrature.

    Parameters
    ----------
    model : DopplerModel
    lag : int
        Non-negative lag in symbols.
    c0_continuous : float
        Per-quadrature variance ``R(0)`` of the continuous gain process.
    quad_points : int
        Gauss-Legendre nodes per axis (>= 8).
    """
    if lag < 0 or int(lag) != lag:
        raise ValueError("lag must be a non-negative integer")
    if quad_points < 8:
        raise ValueError("quad_points must be at least 8")
    if not c0_continuous > 0:
        raise ValueError("c0_continuous must be positive")

    nodes, weights = np.polynomial.legendre.leggauss(int(quad_points))
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    ww = weights[:, None] * weights[None, :]

    def integrate(shift):
        vals = correlation_coefficient(model, shift + nodes[:, None] - nodes[None, :])
        return complex(np.sum(ww * vals))

    # zero-lag integral is real by Hermitian symmetry of rho
    c0 = c0_continuous * integrate(0.0).real
    if lag == 0:
        return LagCovariance(c0, c0, 0.0)
    s = integrate(float(lag))
    c_l = c0_continuous * s.real
    d_l = -c0_continuous * s.imag
    return LagCovariance(c0, c_l, d_l)


def covariance_matrix(cov: LagCovariance) -> np.ndarray:
    """Covariance of ``[a(k), a(k-l), b(k), b(k-l)]``."""
    c0, c, d = cov.c0, cov.c_l, cov.d_l
    return np.array([
        [c0, c, 0.0, d],
        [c, c0, -d, 0.0],
        [0.0, -d, c0, c],
        [d, 0.0, c, c0],
    ])


def _complex_normal(rng, size, variance):
    # circular: variance/2 per real dimension
    shape = (2,) if size is None else (2, size)
    z = rng.standard_normal(shape)
    return math.sqrt(variance / 2.0) * (z[0] + 1j * z[1])


def sample_fading_pair(stats: BranchStatistics, c0: float, rng: np.random.Generator, size=None):
    """
    Draw lag-one fading pairs ``(c(k-1), c(k))``.

    ``c(k-1)`` is circular complex Gaussian with ``E|c|**2 = 2*c0``, and
    ``c(k) = rho * c(k-1) + e`` with an independent innovation ``e`` of
    variance ``2*c0*(1 - |rho|**2)``. This reproduces the conditional mean
    ``rho * c(k-1)`` and the conditional variance of a jointly Gaussian pair
    with correlation ``rho``.

    Parameters
    ----------
    stats : BranchStatistics
        Only ``rho`` is used.
    c0 : float
        Per-quadrature fading variance.
    rng : numpy.random.Generator
    size : int, optional
        Number of pairs; a single pair of complex scalars when omitted.

    Returns
    -------
    previous, current : complex or ndarray of complex
    """
    if not c0 > 0:
        raise ValueError("c0 must be positive")
    rho = stats.rho
    previous = _complex_normal(rng, size, 2.0 * c0)
    innovation_var = 2.0 * c0 * max(0.0, 1.0 - stats.rho_mag ** 2)
    # always drawn so the random-stream layout does not depend on rho
    current = rho * previous + _complex_normal(rng, size, innovation_var)
    if size is None:
        return complex(previous), complex(current)
    return previous, current


def branch_statistics(model: DopplerModel, es: float, noise_psd: float, c0: float = DEFAULT_C0,
                      mode: RhoMode = "direct", quad_points: int = DEFAULT_QUAD_POINTS) -> BranchStatistics:
    """
    Reduce a Doppler model and link budget to per-branch statistics.

    ``mode="direct"`` takes ``rho`` as the continuous correlation at one
    symbol lag; ``mode="integrated"`` includes the matched-filter averaging
    through :func:`symbol_covariance`. The SNR is ``2 es c0 / noise_psd``.
    """
    if not (es > 0 and noise_psd > 0 and c0 > 0):
        raise ValueError("es, noise_psd and c0 must be positive")
    if mode == "direct":
        rho = correlation_coefficient(model, 1.0)
    elif mode == "integrated":
        rho = symbol_covariance(model, 1, c0, quad_points).rho
    else:
        raise ValueError(f"unknown rho mode {mode!r}")
    return BranchStatistics.from_rho(rho, 2.0 * es * c0 / noise_psd, noise_psd, es)
