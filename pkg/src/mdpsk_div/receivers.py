"""
Combining differential detectors for L-branch MDPSK.

Every detector forms ``z = sum_i coeff_i * r_i(k) * conj(r_i(k-1)) * exp(-j phase_i)``
and decides on the phase increment whose phasor has the largest projection
on ``z``. They differ only in the per-branch coefficients and rotations:

==============================  ==========  ==============================
kind                            coeff_i     phase_i
==============================  ==========  ==============================
OPTIMUM_ASYM_INID (17)          w_i         angle(rho_i)
OPTIMUM_SYM_INID (18)           w_i         0
OPTIMUM_ASYM_IID (19)           1           common angle(rho)
PRODUCT_DETECTOR (20)           1           0
==============================  ==========  ==============================
"""

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fading import BranchStatistics

__all__ = ["ReceiverKind", "DecisionInput", "weights", "combine", "decide", "decide_with_ties",
           "combiner_coefficients"]


class ReceiverKind(enum.IntEnum):
    OPTIMUM_ASYM_INID = 17
    OPTIMUM_SYM_INID = 18
    OPTIMUM_ASYM_IID = 19
    PRODUCT_DETECTOR = 20


@dataclass(frozen=True)
class DecisionInput:
    """Received samples of one symbol pair plus the receiver's channel knowledge.

    ``r_k`` and ``r_km1`` may hold arrays (trailing axis = trials) as long as
    the leading axis indexes branches.
    """

    r_k: Sequence
    r_km1: Sequence
    weights: Sequence[float]
    rho_phases: Sequence[float]

    def __post_init__(self):
        n = len(self.weights)
        if n < 1:
            raise ValueError("at least one branch is required")
        if not (len(self.r_k) == len(self.r_km1) == len(self.rho_phases) == n):
            raise ValueError("branch lists must all have the same length")


def weights(stats: Sequence[BranchStatistics]) -> np.ndarray:
    """
    Optimum branch weights
    ``w_i = (1/N_i) |rho_i| g_i / ((1 + g_i)**2 - (|rho_i| g_i)**2)``
    with ``g_i`` the branch SNR per symbol.
    """
    out = []
    for s in stats:
        rg = s.rho_mag * s.snr
        out.append(rg / (s.noise_psd * ((1.0 + s.snr * (1.0 - s.rho_mag)) * (1.0 + s.snr + rg))))
    return np.array(out)


def common_phase(rho_phases) -> float:
    """Circular mean of the branch correlation angles.

    Identical angles come back unchanged, which is the i.i.d. case the
    common-rotation detector is derived for.
    """
    return math.atan2(np.mean(np.sin(rho_phases)), np.mean(np.cos(rho_phases)))


def combiner_coefficients(kind: ReceiverKind, branch_weights, rho_phases):
    """Return ``coeff_i * exp(-j phase_i)`` for every branch."""
    kind = ReceiverKind(kind)
    w = np.asarray(branch_weights, dtype=float)
    ph = np.asarray(rho_phases, dtype=float)
    if w.shape != ph.shape:
        raise ValueError("weights and rho_phases must have the same length")
    if kind is ReceiverKind.OPTIMUM_ASYM_INID:
        return w * np.exp(-1j * ph)
    if kind is ReceiverKind.OPTIMUM_SYM_INID:
        return w.astype(complex)
    if kind is ReceiverKind.OPTIMUM_ASYM_IID:
        return np.full(w.shape, np.exp(-1j * common_phase(ph)))
    return np.ones(w.shape, dtype=complex)


def combine(inp: DecisionInput, kind: ReceiverKind):
    """Combined phasor ``z``; scalar for scalar samples, array for per-trial arrays."""
    coeffs = combiner_coefficients(kind, inp.weights, inp.rho_phases)
    r_k = np.asarray(inp.r_k, dtype=complex)
    r_km1 = np.asarray(inp.r_km1, dtype=complex)
    products = r_k * np.conj(r_km1)
    coeffs = coeffs.reshape(coeffs.shape + (1,) * (products.ndim - 1))
    z = np.sum(coeffs * products, axis=0)
    return complex(z) if np.ndim(z) == 0 else z


def decide_with_ties(z, m_ary: int):
    """
    Vectorised maximum-projection decision.

    Returns
    -------
    m_hat : ndarray of int
        ``argmax_m Re[exp(-j 2 pi m / M) z]``; metrics within a relative
        1e-12 of the maximum count as tied and the smallest index wins.
    tie : ndarray of bool
        True where more than one index attained the maximum (this includes
        ``z == 0``, decided as 0).
    """
    if m_ary not in (2, 4, 8):
        raise ValueError(f"unsupported M={m_ary}")
    z = np.asarray(z, dtype=complex)
    angles = 2.0 * np.pi * np.arange(m_ary) / m_ary
    metric = np.cos(angles) * z.real[..., None] + np.sin(angles) * z.imag[..., None]
    best = metric.max(axis=-1, keepdims=True)
    tol = 1e-12 * np.abs(z)[..., None]
    near = metric >= best - tol
    m_hat = np.argmax(near, axis=-1)
    tie = near.sum(axis=-1) > 1
    return m_hat, tie


def decide(z, m_ary: int):
    """Decision index for a single combined phasor (or an array of them).

    >>> decide(np.exp(1j * np.pi / 4), 8)
    1
    """
    m_hat, _ = decide_with_ties(z, m_ary)
    return int(m_hat) if m_hat.ndim == 0 else m_hat
