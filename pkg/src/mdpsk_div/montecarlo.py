"""
Link-level Monte Carlo estimation of per-bit error probabilities.

Each trial is one independent symbol pair. The previous transmitted phase is
0, which loses nothing because fading and noise are circularly symmetric.
The next phase is ``2 pi m / M`` with ``m`` uniform. Every branch gets a
lag-one fading pair and two independent noise samples, the chosen combiner
decides ``m_hat``, and bit errors are tallied per Gray-label position.

Trials are grouped into fixed blocks of ``BLOCK_SIZE``. The generator for a
block is keyed on ``(seed, grid_index, block)`` alone, and full-size arrays
are drawn even for a short final block. The randomness of trial ``t`` is
therefore a function of ``(seed, grid_index, t)`` only, and tallies are
identical for any number of worker processes.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .fading import BranchStatistics, DopplerModel, branch_statistics, sample_fading_pair
from .modem import gray_map, synthesize_received
from .receivers import DecisionInput, ReceiverKind, combine, decide_with_ties, weights

__all__ = [
    "BLOCK_SIZE",
    "BranchSpec",
    "SimConfig",
    "BitErrorTally",
    "EstimateWithCI",
    "resolve_branches",
    "run_point",
    "run_point_many",
    "estimate",
]

BLOCK_SIZE = 1 << 16
MIN_TRIALS = 10_000


@dataclass(frozen=True)
class BranchSpec:
    """One diversity branch of a simulation.

    ``fraction`` is this branch's share of the total mean SNR per bit.
    ``rho`` overrides the correlation coefficient the Doppler model would
    give, which is how a fully decorrelated (``rho = 0``) or static channel
    is set up directly.
    """

    fraction: float
    doppler: Optional[DopplerModel] = None
    noise_psd: float = 1.0
    rho: Optional[complex] = None

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")
        if not self.noise_psd > 0.0:
            raise ValueError("noise_psd must be positive")
        if self.doppler is None and self.rho is None:
            raise ValueError("a branch needs a Doppler model or an explicit rho")
        if self.rho is not None and abs(self.rho) > 1.0 + 1e-12:
            raise ValueError("|rho| must not exceed 1")


@dataclass(frozen=True)
class SimConfig:
    branches: tuple
    snr_db: tuple
    m_ary: int = 8
    receiver: ReceiverKind = ReceiverKind.OPTIMUM_ASYM_INID
    trials: int = 1_000_000
    seed: int = 1
    rho_mode: str = "direct"
    es: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        object.__setattr__(self, "snr_db", tuple(float(x) for x in self.snr_db))
        object.__setattr__(self, "receiver", ReceiverKind(self.receiver))
        if self.m_ary not in (2, 4, 8):
            raise ValueError(f"unsupported M={self.m_ary}")
        if not self.branches:
            raise ValueError("at least one branch is required")
        if abs(math.fsum(b.fraction for b in self.branches) - 1.0) > 1e-9:
            raise ValueError("branch energy fractions must sum to 1")
        if not self.snr_db:
            raise ValueError("SNR grid is empty")
        if not all(math.isfinite(x) for x in self.snr_db):
            raise ValueError("SNR grid values must be finite")
        if self.trials < MIN_TRIALS:
            raise ValueError(f"trials must be at least {MIN_TRIALS}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.rho_mode not in ("direct", "integrated"):
            raise ValueError(f"unknown rho mode {self.rho_mode!r}")
        if not self.es > 0:
            raise ValueError("es must be positive")


@dataclass(frozen=True)
class BitErrorTally:
    """Error counts accumulated over ``trials`` symbol decisions.

    ``sum_sq_errors`` holds the sum over trials of the squared number of bit
    errors in a trial, which gives the exact variance of the average BEP.
    ``ties`` counts decisions taken on a boundary (including ``z == 0``).
    """

    bit_errors: tuple
    symbol_errors: int = 0
    trials: int = 0
    sum_sq_errors: int = 0
    ties: int = 0

    def __post_init__(self):
        if any(e > self.trials for e in self.bit_errors) or self.symbol_errors > self.trials:
            raise ValueError("error count exceeds trial count")

    def __add__(self, other):
        if len(self.bit_errors) != len(other.bit_errors):
            raise ValueError("tallies for different constellation sizes")
        return BitErrorTally(
            tuple(a + b for a, b in zip(self.bit_errors, other.bit_errors)),
            self.symbol_errors + other.symbol_errors,
            self.trials + other.trials,
            self.sum_sq_errors + other.sum_sq_errors,
            self.ties + other.ties,
        )

    @classmethod
    def empty(cls, bits_per_symbol):
        return cls((0,) * bits_per_symbol)


@dataclass(frozen=True)
class EstimateWithCI:
    """Point estimate with its standard error.

    When no errors were seen the standard error is 0 and ``upper_bound``
    carries the rule-of-three 95% bound ``3/n``.
    """

    estimate: float
    std_error: float
    trials: int
    upper_bound: Optional[float] = field(default=None)

    def zscore(self, reference: float) -> float:
        """``|estimate - reference| / std_error`` (inf if the error is 0 and they differ)."""
        diff = abs(self.estimate - reference)
        if self.std_error == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / self.std_error


def _binomial(errors, n):
    p = errors / n
    ub = 3.0 / n if errors == 0 else None
    return EstimateWithCI(p, math.sqrt(p * (1.0 - p) / n), n, ub)


def estimate(tally: BitErrorTally):
    """
    Per-bit and average BEP estimates.

    Returns
    -------
    per_bit : list of EstimateWithCI
        Binomial estimates, ``se = sqrt(p (1 - p) / n)``.
    average : EstimateWithCI
        Mean of the per-bit estimates. Its standard error uses the
        per-trial variance of the bit-error count, so correlation between
        bits of the same symbol is accounted for.
    """
    n = tally.trials
    if n <= 0:
        raise ValueError("tally has no trials")
    per_bit = [_binomial(e, n) for e in tally.bit_errors]
    k = len(tally.bit_errors)
    mean = sum(tally.bit_errors) / n
    var = max(0.0, tally.sum_sq_errors / n - mean * mean)
    p_avg = math.fsum(e.estimate for e in per_bit) / k
    ub = 3.0 / (n * k) if p_avg == 0 else None
    return per_bit, EstimateWithCI(p_avg, math.sqrt(var / n) / k, n, ub)


@lru_cache(maxsize=256)
def _model_rho(model, mode):
    return branch_statistics(model, 1.0, 1.0, mode=mode).rho


def resolve_branches(config: SimConfig, grid_index: int):
    """Branch statistics at one grid point.

    The branch SNR per symbol is ``log2(M) * fraction * gamma_b``, with
    ``gamma_b`` the total mean SNR per bit. Symbol energy is common to all
    branches, so the energy split is carried by the per-branch fading power.
    """
    gamma_b = 10.0 ** (config.snr_db[grid_index] / 10.0)
    k = math.log2(config.m_ary)
    out = []
    for b in config.branches:
        rho = b.rho if b.rho is not None else _model_rho(b.doppler, config.rho_mode)
        out.append(BranchStatistics.from_rho(complex(rho), k * b.fraction * gamma_b, b.noise_psd, config.es))
    return out


def _block_generator(seed, grid_index, block):
    ss = np.random.SeedSequence(seed, spawn_key=(grid_index, block))
    return np.random.Generator(np.random.Philox(ss))


def _simulate_block(m_ary, es, stats, kinds, seed, grid_index, block, n_valid):
    rng = _block_generator(seed, grid_index, block)
    m = rng.integers(0, m_ary, BLOCK_SIZE)
    r_prev, r_cur = [], []
    for s in stats:
        c0 = s.fading_power
        # a zero-power branch still consumes its draws to keep the layout fixed
        c_prev, c_cur = sample_fading_pair(s, c0 if c0 > 0.0 else 1.0, rng, BLOCK_SIZE)
        if c0 == 0.0:
            c_prev, c_cur = 0.0 * c_prev, 0.0 * c_cur
        sd = math.sqrt(s.noise_psd / 2.0)
        noise = sd * (rng.standard_normal((2, BLOCK_SIZE)) + 1j * rng.standard_normal((2, BLOCK_SIZE)))
        r_prev.append(synthesize_received(es, 0.0, c_prev[:n_valid], noise[0, :n_valid]))
        r_cur.append(synthesize_received(es, 2.0 * np.pi * m[:n_valid] / m_ary, c_cur[:n_valid],
                                         noise[1, :n_valid]))
    m = m[:n_valid]
    bits = gray_map(m_ary).bits
    w = weights(stats)
    phases = [s.rho_phase for s in stats]
    out = {}
    for kind in kinds:
        z = combine(DecisionInput(r_cur, r_prev, w, phases), kind)
        m_hat, tie = decide_with_ties(z, m_ary)
        errs = bits[m] != bits[m_hat]
        per_trial = errs.sum(axis=1, dtype=np.int64)
        out[kind] = BitErrorTally(
            tuple(int(x) for x in errs.sum(axis=0)),
            int(np.count_nonzero(m_hat != m)),
            int(n_valid),
            int(np.sum(per_trial * per_trial)),
            int(np.count_nonzero(tie)),
        )
    return out


def _block_job(args):
    return _simulate_block(*args)


def run_point_many(config: SimConfig, grid_index: int, kinds: Sequence[ReceiverKind],
                   workers: int = 1):
    """Tallies for several receivers fed the same channel realizations.

    Because the random stream does not depend on the receiver, the kinds are
    compared on identical trials.
    """
    if not 0 <= grid_index < len(config.snr_db):
        raise IndexError("grid index out of range")
    kinds = tuple(ReceiverKind(k) for k in kinds)
    stats = resolve_branches(config, grid_index)
    n_blocks = -(-config.trials // BLOCK_SIZE)
    jobs = [(config.m_ary, config.es, stats, kinds, config.seed, grid_index, b,
             min(BLOCK_SIZE, config.trials - b * BLOCK_SIZE)) for b in range(n_blocks)]
    nbits = int(math.log2(config.m_ary))
    totals = {k: BitErrorTally.empty(nbits) for k in kinds}
    if workers > 1 and n_blocks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_block_job, jobs, chunksize=max(1, n_blocks // (4 * workers))))
    else:
        results = map(_block_job, jobs)
    for res in results:
        for k in kinds:
            totals[k] = totals[k] + res[k]
    return totals


def run_point(config: SimConfig, grid_index: int, workers: int = 1) -> BitErrorTally:
    """Simulate ``config.trials`` symbol decisions at SNR grid point ``grid_index``."""
    return run_point_many(config, grid_index, (config.receiver,), workers)[config.receiver]
