"""Differential diversity reception of MDPSK over i.n.i.d. Rayleigh fading
with asymmetric Doppler spectra: receivers, exact 8-DPSK bit error
probabilities and a Monte Carlo link simulator."""

__version__ = "0.1.0"

from .analysis import (EightDpskBep, SpectralParams, bep_average, bep_j1, bep_j2, bep_j3_closed,
                       bep_j3_exact, bep_j3_exact_oracle, bep_j3_oracle, oracle_inputs, spectral_params)
from .exceptions import (ConfigError, DegenerateSpectrumError, DomainError, NumericalError,
                         QuadratureError)
from .fading import (BranchStatistics, DopplerModel, LagCovariance, branch_statistics,
                     correlation_coefficient, covariance_matrix, sample_fading_pair, symbol_covariance)
from .modem import GrayMap, gray_decode, gray_encode, gray_map, synthesize_received
from .montecarlo import (BitErrorTally, BranchSpec, EstimateWithCI, SimConfig, estimate,
                         resolve_branches, run_point, run_point_many)
from .receivers import DecisionInput, ReceiverKind, combine, decide, weights
