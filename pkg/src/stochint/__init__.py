"""Approximation of iterated Ito and Stratonovich stochastic integrals
(multiplicities 1..5) by multiple Fourier-Legendre and trigonometric series."""

from .basis import (LEGENDRE, TRIGONOMETRIC, BasisDomainError, BasisSystem, Interval,
                    legendre, trigonometric)
from .bridge import (GapResult, PairingSet, contract_positions, contraction_check,
                     correction_terms, enumerate_pairings, truncation_gap)
from .coefficients import (BudgetError, CoefficientTensor, KernelSpec, TensorFormatError,
                           build_tensor, coefficient, export_csv, load_tensor, save_tensor)
from .error_analysis import (ErrorReport, bound_qq4, e11_log_bound, e11_rate_bound,
                             error_report, exact_e11, kernel_norm, parseval_residual)
from .gaussians import GaussianMatrix, NoiseIndexVector, draw, zeta_from_path
from .ito_expansion import ItoTruncation, eval_ito, mean_exact, second_moment_exact
from .mc_oracle import (MsErrorEstimate, PathGrid, TruncationSpec, measure_ms_error,
                        reference_ito, reference_strat, simulate_path)
from .strat_expansion import (StratTruncation, UncoveredExpansionWarning, eval_strat,
                              validity_conditions)

__version__ = "0.1.0"
