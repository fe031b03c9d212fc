"""Poisson threshold network GARCH toolkit.

Simulation, maximum-likelihood estimation and Wald inference for
integer-valued panels observed on a network, where each node's conditional
Poisson intensity follows a threshold-switching GARCH(1,1) recursion with a
network spillover term.
"""

from .dgp import (IntensityExplosionError, StationarityReport,
                  ThresholdParams, check_stationarity, poisson_sample,
                  simulate)
from .estimate import (FitOptions, FitResult, ProfilePoint,
                       SingularInformationError, confidence_intervals, fit,
                       fisher_info, fit_theta_given_r)
from .inference import (WaldResult, WaldSpec, chi2_sf, garch_test,
                        network_test, threshold_test, wald_test)
from .likelihood import (IntensitySurface, Panel, filter_intensities,
                         hessian, lambda_closed_form, log_likelihood, score)
from .montecarlo import (ExperimentConfig, ExperimentReport, LadderRow,
                         QQData, qq_data, run_experiment)
from .network import (Network, gen_block, gen_d_neighbourhood,
                      gen_power_law, gen_random, generate, load_edge_list,
                      row_normalize, save_edge_list)
from .rng import Rng, derive_seed

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig", "ExperimentReport", "FitOptions", "FitResult",
    "IntensityExplosionError", "IntensitySurface", "LadderRow", "Network",
    "Panel", "ProfilePoint", "QQData", "Rng", "SingularInformationError",
    "StationarityReport", "ThresholdParams", "WaldResult", "WaldSpec",
    "check_stationarity", "chi2_sf", "confidence_intervals", "derive_seed",
    "filter_intensities", "fisher_info", "fit", "fit_theta_given_r",
    "garch_test", "gen_block", "gen_d_neighbourhood", "gen_power_law",
    "gen_random", "generate", "hessian", "lambda_closed_form",
    "load_edge_list", "log_likelihood", "network_test", "poisson_sample",
    "qq_data", "row_normalize", "run_experiment", "save_edge_list", "score",
    "simulate", "threshold_test", "wald_test",
]
