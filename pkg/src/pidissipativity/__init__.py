"""gamma-dissipativity quantification and tuning of MIMO-PI controllers."""

from .linalg import (NotHurwitzError, estimate_M, is_negative_semidefinite,
                     matrix_exponential, solve_lyapunov, spectral_abscissa,
                     spectral_norm, spectrum)
from .plant import (PlantEvaluationError, PlantModel, UavParams,
                    check_jacobians, disturbance, linear_plant, make_plant,
                    uav_model)
from .sim import (Limits, Metrics, PiGains, Trajectory, dissipation_audit,
                  empirical_l2_ratio, metrics, simulate)
from .dissipativity import (DissipativityReport, Region, assemble,
                            common_P_audit, construct_common_P,
                            gamma_star_closed_form, gamma_star_lmi, heatmap,
                            pointwise_index, region_index, report,
                            zero_line_width)
from .tuner import SweepSpec, evaluate, generate_candidates, select_best, tune
from .benchmark import K_STAR, BENCHMARK_REGIONS, HEATMAP_REGION, SWEEP_EPSILONS

__version__ = "0.1.0"

__all__ = [
    "NotHurwitzError", "estimate_M", "is_negative_semidefinite", "matrix_exponential",
    "solve_lyapunov", "spectral_abscissa", "spectral_norm", "spectrum",
    "PlantEvaluationError", "PlantModel", "UavParams", "check_jacobians", "disturbance",
    "linear_plant", "make_plant", "uav_model",
    "Limits", "Metrics", "PiGains", "Trajectory", "dissipation_audit",
    "empirical_l2_ratio", "metrics", "simulate",
    "DissipativityReport", "Region", "assemble", "common_P_audit", "construct_common_P",
    "gamma_star_closed_form", "gamma_star_lmi", "heatmap", "pointwise_index",
    "region_index", "report", "zero_line_width",
    "SweepSpec", "evaluate", "generate_candidates", "select_best", "tune",
    "K_STAR", "BENCHMARK_REGIONS", "HEATMAP_REGION", "SWEEP_EPSILONS",
]
