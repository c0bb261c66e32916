"""Constants of the fixed-wing UAV guidance benchmark."""

import numpy as np

from .dissipativity import HEATMAP_REGION, BENCHMARK_REGIONS
from .sim import PiGains

__all__ = ["K_STAR", "SWEEP_EPSILONS", "REPORTED_W", "REPORTED_GAMMA",
           "HEATMAP_REGION", "BENCHMARK_REGIONS", "sweep_gains"]

K_STAR = PiGains(K_P=[[1.6968, 0.5906], [-0.5906, 1.9556]],
                 K_I=[[3.4869, 0.1784], [-0.1784, 3.4869]])

SWEEP_EPSILONS = (-4.0, -2.0, -1.0, 0.5, 0.8, 1.0)

# reference zero-line widths and region gains for K1..K6 (regions Omega1..Omega4)
REPORTED_W = (0.8, 0.96, 0.98, 0.87, 0.69, 0.54)
REPORTED_GAMMA = (
    (11.16, 5.97, 4.23, 3.06),
    (8.46, 5.72, 4.42, 3.41),
    (9.65, 6.52, 5.03, 3.89),
    (15.98, 9.31, 6.82, 5.07),
    (75.92, 16.92, 10.05, 6.68),
    (30.80, 61.61, 17.03, 9.04),
)


def sweep_gains():
    """K(eps) = K* - eps [I, I] for the six reference perturbations."""
    return [K_STAR.shifted(eps) for eps in SWEEP_EPSILONS]
