"""Gain sweeps and selection of the PI gain with the smallest certified L2 gain."""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .dissipativity import HEATMAP_REGION, report, zero_line_width
from .sim import PiGains

__all__ = ["SweepSpec", "CandidateResult", "TuneResult",
           "generate_candidates", "evaluate", "select_best", "tune"]


@dataclass
class SweepSpec:
    """Candidate family plus the regions each candidate is scored on.

    mode "epsilon-family" shifts `base_gains` by ``-eps [I, I]`` for each
    eps; mode "grid" takes the Cartesian product of `grid_ranges`, a
    mapping ``(block, i, j) -> sequence of values`` with block "P" or "I",
    entries not listed keeping their base value.
    """
    base_gains: PiGains
    regions: list
    mode: str = "epsilon-family"
    epsilons: tuple = ()
    grid_ranges: dict = field(default_factory=dict)
    width_region: object = HEATMAP_REGION
    objective: int = 0

    def __post_init__(self):
        if self.mode not in ("epsilon-family", "grid"):
            raise ValueError(f"unknown sweep mode {self.mode!r}")
        if not self.regions:
            raise ValueError("at least one region is required")
        if not 0 <= self.objective < len(self.regions):
            raise ValueError("objective must index into regions")


@dataclass
class CandidateResult:
    gains: PiGains
    reports: list
    W: float

    def to_dict(self):
        return {"K_P": self.gains.K_P.tolist(), "K_I": self.gains.K_I.tolist(),
                "W": self.W,
                "regions": [{k: r.to_dict()[k] for k in ("L", "S", "gamma_star", "feasible")}
                            for r in self.reports]}


@dataclass
class TuneResult:
    candidates: list
    best: Optional[int]
    objective: int

    def to_dict(self):
        return {"candidates": [c.to_dict() for c in self.candidates],
                "best": self.best, "objective_region": self.objective}


def generate_candidates(spec):
    if spec.mode == "epsilon-family":
        cands = [spec.base_gains.shifted(eps) for eps in spec.epsilons]
    else:
        keys = list(spec.grid_ranges)
        cands = []
        for combo in itertools.product(*(spec.grid_ranges[k] for k in keys)):
            KP = spec.base_gains.K_P.copy()
            KI = spec.base_gains.K_I.copy()
            for (block, i, j), v in zip(keys, combo):
                if block == "P":
                    KP[i, j] = v
                elif block == "I":
                    KI[i, j] = v
                else:
                    raise ValueError(f"grid key block must be 'P' or 'I', got {block!r}")
            cands.append(PiGains(KP, KI))
    if not cands:
        raise ValueError("sweep produced no candidates")
    return cands


def evaluate(model, gains, regions, width_region=HEATMAP_REGION):
    """One report per region plus the zero-line width; never raises on infeasibility."""
    W = zero_line_width(model, gains, width_region) if width_region is not None else None
    return CandidateResult(gains=gains,
                           reports=[report(model, gains, r) for r in regions],
                           W=W)


def select_best(results, objective=0):
    """Index of the feasible candidate with the smallest gamma on `objective`.

    Ties go to the larger zero-line width, then to the earlier candidate.
    Returns None when no candidate is feasible.
    """
    if not results:
        raise ValueError("no candidates to select from")
    best, best_key = None, None
    for i, res in enumerate(results):
        rep = res.reports[objective]
        if not (rep.feasible and rep.L < 0 and rep.gamma_star is not None):
            continue
        key = (rep.gamma_star, -(res.W if res.W is not None else 0.0))
        if best_key is None or key < best_key:
            best, best_key = i, key
    return best


def tune(model, spec, workers=None):
    """Evaluate every candidate of `spec` and pick the best one."""
    cands = generate_candidates(spec)

    def run(g):
        return evaluate(model, g, spec.regions, spec.width_region)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, cands))
    else:
        results = [run(g) for g in cands]
    return TuneResult(candidates=results, best=select_best(results, spec.objective),
                      objective=spec.objective)
