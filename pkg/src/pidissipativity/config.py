"""Run configuration: a single JSON document merged over the benchmark defaults."""

import copy
import functools

import numpy as np

from .benchmark import K_STAR, SWEEP_EPSILONS
from .dissipativity import HEATMAP_REGION, BENCHMARK_REGIONS, Region
from .plant import disturbance, make_plant
from .sim import Limits, PiGains
from .tuner import SweepSpec

__all__ = ["ConfigError", "DEFAULT_CONFIG", "merge", "RunConfig"]


class ConfigError(ValueError):
    pass


DEFAULT_CONFIG = {
    "plant": {"name": "uav", "params": {}, "linearize_at": "trim"},
    "gains": K_STAR.to_dict(),
    "regions": {name: r.to_dict() for name, r in BENCHMARK_REGIONS.items()},
    "grid_steps": [0.05, 0.01],
    "heatmap_region": HEATMAP_REGION.to_dict(),
    "report_region": "Omega4",
    "sweep": {"mode": "epsilon-family", "epsilons": list(SWEEP_EPSILONS),
              "grid": [], "objective": "Omega4"},
    "simulation": {"t_span": [0.0, 20.0], "dt": 1e-3, "e0": "initial",
                   "u0": "initial", "disturbance": "sinusoid",
                   "limits": None, "anti_windup": "conditional", "audit": None},
    "verify": {"trajectory": None, "report": None, "gamma_override": None,
               "eps_K": 2.0},
    "workers": None,
}


def merge(base, override):
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _gains(d, n, m):
    try:
        g = PiGains(d["K_P"], d["K_I"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid gains: {exc}") from exc
    if g.shape != (m, n):
        raise ConfigError(f"gains must be {m}x{n}, got {g.shape}")
    return g


def _region(d, n, steps):
    try:
        if "half_widths" in d:
            r = Region.symmetric(d["half_widths"], d.get("step", steps))
        else:
            r = Region(d["lo"], d["hi"], d.get("step", steps))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid region {d}: {exc}") from exc
    if r.dim != n:
        raise ConfigError(f"region dimension {r.dim} does not match plant dimension {n}")
    return r


class RunConfig:
    """Validated view of a configuration document."""

    def __init__(self, doc=None):
        self.doc = merge(DEFAULT_CONFIG, doc or {})
        d = self.doc
        pl = d["plant"]
        try:
            self.model, self.params = make_plant(pl["name"], pl.get("params"),
                                                 pl.get("linearize_at", "trim"))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid plant block: {exc}") from exc
        n, m = self.model.n, self.model.m
        self.gains = _gains(d["gains"], n, m)
        steps = d["grid_steps"]
        if not isinstance(d["regions"], dict) or not d["regions"]:
            raise ConfigError("regions must be a non-empty mapping of name -> box")
        self.regions = {name: _region(r, n, steps) for name, r in d["regions"].items()}
        self.heatmap_region = _region(d["heatmap_region"], n, steps)
        self.workers = d.get("workers")

    def region(self, name):
        try:
            return self.regions[name]
        except KeyError:
            raise ConfigError(f"unknown region {name!r}; have {sorted(self.regions)}") from None

    def sweep(self):
        sw = self.doc["sweep"]
        names = list(self.regions)
        obj = sw.get("objective", names[0])
        if obj not in self.regions:
            raise ConfigError(f"sweep objective {obj!r} is not a configured region")
        grid = {}
        for entry in sw.get("grid") or []:
            try:
                grid[(entry["block"], int(entry["i"]), int(entry["j"]))] = list(entry["values"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"invalid grid entry {entry}: {exc}") from exc
        try:
            return SweepSpec(base_gains=self.gains,
                             regions=[self.regions[k] for k in names],
                             mode=sw.get("mode", "epsilon-family"),
                             epsilons=tuple(sw.get("epsilons") or ()),
                             grid_ranges=grid,
                             width_region=self.heatmap_region,
                             objective=names.index(obj)), names
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def simulation(self):
        """Keyword arguments for `simulate`."""
        s = self.doc["simulation"]
        p, n, m = self.params, self.model.n, self.model.m
        e0 = s.get("e0")
        e0 = p.initial_error() if e0 == "initial" else (None if e0 is None else np.asarray(e0, float))
        u0 = s.get("u0")
        u0 = p.initial_input() if u0 == "initial" else (None if u0 is None else np.asarray(u0, float))
        for name, v, k in (("e0", e0, n), ("u0", u0, m)):
            if v is not None and v.shape != (k,):
                raise ConfigError(f"simulation.{name} must have length {k}")
        try:
            limits = Limits.from_uav(p) if s.get("limits") is None else Limits(**s["limits"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid limits: {exc}") from exc
        variant = s.get("disturbance", "sinusoid")
        if variant not in ("sinusoid", "decaying", "none"):
            raise ConfigError(f"unknown disturbance variant {variant!r}")
        dt = float(s.get("dt", 1e-3))
        t_span = tuple(float(x) for x in s.get("t_span", (0.0, 20.0)))
        if not dt > 0 or len(t_span) != 2 or not t_span[1] > t_span[0]:
            raise ConfigError("simulation needs dt > 0 and an increasing t_span")
        if s.get("anti_windup", "conditional") not in ("conditional", "none"):
            raise ConfigError("anti_windup must be 'conditional' or 'none'")
        return dict(model=self.model, gains=self.gains, limits=limits,
                    t_span=t_span, dt=dt, e0=e0, u0=u0,
                    disturbance=functools.partial(disturbance, p, variant=variant),
                    anti_windup=s.get("anti_windup", "conditional"))
