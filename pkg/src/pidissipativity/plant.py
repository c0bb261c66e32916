"""Disturbed nonlinear MIMO plants ``e' = f(e, u) + Gamma w`` in error coordinates.

The concrete plant shipped here is the fixed-wing UAV path-following
guidance model (flight-path and course angle kinematics) with sinusoidal
wind-like disturbances.
"""

from dataclasses import dataclass, asdict
from typing import Callable, Optional

import numpy as np

__all__ = ["PlantModel", "PlantEvaluationError", "UavParams", "uav_model",
           "disturbance", "check_jacobians", "linear_plant", "PLANTS",
           "make_plant"]


class PlantEvaluationError(ValueError):
    """The plant (or its Jacobians) cannot be evaluated at the given point."""


@dataclass(frozen=True)
class PlantModel:
    """Plant description with evaluable Jacobians.

    `trim(e)` returns the input holding the plant stationary at `e`
    (``f(e, trim(e)) = 0``) or is None when no closed form exists.
    `linearize_at(e)` selects the input at which the Jacobians defining
    the augmented closed-loop matrix are evaluated; it defaults to `trim`.
    """
    n: int
    m: int
    l: int
    f: Callable
    jac_e: Callable
    jac_u: Callable
    Gamma: np.ndarray
    trim: Optional[Callable] = None
    linearize_at: Optional[Callable] = None
    name: str = "custom"

    def __post_init__(self):
        G = np.asarray(self.Gamma, dtype=float)
        if G.shape != (self.n, self.l):
            raise ValueError(f"Gamma must be {self.n}x{self.l}, got {G.shape}")
        object.__setattr__(self, "Gamma", G)

    def input_offset(self):
        """Constant input added to the PI output (trim at the origin)."""
        if self.trim is None:
            return np.zeros(self.m)
        return np.asarray(self.trim(np.zeros(self.n)), dtype=float)

    def linearization_input(self, e):
        if self.linearize_at is not None:
            return np.asarray(self.linearize_at(e), dtype=float)
        if self.trim is not None:
            return np.asarray(self.trim(e), dtype=float)
        return np.zeros(self.m)

    def jacobians(self, e, u=None):
        e = np.asarray(e, dtype=float)
        u = self.linearization_input(e) if u is None else np.asarray(u, dtype=float)
        Je = np.asarray(self.jac_e(e, u), dtype=float)
        Ju = np.asarray(self.jac_u(e, u), dtype=float)
        if Je.shape != (self.n, self.n) or Ju.shape != (self.n, self.m):
            raise PlantEvaluationError(
                f"Jacobian shapes {Je.shape}, {Ju.shape} do not match n={self.n}, m={self.m}")
        if not (np.all(np.isfinite(Je)) and np.all(np.isfinite(Ju))):
            raise PlantEvaluationError(f"non-finite Jacobian at e={e}, u={u}")
        return Je, Ju


@dataclass(frozen=True)
class UavParams:
    V: float = 25.0
    g: float = 9.81
    gamma_c: float = np.pi / 12
    chi_c: float = 0.0
    L_d_chi: float = 0.1
    L_d_gamma: float = 0.1
    omega_chi: float = 0.15
    omega_gamma: float = 0.15
    phi_c: float = 0.0
    nz_c: float = 0.0
    gamma0: float = np.pi / 4
    chi0: float = np.pi / 3
    phi0: float = np.pi / 3
    nz0: float = 1.0
    phi_range: tuple = (-np.pi / 4, np.pi / 4)
    phi_rate: tuple = (-np.pi / 6, np.pi / 6)
    nz_range: tuple = (-2.1, 2.1)
    nz_rate: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if not self.V > 0:
            raise ValueError("V must be positive")
        if not self.g > 0:
            raise ValueError("g must be positive")

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown UAV parameters: {sorted(unknown)}")
        d = {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}
        return cls(**d)

    def to_dict(self):
        return asdict(self)

    def initial_error(self):
        """Tracking error e(0) = x_c - x(0) as (e_chi, e_gamma)."""
        return np.array([self.chi_c - self.chi0, self.gamma_c - self.gamma0])

    def initial_input(self):
        return np.array([self.phi0, self.nz0])


def _check_roll(phi):
    if not abs(phi) < np.pi / 2:
        raise PlantEvaluationError(f"roll angle {phi:.6g} outside (-pi/2, pi/2)")


def uav_model(params=None, linearize_at="trim"):
    """UAV guidance error model with state (e_chi, e_gamma) and input (phi, n_z).

    Parameters
    ----------
    params : UavParams, optional
    linearize_at : {"trim", "reference"}
        Input used when evaluating the Jacobians on an error grid: the
        equilibrium input ``(0, cos(gamma_c - e_gamma))`` or the constant
        reference command ``(phi_c, nz_c)``.
    """
    p = UavParams() if params is None else params
    k = p.g / p.V

    def f(e, u):
        phi, nz = u
        _check_roll(phi)
        return np.array([-k * np.tan(phi),
                         -k * (nz * np.cos(phi) - np.cos(p.gamma_c - e[1]))])

    def jac_e(e, u):
        return np.array([[0.0, 0.0],
                         [0.0, k * np.sin(p.gamma_c - e[1])]])

    def jac_u(e, u):
        phi, nz = u
        _check_roll(phi)
        return np.array([[-k / np.cos(phi) ** 2, 0.0],
                         [k * nz * np.sin(phi), -k * np.cos(phi)]])

    def trim(e):
        return np.array([0.0, np.cos(p.gamma_c - e[1])])

    if linearize_at == "trim":
        lin = trim
    elif linearize_at == "reference":
        ref = np.array([p.phi_c, p.nz_c])

        def lin(e):
            return ref
    else:
        raise ValueError(f"linearize_at must be 'trim' or 'reference', got {linearize_at!r}")

    return PlantModel(n=2, m=2, l=2, f=f, jac_e=jac_e, jac_u=jac_u,
                      Gamma=-np.eye(2), trim=trim, linearize_at=lin, name="uav")


def linear_plant(A, B, Gamma=None):
    """Plant ``e' = A e + B u + Gamma w`` with exact Jacobians."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n, m = B.shape
    Gamma = np.eye(n) if Gamma is None else np.asarray(Gamma, dtype=float)
    return PlantModel(n=n, m=m, l=Gamma.shape[1],
                      f=lambda e, u: A @ e + B @ u,
                      jac_e=lambda e, u: A, jac_u=lambda e, u: B,
                      Gamma=Gamma, trim=lambda e: np.zeros(m), name="linear")


def disturbance(params, t, variant="sinusoid"):
    """Disturbance pair ``d(t)`` and its time derivative.

    ``d = (L_chi sin(w_chi t), L_gamma cos(w_gamma t))``. The "decaying"
    variant multiplies by ``exp(-t)`` so the disturbance has finite energy;
    "none" returns zeros.
    """
    if variant == "none":
        return np.zeros(2), np.zeros(2)
    p = params
    d = np.array([p.L_d_chi * np.sin(p.omega_chi * t),
                  p.L_d_gamma * np.cos(p.omega_gamma * t)])
    d_dot = np.array([p.L_d_chi * p.omega_chi * np.cos(p.omega_chi * t),
                      -p.L_d_gamma * p.omega_gamma * np.sin(p.omega_gamma * t)])
    if variant == "sinusoid":
        return d, d_dot
    if variant == "decaying":
        decay = np.exp(-t)
        return d * decay, (d_dot - d) * decay
    raise ValueError(f"unknown disturbance variant {variant!r}")


def check_jacobians(model, e, u, h=1e-5):
    """Max absolute gap between central differences of `f` and the Jacobians."""
    if not h > 0:
        raise ValueError("finite-difference step h must be positive")
    e = np.asarray(e, dtype=float)
    u = np.asarray(u, dtype=float)
    Je, Ju = model.jacobians(e, u)
    fd_e = np.empty_like(Je)
    for j in range(model.n):
        step = np.zeros(model.n)
        step[j] = h
        fd_e[:, j] = (model.f(e + step, u) - model.f(e - step, u)) / (2 * h)
    fd_u = np.empty_like(Ju)
    for j in range(model.m):
        step = np.zeros(model.m)
        step[j] = h
        fd_u[:, j] = (model.f(e, u + step) - model.f(e, u - step)) / (2 * h)
    return float(max(np.abs(fd_e - Je).max(initial=0.0),
                     np.abs(fd_u - Ju).max(initial=0.0)))


PLANTS = {"uav": (UavParams, uav_model)}


def make_plant(name, params=None, linearize_at="trim"):
    """Build a registered plant from its name and a parameter mapping."""
    try:
        param_cls, factory = PLANTS[name]
    except KeyError:
        raise ValueError(f"unknown plant {name!r}; known: {sorted(PLANTS)}") from None
    p = param_cls.from_dict(params or {})
    return factory(p, linearize_at=linearize_at), p
