"""Closed-loop simulation under a saturated, rate-limited MIMO-PI controller.

The controller is ``u = u_offset + K_P e + K_I int(e)``; the command is
rate-limited against the input applied at the start of the step and then
clamped to its magnitude range. The control law is re-evaluated at every
stage of the classical fourth-order Runge-Kutta step, so the applied input
is continuous in time.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from .plant import PlantEvaluationError

__all__ = ["PiGains", "Limits", "Trajectory", "Metrics", "simulate",
           "metrics", "empirical_l2_ratio", "dissipation_audit",
           "augmented_state"]


@dataclass(frozen=True)
class PiGains:
    """Proportional and integral gain matrices, each m x n."""
    K_P: np.ndarray
    K_I: np.ndarray

    def __post_init__(self):
        KP = np.array(self.K_P, dtype=float, ndmin=2)
        KI = np.array(self.K_I, dtype=float, ndmin=2)
        if KP.shape != KI.shape:
            raise ValueError(f"K_P {KP.shape} and K_I {KI.shape} differ in shape")
        if not (np.all(np.isfinite(KP)) and np.all(np.isfinite(KI))):
            raise ValueError("gain matrices must be finite")
        KP.setflags(write=False)
        KI.setflags(write=False)
        object.__setattr__(self, "K_P", KP)
        object.__setattr__(self, "K_I", KI)

    @property
    def K(self):
        """Stacked ``[K_P, K_I]`` of shape (m, 2n)."""
        return np.hstack([self.K_P, self.K_I])

    @property
    def shape(self):
        return self.K_P.shape

    @classmethod
    def from_stacked(cls, K):
        K = np.asarray(K, dtype=float)
        if K.ndim != 2 or K.shape[1] % 2:
            raise ValueError("stacked gain must be m x 2n")
        n = K.shape[1] // 2
        return cls(K[:, :n], K[:, n:])

    def shifted(self, eps):
        """``[K_P, K_I] - eps [I, I]`` (identity blocks of shape m x n)."""
        eye = np.eye(*self.shape)
        return PiGains(self.K_P - eps * eye, self.K_I - eps * eye)

    def scaled(self, c):
        return PiGains(c * self.K_P, c * self.K_I)

    def to_dict(self):
        return {"K_P": self.K_P.tolist(), "K_I": self.K_I.tolist()}


@dataclass(frozen=True)
class Limits:
    u_min: np.ndarray
    u_max: np.ndarray
    du_min: np.ndarray
    du_max: np.ndarray

    def __post_init__(self):
        vals = [np.array(getattr(self, k), dtype=float, ndmin=1)
                for k in ("u_min", "u_max", "du_min", "du_max")]
        if len({v.shape for v in vals}) != 1:
            raise ValueError("limit vectors must share one shape")
        u_min, u_max, du_min, du_max = vals
        if np.any(u_min >= u_max) or np.any(du_min >= du_max):
            raise ValueError("limits require u_min < u_max and du_min < du_max")
        if np.any(du_min > 0) or np.any(du_max < 0):
            raise ValueError("rate limits must bracket zero")
        for k, v in zip(("u_min", "u_max", "du_min", "du_max"), vals):
            object.__setattr__(self, k, v)

    @classmethod
    def unbounded(cls, m):
        return cls(np.full(m, -np.inf), np.full(m, np.inf),
                   np.full(m, -np.inf), np.full(m, np.inf))

    @classmethod
    def from_uav(cls, p):
        return cls(u_min=[p.phi_range[0], p.nz_range[0]],
                   u_max=[p.phi_range[1], p.nz_range[1]],
                   du_min=[p.phi_rate[0], p.nz_rate[0]],
                   du_max=[p.phi_rate[1], p.nz_rate[1]])

    def to_dict(self):
        return {k: getattr(self, k).tolist() for k in ("u_min", "u_max", "du_min", "du_max")}


@dataclass
class Trajectory:
    """Uniformly sampled closed-loop log.

    ``e_dot[i] = f(e[i], u[i]) + Gamma d[i]`` holds at every sample; `u` is
    the absolute input applied to the plant over ``[t_i, t_{i+1})``.
    """
    times: np.ndarray
    e: np.ndarray
    e_dot: np.ndarray
    u: np.ndarray
    d: np.ndarray
    d_dot: np.ndarray
    diverged: bool = False
    reason: str = ""

    def __len__(self):
        return len(self.times)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0


@dataclass
class Metrics:
    itae: float
    std_e: np.ndarray
    std_e_dot: np.ndarray
    l2_ratio: Optional[float]
    final_error_norm: float
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"itae": self.itae, "std_e": list(map(float, self.std_e)),
               "std_e_dot": list(map(float, self.std_e_dot)),
               "l2_ratio": self.l2_ratio,
               "final_error_norm": self.final_error_norm}
        out.update(self.extra)
        return out


def _rate_bounds(limits, tau):
    """Admissible input change over elapsed time `tau` (unbounded rates stay infinite)."""
    lo = np.where(np.isinf(limits.du_min), limits.du_min, tau * limits.du_min)
    hi = np.where(np.isinf(limits.du_max), limits.du_max, tau * limits.du_max)
    return lo, hi


def _apply_limits(raw, u_prev, limits, bounds):
    """Rate-limit `raw` against `u_prev` within `bounds`, then clamp the magnitude."""
    return np.clip(u_prev + np.clip(raw - u_prev, *bounds), limits.u_min, limits.u_max)


def simulate(model, gains, limits=None, t_span=(0.0, 20.0), dt=1e-3, e0=None,
             disturbance=None, u0=None, anti_windup="conditional"):
    """Integrate the PI-controlled plant and log every step.

    Parameters
    ----------
    model : PlantModel
    gains : PiGains
    limits : Limits, optional
        Magnitude and rate limits on the absolute applied input.
        Unbounded when omitted.
    t_span : (float, float)
    dt : float
        Fixed step; the log has ``round((t1 - t0) / dt) + 1`` samples.
    e0 : array_like, optional
        Initial error, zero by default.
    disturbance : callable, optional
        ``t -> (d, d_dot)``; zero when omitted.
    u0 : array_like, optional
        Input applied before t0 (the rate limiter's starting point). It is
        clamped into the magnitude range; defaults to the trim offset.
    anti_windup : {"conditional", "none"}
        With "conditional" the integrator is frozen while an input channel
        is magnitude-saturated and the integral action pushes it further.

    Returns
    -------
    Trajectory
        Truncated and flagged ``diverged`` if the state becomes non-finite
        or the plant refuses evaluation.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    if anti_windup not in ("conditional", "none"):
        raise ValueError(f"unknown anti_windup mode {anti_windup!r}")
    n, m = model.n, model.m
    if gains.shape != (m, n):
        raise ValueError(f"gains must be {m}x{n}, got {gains.shape}")
    limits = Limits.unbounded(m) if limits is None else limits
    if limits.u_min.shape != (m,):
        raise ValueError(f"limits must have length {m}")
    if disturbance is None:
        def disturbance(t):
            return np.zeros(model.l), np.zeros(model.l)

    e = np.zeros(n) if e0 is None else np.array(e0, dtype=float)
    if e.shape != (n,) or not np.all(np.isfinite(e)):
        raise ValueError(f"e0 must be a finite vector of length {n}")
    offset = model.input_offset()
    u_prev = offset.copy() if u0 is None else np.array(u0, dtype=float)
    u_prev = np.clip(u_prev, limits.u_min, limits.u_max)
    z = np.zeros(n)
    KP, KI, Gam = gains.K_P, gains.K_I, model.Gamma

    steps = int(round((t1 - t0) / dt))
    times = t0 + dt * np.arange(steps + 1)
    E = np.empty((steps + 1, n))
    ED = np.empty((steps + 1, n))
    U = np.empty((steps + 1, m))
    D = np.empty((steps + 1, model.l))
    DD = np.empty((steps + 1, model.l))
    diverged, reason, last = False, "", steps

    bounds = {tau: _rate_bounds(limits, tau) for tau in (0.0, dt / 2, dt)}

    def stage(tau, e_, z_):
        """Applied input, e' and z' at time t_k + tau."""
        raw = offset + KP @ e_ + KI @ z_
        u = _apply_limits(raw, u_prev, limits, bounds[tau])
        d, d_dot = disturbance(times[k] + tau)
        z_dot = e_
        if anti_windup == "conditional":
            push = KI @ e_
            wind = ((raw > limits.u_max) & (push > 0)) | ((raw < limits.u_min) & (push < 0))
            if np.any(wind):
                z_dot = np.zeros(n)
        return u, model.f(e_, u) + Gam @ d, z_dot, d, d_dot

    for k in range(steps + 1):
        try:
            u, edot, k1z, d, d_dot = stage(0.0, e, z)
        except PlantEvaluationError as exc:
            diverged, reason, last = True, str(exc), k - 1
            break
        E[k], ED[k], U[k], D[k], DD[k] = e, edot, u, d, d_dot
        if k == steps:
            break
        h = dt / 2
        try:
            _, k2e, k2z, _, _ = stage(h, e + h * edot, z + h * k1z)
            _, k3e, k3z, _, _ = stage(h, e + h * k2e, z + h * k2z)
            _, k4e, k4z, _, _ = stage(dt, e + dt * k3e, z + dt * k3z)
        except PlantEvaluationError as exc:
            diverged, reason, last = True, str(exc), k
            break
        e_new = e + dt / 6 * (edot + 2 * k2e + 2 * k3e + k4e)
        z_new = z + dt / 6 * (k1z + 2 * k2z + 2 * k3z + k4z)
        if not (np.all(np.isfinite(e_new)) and np.all(np.isfinite(z_new))):
            diverged, reason, last = True, "non-finite state", k
            break
        # the input at the end of the step, from the updated state
        u_prev = _apply_limits(offset + KP @ e_new + KI @ z_new, u_prev, limits, bounds[dt])
        if not np.all(np.isfinite(u_prev)):
            diverged, reason, last = True, "non-finite state", k
            break
        e, z = e_new, z_new

    sl = slice(0, last + 1)
    return Trajectory(times=times[sl], e=E[sl], e_dot=ED[sl], u=U[sl],
                      d=D[sl], d_dot=DD[sl], diverged=diverged, reason=reason)


def augmented_state(traj):
    """Stacked ``s = [e_dot, e]`` per sample."""
    return np.hstack([traj.e_dot, traj.e])


def empirical_l2_ratio(traj, atol=1e-12):
    """``sqrt(int ||s||^2 / int ||d_dot||^2)`` for a zero-initial-state run.

    Returns None when the run does not start at e = 0 or the disturbance
    derivative carries no energy.
    """
    if len(traj) < 2 or np.any(np.abs(traj.e[0]) > atol):
        return None
    s = augmented_state(traj)
    den = trapezoid(np.sum(traj.d_dot ** 2, axis=1), traj.times)
    if not den > 0:
        return None
    num = trapezoid(np.sum(s ** 2, axis=1), traj.times)
    return float(np.sqrt(num / den))


def metrics(traj, T=None):
    """ITAE, per-component standard deviations, L2 ratio and final error.

    ITAE is ``(1/T) int_0^T ||e(t)|| dt`` by the trapezoidal rule.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    times = traj.times
    if T is not None:
        if T > times[-1] - times[0] + 1e-9 * max(1.0, abs(T)):
            raise ValueError("trajectory does not cover the requested horizon")
        keep = times <= times[0] + T + 1e-12
        times = times[keep]
        e, e_dot = traj.e[keep], traj.e_dot[keep]
    else:
        e, e_dot = traj.e, traj.e_dot
    span = times[-1] - times[0]
    norms = np.linalg.norm(e, axis=1)
    itae = float(trapezoid(norms, times) / span) if span > 0 else float(norms[0])
    ddof = 1 if len(e) > 1 else 0
    return Metrics(itae=itae,
                   std_e=np.std(e, axis=0, ddof=ddof),
                   std_e_dot=np.std(e_dot, axis=0, ddof=ddof),
                   l2_ratio=empirical_l2_ratio(traj),
                   final_error_norm=float(norms[-1]))


def dissipation_audit(traj, P, gamma, rtol=None):
    """Fraction of samples violating ``V' <= (gamma^2 ||w'||^2 - ||s||^2) / 2``.

    ``V(s) = s^T P s / 2`` on the augmented state and ``V'`` is the forward
    difference of the logged ``V``; samples 1..N-2 are checked. A sample
    violates when the excess exceeds ``rtol`` times the local magnitude
    ``|V'| + (gamma^2 ||w'||^2 + ||s||^2) / 2``; `rtol` defaults to
    ``1e-6 + 10 dt``.
    """
    if len(traj) < 3:
        raise ValueError("dissipation audit needs at least 3 samples")
    P = np.asarray(P, dtype=float)
    s = augmented_state(traj)
    if P.shape != (s.shape[1], s.shape[1]):
        raise ValueError(f"P must be {s.shape[1]}x{s.shape[1]}, got {P.shape}")
    dt = traj.dt
    rtol = 1e-6 + 10 * dt if rtol is None else rtol
    V = 0.5 * np.einsum("ij,jk,ik->i", s, P, s)
    Vdot = (V[2:] - V[1:-1]) / dt
    supply = gamma ** 2 * np.sum(traj.d_dot[1:-1] ** 2, axis=1)
    energy = np.sum(s[1:-1] ** 2, axis=1)
    excess = Vdot - 0.5 * (supply - energy)
    scale = np.abs(Vdot) + 0.5 * (supply + energy)
    return float(np.mean(excess > rtol * scale))
