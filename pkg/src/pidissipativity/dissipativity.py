"""gamma-dissipativity indices and L2-gain bounds for PI-controlled plants.

Under ``u = K_P e + K_I int(e)`` the stacked state ``s = [e_dot, e]``
obeys ``s' = A_K(e) s + G w'`` with

    A_K(e) = D1(e) + D2(e) [K_P, K_I],
    D1 = [[df/de, 0], [I, 0]],  D2 = [[df/du], [0]],  G = [[Gamma], [0]].

Over a box region containing the origin, with ``M0`` the transient constant
of ``A_K(0)``,

    S = max_e ||A_K(e) - A_K(0)|| * M0**2
    L = max_e spectral_abscissa(A_K(e)) + S

and ``L < 0`` certifies the region. The certified gain is then
``gamma* = 2 (1 - S/L) ||G^T P~||`` with ``P~`` solving
``A_K(0)^T P~ + P~ A_K(0) + I = 0``. All suprema are taken over the
region's finite grid.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import (NotHurwitzError, estimate_M, is_negative_semidefinite,
                     solve_lyapunov, spectral_abscissa, spectral_norm)

__all__ = ["AugmentedSystem", "Region", "DissipativityReport", "Heatmap",
           "CommonPAudit", "assemble", "closed_loop_matrix",
           "pointwise_index", "region_index", "gamma_star_closed_form",
           "gamma_from_indices", "lmi_block", "gamma_lmi_from_indices",
           "gamma_star_lmi", "construct_common_P", "common_P_audit",
           "hji_matrix", "zero_line_scan", "zero_line_crossings",
           "zero_line_width", "width_from_scan", "heatmap", "report", "BracketError",
           "HEATMAP_REGION", "BENCHMARK_REGIONS"]


class BracketError(RuntimeError):
    """Bisection could not bracket a feasible gamma."""


@dataclass(frozen=True)
class AugmentedSystem:
    D1: np.ndarray
    D2: np.ndarray
    G: np.ndarray
    A_K: np.ndarray


@dataclass(frozen=True)
class Region:
    """Axis-aligned box ``lo <= e <= hi`` gridded with per-axis `step`.

    A single point is allowed (``lo == hi``); the box must contain 0.
    """
    lo: tuple
    hi: tuple
    step: tuple

    def __post_init__(self):
        lo, hi, step = (tuple(float(x) for x in np.atleast_1d(v))
                        for v in (self.lo, self.hi, self.step))
        if not len(lo) == len(hi) == len(step):
            raise ValueError("lo, hi and step must have equal length")
        if not all(np.isfinite(lo + hi + step)):
            raise ValueError("region bounds must be finite")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"empty region: lo {lo} exceeds hi {hi}")
        if any(s <= 0 for s in step):
            raise ValueError("grid steps must be positive")
        if any(a > 0 or b < 0 for a, b in zip(lo, hi)):
            raise ValueError("region must contain the origin")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "step", step)

    @classmethod
    def symmetric(cls, half_widths, step):
        h = np.asarray(half_widths, dtype=float)
        return cls(tuple(-h), tuple(h), tuple(np.broadcast_to(step, h.shape)))

    @property
    def dim(self):
        return len(self.lo)

    def axis(self, i, anchor="origin"):
        """Grid nodes along axis `i`.

        ``anchor="origin"`` gives the multiples of the step inside the box
        plus both end points, so 0 is always a node and boxes sharing a
        step produce nested grids. ``anchor="lower"`` gives
        ``lo, lo + step, ...`` up to `hi`.
        """
        lo, hi, st = self.lo[i], self.hi[i], self.step[i]
        if anchor == "lower":
            count = int(np.floor((hi - lo) / st + 1e-9)) + 1
            return lo + st * np.arange(count)
        if anchor != "origin":
            raise ValueError(f"unknown anchor {anchor!r}")
        k = np.arange(np.ceil(lo / st - 1e-9), np.floor(hi / st + 1e-9) + 1)
        nodes = np.concatenate([k * st, [lo, hi]])
        nodes = np.unique(np.round(nodes, 12))
        return nodes

    def points(self, anchor="origin"):
        axes = [self.axis(i, anchor) for i in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=1)

    def contains(self, pts, atol=0.0):
        pts = np.atleast_2d(pts)
        return bool(np.all(pts >= np.asarray(self.lo) - atol)
                    and np.all(pts <= np.asarray(self.hi) + atol))

    def to_dict(self):
        return {"lo": list(self.lo), "hi": list(self.hi), "step": list(self.step)}


# e_chi in [-pi/3, pi/3] step 0.05, e_gamma in [-pi/6, pi/6] step 0.01
HEATMAP_REGION = Region((-np.pi / 3, -np.pi / 6), (np.pi / 3, np.pi / 6), (0.05, 0.01))
BENCHMARK_REGIONS = {
    "Omega1": Region.symmetric((0.7, 0.3), (0.05, 0.01)),
    "Omega2": Region.symmetric((0.5, 0.22), (0.05, 0.01)),
    "Omega3": Region.symmetric((0.25, 0.15), (0.05, 0.01)),
    "Omega4": Region.symmetric((0.1, 0.06), (0.05, 0.01)),
}


@dataclass
class DissipativityReport:
    M0: float
    S: float
    L: float
    P_tilde: Optional[np.ndarray]
    gamma_star: Optional[float]
    feasible: bool
    W: Optional[float] = None
    region: Optional[Region] = None
    hurwitz: bool = True

    def to_dict(self):
        def num(x):
            return float(x) if x is not None and np.isfinite(x) else None
        return {"M0": num(self.M0), "S": num(self.S), "L": num(self.L),
                "gamma_star": num(self.gamma_star), "W": num(self.W),
                "feasible": bool(self.feasible), "hurwitz": bool(self.hurwitz),
                "P_tilde": None if self.P_tilde is None else self.P_tilde.tolist(),
                "region": None if self.region is None else self.region.to_dict()}


def assemble(model, gains, e, u=None):
    """Block matrices of the stacked closed loop at error `e`."""
    n, m = model.n, model.m
    if gains.shape != (m, n):
        raise ValueError(f"gains must be {m}x{n}, got {gains.shape}")
    Je, Ju = model.jacobians(e, u)
    D1 = np.block([[Je, np.zeros((n, n))], [np.eye(n), np.zeros((n, n))]])
    D2 = np.vstack([Ju, np.zeros((n, m))])
    G = np.vstack([model.Gamma, np.zeros((n, model.l))])
    return AugmentedSystem(D1=D1, D2=D2, G=G, A_K=D1 + D2 @ gains.K)


def closed_loop_matrix(model, gains, e):
    return assemble(model, gains, e).A_K


class _Context:
    """A_K(0) with its transient constant, shared by the grid computations."""

    def __init__(self, model, gains):
        self.model = model
        self.gains = gains
        sys0 = assemble(model, gains, np.zeros(model.n))
        self.A0 = sys0.A_K
        self.G = sys0.G
        alpha0 = spectral_abscissa(self.A0)
        if alpha0 >= 0:
            raise NotHurwitzError(f"A_K(0) is not Hurwitz (spectral abscissa {alpha0:.6g})")
        self.M0, _ = estimate_M(self.A0)

    def terms(self, e):
        A = closed_loop_matrix(self.model, self.gains, e)
        return spectral_abscissa(A), spectral_norm(A - self.A0) * self.M0 ** 2

    def index(self, e):
        a, s = self.terms(e)
        return a + s

    def map(self, fn, pts, workers=None):
        if workers and workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(fn, pts))
        return [fn(p) for p in pts]


def pointwise_index(model, gains, e):
    """``spectral_abscissa(A_K(e)) + ||A_K(e) - A_K(0)|| M0^2``."""
    return _Context(model, gains).index(np.asarray(e, dtype=float))


def _region_terms(ctx, region, workers=None):
    if region.dim != ctx.model.n:
        raise ValueError(f"region has dimension {region.dim}, plant has {ctx.model.n}")
    terms = np.array(ctx.map(ctx.terms, region.points(), workers))
    S = float(terms[:, 1].max())
    L = float(terms[:, 0].max()) + S
    return L, S


def region_index(model, gains, region, workers=None):
    """Region index over the grid of `region`.

    Returns
    -------
    L, S, M0 : float
        ``L < 0`` certifies the region.
    """
    ctx = _Context(model, gains)
    L, S = _region_terms(ctx, region, workers)
    return L, S, ctx.M0


def gamma_from_indices(S, L, P_tilde, G):
    """``2 (1 - S/L) ||G^T P~||``, the optimum over eps_K > 1 (attained at 2)."""
    if not L < 0:
        return None
    return 2.0 * (1.0 - S / L) * spectral_norm(np.asarray(G).T @ np.asarray(P_tilde))


def _p_tilde(A0):
    return solve_lyapunov(A0, np.eye(A0.shape[0]))


def gamma_star_closed_form(model, gains, region, workers=None):
    """Certified L2-gain bound over `region`, or None when ``L >= 0``."""
    ctx = _Context(model, gains)
    L, S = _region_terms(ctx, region, workers)
    if not L < 0:
        return None
    return gamma_from_indices(S, L, _p_tilde(ctx.A0), ctx.G)


def lmi_block(S, L, P_tilde, G):
    """Symmetric block ``[[0, c P~ G], [c G^T P~, 0]]`` with ``c = 2 (1 - S/L)``."""
    c = 2.0 * (1.0 - S / L)
    B = c * np.asarray(P_tilde) @ np.asarray(G)
    r, k = B.shape
    return np.block([[np.zeros((r, r)), B], [B.T, np.zeros((k, k))]])


def gamma_lmi_from_indices(S, L, P_tilde, G, tol=1e-8, max_doublings=200):
    """Smallest gamma with ``lmi_block - gamma I <= 0``, by bisection to `tol`."""
    if not L < 0:
        return None
    if not tol > 0:
        raise ValueError("tol must be positive")
    M = lmi_block(S, L, P_tilde, G)
    eye = np.eye(M.shape[0])

    def feasible(g):
        return is_negative_semidefinite(M - g * eye, tol=0.0)

    lo, hi = 0.0, 1.0
    for _ in range(max_doublings):
        if feasible(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise BracketError("no feasible gamma found while bracketing")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def gamma_star_lmi(model, gains, region, tol=1e-8, workers=None):
    """Same bound as `gamma_star_closed_form`, found by LMI bisection."""
    ctx = _Context(model, gains)
    L, S = _region_terms(ctx, region, workers)
    if not L < 0:
        return None
    return gamma_lmi_from_indices(S, L, _p_tilde(ctx.A0), ctx.G, tol=tol)


def construct_common_P(model, gains, region, eps_K=2.0, workers=None):
    """``eps_K (1 - S/L) P~``, the common storage matrix for the region."""
    if not eps_K > 1:
        raise ValueError("eps_K must exceed 1")
    ctx = _Context(model, gains)
    L, S = _region_terms(ctx, region, workers)
    if not L < 0:
        raise ValueError(f"region is not certified (L = {L:.6g} >= 0)")
    return eps_K * (1.0 - S / L) * _p_tilde(ctx.A0)


@dataclass
class CommonPAudit:
    fraction: float
    max_eigenvalues: np.ndarray
    points: np.ndarray
    residual_points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))


def common_P_audit(model, gains, region, P, eps=2.0, tol=1e-9):
    """Check ``P A_K(e) + A_K(e)^T P + eps I <= 0`` on every grid node."""
    P = np.asarray(P, dtype=float)
    pts = region.points()
    top = np.empty(len(pts))
    for i, e in enumerate(pts):
        A = closed_loop_matrix(model, gains, e)
        lhs = P @ A + A.T @ P + eps * np.eye(len(P))
        top[i] = np.linalg.eigvalsh(0.5 * (lhs + lhs.T)).max()
    ok = top <= tol
    return CommonPAudit(fraction=float(ok.mean()), max_eigenvalues=top,
                        points=pts, residual_points=pts[~ok])


def hji_matrix(P, A, G, gamma):
    """``P A + A^T P + P G G^T P / gamma^2 + I``; HJI holds where it is <= 0."""
    P = np.asarray(P, dtype=float)
    return P @ A + A.T @ P + (P @ G @ G.T @ P) / gamma ** 2 + np.eye(len(P))


def zero_line_scan(model, gains, region, axis=-1):
    """Point-wise index along one axis through the origin.

    The scan uses the lower-anchored grid of `region` with 0 inserted.
    """
    axis = axis % region.dim
    ctx = _Context(model, gains)
    coords = np.union1d(region.axis(axis, anchor="lower"), [0.0])
    pts = np.zeros((len(coords), model.n))
    pts[:, axis] = coords
    return coords, np.array([ctx.index(p) for p in pts])


def _crossing(x0, x1, y0, y1):
    return x0 + (x1 - x0) * (0.0 - y0) / (y1 - y0)


def zero_line_crossings(coords, values):
    """Linearly interpolated sign changes of `values` along `coords`."""
    out = []
    for i in range(len(coords) - 1):
        y0, y1 = values[i], values[i + 1]
        if (y0 < 0) != (y1 < 0):
            out.append(float(_crossing(coords[i], coords[i + 1], y0, y1)))
    return out


def width_from_scan(coords, values):
    i0 = int(np.argmin(np.abs(coords)))
    if not values[i0] < 0:
        return 0.0
    left = coords[0]
    for j in range(i0, 0, -1):
        if not values[j - 1] < 0:
            left = _crossing(coords[j - 1], coords[j], values[j - 1], values[j])
            break
    right = coords[-1]
    for j in range(i0, len(coords) - 1):
        if not values[j + 1] < 0:
            right = _crossing(coords[j], coords[j + 1], values[j], values[j + 1])
            break
    return float(right - left)


def zero_line_width(model, gains, region, axis=-1):
    """Width of the certified band around the origin along `axis`.

    Measured between the zero crossings of the point-wise index nearest
    the origin on either side; the full span if the index is negative on
    the whole scan, and 0 if it is non-negative at the origin or
    ``A_K(0)`` is not Hurwitz.
    """
    try:
        coords, values = zero_line_scan(model, gains, region, axis)
    except NotHurwitzError:
        return 0.0
    return width_from_scan(coords, values)


@dataclass
class Heatmap:
    axes: list
    values: np.ndarray

    def rows(self):
        """(e_1, ..., e_n, L_K) per node, last axis varying fastest."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        cols = [g.ravel() for g in mesh] + [self.values.ravel()]
        return np.stack(cols, axis=1)


def heatmap(model, gains, region=HEATMAP_REGION, workers=None):
    """Point-wise index on the lower-anchored grid of `region`."""
    ctx = _Context(model, gains)
    axes = [region.axis(i, anchor="lower") for i in range(region.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    vals = np.array(ctx.map(ctx.index, pts, workers)).reshape(mesh[0].shape)
    return Heatmap(axes=axes, values=vals)


def report(model, gains, region, width_region=None, workers=None):
    """Full index summary for one gain over one region.

    Infeasibility (including a non-Hurwitz ``A_K(0)``) is reported in the
    result, never raised.
    """
    W = None
    if width_region is not None:
        W = zero_line_width(model, gains, width_region)
    try:
        ctx = _Context(model, gains)
    except NotHurwitzError:
        return DissipativityReport(M0=np.inf, S=np.inf, L=np.inf, P_tilde=None,
                                   gamma_star=None, feasible=False, W=W,
                                   region=region, hurwitz=False)
    L, S = _region_terms(ctx, region, workers)
    P_tilde = _p_tilde(ctx.A0)
    gamma = gamma_from_indices(S, L, P_tilde, ctx.G)
    return DissipativityReport(M0=ctx.M0, S=S, L=L, P_tilde=P_tilde,
                               gamma_star=gamma, feasible=gamma is not None,
                               W=W, region=region)
