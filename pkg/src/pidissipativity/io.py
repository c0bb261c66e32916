"""CSV and JSON writers/readers with round-trip float formatting."""

import csv
import json
import math

import numpy as np

from .sim import Trajectory

__all__ = ["fmt", "write_csv", "write_json", "read_json", "write_heatmap_csv",
           "write_trajectory_csv", "read_trajectory_csv", "trajectory_header"]

HEATMAP_HEADER = ("e_chi", "e_gamma", "L_K")


def fmt(x):
    """Shortest decimal string that parses back to the same double."""
    return repr(float(x))


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_clean(obj), fh, indent=2)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_heatmap_csv(path, hm):
    rows = hm.rows()
    n = rows.shape[1] - 1
    header = HEATMAP_HEADER if n == 2 else tuple(f"e_{i + 1}" for i in range(n)) + ("L_K",)
    write_csv(path, header, rows)


def trajectory_header(n, m, l):
    cols = ["t"]
    cols += [f"e_{i + 1}" for i in range(n)]
    cols += [f"edot_{i + 1}" for i in range(n)]
    cols += [f"u_{i + 1}" for i in range(m)]
    cols += [f"d_{i + 1}" for i in range(l)]
    cols += [f"ddot_{i + 1}" for i in range(l)]
    return cols


def write_trajectory_csv(path, traj):
    n, m, l = traj.e.shape[1], traj.u.shape[1], traj.d.shape[1]
    data = np.hstack([traj.times[:, None], traj.e, traj.e_dot, traj.u, traj.d, traj.d_dot])
    write_csv(path, trajectory_header(n, m, l), data)


def read_trajectory_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty trajectory file")
    header, body = rows[0], rows[1:]

    def count(prefix):
        return sum(1 for h in header if h.startswith(prefix) and h[len(prefix):].isdigit())

    n, m, l = count("e_"), count("u_"), count("d_")
    if header != trajectory_header(n, m, l):
        raise ValueError(f"{path}: unexpected trajectory header {header}")
    data = np.array([[float(x) for x in r] for r in body], dtype=float).reshape(-1, len(header))
    cuts = np.cumsum([1, n, n, m, l])
    t, e, ed, u, d, dd = np.split(data, cuts, axis=1)
    return Trajectory(times=t[:, 0], e=e, e_dot=ed, u=u, d=d, d_dot=dd)
