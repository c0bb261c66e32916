"""Command-line entry point: heatmap, gamma, tune, simulate and verify.

Exit status: 0 success, 1 configuration error, 2 numerical/model error,
3 I/O error, 4 advisory (infeasible, diverged or failed verification).
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import ConfigError, RunConfig
from .dissipativity import (heatmap, report, width_from_scan, zero_line_crossings,
                            zero_line_scan)
from .linalg import NotHurwitzError
from .plant import PlantEvaluationError
from .sim import dissipation_audit, empirical_l2_ratio, metrics, simulate
from .tuner import tune

log = logging.getLogger("pidissipativity")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO, EXIT_ADVISORY = 0, 1, 2, 3, 4


def cmd_heatmap(cfg, out):
    region = cfg.heatmap_region
    try:
        hm = heatmap(cfg.model, cfg.gains, region, workers=cfg.workers)
    except NotHurwitzError as exc:
        io.write_csv(out / "heatmap.csv", io.HEATMAP_HEADER, [])
        io.write_json(out / "heatmap.json", {"W": 0.0, "crossings": [], "hurwitz": False,
                                             "message": str(exc), "region": region.to_dict()})
        return EXIT_ADVISORY
    coords, values = zero_line_scan(cfg.model, cfg.gains, region)
    io.write_heatmap_csv(out / "heatmap.csv", hm)
    io.write_json(out / "heatmap.json", {
        "W": width_from_scan(coords, values),
        "crossings": zero_line_crossings(coords, values),
        "L_origin": float(values[np.argmin(np.abs(coords))]),
        "hurwitz": True,
        "shape": list(hm.values.shape),
        "region": region.to_dict(),
        "gains": cfg.gains.to_dict(),
    })
    return EXIT_OK


def _report_dict(cfg, rep):
    d = rep.to_dict()
    d.update(cfg.gains.to_dict())
    return d


def cmd_gamma(cfg, out):
    name = cfg.doc.get("report_region")
    region = cfg.region(name)
    rep = report(cfg.model, cfg.gains, region, width_region=cfg.heatmap_region,
                 workers=cfg.workers)
    d = _report_dict(cfg, rep)
    d["region_name"] = name
    io.write_json(out / "report.json", d)
    return EXIT_OK if rep.feasible else EXIT_ADVISORY


def cmd_tune(cfg, out):
    spec, names = cfg.sweep()
    res = tune(cfg.model, spec, workers=cfg.workers)
    doc = res.to_dict()
    doc["region_names"] = names
    doc["epsilons"] = list(spec.epsilons) if spec.mode == "epsilon-family" else None
    io.write_json(out / "tune.json", doc)
    header = ["index", "epsilon", "W_K"] + [f"gamma_{n}" for n in names] + ["selected"]
    rows = []
    for i, c in enumerate(res.candidates):
        eps = spec.epsilons[i] if spec.mode == "epsilon-family" else ""
        gam = ["" if r.gamma_star is None else float(r.gamma_star) for r in c.reports]
        rows.append([i, "" if eps == "" else float(eps), float(c.W)] + gam + [int(i == res.best)])
    io.write_csv(out / "tune.csv", header, rows)
    return EXIT_OK if res.best is not None else EXIT_ADVISORY


def _audit_block(cfg, traj, audit):
    if not audit:
        return None
    if "report" in audit:
        rep = io.read_json(audit["report"])
        P, gamma = _p_from_report(rep, audit.get("eps_K", 2.0)), rep["gamma_star"]
    else:
        P, gamma = np.asarray(audit["P"], float), audit["gamma"]
    if gamma is None:
        raise ConfigError("audit requires a finite gamma")
    return {"gamma": gamma, "violation_fraction": dissipation_audit(traj, P, gamma)}


def cmd_simulate(cfg, out):
    kw = cfg.simulation()
    traj = simulate(**kw)
    io.write_trajectory_csv(out / "trajectory.csv", traj)
    T = traj.times[-1] - traj.times[0]
    doc = metrics(traj, T).to_dict()
    doc["diverged"] = traj.diverged
    doc["reason"] = traj.reason
    audit = _audit_block(cfg, traj, cfg.doc["simulation"].get("audit"))
    if audit is not None:
        doc["audit"] = audit
    io.write_json(out / "metrics.json", doc)
    return EXIT_ADVISORY if traj.diverged else EXIT_OK


def _p_from_report(rep, eps_K):
    if rep.get("P_tilde") is None or rep.get("L") is None or rep.get("S") is None:
        raise ConfigError("report lacks P_tilde/S/L (infeasible or non-Hurwitz gain)")
    S, L = rep["S"], rep["L"]
    if not L < 0:
        raise ConfigError("report region is not certified (L >= 0)")
    return eps_K * (1.0 - S / L) * np.asarray(rep["P_tilde"], dtype=float)


def cmd_verify(cfg, out):
    v = cfg.doc["verify"]
    if not v.get("trajectory") or not v.get("report"):
        raise ConfigError("verify needs verify.trajectory and verify.report paths")
    traj = io.read_trajectory_csv(v["trajectory"])
    rep = io.read_json(v["report"])
    P = _p_from_report(rep, float(v.get("eps_K", 2.0)))
    gamma = rep.get("gamma_star") if v.get("gamma_override") is None else float(v["gamma_override"])
    if gamma is None:
        raise ConfigError("report has no finite gamma_star")
    if P.shape[0] != 2 * traj.e.shape[1]:
        raise ValueError(f"report P is {P.shape} but trajectory state has dimension "
                         f"{traj.e.shape[1]}")
    frac = dissipation_audit(traj, P, gamma)
    ratio = empirical_l2_ratio(traj)
    ok = frac == 0.0 and (ratio is None or ratio <= gamma)
    io.write_json(out / "verify.json", {"gamma": gamma, "violation_fraction": frac,
                                        "l2_ratio": ratio, "pass": ok})
    return EXIT_OK if ok else EXIT_ADVISORY


COMMANDS = {"heatmap": cmd_heatmap, "gamma": cmd_gamma, "tune": cmd_tune,
            "simulate": cmd_simulate, "verify": cmd_verify}


def build_parser():
    ap = argparse.ArgumentParser(prog="pidissipativity", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path, help="JSON config merged over the benchmark defaults")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory")
    ap.add_argument("--seed", type=int, default=None, help="seed for test utilities")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        doc = {}
        if args.config is not None:
            doc = io.read_json(args.config)
            if not isinstance(doc, dict):
                raise ConfigError("config must be a JSON object")
        cfg = RunConfig(doc)
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_IO
    except (ConfigError, json.JSONDecodeError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except (ValueError, ArithmeticError, np.linalg.LinAlgError,
            NotHurwitzError, PlantEvaluationError) as exc:
        log.error("numerical/model error: %s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
