"""
Certify, fly and verify from the command line
=============================================

Drive the command-line tool end to end: compute the report, log a run
from rest, then audit the logged run against the report.
"""

import json
import tempfile
from pathlib import Path

from pidissipativity.cli import main

work = Path(tempfile.mkdtemp())


def cli(*args, config=None):
    argv = list(args) + ["--out", str(work)]
    if config is not None:
        path = work / f"{args[0]}_config.json"
        path.write_text(json.dumps(config))
        argv += ["--config", str(path)]
    return main(argv)


print("gamma ->", cli("gamma"))
report = json.loads((work / "report.json").read_text())
print("gamma* on", report["region_name"], "=", round(report["gamma_star"], 4))

print("simulate ->", cli("simulate", config={"simulation": {"e0": [0.0, 0.0], "u0": None}}))

verify = {"verify": {"trajectory": str(work / "trajectory.csv"),
                     "report": str(work / "report.json")}}
print("verify ->", cli("verify", config=verify))
print((work / "verify.json").read_text())

# Removing the gain budget must make the audit fail (exit status 4).
verify["verify"]["gamma_override"] = 0.0
print("verify with gamma = 0 ->", cli("verify", config=verify))
