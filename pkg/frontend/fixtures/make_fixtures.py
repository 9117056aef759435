"""Regenerate the committed renderer fixtures from the engine CLI.

Produces, per panel (small alpha = 3/4, large alpha = (615/182) ln 9):
six simulated sample-path CSVs started from the uniform state, six ODE
flow-curve CSVs, and the fixed-point report.  For the large-alpha panel
the committed report keeps the centre plus the six-member stable orbit
(the seven marked points of the reference layout); the full search output
is kept alongside as fixed_points_all.json.

Usage: python make_fixtures.py  (from this directory; engine must be installed)
"""

import json
import math
import shutil
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).parent
LARGE_ALPHA = (615.0 / 182.0) * math.log(9.0)
CENTRE = [1.0 / 3.0] * 6


def cli(*args):
    subprocess.run([sys.executable, "-m", "urnfield.cli", *args], check=True)


def write_config(path, alpha, n_runs):
    config = {
        "model": {
            "d": 3,
            "c": 2,
            "alpha": alpha,
            "phi": "logistic",
            "initial_balls": [[1, 1], [1, 1], [1, 1]],
        },
        "sim": {"n_steps": 20000, "n_runs": n_runs, "master_seed": 1061, "snapshot_every": 250},
        "fp": {"n_starts": 500, "seed": 271828},
        "flow": {"t_end": 30.0, "h": 0.01, "n_starts": 6, "seed": 5, "store_every": 25},
    }
    path.write_text(json.dumps(config, indent=2))


def is_close(a, b, tol=1e-7):
    return max(abs(x - y) for x, y in zip(a, b)) < tol


def stable_orbit_and_centre(records):
    kept = [r for r in records if is_close(r["point"], CENTRE)]
    stable = [r for r in records if r["classification"] == "stable"]
    orbit_ids = {r["orbit_id"] for r in stable}
    for oid in sorted(orbit_ids):
        members = [r for r in stable if r["orbit_id"] == oid]
        if len(members) == 6:
            kept.extend(members)
    return kept


def main():
    for name, alpha in [("left", 0.75), ("right", LARGE_ALPHA)]:
        panel = HERE / name
        if panel.exists():
            shutil.rmtree(panel)
        panel.mkdir(parents=True)
        config = panel / "config.json"
        write_config(config, alpha, n_runs=6)
        cli("simulate", "--config", str(config), "--out", str(panel), "--quiet")
        cli("flow", "--config", str(config), "--out", str(panel), "--quiet")

        report_path = panel / "fixed_points.json"
        report = json.loads(report_path.read_text())
        if name == "right":
            (panel / "fixed_points_all.json").write_text(json.dumps(report, indent=2) + "\n")
            report["records"] = stable_orbit_and_centre(report["records"])
            assert len(report["records"]) == 7, len(report["records"])
            report_path.write_text(json.dumps(report, indent=2) + "\n")
        print(f"{name}: {len(report['records'])} marker(s), alpha={alpha:.6g}")


if __name__ == "__main__":
    main()
