"""Command-line driver: seeded experiments in, CSV/JSON reports out.

Verbs: ``simulate`` (Monte-Carlo batches of the ball process),
``fixed-points`` (multi-start search, golden benchmark check, contraction
check), ``flow`` (ODE trajectories with the energy column), ``sweep``
(fixed-point search across a list of reinforcement strengths).

All randomness is seeded from the config, so every command is a pure
function of (config, flags).  Exit codes: 0 success, 1 check failure,
2 usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dynamics, fixed_points, pi_map, urn
from .model import (
    ModelParams,
    SimplexPoint,
    UrnModelError,
    logistic,
    random_simplex_values,
    validate_params,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

_PHI_BUILTINS = {"logistic": logistic}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict
    params: ModelParams
    sha256: str

    def block(self, name: str) -> dict:
        value = self.raw.get(name)
        if not isinstance(value, dict):
            raise ConfigError(f"config is missing the '{name}' block")
        return value


def load_config(path: str, seed_override: int | None = None) -> ExperimentConfig:
    """Read and validate a config file; flag overrides are folded in before hashing."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "model" not in raw:
        raise ConfigError("config must be a JSON object with a 'model' block")
    if seed_override is not None:
        for block in ("sim", "fp", "flow", "sweep"):
            if isinstance(raw.get(block), dict):
                raw[block]["master_seed" if block == "sim" else "seed"] = seed_override

    model = raw["model"]
    try:
        phi_name = model.get("phi", "logistic")
        if phi_name not in _PHI_BUILTINS:
            raise ConfigError(f"unknown reinforcement function {phi_name!r}")
        params = ModelParams(
            d=int(model["d"]),
            c=int(model["c"]),
            alpha=float(model["alpha"]),
            phi=_PHI_BUILTINS[phi_name](),
            initial_balls=np.asarray(model["initial_balls"], dtype=np.int64),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad model block: {exc}") from exc
    report = validate_params(params)
    if not report.ok:
        raise ConfigError("invalid model: " + "; ".join(report.errors))

    digest = hashlib.sha256(
        json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    return ExperimentConfig(raw=raw, params=params, sha256=digest)


def _say(quiet: bool, *parts) -> None:
    if not quiet:
        print(*parts)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _nearest_fixed_point(flat: np.ndarray, fp_flats: list[np.ndarray]) -> tuple[int, float]:
    dists = [float(np.max(np.abs(flat - f))) for f in fp_flats]
    best = int(np.argmin(dists))
    return best, dists[best]


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(config: ExperimentConfig, out: Path, quiet: bool) -> int:
    sim = config.block("sim")
    n_steps = int(sim.get("n_steps", 100_000))
    n_runs = int(sim.get("n_runs", 1))
    master_seed = int(sim.get("master_seed", 0))
    snapshot_every = int(sim.get("snapshot_every", 0))
    params = config.params

    fp_block = config.raw.get("fp", {})
    search = fixed_points.multi_start_search(
        params,
        n_starts=int(fp_block.get("n_starts", 200)),
        seed=int(fp_block.get("seed", master_seed)),
    )
    fp_flats = [rec.point.flat for rec in search.records]
    _write_json(
        out / "fixed_points.json",
        {
            "config_sha256": config.sha256,
            "d": params.d,
            "c": params.c,
            "records": fixed_points.records_to_json(search.records, params),
        },
    )

    runs = urn.run_batch(params, n_steps, n_runs, master_seed, snapshot_every=snapshot_every)
    hits = [0] * len(fp_flats)
    names = dynamics.state_column_names(params.d, params.c)
    with open(out / "runs.csv", "w", newline="") as fh:
        fh.write(f"# config_sha256={config.sha256}\n")
        writer = csv.writer(fh)
        writer.writerow(["seed", "n_steps", *names, "nearest_fixed_point_id", "final_distance"])
        for sim_run in runs:
            flat = proportions_flat = urn.proportions(sim_run.final_state).flat
            if fp_flats:
                best, dist = _nearest_fixed_point(flat, fp_flats)
                hits[best] += 1
            else:
                best, dist = -1, float("nan")
            writer.writerow(
                [sim_run.seed, n_steps, *[repr(float(v)) for v in proportions_flat], best, repr(dist)]
            )

    if snapshot_every > 0:
        system = dynamics.build_hopfield(params)
        for k, sim_run in enumerate(runs):
            steps = np.array([n for n, _ in sim_run.snapshots], dtype=float)
            states = np.array([pt.values for _, pt in sim_run.snapshots])
            lyap = dynamics.lyapunov_along(states, params, system)
            with open(out / f"run_{k:03d}.csv", "w", newline="") as fh:
                fh.write(f"# config_sha256={config.sha256}\n")
                writer = csv.writer(fh)
                writer.writerow(["t", *names, "lyapunov"])
                for t, state, ell in zip(steps, states, lyap):
                    flat = state.T.reshape(-1)
                    writer.writerow([repr(float(t)), *[repr(float(v)) for v in flat], repr(float(ell))])

    _say(quiet, f"{n_runs} runs of {n_steps} steps (master seed {master_seed})")
    for idx, rec in enumerate(search.records):
        _say(
            quiet,
            f"  fixed point {idx} [{rec.classification}, rho={rec.spectral_radius:.4f}]: "
            f"{hits[idx]} runs ended nearest",
        )
    return EXIT_OK


def cmd_fixed_points(config: ExperimentConfig | None, out: Path, quiet: bool, args) -> int:
    if args.verify_example1:
        report = fixed_points.verify_example1()
        _say(quiet, report.summary())
        _say(quiet, "all checks pass" if report.passed else "verification FAILED")
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED

    if config is None:
        print("fixed-points requires --config (or --verify-example1)", file=sys.stderr)
        return EXIT_USAGE
    params = config.params

    if args.contraction_check:
        bound = pi_map.l1_norm_bound(params)
        verdict = "contraction" if pi_map.is_contraction_regime(params) else "no contraction guarantee"
        _say(quiet, f"l1 norm bound {bound:.6f}: {verdict}")
        return EXIT_OK

    fp_block = config.block("fp")
    search = fixed_points.multi_start_search(
        params, n_starts=int(fp_block.get("n_starts", 200)), seed=int(fp_block.get("seed", 0))
    )
    _write_json(
        out / "fixed_points.json",
        {
            "config_sha256": config.sha256,
            "d": params.d,
            "c": params.c,
            "n_starts": search.n_starts,
            "n_converged": search.n_converged,
            "n_abandoned": search.n_abandoned,
            "n_failed": search.n_failed,
            "records": fixed_points.records_to_json(search.records, params),
        },
    )
    _say(
        quiet,
        f"{len(search.records)} fixed point(s) from {search.n_starts} starts "
        f"({search.n_abandoned} abandoned, {search.n_failed} failed)",
    )
    for rec in search.records:
        _say(quiet, f"  rho={rec.spectral_radius:.6f} ({rec.classification}), residual {rec.residual:.2e}")
    return EXIT_OK


def cmd_flow(config: ExperimentConfig, out: Path, quiet: bool) -> int:
    flow = config.block("flow")
    t_end = float(flow.get("t_end", 50.0))
    h = float(flow.get("h", 0.01))
    store_every = int(flow.get("store_every", 10))
    params = config.params

    starts = [
        SimplexPoint.from_flat(np.asarray(s, dtype=float), params.d, params.c).values
        for s in flow.get("starts", [])
    ]
    n_random = int(flow.get("n_starts", 0))
    if n_random > 0:
        rng = np.random.default_rng(int(flow.get("seed", 0)))
        starts.extend(random_simplex_values(params.d, params.c, rng) for _ in range(n_random))
    if not starts:
        raise ConfigError("flow block needs 'starts' and/or 'n_starts'")

    trajectories = dynamics.integrate_batch(np.array(starts), params, t_end, h, store_every)
    system = dynamics.build_hopfield(params)
    violations = 0
    for k, traj in enumerate(trajectories):
        dynamics.write_trajectory_csv(
            out / f"traj_{k:03d}.csv", traj, params, header_comment=f"config_sha256={config.sha256}"
        )
        lyap = dynamics.lyapunov_along(traj.states, params, system)
        violations += int(np.sum(np.diff(lyap) > 1e-9))

    _say(
        quiet,
        f"{len(trajectories)} trajectories to t={t_end} (h={h}); "
        f"energy increases beyond 1e-9: {violations}",
    )
    return EXIT_OK if violations == 0 else EXIT_CHECK_FAILED


def cmd_sweep(config: ExperimentConfig, out: Path, quiet: bool) -> int:
    sweep = config.block("sweep")
    alphas = sweep.get("alpha_values")
    if not alphas:
        raise ConfigError("sweep block needs a non-empty 'alpha_values' list")
    n_starts = int(sweep.get("n_starts", 200))
    seed = int(sweep.get("seed", 0))
    base = config.params

    rows = []
    for idx, alpha in enumerate(alphas):
        params = ModelParams(
            d=base.d, c=base.c, alpha=float(alpha), phi=base.phi, initial_balls=base.initial_balls
        )
        search = fixed_points.multi_start_search(params, n_starts=n_starts, seed=seed)
        by_class = {"stable": 0, "unstable": 0, "marginal": 0}
        for rec in search.records:
            by_class[rec.classification] += 1
        rows.append(
            {
                "alpha": float(alpha),
                "l1_norm_bound": pi_map.l1_norm_bound(params),
                "is_contraction": pi_map.is_contraction_regime(params),
                "n_fixed_points": len(search.records),
                **{f"n_{k}": v for k, v in by_class.items()},
            }
        )
        _write_json(
            out / f"fixed_points_alpha_{idx:02d}.json",
            {
                "config_sha256": config.sha256,
                "alpha": float(alpha),
                "d": params.d,
                "c": params.c,
                "records": fixed_points.records_to_json(search.records, params),
            },
        )

    with open(out / "sweep.csv", "w", newline="") as fh:
        fh.write(f"# config_sha256={config.sha256}\n")
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    for row in rows:
        _say(
            quiet,
            f"alpha={row['alpha']:.6g}: bound={row['l1_norm_bound']:.4f}, "
            f"{row['n_fixed_points']} fixed point(s), {row['n_stable']} stable",
        )
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urnfield",
        description="Interacting-urn engine: simulation, fixed points, mean-field flow.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("simulate", "Monte-Carlo batch of the ball process"),
        ("fixed-points", "multi-start fixed-point search and golden checks"),
        ("flow", "integrate the mean-field ODE and emit trajectory CSVs"),
        ("sweep", "fixed-point search across a list of alpha values"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="experiment config (JSON)")
        cmd.add_argument("--out", default="out", help="output directory (default: ./out)")
        cmd.add_argument("--seed", type=int, default=None, help="override the config's seed")
        cmd.add_argument("--quiet", action="store_true", help="suppress informational output")
        if name == "fixed-points":
            cmd.add_argument(
                "--verify-example1",
                action="store_true",
                help="run the built-in d=3, c=2 golden benchmark check",
            )
            cmd.add_argument(
                "--contraction-check",
                action="store_true",
                help="print the l1 contraction bound and verdict",
            )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = None
        if args.config is not None:
            config = load_config(args.config, seed_override=args.seed)
        elif args.command != "fixed-points" or not getattr(args, "verify_example1", False):
            print(f"{args.command} requires --config", file=sys.stderr)
            return EXIT_USAGE
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            return cmd_simulate(config, out, args.quiet)
        if args.command == "fixed-points":
            return cmd_fixed_points(config, out, args.quiet, args)
        if args.command == "flow":
            return cmd_flow(config, out, args.quiet)
        if args.command == "sweep":
            return cmd_sweep(config, out, args.quiet)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UrnModelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
