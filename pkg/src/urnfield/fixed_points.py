"""Fixed points of the reinforcement map: location, stability, symmetry.

Search strategy: plain map iteration (guaranteed in the contraction
regime), damped Newton on F(x) = -x + pi(x) restricted to the affine
slice {column sums = 1} otherwise, and a seeded multi-start driver that
deduplicates and classifies whatever it finds.  Nothing here certifies
completeness of the fixed-point set.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .model import ModelParams, SimplexPoint, from_flat, logistic, random_simplex_values, to_flat
from .pi_map import field_flat, jacobian_values, pi_values, pi_jacobian, spectral_radius

RESIDUAL_TOL = 1e-10      # every reported record satisfies this
DEDUP_TOL = 1e-7          # l-infinity distance identifying two finds
MARGINAL_BAND = 1e-8      # +-band around spectral radius 1
NEWTON_MAX_STEPS = 100
NEWTON_MIN_DAMPING = 1e-6
NEWTON_ESCAPE = 0.1       # abandon a start once coordinates leave [0,1] by this much


@dataclass(frozen=True)
class FixedPointRecord:
    """A located fixed point with its stability classification."""

    point: SimplexPoint
    residual: float
    spectral_radius: float
    classification: str          # "stable" | "unstable" | "marginal"
    basin_hits: int | None = None
    iterations: int | None = None


def classify_spectral_radius(rho: float) -> str:
    if rho < 1.0 - MARGINAL_BAND:
        return "stable"
    if rho > 1.0 + MARGINAL_BAND:
        return "unstable"
    return "marginal"


def _make_record(values: np.ndarray, params: ModelParams, iterations: int | None = None) -> FixedPointRecord:
    point = SimplexPoint(values)
    residual = float(np.max(np.abs(pi_values(point.values, params) - point.values)))
    rho = spectral_radius(jacobian_values(point.values, params))
    return FixedPointRecord(
        point=point,
        residual=residual,
        spectral_radius=rho,
        classification=classify_spectral_radius(rho),
        iterations=iterations,
    )


def iterate_to_fixed_point(
    x0: SimplexPoint,
    params: ModelParams,
    max_iter: int = 10_000,
    tol: float = 1e-12,
) -> FixedPointRecord | None:
    """Repeatedly apply the map until the sup-norm residual drops below tol.

    Converges whenever :func:`urnfield.pi_map.is_contraction_regime` holds;
    outside that regime it may return None (callers fall back to Newton).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = x0.values
    for k in range(max_iter):
        nxt = pi_values(x, params)
        if np.max(np.abs(nxt - x)) < tol:
            return _make_record(nxt, params, iterations=k + 1)
        x = nxt
    return None


def _reduced_indices(d: int, c: int):
    keep = [i * d + u for i in range(c) for u in range(d - 1)]
    elim = [i * d + (d - 1) for i in range(c)]
    return np.array(keep), np.array(elim)


def _lift(reduced: np.ndarray, d: int, c: int) -> np.ndarray:
    """Reinsert the eliminated last vertex of each colour so columns sum to 1."""
    flat = np.empty(d * c)
    blocks = reduced.reshape(c, d - 1)
    for i in range(c):
        flat[i * d : i * d + d - 1] = blocks[i]
        flat[i * d + d - 1] = 1.0 - blocks[i].sum()
    return flat


def _newton_flat(x0_flat: np.ndarray, params: ModelParams, tol: float):
    """Damped Newton on the reduced system.  Returns (flat or None, status, steps)."""
    d, c = params.d, params.c
    keep, elim = _reduced_indices(d, c)
    x = np.array(x0_flat, dtype=float)
    fx = field_flat(x, params)
    norm = np.max(np.abs(fx))
    for step in range(NEWTON_MAX_STEPS):
        if norm < tol:
            return x, "converged", step
        jac = jacobian_values(from_flat(x, d, c), params)
        jf = jac - np.eye(d * c)
        # eliminate one vertex per colour: d/dxi_red = column(keep) - column(elim of same colour)
        reduced = jf[np.ix_(keep, keep)].copy()
        for j in range(c):
            cols = slice(j * (d - 1), (j + 1) * (d - 1))
            reduced[:, cols] -= jf[np.ix_(keep, [elim[j]])]
        try:
            delta = np.linalg.solve(reduced, -fx[keep])
        except np.linalg.LinAlgError:
            return None, "singular", step
        lam = 1.0
        while True:
            trial = _lift(x[keep] + lam * delta, d, c)
            trial_fx = field_flat(trial, params)
            trial_norm = np.max(np.abs(trial_fx))
            if trial_norm < norm:
                break
            lam *= 0.5
            if lam < NEWTON_MIN_DAMPING:
                return None, "stalled", step
        if trial.min() < -NEWTON_ESCAPE or trial.max() > 1.0 + NEWTON_ESCAPE:
            return None, "abandoned", step
        x, fx, norm = trial, trial_fx, trial_norm
    return None, "max_steps", NEWTON_MAX_STEPS


def newton_solve(x0: SimplexPoint, params: ModelParams, tol: float = 1e-12) -> FixedPointRecord | None:
    """Damped Newton for a fixed point near x0; None when it does not converge."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    flat, status, steps = _newton_flat(x0.flat, params, tol)
    if status != "converged":
        return None
    return _make_record(from_flat(flat, params.d, params.c), params, iterations=steps)


@dataclass(frozen=True)
class MultiStartResult:
    """Deduplicated fixed points found from seeded random starts."""

    records: tuple
    n_starts: int
    n_converged: int
    n_abandoned: int
    n_failed: int

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def multi_start_search(
    params: ModelParams,
    n_starts: int,
    seed: int,
    tol: float = 1e-12,
) -> MultiStartResult:
    """Newton from n_starts flat-Dirichlet starts, deduplicated in sup norm.

    Deterministic for a fixed seed: starts are drawn up front and results
    are aggregated in start order.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    rng = np.random.default_rng(seed)
    found: list[np.ndarray] = []
    records: list[FixedPointRecord] = []
    n_converged = n_abandoned = n_failed = 0
    for _ in range(n_starts):
        start = random_simplex_values(params.d, params.c, rng)
        flat, status, _ = _newton_flat(to_flat(start), params, tol)
        if status == "converged":
            n_converged += 1
            if not any(np.max(np.abs(flat - prev)) < DEDUP_TOL for prev in found):
                found.append(flat)
                records.append(_make_record(from_flat(flat, params.d, params.c), params))
        elif status == "abandoned":
            n_abandoned += 1
        else:
            n_failed += 1
    return MultiStartResult(
        records=tuple(records),
        n_starts=n_starts,
        n_converged=n_converged,
        n_abandoned=n_abandoned,
        n_failed=n_failed,
    )


def permutation_orbit(x: SimplexPoint, params: ModelParams) -> list[SimplexPoint]:
    """Orbit of x under simultaneous vertex relabelling of every colour block.

    Fixed points come in such orbits: relabelling the vertices of the
    complete graph commutes with the map.
    """
    values = x.values
    seen: list[np.ndarray] = []
    for sigma in itertools.permutations(range(params.d)):
        permuted = values[list(sigma), :]
        if not any(np.max(np.abs(permuted - prev)) < DEDUP_TOL for prev in seen):
            seen.append(permuted)
    return [SimplexPoint(v) for v in seen]


def assign_orbit_ids(records) -> list[int]:
    """Orbit id per record: members of one vertex-permutation orbit share an id."""
    ids: list[int] = []
    reps: list[tuple[int, list[np.ndarray]]] = []  # (orbit_id, orbit flat members)
    next_id = 0
    for rec in records:
        values = rec.point.values
        d = values.shape[0]
        assigned = None
        for orbit_id, members in reps:
            if any(np.max(np.abs(to_flat(values) - m)) < DEDUP_TOL for m in members):
                assigned = orbit_id
                break
        if assigned is None:
            assigned = next_id
            next_id += 1
            orbit = [to_flat(values[list(sigma), :]) for sigma in itertools.permutations(range(d))]
            reps.append((assigned, orbit))
        ids.append(assigned)
    return ids


def records_to_json(records, params: ModelParams) -> list[dict]:
    """Serializable fixed-point report rows (full-precision coordinates)."""
    orbit_ids = assign_orbit_ids(records)
    rows = []
    for rec, orbit_id in zip(records, orbit_ids):
        rows.append(
            {
                "point": [float(v) for v in rec.point.flat],
                "residual": rec.residual,
                "spectral_radius": rec.spectral_radius,
                "classification": rec.classification,
                "orbit_id": orbit_id,
                "basin_hits": rec.basin_hits,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# golden benchmark: d=3, c=2, logistic, alpha = (615/182) ln 9

GOLDEN_ALPHA = (615.0 / 182.0) * math.log(9.0)
_GOLDEN_Y = np.array([23.0 / 615.0, 1.0 / 3.0, 129.0 / 205.0])
# cross-block Jacobian at the benchmark point, divided by alpha/3
_GOLDEN_M_UNIT = np.array(
    [
        [8577.0 / 84050.0, -9.0 / 100.0, -81.0 / 6724.0],
        [-9.0 / 100.0, 9.0 / 50.0, -9.0 / 100.0],
        [-81.0 / 6724.0, -9.0 / 100.0, 8577.0 / 84050.0],
    ]
)
_GOLDEN_M_EIGENVALUES = (0.0, 0.28, 0.66)
_GOLDEN_Z_VALUES = (-math.log(9.0), -2.0 * math.log(9.0), -math.log(9.0))


def golden_params(alpha: float | None = None) -> ModelParams:
    return ModelParams.uniform(3, 2, GOLDEN_ALPHA if alpha is None else alpha, logistic())


def golden_points() -> list[SimplexPoint]:
    """The six symmetric stable fixed points of the benchmark model."""
    base = SimplexPoint(np.column_stack([_GOLDEN_Y, _GOLDEN_Y]))
    return permutation_orbit(base, golden_params())


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    discrepancy: float
    detail: str = ""


@dataclass(frozen=True)
class Example1Report:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            detail = f" ({c.detail})" if c.detail else ""
            lines.append(f"[{status}] {c.name}: discrepancy {c.discrepancy:.3e}{detail}")
        return "\n".join(lines)


def verify_example1(alpha: float | None = None) -> Example1Report:
    """Golden self-check of the built-in d=3, c=2 benchmark configuration.

    At alpha = (615/182) ln 9 the six symmetric points are exact fixed
    points with known cross-block Jacobian, known changed-variable values
    (-ln 9, -2 ln 9, -ln 9), eigenvalues near {0, 0.28, 0.66}, and spectral
    radius below 1.  Any other alpha makes check (a) fail, which is the
    intended negative control.
    """
    from .dynamics import psi

    params = golden_params(alpha)
    checks = []

    points = golden_points()
    res = max(float(np.max(np.abs(pi_values(p.values, params) - p.values))) for p in points)
    checks.append(
        CheckResult("a: map fixes all six benchmark points", res < 1e-12, res, f"{len(points)} points")
    )

    base = SimplexPoint(np.column_stack([_GOLDEN_Y, _GOLDEN_Y]))
    jac = pi_jacobian(base, params)
    m_block = jac[0:3, 3:6]
    target = (params.alpha / 3.0) * _GOLDEN_M_UNIT
    m_err = float(np.max(np.abs(m_block - target)))
    m_err = max(m_err, float(np.max(np.abs(jac[3:6, 0:3] - target))))
    m_err = max(m_err, float(np.max(np.abs(jac[0:3, 0:3]))), float(np.max(np.abs(jac[3:6, 3:6]))))
    checks.append(CheckResult("b: cross-block Jacobian matches the exact fractions", m_err < 1e-12, m_err))

    z = psi(base, params)
    # first-colour components (u,v) = (0,1), (0,2), (1,2); the ordered-triple
    # index runs (0,1),(0,2),(1,0),(1,2),(2,0),(2,1) per colour
    z_vals = np.array([z[0], z[1], z[3]])
    z_err = float(np.max(np.abs(z_vals - np.array(_GOLDEN_Z_VALUES))))
    checks.append(CheckResult("c: changed-variable values are -ln9, -2ln9, -ln9", z_err < 1e-12, z_err))

    eig = np.sort(np.linalg.eigvalsh(m_block))
    eig_err = float(np.max(np.abs(eig - np.array(_GOLDEN_M_EIGENVALUES))))
    checks.append(CheckResult("d: cross-block eigenvalues near {0, 0.28, 0.66}", eig_err < 0.01, eig_err))

    rho = max(spectral_radius(jacobian_values(p.values, params)) for p in points)
    checks.append(CheckResult("e: spectral radius below 1 at all six points", rho < 1.0, rho, f"max rho {rho:.6f}"))

    return Example1Report(checks=tuple(checks))


def with_basin_hits(record: FixedPointRecord, hits: int) -> FixedPointRecord:
    return replace(record, basin_hits=hits)
