"""Exact simulation of the discrete ball process.

Each step places one ball of every colour at every edge of the complete
graph; the ball at edge {u, v} lands at u with probability phi of the
cross-colour advantage of u, computed from the proportions at the step's
start.  One uniform variate is consumed per (edge, colour) in lexicographic
order, so a run is a pure function of (seed, params, n_steps).

Backends: a compiled kernel (built from ``_urn_kernel.pyx``) and a pure
Python fallback selected at import; both consume the same variate stream
and agree bit for bit for the logistic kernel.  ``benchmarks/`` compares
their throughput.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, SimplexPoint, UrnModelError
from .pi_map import pairwise_advantages, pi, pi_values
from . import _urn_python

try:
    from . import _urn_kernel
except ImportError:  # pragma: no cover - build-environment dependent
    _urn_kernel = None

HAVE_KERNEL = _urn_kernel is not None
_MAX_CHUNK = 16384          # steps of uniforms generated per RNG call
XI_ENUM_LIMIT = 20          # joint enumeration capped at 2**20 outcomes


@dataclass(frozen=True)
class UrnState:
    """Integer ball counts (d, c) at a given step."""

    balls: np.ndarray
    step: int

    def __post_init__(self):
        balls = np.array(self.balls, dtype=np.int64)
        balls.setflags(write=False)
        object.__setattr__(self, "balls", balls)


@dataclass(frozen=True)
class SimRun:
    """One reproducible run: seed, snapshots of proportions, final counts."""

    seed: int
    params: ModelParams
    snapshots: tuple          # ((step, SimplexPoint), ...)
    final_state: UrnState


def edge_list(d: int) -> list[tuple[int, int]]:
    """Unordered edges of the complete graph, lexicographic (u < v)."""
    return [(u, v) for u in range(d) for v in range(u + 1, d)]


def proportions(state: UrnState) -> SimplexPoint:
    """Colour proportions B_u^i / (per-colour total)."""
    totals = state.balls.sum(axis=0)
    if np.any(totals <= 0):
        raise UrnModelError(f"non-positive per-colour totals {totals.tolist()}")
    return SimplexPoint(state.balls / totals[None, :])


def placement_probabilities(values: np.ndarray, params: ModelParams) -> np.ndarray:
    """(|E|, c) table: probability the (edge, colour) ball goes to the edge's lower vertex."""
    adv = pairwise_advantages(values, params)
    edges = edge_list(params.d)
    us = np.array([e[0] for e in edges])
    vs = np.array([e[1] for e in edges])
    return np.asarray(params.phi.eval(adv[us, vs, :]), dtype=float)


def _select_backend(backend: str, params: ModelParams):
    """Return (module, phi-or-None for the generic path)."""
    is_logistic = params.phi.name == "logistic"
    if backend == "auto":
        backend = "compiled" if (HAVE_KERNEL and is_logistic) else "python"
    if backend == "compiled":
        if not HAVE_KERNEL:
            raise UrnModelError("compiled kernel not available; rebuild or use backend='python'")
        if not is_logistic:
            raise UrnModelError("compiled kernel only implements the logistic kernel")
        return _urn_kernel, None
    if backend == "python":
        return _urn_python, None if is_logistic else params.phi
    raise ValueError(f"unknown backend {backend!r}")


def _advance(module, phi_arg, balls, totals, params, edges_arr, colour_total0, uniforms, scratch):
    if module is _urn_python:
        _urn_python.simulate_chunk(
            balls, totals, params.alpha, colour_total0, params.n_edges, edges_arr, uniforms, phi=phi_arg
        )
    else:
        module.simulate_chunk(
            balls, totals, params.alpha, colour_total0, params.n_edges, edges_arr, uniforms, scratch
        )


def _colour_total(balls: np.ndarray) -> int:
    """Common per-colour total; the standing balance assumption must hold."""
    totals = balls.sum(axis=0)
    if np.any(totals != totals[0]):
        raise UrnModelError(f"per-colour totals {totals.tolist()} are not equal")
    return int(totals[0])


def step(state: UrnState, params: ModelParams, rng: np.random.Generator) -> UrnState:
    """One simultaneous placement step; consumes |E|*c uniforms from rng."""
    balls = np.array(state.balls, dtype=np.int64)
    totals = balls.sum(axis=1)
    edges_arr = np.array(edge_list(params.d), dtype=np.int64)
    uniforms = rng.random((1, params.n_edges, params.c))
    phi_arg = None if params.phi.name == "logistic" else params.phi
    _urn_python.simulate_chunk(
        balls, totals, params.alpha, _colour_total(state.balls), params.n_edges, edges_arr, uniforms, phi=phi_arg
    )
    return UrnState(balls=balls, step=state.step + 1)


def run(
    params: ModelParams,
    n_steps: int,
    seed: int,
    snapshot_every: int = 0,
    backend: str = "auto",
) -> SimRun:
    """Simulate n_steps from the configured initial counts.

    The generator is numpy's default (PCG64 seeded with ``seed``); chunking
    of the variate stream does not affect results.  ``snapshot_every`` > 0
    records proportions at every multiple (plus step 0 and the end).
    """
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    module, phi_arg = _select_backend(backend, params)
    rng = np.random.default_rng(seed)
    balls = params.initial_balls.astype(np.int64).copy()
    totals = balls.sum(axis=1)
    edges_arr = np.array(edge_list(params.d), dtype=np.int64)
    scratch = np.zeros((params.d, params.c), dtype=np.int64)

    marks = {0, n_steps}
    if snapshot_every > 0:
        marks.update(range(0, n_steps + 1, snapshot_every))
    snapshots = [(0, proportions(UrnState(balls, 0)))]

    colour_total = _colour_total(balls)
    current = 0
    for mark in sorted(m for m in marks if m > 0):
        while current < mark:
            size = min(_MAX_CHUNK, mark - current)
            uniforms = rng.random((size, params.n_edges, params.c))
            _advance(
                module, phi_arg, balls, totals, params, edges_arr,
                colour_total + current * params.n_edges, uniforms, scratch,
            )
            current += size
        snapshots.append((current, proportions(UrnState(balls, current))))

    return SimRun(
        seed=seed,
        params=params,
        snapshots=tuple(snapshots),
        final_state=UrnState(balls=balls, step=n_steps),
    )


def child_seeds(master_seed: int, n_runs: int) -> np.ndarray:
    """Per-run seeds: the n-th 64-bit word drawn from SeedSequence(master_seed).

    Recorded in batch outputs so any single run can be reproduced standalone
    via ``run(..., seed=child)``.
    """
    return np.random.SeedSequence(master_seed).generate_state(n_runs, dtype=np.uint64)


def run_batch(
    params: ModelParams,
    n_steps: int,
    n_runs: int,
    master_seed: int,
    snapshot_every: int = 0,
    backend: str = "auto",
) -> list[SimRun]:
    """Independent seeded runs; deterministic given master_seed."""
    return [
        run(params, n_steps, int(s), snapshot_every=snapshot_every, backend=backend)
        for s in child_seeds(master_seed, n_runs)
    ]


def gamma(n: int, params: ModelParams) -> float:
    """Step size of the equivalent stochastic-approximation recursion."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return 1.0 / (params.b0 / params.n_edges + n + 1)


def conditional_mean_xi(x: SimplexPoint, params: ModelParams) -> SimplexPoint:
    """Expected placement proportions given current proportions: exactly pi(x)."""
    return pi(x, params)


def enumerate_mean_xi(x: SimplexPoint, params: ModelParams) -> np.ndarray:
    """Brute-force oracle for :func:`conditional_mean_xi`.

    Enumerates every joint (edge, colour) placement outcome, weighting each
    by its product probability; independent of the map evaluation path.
    """
    edges = edge_list(params.d)
    n_draws = len(edges) * params.c
    if n_draws > XI_ENUM_LIMIT:
        raise ValueError(f"joint enumeration needs 2**{n_draws} outcomes; cap is 2**{XI_ENUM_LIMIT}")
    probs = placement_probabilities(x.values, params)
    mean = np.zeros((params.d, params.c))
    draws = [(e, i) for e in range(len(edges)) for i in range(params.c)]
    for outcome in itertools.product((0, 1), repeat=n_draws):
        weight = 1.0
        placed = np.zeros((params.d, params.c))
        for (e, i), to_lower in zip(draws, outcome):
            u, v = edges[e]
            if to_lower:
                weight *= probs[e, i]
                placed[u, i] += 1.0
            else:
                weight *= 1.0 - probs[e, i]
                placed[v, i] += 1.0
        mean += weight * placed
    return mean / params.n_edges


@dataclass(frozen=True)
class SaCheckReport:
    """Audit of the stochastic-approximation decomposition of a run."""

    n_steps_checked: int
    identity_max_residual: float
    identity_ok: bool
    xi_min: float
    xi_max: float
    xi_bound: float
    xi_in_bounds: bool
    mean_u: np.ndarray
    sigma_mean: np.ndarray
    max_z: float
    martingale_ok: bool
    n_replications: int

    @property
    def ok(self) -> bool:
        return self.identity_ok and self.xi_in_bounds and self.martingale_ok


def sa_decomposition_check(
    sim_run: SimRun,
    params: ModelParams,
    n_replications: int = 100_000,
    seed: int = 0,
) -> SaCheckReport:
    """Verify the increment decomposition X(n+1) - X(n) = gamma_n (F + U).

    (a) the one-step identity X(n+1) - X(n) = gamma_n (-X(n) + xi(n)) must
    hold to 1e-12 at every recorded step (snapshots must be consecutive,
    i.e. the run used snapshot_every=1); (b) the noise term has conditional
    mean zero, checked by Monte-Carlo at the frozen initial state against
    3-sigma bands from the exact Bernoulli variances; (c) each xi component
    lies in [0, (d-1)/|E|].
    """
    steps = [n for n, _ in sim_run.snapshots]
    if len(steps) < 2 or steps != list(range(steps[0], steps[-1] + 1)):
        raise ValueError("run must carry consecutive snapshots (snapshot_every=1)")
    n_edges = params.n_edges
    xi_bound = (params.d - 1) / n_edges

    worst = 0.0
    xi_min, xi_max = np.inf, -np.inf
    for (n, x), (_, x_next) in zip(sim_run.snapshots[:-1], sim_run.snapshots[1:]):
        balls_n = np.rint(x.values * (params.b0 + n * n_edges))
        balls_next = np.rint(x_next.values * (params.b0 + (n + 1) * n_edges))
        xi = (balls_next - balls_n) / n_edges
        xi_min = min(xi_min, float(xi.min()))
        xi_max = max(xi_max, float(xi.max()))
        g = gamma(n, params)
        resid = x_next.values - x.values - g * (-x.values + xi)
        worst = max(worst, float(np.max(np.abs(resid))))

    frozen = sim_run.snapshots[0][1]
    probs = placement_probabilities(frozen.values, params)
    edges = edge_list(params.d)
    rng = np.random.default_rng(seed)
    to_lower = rng.random((n_replications, n_edges, params.c)) < probs
    placed = np.zeros((n_replications, params.d, params.c))
    for e, (u, v) in enumerate(edges):
        placed[:, u, :] += to_lower[:, e, :]
        placed[:, v, :] += ~to_lower[:, e, :]
    mean_u = placed.mean(axis=0) / n_edges - pi_values(frozen.values, params)

    var_xi = np.zeros((params.d, params.c))
    bern = probs * (1.0 - probs)
    for e, (u, v) in enumerate(edges):
        var_xi[u, :] += bern[e, :]
        var_xi[v, :] += bern[e, :]
    sigma_mean = np.sqrt(var_xi / n_replications) / n_edges
    max_z = float(np.max(np.abs(mean_u) / sigma_mean))

    return SaCheckReport(
        n_steps_checked=len(steps) - 1,
        identity_max_residual=worst,
        identity_ok=worst < 1e-12,
        xi_min=xi_min,
        xi_max=xi_max,
        xi_bound=xi_bound,
        xi_in_bounds=xi_min >= 0.0 and xi_max <= xi_bound + 1e-15,
        mean_u=mean_u,
        sigma_mean=sigma_mean,
        max_z=max_z,
        martingale_ok=max_z <= 3.0,
        n_replications=n_replications,
    )
