"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s`.  Monte-Carlo criteria use
committed master seeds so the whole suite is deterministic.
"""

import math
import time

import numpy as np
import pytest

from urnfield import dynamics as dyn
from urnfield import fixed_points as fp
from urnfield import pi_map, urn
from urnfield.model import ModelParams, SimplexPoint, random_simplex_values

GOLDEN_ALPHA = (615.0 / 182.0) * math.log(9.0)
GOLDEN_BASE = [23.0 / 615.0, 1.0 / 3.0, 129.0 / 205.0, 23.0 / 615.0, 1.0 / 3.0, 129.0 / 205.0]
GOLDEN_M_UNIT = np.array(
    [
        [8577.0 / 84050.0, -9.0 / 100.0, -81.0 / 6724.0],
        [-9.0 / 100.0, 9.0 / 50.0, -9.0 / 100.0],
        [-81.0 / 6724.0, -9.0 / 100.0, 8577.0 / 84050.0],
    ]
)

MASTER_SEED_SMALL_ALPHA = 20260810
MASTER_SEED_LARGE_ALPHA = 424242
FLOW_SEED = 1618
FP_SEARCH_SEED = 271828


def report(criterion, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def flow_bundle():
    """100 RK4 trajectories per alpha (h=0.01, t_end=50), shared by criteria 5 and 6."""
    bundle = {}
    for alpha in (0.75, GOLDEN_ALPHA):
        params = ModelParams.uniform(3, 2, alpha)
        rng = np.random.default_rng(FLOW_SEED)
        starts = np.array([random_simplex_values(3, 2, rng) for _ in range(100)])
        trajs = dyn.integrate_batch(starts, params, t_end=50.0, h=0.01, store_every=1)
        bundle[alpha] = (params, trajs)
    return bundle


def test_criterion_1_golden_suite():
    t0 = time.perf_counter()
    params = ModelParams.uniform(3, 2, GOLDEN_ALPHA)
    base = SimplexPoint.from_flat(GOLDEN_BASE, 3, 2)
    points = fp.permutation_orbit(base, params)
    assert len(points) == 6

    residual = max(
        float(np.max(np.abs(pi_map.pi(p, params).values - p.values))) for p in points
    )
    jac = pi_map.pi_jacobian(base, params)
    m_err = float(np.max(np.abs(jac[0:3, 3:6] - (params.alpha / 3.0) * GOLDEN_M_UNIT)))
    z = dyn.psi(base, params)
    ln9 = math.log(9.0)
    z_err = float(np.max(np.abs(np.array([z[0], z[1], z[3]]) - [-ln9, -2 * ln9, -ln9])))
    eig = np.sort(np.linalg.eigvalsh(jac[0:3, 3:6]))
    eig_err = float(np.max(np.abs(eig - [0.0, 0.28, 0.66])))
    rho = max(pi_map.spectral_radius(pi_map.pi_jacobian(p, params)) for p in points)
    golden = fp.verify_example1()
    elapsed = time.perf_counter() - t0

    ok = (
        residual < 1e-12
        and m_err < 1e-12
        and z_err < 1e-12
        and eig_err < 0.01
        and rho < 1.0
        and golden.passed
        and elapsed < 1.0
    )
    report(
        1,
        ok,
        f"residual {residual:.2e}, block err {m_err:.2e}, z err {z_err:.2e}, "
        f"eig err {eig_err:.3f}, max rho {rho:.4f}, {elapsed:.2f}s < 1s",
    )


def test_criterion_2_contraction_regime():
    t0 = time.perf_counter()
    params = ModelParams.uniform(3, 2, 0.75)
    bound = pi_map.l1_norm_bound(params)
    contraction = pi_map.is_contraction_regime(params)

    search = fp.multi_start_search(params, n_starts=100, seed=FP_SEARCH_SEED)
    unique_centre = len(search.records) == 1 and bool(
        np.max(np.abs(search.records[0].point.flat - 1.0 / 3.0)) < 1e-10
    )

    rng = np.random.default_rng(FP_SEARCH_SEED)
    worst = max(
        pi_map.max_column_l1(pi_map.jacobian_values(random_simplex_values(3, 2, rng), params))
        for _ in range(1000)
    )
    elapsed = time.perf_counter() - t0

    ok = bound == 0.25 and contraction and unique_centre and worst <= 0.25 + 1e-12 and elapsed < 5.0
    report(
        2,
        ok,
        f"bound {bound}, unique fixed point {unique_centre}, "
        f"sampled max column l1 {worst:.6f} <= 0.25, {elapsed:.2f}s < 5s",
    )


def test_criterion_3_monte_carlo_small_alpha():
    t0 = time.perf_counter()
    params = ModelParams.uniform(3, 2, 0.75)
    runs = urn.run_batch(params, 100_000, n_runs=100, master_seed=MASTER_SEED_SMALL_ALPHA)
    finals = np.array([urn.proportions(r.final_state).flat for r in runs])
    dists = np.max(np.abs(finals - 1.0 / 3.0), axis=1)
    n_close = int((dists < 0.02).sum())
    elapsed = time.perf_counter() - t0

    ok = n_close >= 95 and elapsed < 120.0
    report(3, ok, f"{n_close}/100 runs within 0.02 of the centre (max {dists.max():.4f}), {elapsed:.1f}s < 120s")


def test_criterion_4_monte_carlo_large_alpha():
    t0 = time.perf_counter()
    params = ModelParams.uniform(3, 2, GOLDEN_ALPHA)
    search = fp.multi_start_search(params, n_starts=500, seed=FP_SEARCH_SEED)
    fp_flats = np.array([rec.point.flat for rec in search.records])

    runs = urn.run_batch(params, 100_000, n_runs=200, master_seed=MASTER_SEED_LARGE_ALPHA)
    finals = np.array([urn.proportions(r.final_state).flat for r in runs])
    all_dists = np.max(np.abs(finals[:, None, :] - fp_flats[None, :, :]), axis=2)
    nearest = np.argmin(all_dists, axis=1)
    dist = all_dists[np.arange(len(runs)), nearest]
    n_close = int((dist < 0.05).sum())

    # hit counts over the six stable points
    stable = [
        i
        for i, rec in enumerate(search.records)
        if rec.classification == "stable"
        and any(np.max(np.abs(rec.point.flat - g.flat)) < 1e-7 for g in fp.golden_points())
    ]
    counts = {i: int(np.sum((nearest == i) & (dist < 0.05))) for i in stable}
    elapsed = time.perf_counter() - t0

    ok = len(stable) == 6 and n_close >= 180 and elapsed < 300.0
    report(
        4,
        ok,
        f"{n_close}/200 runs within 0.05 of a computed fixed point (>= 180 required); "
        f"hit counts over the six stable points {sorted(counts.values())}, {elapsed:.1f}s < 300s",
    )


def test_criterion_5_energy_descent(flow_bundle):
    t0 = time.perf_counter()
    worst_increase = -np.inf
    for alpha, (params, trajs) in flow_bundle.items():
        system = dyn.build_hopfield(params)
        for traj in trajs:
            values = dyn.lyapunov_along(traj.states, params, system)
            worst_increase = max(worst_increase, float(np.diff(values).max()))

    params = ModelParams.uniform(3, 2, GOLDEN_ALPHA)
    system = dyn.build_hopfield(params)
    rng = np.random.default_rng(FLOW_SEED)
    step = 1e-5
    worst_identity = 0.0
    for _ in range(100):
        z = rng.uniform(-10, 10, system.size)
        g = dyn.hopfield_field(z, system, params.phi)
        fd = (
            dyn.lyapunov(z + step * g, system, params.phi)
            - dyn.lyapunov(z - step * g, system, params.phi)
        ) / (2 * step)
        worst_identity = max(worst_identity, abs(fd + np.sum(params.phi.deriv(z) * g**2)))
    elapsed = time.perf_counter() - t0

    ok = worst_increase <= 1e-9 and worst_identity < 1e-6 and elapsed < 60.0
    report(
        5,
        ok,
        f"max per-step energy increase {worst_increase:.2e} <= 1e-9 over 200 trajectories; "
        f"derivative identity defect {worst_identity:.2e} < 1e-6, {elapsed:.1f}s < 60s",
    )


def test_criterion_6_simplex_invariance(flow_bundle):
    min_coord = math.inf
    max_drift = 0.0
    for alpha, (params, trajs) in flow_bundle.items():
        min_coord = min(min_coord, min(t.min_coordinate for t in trajs))
        max_drift = max(max_drift, max(t.max_sum_drift for t in trajs))
    ok = min_coord >= -1e-12 and max_drift < 1e-9
    report(
        6,
        ok,
        f"pre-renormalization min coordinate {min_coord:.2e} >= -1e-12, "
        f"max column-sum drift {max_drift:.2e} < 1e-9",
    )


def test_criterion_7_stochastic_approximation_oracle():
    t0 = time.perf_counter()
    params = ModelParams.uniform(3, 2, 0.75)
    sim = urn.run(params, 10_000, seed=MASTER_SEED_SMALL_ALPHA, snapshot_every=1)
    sa = urn.sa_decomposition_check(sim, params, n_replications=100_000, seed=MASTER_SEED_SMALL_ALPHA)

    rng = np.random.default_rng(MASTER_SEED_SMALL_ALPHA)
    worst_enum = 0.0
    for _ in range(20):
        x = SimplexPoint(random_simplex_values(3, 2, rng))
        worst_enum = max(
            worst_enum,
            float(np.max(np.abs(urn.enumerate_mean_xi(x, params) - pi_map.pi(x, params).values))),
        )
    elapsed = time.perf_counter() - t0

    ok = (
        sa.identity_ok
        and sa.identity_max_residual < 1e-12
        and worst_enum < 1e-12
        and sa.martingale_ok
        and sa.xi_in_bounds
        and elapsed < 60.0
    )
    report(
        7,
        ok,
        f"identity residual {sa.identity_max_residual:.2e} over {sa.n_steps_checked} steps; "
        f"enumeration defect {worst_enum:.2e}; frozen-state max |mean U|/sigma {sa.max_z:.2f} <= 3, "
        f"{elapsed:.1f}s < 60s",
    )


def _fd_jacobian(values, params, step=1e-6):
    """Central-difference oracle, independent of the analytic entry formula."""
    d, c = params.d, params.c
    jac = np.zeros((d * c, d * c))
    for j in range(c):
        for v in range(d):
            bumped = values.copy()
            bumped[v, j] += step
            plus = pi_map.pi_values(bumped, params)
            bumped[v, j] -= 2 * step
            minus = pi_map.pi_values(bumped, params)
            jac[:, j * d + v] = ((plus - minus) / (2 * step)).T.reshape(-1)
    return jac


def test_criterion_8_jacobian_finite_differences():
    rng = np.random.default_rng(FP_SEARCH_SEED)
    worst = 0.0
    combos = [(2, 2), (3, 2), (3, 3), (4, 3)]
    for d, c in combos:
        for _ in range(25):
            params = ModelParams.uniform(d, c, rng.uniform(-5, 5))
            values = random_simplex_values(d, c, rng)
            defect = np.max(
                np.abs(pi_map.jacobian_values(values, params) - _fd_jacobian(values, params))
            )
            worst = max(worst, float(defect))
    ok = worst < 1e-6
    report(8, ok, f"max |analytic - central differences| {worst:.2e} < 1e-6 at 100 points across {combos}")
