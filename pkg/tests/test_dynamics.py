import numpy as np
import pytest

from urnfield import dynamics as dyn
from urnfield.dynamics import (
    build_hopfield,
    field,
    field_values,
    hopfield_field,
    hopfield_index,
    integrate,
    integrate_batch,
    lyapunov,
    lyapunov_along,
    lyapunov_on_simplex,
    psi,
    psi_values,
    read_trajectory_csv,
    write_trajectory_csv,
)
from urnfield.fixed_points import golden_params, golden_points
from urnfield.model import ModelParams, SimplexPoint, random_simplex_values
from urnfield.pi_map import pi_values

GOLDEN_BASE = [23.0 / 615.0, 1.0 / 3.0, 129.0 / 205.0, 23.0 / 615.0, 1.0 / 3.0, 129.0 / 205.0]


def test_field_vanishes_at_the_centre():
    params = ModelParams.uniform(3, 2, 0.75)
    np.testing.assert_allclose(field(SimplexPoint.uniform(3, 2), params), 0.0, atol=1e-15)


def test_field_column_sums_vanish():
    rng = np.random.default_rng(1)
    for _ in range(50):
        params = ModelParams.uniform(3, 2, rng.uniform(-8, 8))
        f = field_values(random_simplex_values(3, 2, rng), params)
        assert np.max(np.abs(f.sum(axis=0))) < 1e-12


def test_field_points_inward_on_the_boundary():
    params = golden_params()
    values = np.array([[0.0, 0.6], [0.4, 0.0], [0.6, 0.4]])
    f = field_values(values, params)
    assert f[0, 0] > 0.0 and f[1, 1] > 0.0
    assert f[0, 0] == pytest.approx(pi_values(values, params)[0, 0])


# ---------------------------------------------------------------------------
# integration


def test_constant_trajectory_at_the_centre():
    params = ModelParams.uniform(3, 2, 0.75)
    traj = integrate(SimplexPoint.uniform(3, 2), params, t_end=5.0, h=0.01)
    np.testing.assert_allclose(traj.states, 1.0 / 3.0, atol=1e-13)
    assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(5.0)


def test_flow_reaches_the_unique_attractor():
    params = ModelParams.uniform(3, 2, 0.75)
    rng = np.random.default_rng(2)
    traj = integrate(SimplexPoint(random_simplex_values(3, 2, rng)), params, t_end=50.0, h=0.01)
    assert np.max(np.abs(traj.final - 1.0 / 3.0)) < 1e-6


def test_flow_settles_on_the_nearby_stable_point():
    params = golden_params()
    rng = np.random.default_rng(3)
    target = np.array(GOLDEN_BASE).reshape(2, 3).T
    start = np.clip(target + rng.normal(scale=0.01, size=(3, 2)), 1e-4, None)
    start = start / start.sum(axis=0)
    traj = integrate(SimplexPoint(start), params, t_end=50.0, h=0.01)
    assert np.max(np.abs(traj.final - target)) < 1e-6


def test_trajectory_records_drift_and_negativity():
    params = golden_params()
    rng = np.random.default_rng(4)
    trajs = integrate_batch(
        np.array([random_simplex_values(3, 2, rng) for _ in range(10)]), params, 10.0, 0.01
    )
    for traj in trajs:
        assert traj.max_sum_drift < 1e-9
        assert traj.min_coordinate >= -1e-12


def test_boundary_adjacent_starts_stay_in_the_simplex():
    params = golden_params()
    rng = np.random.default_rng(5)
    starts = []
    for _ in range(10):
        v = random_simplex_values(3, 2, rng)
        v[np.unravel_index(v.argmin(), v.shape)] = 1e-6
        starts.append(v / v.sum(axis=0))
    for traj in integrate_batch(np.array(starts), params, 20.0, 0.01):
        assert traj.min_coordinate >= -1e-12


def test_integration_argument_validation():
    params = ModelParams.uniform(2, 2, 0.1)
    x0 = SimplexPoint.uniform(2, 2)
    with pytest.raises(ValueError):
        integrate(x0, params, t_end=1.0, h=0.0)
    with pytest.raises(ValueError):
        integrate(x0, params, t_end=-1.0, h=0.01)
    with pytest.raises(ValueError):
        integrate(x0, params, t_end=1.0, h=0.01, store_every=0)


def test_store_every_keeps_endpoints():
    params = ModelParams.uniform(2, 2, 0.1)
    traj = integrate(SimplexPoint.uniform(2, 2), params, t_end=0.55, h=0.01, store_every=10)
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(0.55)


# ---------------------------------------------------------------------------
# change of variables


def test_psi_vanishes_at_the_centre():
    params = golden_params()
    np.testing.assert_array_equal(psi(SimplexPoint.uniform(3, 2), params), 0.0)


def test_psi_values_at_the_golden_point():
    params = golden_params()
    z = psi(SimplexPoint.from_flat(GOLDEN_BASE, 3, 2), params)
    ln9 = np.log(9.0)
    np.testing.assert_allclose([z[0], z[1], z[3]], [-ln9, -2.0 * ln9, -ln9], atol=1e-12)


def test_psi_antisymmetry():
    params = golden_params()
    rng = np.random.default_rng(6)
    lam = hopfield_index(3, 2)
    pos = {t: k for k, t in enumerate(lam)}
    for _ in range(20):
        z = psi_values(random_simplex_values(3, 2, rng), params)
        for (i, u, v) in lam:
            assert z[pos[(i, u, v)]] == pytest.approx(-z[pos[(i, v, u)]], abs=1e-15)


# ---------------------------------------------------------------------------
# weight system


def test_weight_table_values():
    params = golden_params()
    system = build_hopfield(params)
    lam = system.lambda_index
    pos = {t: k for k, t in enumerate(lam)}
    w = system.weights
    a = params.alpha / 3.0
    assert w[pos[(0, 0, 1)], pos[(1, 0, 1)]] == pytest.approx(2.0 * a, abs=0)
    assert w[pos[(0, 0, 1)], pos[(1, 0, 2)]] == pytest.approx(a, abs=0)     # shares u only
    assert w[pos[(0, 0, 1)], pos[(1, 2, 1)]] == pytest.approx(a, abs=0)     # shares v only
    assert w[pos[(0, 0, 1)], pos[(1, 2, 0)]] == 0.0                          # disjoint slots
    assert w[pos[(0, 0, 1)], pos[(0, 0, 2)]] == 0.0                          # same colour
    assert system.m == pytest.approx(-a * 2.0 * 1.0, abs=0)
    assert len(lam) == 2 * 3 * 2  # c * d * (d-1)


def test_weight_table_is_symmetric_and_three_valued():
    for d, c in [(3, 2), (4, 3)]:
        params = ModelParams.uniform(d, c, 1.3)
        system = build_hopfield(params)
        np.testing.assert_array_equal(system.weights, system.weights.T)
        coef = params.alpha / params.n_edges
        allowed = {0.0, coef, 2.0 * coef}
        assert set(np.unique(system.weights)) <= allowed


def test_network_field_is_zero_when_everything_vanishes():
    params = ModelParams.uniform(3, 2, 0.0)
    system = build_hopfield(params)
    np.testing.assert_array_equal(system.weights, 0.0)
    assert system.m == 0.0
    np.testing.assert_array_equal(hopfield_field(np.zeros(system.size), system, params.phi), 0.0)


def test_network_field_matches_the_pushed_forward_flow():
    # psi is linear, so the changed variables evolve by G exactly when x
    # evolves by the mean-field ODE: G(psi(x)) == psi(F(x))
    params = golden_params()
    system = build_hopfield(params)
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = random_simplex_values(3, 2, rng)
        lhs = hopfield_field(psi_values(x, params), system, params.phi)
        rhs = psi_values(field_values(x, params), params)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_network_field_derivative_along_a_trajectory():
    # central differences of z(t) against G(z(t)), fine step for the oracle
    params = golden_params()
    system = build_hopfield(params)
    h = 2e-4
    x0 = SimplexPoint(random_simplex_values(3, 2, np.random.default_rng(8)))
    traj = integrate(x0, params, t_end=0.5, h=h, store_every=1)
    z = psi_values(traj.states, params)
    g = hopfield_field(z, system, params.phi)
    fd = (z[2:] - z[:-2]) / (2.0 * h)
    assert np.max(np.abs(fd - g[1:-1])) < 1e-6


def test_network_field_vanishes_at_fixed_points():
    params = golden_params()
    system = build_hopfield(params)
    for point in golden_points():
        g = hopfield_field(psi(point, params), system, params.phi)
        assert np.max(np.abs(g)) < 1e-10


# ---------------------------------------------------------------------------
# energy function


def test_energy_closed_form_at_zero():
    params = ModelParams.uniform(3, 2, 0.0)
    system = build_hopfield(params)
    expected = system.size * (0.5 * np.log(0.5) + 0.5 * np.log(0.5))
    assert lyapunov(np.zeros(system.size), system, params.phi) == pytest.approx(expected, abs=1e-12)


def test_energy_derivative_identity_at_random_points():
    params = golden_params()
    system = build_hopfield(params)
    phi = params.phi
    rng = np.random.default_rng(9)
    step = 1e-5
    for _ in range(100):
        z = rng.uniform(-10, 10, system.size)
        g = hopfield_field(z, system, phi)
        fd = (lyapunov(z + step * g, system, phi) - lyapunov(z - step * g, system, phi)) / (2 * step)
        assert abs(fd + np.sum(phi.deriv(z) * g**2)) < 1e-6


def test_energy_decreases_along_trajectories():
    rng = np.random.default_rng(10)
    for alpha in (0.75, golden_params().alpha):
        params = ModelParams.uniform(3, 2, alpha)
        system = build_hopfield(params)
        starts = np.array([random_simplex_values(3, 2, rng) for _ in range(20)])
        for traj in integrate_batch(starts, params, 50.0, 0.01, store_every=1):
            values = lyapunov_along(traj.states, params, system)
            increases = np.diff(values)
            assert increases.max() <= 1e-9
            # strict decrease while the field is appreciably nonzero
            moving = np.max(np.abs(field_values(traj.states[:-1], params)), axis=(1, 2)) > 1e-6
            assert np.all(increases[moving] < 0.0)


def test_energy_composition_identity():
    params = golden_params()
    system = build_hopfield(params)
    rng = np.random.default_rng(11)
    for _ in range(100):
        x = SimplexPoint(random_simplex_values(3, 2, rng))
        assert lyapunov_on_simplex(x, params, system) == lyapunov(psi(x, params), system, params.phi)


def test_energy_equal_at_all_six_golden_points():
    params = golden_params()
    system = build_hopfield(params)
    values = [lyapunov_on_simplex(p, params, system) for p in golden_points()]
    assert max(values) - min(values) < 1e-12


def test_equilibrium_correspondence_between_modules():
    # ||F(x)||_inf < 1e-10 iff the map residual is < 1e-10 (same object)
    params = golden_params()
    for point in golden_points():
        f = np.max(np.abs(field_values(point.values, params)))
        r = np.max(np.abs(pi_values(point.values, params) - point.values))
        assert (f < 1e-10) == (r < 1e-10) == True  # noqa: E712


# ---------------------------------------------------------------------------
# CSV interface


def test_trajectory_csv_roundtrip(tmp_path):
    params = golden_params()
    traj = integrate(
        SimplexPoint(random_simplex_values(3, 2, np.random.default_rng(12))), params, 2.0, 0.01
    )
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, traj, params, header_comment="config_sha256=deadbeef")
    text = path.read_text().splitlines()
    assert text[0] == "# config_sha256=deadbeef"
    assert text[1] == "t,x_1_1,x_1_2,x_1_3,x_2_1,x_2_2,x_2_3,lyapunov"

    times, states, lyap = read_trajectory_csv(path)
    np.testing.assert_array_equal(times, traj.times)
    np.testing.assert_array_equal(states, traj.states)
    np.testing.assert_array_equal(lyap, lyapunov_along(traj.states, params))
