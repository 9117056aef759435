"""Mean-field flow of the urn model and its energy-descent structure.

The ODE is xdot = -x + pi(x) on the product simplex.  A linear change of
variables z_{iuv} = sum_{k != i} alpha*(x_u^k - x_v^k), indexed by ordered
vertex pairs, turns it into a symmetric-weight network dynamics
zdot = -z + W phi(z) + m whose energy

    L(z) = -1/2 phi(z)' W phi(z) + sum_mu IA(z_mu) - m sum_mu phi(z_mu)

decreases strictly along non-constant solutions (IA is the reinforcement
function's inverse-antiderivative).  The minus sign on the offset term is
what makes dL/dt = -sum_mu phi'(z_mu) G_mu(z)^2 hold everywhere; on the
antisymmetric image of the change of variables, sum_mu phi(z_mu) is
constant, so the sign choice only shifts L by a constant there.
Composing L with the change of variables yields the descent quantity
monitored along integrated trajectories.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .model import IntegrationError, ModelParams, SimplexPoint
from .pi_map import pairwise_advantages, pi_values

DRIFT_TOL = 1e-9     # per-step column-sum drift that forces a step rejection
MIN_STEP = 1e-6


def field_values(values: np.ndarray, params: ModelParams) -> np.ndarray:
    """-x + pi(x) on raw (..., d, c) arrays."""
    return pi_values(values, params) - np.asarray(values, dtype=float)


def field(x: SimplexPoint, params: ModelParams) -> np.ndarray:
    """Right-hand side of the mean-field ODE at x, shape (d, c).

    Column sums vanish (both x and pi(x) have unit column sums), and on the
    boundary the zero coordinates get the strictly positive pi component,
    so the field points inward.
    """
    return field_values(x.values, params)


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class Trajectory:
    """Stored samples of one integrated solution.

    ``states`` is (n_stored, d, c); states are renormalized each step, with
    the worst pre-renormalization defects recorded so simplex invariance
    can be audited after the fact.
    """

    times: np.ndarray
    states: np.ndarray
    h: float
    alpha: float
    x0: np.ndarray
    max_sum_drift: float
    min_coordinate: float
    n_halved_steps: int = 0

    @property
    def points(self) -> list[SimplexPoint]:
        return [SimplexPoint(s) for s in self.states]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _rk4_step(y: np.ndarray, h: float, params: ModelParams) -> np.ndarray:
    k1 = field_values(y, params)
    k2 = field_values(y + 0.5 * h * k1, params)
    k3 = field_values(y + 0.5 * h * k2, params)
    k4 = field_values(y + h * k3, params)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _advance(y: np.ndarray, h: float, params: ModelParams):
    """One nominal step of size h, halving on excessive column-sum drift.

    Returns (new state, sum drift, min coordinate, halvings).  Drift is
    measured before the clip + renormalization that keeps the state on the
    simplex exactly.
    """
    remaining = h
    sub = h
    drift_seen = 0.0
    min_seen = float(y.min())
    halvings = 0
    while remaining > 1e-15:
        sub = min(sub, remaining)
        trial = _rk4_step(y, sub, params)
        sums = trial.sum(axis=-2)
        drift = float(np.max(np.abs(sums - 1.0)))
        if drift >= DRIFT_TOL:
            sub *= 0.5
            halvings += 1
            if sub < MIN_STEP:
                raise IntegrationError(
                    f"column-sum drift {drift:.3e} persists at step size {sub:.3e}"
                )
            continue
        drift_seen = max(drift_seen, drift)
        min_seen = min(min_seen, float(trial.min()))
        trial = np.clip(trial, 0.0, None)
        trial = trial / trial.sum(axis=-2, keepdims=True)
        y = trial
        remaining -= sub
    return y, drift_seen, min_seen, halvings


def integrate_batch(
    x0_values: np.ndarray,
    params: ModelParams,
    t_end: float,
    h: float = 0.01,
    store_every: int = 10,
) -> list[Trajectory]:
    """Integrate a batch of starts (B, d, c) with one vectorized stepper.

    All trajectories share the time grid, so the whole batch advances in a
    single array; drift and negativity are tracked per trajectory.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    if store_every < 1:
        raise ValueError("store_every must be >= 1")
    y = np.array(x0_values, dtype=float)
    if y.ndim != 3:
        raise ValueError(f"expected (B, d, c) starts, got shape {y.shape}")
    n_steps = int(round(t_end / h)) if t_end > 0 else 0
    batch = y.shape[0]
    drift = np.zeros(batch)
    min_coord = y.min(axis=(1, 2))
    halved = np.zeros(batch, dtype=int)

    stored = [y.copy()]
    stored_t = [0.0]
    for k in range(1, n_steps + 1):
        trial = _rk4_step(y, h, params)
        sums = trial.sum(axis=1)
        step_drift = np.max(np.abs(sums - 1.0), axis=1)
        bad = step_drift >= DRIFT_TOL
        if np.any(bad):
            # rare path: redo the offending trajectories with halved sub-steps
            for b in np.where(bad)[0]:
                trial[b], step_drift[b], m, hv = _advance(y[b], h, params)
                min_coord[b] = min(min_coord[b], m)
                halved[b] += hv
        drift = np.maximum(drift, step_drift)
        min_coord = np.minimum(min_coord, trial.min(axis=(1, 2)))
        trial = np.clip(trial, 0.0, None)
        y = trial / trial.sum(axis=1, keepdims=True)
        if k % store_every == 0 or k == n_steps:
            stored.append(y.copy())
            stored_t.append(k * h)

    times = np.array(stored_t)
    states = np.array(stored)  # (n_stored, B, d, c)
    return [
        Trajectory(
            times=times,
            states=states[:, b],
            h=h,
            alpha=params.alpha,
            x0=np.array(x0_values[b], dtype=float),
            max_sum_drift=float(drift[b]),
            min_coordinate=float(min_coord[b]),
            n_halved_steps=int(halved[b]),
        )
        for b in range(batch)
    ]


def integrate(
    x0: SimplexPoint,
    params: ModelParams,
    t_end: float,
    h: float = 0.01,
    store_every: int = 10,
) -> Trajectory:
    """Classical fixed-step RK4 flow from x0, renormalized every step."""
    return integrate_batch(x0.values[None, :, :], params, t_end, h, store_every)[0]


# ---------------------------------------------------------------------------
# ordered-pair change of variables and the network energy


def hopfield_index(d: int, c: int) -> tuple:
    """Ordered index set: (colour, u, v) lexicographic with u != v."""
    return tuple((i, u, v) for i in range(c) for u in range(d) for v in range(d) if u != v)


@dataclass(frozen=True)
class HopfieldSystem:
    """Symmetric coupling weights and offset of the changed-variable system.

    Weight values are exactly 2*alpha/|E| (other colour, same ordered pair),
    alpha/|E| (other colour, one shared endpoint in the same slot), or 0.
    """

    lambda_index: tuple
    weights: np.ndarray
    m: float

    @property
    def size(self) -> int:
        return len(self.lambda_index)


def build_hopfield(params: ModelParams) -> HopfieldSystem:
    lam = hopfield_index(params.d, params.c)
    colours = np.array([t[0] for t in lam])
    us = np.array([t[1] for t in lam])
    vs = np.array([t[2] for t in lam])
    other_colour = colours[:, None] != colours[None, :]
    share_u = (us[:, None] == us[None, :]).astype(float)
    share_v = (vs[:, None] == vs[None, :]).astype(float)
    coef = params.alpha / params.n_edges
    weights = coef * other_colour * (share_u + share_v)
    weights.setflags(write=False)
    m = -coef * (params.d - 1) * (params.c - 1)
    return HopfieldSystem(lambda_index=lam, weights=weights, m=m)


def psi_values(values: np.ndarray, params: ModelParams) -> np.ndarray:
    """Changed variables z on raw (..., d, c) arrays -> (..., c*d*(d-1))."""
    adv = pairwise_advantages(values, params)
    lam = hopfield_index(params.d, params.c)
    us = np.array([t[1] for t in lam])
    vs = np.array([t[2] for t in lam])
    cols = np.array([t[0] for t in lam])
    return adv[..., us, vs, cols]


def psi(x: SimplexPoint, params: ModelParams) -> np.ndarray:
    """Linear change of variables z_{iuv} = sum_{k != i} alpha*(x_u^k - x_v^k)."""
    return psi_values(x.values, params)


def hopfield_field(z: np.ndarray, system: HopfieldSystem, phi) -> np.ndarray:
    """Network dynamics G(z) = -z + W phi(z) + m (batched over leading dims)."""
    z = np.asarray(z, dtype=float)
    p = phi.eval(z)
    return -z + p @ system.weights + system.m


def lyapunov(z: np.ndarray, system: HopfieldSystem, phi) -> float | np.ndarray:
    """Network energy; strictly decreasing along non-constant solutions.

    dL/dt along the field equals -sum_mu phi'(z_mu) G_mu(z)^2, which is the
    identity the finite-difference tests probe.
    """
    z = np.asarray(z, dtype=float)
    p = phi.eval(z)
    quad = -0.5 * np.einsum("...a,ab,...b->...", p, system.weights, p)
    ia = np.asarray(phi.inverse_antiderivative(z)).sum(axis=-1)
    out = quad + ia - system.m * p.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def lyapunov_on_simplex(
    x: SimplexPoint, params: ModelParams, system: HopfieldSystem | None = None
) -> float:
    """Energy after the change of variables; the descent quantity for the flow."""
    if system is None:
        system = build_hopfield(params)
    return float(lyapunov(psi_values(x.values, params), system, params.phi))


def lyapunov_along(
    states: np.ndarray, params: ModelParams, system: HopfieldSystem | None = None
) -> np.ndarray:
    """Energy sampled along an (n, d, c) array of states."""
    if system is None:
        system = build_hopfield(params)
    return np.asarray(lyapunov(psi_values(states, params), system, params.phi))


# ---------------------------------------------------------------------------
# trajectory CSV interface (consumed by the plot renderer)


def state_column_names(d: int, c: int) -> list[str]:
    """Colour-major column labels x_<colour>_<vertex>, 1-based."""
    return [f"x_{i + 1}_{u + 1}" for i in range(c) for u in range(d)]


def write_trajectory_csv(
    path,
    trajectory: Trajectory,
    params: ModelParams,
    header_comment: str | None = None,
) -> None:
    """Write t, the colour-major coordinates, and the energy column."""
    system = build_hopfield(params)
    lyap = lyapunov_along(trajectory.states, params, system)
    d, c = params.d, params.c
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", *state_column_names(d, c), "lyapunov"])
        for t, state, ell in zip(trajectory.times, trajectory.states, lyap):
            flat = state.T.reshape(-1)  # colour-major
            writer.writerow([repr(float(t)), *[repr(float(v)) for v in flat], repr(float(ell))])


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read back (times, states (n, d, c), lyapunov); skips # comment lines."""
    with open(path) as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(rows)
    header = next(reader)
    names = header[1:-1]
    colours = sorted({int(n.split("_")[1]) for n in names})
    vertices = sorted({int(n.split("_")[2]) for n in names})
    d, c = len(vertices), len(colours)
    times, states, lyap = [], [], []
    for row in reader:
        times.append(float(row[0]))
        flat = np.array([float(v) for v in row[1 : 1 + d * c]])
        states.append(flat.reshape(c, d).T)
        lyap.append(float(row[-1]))
    return np.array(times), np.array(states), np.array(lyap)
