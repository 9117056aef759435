"""Domain types shared by the whole engine.

A model is a complete graph on ``d`` vertices, each vertex holding an urn
with balls in ``c`` colours.  States of the colour-proportion process live
on the product simplex: a ``(d, c)`` array with non-negative entries whose
columns (colours) each sum to one.  Flattened vectors are always
colour-major, i.e. flat index = colour * d + vertex.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import expit, xlogy

SUM_TOL = 1e-12       # column sums accepted as exactly 1 below this
RENORM_TOL = 1e-9     # violations up to here are renormalized with a warning
H2_TOL = 1e-12        # accepted antisymmetry defect of a reinforcement function


class UrnModelError(Exception):
    """Base class for engine errors."""


class SimplexError(UrnModelError):
    """Raised when an array is too far from the product simplex."""


class IntegrationError(UrnModelError):
    """Raised when the ODE integrator cannot keep the simplex constraint."""


class NumericsError(UrnModelError):
    """Raised when a dense linear-algebra routine fails to converge."""


# ---------------------------------------------------------------------------
# reinforcement functions


@dataclass(frozen=True)
class ReinforcementFunction:
    """Placement-probability kernel t -> (0, 1).

    Required properties (sampled, never proven): 0 < deriv(t) <= deriv_sup
    everywhere, and eval(t) + eval(-t) = 1.  ``inverse_antiderivative(z)``
    is the integral of the inverse function up to eval(z); it enters the
    energy function of :mod:`urnfield.dynamics` and is only meaningful up
    to an additive constant.

    All callables must accept and broadcast over ndarrays.
    """

    eval: Callable
    deriv: Callable
    deriv_sup: float
    inverse_antiderivative: Callable
    name: str = "custom"

    def __call__(self, t):
        return self.eval(t)


def logistic() -> ReinforcementFunction:
    """Standard logistic kernel 1 / (1 + exp(-t)).

    Its slope is eval * (1 - eval) with exact supremum 1/4, and the
    inverse-antiderivative has the closed form p*log(p) + (1-p)*log(1-p)
    at p = eval(z) (negative binary entropy, base point eval(0) = 1/2).
    """

    def _eval(t):
        return expit(t)

    def _deriv(t):
        # expit(t)*expit(-t) stays accurate in both tails
        return expit(t) * expit(-np.asarray(t))

    def _inv_antideriv(z):
        p = expit(z)
        return xlogy(p, p) + xlogy(1.0 - p, 1.0 - p)

    return ReinforcementFunction(
        eval=_eval,
        deriv=_deriv,
        deriv_sup=0.25,
        inverse_antiderivative=_inv_antideriv,
        name="logistic",
    )


def _bisect_inverse(f: Callable, target: float, tol: float = 1e-13) -> float:
    """Invert a strictly increasing scalar function by bracket doubling + bisection."""
    lo, hi = -1.0, 1.0
    while f(lo) > target:
        lo *= 2.0
        if lo < -1e9:
            raise NumericsError(f"could not bracket inverse at {target}")
    while f(hi) < target:
        hi *= 2.0
        if hi > 1e9:
            raise NumericsError(f"could not bracket inverse at {target}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _adaptive_simpson(f, a, b, tol):
    def simpson(a, b, fa, fm, fb):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(a, m, fa, flm, fm)
        right = simpson(m, b, fm, frm, fb)
        if depth > 40 or abs(left + right - whole) < 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + recurse(
            m, b, fm, frm, fb, right, 0.5 * tol, depth + 1
        )

    if a == b:
        return 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 0)


def make_reinforcement(
    eval: Callable,
    deriv: Callable,
    deriv_sup: float,
    inverse_antiderivative: Callable | None = None,
    name: str = "custom",
) -> ReinforcementFunction:
    """Build a reinforcement function from user callables.

    When ``inverse_antiderivative`` is omitted it is computed numerically:
    adaptive Simpson quadrature (tolerance 1e-10) of the bisection inverse
    of ``eval``, integrated from the fixed base point eval(0) = 1/2.  The
    additive constant this choice pins down is irrelevant downstream.
    """
    if inverse_antiderivative is None:
        ev = eval

        def _scalar_ia(z: float) -> float:
            return _adaptive_simpson(
                lambda eta: _bisect_inverse(ev, eta), 0.5, float(ev(z)), 1e-10
            )

        def inverse_antiderivative(z):
            return np.vectorize(_scalar_ia, otypes=[float])(z)

    return ReinforcementFunction(
        eval=eval,
        deriv=deriv,
        deriv_sup=float(deriv_sup),
        inverse_antiderivative=inverse_antiderivative,
        name=name,
    )


def check_h2(phi: ReinforcementFunction, samples) -> float:
    """Worst antisymmetry defect max |phi(t) + phi(-t) - 1| over the samples.

    The identity cannot be verified over all of R, so callers probe it on a
    grid; the check passes when the returned value is below ``H2_TOL``.
    """
    t = np.asarray(samples, dtype=float)
    if t.size == 0:
        raise ValueError("check_h2 needs at least one sample")
    return float(np.max(np.abs(phi.eval(t) + phi.eval(-t) - 1.0)))


# ---------------------------------------------------------------------------
# model parameters


@dataclass(frozen=True)
class ModelParams:
    """Complete-graph urn model: size, colours, reinforcement, initial balls.

    ``initial_balls`` is (d, c), rows = vertices, columns = colours.  The
    standing assumption is one common per-colour total b0; call
    :func:`validate_params` to check it (constructors do not raise so the
    validator can report every violation at once).
    """

    d: int
    c: int
    alpha: float
    phi: ReinforcementFunction
    initial_balls: np.ndarray

    def __post_init__(self):
        balls = np.array(self.initial_balls, dtype=np.int64)
        balls.setflags(write=False)
        object.__setattr__(self, "initial_balls", balls)

    @classmethod
    def uniform(cls, d: int, c: int, alpha: float, phi: ReinforcementFunction | None = None):
        """Model with one ball of every colour in every urn."""
        if phi is None:
            phi = logistic()
        return cls(d=d, c=c, alpha=alpha, phi=phi, initial_balls=np.ones((d, c), dtype=np.int64))

    @property
    def n_edges(self) -> int:
        return self.d * (self.d - 1) // 2

    @property
    def b0(self) -> int:
        """Common per-colour initial total (meaningful once validated)."""
        return int(self.initial_balls[:, 0].sum())


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    errors: tuple

    def __bool__(self):
        return self.ok


def validate_params(params: ModelParams) -> ValidationReport:
    """Check every ModelParams invariant; the report lists all violations."""
    errors = []
    if params.d < 2 or params.c < 2:
        errors.append(f"degenerate model: need d >= 2 and c >= 2, got d={params.d}, c={params.c}")
    balls = np.asarray(params.initial_balls)
    if balls.shape != (params.d, params.c):
        errors.append(f"initial_balls shape {balls.shape} does not match (d, c)=({params.d}, {params.c})")
    else:
        if np.any(balls < 1):
            errors.append("every initial ball count must be >= 1")
        totals = balls.sum(axis=0)
        if np.any(totals != totals[0]):
            errors.append(f"unbalanced initial colours: per-colour totals {totals.tolist()} differ")
    if not callable(params.phi.eval) or not callable(params.phi.deriv):
        errors.append("phi must provide callable eval and deriv")
    return ValidationReport(ok=not errors, errors=tuple(errors))


def ensure_valid(params: ModelParams) -> ModelParams:
    """Raise UrnModelError (listing every violation) unless params validate."""
    report = validate_params(params)
    if not report.ok:
        raise UrnModelError("; ".join(report.errors))
    return params


# ---------------------------------------------------------------------------
# simplex states


def to_flat(values: np.ndarray) -> np.ndarray:
    """(..., d, c) -> (..., d*c) colour-major flattening."""
    values = np.asarray(values)
    d, c = values.shape[-2:]
    return np.swapaxes(values, -1, -2).reshape(values.shape[:-2] + (d * c,))


def from_flat(flat: np.ndarray, d: int, c: int) -> np.ndarray:
    """Inverse of :func:`to_flat`."""
    flat = np.asarray(flat, dtype=float)
    return np.swapaxes(flat.reshape(flat.shape[:-1] + (c, d)), -1, -2)


@dataclass(frozen=True)
class SimplexPoint:
    """A point of the product simplex, validated on construction.

    Column sums may deviate from 1 (and entries dip below 0) by at most
    ``RENORM_TOL``; such inputs are clipped/renormalized with a warning.
    Beyond that the constructor raises, which is the error path the map
    evaluations rely on.  ODE round-off sits far below the warning band.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2:
            raise SimplexError(f"expected a (d, c) array, got shape {vals.shape}")
        worst_neg = float(min(vals.min(initial=0.0), 0.0))
        sums = vals.sum(axis=0)
        worst_sum = float(np.max(np.abs(sums - 1.0)))
        if worst_neg < -RENORM_TOL or worst_sum > RENORM_TOL:
            raise SimplexError(
                f"not a simplex point: worst column-sum defect {worst_sum:.3e}, "
                f"most negative entry {worst_neg:.3e}"
            )
        if worst_neg < 0.0 or worst_sum > SUM_TOL:
            warnings.warn(
                f"renormalized simplex point (sum defect {worst_sum:.2e}, "
                f"min entry {worst_neg:.2e})",
                stacklevel=2,
            )
            vals = np.clip(vals, 0.0, None)
            vals = vals / vals.sum(axis=0)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def uniform(cls, d: int, c: int) -> "SimplexPoint":
        return cls(np.full((d, c), 1.0 / d))

    @classmethod
    def from_flat(cls, flat, d: int, c: int) -> "SimplexPoint":
        return cls(from_flat(np.asarray(flat, dtype=float), d, c))

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def c(self) -> int:
        return self.values.shape[1]

    @property
    def flat(self) -> np.ndarray:
        """Colour-major flat view (x_1^1, ..., x_d^1, ..., x_1^c, ..., x_d^c)."""
        return to_flat(self.values)


def random_simplex_values(d: int, c: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform (flat Dirichlet) sample of the product simplex, one column per colour."""
    out = np.empty((d, c))
    for i in range(c):
        out[:, i] = rng.dirichlet(np.ones(d))
    return out
