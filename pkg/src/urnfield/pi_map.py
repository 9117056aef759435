"""The reinforcement map, its Jacobian, and the contraction-regime test.

The map sends a simplex point x to the expected proportion of freshly
placed balls: component (u, i) averages, over the d-1 edges at vertex u,
the placement probability phi of the accumulated cross-colour advantage
of u over the opposing vertex.  Everything here extends smoothly to all
of R^(d*c); the simplex is just where the model lives.

Jacobian convention: a (d*c, d*c) ndarray in colour-major flat indexing,
row (u, i) -> i*d + u, column (v, j) -> j*d + v.
"""

from __future__ import annotations

import numpy as np

from .model import ModelParams, NumericsError, SimplexPoint, to_flat


def pairwise_advantages(values: np.ndarray, params: ModelParams) -> np.ndarray:
    """Array a[..., u, v, i] = sum over colours k != i of alpha*(x_u^k - x_v^k).

    This is the argument fed to phi throughout the engine; accepts leading
    batch dimensions.
    """
    values = np.asarray(values, dtype=float)
    # s[..., u, i] = alpha * (total at u - x_u^i) = sum_{k != i} alpha x_u^k
    s = params.alpha * (values.sum(axis=-1, keepdims=True) - values)
    return s[..., :, None, :] - s[..., None, :, :]


def pi_values(values: np.ndarray, params: ModelParams) -> np.ndarray:
    """Map evaluation on raw (..., d, c) arrays (no simplex validation)."""
    a = pairwise_advantages(values, params)
    ph = params.phi.eval(a)
    idx = np.arange(params.d)
    ph[..., idx, idx, :] = 0.0
    return ph.sum(axis=-2) / params.n_edges


def pi(x: SimplexPoint, params: ModelParams) -> SimplexPoint:
    """Evaluate the reinforcement map; lands in the interior of the simplex."""
    return SimplexPoint(pi_values(x.values, params))


def pi_jacobian(x: SimplexPoint, params: ModelParams) -> np.ndarray:
    """Jacobian of the map at x as a dense (d*c, d*c) matrix.

    Blockwise in colours: the (i, j) block is zero when i = j; otherwise it
    is -(alpha/|E|) phi'(a_uv^i) off the diagonal with the negated row sum
    on the diagonal, independently of which j != i is differentiated.
    """
    return jacobian_values(x.values, params)


def jacobian_values(values: np.ndarray, params: ModelParams) -> np.ndarray:
    d, c = params.d, params.c
    a = pairwise_advantages(values, params)
    dp = np.asarray(params.phi.deriv(a), dtype=float)
    idx = np.arange(d)
    dp[idx, idx, :] = 0.0
    coef = params.alpha / params.n_edges
    jac = np.zeros((d * c, d * c))
    for i in range(c):
        block = -coef * dp[:, :, i]
        np.fill_diagonal(block, coef * dp[:, :, i].sum(axis=1))
        for j in range(c):
            if j == i:
                continue
            jac[i * d : (i + 1) * d, j * d : (j + 1) * d] = block
    return jac


def l1_norm_bound(params: ModelParams) -> float:
    """Uniform bound on the column l1 norms of the Jacobian over the simplex."""
    return 4.0 * (params.c - 1) * abs(params.alpha) * params.phi.deriv_sup / params.d


def is_contraction_regime(params: ModelParams) -> bool:
    """True iff the l1 bound is strictly below 1, forcing a unique fixed point."""
    return l1_norm_bound(params) < 1.0


def max_column_l1(matrix: np.ndarray) -> float:
    """Operator l1 norm (max column absolute sum)."""
    return float(np.abs(matrix).sum(axis=0).max())


def spectral_radius(matrix: np.ndarray) -> float:
    """Largest eigenvalue modulus via a dense general eigendecomposition."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("matrix has non-finite entries")
    try:
        eig = np.linalg.eigvals(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"eigenvalue iteration failed for matrix\n{matrix!r}") from exc
    return float(np.max(np.abs(eig)))


def field_flat(flat: np.ndarray, params: ModelParams) -> np.ndarray:
    """-x + pi(x) on colour-major flat vectors (used by the Newton solver)."""
    from .model import from_flat

    return to_flat(pi_values(from_flat(flat, params.d, params.c), params)) - flat
