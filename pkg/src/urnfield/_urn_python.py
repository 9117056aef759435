"""Pure-Python stepper, the fallback when the compiled kernel is absent.

Mirrors ``_urn_kernel.pyx`` operation for operation.  The logistic path
uses math.exp (libm, like the kernel) on identically grouped arithmetic,
so compiled and fallback runs agree bit for bit; catching OverflowError
reproduces C's exp overflow to +inf, where the probability underflows
to exactly 0.  A user-supplied reinforcement function takes the generic
path instead, which the kernel does not offer.
"""

from __future__ import annotations

from math import exp


def simulate_chunk(balls, totals, alpha, colour_total0, n_edges, edges, uniforms, phi=None):
    """Advance ``uniforms.shape[0]`` steps in place; see the kernel docstring."""
    d, c = balls.shape
    counts = balls.tolist()
    sums = totals.tolist()
    edge_list = [(int(u), int(v)) for u, v in edges]
    n_sub = uniforms.shape[0]
    generic = phi is not None

    for s in range(n_sub):
        scale = alpha / (colour_total0 + s * n_edges)
        inc = [[0] * c for _ in range(d)]
        rows = uniforms[s].tolist()
        for e, (u, v) in enumerate(edge_list):
            row_u = counts[u]
            row_v = counts[v]
            sum_u = sums[u]
            sum_v = sums[v]
            draw = rows[e]
            for i in range(c):
                t = scale * ((sum_u - row_u[i]) - (sum_v - row_v[i]))
                if generic:
                    p = float(phi.eval(t))
                else:
                    try:
                        p = 1.0 / (1.0 + exp(-t))
                    except OverflowError:
                        p = 0.0
                if draw[i] < p:
                    inc[u][i] += 1
                else:
                    inc[v][i] += 1
        for u in range(d):
            placed = 0
            row = counts[u]
            add = inc[u]
            for i in range(c):
                row[i] += add[i]
                placed += add[i]
            sums[u] += placed

    balls[:] = counts
    totals[:] = sums
