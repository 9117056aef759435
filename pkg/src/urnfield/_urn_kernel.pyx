# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepper for the ball process (logistic kernel only).

Consumes pre-drawn uniforms, one per (edge, colour) in lexicographic
order, so results are bit-identical to the pure-Python engine: both use
libm's exp on identically grouped double arithmetic.
"""

from libc.math cimport exp
from libc.stdint cimport int64_t


def simulate_chunk(
    int64_t[:, ::1] balls,
    int64_t[::1] totals,
    double alpha,
    int64_t colour_total0,
    int64_t n_edges,
    int64_t[:, ::1] edges,
    double[:, :, ::1] uniforms,
    int64_t[:, ::1] scratch,
):
    """Advance ``uniforms.shape[0]`` steps in place.

    ``balls`` is (d, c) counts, ``totals`` the per-vertex sums over colours,
    ``colour_total0`` the common per-colour total at entry (grows by
    ``n_edges`` each step), ``scratch`` a (d, c) work array.  All draws of
    one step read the counts from the step's start; increments land
    simultaneously.
    """
    cdef Py_ssize_t n_sub = uniforms.shape[0]
    cdef Py_ssize_t n_e = uniforms.shape[1]
    cdef Py_ssize_t c = uniforms.shape[2]
    cdef Py_ssize_t d = balls.shape[0]
    cdef Py_ssize_t s, e, i, u, v
    cdef double scale, t, p
    cdef int64_t total_colour, placed

    for s in range(n_sub):
        total_colour = colour_total0 + s * n_edges
        scale = alpha / <double> total_colour
        for u in range(d):
            for i in range(c):
                scratch[u, i] = 0
        for e in range(n_e):
            u = edges[e, 0]
            v = edges[e, 1]
            for i in range(c):
                t = scale * <double> ((totals[u] - balls[u, i]) - (totals[v] - balls[v, i]))
                p = 1.0 / (1.0 + exp(-t))
                if uniforms[s, e, i] < p:
                    scratch[u, i] += 1
                else:
                    scratch[v, i] += 1
        for u in range(d):
            placed = 0
            for i in range(c):
                balls[u, i] += scratch[u, i]
                placed += scratch[u, i]
            totals[u] += placed
