# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan core: the hot inner loops of the closed-form losses.

Mirrors ``_core_py`` exactly, including tie-breaking (first maximizer
everywhere).  Selected automatically at import when built; the pure
twin is the fallback.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

COMPILED = True


def zero_one_best_prefix(double[::1] f_sorted, double weight):
    """Best prefix objective (prefix_sum + weight*(m-1))/m over m = 1..k.

    ``f_sorted`` must be in non-increasing order.  Returns the maximum
    and the smallest maximizing prefix length; comparisons are exact.
    """
    cdef Py_ssize_t k = f_sorted.shape[0]
    cdef Py_ssize_t m, best_m = 1
    cdef double prefix = 0.0
    cdef double value, best = -np.inf
    for m in range(1, k + 1):
        prefix += f_sorted[m - 1]
        value = (prefix + weight * (m - 1)) / m
        if value > best:
            best = value
            best_m = m
    return best, best_m


def ordinal_abs_best_pair(double[::1] f, double weight):
    """Maximize (f_i + f_j + weight*(j - i))/2, realized independently.

    Returns the maximum and the 0-based lowest-index maximizers of the
    two scans.
    """
    cdef Py_ssize_t k = f.shape[0]
    cdef Py_ssize_t idx, besti = 0, bestj = 0
    cdef double down, up
    cdef double best_down = f[0], best_up = f[0]
    for idx in range(1, k):
        down = f[idx] - weight * idx
        up = f[idx] + weight * idx
        if down > best_down:
            best_down = down
            besti = idx
        if up > best_up:
            best_up = up
            bestj = idx
    cdef double best = 0.5 * (f[besti] + f[bestj] + weight * (bestj - besti))
    return best, besti, bestj


def ordinal_sq_best_triple(double[::1] f, double weight):
    """Scan triples i < l <= j of the squared-loss surrogate.

    Returns ``(best, i, l, j)``; the single-support branch is encoded
    as ``l == -1`` with ``i == j`` and kept on ties.
    """
    cdef Py_ssize_t k = f.shape[0]
    cdef Py_ssize_t i, l, j, top = 0
    cdef Py_ssize_t bi, bl, bj
    cdef double value, best
    for i in range(1, k):
        if f[i] > f[top]:
            top = i
    best = f[top]
    bi = top
    bl = -1
    bj = top
    for i in range(k):
        for l in range(i + 1, k):
            for j in range(l, k):
                value = ((2.0 * (j - l) + 1.0) * (f[i] + weight * (l - i) * (l - i))
                         + (2.0 * (l - i) - 1.0) * (f[j] + weight * (j - l) * (j - l))
                         ) / (2.0 * (j - i))
                if value > best:
                    best = value
                    bi = i
                    bl = l
                    bj = j
    return best, bi, bl, bj


def abstain_best(double[::1] f, double alpha):
    """Best of the single-support and two-support abstention candidates.

    Returns ``(best, i, j, pair)`` with the 0-based indices of the two
    largest potentials (``j == -1`` for a single class) and whether the
    two-support branch strictly wins.
    """
    cdef Py_ssize_t k = f.shape[0]
    cdef Py_ssize_t idx, i = 0, j = -1
    for idx in range(1, k):
        if f[idx] > f[i]:
            i = idx
    if k < 2:
        return f[i], i, -1, False
    for idx in range(k):
        if idx != i and (j < 0 or f[idx] > f[j]):
            j = idx
    cdef double single = f[i]
    cdef double paired = (1.0 - alpha) * f[i] + alpha * f[j] + alpha
    if paired > single:
        return paired, i, j, True
    return single, i, j, False
