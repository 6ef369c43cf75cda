"""Pure-Python twin of the compiled scan core.

Each function mirrors a hot inner-loop kernel from ``_core.pyx`` and is
selected automatically when the extension is not built (see
``_backend``).  Semantics, including witness tie-breaking, must match
the compiled versions: first maximizer wins every scan.
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def zero_one_best_prefix(f_sorted: np.ndarray, weight: float) -> tuple[float, int]:
    """Best prefix objective (prefix_sum + weight*(m-1))/m over m = 1..k.

    ``f_sorted`` must be in non-increasing order.  Returns the maximum
    and the smallest maximizing prefix length; comparisons are exact.
    """
    k = f_sorted.shape[0]
    sizes = np.arange(1.0, k + 1.0)
    objectives = (np.cumsum(f_sorted) + weight * (sizes - 1.0)) / sizes
    m = int(np.argmax(objectives))
    return float(objectives[m]), m + 1


def ordinal_abs_best_pair(f: np.ndarray, weight: float) -> tuple[float, int, int]:
    """Maximize (f_i + f_j + weight*(j - i))/2, realized independently.

    Returns the maximum and the 0-based lowest-index maximizers of the
    two scans.
    """
    steps = weight * np.arange(f.shape[0], dtype=float)
    i = int(np.argmax(f - steps))
    j = int(np.argmax(f + steps))
    best = 0.5 * (f[i] + f[j] + weight * (j - i))
    return float(best), i, j


def ordinal_sq_best_triple(f: np.ndarray, weight: float) -> tuple[float, int, int, int]:
    """Scan triples i < l <= j of the squared-loss surrogate.

    Returns ``(best, i, l, j)``; the single-support branch (the plain
    potential maximum) is encoded as ``l == -1`` with ``i == j``.  The
    single-support candidate is kept on ties so that witness support is
    as small as possible.
    """
    k = f.shape[0]
    top = int(np.argmax(f))
    best = float(f[top])
    bi, bl, bj = top, -1, top
    if k < 2:
        return best, bi, bl, bj

    idx = np.arange(k, dtype=float)
    ii = idx[:, None, None]
    ll = idx[None, :, None]
    jj = idx[None, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = (
            (2.0 * (jj - ll) + 1.0) * (f[:, None, None] + weight * (ll - ii) ** 2)
            + (2.0 * (ll - ii) - 1.0) * (f[None, None, :] + weight * (jj - ll) ** 2)
        ) / (2.0 * (jj - ii))
    vals[~((ii < ll) & (ll <= jj))] = -np.inf

    flat = int(np.argmax(vals))
    pair_best = float(vals.flat[flat])
    if pair_best > best:
        best = pair_best
        bi, bl, bj = np.unravel_index(flat, vals.shape)
        bi, bl, bj = int(bi), int(bl), int(bj)
    return best, bi, bl, bj


def abstain_best(f: np.ndarray, alpha: float) -> tuple[float, int, int, bool]:
    """Best of the single-support and two-support abstention candidates.

    Returns ``(best, i, j, pair)`` where ``i`` and ``j`` are the
    0-based indices of the two largest potentials (``j == -1`` when
    there is only one class) and ``pair`` says whether the two-support
    branch strictly wins.
    """
    i = int(np.argmax(f))
    if f.shape[0] < 2:
        return float(f[i]), i, -1, False
    rest = np.delete(np.arange(f.shape[0]), i)
    j = int(rest[np.argmax(f[rest])])
    single = float(f[i])
    paired = (1.0 - alpha) * f[i] + alpha * f[j] + alpha
    if paired > single:
        return float(paired), i, j, True
    return single, i, j, False
