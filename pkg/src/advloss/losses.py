"""Closed-form adversarial surrogate losses.

Every surrogate here is the value of the same game: a worst-case label
distribution q maximizes expected loss plus a potential bonus, while a
randomized predictor minimizes expected loss.  For the standard metrics
the optimum lands on a small, explicitly known family of distributions,
which the functions below scan directly instead of solving the linear
program.  ``al_general`` falls back to the LP for arbitrary matrices.

Conventions: potentials are a length-k vector ``f``; labels ``y`` are
1-based; every function returns ``max_q (v + f.q) - f_y``.  The scans
break ties toward the lowest index so results are reproducible.

The paired ``*_optimum`` helpers additionally return the maximizing
distribution, which is what subgradients and the trainers consume.
"""

from __future__ import annotations

import numpy as np

from ._backend import core
from .errors import AlphaOutOfRange, DimensionMismatch, UnsupportedBase
from .matrices import (
    Abstain,
    General,
    LossSpec,
    OrdinalAbsolute,
    OrdinalSquared,
    Weighted,
    ZeroOne,
)


def as_potentials(f) -> np.ndarray:
    arr = np.ascontiguousarray(f, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"potentials must be a non-empty vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("potentials must be finite")
    return arr


def _check_label(y: int, k: int) -> int:
    y = int(y)
    if not 1 <= y <= k:
        raise ValueError(f"label {y} outside 1..{k}")
    return y


def zero_one_optimum(f: np.ndarray, weight: float = 1.0) -> tuple[float, np.ndarray]:
    """Maximize (sum_{i in S} f_i + weight*(|S|-1))/|S| over non-empty S.

    The maximizing support is always a prefix of the potentials sorted
    in non-increasing order, so a single O(k log k) pass suffices.
    Returns the maximum and the uniform distribution on the first
    maximizing prefix.
    """
    order = np.argsort(-f, kind="stable")
    best, m = core.zero_one_best_prefix(f[order], weight)
    q = np.zeros(f.shape[0])
    q[order[:m]] = 1.0 / m
    return best, q


def ordinal_abs_optimum(f: np.ndarray, weight: float = 1.0) -> tuple[float, np.ndarray]:
    """Maximize (f_i + f_j + weight*(j-i))/2; the two scans decouple."""
    best, i, j = core.ordinal_abs_best_pair(f, weight)
    q = np.zeros(f.shape[0])
    q[i] += 0.5
    q[j] += 0.5
    return best, q


def ordinal_sq_optimum(f: np.ndarray, weight: float = 1.0) -> tuple[float, np.ndarray]:
    """Best of the two-support triple scan and the single best potential."""
    best, i, l, j = core.ordinal_sq_best_triple(f, weight)
    q = np.zeros(f.shape[0])
    if l < 0:
        q[i] = 1.0
    else:
        denom = 2.0 * (j - i)
        q[i] = (2.0 * (j - l) + 1.0) / denom
        q[j] = (2.0 * (l - i) - 1.0) / denom
    return best, q


def abstain_optimum(f: np.ndarray, alpha: float) -> tuple[float, np.ndarray]:
    """Best of the top potential alone and the top-two mixture."""
    if not (0.0 <= alpha <= 0.5):
        raise AlphaOutOfRange(f"abstain penalty must lie in [0, 1/2], got {alpha}")
    best, i, j, pair = core.abstain_best(f, alpha)
    q = np.zeros(f.shape[0])
    if pair:
        q[i] = 1.0 - alpha
        q[j] += alpha
    else:
        q[i] = 1.0
    return best, q


def adversary_optimum(spec: LossSpec, f) -> tuple[float, np.ndarray]:
    """Game value ``max_q (v + f.q)`` and a maximizing distribution.

    Dispatches to the closed forms where one exists; general matrices
    go through the LP solver.
    """
    f = as_potentials(f)
    if isinstance(spec, ZeroOne):
        return zero_one_optimum(f)
    if isinstance(spec, OrdinalAbsolute):
        return ordinal_abs_optimum(f)
    if isinstance(spec, OrdinalSquared):
        return ordinal_sq_optimum(f)
    if isinstance(spec, Abstain):
        return abstain_optimum(f, spec.alpha)
    if isinstance(spec, Weighted):
        if isinstance(spec.base, ZeroOne):
            return zero_one_optimum(f, spec.alpha)
        if isinstance(spec.base, OrdinalAbsolute):
            return ordinal_abs_optimum(f, spec.alpha)
        if isinstance(spec.base, OrdinalSquared):
            return ordinal_sq_optimum(f, spec.alpha)
        raise UnsupportedBase(f"no closed form for weighted {spec.base!r}")
    if isinstance(spec, General):
        from .game import solve_adversary_game

        sol = solve_adversary_game(spec.matrix, f)
        return sol.value, sol.q
    raise UnsupportedBase(f"unknown loss specification {spec!r}")


def al_zero_one(f, y: int) -> float:
    """Adversarial surrogate for the zero-one loss."""
    f = as_potentials(f)
    y = _check_label(y, f.shape[0])
    best, _ = zero_one_optimum(f)
    return best - f[y - 1]


def al_ordinal_abs(f, y: int) -> float:
    """Adversarial surrogate for the ordinal absolute loss."""
    f = as_potentials(f)
    y = _check_label(y, f.shape[0])
    best, _ = ordinal_abs_optimum(f)
    return best - f[y - 1]


def al_ordinal_sq(f, y: int) -> float:
    """Adversarial surrogate for the ordinal squared loss."""
    f = as_potentials(f)
    y = _check_label(y, f.shape[0])
    best, _ = ordinal_sq_optimum(f)
    return best - f[y - 1]


def al_abstain(f, y: int, alpha: float) -> float:
    """Adversarial surrogate for zero-one loss with an abstain option."""
    f = as_potentials(f)
    y = _check_label(y, f.shape[0])
    best, _ = abstain_optimum(f, alpha)
    return best - f[y - 1]


def al_weighted(f, y: int, base: LossSpec, alpha: float) -> float:
    """Adversarial surrogate for a standard metric scaled by ``alpha``.

    The weight multiplies only the loss offsets of the closed forms,
    never the potentials: the scaled game at potentials f is alpha
    times the plain game at potentials f/alpha.
    """
    if not isinstance(base, (ZeroOne, OrdinalAbsolute, OrdinalSquared)):
        raise UnsupportedBase(
            f"weighted surrogate needs a standard base metric, got {base!r}")
    if not alpha > 0:
        raise UnsupportedBase(f"weight must be positive, got {alpha}")
    f = as_potentials(f)
    y = _check_label(y, f.shape[0])
    best, _ = adversary_optimum(Weighted(base, alpha), f)
    return best - f[y - 1]


def al_general(f, y: int, loss_matrix) -> float:
    """LP-backed surrogate for an arbitrary non-negative loss matrix."""
    from .game import solve_adversary_game

    f = as_potentials(f)
    y = _check_label(y, f.shape[0])
    L = np.asarray(loss_matrix, dtype=float)
    if L.ndim != 2 or L.shape[1] != f.shape[0]:
        raise DimensionMismatch(
            f"loss matrix shape {L.shape} does not match {f.shape[0]} potentials")
    sol = solve_adversary_game(L, f)
    return sol.value - f[y - 1]


def surrogate_loss(spec: LossSpec, f, y: int) -> float:
    """Evaluate the surrogate selected by ``spec`` at ``(f, y)``."""
    f = as_potentials(f)
    y = _check_label(y, f.shape[0])
    best, _ = adversary_optimum(spec, f)
    return best - f[y - 1]
