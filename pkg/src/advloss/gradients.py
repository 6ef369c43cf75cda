"""Exact subgradients of the surrogate losses in model parameters.

For any loss matrix, a subgradient at theta is

    sum_j q*_j phi(x, j) - phi(x, y)

for any distribution q* optimal in the adversary game at the current
potentials.  The closed-form scans already produce such a q*, so the
named variants cost no more than the loss evaluation itself; the
general variant solves the LP.  At non-differentiable points the
tie-broken witness (lowest index) is returned, which is always a valid
element of the subdifferential.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .features import FeatureMap
from .game import solve_adversary_game
from .losses import adversary_optimum
from .matrices import Abstain, General, LossSpec, OrdinalAbsolute, ZeroOne


@dataclass
class Subgradient:
    """A subgradient vector and the distribution that realizes it."""

    vector: np.ndarray = field(repr=False)
    q_star: np.ndarray = field(repr=False)


def combine_features(fmap: FeatureMap, x, q: np.ndarray, y: int) -> np.ndarray:
    """sum_j q_j phi(x, j) - phi(x, y), touching only the support of q."""
    out = -fmap(x, y)
    for j in np.flatnonzero(q):
        out += q[j] * fmap(x, j + 1)
    return out


def subgradient(spec: LossSpec, x, y: int, theta, fmap: FeatureMap) -> Subgradient:
    """Subgradient of the surrogate selected by ``spec`` at ``theta``."""
    f = fmap.potentials(x, theta)
    _, q = adversary_optimum(spec, f)
    return Subgradient(vector=combine_features(fmap, x, q, y), q_star=q)


def subgrad_general(loss_matrix, x, y: int, theta, fmap: FeatureMap) -> Subgradient:
    """LP-backed subgradient for an arbitrary loss matrix."""
    f = fmap.potentials(x, theta)
    sol = solve_adversary_game(loss_matrix, f)
    return Subgradient(vector=combine_features(fmap, x, sol.q, y), q_star=sol.q)


def subgrad_zero_one(x, y: int, theta, fmap: FeatureMap) -> Subgradient:
    """Uniform average of phi over the maximizing support, minus phi(x, y)."""
    return subgradient(ZeroOne(), x, y, theta, fmap)


def subgrad_ordinal_abs(x, y: int, theta, fmap: FeatureMap) -> Subgradient:
    """Half phi at each of the two scan maximizers, minus phi(x, y)."""
    return subgradient(OrdinalAbsolute(), x, y, theta, fmap)


def subgrad_abstain(x, y: int, theta, fmap: FeatureMap, alpha: float) -> Subgradient:
    """Two-support mixture when that branch wins, else the top class alone."""
    return subgradient(Abstain(alpha), x, y, theta, fmap)


def subgrad_from_matrix(loss_matrix, x, y: int, theta, fmap: FeatureMap) -> Subgradient:
    return subgrad_general(General(np.asarray(loss_matrix, dtype=float)).matrix,
                           x, y, theta, fmap)
