"""Prediction schemes on top of fitted models.

Three ways to turn class potentials into an output: take the potential
argmax (unavailable when the predictor's options include abstaining),
play the prediction game and report its randomized optimum, or use the
closed-form abstention rule: answer when the top-two potential gap
reaches 1/2, abstain otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import AlphaOutOfRange, SchemeUnavailable
from .game import solve_predictor_game
from .matrices import Abstain, General, build_loss_matrix


class _AbstainLabel:
    """Sentinel returned instead of a class index."""

    __slots__ = ()

    def __repr__(self):
        return "abstain"


ABSTAIN = _AbstainLabel()

Label = Union[int, _AbstainLabel]


@dataclass
class Prediction:
    label: Label
    distribution: Optional[np.ndarray] = field(default=None, repr=False)


def predict_argmax(model, x) -> Prediction:
    """Lowest-index maximizer of the class potentials.

    Only defined when the predictor chooses from the ground-truth label
    set, so abstention models (and non-square general matrices) are
    rejected.
    """
    spec = model.loss_spec
    if isinstance(spec, Abstain):
        raise SchemeUnavailable(
            "potential argmax cannot express the abstain option; "
            "use predict_abstain or predict_probabilistic")
    if isinstance(spec, General) and spec.matrix.shape[0] != spec.matrix.shape[1]:
        raise SchemeUnavailable(
            "potential argmax needs prediction options to match labels")
    f = model.potentials(np.asarray(x, dtype=float))
    return Prediction(label=int(np.argmax(f)) + 1)


def predict_probabilistic(model, x) -> Prediction:
    """Optimal randomized prediction from the prediction game.

    The label is the distribution's lowest-index argmax; for abstention
    models the extra option maps to the abstain label.
    """
    spec = model.loss_spec
    f = model.potentials(np.asarray(x, dtype=float))
    L = build_loss_matrix(spec, model.n_classes)
    sol = solve_predictor_game(L, f)
    best = int(np.argmax(sol.p))
    label: Label = best + 1
    if isinstance(spec, Abstain) and best == model.n_classes:
        label = ABSTAIN
    return Prediction(label=label, distribution=sol.p)


def predict_abstain(model, x, alpha: Optional[float] = None) -> Prediction:
    """Closed-form abstention rule from the prediction game's optimum.

    With top-two potentials f_a >= f_b and gap = f_a - f_b: predict the
    top class when gap >= 1/2, abstain otherwise; the distribution puts
    min(gap, 1) on the top class and the rest on abstaining.
    """
    if alpha is None:
        spec = model.loss_spec
        if not isinstance(spec, Abstain):
            raise SchemeUnavailable(
                "model has no abstain penalty; pass alpha explicitly")
        alpha = spec.alpha
    if not 0.0 <= alpha <= 0.5:
        raise AlphaOutOfRange(f"abstain penalty must lie in [0, 1/2], got {alpha}")
    f = model.potentials(np.asarray(x, dtype=float))
    k = f.shape[0]
    top = int(np.argmax(f))
    if k == 1:
        return Prediction(label=1, distribution=np.array([1.0, 0.0]))
    rest = np.delete(np.arange(k), top)
    runner = int(rest[np.argmax(f[rest])])
    gap = float(f[top] - f[runner])
    dist = np.zeros(k + 1)
    if gap >= 1.0:
        dist[top] = 1.0
    else:
        dist[top] = gap
        dist[k] = 1.0 - gap
    label: Label = top + 1 if gap >= 0.5 else ABSTAIN
    return Prediction(label=label, distribution=dist)
