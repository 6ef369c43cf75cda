"""Loss specifications and their matrix forms.

A loss specification is a tagged value describing which game the
predictor and the worst-case label distribution play: plain
misclassification, ordinal regression with absolute or squared error,
an abstention option with a fixed penalty, a weighted variant of a
standard metric, or an arbitrary non-negative matrix.

``build_loss_matrix`` materializes the specification as an ``l x k``
matrix whose rows index the predictor's options and whose columns index
the ground-truth labels.  Labels are 1-based everywhere in the public
interface; matrices are ordinary 0-indexed numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import AlphaOutOfRange, InvalidSpec, UnsupportedBase


@dataclass(frozen=True)
class ZeroOne:
    """Unit penalty for any incorrect label."""


@dataclass(frozen=True)
class OrdinalAbsolute:
    """Penalty |prediction - truth| for ordered labels."""


@dataclass(frozen=True)
class OrdinalSquared:
    """Penalty (prediction - truth)^2 for ordered labels."""


@dataclass(frozen=True)
class Abstain:
    """Zero-one loss plus an abstain option costing ``alpha``.

    The closed forms below only hold for 0 <= alpha <= 1/2, so larger
    penalties are rejected outright.
    """

    alpha: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 0.5):
            raise AlphaOutOfRange(
                f"abstain penalty must lie in [0, 1/2], got {self.alpha}")


@dataclass(frozen=True)
class Weighted:
    """A standard metric scaled by a positive constant."""

    base: "LossSpec"
    alpha: float

    def __post_init__(self):
        if not isinstance(self.base, (ZeroOne, OrdinalAbsolute, OrdinalSquared)):
            raise UnsupportedBase(
                "weighted losses may only wrap the zero-one, absolute, "
                f"or squared metrics, got {type(self.base).__name__}")
        if not self.alpha > 0:
            raise InvalidSpec(f"weight must be positive, got {self.alpha}")


@dataclass(frozen=True)
class General:
    """An arbitrary loss matrix, rows = options, columns = labels."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise InvalidSpec(f"loss matrix must be 2-D, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidSpec("loss matrix entries must be finite")
        if np.any(m < 0):
            raise InvalidSpec("loss matrix entries must be non-negative")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


LossSpec = Union[ZeroOne, OrdinalAbsolute, OrdinalSquared, Abstain, Weighted, General]

STANDARD_SPECS = (ZeroOne, OrdinalAbsolute, OrdinalSquared)


def validate_loss_matrix(loss_matrix: np.ndarray, natural: bool = False) -> np.ndarray:
    """Check non-negativity, and optionally the natural-loss property.

    A natural loss is square with each diagonal entry strictly smaller
    than every off-diagonal entry of its column: predicting the truth
    must be strictly cheaper than any mistake.
    """
    m = np.asarray(loss_matrix, dtype=float)
    if m.ndim != 2:
        raise InvalidSpec(f"loss matrix must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidSpec("loss matrix entries must be finite")
    if np.any(m < 0):
        raise InvalidSpec("loss matrix entries must be non-negative")
    if natural:
        if m.shape[0] != m.shape[1]:
            raise InvalidSpec(
                f"natural losses must be square, got shape {m.shape}")
        for j in range(m.shape[1]):
            col = m[:, j]
            off = np.delete(col, j)
            if off.size and not np.all(m[j, j] < off):
                raise InvalidSpec(
                    f"column {j + 1}: diagonal entry {m[j, j]} is not strictly "
                    "below every off-diagonal entry")
    return m


def build_loss_matrix(spec: LossSpec, n_classes: int) -> np.ndarray:
    """Materialize ``spec`` for ``n_classes`` ground-truth labels.

    Returns a ``k x k`` matrix for the standard metrics, ``(k+1) x k``
    for abstention (last row is the constant penalty), the scaled base
    matrix for weighted specs, and a validated copy for general ones.
    """
    if n_classes < 2:
        raise InvalidSpec(f"need at least 2 classes, got {n_classes}")
    k = int(n_classes)
    idx = np.arange(k)

    if isinstance(spec, ZeroOne):
        return (idx[:, None] != idx[None, :]).astype(float)
    if isinstance(spec, OrdinalAbsolute):
        return np.abs(idx[:, None] - idx[None, :]).astype(float)
    if isinstance(spec, OrdinalSquared):
        return ((idx[:, None] - idx[None, :]) ** 2).astype(float)
    if isinstance(spec, Abstain):
        top = (idx[:, None] != idx[None, :]).astype(float)
        return np.vstack([top, np.full((1, k), spec.alpha)])
    if isinstance(spec, Weighted):
        return spec.alpha * build_loss_matrix(spec.base, k)
    if isinstance(spec, General):
        if spec.matrix.shape[1] != k:
            raise InvalidSpec(
                f"general matrix has {spec.matrix.shape[1]} columns, "
                f"expected {k}")
        return np.array(spec.matrix, dtype=float)
    raise InvalidSpec(f"unknown loss specification {spec!r}")


def spec_to_dict(spec: LossSpec) -> dict:
    """JSON-friendly encoding used by model files and the CLI."""
    if isinstance(spec, ZeroOne):
        return {"kind": "zero-one"}
    if isinstance(spec, OrdinalAbsolute):
        return {"kind": "ordinal-abs"}
    if isinstance(spec, OrdinalSquared):
        return {"kind": "ordinal-sq"}
    if isinstance(spec, Abstain):
        return {"kind": "abstain", "alpha": spec.alpha}
    if isinstance(spec, Weighted):
        return {"kind": "weighted", "alpha": spec.alpha,
                "base": spec_to_dict(spec.base)}
    if isinstance(spec, General):
        return {"kind": "general", "matrix": spec.matrix.tolist()}
    raise InvalidSpec(f"unknown loss specification {spec!r}")


def spec_from_dict(data: dict) -> LossSpec:
    kind = data["kind"]
    if kind == "zero-one":
        return ZeroOne()
    if kind == "ordinal-abs":
        return OrdinalAbsolute()
    if kind == "ordinal-sq":
        return OrdinalSquared()
    if kind == "abstain":
        return Abstain(float(data["alpha"]))
    if kind == "weighted":
        return Weighted(spec_from_dict(data["base"]), float(data["alpha"]))
    if kind == "general":
        return General(np.array(data["matrix"], dtype=float))
    raise InvalidSpec(f"unknown loss kind {kind!r}")
