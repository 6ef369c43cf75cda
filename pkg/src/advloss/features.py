"""Joint feature maps over (input, label) pairs and kernel functions.

Two representations are supported.  The thresholded map shares one
weight vector across classes and adds k-1 cumulative class indicators,
so a fitted model is a regression direction plus thresholds.  The
multiclass map gives every class its own copy of the input features.

Maps are pure: no standardization or other preprocessing happens here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionMismatch, InvalidSpec


@dataclass(frozen=True)
class ThresholdedFeatures:
    """phi(x, y) = [y*x, 1{y<=1}, ..., 1{y<=k-1}], dimension m + k - 1."""

    n_inputs: int
    n_classes: int

    def __post_init__(self):
        if self.n_inputs < 1 or self.n_classes < 1:
            raise InvalidSpec("feature map needs n_inputs >= 1 and n_classes >= 1")

    @property
    def dim(self) -> int:
        return self.n_inputs + self.n_classes - 1

    def __call__(self, x, y: int) -> np.ndarray:
        x = _check_input(x, self.n_inputs)
        y = _check_class(y, self.n_classes)
        out = np.zeros(self.dim)
        out[:self.n_inputs] = y * x
        out[self.n_inputs + y - 1:] = 1.0
        return out

    def potentials(self, x, theta) -> np.ndarray:
        """All class scores theta.phi(x, i) for i = 1..k in one pass.

        Class i scores i*(w.x) plus the tail sum of the thresholds from
        i on, where w is the shared block and the thresholds are the
        trailing k-1 entries of theta.
        """
        x = _check_input(x, self.n_inputs)
        theta = _check_theta(theta, self.dim)
        wx = float(theta[:self.n_inputs] @ x)
        eta = theta[self.n_inputs:]
        tails = np.zeros(self.n_classes)
        if eta.size:
            tails[:-1] = np.cumsum(eta[::-1])[::-1]
        return np.arange(1, self.n_classes + 1) * wx + tails

    def potentials_batch(self, X, theta) -> np.ndarray:
        theta = _check_theta(theta, self.dim)
        X = np.asarray(X, dtype=float)
        wx = X @ theta[:self.n_inputs]
        eta = theta[self.n_inputs:]
        tails = np.zeros(self.n_classes)
        if eta.size:
            tails[:-1] = np.cumsum(eta[::-1])[::-1]
        return np.outer(wx, np.arange(1, self.n_classes + 1)) + tails


@dataclass(frozen=True)
class MulticlassFeatures:
    """phi(x, y) puts x in the y-th of k blocks, dimension m * k."""

    n_inputs: int
    n_classes: int

    def __post_init__(self):
        if self.n_inputs < 1 or self.n_classes < 1:
            raise InvalidSpec("feature map needs n_inputs >= 1 and n_classes >= 1")

    @property
    def dim(self) -> int:
        return self.n_inputs * self.n_classes

    def __call__(self, x, y: int) -> np.ndarray:
        x = _check_input(x, self.n_inputs)
        y = _check_class(y, self.n_classes)
        out = np.zeros(self.dim)
        out[(y - 1) * self.n_inputs:y * self.n_inputs] = x
        return out

    def potentials(self, x, theta) -> np.ndarray:
        x = _check_input(x, self.n_inputs)
        theta = _check_theta(theta, self.dim)
        return theta.reshape(self.n_classes, self.n_inputs) @ x

    def potentials_batch(self, X, theta) -> np.ndarray:
        theta = _check_theta(theta, self.dim)
        X = np.asarray(X, dtype=float)
        return X @ theta.reshape(self.n_classes, self.n_inputs).T


FeatureMap = Union[ThresholdedFeatures, MulticlassFeatures]


@dataclass(frozen=True)
class LinearKernel:
    """Plain dot product."""


@dataclass(frozen=True)
class GaussianKernel:
    """exp(-gamma * ||u - v||^2)."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidSpec(f"gamma must be positive, got {self.gamma}")


KernelSpec = Union[LinearKernel, GaussianKernel]


def featurize(fmap: FeatureMap, x, y: int) -> np.ndarray:
    """Joint feature vector phi(x, y) for the chosen representation."""
    return fmap(x, y)


def kernel_value(spec: KernelSpec, u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionMismatch(f"kernel arguments {u.shape} vs {v.shape}")
    if isinstance(spec, LinearKernel):
        return float(u @ v)
    if isinstance(spec, GaussianKernel):
        diff = u - v
        return float(np.exp(-spec.gamma * (diff @ diff)))
    raise InvalidSpec(f"unknown kernel {spec!r}")


def _check_input(x, m: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (m,):
        raise DimensionMismatch(f"input shape {x.shape}, expected ({m},)")
    return x


def _check_class(y: int, k: int) -> int:
    y = int(y)
    if not 1 <= y <= k:
        raise DimensionMismatch(f"class {y} outside 1..{k}")
    return y


def _check_theta(theta, dim: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (dim,):
        raise DimensionMismatch(f"parameter shape {theta.shape}, expected ({dim},)")
    return theta


def feature_map_to_dict(fmap: FeatureMap) -> dict:
    kind = "thresholded" if isinstance(fmap, ThresholdedFeatures) else "multiclass"
    return {"kind": kind, "n_inputs": fmap.n_inputs, "n_classes": fmap.n_classes}


def feature_map_from_dict(data: dict) -> FeatureMap:
    cls = {"thresholded": ThresholdedFeatures, "multiclass": MulticlassFeatures}
    return cls[data["kind"]](int(data["n_inputs"]), int(data["n_classes"]))


def kernel_to_dict(spec: KernelSpec) -> dict:
    if isinstance(spec, LinearKernel):
        return {"kind": "linear"}
    return {"kind": "gaussian", "gamma": spec.gamma}


def kernel_from_dict(data: dict) -> KernelSpec:
    if data["kind"] == "linear":
        return LinearKernel()
    return GaussianKernel(float(data["gamma"]))
