"""Model fitting by stochastic subgradient descent.

Two families of trainers share one loss/subgradient core:

- ``train_linear`` fits an explicit parameter vector over a feature map
  with SGD, AdaGrad, or the 1/(lambda*t) schedule, reshuffling the data
  every epoch and keeping the best iterate by regularized objective.
- ``train_pegasos_kernel`` runs the kernelized primal stochastic method:
  coefficients accumulate per (example, class), potentials come from
  the kernel expansion, and one uniformly sampled example is touched
  per step.  ``train_pegasos_linear`` is the explicit-parameter twin
  with identical sampling, used both as a fast path for linear kernels
  and to cross-check the kernel bookkeeping step by step.

For the two structured feature maps the pairwise kernel values reduce
to functions of input dot products and squared norms, so potentials
never materialize the (n*k)^2 virtual Gram matrix; dot-product columns
are cached with an LRU bound instead.
"""

from __future__ import annotations

import base64
import hashlib
import json
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .data import Dataset
from .errors import BadConfig, DimensionMismatch
from .features import (
    FeatureMap,
    GaussianKernel,
    KernelSpec,
    LinearKernel,
    MulticlassFeatures,
    ThresholdedFeatures,
    feature_map_from_dict,
    feature_map_to_dict,
    kernel_from_dict,
    kernel_to_dict,
)
from .gradients import combine_features
from .losses import adversary_optimum, surrogate_loss
from .matrices import LossSpec, spec_from_dict, spec_to_dict

DEFAULT_CACHE_ENTRIES = 1 << 26


@dataclass(frozen=True)
class SGD:
    """Step eta0 / (1 + decay * t)."""

    eta0: float = 1.0
    decay: float = 0.0


@dataclass(frozen=True)
class AdaGrad:
    """Per-coordinate steps eta0 / sqrt(sum of squared subgradients)."""

    eta0: float = 1.0


@dataclass(frozen=True)
class PegasosSchedule:
    """Step 1 / (lambda * t); requires a positive regularizer."""


OptimizerMethod = Union[SGD, AdaGrad, PegasosSchedule]


@dataclass(frozen=True)
class OptimizerConfig:
    method: OptimizerMethod = AdaGrad(1.0)
    epochs: int = 200
    seed: int = 0


@dataclass
class LinearModel:
    """Explicit parameters over a feature map."""

    theta: np.ndarray = field(repr=False)
    feature_map: FeatureMap
    loss_spec: LossSpec
    lam: float
    objective_trace: list = field(default_factory=list, repr=False)
    potential_trace: Optional[list] = field(default=None, repr=False)

    @property
    def n_classes(self) -> int:
        return self.feature_map.n_classes

    def potentials(self, x) -> np.ndarray:
        return self.feature_map.potentials(x, self.theta)

    def potentials_batch(self, X) -> np.ndarray:
        return self.feature_map.potentials_batch(X, self.theta)


@dataclass
class KernelModel:
    """Coefficient matrix over the training set plus a kernel.

    Class potentials for any input x are

        f_j = -(1 / (lambda * t_final)) * sum_{i,c} alpha[i,c] *
              K(phi(x_i, c), phi(x, j)).
    """

    alpha: np.ndarray = field(repr=False)
    X_train: np.ndarray = field(repr=False)
    y_train: np.ndarray = field(repr=False)
    kernel: KernelSpec
    feature_map: FeatureMap
    loss_spec: LossSpec
    lam: float
    t_final: int
    potential_trace: Optional[list] = field(default=None, repr=False)

    @property
    def n_classes(self) -> int:
        return self.feature_map.n_classes

    def _engine(self) -> "_GramEngine":
        engine = getattr(self, "_engine_cache", None)
        if engine is None:
            engine = _GramEngine(self.X_train, self.feature_map, self.kernel)
            object.__setattr__(self, "_engine_cache", engine)
        return engine

    def potentials(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        engine = self._engine()
        scale = -1.0 / (self.lam * self.t_final)
        return engine.potentials(self.alpha, scale, engine.dots_for(x), float(x @ x))

    def potentials_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.stack([self.potentials(x) for x in X])


class _GramEngine:
    """Kernel-expansion potentials via the structure of the feature maps.

    For both maps, K(phi(x_a, c), phi(x_b, c')) is a closed function of
    x_a . x_b, the squared norms, and the class pair, so every potential
    evaluation costs O(n k) (O(n k^2) for the thresholded Gaussian case)
    instead of n*k explicit kernel calls over stacked feature vectors.
    """

    def __init__(self, X, fmap: FeatureMap, kernel: KernelSpec,
                 max_cache_entries: int = DEFAULT_CACHE_ENTRIES):
        self.X = np.ascontiguousarray(X, dtype=float)
        self.fmap = fmap
        self.kernel = kernel
        self.sq = np.einsum("ij,ij->i", self.X, self.X)
        self.labels = np.arange(1, fmap.n_classes + 1, dtype=float)
        self._cols: OrderedDict[int, np.ndarray] = OrderedDict()
        self._max_cols = max(1, max_cache_entries // max(len(self.X), 1))
        self._lock = threading.Lock()
        k = fmap.n_classes
        if isinstance(fmap, ThresholdedFeatures):
            # indicator overlap: # of thresholds both classes are at or below
            self._overlap = k - np.maximum(self.labels[:, None], self.labels[None, :])
            if isinstance(kernel, GaussianKernel):
                self._label_products = np.outer(self.labels, self.labels)
                self._label_gaps = np.abs(
                    self.labels[:, None] - self.labels[None, :])

    def dots(self, index: int) -> np.ndarray:
        with self._lock:
            col = self._cols.get(index)
            if col is not None:
                self._cols.move_to_end(index)
                return col
        col = self.X @ self.X[index]
        with self._lock:
            self._cols[index] = col
            if len(self._cols) > self._max_cols:
                self._cols.popitem(last=False)
        return col

    def dots_for(self, x) -> np.ndarray:
        return self.X @ np.asarray(x, dtype=float)

    def potentials(self, alpha: np.ndarray, scale: float, dots: np.ndarray,
                   x_sq: float) -> np.ndarray:
        if scale == 0.0 or not alpha.any():
            return np.zeros(self.fmap.n_classes)
        if isinstance(self.fmap, MulticlassFeatures):
            if isinstance(self.kernel, LinearKernel):
                return scale * (alpha.T @ dots)
            g = self.kernel.gamma
            shared = np.exp(-g * (self.sq + x_sq))
            matched = np.exp(-g * (self.sq + x_sq - 2.0 * dots))
            return scale * (alpha.T @ (matched - shared)
                            + (alpha.sum(axis=1) @ shared))
        if isinstance(self.kernel, LinearKernel):
            weighted = alpha @ self.labels
            cross = self._overlap @ alpha.sum(axis=0)
            return scale * (self.labels * (dots @ weighted) + cross)
        return self._thresholded_gaussian(alpha, scale, dots, x_sq)

    def _thresholded_gaussian(self, alpha, scale, dots, x_sq):
        # the squared feature distance for (source class a, target class
        # b, example n) is a^2|x_n|^2 + b^2|x|^2 - 2ab x_n.x + |a - b|;
        # exponentiating it whole keeps every exponent non-positive, so
        # nothing overflows no matter how large gamma or the dots get.
        squared = self.labels ** 2
        sq_dist = (squared[:, None, None] * self.sq[None, None, :]
                   + x_sq * squared[None, :, None]
                   - 2.0 * self._label_products[:, :, None] * dots[None, None, :]
                   + self._label_gaps[:, :, None])
        kernel_values = np.exp(-self.kernel.gamma * sq_dist)
        return scale * np.einsum("abn,na->b", kernel_values, alpha)


def _check_setup(data: Dataset, fmap: FeatureMap):
    if fmap.n_classes != data.n_classes:
        raise DimensionMismatch(
            f"feature map expects {fmap.n_classes} classes, "
            f"dataset has {data.n_classes}")
    if fmap.n_inputs != data.n_features:
        raise DimensionMismatch(
            f"feature map expects {fmap.n_inputs} inputs, "
            f"dataset has {data.n_features}")


def _regularized_objective(data: Dataset, spec: LossSpec, fmap: FeatureMap,
                           theta: np.ndarray, lam: float) -> float:
    potentials = fmap.potentials_batch(data.X, theta)
    total = sum(surrogate_loss(spec, potentials[i], int(data.y[i]))
                for i in range(len(data)))
    return total / len(data) + 0.5 * lam * float(theta @ theta)


def train_linear(data: Dataset, spec: LossSpec, feature_map: FeatureMap,
                 lam: float, config: Optional[OptimizerConfig] = None,
                 theta0=None) -> LinearModel:
    """Minimize mean surrogate loss plus (lam/2)||theta||^2.

    Runs ``config.epochs`` passes in a per-epoch reshuffled order and
    returns the iterate with the best end-of-epoch objective, so the
    reported trace's running best is non-increasing by construction.
    """
    config = config or OptimizerConfig()
    _check_setup(data, feature_map)
    if len(data) == 0:
        raise BadConfig("cannot train on an empty dataset")
    if config.epochs < 1:
        raise BadConfig(f"epochs must be >= 1, got {config.epochs}")
    if lam < 0:
        raise BadConfig(f"regularizer must be non-negative, got {lam}")
    method = config.method
    if isinstance(method, (SGD, AdaGrad)) and not method.eta0 > 0:
        raise BadConfig(f"step size must be positive, got {method.eta0}")
    if isinstance(method, SGD) and method.decay < 0:
        raise BadConfig(f"decay must be non-negative, got {method.decay}")
    if isinstance(method, PegasosSchedule) and not lam > 0:
        raise BadConfig("the 1/(lambda*t) schedule needs lambda > 0")

    theta = (np.zeros(feature_map.dim) if theta0 is None
             else np.array(theta0, dtype=float))
    if theta.shape != (feature_map.dim,):
        raise BadConfig(
            f"theta0 shape {theta.shape}, expected ({feature_map.dim},)")
    rng = np.random.default_rng(config.seed)
    accum = np.zeros_like(theta)  # AdaGrad curvature
    t = 0

    best = _regularized_objective(data, spec, feature_map, theta, lam)
    best_theta = theta.copy()
    trace = [best]
    for _ in range(config.epochs):
        for idx in rng.permutation(len(data)):
            t += 1
            x = data.X[idx]
            label = int(data.y[idx])
            f = feature_map.potentials(x, theta)
            _, q = adversary_optimum(spec, f)
            grad = combine_features(feature_map, x, q, label)
            if lam:
                grad += lam * theta
            if isinstance(method, SGD):
                theta -= (method.eta0 / (1.0 + method.decay * t)) * grad
            elif isinstance(method, AdaGrad):
                accum += grad * grad
                theta -= method.eta0 * grad / (np.sqrt(accum) + 1e-12)
            else:
                theta -= grad / (lam * t)
        objective = _regularized_objective(data, spec, feature_map, theta, lam)
        trace.append(objective)
        if objective < best:
            best = objective
            best_theta = theta.copy()
    return LinearModel(theta=best_theta, feature_map=feature_map,
                       loss_spec=spec, lam=lam, objective_trace=trace)


def train_pegasos_linear(data: Dataset, spec: LossSpec, feature_map: FeatureMap,
                         lam: float, n_steps: int, seed: int = 0,
                         record_potentials: bool = False) -> LinearModel:
    """Explicit-parameter stochastic run with uniform resampling.

    Matches the kernelized trainer draw for draw: theta after step t is
    -(1/(lam*t)) times the accumulated loss subgradients, so with a
    linear kernel the two produce identical per-step potentials.
    """
    _check_setup(data, feature_map)
    _check_pegasos(lam, n_steps)
    theta = np.zeros(feature_map.dim)
    rng = np.random.default_rng(seed)
    trace: Optional[list] = [] if record_potentials else None
    for t in range(1, n_steps + 1):
        idx = int(rng.integers(len(data)))
        x = data.X[idx]
        label = int(data.y[idx])
        f = feature_map.potentials(x, theta)
        if trace is not None:
            trace.append(f.copy())
        _, q = adversary_optimum(spec, f)
        grad = combine_features(feature_map, x, q, label)
        theta *= 1.0 - 1.0 / t
        theta -= grad / (lam * t)
    return LinearModel(theta=theta, feature_map=feature_map, loss_spec=spec,
                       lam=lam, potential_trace=trace)


def train_pegasos_kernel(data: Dataset, spec: LossSpec, kernel: KernelSpec,
                         feature_map: FeatureMap, lam: float, n_steps: int,
                         seed: int = 0, record_potentials: bool = False,
                         max_cache_entries: int = DEFAULT_CACHE_ENTRIES
                         ) -> KernelModel:
    """Kernelized stochastic training by coefficient accumulation.

    Starts from zero coefficients; at step t one example i_t is drawn
    uniformly, potentials are read from the kernel expansion, the
    adversary's optimal distribution q* is computed in closed form (or
    by LP), and only row i_t changes, by exactly q* minus the one-hot
    truth.  The expansion scale at step t is the explicit-parameter
    1/(lam*(t-1)) (zero coefficients make step 1 scale-free), and the
    returned model evaluates with 1/(lam*t_final).
    """
    _check_setup(data, feature_map)
    _check_pegasos(lam, n_steps)
    n = len(data)
    k = data.n_classes
    alpha = np.zeros((n, k))
    onehot = np.zeros((n, k))
    onehot[np.arange(n), data.y - 1] = 1.0
    engine = _GramEngine(data.X, feature_map, kernel, max_cache_entries)
    rng = np.random.default_rng(seed)
    trace: Optional[list] = [] if record_potentials else None
    for t in range(1, n_steps + 1):
        idx = int(rng.integers(n))
        scale = 0.0 if t == 1 else -1.0 / (lam * (t - 1))
        f = engine.potentials(alpha, scale, engine.dots(idx),
                              float(engine.sq[idx]))
        if trace is not None:
            trace.append(f.copy())
        _, q = adversary_optimum(spec, f)
        alpha[idx] += q - onehot[idx]
    return KernelModel(alpha=alpha, X_train=engine.X.copy(),
                       y_train=data.y.copy(), kernel=kernel,
                       feature_map=feature_map, loss_spec=spec, lam=lam,
                       t_final=n_steps, potential_trace=trace)


def _check_pegasos(lam: float, n_steps: int):
    if not lam > 0:
        raise BadConfig(f"regularizer must be positive, got {lam}")
    if n_steps < 1:
        raise BadConfig(f"need at least one step, got {n_steps}")


# -- model files --------------------------------------------------------

_FORMAT = "advloss-model-v1"


def _encode_array(arr: np.ndarray) -> dict:
    arr = np.ascontiguousarray(arr)
    return {"shape": list(arr.shape), "dtype": arr.dtype.str,
            "data": base64.b64encode(arr.tobytes()).decode("ascii")}


def _decode_array(data: dict) -> np.ndarray:
    raw = base64.b64decode(data["data"])
    return np.frombuffer(raw, dtype=np.dtype(data["dtype"])).reshape(data["shape"]).copy()


def training_set_digest(X: np.ndarray, y: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(X, dtype=float).tobytes())
    h.update(np.ascontiguousarray(y, dtype=np.int64).tobytes())
    return h.hexdigest()


def save_model(model: Union[LinearModel, KernelModel], path):
    """Write a model file that round-trips bit-exactly."""
    payload = {
        "format": _FORMAT,
        "loss": spec_to_dict(model.loss_spec),
        "feature_map": feature_map_to_dict(model.feature_map),
        "lambda": model.lam,
    }
    if isinstance(model, LinearModel):
        payload["type"] = "linear"
        payload["theta"] = _encode_array(model.theta)
    elif isinstance(model, KernelModel):
        payload["type"] = "kernel"
        payload["kernel"] = kernel_to_dict(model.kernel)
        payload["alpha"] = _encode_array(model.alpha)
        payload["t_final"] = model.t_final
        payload["X_train"] = _encode_array(model.X_train)
        payload["y_train"] = _encode_array(model.y_train.astype(np.int64))
        payload["train_digest"] = training_set_digest(model.X_train, model.y_train)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle)


def load_model(path) -> Union[LinearModel, KernelModel]:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    if payload.get("format") != _FORMAT:
        raise BadConfig(f"not a model file: {path}")
    spec = spec_from_dict(payload["loss"])
    fmap = feature_map_from_dict(payload["feature_map"])
    lam = float(payload["lambda"])
    if payload["type"] == "linear":
        return LinearModel(theta=_decode_array(payload["theta"]),
                           feature_map=fmap, loss_spec=spec, lam=lam)
    kernel = kernel_from_dict(payload["kernel"])
    X_train = _decode_array(payload["X_train"])
    y_train = _decode_array(payload["y_train"]).astype(int)
    digest = training_set_digest(X_train, y_train)
    if digest != payload.get("train_digest"):
        raise BadConfig(f"training-set digest mismatch in {path}")
    return KernelModel(alpha=_decode_array(payload["alpha"]), X_train=X_train,
                       y_train=y_train, kernel=kernel, feature_map=fmap,
                       loss_spec=spec, lam=lam, t_final=int(payload["t_final"]))
