"""Tabular dataset ingestion and preprocessing.

CSV is the only ingestion format: numeric feature columns plus one
integer label column (selectable, last by default).  Raw labels are
remapped to contiguous 1..k in ascending order of their original
values, with a warning when the raw values had gaps.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDataset, ParseError, TooSmall


@dataclass
class Dataset:
    """Feature matrix, 1-based integer labels, and the class count."""

    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    n_classes: int
    name: str = ""

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if self.X.ndim != 2 or self.y.ndim != 1 or len(self.X) != len(self.y):
            raise ValueError(
                f"inconsistent shapes X{self.X.shape}, y{self.y.shape}")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("features must be finite")
        if len(self.y) and (self.y.min() < 1 or self.y.max() > self.n_classes):
            raise ValueError(
                f"labels must lie in 1..{self.n_classes}, "
                f"got range {self.y.min()}..{self.y.max()}")
        missing = sorted(set(range(1, self.n_classes + 1)) - set(self.y.tolist()))
        if missing:
            warnings.warn(
                f"dataset {self.name or '<unnamed>'}: classes {missing} "
                "have no examples", stacklevel=2)

    def __len__(self) -> int:
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return Dataset(self.X[idx], self.y[idx], self.n_classes, self.name)


def load_csv(path, label_column: int = -1, delimiter: str = ",",
             name: str | None = None) -> Dataset:
    """Parse a numeric CSV with one integer label column.

    Malformed cells raise ParseError naming the offending row and
    column (1-based).  Labels with gaps are remapped to 1..k with a
    warning; the original ascending order is preserved.
    """
    rows: list[list[float]] = []
    raw_labels: list[int] = []
    arity = None
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(delimiter)
            if arity is None:
                arity = len(cells)
                if arity < 2:
                    raise ParseError(
                        f"row {line_no}: need at least one feature and a label")
                label_idx = label_column if label_column >= 0 else arity + label_column
                if not 0 <= label_idx < arity:
                    raise ParseError(
                        f"label column {label_column} outside 1..{arity}")
            elif len(cells) != arity:
                raise ParseError(
                    f"row {line_no}: expected {arity} cells, got {len(cells)}")
            parsed = []
            for col_no, cell in enumerate(cells, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(
                        f"row {line_no}, column {col_no}: "
                        f"cannot parse {cell!r} as a number") from None
                parsed.append(value)
            label_value = parsed.pop(label_idx)
            if label_value != int(label_value):
                raise ParseError(
                    f"row {line_no}, column {label_idx + 1}: "
                    f"label {label_value!r} is not an integer")
            raw_labels.append(int(label_value))
            rows.append(parsed)
    if not rows:
        raise EmptyDataset(f"no data rows in {path}")

    raw = np.asarray(raw_labels)
    levels = np.unique(raw)
    remap = {int(v): i + 1 for i, v in enumerate(levels)}
    contiguous = levels.min() == 1 and levels.max() == len(levels)
    if not contiguous:
        warnings.warn(
            f"labels {levels.tolist()} remapped to 1..{len(levels)}",
            stacklevel=2)
    y = np.array([remap[int(v)] for v in raw])
    return Dataset(np.asarray(rows, dtype=float), y, len(levels),
                   name=name or str(path))


@dataclass(frozen=True)
class Scaler:
    """Per-feature z-scoring fit on a training set."""

    mean: np.ndarray = field(repr=False)
    scale: np.ndarray = field(repr=False)
    constant: np.ndarray = field(repr=False)  # mask of zero-variance features

    def transform(self, X: np.ndarray) -> np.ndarray:
        out = (np.asarray(X, dtype=float) - self.mean) / self.scale
        out[:, self.constant] = 0.0
        return out


def standardize(train: Dataset, test: Dataset) -> tuple[Dataset, Dataset, Scaler]:
    """Z-score both sets with statistics fit on the training set only.

    Zero-variance training features are mapped to zero in both sets.
    """
    if len(train) == 0:
        raise EmptyDataset("cannot standardize an empty training set")
    mean = train.X.mean(axis=0)
    std = train.X.std(axis=0)
    constant = std == 0.0
    scale = np.where(constant, 1.0, std)
    scaler = Scaler(mean=mean, scale=scale, constant=constant)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        train_out = Dataset(scaler.transform(train.X), train.y,
                            train.n_classes, train.name)
        test_out = Dataset(scaler.transform(test.X), test.y,
                           test.n_classes, test.name)
    return train_out, test_out, scaler


def split(data: Dataset, ratio: float, seed: int, count: int
          ) -> list[tuple[Dataset, Dataset]]:
    """``count`` independent stratified train/test splits.

    Deterministic in ``seed``.  Class proportions carry over by
    largest-remainder rounding, every class lands in every training
    set, and the total training size is round(ratio * n).
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    counts = np.bincount(data.y, minlength=data.n_classes + 1)[1:]
    if counts.min() < 2:
        lacking = int(np.argmin(counts)) + 1
        raise TooSmall(
            f"class {lacking} has {counts.min()} example(s); need at least 2")

    n = len(data)
    target_train = int(round(ratio * n))
    target_train = min(max(target_train, data.n_classes), n - 1)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        quotas = _largest_remainder(counts, target_train)
        train_idx = []
        test_idx = []
        for cls in range(1, data.n_classes + 1):
            members = np.flatnonzero(data.y == cls)
            members = members[rng.permutation(len(members))]
            take = quotas[cls - 1]
            train_idx.extend(members[:take])
            test_idx.extend(members[take:])
        train_idx = np.sort(np.asarray(train_idx))
        test_idx = np.sort(np.asarray(test_idx))
        out.append((data.subset(train_idx), data.subset(test_idx)))
    return out


def stratified_folds(data: Dataset, n_folds: int, seed: int) -> list[np.ndarray]:
    """Index folds for cross-validation, each class dealt round-robin."""
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(n_folds)]
    for cls in range(1, data.n_classes + 1):
        members = np.flatnonzero(data.y == cls)
        members = members[rng.permutation(len(members))]
        for pos, idx in enumerate(members):
            folds[pos % n_folds].append(int(idx))
    return [np.sort(np.asarray(f, dtype=int)) for f in folds]


def equal_frequency_bins(values, n_bins: int) -> np.ndarray:
    """1-based ordinal labels from rank-based equal-frequency binning.

    Bin sizes differ by at most one; ties are split by input order,
    deterministically.
    """
    values = np.asarray(values, dtype=float)
    if n_bins < 2:
        raise ValueError(f"need at least 2 bins, got {n_bins}")
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=int)
    ranks[order] = np.arange(len(values))
    return (ranks * n_bins) // len(values) + 1


def _largest_remainder(counts: np.ndarray, total: int) -> np.ndarray:
    """Class quotas summing to ``total``, each at least 1, at most count - 1."""
    shares = counts * (total / counts.sum())
    quotas = np.maximum(np.floor(shares).astype(int), 1)
    quotas = np.minimum(quotas, counts - 1)
    remainder = total - quotas.sum()
    order = np.argsort(-(shares - np.floor(shares)), kind="stable")
    i = 0
    while remainder != 0 and i < 10 * len(counts):
        cls = order[i % len(counts)]
        if remainder > 0 and quotas[cls] < counts[cls] - 1:
            quotas[cls] += 1
            remainder -= 1
        elif remainder < 0 and quotas[cls] > 1:
            quotas[cls] -= 1
            remainder += 1
        i += 1
    return quotas
