"""Five-class DAG-SVM: ten pairwise binary SVMs in a first-vs-last
elimination graph over the fixed class order [mix, text, picture,
receipt, highlight]. The root decision is mix vs highlight."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, IncompleteDatasetError
from .features import ClassLabel
from .svm import (
    DEFAULT_SMO,
    BinarySvmModel,
    SmoConfig,
    StandardizationStats,
    train_binary,
)

CLASS_ORDER = tuple(ClassLabel)  # codes 1..5


def class_pairs() -> list[tuple[int, int]]:
    """All unordered class pairs (i, j) with i < j."""
    codes = [int(c) for c in CLASS_ORDER]
    return [(i, j) for k, i in enumerate(codes) for j in codes[k + 1:]]


@dataclass(frozen=True)
class DagSvmModel:
    pairwise: dict          # (i, j), i < j -> node with .decision_value
    stats: StandardizationStats
    mask: np.ndarray        # active-feature bitset over the raw vector
    sigma: float
    box_c: float
    class_order: tuple = field(default=CLASS_ORDER)

    def prepare(self, features: np.ndarray) -> np.ndarray:
        """Mask then standardize one raw feature vector."""
        features = np.asarray(features, dtype=np.float64)
        if features.shape != (self.mask.size,):
            raise DimensionMismatchError(
                f"expected {self.mask.size} raw features, got {features.shape}"
            )
        return self.stats.apply(features[self.mask])


def train_dag(X: np.ndarray, y: np.ndarray, sigma: float, box_c: float,
              mask: np.ndarray | None = None,
              smo: SmoConfig = DEFAULT_SMO) -> DagSvmModel:
    """Fit standardization on the full training set, then all 10 nodes.

    Each node is trained only on the samples of its two classes, with the
    lower class code mapped to +1. One (sigma, box_c) is shared by every
    node.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.intp).ravel()
    if mask is None:
        mask = np.ones(X.shape[1], dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    present = set(int(v) for v in np.unique(y))
    missing = [c.name for c in CLASS_ORDER if int(c) not in present]
    if missing:
        raise IncompleteDatasetError(f"dataset missing class(es): {missing}")

    Xm = X[:, mask]
    stats = StandardizationStats.fit(Xm)
    Z = stats.apply(Xm)

    pairwise = {}
    for i, j in class_pairs():
        sel = (y == i) | (y == j)
        labels = np.where(y[sel] == i, 1.0, -1.0)
        pairwise[(i, j)] = train_binary(Z[sel], labels, sigma, box_c, smo)
    return DagSvmModel(pairwise=pairwise, stats=stats, mask=mask,
                       sigma=float(sigma), box_c=float(box_c))


def classify_trace(model: DagSvmModel, features: np.ndarray
                   ) -> tuple[ClassLabel, list[tuple[tuple[int, int], float]]]:
    """Label plus the ((i, j), decision value) of each of the 4 node visits.

    Candidates start as [1..5]; each step evaluates the (first, last) node
    and removes the losing class from its end of the list. A decision
    value >= 0 means the lower class code (+1 side) wins.
    """
    z = model.prepare(features)
    candidates = [int(c) for c in model.class_order]
    trace = []
    while len(candidates) > 1:
        i, j = candidates[0], candidates[-1]
        d = model.pairwise[(i, j)].decision_value(z)
        trace.append(((i, j), float(d)))
        if d >= 0.0:
            candidates.pop()      # lower code wins, last class eliminated
        else:
            candidates.pop(0)
    return ClassLabel(candidates[0]), trace


def classify(model: DagSvmModel, features: np.ndarray) -> ClassLabel:
    label, _ = classify_trace(model, features)
    return label


def classify_batch(model: DagSvmModel, X: np.ndarray) -> np.ndarray:
    return np.array([int(classify(model, x)) for x in np.atleast_2d(X)],
                    dtype=np.intp)
