"""Binary soft-margin SVM with an RBF kernel.

Training runs sequential minimal optimization with max-violating-pair
selection. The inner solver is the compiled `_smo` extension when
available, with a numpy fallback selected at import; set
``DOCCLASS_SMO_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTrainingError, DimensionMismatchError, ValidationError

if os.environ.get("DOCCLASS_SMO_BACKEND") == "python":
    from . import _smo_fallback as _smo_impl

    SMO_BACKEND = "python"
else:
    try:
        from . import _smo as _smo_impl

        SMO_BACKEND = "cython"
    except ImportError:
        from . import _smo_fallback as _smo_impl

        SMO_BACKEND = "python"


@dataclass(frozen=True)
class SmoConfig:
    kkt_tol: float = 1e-3
    max_iter: int = 10_000
    alpha_tol: float = 1e-8   # support vectors below this are dropped
    seed: int = 42            # reserved for randomized tie-breaks; selection
                              # is deterministic so it is currently unused


DEFAULT_SMO = SmoConfig()


def rbf_kernel(x: np.ndarray, y: np.ndarray, sigma: float) -> float:
    """exp(-||x - y||^2 / (2 sigma^2))."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"kernel inputs {x.shape} vs {y.shape}")
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    d = x - y
    return float(np.exp(-np.dot(d, d) / (2.0 * sigma * sigma)))


def rbf_gram(X: np.ndarray, Y: np.ndarray, sigma: float) -> np.ndarray:
    """Kernel matrix K[i, j] = rbf(X[i], Y[j], sigma)."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatchError(f"gram inputs {X.shape} vs {Y.shape}")
    sq = (
        np.sum(X * X, axis=1)[:, None]
        + np.sum(Y * Y, axis=1)[None, :]
        - 2.0 * (X @ Y.T)
    )
    return np.exp(-np.maximum(sq, 0.0) / (2.0 * sigma * sigma))


@dataclass(frozen=True)
class StandardizationStats:
    """Per-dimension mean/std fitted on the training split only."""

    mean: np.ndarray
    std: np.ndarray
    STD_FLOOR = 1e-9

    @classmethod
    def fit(cls, X: np.ndarray) -> "StandardizationStats":
        X = np.asarray(X, dtype=np.float64)
        std = np.maximum(X.std(axis=0), cls.STD_FLOOR)
        return cls(mean=X.mean(axis=0), std=std)

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.mean.shape[0]:
            raise DimensionMismatchError(
                f"{X.shape[-1]}-dim input vs {self.mean.shape[0]}-dim stats"
            )
        return (X - self.mean) / self.std


def standardize(X: np.ndarray, stats: StandardizationStats) -> np.ndarray:
    return stats.apply(X)


@dataclass(frozen=True)
class BinarySvmModel:
    support_vectors: np.ndarray   # (n_sv, d)
    dual_coefs: np.ndarray        # alpha_k * y_k per support vector
    bias: float
    sigma: float
    box_c: float

    def decision_values(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.support_vectors.shape[1]:
            raise DimensionMismatchError(
                f"{X.shape[1]}-dim input vs {self.support_vectors.shape[1]}-dim model"
            )
        K = rbf_gram(X, self.support_vectors, self.sigma)
        return K @ self.dual_coefs + self.bias

    def decision_value(self, x: np.ndarray) -> float:
        return float(self.decision_values(x)[0])

    def predict(self, x: np.ndarray) -> int:
        # exact zero resolves to +1
        return 1 if self.decision_value(x) >= 0.0 else -1


def train_binary(X: np.ndarray, y: np.ndarray, sigma: float, box_c: float,
                 config: SmoConfig = DEFAULT_SMO) -> BinarySvmModel:
    """SMO-trained binary SVM; labels must be in {-1, +1}."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ValidationError("samples and labels disagree in length")
    if not np.isfinite(X).all():
        raise ValidationError("non-finite feature value in training data")
    if not np.all(np.abs(y) == 1.0):
        raise ValidationError("labels must be -1 or +1")
    if np.all(y > 0) or np.all(y < 0):
        raise DegenerateTrainingError("training set contains a single class")
    if sigma <= 0 or box_c <= 0:
        raise ValidationError("sigma and box constraint must be positive")

    K = rbf_gram(X, X, sigma)
    alpha, bias, _, _ = _smo_impl.smo_solve(
        K, y, float(box_c), config.kkt_tol, config.max_iter
    )
    alpha = np.asarray(alpha)
    keep = alpha > config.alpha_tol
    return BinarySvmModel(
        support_vectors=X[keep].copy(),
        dual_coefs=alpha[keep] * y[keep],
        bias=float(bias),
        sigma=float(sigma),
        box_c=float(box_c),
    )


def predict_binary(model: BinarySvmModel, x: np.ndarray) -> tuple[int, float]:
    """(label, decision value); ties at exactly 0 resolve to +1."""
    d = model.decision_value(x)
    return (1 if d >= 0.0 else -1), d


def solve_dual(X: np.ndarray, y: np.ndarray, sigma: float, box_c: float,
               config: SmoConfig = DEFAULT_SMO) -> tuple[np.ndarray, float]:
    """Raw dual solution (full alpha vector, bias) for diagnostics."""
    K = rbf_gram(np.asarray(X, np.float64), np.asarray(X, np.float64), sigma)
    alpha, bias, _, _ = _smo_impl.smo_solve(
        np.ascontiguousarray(K), np.asarray(y, np.float64),
        float(box_c), config.kkt_tol, config.max_iter,
    )
    return np.asarray(alpha), float(bias)


def kkt_violations(alpha: np.ndarray, y: np.ndarray, decisions: np.ndarray,
                   box_c: float) -> np.ndarray:
    """Per-sample KKT violation given the full dual solution.

    alpha = 0 requires y*f >= 1, alpha = C requires y*f <= 1, and free
    support vectors require y*f = 1; violations are one-sided distances.
    """
    margins = np.asarray(y, np.float64) * np.asarray(decisions, np.float64)
    alpha = np.asarray(alpha, np.float64)
    viol = np.empty(margins.size)
    at_zero = alpha <= 0
    at_c = alpha >= box_c
    free = ~at_zero & ~at_c
    viol[at_zero] = np.maximum(1.0 - margins[at_zero], 0.0)
    viol[at_c] = np.maximum(margins[at_c] - 1.0, 0.0)
    viol[free] = np.abs(margins[free] - 1.0)
    return viol
