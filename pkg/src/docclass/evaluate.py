"""Weighted misclassification metric, leave-one-out cross-validation,
exhaustive (sigma, C) grid search, and leave-one-out feature selection."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .dagsvm import classify, train_dag
from .errors import (
    InsufficientDataError,
    UndefinedImpactError,
    ValidationError,
)
from .features import FEATURE_FUNCS, FEATURE_NAMES, ClassLabel, FeatureConfig, DEFAULT_CONFIG
from .svm import DEFAULT_SMO, SmoConfig

N_CLASSES = len(ClassLabel)

# Misclassification weights w(truth, prediction); rows/cols in class-code order.
DEFAULT_WEIGHTS = np.array(
    [
        [0, 3, 5, 6, 4],
        [3, 0, 10, 6, 2],
        [3, 10, 0, 10, 15],
        [6, 8, 3, 0, 8],
        [10, 10, 10, 10, 0],
    ],
    dtype=np.float64,
)

DEFAULT_SIGMA_GRID = (0.1, 0.3, 1.0, 3.0, 10.0)
DEFAULT_C_GRID = (0.1, 1.0, 10.0, 100.0)


def load_weight_table(path) -> np.ndarray:
    """5x5 weight table from JSON (plain nested array or {"w": [...]})."""
    with open(path) as fh:
        data = json.load(fh)
    w = np.asarray(data["w"] if isinstance(data, dict) else data, dtype=np.float64)
    validate_weight_table(w)
    return w


def validate_weight_table(w: np.ndarray) -> None:
    if w.shape != (N_CLASSES, N_CLASSES):
        raise ValidationError("weight table must be 5x5")
    if (w < 0).any():
        raise ValidationError("weights must be non-negative")
    if np.diag(w).any():
        raise ValidationError("weight table diagonal must be zero")


def weighted_misclassification(conf: np.ndarray, weights: np.ndarray,
                               normalization: str = "per_class") -> float:
    """Cost-weighted confusion counts, normalized per ground-truth row.

    ``normalization="total"`` divides the weighted sum by the grand total
    instead (alternative reading of the printed formula's denominator).
    Rows with zero count contribute 0.
    """
    conf = np.asarray(conf, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if conf.shape != (N_CLASSES, N_CLASSES) or weights.shape != (N_CLASSES, N_CLASSES):
        raise ValidationError("confusion matrix and weights must be 5x5")
    weighted = weights * conf
    if normalization == "total":
        total = conf.sum()
        return float(weighted.sum() / total) if total else 0.0
    if normalization != "per_class":
        raise ValidationError(f"unknown normalization '{normalization}'")
    row_totals = conf.sum(axis=1)
    out = 0.0
    for i in range(N_CLASSES):
        if row_totals[i] > 0:
            out += weighted[i].sum() / row_totals[i]
    return float(out)


def loo_cross_validate(X: np.ndarray, y: np.ndarray, sigma: float, box_c: float,
                       mask: np.ndarray | None = None,
                       smo: SmoConfig = DEFAULT_SMO) -> np.ndarray:
    """Leave-one-out confusion matrix n(truth, prediction).

    Standardization is refit on every fold's training split; the procedure
    is deterministic.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.intp).ravel()
    for label in ClassLabel:
        if np.sum(y == int(label)) < 2:
            raise InsufficientDataError(
                f"class {label.name} has fewer than 2 samples"
            )
    conf = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    idx = np.arange(y.size)
    for k in range(y.size):
        train = idx != k
        model = train_dag(X[train], y[train], sigma, box_c, mask, smo)
        pred = classify(model, X[k])
        conf[y[k] - 1, int(pred) - 1] += 1
    return conf


@dataclass(frozen=True)
class GridSearchResult:
    sigma: float
    box_c: float
    wm: float
    confusion: np.ndarray
    sweep: tuple = ()   # ((sigma, box_c, wm), ...) for every grid point


def grid_search(X: np.ndarray, y: np.ndarray,
                sigma_grid=DEFAULT_SIGMA_GRID, c_grid=DEFAULT_C_GRID,
                mask: np.ndarray | None = None,
                weights: np.ndarray = DEFAULT_WEIGHTS,
                smo: SmoConfig = DEFAULT_SMO) -> GridSearchResult:
    """Exhaustive LOO sweep; returns the W_m minimizer.

    Ties break toward smaller sigma, then smaller C (grids are sorted
    before the sweep to pin this).
    """
    sigma_grid = sorted(float(s) for s in sigma_grid)
    c_grid = sorted(float(c) for c in c_grid)
    if not sigma_grid or not c_grid:
        raise ValidationError("sigma and C grids must be non-empty")
    best = None
    sweep = []
    for sigma in sigma_grid:
        for box_c in c_grid:
            conf = loo_cross_validate(X, y, sigma, box_c, mask, smo)
            wm = weighted_misclassification(conf, weights)
            sweep.append((sigma, box_c, wm))
            if best is None or wm < best.wm:
                best = GridSearchResult(sigma, box_c, wm, conf)
    return GridSearchResult(best.sigma, best.box_c, best.wm, best.confusion,
                            tuple(sweep))


def impact_factor(X: np.ndarray, y: np.ndarray, feature: int, sigma: float,
                  box_c: float, weights: np.ndarray = DEFAULT_WEIGHTS,
                  baseline_wm: float | None = None,
                  smo: SmoConfig = DEFAULT_SMO) -> float:
    """Relative W_m increase when one feature is masked out of the LOO run."""
    n_dims = np.asarray(X).shape[1]
    if baseline_wm is None:
        baseline_wm = weighted_misclassification(
            loo_cross_validate(X, y, sigma, box_c, None, smo), weights
        )
    if baseline_wm == 0.0:
        raise UndefinedImpactError(
            "baseline weighted misclassification is zero; impact undefined"
        )
    mask = np.ones(n_dims, dtype=bool)
    mask[feature] = False
    dropped_wm = weighted_misclassification(
        loo_cross_validate(X, y, sigma, box_c, mask, smo), weights
    )
    return (dropped_wm - baseline_wm) / baseline_wm


@dataclass(frozen=True)
class SelectionReport:
    """Per-feature impact factor and mean extraction time."""

    impact: np.ndarray       # I_d per feature
    times_ms: np.ndarray     # mean extraction milliseconds per feature
    baseline_wm: float
    names: tuple = field(default=FEATURE_NAMES)

    def to_json(self) -> str:
        return json.dumps(
            {
                "baseline_wm": self.baseline_wm,
                "features": [
                    {"name": n, "impact": float(i), "time_ms": float(t)}
                    for n, i, t in zip(self.names, self.impact, self.times_ms)
                ],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "SelectionReport":
        data = json.loads(text)
        feats = data["features"]
        return cls(
            impact=np.array([f["impact"] for f in feats]),
            times_ms=np.array([f["time_ms"] for f in feats]),
            baseline_wm=float(data["baseline_wm"]),
            names=tuple(f["name"] for f in feats),
        )

    def format_table(self) -> str:
        width = max(len(n) for n in self.names) + 2
        lines = [
            f"{'feature':<{width}}{'time (ms)':>12}{'impact':>12}",
        ]
        for n, i, t in zip(self.names, self.impact, self.times_ms):
            lines.append(f"{n:<{width}}{t:>12.3f}{100.0 * i:>11.2f}%")
        lines.append(f"baseline W_m = {self.baseline_wm:.6g}")
        return "\n".join(lines)


def compute_impacts(X: np.ndarray, y: np.ndarray, sigma: float, box_c: float,
                    weights: np.ndarray = DEFAULT_WEIGHTS,
                    smo: SmoConfig = DEFAULT_SMO) -> tuple[np.ndarray, float]:
    """I_d for every feature column at a fixed (sigma, C)."""
    baseline = weighted_misclassification(
        loo_cross_validate(X, y, sigma, box_c, None, smo), weights
    )
    if baseline == 0.0:
        raise UndefinedImpactError(
            "baseline weighted misclassification is zero; impact undefined"
        )
    n_dims = np.asarray(X).shape[1]
    impacts = np.array([
        impact_factor(X, y, d, sigma, box_c, weights, baseline, smo)
        for d in range(n_dims)
    ])
    return impacts, baseline


def time_features(rasters, cfg: FeatureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Mean wall-clock milliseconds per feature over the given rasters.

    Each feature is timed standalone (no shared intermediates); the first
    raster gets an untimed warm-up pass.
    """
    rasters = list(rasters)
    if not rasters:
        raise InsufficientDataError("no rasters to time")
    for _, func in FEATURE_FUNCS:
        func(rasters[0], cfg)   # warm-up, excluded from timing
    totals = np.zeros(len(FEATURE_FUNCS))
    for raster in rasters:
        for fi, (_, func) in enumerate(FEATURE_FUNCS):
            start = time.perf_counter()
            func(raster, cfg)
            totals[fi] += time.perf_counter() - start
    return totals / len(rasters) * 1000.0


def select_features(report: SelectionReport, policy: str = "drop-min-impact"
                    ) -> np.ndarray:
    """Recommended active-feature mask.

    Default policy drops the single feature with minimal impact factor;
    among ties the one with maximal extraction time goes, then the highest
    index.
    """
    n = len(report.names)
    mask = np.ones(n, dtype=bool)
    if policy == "keep-all":
        return mask
    if policy != "drop-min-impact":
        raise ValidationError(f"unknown selection policy '{policy}'")
    min_impact = report.impact.min()
    tied = np.flatnonzero(report.impact == min_impact)
    max_time = report.times_ms[tied].max()
    tied = tied[report.times_ms[tied] == max_time]
    mask[tied.max()] = False
    return mask


def format_confusion(conf: np.ndarray) -> str:
    names = [c.name.capitalize() for c in ClassLabel]
    width = max(len(n) for n in names) + 2
    header = " " * width + "".join(f"{n:>{width}}" for n in names)
    lines = [header]
    for i, name in enumerate(names):
        lines.append(f"{name:<{width}}" +
                     "".join(f"{int(v):>{width}}" for v in conf[i]))
    return "\n".join(lines)
