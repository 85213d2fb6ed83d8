"""The eight per-page scalar features.

Four features come from the earlier three-class work (histogram flatness,
color variability, text edge count, text color variance) and four are the
chroma-based additions (chroma-around-text, chroma histogram flatness,
white block ratio, color block ratio). Everything is computed on 32x32
blocks of a YUV or LCH raster; all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np

from .errors import InvalidSpaceError
from .raster import (
    BlockGrid,
    ColorSpace,
    Raster,
    chroma_strength,
    luminance_plane,
    partition_blocks,
)

FEATURE_NAMES = (
    "hist_flatness",
    "color_variability",
    "text_edge_count",
    "text_color_variance",
    "chroma_around_text",
    "chroma_hist_flatness",
    "white_block_ratio",
    "color_block_ratio",
)
N_FEATURES = len(FEATURE_NAMES)


class ClassLabel(IntEnum):
    MIX = 1
    TEXT = 2
    PICTURE = 3
    RECEIPT = 4
    HIGHLIGHT = 5


@dataclass(frozen=True)
class FeatureConfig:
    """All tunable thresholds in one place; defaults are the pinned values."""

    edge_contrast: float = 50.0      # minimum |Y(n+1) - Y(n-1)| for a text edge
    y_dark: float = 128.0            # dark side of an edge must be at or below
    y_light: float = 160.0           # light side must be at or above
    chroma_color_threshold: float = 10.0   # T_c: pixel counts as colored above this
    color_block_fraction: float = 0.10     # block is colored if > this fraction
    white_luminance: float = 230.0         # Y threshold for white pixels
    white_block_fraction: float = 0.95     # block is white if >= this fraction
    min_block_samples: int = 8       # per-block sample floor for mean/std features
    std_floor: float = 1e-6          # clamp for std in chroma-around-text
    sample_offsets: tuple[int, int] = (2, 3)  # chroma probes beyond the edge pixel
    c_max: float = 128.0             # top of the chroma axis for CH histograms


DEFAULT_CONFIG = FeatureConfig()


class HistogramLayout(str, Enum):
    UV8x8 = "uv8x8"
    CH8x8 = "ch8x8"


# Bin ids excluded as "close to gray": the 2x2 bins around the UV origin,
# and the innermost chroma ring (all 8 hue segments) for CH.
UV_EXCLUDED = frozenset({27, 28, 35, 36})
CH_EXCLUDED = frozenset(range(8))


@dataclass(frozen=True)
class ChromaHistogram:
    bins: np.ndarray                 # 64 non-negative counts
    layout: HistogramLayout
    included_bin_ids: frozenset = field(default=None)

    def __post_init__(self):
        if self.included_bin_ids is None:
            ids = UV_EXCLUDED if self.layout is HistogramLayout.UV8x8 else CH_EXCLUDED
            object.__setattr__(
                self, "included_bin_ids", frozenset(range(64)) - ids
            )


@dataclass(frozen=True)
class FeatureVector:
    """Ordered 8-dimensional feature vector plus its active-feature mask."""

    values: np.ndarray
    mask: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (N_FEATURES,) or not np.isfinite(values).all():
            raise ValueError("feature vector must be 8 finite reals")
        mask = self.mask
        if mask is None:
            mask = np.ones(N_FEATURES, dtype=bool)
        mask = np.asarray(mask, dtype=bool)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    def to_record(self, path: str = "", label: ClassLabel | None = None) -> dict:
        rec = {"path": path, "features": self.values.tolist(),
               "mask": self.mask.astype(int).tolist()}
        if label is not None:
            rec["class"] = int(label)
        return rec

    def to_csv_row(self, path: str = "", label: ClassLabel | None = None) -> str:
        cells = [path, "" if label is None else str(int(label))]
        cells += [repr(v) for v in self.values.tolist()]
        cells.append("".join("1" if m else "0" for m in self.mask))
        return ",".join(cells)


# ---------------------------------------------------------------------------
# chroma histograms and flatness

def _chroma_bin_indices(raster: Raster, cfg: FeatureConfig) -> tuple[np.ndarray, HistogramLayout]:
    """Map every pixel to its 8x8 chroma bin id."""
    if raster.space is ColorSpace.YUV:
        u, v = raster.planes[1], raster.planes[2]
        iu = np.clip(np.floor((u + 128.0) / 32.0), 0, 7).astype(np.intp)
        iv = np.clip(np.floor((v + 128.0) / 32.0), 0, 7).astype(np.intp)
        return iu * 8 + iv, HistogramLayout.UV8x8
    if raster.space is ColorSpace.LCH:
        c, h = raster.planes[1], raster.planes[2]
        c_max = raster.lch.c_max if raster.lch is not None else cfg.c_max
        ic = np.clip(np.floor(c / (c_max / 8.0)), 0, 7).astype(np.intp)
        ih = np.clip(np.floor(h / 45.0), 0, 7).astype(np.intp)
        return ic * 8 + ih, HistogramLayout.CH8x8
    raise InvalidSpaceError("chroma histogram needs a YUV or LCH raster")


def chroma_histogram(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG) -> ChromaHistogram:
    """Histogram all pixels of a (typically 32x32) raster on the chroma plane."""
    bin_ids, layout = _chroma_bin_indices(raster, cfg)
    counts = np.bincount(bin_ids.ravel(), minlength=64)
    return ChromaHistogram(bins=counts, layout=layout)


def _flatness(counts: np.ndarray) -> float:
    """Geometric over arithmetic mean after add-one smoothing.

    Returns exactly 1.0 when all smoothed bins are equal (AM = GM).
    """
    h = counts.astype(np.float64) + 1.0
    if h.min() == h.max():
        return 1.0
    gm = np.exp(np.mean(np.log(h)))
    return float(gm / np.mean(h))


def chroma_flatness_block(hist: ChromaHistogram) -> float:
    ids = np.fromiter(sorted(hist.included_bin_ids), dtype=np.intp)
    return _flatness(np.asarray(hist.bins)[ids])


def _per_block_flatness(counts: np.ndarray, included: np.ndarray) -> np.ndarray:
    """Vectorized smoothed GM/AM flatness over a (n_blocks, 64) count matrix."""
    h = counts[:, included].astype(np.float64) + 1.0
    flat = np.exp(np.mean(np.log(h), axis=1)) / np.mean(h, axis=1)
    equal = h.min(axis=1) == h.max(axis=1)
    flat[equal] = 1.0
    return flat


def chroma_histogram_flatness(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG,
                              grid: BlockGrid | None = None) -> float:
    """Maximum per-block chroma flatness over the page."""
    grid = grid or partition_blocks(raster)
    bin_ids, layout = _chroma_bin_indices(raster, cfg)
    block_of = _pixel_block_ids(grid)
    counts = np.bincount(
        block_of.ravel() * 64 + grid.crop(bin_ids).ravel(),
        minlength=grid.n_blocks * 64,
    ).reshape(grid.n_blocks, 64)
    excluded = UV_EXCLUDED if layout is HistogramLayout.UV8x8 else CH_EXCLUDED
    included = np.array([i for i in range(64) if i not in excluded], dtype=np.intp)
    return float(_per_block_flatness(counts, included).max())


def _pixel_block_ids(grid: BlockGrid) -> np.ndarray:
    bs = grid.block_size
    by = np.arange(grid.rows * bs) // bs
    bx = np.arange(grid.cols * bs) // bs
    return by[:, None] * grid.cols + bx[None, :]


# ---------------------------------------------------------------------------
# text edges

LEFT, RIGHT, UP, DOWN = 1, 2, 3, 4


@dataclass(frozen=True)
class TextEdgeMap:
    """Per-pixel edge flags and the luminance-increase direction of each."""

    flags: np.ndarray       # bool (H, W)
    directions: np.ndarray  # int8 (H, W): 0 none, 1 left, 2 right, 3 up, 4 down


def detect_text_edges(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG) -> TextEdgeMap:
    """Dark-on-light text edge pixels.

    A pixel qualifies when its horizontal (or vertical) neighbors show
    enough contrast, the dark side is at or below y_dark, the light side at
    or above y_light, and the pixel itself sits on the dark (text) side.
    Horizontal edges take priority when both orientations pass.
    """
    y = luminance_plane(raster)
    flags = np.zeros(y.shape, dtype=bool)
    dirs = np.zeros(y.shape, dtype=np.int8)

    left, right = y[:, :-2], y[:, 2:]
    cand = (
        (np.abs(right - left) >= cfg.edge_contrast)
        & (np.minimum(left, right) <= cfg.y_dark)
        & (np.maximum(left, right) >= cfg.y_light)
        & (y[:, 1:-1] <= cfg.y_dark)
    )
    flags[:, 1:-1] = cand
    dirs[:, 1:-1] = np.where(cand, np.where(right > left, RIGHT, LEFT), 0)

    up, down = y[:-2, :], y[2:, :]
    cand_v = (
        (np.abs(down - up) >= cfg.edge_contrast)
        & (np.minimum(up, down) <= cfg.y_dark)
        & (np.maximum(up, down) >= cfg.y_light)
        & (y[1:-1, :] <= cfg.y_dark)
    )
    new_v = cand_v & ~flags[1:-1, :]
    center_dirs = dirs[1:-1, :]
    center_dirs[new_v] = np.where(down > up, DOWN, UP)[new_v]
    flags[1:-1, :] |= cand_v
    return TextEdgeMap(flags=flags, directions=dirs)


def text_edge_count(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG,
                    edges: TextEdgeMap | None = None) -> float:
    """Edge-pixel density: count normalized by total pixel count."""
    edges = edges or detect_text_edges(raster, cfg)
    return float(edges.flags.sum()) / edges.flags.size


_DIR_STEPS = {LEFT: (0, -1), RIGHT: (0, 1), UP: (-1, 0), DOWN: (1, 0)}


def _edge_samples(raster: Raster, cfg: FeatureConfig, edges: TextEdgeMap,
                  grid: BlockGrid) -> tuple[np.ndarray, np.ndarray]:
    """Chroma samples just beyond each edge pixel and their block ids."""
    cs = chroma_strength(raster)
    ys, xs = np.nonzero(edges.flags)
    d = edges.directions[ys, xs]
    dy = np.zeros(d.size, dtype=np.intp)
    dx = np.zeros(d.size, dtype=np.intp)
    for code, (sy, sx) in _DIR_STEPS.items():
        sel = d == code
        dy[sel], dx[sel] = sy, sx
    block = grid.block_ids(ys, xs)
    values, blocks = [], []
    h, w = cs.shape
    for k in cfg.sample_offsets:
        py, px = ys + k * dy, xs + k * dx
        ok = (py >= 0) & (py < h) & (px >= 0) & (px < w) & (block >= 0)
        values.append(cs[py[ok], px[ok]])
        blocks.append(block[ok])
    return np.concatenate(values), np.concatenate(blocks)


def chroma_around_text(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG,
                       edges: TextEdgeMap | None = None,
                       grid: BlockGrid | None = None) -> float:
    """Max over blocks of mean/std of chroma sampled just beyond text edges."""
    grid = grid or partition_blocks(raster)
    edges = edges or detect_text_edges(raster, cfg)
    values, blocks = _edge_samples(raster, cfg, edges, grid)
    if values.size == 0:
        return 0.0
    n = np.bincount(blocks, minlength=grid.n_blocks)
    s = np.bincount(blocks, weights=values, minlength=grid.n_blocks)
    s2 = np.bincount(blocks, weights=values * values, minlength=grid.n_blocks)
    qual = n >= cfg.min_block_samples
    if not qual.any():
        return 0.0
    mean = s[qual] / n[qual]
    var = np.maximum(s2[qual] / n[qual] - mean * mean, 0.0)
    c_i = mean / np.maximum(np.sqrt(var), cfg.std_floor)
    return float(c_i.max())


def text_color_variance(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG,
                        edges: TextEdgeMap | None = None,
                        grid: BlockGrid | None = None) -> float:
    """Mean per-block luminance variance of edge (ink-side) pixels."""
    grid = grid or partition_blocks(raster)
    edges = edges or detect_text_edges(raster, cfg)
    y = luminance_plane(raster)
    ys, xs = np.nonzero(edges.flags)
    block = grid.block_ids(ys, xs)
    keep = block >= 0
    if not keep.any():
        return 0.0
    block = block[keep]
    vals = y[ys[keep], xs[keep]]
    n = np.bincount(block, minlength=grid.n_blocks)
    s = np.bincount(block, weights=vals, minlength=grid.n_blocks)
    s2 = np.bincount(block, weights=vals * vals, minlength=grid.n_blocks)
    qual = n >= cfg.min_block_samples
    if not qual.any():
        return 0.0
    mean = s[qual] / n[qual]
    var = np.maximum(s2[qual] / n[qual] - mean * mean, 0.0)
    return float(var.mean())


# ---------------------------------------------------------------------------
# luminance-domain prior features

def luminance_histogram_flatness(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG,
                                 grid: BlockGrid | None = None) -> float:
    """Mean per-block flatness of a 64-bin luminance histogram."""
    grid = grid or partition_blocks(raster)
    y = luminance_plane(raster)
    bins = np.clip(np.floor(grid.crop(y) / 4.0), 0, 63).astype(np.intp)
    counts = np.bincount(
        _pixel_block_ids(grid).ravel() * 64 + bins.ravel(),
        minlength=grid.n_blocks * 64,
    ).reshape(grid.n_blocks, 64)
    return float(_per_block_flatness(counts, np.arange(64)).mean())


def color_variability(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG,
                      grid: BlockGrid | None = None) -> float:
    """Occupied fraction of a 32-bin histogram over block-mean luminance."""
    grid = grid or partition_blocks(raster)
    means = grid.block_view(luminance_plane(raster)).mean(axis=(2, 3))
    bins = np.clip(np.floor(means / 8.0), 0, 31).astype(np.intp)
    return float(np.unique(bins).size) / 32.0


# ---------------------------------------------------------------------------
# block ratios

def color_block_ratio(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG,
                      grid: BlockGrid | None = None) -> float:
    grid = grid or partition_blocks(raster)
    colored = grid.block_view(chroma_strength(raster)) > cfg.chroma_color_threshold
    frac = colored.mean(axis=(2, 3))
    return float((frac > cfg.color_block_fraction).mean())


def white_block_ratio(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG,
                      grid: BlockGrid | None = None) -> float:
    grid = grid or partition_blocks(raster)
    white = grid.block_view(luminance_plane(raster)) > cfg.white_luminance
    frac = white.mean(axis=(2, 3))
    return float((frac >= cfg.white_block_fraction).mean())


# ---------------------------------------------------------------------------
# assembly

def extract_features(raster: Raster, cfg: FeatureConfig = DEFAULT_CONFIG) -> FeatureVector:
    """All eight features in the canonical order; deterministic per input."""
    from .raster import rgb_to_yuv

    if raster.space is ColorSpace.RGB8:
        raster = rgb_to_yuv(raster)
    grid = partition_blocks(raster)
    edges = detect_text_edges(raster, cfg)
    values = np.array([
        luminance_histogram_flatness(raster, cfg, grid),
        color_variability(raster, cfg, grid),
        text_edge_count(raster, cfg, edges),
        text_color_variance(raster, cfg, edges, grid),
        chroma_around_text(raster, cfg, edges, grid),
        chroma_histogram_flatness(raster, cfg, grid),
        white_block_ratio(raster, cfg, grid),
        color_block_ratio(raster, cfg, grid),
    ])
    return FeatureVector(values=values)


# Standalone per-feature callables in canonical order, used for timing runs.
FEATURE_FUNCS = (
    ("hist_flatness", luminance_histogram_flatness),
    ("color_variability", color_variability),
    ("text_edge_count", text_edge_count),
    ("text_color_variance", text_color_variance),
    ("chroma_around_text", chroma_around_text),
    ("chroma_hist_flatness", chroma_histogram_flatness),
    ("white_block_ratio", white_block_ratio),
    ("color_block_ratio", color_block_ratio),
)
