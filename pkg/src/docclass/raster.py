"""Page raster representation, color conversion and 32x32 block partitioning.

All feature math downstream runs on real-valued (float64) channel planes;
8-bit integer sources are promoted at decode time. Rasters are immutable
after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidSpaceError, RasterTooSmallError, ValidationError

BLOCK_SIZE = 32

# BT.601 full-range (JPEG YCbCr) coefficients, pinned here and golden-tested.
# Y in [0,255]; U,V stored signed, centered at 0.
YUV_MATRIX = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168736, -0.331264, 0.5],
        [0.5, -0.418688, -0.081312],
    ]
)


class ColorSpace(str, Enum):
    RGB8 = "rgb8"
    YUV = "yuv"
    LCH = "lch"


@dataclass(frozen=True)
class LchRanges:
    """Declared value ranges of a device LCH source (no universal default)."""

    l_max: float
    c_max: float

    def __post_init__(self):
        if not (self.l_max > 0 and self.c_max > 0):
            raise ValidationError("LCH ranges must be positive")


@dataclass(frozen=True)
class Raster:
    """Decoded page image: a color-space tag plus three channel planes."""

    space: ColorSpace
    planes: tuple[np.ndarray, np.ndarray, np.ndarray]
    lch: LchRanges | None = field(default=None)

    def __post_init__(self):
        if len(self.planes) != 3:
            raise ValidationError("raster needs exactly three planes")
        shape = self.planes[0].shape
        planes = tuple(np.ascontiguousarray(p, dtype=np.float64) for p in self.planes)
        for p in planes:
            if p.ndim != 2 or p.shape != shape:
                raise ValidationError("plane shapes differ or are not 2-D")
            if not np.isfinite(p).all():
                raise ValidationError("plane contains non-finite samples")
            p.setflags(write=False)
        object.__setattr__(self, "planes", planes)
        self._check_ranges()

    def _check_ranges(self):
        a, b, c = self.planes
        if self.space is ColorSpace.RGB8:
            lo = min(p.min() for p in self.planes)
            hi = max(p.max() for p in self.planes)
            if lo < 0 or hi > 255:
                raise ValidationError("RGB8 samples outside [0, 255]")
        elif self.space is ColorSpace.YUV:
            if a.min() < 0 or a.max() > 255:
                raise ValidationError("Y samples outside [0, 255]")
            for p in (b, c):
                if p.min() < -128 or p.max() >= 128:
                    raise ValidationError("U/V samples outside [-128, 128)")
        elif self.space is ColorSpace.LCH:
            if self.lch is None:
                raise ValidationError("LCH raster requires declared ranges")
            if a.min() < 0 or a.max() > self.lch.l_max:
                raise ValidationError("L samples outside declared range")
            if b.min() < 0:
                raise ValidationError("C samples must be non-negative")
            if c.min() < 0 or c.max() >= 360:
                raise ValidationError("H samples outside [0, 360)")

    @property
    def height(self) -> int:
        return self.planes[0].shape[0]

    @property
    def width(self) -> int:
        return self.planes[0].shape[1]


def rgb_to_yuv(raster: Raster) -> Raster:
    """BT.601 full-range RGB -> YUV with U,V centered at 0."""
    if raster.space is not ColorSpace.RGB8:
        raise InvalidSpaceError(f"expected RGB8 input, got {raster.space.value}")
    r, g, b = raster.planes
    y = YUV_MATRIX[0, 0] * r + YUV_MATRIX[0, 1] * g + YUV_MATRIX[0, 2] * b
    u = YUV_MATRIX[1, 0] * r + YUV_MATRIX[1, 1] * g + YUV_MATRIX[1, 2] * b
    v = YUV_MATRIX[2, 0] * r + YUV_MATRIX[2, 1] * g + YUV_MATRIX[2, 2] * b
    return Raster(ColorSpace.YUV, (y, u, v))


def luminance_plane(raster: Raster) -> np.ndarray:
    """Luminance on the common [0, 255] scale (LCH gets rescaled L)."""
    if raster.space is ColorSpace.YUV:
        return raster.planes[0]
    if raster.space is ColorSpace.LCH:
        return raster.planes[0] * (255.0 / raster.lch.l_max)
    raise InvalidSpaceError("convert RGB to YUV before feature extraction")


def chroma_strength(raster: Raster) -> np.ndarray:
    """Per-pixel colorfulness: |U|+|V| in YUV, the C channel in LCH."""
    if raster.space is ColorSpace.YUV:
        return np.abs(raster.planes[1]) + np.abs(raster.planes[2])
    if raster.space is ColorSpace.LCH:
        return raster.planes[1]
    raise InvalidSpaceError("chroma strength needs a YUV or LCH raster")


@dataclass(frozen=True)
class BlockGrid:
    """Disjoint 32x32 tiling; right/bottom remainders are dropped."""

    rows: int
    cols: int
    block_size: int = BLOCK_SIZE

    @property
    def n_blocks(self) -> int:
        return self.rows * self.cols

    def crop(self, plane: np.ndarray) -> np.ndarray:
        bs = self.block_size
        return plane[: self.rows * bs, : self.cols * bs]

    def block_view(self, plane: np.ndarray) -> np.ndarray:
        """View of shape (rows, cols, bs, bs) over the cropped plane."""
        bs = self.block_size
        return self.crop(plane).reshape(self.rows, bs, self.cols, bs).swapaxes(1, 2)

    def block_ids(self, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
        """Block index for pixel coordinates; -1 for pixels in the dropped margin."""
        by = ys // self.block_size
        bx = xs // self.block_size
        ids = by * self.cols + bx
        return np.where((by < self.rows) & (bx < self.cols), ids, -1)


def partition_blocks(raster: Raster, block_size: int = BLOCK_SIZE) -> BlockGrid:
    rows = raster.height // block_size
    cols = raster.width // block_size
    if rows < 1 or cols < 1:
        raise RasterTooSmallError(
            f"{raster.width}x{raster.height} raster is smaller than one "
            f"{block_size}x{block_size} block"
        )
    return BlockGrid(rows=rows, cols=cols, block_size=block_size)
