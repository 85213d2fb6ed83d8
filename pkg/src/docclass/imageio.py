"""Image decoding: binary PPM (P6) is the mandatory interchange format,
8-bit RGB PNG is optional (via Pillow), device LCH arrives as raw planar
float32 with sidecar-declared ranges."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ValidationError
from .raster import ColorSpace, LchRanges, Raster


def _ppm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping # comments."""
    tokens = []
    i = 0
    while len(tokens) < count:
        if i >= len(data):
            raise ValidationError("truncated PPM header")
        c = data[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace():
                j += 1
            tokens.append(data[i:j])
            i = j
    return tokens, i


def read_ppm(path: str | Path) -> Raster:
    data = Path(path).read_bytes()
    if not data.startswith(b"P6"):
        raise ValidationError(f"{path}: not a binary (P6) PPM file")
    tokens, pos = _ppm_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ValidationError(f"{path}: malformed PPM header") from exc
    if maxval != 255:
        raise ValidationError(f"{path}: only 8-bit PPM supported (maxval {maxval})")
    pos += 1  # single whitespace byte after maxval
    needed = width * height * 3
    if len(data) - pos < needed:
        raise ValidationError(f"{path}: truncated pixel data")
    pixels = np.frombuffer(data, dtype=np.uint8, count=needed, offset=pos)
    if pixels.size != width * height * 3:
        raise ValidationError(f"{path}: truncated PPM pixel data")
    rgb = pixels.reshape(height, width, 3).astype(np.float64)
    return Raster(ColorSpace.RGB8, (rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]))


def write_ppm(path: str | Path, raster: Raster) -> None:
    if raster.space is not ColorSpace.RGB8:
        raise ValidationError("write_ppm expects an RGB8 raster")
    rgb = np.stack(raster.planes, axis=-1)
    body = np.rint(rgb).clip(0, 255).astype(np.uint8).tobytes()
    header = f"P6\n{raster.width} {raster.height}\n255\n".encode()
    Path(path).write_bytes(header + body)


def read_png(path: str | Path) -> Raster:
    from PIL import Image

    with Image.open(path) as img:
        rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
    return Raster(ColorSpace.RGB8, (rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]))


def read_lch_raw(
    path: str | Path, width: int, height: int, ranges: LchRanges
) -> Raster:
    """Raw planar little-endian float32, planes in L, C, H order."""
    raw = np.fromfile(str(path), dtype="<f4")
    n = width * height
    if raw.size != 3 * n:
        raise ValidationError(
            f"{path}: expected {3 * n} float32 samples, found {raw.size}"
        )
    planes = raw.astype(np.float64).reshape(3, height, width)
    return Raster(ColorSpace.LCH, (planes[0], planes[1], planes[2]), lch=ranges)


def read_image(path: str | Path) -> Raster:
    """Decode by extension: .ppm mandatory path, .png optional path."""
    suffix = Path(path).suffix.lower()
    if suffix == ".ppm":
        return read_ppm(path)
    if suffix == ".png":
        return read_png(path)
    raise ValidationError(f"{path}: unsupported image format '{suffix}'")
