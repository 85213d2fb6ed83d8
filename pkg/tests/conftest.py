import numpy as np
import pytest

from docclass.features import ClassLabel
from docclass.raster import ColorSpace, Raster


def yuv_raster(y, u=None, v=None):
    y = np.asarray(y, dtype=np.float64)
    u = np.zeros_like(y) if u is None else np.broadcast_to(u, y.shape).copy()
    v = np.zeros_like(y) if v is None else np.broadcast_to(v, y.shape).copy()
    return Raster(ColorSpace.YUV, (y, u, v))


def rgb_raster(r, g, b):
    shape = np.asarray(r, dtype=np.float64).shape
    planes = tuple(
        np.broadcast_to(np.asarray(p, dtype=np.float64), shape).copy()
        for p in (r, g, b)
    )
    return Raster(ColorSpace.RGB8, planes)


@pytest.fixture(scope="session")
def small_corpus():
    """Six 256x256 synthetic pages per class, features pre-extracted."""
    from docclass.dataset import SynthSpec, generate
    from docclass.features import extract_features

    X, y = [], []
    for label in ClassLabel:
        for k in range(6):
            raster, _ = generate(
                SynthSpec(label=label, width=256, height=256,
                          seed=1000 + 10 * k + int(label))
            )
            X.append(extract_features(raster).values)
            y.append(int(label))
    return np.array(X), np.array(y, dtype=np.intp)


@pytest.fixture(scope="session")
def blob_features():
    """Margin-separated 8-dim 5-class vectors (no image pipeline)."""
    rng = np.random.default_rng(7)
    X, y = [], []
    centers = rng.uniform(-4.0, 4.0, (5, 8))
    centers += np.arange(5)[:, None] * 3.0   # pull classes apart
    for code in range(1, 6):
        X.append(centers[code - 1] + rng.normal(0, 0.15, (8, 8)))
        y += [code] * 8
    return np.vstack(X), np.array(y, dtype=np.intp)
