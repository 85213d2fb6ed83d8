"""Corpus ingestion (JSONL manifest), model bundle persistence, and the
deterministic synthetic five-class page generator used for desk-scale
validation.

The synthetic classes are caricatures by design: they exercise the
feature pipeline and give a margin-separated training corpus, they do not
model real scanner output.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import imageio
from .dagsvm import DagSvmModel, class_pairs
from .errors import (
    BundleCorruptError,
    BundleVersionError,
    ManifestError,
    UnknownLabelError,
    ValidationError,
)
from .features import ClassLabel
from .raster import ColorSpace, LchRanges, Raster, rgb_to_yuv
from .svm import BinarySvmModel, StandardizationStats

# ---------------------------------------------------------------------------
# manifest

_LABELS_BY_NAME = {c.name.lower(): c for c in ClassLabel}


def parse_label(value, context: str = "") -> ClassLabel:
    if isinstance(value, str) and value.lower() in _LABELS_BY_NAME:
        return _LABELS_BY_NAME[value.lower()]
    try:
        return ClassLabel(int(value))
    except (ValueError, TypeError):
        raise UnknownLabelError(f"unknown class label {value!r} {context}".strip())


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: ClassLabel | None = None
    space: str = "rgb"                 # "rgb" (ppm/png) or "lch"
    width: int | None = None           # LCH raw planar metadata
    height: int | None = None
    l_max: float | None = None
    c_max: float | None = None

    def to_json(self) -> dict:
        rec = {"path": self.path}
        if self.label is not None:
            rec["label"] = self.label.name.lower()
        if self.space != "rgb":
            rec.update(space=self.space, width=self.width, height=self.height,
                       l_max=self.l_max, c_max=self.c_max)
        return rec


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    """JSON-lines manifest, one entry per line."""
    entries = []
    seen = set()
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}:{lineno}: malformed JSON") from exc
        if "path" not in rec:
            raise ManifestError(f"{path}:{lineno}: entry missing 'path'")
        if rec["path"] in seen:
            raise ManifestError(f"{path}:{lineno}: duplicate path {rec['path']!r}")
        seen.add(rec["path"])
        label = None
        if rec.get("label") is not None:
            label = parse_label(rec["label"], context=f"in entry {rec['path']!r}")
        space = rec.get("space", "rgb")
        if space == "lch":
            missing = [k for k in ("width", "height", "l_max", "c_max")
                       if rec.get(k) is None]
            if missing:
                raise ValidationError(
                    f"{path}:{lineno}: LCH entry missing metadata {missing}"
                )
        elif space != "rgb":
            raise ValidationError(f"{path}:{lineno}: unknown space {space!r}")
        entries.append(ManifestEntry(
            path=rec["path"], label=label, space=space,
            width=rec.get("width"), height=rec.get("height"),
            l_max=rec.get("l_max"), c_max=rec.get("c_max"),
        ))
    return entries


def write_manifest(path: str | Path, entries) -> None:
    text = "".join(json.dumps(e.to_json(), sort_keys=True) + "\n" for e in entries)
    Path(path).write_text(text)


def load_entry(entry: ManifestEntry, base_dir: str | Path = ".") -> Raster:
    """Decode one manifest entry; RGB sources are converted to YUV."""
    full = Path(base_dir) / entry.path
    if not full.exists():
        raise ManifestError(f"missing file: {full}")
    if entry.space == "lch":
        return imageio.read_lch_raw(
            full, entry.width, entry.height,
            LchRanges(l_max=entry.l_max, c_max=entry.c_max),
        )
    return rgb_to_yuv(imageio.read_image(full))


def load_corpus(manifest_path: str | Path) -> list[tuple[Raster, ClassLabel | None]]:
    base = Path(manifest_path).parent
    return [(load_entry(e, base), e.label) for e in read_manifest(manifest_path)]


# ---------------------------------------------------------------------------
# synthetic page generator

@dataclass(frozen=True)
class SynthSpec:
    label: ClassLabel
    width: int = 512
    height: int = 512
    seed: int = 0
    receipt_contrast: float = 0.25     # ink fade: ink = 255 * (1 - contrast)
    highlight_saturation: float = 0.85
    noise_level: float = 2.0

    def __post_init__(self):
        if self.width < 64 or self.height < 64:
            raise ValidationError("synthetic pages must be at least 64x64")
        if not (0.0 < self.receipt_contrast <= 0.5):
            raise ValidationError("receipt_contrast must be in (0, 0.5]")
        if not (0.0 < self.highlight_saturation <= 1.0):
            raise ValidationError("highlight_saturation must be in (0, 1]")
        if not (0.0 <= self.noise_level <= 8.0):
            raise ValidationError("noise_level must be in [0, 8]")


# Bright, saturated band colors (luminance must clear the edge thresholds).
_HIGHLIGHT_PALETTE = (
    (255.0, 235.0, 40.0),    # yellow
    (160.0, 255.0, 120.0),   # green
    (255.0, 150.0, 200.0),   # pink
    (120.0, 230.0, 255.0),   # cyan
)


def _draw_text(img, rng, y0, y1, x0, x1, ink, line_step=22, glyph_h=13,
               band_color=None, band_prob=0.75):
    """Rows of stroke-based glyph runs; optional highlighter band per line."""
    top = y0 + 6
    while top + glyph_h < y1:
        if band_color is not None and rng.random() < band_prob:
            img[max(top - 3, 0):top + glyph_h + 3, x0 + 2:x1 - 2] = band_color
        x = x0 + int(rng.integers(4, 10))
        while x < x1 - 8:
            if rng.random() < 0.12:
                x += int(rng.integers(6, 14))   # word gap
                continue
            w = int(rng.integers(2, 4))
            img[top:top + glyph_h, x:x + w] = ink
            x += w + int(rng.integers(3, 6))
        top += line_step


def _upsample(channel, width, height, resample):
    im = Image.fromarray(channel.astype(np.float32), mode="F")
    return np.asarray(im.resize((width, height), resample), dtype=np.float64)


def _draw_picture(img, rng, y0, y1, x0, x1):
    """Smooth gradients plus band-limited noise with rich chroma."""
    h, w = y1 - y0, x1 - x0
    coarse = rng.uniform(25.0, 230.0, (max(h // 48, 2), max(w // 48, 2), 3))
    fine = rng.uniform(-14.0, 14.0, (max(h // 10, 2), max(w // 10, 2), 3))
    out = np.empty((h, w, 3))
    for c in range(3):
        out[:, :, c] = (
            _upsample(coarse[:, :, c], w, h, Image.BICUBIC)
            + _upsample(fine[:, :, c], w, h, Image.BILINEAR)
        )
    img[y0:y1, x0:x1] = np.clip(out, 20.0, 235.0)


def generate(spec: SynthSpec) -> tuple[Raster, ClassLabel]:
    """Deterministic synthetic page for one class; bit-identical per seed."""
    rng = np.random.default_rng(spec.seed)
    h, w = spec.height, spec.width
    img = np.full((h, w, 3), 255.0)

    if spec.label is ClassLabel.TEXT:
        _draw_text(img, rng, 0, h, 8, w - 8, ink=30.0)
    elif spec.label is ClassLabel.PICTURE:
        _draw_picture(img, rng, 0, h, 0, w)
    elif spec.label is ClassLabel.MIX:
        _draw_text(img, rng, 0, h // 2, 8, w - 8, ink=30.0)
        _draw_picture(img, rng, h // 2, h, 0, w)
    elif spec.label is ClassLabel.RECEIPT:
        ink = 255.0 * (1.0 - spec.receipt_contrast)
        _draw_text(img, rng, 4, int(h * 0.45), 6, int(w * 0.45),
                   ink=ink, line_step=17, glyph_h=10)
    elif spec.label is ClassLabel.HIGHLIGHT:
        base = np.array(_HIGHLIGHT_PALETTE[int(rng.integers(len(_HIGHLIGHT_PALETTE)))])
        s = spec.highlight_saturation
        band = tuple(255.0 + s * (c - 255.0) for c in base)
        _draw_text(img, rng, 0, h, 8, w - 8, ink=25.0, band_color=band)
    else:  # pragma: no cover - enum is exhaustive
        raise ValidationError(f"unknown class {spec.label!r}")

    if spec.noise_level > 0:
        img += rng.normal(0.0, spec.noise_level, img.shape)
    img = np.rint(np.clip(img, 0.0, 255.0))
    raster = Raster(ColorSpace.RGB8, (img[:, :, 0], img[:, :, 1], img[:, :, 2]))
    return raster, spec.label


# ---------------------------------------------------------------------------
# model bundle persistence

BUNDLE_VERSION = 1


def _model_payload(model: DagSvmModel) -> dict:
    return {
        "class_order": [int(c) for c in model.class_order],
        "sigma": model.sigma,
        "box_c": model.box_c,
        "mask": model.mask.astype(int).tolist(),
        "stats": {
            "mean": model.stats.mean.tolist(),
            "std": model.stats.std.tolist(),
        },
        "nodes": {
            f"{i}:{j}": {
                "support_vectors": node.support_vectors.tolist(),
                "dual_coefs": node.dual_coefs.tolist(),
                "bias": node.bias,
                "sigma": node.sigma,
                "box_c": node.box_c,
            }
            for (i, j), node in sorted(model.pairwise.items())
        },
    }


def _payload_hash(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def save_model(path: str | Path, model: DagSvmModel) -> str:
    """Write a versioned, content-hashed JSON bundle; returns the hash."""
    payload = _model_payload(model)
    digest = _payload_hash(payload)
    doc = {"version": BUNDLE_VERSION, "sha256": digest, "payload": payload}
    Path(path).write_text(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    return digest


def load_model(path: str | Path) -> DagSvmModel:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise BundleCorruptError(f"unreadable model bundle {path}: {exc}") from exc
    if not isinstance(doc, dict) or "version" not in doc:
        raise BundleCorruptError(f"{path}: not a model bundle")
    if doc["version"] != BUNDLE_VERSION:
        raise BundleVersionError(
            f"{path}: unsupported bundle version {doc['version']}"
        )
    payload = doc.get("payload")
    if payload is None or _payload_hash(payload) != doc.get("sha256"):
        raise BundleCorruptError(f"{path}: content hash mismatch")

    stats = StandardizationStats(
        mean=np.array(payload["stats"]["mean"]),
        std=np.array(payload["stats"]["std"]),
    )
    pairwise = {}
    for key, node in payload["nodes"].items():
        i, j = (int(p) for p in key.split(":"))
        pairwise[(i, j)] = BinarySvmModel(
            support_vectors=np.array(node["support_vectors"]),
            dual_coefs=np.array(node["dual_coefs"]),
            bias=node["bias"],
            sigma=node["sigma"],
            box_c=node["box_c"],
        )
    expected = set(class_pairs())
    if set(pairwise) != expected:
        raise BundleCorruptError(f"{path}: bundle does not hold all 10 node models")
    return DagSvmModel(
        pairwise=pairwise,
        stats=stats,
        mask=np.array(payload["mask"], dtype=bool),
        sigma=payload["sigma"],
        box_c=payload["box_c"],
        class_order=tuple(ClassLabel(c) for c in payload["class_order"]),
    )
