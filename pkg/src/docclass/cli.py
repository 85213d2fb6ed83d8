"""Command-line surface for batch feature extraction, training,
classification, feature selection and synthetic corpus generation.

Exit codes: 0 success, 1 usage/config error, 2 data/runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import dataset, evaluate, imageio
from .dagsvm import classify_trace, train_dag
from .errors import DocclassError
from .features import (
    DEFAULT_CONFIG,
    FEATURE_NAMES,
    ClassLabel,
    extract_features,
)
from .svm import SMO_BACKEND, SmoConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """argparse with the pinned usage exit code (1 instead of 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_mask(text: str | None) -> np.ndarray:
    mask = np.ones(len(FEATURE_NAMES), dtype=bool)
    if text is None or text == "all":
        return mask
    if text.startswith("drop:"):
        for name in text[len("drop:"):].split(","):
            name = name.strip()
            if name not in FEATURE_NAMES:
                raise SystemExit(_usage_error(f"unknown feature name {name!r}"))
            mask[FEATURE_NAMES.index(name)] = False
        if not mask.any():
            raise SystemExit(_usage_error("mask drops every feature"))
        return mask
    raise SystemExit(_usage_error(f"bad --mask value {text!r} (use all or drop:NAME[,NAME])"))


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _parse_grid(text: str | None, default) -> tuple:
    if text is None:
        return tuple(default)
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise SystemExit(_usage_error(f"bad grid {text!r}"))
    if not values or any(v <= 0 for v in values):
        raise SystemExit(_usage_error(f"grid must be positive and non-empty: {text!r}"))
    return values


def _load_weights(path: str | None) -> np.ndarray:
    if path is None:
        return evaluate.DEFAULT_WEIGHTS
    return evaluate.load_weight_table(path)


def _extract_all(manifest_path: str, threads: int):
    """(entry, FeatureVector|None, error|None) per manifest entry, in order."""
    entries = dataset.read_manifest(manifest_path)
    base = Path(manifest_path).parent

    def work(entry):
        try:
            raster = dataset.load_entry(entry, base)
            return entry, extract_features(raster), None
        except (DocclassError, OSError) as exc:
            return entry, None, str(exc)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, entries))
    return [work(e) for e in entries]


def _require_labeled(results):
    X, y = [], []
    for entry, fv, err in results:
        if err is not None:
            raise DocclassError(f"{entry.path}: {err}")
        if entry.label is None:
            raise DocclassError(f"{entry.path}: entry has no class label")
        X.append(fv.values)
        y.append(int(entry.label))
    return np.array(X), np.array(y, dtype=np.intp)


# ---------------------------------------------------------------------------
# subcommands

def cmd_extract(args) -> int:
    results = _extract_all(args.manifest, args.threads)
    failed = 0
    rows = []
    for entry, fv, err in results:
        if err is not None:
            failed += 1
            print(f"error: {entry.path}: {err}", file=sys.stderr)
            continue
        rows.append((entry, fv))
    if args.format == "json":
        for entry, fv in rows:
            print(json.dumps(fv.to_record(entry.path, entry.label), sort_keys=True))
    else:
        header = ["path", "class"] + list(FEATURE_NAMES)
        widths = [max(len(header[0]), *(len(e.path) for e, _ in rows)) if rows else 8, 6]
        print(f"{header[0]:<{widths[0]}} {header[1]:>{widths[1]}} "
              + " ".join(f"{h:>20}" for h in header[2:]))
        for entry, fv in rows:
            label = "" if entry.label is None else str(int(entry.label))
            print(f"{entry.path:<{widths[0]}} {label:>{widths[1]}} "
                  + " ".join(f"{v:>20.12g}" for v in fv.values))
    return EXIT_DATA if failed else EXIT_OK


def cmd_train(args) -> int:
    results = _extract_all(args.manifest, args.threads)
    X, y = _require_labeled(results)
    mask = _parse_mask(args.mask)
    weights = _load_weights(args.weights)
    smo = SmoConfig(seed=args.seed)
    res = evaluate.grid_search(
        X, y,
        _parse_grid(args.sigma_grid, evaluate.DEFAULT_SIGMA_GRID),
        _parse_grid(args.c_grid, evaluate.DEFAULT_C_GRID),
        mask, weights, smo,
    )
    model = train_dag(X, y, res.sigma, res.box_c, mask, smo)
    digest = dataset.save_model(args.bundle, model)
    if args.format == "json":
        print(json.dumps({
            "sigma": res.sigma, "box_c": res.box_c, "wm": res.wm,
            "confusion": res.confusion.tolist(), "bundle": args.bundle,
            "sha256": digest,
        }, sort_keys=True))
    else:
        print(f"best sigma = {res.sigma:g}, C = {res.box_c:g}, W_m* = {res.wm:.6g}")
        print(evaluate.format_confusion(res.confusion))
        print(f"bundle written to {args.bundle} (sha256 {digest})")
    return EXIT_OK


def cmd_classify(args) -> int:
    model = dataset.load_model(args.bundle)
    results = _extract_all(args.manifest, args.threads)
    failed = 0
    for entry, fv, err in results:
        if err is not None:
            failed += 1
            print(f"error: {entry.path}: {err}", file=sys.stderr)
            continue
        label, trace = classify_trace(model, fv.values)
        rec = {
            "path": entry.path,
            "label": int(label),
            "label_name": label.name.lower(),
            "decisions": [
                {"pair": [i, j], "value": v} for (i, j), v in trace
            ],
        }
        if args.format == "json":
            print(json.dumps(rec, sort_keys=True))
        else:
            print(f"{entry.path}  {label.name.lower()}")
    return EXIT_DATA if failed else EXIT_OK


def cmd_select_features(args) -> int:
    results = _extract_all(args.manifest, args.threads)
    X, y = _require_labeled(results)
    weights = _load_weights(args.weights)
    smo = SmoConfig(seed=args.seed)
    if args.sigma is not None and args.box_c is not None:
        sigma, box_c = args.sigma, args.box_c
    else:
        # fix (sigma, C) at the all-features grid-search optimum
        res = evaluate.grid_search(
            X, y,
            _parse_grid(args.sigma_grid, evaluate.DEFAULT_SIGMA_GRID),
            _parse_grid(args.c_grid, evaluate.DEFAULT_C_GRID),
            None, weights, smo,
        )
        sigma, box_c = res.sigma, res.box_c
    impacts, baseline = evaluate.compute_impacts(X, y, sigma, box_c, weights, smo)
    base = Path(args.manifest).parent
    rasters = [dataset.load_entry(e, base) for e, _, err in results if err is None]
    times = evaluate.time_features(rasters)
    report = evaluate.SelectionReport(impact=impacts, times_ms=times,
                                      baseline_wm=baseline)
    mask = evaluate.select_features(report, args.policy)
    if args.format == "json":
        out = json.loads(report.to_json())
        out["recommended_mask"] = mask.astype(int).tolist()
        out["dropped"] = [n for n, m in zip(FEATURE_NAMES, mask) if not m]
        print(json.dumps(out, sort_keys=True))
    else:
        print(report.format_table())
        dropped = [n for n, m in zip(FEATURE_NAMES, mask) if not m]
        print(f"recommended drop: {', '.join(dropped) if dropped else '(none)'}")
    return EXIT_OK


def cmd_gen_corpus(args) -> int:
    out = Path(args.out)
    images = out / "images"
    images.mkdir(parents=True, exist_ok=True)
    try:
        width, height = (int(v) for v in args.size.split("x"))
    except ValueError:
        raise SystemExit(_usage_error(f"bad --size {args.size!r} (use WxH)"))
    entries = []
    seed = args.seed
    for label in ClassLabel:
        for k in range(args.per_class):
            spec = dataset.SynthSpec(label=label, width=width, height=height,
                                     seed=seed)
            raster, _ = dataset.generate(spec)
            name = f"images/{label.name.lower()}_{k:03d}.ppm"
            imageio.write_ppm(out / name, raster)
            entries.append(dataset.ManifestEntry(path=name, label=label))
            seed += 1
    # manifest last, atomically: interrupted runs leave no manifest
    tmp = out / "manifest.jsonl.tmp"
    dataset.write_manifest(tmp, entries)
    tmp.rename(out / "manifest.jsonl")
    print(f"wrote {len(entries)} images + manifest to {out}")
    return EXIT_OK


def cmd_show_config(args) -> int:
    print(json.dumps({
        "smo_backend": SMO_BACKEND,
        "feature_names": list(FEATURE_NAMES),
        "feature_config": asdict(DEFAULT_CONFIG),
        "smo_config": asdict(SmoConfig()),
        "sigma_grid": list(evaluate.DEFAULT_SIGMA_GRID),
        "c_grid": list(evaluate.DEFAULT_C_GRID),
        "weights": evaluate.DEFAULT_WEIGHTS.tolist(),
        "class_codes": {c.name.lower(): int(c) for c in ClassLabel},
    }, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="docclass",
                     description="Five-class scanned-page classifier")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, manifest=True):
        if manifest:
            p.add_argument("--manifest", required=True)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("extract", help="feature records for a manifest")
    common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="grid-search + train, write model bundle")
    common(p)
    p.add_argument("--bundle", required=True)
    p.add_argument("--sigma-grid")
    p.add_argument("--c-grid")
    p.add_argument("--mask")
    p.add_argument("--weights")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify manifest images with a bundle")
    common(p)
    p.add_argument("--bundle", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("select-features",
                       help="leave-one-out feature impact report")
    common(p)
    p.add_argument("--sigma", type=float)
    p.add_argument("--box-c", type=float)
    p.add_argument("--sigma-grid")
    p.add_argument("--c-grid")
    p.add_argument("--weights")
    p.add_argument("--policy", choices=("drop-min-impact", "keep-all"),
                   default="drop-min-impact")
    p.set_defaults(func=cmd_select_features)

    p = sub.add_parser("gen-corpus", help="write a synthetic labeled corpus")
    common(p, manifest=False)
    p.add_argument("--out", required=True)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--size", default="512x512")
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("show-config", help="print all defaults as JSON")
    p.set_defaults(func=cmd_show_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except DocclassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
