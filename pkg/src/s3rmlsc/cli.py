"""Batch command-line interface.

Subcommands: synth (generate a dataset), filter (dump the preprocessed
cube), patches (dump the patch decomposition), reduce (dump the learned
projection), classify (evaluate a saved projection), run (full pipeline).
Flags override values from an optional --config JSON file.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import synth
from .classify import default_palette, evaluate, render_map
from .data import flatten, load_cube, save_cube, stratified_split, subset
from .patches import LinearityParams, build_patches
from .pipeline import (
    PipelineConfig,
    load_projection,
    make_classifier,
    make_reducer,
    preprocess,
    run_pipeline,
    save_projection,
)


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--data", help="dataset directory")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--no-filter", dest="filter_enabled", action="store_const", const=False)
    parser.add_argument("--no-normalize", dest="normalize", action="store_const", const=False)
    parser.add_argument("--radius", type=int)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--levels", type=int)
    parser.add_argument("--theta", type=float)
    parser.add_argument("--k-graph", dest="k_graph", type=int)
    parser.add_argument("--min-patch", dest="min_patch", type=int)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--window", type=int)
    parser.add_argument("--kernel-width", dest="kernel_width", type=float)
    parser.add_argument("--knn", type=int)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--unlabeled", dest="n_unlabeled", type=int)
    parser.add_argument("--dims", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--max-iter", dest="max_iter", type=int)
    parser.add_argument("--classifier", choices=["svm", "1nn"])
    parser.add_argument("--reg", type=float)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--fraction", type=float)
    parser.add_argument("--min-per-class", dest="min_per_class", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--runs", type=int)


def _resolve_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        config = PipelineConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
    else:
        config = PipelineConfig()
    for field in dataclasses.fields(PipelineConfig):
        value = getattr(args, field.name, None)
        if value is not None:
            setattr(config, field.name, value)
    return config


def _out_dir(config: PipelineConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_preprocessed(config: PipelineConfig):
    if not config.data:
        raise SystemExit("error: --data (or config key 'data') is required")
    cube, labels = load_cube(config.data)
    return preprocess(cube, config), labels


def cmd_synth(args):
    path = synth.synth_dataset(
        args.kind, args.rows, args.cols, args.bands, args.noise, args.seed, args.out
    )
    print(f"wrote dataset to {path}")


def cmd_filter(args):
    config = _resolve_config(args)
    cube, labels = _load_preprocessed(config)
    out = _out_dir(config)
    save_cube(cube, out, labels)
    print(f"wrote filtered cube to {out}")


def cmd_patches(args):
    config = _resolve_config(args)
    cube, labels = _load_preprocessed(config)
    if labels is None:
        raise SystemExit("error: dataset carries no labels")
    samples = flatten(cube, labels)
    split = stratified_split(
        samples, config.fraction, config.min_per_class, config.n_unlabeled, config.seed
    )
    labeled = subset(samples, split.labeled_idx)
    params = LinearityParams(config.theta, config.k_graph, config.min_patch)
    patches = build_patches(labeled, params)
    out = _out_dir(config)
    payload = {
        "config": dataclasses.asdict(config),
        "split": {
            "labeled_idx": split.labeled_idx.tolist(),
            "unlabeled_idx": split.unlabeled_idx.tolist(),
            "test_idx": split.test_idx.tolist(),
            "seed": split.seed,
        },
        "patches": [
            {
                "class_id": p.class_id,
                "members": p.members.tolist(),
                "mean": p.mean.tolist(),
            }
            for p in patches
        ],
    }
    (out / "patches.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(patches)} patches to {out / 'patches.json'}")


def cmd_reduce(args):
    config = _resolve_config(args)
    cube, labels = _load_preprocessed(config)
    if labels is None:
        raise SystemExit("error: dataset carries no labels")
    samples = flatten(cube, labels)
    split = stratified_split(
        samples, config.fraction, config.min_per_class, config.n_unlabeled, config.seed
    )
    labeled = subset(samples, split.labeled_idx)
    unlabeled = subset(samples, split.unlabeled_idx)
    reducer = make_reducer(config)
    reducer.fit(
        labeled.spectra.T,
        labeled.labels,
        coords=labeled.coords,
        cube=cube.values,
        unlabeled=unlabeled.spectra.T,
    )
    out = _out_dir(config)
    save_projection(reducer.projection_, out / "projection.bin")
    summary = {
        "config": dataclasses.asdict(config),
        "dims": int(reducer.projection_.shape[1]),
        "n_patches": reducer.n_patches_,
        "lambda": float(reducer.lambda_),
        "iterations": int(reducer.n_iter_),
        "residual": float(reducer.residual_),
    }
    (out / "reduce.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"wrote projection to {out / 'projection.bin'} (lambda={reducer.lambda_:.6g})")


def cmd_classify(args):
    config = _resolve_config(args)
    cube, labels = _load_preprocessed(config)
    if labels is None:
        raise SystemExit("error: dataset carries no labels")
    projection = load_projection(args.projection)
    samples = flatten(cube, labels)
    split = stratified_split(
        samples, config.fraction, config.min_per_class, config.n_unlabeled, config.seed
    )
    labeled = subset(samples, split.labeled_idx)
    test = subset(samples, split.test_idx)
    train_z = labeled.spectra.T @ projection
    test_z = test.spectra.T @ projection
    clf = make_classifier(config, config.seed).fit(train_z, labeled.labels)
    predicted = np.asarray(clf.predict(test_z), dtype=np.int64)
    metrics = evaluate(test.labels, predicted, labels.n_classes)

    out = _out_dir(config)
    report = {
        "config": dataclasses.asdict(config),
        "overall_accuracy": metrics.overall_accuracy,
        "average_accuracy": metrics.average_accuracy,
        "kappa": metrics.kappa,
        "per_class_accuracy": [
            None if np.isnan(v) else float(v) for v in metrics.per_class_accuracy
        ],
    }
    (out / "metrics.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    raster = np.zeros((cube.rows, cube.cols), dtype=np.int64)
    raster[labeled.coords[:, 0], labeled.coords[:, 1]] = labeled.labels
    raster[test.coords[:, 0], test.coords[:, 1]] = predicted
    (out / "map.ppm").write_bytes(
        render_map(raster, (cube.rows, cube.cols), palette=default_palette(labels.n_classes))
    )
    print(f"OA={metrics.overall_accuracy:.4f} AA={metrics.average_accuracy:.4f} "
          f"kappa={metrics.kappa:.4f} -> {out}")


def cmd_run(args):
    config = _resolve_config(args)
    if not config.data:
        raise SystemExit("error: --data (or config key 'data') is required")
    report = run_pipeline(config)
    mean = report["mean"]
    print(
        f"mean over {config.runs} run(s): OA={mean['overall_accuracy']:.4f} "
        f"AA={mean['average_accuracy']:.4f} kappa={mean['kappa']:.4f} -> {config.out}"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="s3rmlsc",
        description="Spectral-spatial manifold scaling-cut dimensionality reduction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset directory")
    p_synth.add_argument("--kind", choices=synth.KINDS, default="two_moons_cube")
    p_synth.add_argument("--rows", type=int, default=32)
    p_synth.add_argument("--cols", type=int, default=32)
    p_synth.add_argument("--bands", type=int, default=20)
    p_synth.add_argument("--noise", type=float, default=0.05)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=cmd_synth)

    for name, func, doc in (
        ("filter", cmd_filter, "write the normalized, filtered cube as a dataset"),
        ("patches", cmd_patches, "write the split and patch decomposition"),
        ("reduce", cmd_reduce, "learn and write the projection matrix"),
        ("run", cmd_run, "full pipeline: reduce, classify, and report"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        p.set_defaults(func=func)

    p_classify = sub.add_parser("classify", help="classify using a saved projection")
    _add_common(p_classify)
    p_classify.add_argument("--projection", required=True, help="projection.bin path")
    p_classify.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
