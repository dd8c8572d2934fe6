"""Config-driven end-to-end runs: preprocess, reduce, classify, report."""

from __future__ import annotations

import dataclasses
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classify import default_palette, evaluate, render_map
from .data import HsiCube, flatten, load_cube, minmax_normalize, stratified_split, subset
from .estimators import OneNearestNeighbor, OvRHingeClassifier, S3RMLSC
from .filters import FilterParams, hgf

PROJECTION_MAGIC = b"PRJ1"


@dataclass
class PipelineConfig:
    """Every pipeline knob, with the published defaults."""

    data: str = ""
    out: str = "out"
    # spatial filter
    filter_enabled: bool = True
    normalize: bool = True
    radius: int = 2
    epsilon: float = 1e-3
    levels: int = 2
    # manifold patches
    theta: float = 0.05
    k_graph: int = 5
    min_patch: int = 5
    # scatter construction
    alpha: float = 0.4
    beta: float = 0.3
    window: int = 3
    kernel_width: float | None = None
    # semi-supervised graph
    knn: int = 5
    gamma: float = 0.5
    n_unlabeled: int = 2000
    # projection solver
    dims: int = 30
    tol: float = 1e-8
    max_iter: int = 100
    # classifier
    classifier: str = "svm"
    reg: float = 1e-3
    epochs: int = 50
    # split protocol
    fraction: float = 0.10
    min_per_class: int = 10
    seed: int = 0
    runs: int = 1

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        raw = json.loads(text)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)


def save_projection(matrix: np.ndarray, path) -> None:
    """Write a projection matrix: magic, uint32 rows/cols, column-major f64, all LE."""
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    header = PROJECTION_MAGIC + struct.pack("<II", matrix.shape[0], matrix.shape[1])
    Path(path).write_bytes(header + matrix.flatten(order="F").astype("<f8").tobytes())


def load_projection(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != PROJECTION_MAGIC:
        raise ValueError(f"{path} is not a projection file")
    rows, cols = struct.unpack("<II", raw[4:12])
    data = np.frombuffer(raw[12:], dtype="<f8")
    if data.size != rows * cols:
        raise ValueError(f"projection payload holds {data.size} values, expected {rows * cols}")
    return data.reshape((rows, cols), order="F").copy()


def preprocess(cube: HsiCube, config: PipelineConfig) -> HsiCube:
    """Seed-independent preprocessing: per-band normalization, then filtering."""
    if config.normalize:
        cube = minmax_normalize(cube)
    if config.filter_enabled:
        cube = hgf(
            cube,
            FilterParams(radius=config.radius, epsilon=config.epsilon, levels=config.levels),
        )
    return cube


def make_reducer(config: PipelineConfig) -> S3RMLSC:
    return S3RMLSC(
        n_components=config.dims,
        alpha=config.alpha,
        beta=config.beta,
        gamma=config.gamma,
        knn=config.knn,
        window=config.window,
        theta=config.theta,
        k_graph=config.k_graph,
        min_patch=config.min_patch,
        kernel_width=config.kernel_width,
        tol=config.tol,
        max_iter=config.max_iter,
    )


def make_classifier(config: PipelineConfig, seed: int):
    if config.classifier == "svm":
        return OvRHingeClassifier(reg=config.reg, epochs=config.epochs, seed=seed)
    if config.classifier == "1nn":
        return OneNearestNeighbor()
    raise ValueError(f"unknown classifier {config.classifier!r} (expected 'svm' or '1nn')")


def _nan_to_none(values):
    return [None if np.isnan(v) else float(v) for v in values]


def run_single(cube: HsiCube, labels, config: PipelineConfig, seed: int) -> dict:
    """One seeded split-reduce-classify pass over a preprocessed cube."""
    samples = flatten(cube, labels)
    split = stratified_split(
        samples, config.fraction, config.min_per_class, config.n_unlabeled, seed
    )
    labeled = subset(samples, split.labeled_idx)
    test = subset(samples, split.test_idx)
    unlabeled = subset(samples, split.unlabeled_idx)

    reducer = make_reducer(config)
    reducer.fit(
        labeled.spectra.T,
        labeled.labels,
        coords=labeled.coords,
        cube=cube.values,
        unlabeled=unlabeled.spectra.T,
    )
    train_z = reducer.transform(labeled.spectra.T)
    test_z = reducer.transform(test.spectra.T)

    clf = make_classifier(config, seed).fit(train_z, labeled.labels)
    predicted = np.asarray(clf.predict(test_z), dtype=np.int64)
    metrics = evaluate(test.labels, predicted, labels.n_classes)

    raster = np.zeros((cube.rows, cube.cols), dtype=np.int64)
    raster[labeled.coords[:, 0], labeled.coords[:, 1]] = labeled.labels
    raster[test.coords[:, 0], test.coords[:, 1]] = predicted

    return {
        "seed": seed,
        "n_labeled": int(split.labeled_idx.size),
        "n_test": int(split.test_idx.size),
        "n_unlabeled": int(split.unlabeled_idx.size),
        "n_patches": reducer.n_patches_,
        "lambda": float(reducer.lambda_),
        "iterations": int(reducer.n_iter_),
        "residual": float(reducer.residual_),
        "overall_accuracy": metrics.overall_accuracy,
        "average_accuracy": metrics.average_accuracy,
        "kappa": metrics.kappa,
        "per_class_accuracy": _nan_to_none(metrics.per_class_accuracy),
        "_projection": reducer.projection_,
        "_raster": raster,
        "_confusion": metrics.confusion,
        "_train_count": np.bincount(labeled.labels, minlength=labels.n_classes + 1)[1:],
        "_test_count": np.bincount(test.labels, minlength=labels.n_classes + 1)[1:],
    }


def _mean_over_runs(runs: list[dict], key: str):
    return float(np.mean([run[key] for run in runs]))


def _mean_per_class(runs: list[dict]) -> list:
    stacked = np.array(
        [[np.nan if v is None else v for v in run["per_class_accuracy"]] for run in runs]
    )
    with np.errstate(invalid="ignore"):
        means = np.nanmean(stacked, axis=0)
    return _nan_to_none(means)


def _metrics_csv(runs: list[dict], mean_ca: list) -> str:
    n_runs = len(runs)
    header = ["class", "train_size", "test_size"]
    header += [f"ca_run{i}" for i in range(n_runs)] + ["ca_mean"]
    lines = [",".join(header)]

    def fmt(v):
        return "" if v is None else f"{v:.4f}"

    n_classes = len(runs[0]["per_class_accuracy"])
    for c in range(n_classes):
        row = [
            str(c + 1),
            str(int(runs[0]["_train_count"][c])),
            str(int(runs[0]["_test_count"][c])),
        ]
        row += [fmt(run["per_class_accuracy"][c]) for run in runs]
        row += [fmt(mean_ca[c])]
        lines.append(",".join(row))
    for key, name in (
        ("average_accuracy", "AA"),
        ("overall_accuracy", "OA"),
        ("kappa", "kappa"),
    ):
        row = [name, "", ""]
        row += [fmt(run[key]) for run in runs]
        row += [fmt(_mean_over_runs(runs, key))]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def run_pipeline(config: PipelineConfig, out_dir=None) -> dict:
    """Execute the full pipeline for `config.runs` consecutive seeds.

    Writes metrics.json, metrics.csv, map.ppm (first seed), and
    projection.bin (first seed) under the output directory, and returns the
    report dictionary that metrics.json serializes.
    """
    cube, labels = load_cube(config.data)
    if labels is None:
        raise ValueError(f"dataset {config.data} carries no labels; cannot run the pipeline")
    cube = preprocess(cube, config)

    seeds = [config.seed + i for i in range(config.runs)]
    runs = [run_single(cube, labels, config, seed) for seed in seeds]

    mean_ca = _mean_per_class(runs)
    public_runs = [{k: v for k, v in run.items() if not k.startswith("_")} for run in runs]
    report = {
        "config": dataclasses.asdict(config),
        "seeds": seeds,
        "runs": public_runs,
        "mean": {
            "overall_accuracy": _mean_over_runs(runs, "overall_accuracy"),
            "average_accuracy": _mean_over_runs(runs, "average_accuracy"),
            "kappa": _mean_over_runs(runs, "kappa"),
            "per_class_accuracy": mean_ca,
        },
    }

    out = Path(out_dir if out_dir is not None else config.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    (out / "metrics.csv").write_text(_metrics_csv(runs, mean_ca), encoding="utf-8")
    (out / "map.ppm").write_bytes(
        render_map(
            runs[0]["_raster"], (cube.rows, cube.cols), palette=default_palette(labels.n_classes)
        )
    )
    save_projection(runs[0]["_projection"], out / "projection.bin")
    return report
