"""Data model and IO for hyperspectral cubes, label maps, and pixel samples.

A dataset lives in a directory holding a ``meta`` text file (``key=value``
lines: rows, cols, bands, dtype=f64le, optional classes), ``cube.bin``
(row-major 64-bit little-endian reals, (row, col, band) order) and an
optional ``labels.bin`` (row-major 16-bit little-endian unsigned, 0 =
background).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import CubeFormatError, IntegrityError, SplitError

META_NAME = "meta"
CUBE_NAME = "cube.bin"
LABELS_NAME = "labels.bin"


@dataclass(frozen=True)
class HsiCube:
    """A rows x cols x bands raster of reflectance values."""

    rows: int
    cols: int
    bands: int
    values: np.ndarray  # (rows, cols, bands) float64

    def __post_init__(self):
        if min(self.rows, self.cols, self.bands) < 1:
            raise ValueError("cube dimensions must be positive")
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.shape != (self.rows, self.cols, self.bands):
            raise ValueError(
                f"cube values have shape {values.shape}, "
                f"expected {(self.rows, self.cols, self.bands)}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("cube values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_pixels(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class LabelMap:
    """Per-pixel class ids matching a cube; 0 marks background."""

    rows: int
    cols: int
    labels: np.ndarray  # (rows, cols) int

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if labels.shape != (self.rows, self.cols):
            raise ValueError(
                f"label map has shape {labels.shape}, expected {(self.rows, self.cols)}"
            )
        if labels.min(initial=0) < 0:
            raise IntegrityError("labels must be non-negative")
        k = int(labels.max(initial=0))
        present = np.unique(labels[labels > 0])
        if len(present) != k:
            missing = sorted(set(range(1, k + 1)) - set(present.tolist()))
            raise IntegrityError(f"class ids missing from label map: {missing}")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def n_classes(self) -> int:
        return int(self.labels.max(initial=0))


@dataclass(frozen=True)
class SampleSet:
    """Pixel spectra as columns, with source coordinates and optional labels."""

    dim: int
    spectra: np.ndarray  # (dim, N) float64
    coords: np.ndarray  # (N, 2) int, (row, col)
    labels: np.ndarray | None = None  # (N,) int in 1..K

    def __post_init__(self):
        spectra = np.ascontiguousarray(self.spectra, dtype=np.float64)
        coords = np.ascontiguousarray(self.coords, dtype=np.int64)
        if spectra.ndim != 2 or spectra.shape[0] != self.dim:
            raise ValueError(f"spectra must be ({self.dim}, N), got {spectra.shape}")
        n = spectra.shape[1]
        if coords.shape != (n, 2):
            raise ValueError(f"coords must be ({n}, 2), got {coords.shape}")
        if n and len(np.unique(coords, axis=0)) != n:
            raise ValueError("sample coords must be unique")
        labels = self.labels
        if labels is not None:
            labels = np.ascontiguousarray(labels, dtype=np.int64)
            if labels.shape != (n,):
                raise ValueError(f"labels must be ({n},), got {labels.shape}")
            if n and labels.min() < 1:
                raise ValueError("sample labels must be >= 1")
            labels.setflags(write=False)
        spectra.setflags(write=False)
        coords.setflags(write=False)
        object.__setattr__(self, "spectra", spectra)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.spectra.shape[1]


@dataclass(frozen=True)
class Split:
    """Index lists partitioning a labeled SampleSet into train and test."""

    labeled_idx: np.ndarray
    unlabeled_idx: np.ndarray  # subset of test_idx
    test_idx: np.ndarray
    seed: int

    def __post_init__(self):
        for name in ("labeled_idx", "unlabeled_idx", "test_idx"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.intersect1d(self.labeled_idx, self.test_idx).size:
            raise ValueError("labeled_idx and test_idx must be disjoint")
        if np.setdiff1d(self.unlabeled_idx, self.test_idx).size:
            raise ValueError("unlabeled_idx must be a subset of test_idx")


def subset(samples: SampleSet, indices) -> SampleSet:
    """Select columns of a SampleSet, keeping coords and labels aligned."""
    indices = np.asarray(indices, dtype=np.int64)
    labels = None if samples.labels is None else samples.labels[indices]
    return SampleSet(
        dim=samples.dim,
        spectra=samples.spectra[:, indices],
        coords=samples.coords[indices],
        labels=labels,
    )


def _parse_meta(path: Path) -> dict:
    if not path.is_file():
        raise CubeFormatError(f"meta file not found in {path.parent}")
    fields = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CubeFormatError(f"malformed meta line: {line!r}")
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    return fields


def _meta_int(fields: dict, key: str) -> int:
    if key not in fields:
        raise CubeFormatError(f"meta is missing required field '{key}'")
    try:
        value = int(fields[key])
    except ValueError:
        raise CubeFormatError(f"meta field '{key}' is not an integer: {fields[key]!r}")
    if value < 1:
        raise CubeFormatError(f"meta field '{key}' must be positive, got {value}")
    return value


def load_cube(path) -> tuple[HsiCube, LabelMap | None]:
    """Load a dataset directory; returns the cube and label map if present."""
    path = Path(path)
    fields = _parse_meta(path / META_NAME)
    rows = _meta_int(fields, "rows")
    cols = _meta_int(fields, "cols")
    bands = _meta_int(fields, "bands")
    dtype = fields.get("dtype")
    if dtype != "f64le":
        raise CubeFormatError(f"meta field 'dtype' must be 'f64le', got {dtype!r}")

    cube_path = path / CUBE_NAME
    if not cube_path.is_file():
        raise CubeFormatError(f"cube payload not found: {cube_path}")
    raw = np.fromfile(cube_path, dtype="<f8")
    expected = rows * cols * bands
    if raw.size != expected:
        raise IntegrityError(
            f"cube.bin holds {raw.size} values, header declares {expected}"
        )
    if not np.all(np.isfinite(raw)):
        raise IntegrityError("cube.bin contains non-finite values")
    cube = HsiCube(rows, cols, bands, raw.reshape(rows, cols, bands))

    labels = None
    labels_path = path / LABELS_NAME
    if labels_path.is_file():
        raw_labels = np.fromfile(labels_path, dtype="<u2")
        if raw_labels.size != rows * cols:
            raise IntegrityError(
                f"labels.bin holds {raw_labels.size} values, header declares {rows * cols}"
            )
        labels = LabelMap(rows, cols, raw_labels.reshape(rows, cols))
        if "classes" in fields:
            declared = _meta_int(fields, "classes")
            if declared != labels.n_classes:
                raise IntegrityError(
                    f"meta declares {declared} classes, labels.bin holds {labels.n_classes}"
                )
    return cube, labels


def save_cube(cube: HsiCube, path, labels: LabelMap | None = None) -> Path:
    """Write a dataset directory in the container layout; returns the path."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    lines = [
        f"rows={cube.rows}",
        f"cols={cube.cols}",
        f"bands={cube.bands}",
        "dtype=f64le",
    ]
    if labels is not None:
        if (labels.rows, labels.cols) != (cube.rows, cube.cols):
            raise ValueError("label map shape does not match cube")
        lines.append(f"classes={labels.n_classes}")
    (path / META_NAME).write_text("\n".join(lines) + "\n", encoding="utf-8")
    cube.values.astype("<f8").tofile(path / CUBE_NAME)
    if labels is not None:
        labels.labels.astype("<u2").tofile(path / LABELS_NAME)
    return path


def minmax_normalize(cube: HsiCube) -> HsiCube:
    """Affine-map each band independently to [0, 1]; constant bands become zeros."""
    values = cube.values
    lo = values.min(axis=(0, 1))
    hi = values.max(axis=(0, 1))
    span = hi - lo
    constant = span == 0
    safe_span = np.where(constant, 1.0, span)
    out = (values - lo) / safe_span
    if constant.any():
        out = out.copy()
        out[:, :, constant] = 0.0
    return HsiCube(cube.rows, cube.cols, cube.bands, out)


def flatten(cube: HsiCube, labels: LabelMap) -> SampleSet:
    """One sample per pixel with label > 0, in row-major pixel order."""
    if (labels.rows, labels.cols) != (cube.rows, cube.cols):
        raise ValueError(
            f"label map {labels.rows}x{labels.cols} does not match cube "
            f"{cube.rows}x{cube.cols}"
        )
    rr, cc = np.nonzero(labels.labels)
    spectra = cube.values[rr, cc].T  # (bands, N)
    coords = np.stack([rr, cc], axis=1)
    return SampleSet(cube.bands, spectra, coords, labels.labels[rr, cc])


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def stratified_split(
    samples: SampleSet,
    labeled_fraction: float,
    min_per_class: int,
    n_unlabeled: int,
    seed: int,
) -> Split:
    """Per-class random split into labeled and test sets, plus an unlabeled draw.

    Each class contributes round(fraction * class size) labeled samples,
    floored at `min_per_class`; the remainder is test. `n_unlabeled` samples
    are then drawn uniformly from the test set without replacement.
    Deterministic for a fixed seed.
    """
    if samples.labels is None:
        raise ValueError("stratified_split requires a labeled SampleSet")
    if samples.n_samples == 0:
        raise ValueError("cannot split an empty SampleSet")
    if not 0.0 < labeled_fraction <= 1.0:
        raise ValueError(f"labeled_fraction must lie in (0, 1], got {labeled_fraction}")
    if n_unlabeled < 0:
        raise ValueError("n_unlabeled must be non-negative")

    rng = np.random.default_rng(seed)
    labeled_parts = []
    test_parts = []
    for class_id in np.unique(samples.labels):
        members = np.flatnonzero(samples.labels == class_id)
        if members.size < min_per_class:
            raise SplitError(
                f"class {int(class_id)} has {members.size} samples, "
                f"fewer than min_per_class={min_per_class}"
            )
        n_labeled = max(min_per_class, _round_half_up(labeled_fraction * members.size))
        chosen = rng.permutation(members)
        labeled_parts.append(np.sort(chosen[:n_labeled]))
        test_parts.append(np.sort(chosen[n_labeled:]))

    labeled_idx = np.sort(np.concatenate(labeled_parts))
    test_idx = np.sort(np.concatenate(test_parts)) if test_parts else np.empty(0, np.int64)
    if n_unlabeled > test_idx.size:
        raise SplitError(
            f"n_unlabeled={n_unlabeled} exceeds test size {test_idx.size}"
        )
    if n_unlabeled:
        unlabeled_idx = np.sort(rng.choice(test_idx, size=n_unlabeled, replace=False))
    else:
        unlabeled_idx = np.empty(0, np.int64)
    return Split(labeled_idx, unlabeled_idx, test_idx, seed)
