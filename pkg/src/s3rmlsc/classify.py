"""Classification of projected samples, accuracy metrics, and map rendering."""

from __future__ import annotations

import colorsys
from dataclasses import dataclass

import numpy as np

from .data import SampleSet
from .exceptions import RenderError, TrainingError


@dataclass(frozen=True)
class LinearModel:
    """One-vs-rest linear classifiers: class c scores w_c . x + b_c."""

    weights: np.ndarray  # (K, dim)
    biases: np.ndarray  # (K,)
    reg: float
    epochs: int
    seed: int

    def __post_init__(self):
        weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        biases = np.ascontiguousarray(self.biases, dtype=np.float64)
        if weights.ndim != 2 or biases.shape != (weights.shape[0],):
            raise ValueError("weights must be (K, dim) with matching biases")
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(biases))):
            raise ValueError("model parameters must be finite")
        weights.setflags(write=False)
        biases.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class Metrics:
    """Confusion matrix (rows = truth) and the derived accuracy figures."""

    confusion: np.ndarray  # (K, K) counts
    per_class_accuracy: np.ndarray  # (K,), NaN for classes absent from truth
    overall_accuracy: float
    average_accuracy: float
    kappa: float


def train_linear_ovr(
    train: SampleSet, reg: float = 1e-3, epochs: int = 50, seed: int = 0
) -> LinearModel:
    """Train K one-vs-rest hinge-loss linear classifiers by subgradient descent.

    Epoch-shuffled with step 1/(reg * t); the shuffle stream derives from
    `seed`, so identical inputs give bit-identical weights.
    """
    if train.labels is None:
        raise TrainingError("training requires labeled samples")
    labels = train.labels
    if np.unique(labels).size < 2:
        raise TrainingError("training requires at least two classes")
    if reg <= 0 or epochs < 1:
        raise ValueError("reg must be positive and epochs >= 1")

    x = train.spectra  # (dim, N)
    n_classes = int(labels.max())
    dim, n = x.shape
    # bias as an augmented constant feature, so it shares the (1 - 1/t) decay
    # and survives the large early steps of the 1/(reg t) schedule
    augmented = np.vstack([x, np.ones(n)])
    rng = np.random.default_rng(seed)
    weights = np.zeros((n_classes, dim))
    biases = np.zeros(n_classes)
    for c in range(1, n_classes + 1):
        target = np.where(labels == c, 1.0, -1.0)
        w = np.zeros(dim + 1)
        t = 0
        for _ in range(epochs):
            for i in rng.permutation(n):
                t += 1
                step = 1.0 / (reg * t)
                w *= 1.0 - step * reg  # = 1 - 1/t
                if target[i] * (w @ augmented[:, i]) < 1.0:
                    w += step * target[i] * augmented[:, i]
        weights[c - 1] = w[:-1]
        biases[c - 1] = w[-1]
    return LinearModel(weights, biases, reg=reg, epochs=epochs, seed=seed)


def predict(model: LinearModel, samples: SampleSet) -> np.ndarray:
    """Class labels by argmax score; exact ties go to the lower class id."""
    if samples.dim != model.weights.shape[1]:
        raise ValueError(
            f"sample dim {samples.dim} does not match model dim {model.weights.shape[1]}"
        )
    scores = model.weights @ samples.spectra + model.biases[:, None]
    return np.argmax(scores, axis=0).astype(np.int64) + 1


def predict_1nn(train: SampleSet, samples: SampleSet) -> np.ndarray:
    """Nearest-neighbor labels; distance ties go to the lower train index."""
    if train.labels is None:
        raise TrainingError("1-NN prediction requires labeled training samples")
    if samples.dim != train.dim:
        raise ValueError("dimension mismatch between train and query samples")
    xt = train.spectra
    xq = samples.spectra
    d2 = (
        np.sum(xq * xq, axis=0)[:, None]
        + np.sum(xt * xt, axis=0)[None, :]
        - 2.0 * (xq.T @ xt)
    )
    return train.labels[np.argmin(d2, axis=1)]


def evaluate(truth, predicted, n_classes: int) -> Metrics:
    """Confusion matrix and CA/OA/AA/kappa for labels in 1..n_classes."""
    truth = np.asarray(truth, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    if truth.shape != predicted.shape:
        raise ValueError(
            f"truth length {truth.shape} does not match predictions {predicted.shape}"
        )
    if truth.size == 0:
        raise ValueError("cannot evaluate an empty label set")
    for name, arr in (("truth", truth), ("predicted", predicted)):
        if arr.min() < 1 or arr.max() > n_classes:
            raise ValueError(f"{name} labels must lie in 1..{n_classes}")

    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (truth - 1, predicted - 1), 1)

    n = truth.size
    row = confusion.sum(axis=1)
    col = confusion.sum(axis=0)
    diag = np.diag(confusion)
    with np.errstate(invalid="ignore"):
        per_class = np.where(row > 0, diag / np.maximum(row, 1), np.nan)
    overall = float(diag.sum()) / n
    average = float(np.nanmean(per_class))
    expected = float(row @ col) / (n * n)
    if 1.0 - expected > 0:
        kappa = (overall - expected) / (1.0 - expected)
    else:
        kappa = 1.0 if overall == 1.0 else 0.0
    return Metrics(confusion, per_class, overall, average, float(kappa))


def default_palette(n_classes: int) -> list[tuple[int, int, int]]:
    """K fully saturated colors at evenly spaced hues (class c gets hue (c-1)/K)."""
    palette = []
    for c in range(n_classes):
        r, g, b = colorsys.hsv_to_rgb(c / n_classes, 1.0, 1.0)
        palette.append((round(r * 255), round(g * 255), round(b * 255)))
    return palette


def render_map(predicted, shape: tuple[int, int], palette=None) -> bytes:
    """Binary P6 pixmap of a label raster; label 0 renders black."""
    labels = np.asarray(predicted, dtype=np.int64).reshape(shape)
    rows, cols = labels.shape
    if labels.min() < 0:
        raise RenderError("labels must be non-negative")
    k = int(labels.max())
    if palette is None:
        palette = default_palette(k)
    if k > len(palette):
        raise RenderError(f"label {k} has no palette entry (palette holds {len(palette)})")
    table = np.zeros((len(palette) + 1, 3), dtype=np.uint8)
    if palette:
        table[1:] = np.asarray(palette, dtype=np.uint8)
    pixels = table[labels]
    header = f"P6\n{cols} {rows}\n255\n".encode("ascii")
    return header + pixels.tobytes()
