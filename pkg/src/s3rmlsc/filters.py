"""Edge-preserving spatial preprocessing of a cube.

Every band is smoothed by a guided filter whose guidance image is the
leading principal component of the cube; repeating the step feeds each
level's output into the next (hierarchical guided filtering).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import HsiCube
from .exceptions import DegenerateInputError
from .validation import as_float_image, check_positive, check_positive_int


@dataclass(frozen=True)
class FilterParams:
    """Window radius, blur regularizer, and hierarchy depth."""

    radius: int = 2
    epsilon: float = 1e-3
    levels: int = 2

    def __post_init__(self):
        check_positive_int(self.radius, "radius")
        check_positive(self.epsilon, "epsilon")
        check_positive_int(self.levels, "levels")


def box_mean(image: np.ndarray, radius: int) -> np.ndarray:
    """Mean over the (2r+1)^2 window around each pixel, windows shrinking at borders.

    Computed with an integral image (row-major cumulative sums), so cost is
    independent of the radius.
    """
    image = as_float_image(image)
    rows, cols = image.shape
    integral = np.zeros((rows + 1, cols + 1))
    integral[1:, 1:] = image.cumsum(axis=0).cumsum(axis=1)

    r0 = np.maximum(np.arange(rows) - radius, 0)
    r1 = np.minimum(np.arange(rows) + radius + 1, rows)
    c0 = np.maximum(np.arange(cols) - radius, 0)
    c1 = np.minimum(np.arange(cols) + radius + 1, cols)

    sums = (
        integral[np.ix_(r1, c1)]
        - integral[np.ix_(r0, c1)]
        - integral[np.ix_(r1, c0)]
        + integral[np.ix_(r0, c0)]
    )
    counts = (r1 - r0)[:, None] * (c1 - c0)[None, :]
    return sums / counts


def pca_guidance(cube: HsiCube) -> np.ndarray:
    """Project mean-centered pixel spectra onto the leading band-covariance eigenvector.

    The eigenvector's sign is fixed so its largest-magnitude entry is
    positive. Raises DegenerateInputError when every pixel shares one
    spectrum (zero variance).
    """
    spectra = cube.values.reshape(-1, cube.bands)
    if np.all(spectra == spectra[0]):
        raise DegenerateInputError("cube has zero variance; no guidance direction")
    centered = spectra - spectra.mean(axis=0)
    cov = centered.T @ centered / max(spectra.shape[0] - 1, 1)
    _, vecs = np.linalg.eigh(cov)
    leading = vecs[:, -1]
    if leading[np.argmax(np.abs(leading))] < 0:
        leading = -leading
    return (centered @ leading).reshape(cube.rows, cube.cols)


def guided_filter(image: np.ndarray, guide: np.ndarray, params: FilterParams) -> np.ndarray:
    """Smooth `image` while following edges of `guide`.

    Per window the output is the least-squares affine fit a*guide + b with an
    epsilon penalty on a; each pixel averages the coefficients of every
    window containing it.
    """
    image = as_float_image(image, "image")
    guide = as_float_image(guide, "guide")
    if image.shape != guide.shape:
        raise ValueError(f"image shape {image.shape} != guide shape {guide.shape}")
    r = params.radius
    mean_guide = box_mean(guide, r)
    mean_image = box_mean(image, r)
    corr = box_mean(guide * image, r)
    var_guide = box_mean(guide * guide, r) - mean_guide * mean_guide
    a = (corr - mean_guide * mean_image) / (var_guide + params.epsilon)
    b = mean_image - a * mean_guide
    return box_mean(a, r) * guide + box_mean(b, r)


def hgf(cube: HsiCube, params: FilterParams) -> HsiCube:
    """Hierarchical guided filtering: each level filters all bands against a
    fresh PCA guidance of the previous level's output."""
    current = cube
    for _ in range(params.levels):
        try:
            guide = pca_guidance(current)
        except DegenerateInputError:
            # spatially constant cube: zero guidance leaves constant bands intact
            guide = np.zeros((current.rows, current.cols))
        filtered = np.empty_like(current.values)
        for band in range(current.bands):
            filtered[:, :, band] = guided_filter(current.values[:, :, band], guide, params)
        current = HsiCube(current.rows, current.cols, current.bands, filtered)
    return current
