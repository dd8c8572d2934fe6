"""Synthetic cube generation for desk-scale verification.

Each generator lays class regions out as spatially coherent blocks, maps
pixel position smoothly onto a 2-D manifold (so spatial neighbors are also
manifold neighbors), lifts the 2-D points into band space through a seeded
random orthonormal basis, and adds Gaussian band noise.
"""

from __future__ import annotations

import numpy as np

from .data import HsiCube, LabelMap, save_cube

KINDS = ("two_moons_cube", "swiss_patch_cube", "gaussian_blobs_cube")


def _orthonormal_lift(bands: int, rng: np.random.Generator) -> np.ndarray:
    """Random (bands, 2) matrix with orthonormal columns, sign-fixed."""
    q, _ = np.linalg.qr(rng.standard_normal((bands, 2)))
    q = q[:, :2]
    for j in range(2):
        if q[np.argmax(np.abs(q[:, j])), j] < 0:
            q[:, j] = -q[:, j]
    return q


# overall manifold scale; sized so band noise near 0.05 leaves a plain
# nearest-neighbor baseline in the high-80s on a 32x32x20 cube
_MOON_SCALE = 0.3


def _moons_points(rows, cols, rng):
    """Two interleaving crescents, one per half of the image."""
    labels = np.ones((rows, cols), dtype=np.int64)
    labels[rows // 2 :, :] = 2
    points = np.zeros((rows, cols, 2))
    for r in range(rows):
        for c in range(cols):
            u = c / max(cols - 1, 1)
            if labels[r, c] == 1:
                v = r / max(rows // 2 - 1, 1)
            else:
                v = (r - rows // 2) / max(rows - rows // 2 - 1, 1)
            angle = np.pi * u
            radius = 1.0 + 0.3 * (v - 0.5)
            if labels[r, c] == 1:
                points[r, c] = (radius * np.cos(angle), radius * np.sin(angle))
            else:
                points[r, c] = (1.0 - radius * np.cos(angle), 0.5 - radius * np.sin(angle))
    jitter = 0.02 * rng.standard_normal((rows, cols, 2))
    return _MOON_SCALE * (points + jitter), labels


def _swiss_points(rows, cols, rng):
    """Two arcs of a planar spiral, split across the left and right halves."""
    labels = np.ones((rows, cols), dtype=np.int64)
    labels[:, cols // 2 :] = 2
    points = np.zeros((rows, cols, 2))
    for r in range(rows):
        for c in range(cols):
            if labels[r, c] == 1:
                u = c / max(cols // 2 - 1, 1)
                angle = 1.5 * np.pi + 1.5 * np.pi * u
            else:
                u = (c - cols // 2) / max(cols - cols // 2 - 1, 1)
                angle = 3.0 * np.pi + 1.5 * np.pi * u
            radius = angle / (4.5 * np.pi)
            v = r / max(rows - 1, 1)
            offset = 0.05 * (v - 0.5)
            points[r, c] = (
                (radius + offset) * np.cos(angle),
                (radius + offset) * np.sin(angle),
            )
    jitter = 0.01 * rng.standard_normal((rows, cols, 2))
    return points + jitter, labels


def _blobs_points(rows, cols, rng, n_classes=3):
    """Well-separated Gaussian blobs in vertical strips."""
    labels = np.ones((rows, cols), dtype=np.int64)
    strip = max(cols // n_classes, 1)
    for c in range(cols):
        labels[:, c] = min(c // strip, n_classes - 1) + 1
    centers = np.stack(
        [
            2.0 * np.cos(2.0 * np.pi * np.arange(n_classes) / n_classes),
            2.0 * np.sin(2.0 * np.pi * np.arange(n_classes) / n_classes),
        ],
        axis=1,
    )
    points = centers[labels - 1].astype(np.float64)
    points += 0.08 * rng.standard_normal((rows, cols, 2))
    return points, labels


def synth_dataset(kind: str, rows: int, cols: int, bands: int, noise: float, seed: int, out_dir):
    """Generate a dataset directory in the container format; returns its path.

    Identical arguments produce byte-identical directories.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}, expected one of {KINDS}")
    if min(rows, cols) < 4 or bands < 2:
        raise ValueError("need rows, cols >= 4 and bands >= 2")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    rng = np.random.default_rng(seed)
    lift = _orthonormal_lift(bands, rng)
    if kind == "two_moons_cube":
        points, labels = _moons_points(rows, cols, rng)
    elif kind == "swiss_patch_cube":
        points, labels = _swiss_points(rows, cols, rng)
    else:
        points, labels = _blobs_points(rows, cols, rng)

    spectra = points.reshape(-1, 2) @ lift.T  # (pixels, bands)
    spectra += noise * rng.standard_normal(spectra.shape)
    cube = HsiCube(rows, cols, bands, spectra.reshape(rows, cols, bands))
    label_map = LabelMap(rows, cols, labels)
    return save_cube(cube, out_dir, label_map)
