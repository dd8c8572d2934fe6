"""Dissimilarity (scatter) matrices between and within paired patches.

Spectral scatters accumulate size-scaled outer products of sample
differences between each patch and its nearest dissimilar-class patch.
Spatial scatters do the same over window neighborhoods of the patch
pixels, weighted by a Gaussian kernel of spectral distance. A convex
combination fuses the two domains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import HsiCube, SampleSet
from .exceptions import IntegrityError
from .patches import Patch
from .validation import check_unit_interval


@dataclass(frozen=True)
class ScatterPair:
    """Between/within dissimilarity matrices and their total."""

    between: np.ndarray  # (D, D)
    within: np.ndarray  # (D, D)
    total: np.ndarray  # (D, D), between + within

    def __post_init__(self):
        for name in ("between", "within", "total"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValueError(f"{name} must be square, got shape {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.between.shape != self.within.shape:
            raise ValueError("between and within must have equal shapes")

    @classmethod
    def from_parts(cls, between: np.ndarray, within: np.ndarray) -> "ScatterPair":
        between = _symmetrize(between)
        within = _symmetrize(within)
        return cls(between, within, between + within)

    @property
    def dim(self) -> int:
        return self.between.shape[0]


@dataclass(frozen=True)
class SpatialContext:
    """Spatial window side length and Gaussian kernel width.

    `kernel_width` None selects the self-scaling default 1 / (2 * mean
    squared spectral distance over the contributing pairs).
    """

    window: int = 3
    kernel_width: float | None = None

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 3, got {self.window}")
        if self.kernel_width is not None and not self.kernel_width > 0:
            raise ValueError(f"kernel_width must be positive, got {self.kernel_width}")


def _symmetrize(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    return (a + a.T) / 2.0


def _diff_outer_sum(xi: np.ndarray, xj: np.ndarray) -> np.ndarray:
    """sum_{i,j} (x_i - x_j)(x_i - x_j)^T over all column pairs of xi, xj."""
    ti = xi.shape[1]
    tj = xj.shape[1]
    si = xi.sum(axis=1, keepdims=True)
    sj = xj.sum(axis=1, keepdims=True)
    return tj * (xi @ xi.T) + ti * (xj @ xj.T) - si @ sj.T - sj @ si.T


def _weighted_diff_outer_sum(xi: np.ndarray, xj: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """sum_{i,j} w_ij (x_i - x_j)(x_i - x_j)^T for a dense weight matrix."""
    row = weights.sum(axis=1)
    col = weights.sum(axis=0)
    cross = xi @ weights @ xj.T
    return (xi * row) @ xi.T + (xj * col) @ xj.T - cross - cross.T


def mlsc_scatter(samples: SampleSet, patches: list[Patch], pairing: np.ndarray) -> ScatterPair:
    """Spectral between/within scatters over nearest dissimilar-class patch pairs.

    Between sums (x_i - x_j) outer products across each patch and its
    partner, scaled by 1/(t_k t_k'); within does the same over all ordered
    pairs inside each patch, scaled by 1/t_k^2. Accumulation follows patch
    index order.
    """
    pairing = np.asarray(pairing, dtype=np.int64)
    if pairing.shape != (len(patches),):
        raise ValueError("pairing must assign a partner to every patch")
    dim = samples.dim
    between = np.zeros((dim, dim))
    within = np.zeros((dim, dim))
    for k, patch in enumerate(patches):
        xi = samples.spectra[:, patch.members]
        xj = samples.spectra[:, patches[pairing[k]].members]
        between += _diff_outer_sum(xi, xj) / (xi.shape[1] * xj.shape[1])
        within += _diff_outer_sum(xi, xi) / (xi.shape[1] ** 2)
    return ScatterPair.from_parts(between, within)


def regularize_spectral(pair: ScatterPair, labeled: SampleSet, alpha: float) -> ScatterPair:
    """Blend the spectral scatters with their regularizers.

    Between gains the data-diversity term X X^T of the labeled spectra;
    within gains its own diagonal. alpha=0 returns the pair unchanged.
    """
    alpha = check_unit_interval(alpha, "alpha")
    if labeled.dim != pair.dim:
        raise ValueError(
            f"labeled sample dim {labeled.dim} does not match scatter dim {pair.dim}"
        )
    x = labeled.spectra
    between = (1.0 - alpha) * pair.between + alpha * (x @ x.T)
    within = (1.0 - alpha) * pair.within + alpha * np.diag(np.diag(pair.within))
    return ScatterPair.from_parts(between, within)


def spatial_neighborhood(
    patch: Patch, samples: SampleSet, cube: HsiCube, window: int
) -> SampleSet:
    """Deduplicated union of w x w windows around each member pixel.

    Windows clip at image borders; spectra are read from the cube for every
    pixel in the union regardless of its ground-truth label. Pixels come
    back in row-major order.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 3, got {window}")
    half = window // 2
    coords = samples.coords[patch.members]
    if (
        coords.min(initial=0) < 0
        or coords[:, 0].max(initial=0) >= cube.rows
        or coords[:, 1].max(initial=0) >= cube.cols
    ):
        raise IntegrityError("patch member coordinates fall outside the cube")
    mask = np.zeros((cube.rows, cube.cols), dtype=bool)
    for r, c in coords:
        mask[
            max(r - half, 0) : min(r + half + 1, cube.rows),
            max(c - half, 0) : min(c + half + 1, cube.cols),
        ] = True
    rr, cc = np.nonzero(mask)
    return SampleSet(
        dim=cube.bands,
        spectra=cube.values[rr, cc].T,
        coords=np.stack([rr, cc], axis=1),
        labels=None,
    )


def _squared_distances(xi: np.ndarray, xj: np.ndarray) -> np.ndarray:
    sq_i = np.sum(xi * xi, axis=0)
    sq_j = np.sum(xj * xj, axis=0)
    d2 = sq_i[:, None] + sq_j[None, :] - 2.0 * (xi.T @ xj)
    np.maximum(d2, 0.0, out=d2)
    return d2


def npmlsc_scatter(
    patches: list[Patch],
    pairing: np.ndarray,
    samples: SampleSet,
    cube: HsiCube,
    ctx: SpatialContext,
) -> ScatterPair:
    """Spatial between/within scatters over patch pixel neighborhoods.

    Pairs are weighted by eta_ij = exp(-gamma_w * d_ij^2) normalized over
    all pairs contributing to the same matrix, so each matrix is a convex
    combination of difference outer products. Within-pair sums exclude the
    i == j diagonal. Accumulation follows patch index order.
    """
    pairing = np.asarray(pairing, dtype=np.int64)
    if pairing.shape != (len(patches),):
        raise ValueError("pairing must assign a partner to every patch")
    hoods = [spatial_neighborhood(p, samples, cube, ctx.window) for p in patches]
    if any(h.n_samples == 0 for h in hoods):
        raise RuntimeError("internal error: empty spatial neighborhood")

    blocks = []  # (xi, xj, within_flag) in patch-index order
    for k in range(len(patches)):
        blocks.append((hoods[k].spectra, hoods[pairing[k]].spectra, False))
        blocks.append((hoods[k].spectra, hoods[k].spectra, True))

    gamma_w = ctx.kernel_width
    if gamma_w is None:
        total_sq = 0.0
        total_count = 0
        for xi, xj, is_within in blocks:
            d2 = _squared_distances(xi, xj)
            if is_within:
                np.fill_diagonal(d2, 0.0)
                total_count += d2.shape[0] * (d2.shape[0] - 1)
            else:
                total_count += d2.size
            total_sq += float(d2.sum())
        mean_sq = total_sq / total_count if total_count else 0.0
        gamma_w = 1.0 / (2.0 * mean_sq) if mean_sq > 0 else 1.0

    dim = samples.dim
    accum = {False: np.zeros((dim, dim)), True: np.zeros((dim, dim))}
    norm = {False: 0.0, True: 0.0}
    for xi, xj, is_within in blocks:
        weights = np.exp(-gamma_w * _squared_distances(xi, xj))
        if is_within:
            np.fill_diagonal(weights, 0.0)
        norm[is_within] += float(weights.sum())
        accum[is_within] += _weighted_diff_outer_sum(xi, xj, weights)

    between = accum[False] / norm[False] if norm[False] > 0 else accum[False]
    within = accum[True] / norm[True] if norm[True] > 0 else accum[True]
    return ScatterPair.from_parts(between, within)


def fuse(spectral: ScatterPair, spatial: ScatterPair, beta: float) -> ScatterPair:
    """Convex combination of spectral and spatial scatter pairs.

    beta=1 keeps the spectral pair, beta=0 the spatial pair.
    """
    beta = check_unit_interval(beta, "beta")
    if spectral.dim != spatial.dim:
        raise ValueError(
            f"spectral dim {spectral.dim} does not match spatial dim {spatial.dim}"
        )
    between = beta * spectral.between + (1.0 - beta) * spatial.between
    within = beta * spectral.within + (1.0 - beta) * spatial.within
    return ScatterPair.from_parts(between, within)
