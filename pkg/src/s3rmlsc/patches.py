"""Decompose each class into locally linear patches and pair them across classes.

A patch is accepted when the mean detour of geodesic over Euclidean
distances stays below a threshold; otherwise the points are bisected at
their farthest pair and the halves are processed recursively. Each patch is
then paired with the nearest patch (by mean spectrum) of a different class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, dijkstra

from .data import SampleSet
from .exceptions import PairingError
from .validation import check_positive, check_positive_int


@dataclass(frozen=True)
class LinearityParams:
    """Tolerance and graph parameters for the linear-patch criterion."""

    theta: float = 0.05
    k_graph: int = 5
    min_patch: int = 5

    def __post_init__(self):
        check_positive(self.theta, "theta")
        check_positive_int(self.k_graph, "k_graph")
        if int(self.min_patch) < 2:
            raise ValueError(f"min_patch must be >= 2, got {self.min_patch}")


@dataclass(frozen=True)
class Patch:
    """Index set of same-class samples certified locally linear, plus its mean."""

    class_id: int
    members: np.ndarray  # indices into the labeled SampleSet
    mean: np.ndarray  # (dim,)

    def __post_init__(self):
        members = np.ascontiguousarray(self.members, dtype=np.int64)
        mean = np.ascontiguousarray(self.mean, dtype=np.float64)
        if members.size == 0:
            raise ValueError("patch must have at least one member")
        members.setflags(write=False)
        mean.setflags(write=False)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "mean", mean)

    @property
    def size(self) -> int:
        return self.members.size


def _pairwise_distances(points: np.ndarray) -> np.ndarray:
    """Euclidean distances between columns of `points`."""
    sq = np.sum(points * points, axis=0)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (points.T @ points)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)


def _knn_edges(dist: np.ndarray, k: int) -> np.ndarray:
    """Symmetrized k-nearest-neighbor edge weights; non-edges are +inf.

    Ties in distance resolve to the lower index (stable sort).
    """
    n = dist.shape[0]
    ranked = dist.copy()
    np.fill_diagonal(ranked, np.inf)
    order = np.argsort(ranked, axis=1, kind="stable")
    neighbors = order[:, : min(k, n - 1)]
    edges = np.full((n, n), np.inf)
    rows = np.repeat(np.arange(n), neighbors.shape[1])
    edges[rows, neighbors.ravel()] = dist[rows, neighbors.ravel()]
    return np.minimum(edges, edges.T)  # edge if i->j or j->i


def geodesic_matrix(points: np.ndarray, k_graph: int) -> np.ndarray:
    """All-pairs shortest-path distances over the symmetrized knn graph.

    `points` holds one sample per column. Disconnected pairs carry +inf.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[1]
    if n < 2:
        raise ValueError("geodesic_matrix needs at least 2 points")
    edges = _knn_edges(_pairwise_distances(points), k_graph)
    graph = csgraph_from_dense(edges, null_value=np.inf)
    geo = dijkstra(graph, directed=False)
    return geo


def nonlinearity_degree(points: np.ndarray, k_graph: int) -> float:
    """Mean detour ratio (geodesic/Euclidean - 1) over all point pairs.

    Returns +inf when the knn graph is disconnected. Coincident point pairs
    contribute 0.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[1]
    if n < 2:
        raise ValueError("nonlinearity_degree needs at least 2 points")
    euc = _pairwise_distances(points)
    geo = geodesic_matrix(points, k_graph)
    iu = np.triu_indices(n, k=1)
    g = geo[iu]
    e = euc[iu]
    if np.any(np.isinf(g)):
        return float("inf")
    ratios = np.zeros_like(g)
    nz = e > 0
    ratios[nz] = g[nz] / e[nz] - 1.0
    return float(ratios.mean())


def _farthest_pair_split(points: np.ndarray) -> np.ndarray:
    """Boolean mask: True for members nearer the lower-index pole of the
    farthest pair (ties to the lower-index pole)."""
    dist = _pairwise_distances(points)
    n = dist.shape[0]
    iu = np.triu_indices(n, k=1)
    flat = np.argmax(dist[iu])  # first occurrence: lowest (i, j) row-major
    a, b = iu[0][flat], iu[1][flat]
    return dist[a] <= dist[b]


def hdc_mlp(
    samples: SampleSet,
    params: LinearityParams,
    member_indices: np.ndarray | None = None,
) -> list[Patch]:
    """Split one class's samples into maximal linear patches, top down.

    A candidate set is emitted as a patch once its nonlinearity degree drops
    to `theta` or its size reaches `min_patch`; otherwise it is bisected at
    the farthest pair. `member_indices` maps local sample positions to
    indices in the parent labeled SampleSet (defaults to 0..N-1). Emitted
    patches partition the input in depth-first order.
    """
    if samples.labels is None or samples.n_samples == 0:
        raise ValueError("hdc_mlp requires a non-empty labeled SampleSet")
    class_ids = np.unique(samples.labels)
    if class_ids.size != 1:
        raise ValueError(f"hdc_mlp expects a single class, got {class_ids.tolist()}")
    class_id = int(class_ids[0])
    if member_indices is None:
        member_indices = np.arange(samples.n_samples, dtype=np.int64)
    else:
        member_indices = np.asarray(member_indices, dtype=np.int64)

    spectra = samples.spectra
    patches: list[Patch] = []
    stack = [np.arange(samples.n_samples, dtype=np.int64)]
    while stack:
        local = stack.pop()
        pts = spectra[:, local]
        if local.size <= params.min_patch or (
            nonlinearity_degree(pts, params.k_graph) <= params.theta
        ):
            patches.append(Patch(class_id, member_indices[local], pts.mean(axis=1)))
            continue
        near_low = _farthest_pair_split(pts)
        stack.append(local[~near_low])
        stack.append(local[near_low])  # processed first: depth-first, low pole first
    return patches


def build_patches(labeled: SampleSet, params: LinearityParams) -> list[Patch]:
    """Run hdc_mlp per class over a labeled SampleSet, classes in ascending order."""
    if labeled.labels is None:
        raise ValueError("build_patches requires a labeled SampleSet")
    patches: list[Patch] = []
    for class_id in np.unique(labeled.labels):
        members = np.flatnonzero(labeled.labels == class_id)
        class_view = SampleSet(
            dim=labeled.dim,
            spectra=labeled.spectra[:, members],
            coords=labeled.coords[members],
            labels=labeled.labels[members],
        )
        patches.extend(hdc_mlp(class_view, params, member_indices=members))
    return patches


def pair_patches(patches: list[Patch]) -> np.ndarray:
    """For each patch, the index of the nearest patch of a different class.

    Distance is Euclidean between patch means; ties resolve to the lower
    patch index. The pairing is directed.
    """
    if len(patches) < 2:
        raise PairingError("pairing needs at least two patches")
    classes = np.array([p.class_id for p in patches])
    if np.unique(classes).size < 2:
        raise PairingError("pairing needs patches from at least two classes")
    means = np.stack([p.mean for p in patches], axis=1)
    dist = _pairwise_distances(means)
    dist[classes[:, None] == classes[None, :]] = np.inf
    return np.argmin(dist, axis=1).astype(np.int64)
