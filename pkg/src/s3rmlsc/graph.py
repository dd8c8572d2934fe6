"""Unlabeled-data graph, its Laplacian, and the projection penalty matrix.

The graph connects every training sample (labeled and unlabeled) to its k
nearest neighbors; the Laplacian quadratic form penalizes projections that
tear close samples apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import SampleSet


@dataclass(frozen=True)
class Graph:
    """Symmetric non-negative adjacency with zero diagonal."""

    n: int
    adjacency: np.ndarray  # (n, n)

    def __post_init__(self):
        adj = np.ascontiguousarray(self.adjacency, dtype=np.float64)
        if adj.shape != (self.n, self.n):
            raise ValueError(f"adjacency must be ({self.n}, {self.n}), got {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be exactly symmetric")
        if np.any(np.diag(adj) != 0):
            raise ValueError("adjacency diagonal must be zero")
        if adj.min(initial=0.0) < 0:
            raise ValueError("adjacency weights must be non-negative")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)


@dataclass(frozen=True)
class LaplacianBundle:
    """Degree diagonal, Laplacian D - A, and optional penalty X L X^T."""

    degree: np.ndarray  # (n,) diagonal entries
    laplacian: np.ndarray  # (n, n)
    penalty: np.ndarray | None = None  # (dim, dim)


def knn_adjacency(all_train: SampleSet, k: int, weighted: bool = False) -> Graph:
    """Symmetrized k-nearest-neighbor graph over the training spectra.

    a_ij = 1 when j is among i's k nearest Euclidean neighbors or vice
    versa; distance ties resolve to the lower index. With `weighted`, edges
    carry exp(-d^2 / (2 * mean d^2)) heat-kernel weights instead of 1.
    """
    x = all_train.spectra
    n = all_train.n_samples
    if n <= k:
        raise ValueError(f"need more than k={k} samples, got {n}")
    sq = np.sum(x * x, axis=0)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x.T @ x)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")
    neighbors = order[:, :k]

    adj = np.zeros((n, n))
    rows = np.repeat(np.arange(n), k)
    adj[rows, neighbors.ravel()] = 1.0
    adj = np.maximum(adj, adj.T)
    if weighted:
        finite = d2[np.isfinite(d2)]
        scale = float(finite.mean()) if finite.size else 1.0
        heat = np.exp(-d2 / (2.0 * scale)) if scale > 0 else np.ones_like(d2)
        adj = adj * np.where(np.isfinite(d2), heat, 0.0)
        adj = (adj + adj.T) / 2.0
    np.fill_diagonal(adj, 0.0)
    return Graph(n, adj)


def laplacian(graph: Graph) -> LaplacianBundle:
    """Degree and Laplacian of the adjacency; every Laplacian row sums to zero."""
    degree = graph.adjacency.sum(axis=1)
    lap = np.diag(degree) - graph.adjacency
    return LaplacianBundle(degree=degree, laplacian=lap)


def semisup_penalty(all_train: SampleSet, bundle: LaplacianBundle) -> np.ndarray:
    """Penalty matrix X L X^T over all training spectra (labeled + unlabeled)."""
    x = all_train.spectra
    n = bundle.laplacian.shape[0]
    if x.shape[1] != n:
        raise ValueError(
            f"sample count {x.shape[1]} does not match graph size {n}"
        )
    penalty = x @ bundle.laplacian @ x.T
    return (penalty + penalty.T) / 2.0
