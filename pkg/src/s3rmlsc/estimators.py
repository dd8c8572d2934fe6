"""Scikit-learn compatible wrappers around the functional pipeline pieces.

`S3RMLSC` is the dimensionality-reduction transformer: fit on labeled
spectra (rows = samples), optionally with pixel coordinates, the source
cube, and unlabeled spectra for the spatial and semi-supervised terms;
transform maps spectra into the learned subspace. `HierarchicalGuidedFilter`
smooths whole cubes and `OvRHingeClassifier` / `OneNearestNeighbor` are the
built-in classifiers.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .classify import LinearModel, predict, train_linear_ovr
from .data import HsiCube, SampleSet
from .filters import FilterParams, hgf
from .graph import knn_adjacency, laplacian, semisup_penalty
from .patches import LinearityParams, build_patches, pair_patches
from .scatter import (
    ScatterPair,
    SpatialContext,
    fuse,
    mlsc_scatter,
    npmlsc_scatter,
    regularize_spectral,
)
from .solver import assemble_objective, trace_ratio_dnm


def _check_spectra(X, name="X"):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n_samples, n_features), got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def _as_cube(values) -> HsiCube:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 3:
        raise ValueError(f"cube must be 3-D (rows, cols, bands), got {values.shape}")
    return HsiCube(values.shape[0], values.shape[1], values.shape[2], values)


class HierarchicalGuidedFilter(BaseEstimator, TransformerMixin):
    """Stateless cube smoother: guided filtering of every band against the
    cube's leading principal component, repeated `levels` times."""

    def __init__(self, radius=2, epsilon=1e-3, levels=2):
        self.radius = radius
        self.epsilon = epsilon
        self.levels = levels

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        params = FilterParams(radius=self.radius, epsilon=self.epsilon, levels=self.levels)
        return hgf(_as_cube(X), params).values


class S3RMLSC(BaseEstimator, TransformerMixin):
    """Semi-supervised spatial-spectral manifold scaling-cut projection.

    Parameters
    ----------
    n_components : target dimensionality d.
    alpha : spectral regularization weight in [0, 1].
    beta : spectral share of the spectral/spatial fusion in [0, 1];
        beta=1 skips the spatial scatter entirely.
    gamma : weight of the graph-Laplacian penalty in [0, 1]; gamma=0 skips
        the graph.
    knn : neighbor count of the semi-supervised graph.
    window : side length of the spatial neighborhood window (odd, >= 3).
    theta, k_graph, min_patch : linear-patch criterion parameters.
    kernel_width : spatial kernel width; None self-scales from the data.
    tol, max_iter : trace-ratio solver controls.

    Fitted attributes: ``projection_`` (D x d), ``lambda_``, ``n_iter_``,
    ``residual_``, ``n_patches_``.
    """

    def __init__(
        self,
        n_components=30,
        alpha=0.4,
        beta=0.3,
        gamma=0.5,
        knn=5,
        window=3,
        theta=0.05,
        k_graph=5,
        min_patch=5,
        kernel_width=None,
        tol=1e-8,
        max_iter=100,
    ):
        self.n_components = n_components
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.knn = knn
        self.window = window
        self.theta = theta
        self.k_graph = k_graph
        self.min_patch = min_patch
        self.kernel_width = kernel_width
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y, coords=None, cube=None, unlabeled=None):
        """Learn the projection from labeled spectra.

        X : (n_samples, n_features) labeled spectra.
        y : (n_samples,) class ids in 1..K.
        coords : (n_samples, 2) pixel (row, col) positions; required when
            beta < 1.
        cube : (rows, cols, bands) array the coords index into (typically
            the filtered cube); required when beta < 1.
        unlabeled : (n_unlabeled, n_features) spectra joining the labeled
            ones in the semi-supervised graph when gamma > 0.
        """
        X = _check_spectra(X)
        y = np.asarray(y, dtype=np.int64)
        if y.shape != (X.shape[0],):
            raise ValueError(f"y must have shape ({X.shape[0]},), got {y.shape}")
        n, dim = X.shape
        if self.beta < 1.0 and (coords is None or cube is None):
            raise ValueError("beta < 1 requires coords and cube for spatial scatters")
        if coords is None:
            coords = np.stack([np.zeros(n, np.int64), np.arange(n, dtype=np.int64)], axis=1)
        labeled = SampleSet(dim=dim, spectra=X.T, coords=coords, labels=y)

        params = LinearityParams(
            theta=self.theta, k_graph=self.k_graph, min_patch=self.min_patch
        )
        patches = build_patches(labeled, params)
        pairing = pair_patches(patches)
        spectral = mlsc_scatter(labeled, patches, pairing)
        spectral = regularize_spectral(spectral, labeled, self.alpha)

        if self.beta < 1.0:
            ctx = SpatialContext(window=self.window, kernel_width=self.kernel_width)
            spatial = npmlsc_scatter(patches, pairing, labeled, _as_cube(cube), ctx)
            fused = fuse(spectral, spatial, self.beta)
        else:
            fused = fuse(spectral, spectral, 1.0)

        if self.gamma > 0.0:
            train_spectra = labeled.spectra
            if unlabeled is not None and len(unlabeled):
                u = _check_spectra(unlabeled, "unlabeled")
                train_spectra = np.concatenate([labeled.spectra, u.T], axis=1)
            coords_all = np.stack(
                [
                    np.full(train_spectra.shape[1], -1, np.int64),
                    np.arange(train_spectra.shape[1], dtype=np.int64),
                ],
                axis=1,
            )
            all_train = SampleSet(dim=dim, spectra=train_spectra, coords=coords_all)
            bundle = laplacian(knn_adjacency(all_train, self.knn))
            penalty = semisup_penalty(all_train, bundle)
        else:
            penalty = np.zeros((dim, dim))

        between, total = assemble_objective(fused, penalty, self.gamma)
        result = trace_ratio_dnm(
            between, total, self.n_components, tol=self.tol, max_iter=self.max_iter
        )
        self.projection_ = result.matrix
        self.lambda_ = result.lambda_star
        self.n_iter_ = result.iterations
        self.residual_ = result.residual
        self.n_patches_ = len(patches)
        return self

    def transform(self, X):
        check_is_fitted(self, "projection_")
        X = _check_spectra(X)
        if X.shape[1] != self.projection_.shape[0]:
            raise ValueError(
                f"X has {X.shape[1]} features, projection expects "
                f"{self.projection_.shape[0]}"
            )
        return X @ self.projection_


class OvRHingeClassifier(BaseEstimator, ClassifierMixin):
    """One-vs-rest hinge-loss linear classifier trained by seeded
    epoch-shuffled subgradient descent.

    Features are standardized to zero mean and unit variance internally
    (the margin-1 hinge needs features on an O(1) scale; projected spectra
    can come out arbitrarily small).
    """

    def __init__(self, reg=1e-3, epochs=50, seed=0):
        self.reg = reg
        self.epochs = epochs
        self.seed = seed

    def _standardize(self, X):
        return (X - self.mean_) / self.scale_

    def fit(self, X, y):
        X = _check_spectra(X)
        y = np.asarray(y, dtype=np.int64)
        self.mean_ = X.mean(axis=0)
        scale = X.std(axis=0)
        self.scale_ = np.where(scale > 0, scale, 1.0)
        X = self._standardize(X)
        coords = np.stack(
            [np.zeros(len(y), np.int64), np.arange(len(y), dtype=np.int64)], axis=1
        )
        train = SampleSet(dim=X.shape[1], spectra=X.T, coords=coords, labels=y)
        self.model_: LinearModel = train_linear_ovr(
            train, reg=self.reg, epochs=self.epochs, seed=self.seed
        )
        self.classes_ = np.arange(1, self.model_.n_classes + 1)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        X = self._standardize(_check_spectra(X))
        return X @ self.model_.weights.T + self.model_.biases

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = self._standardize(_check_spectra(X))
        coords = np.stack(
            [np.zeros(X.shape[0], np.int64), np.arange(X.shape[0], dtype=np.int64)],
            axis=1,
        )
        return predict(self.model_, SampleSet(dim=X.shape[1], spectra=X.T, coords=coords))


class OneNearestNeighbor(BaseEstimator, ClassifierMixin):
    """Parameter-free 1-NN classifier with lower-index tie breaking."""

    def fit(self, X, y):
        self.X_ = _check_spectra(X)
        self.y_ = np.asarray(y, dtype=np.int64)
        self.classes_ = np.unique(self.y_)
        return self

    def predict(self, X):
        check_is_fitted(self, "X_")
        X = _check_spectra(X)
        d2 = (
            np.sum(X * X, axis=1)[:, None]
            + np.sum(self.X_ * self.X_, axis=1)[None, :]
            - 2.0 * (X @ self.X_.T)
        )
        return self.y_[np.argmin(d2, axis=1)]
