import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from s3rmlsc import (
    HierarchicalGuidedFilter,
    HsiCube,
    OneNearestNeighbor,
    OvRHingeClassifier,
    S3RMLSC,
    FilterParams,
    hgf,
)


def spectral_instance(rng, per_class=25):
    centers = np.array([[0.0, 0.0], [2.0, 2.0], [4.0, 0.0]])
    x2 = np.concatenate(
        [c + 0.2 * rng.standard_normal((per_class, 2)) for c in centers]
    )
    lift = np.linalg.qr(rng.standard_normal((6, 2)))[0]
    x = x2 @ lift.T
    y = np.repeat([1, 2, 3], per_class)
    return x, y


def test_get_set_params_and_clone():
    est = S3RMLSC(n_components=2, alpha=0.1, beta=1.0, gamma=0.0)
    params = est.get_params()
    assert params["alpha"] == 0.1
    assert params["n_components"] == 2
    cloned = clone(est)
    assert cloned.get_params() == params
    est.set_params(alpha=0.7)
    assert est.alpha == 0.7


def test_spectral_only_fit_transform():
    rng = np.random.default_rng(0)
    x, y = spectral_instance(rng)
    est = S3RMLSC(n_components=2, alpha=0.4, beta=1.0, gamma=0.0, min_patch=5)
    z = est.fit(x, y).transform(x)
    assert z.shape == (x.shape[0], 2)
    assert est.projection_.shape == (6, 2)
    np.testing.assert_allclose(est.projection_.T @ est.projection_, np.eye(2), atol=1e-8)
    assert est.lambda_ > 0
    assert est.n_patches_ >= 3
    # projection separates the classes at least as well as chance
    np.testing.assert_allclose(z, x @ est.projection_, atol=1e-12)


def test_semisup_graph_path():
    rng = np.random.default_rng(1)
    x, y = spectral_instance(rng)
    unlabeled = x + 0.01 * rng.standard_normal(x.shape)
    est = S3RMLSC(n_components=2, beta=1.0, gamma=0.5, knn=4)
    est.fit(x, y, unlabeled=unlabeled)
    assert est.projection_.shape == (6, 2)


def test_spatial_path_requires_cube():
    rng = np.random.default_rng(2)
    x, y = spectral_instance(rng)
    est = S3RMLSC(n_components=2, beta=0.3, gamma=0.0)
    with pytest.raises(ValueError, match="coords and cube"):
        est.fit(x, y)


def test_spatial_path_with_cube():
    rng = np.random.default_rng(3)
    rows = cols = 8
    bands = 5
    values = rng.random((rows, cols, bands))
    labels = np.ones((rows, cols), dtype=int)
    labels[:, cols // 2 :] = 2
    values[:, cols // 2 :, 0] += 1.0  # separate the classes a little
    rr, cc = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    coords = np.stack([rr.ravel(), cc.ravel()], axis=1)
    x = values.reshape(-1, bands)
    y = labels.ravel()
    est = S3RMLSC(
        n_components=2, alpha=0.4, beta=0.3, gamma=0.0, window=3, min_patch=8
    )
    est.fit(x, y, coords=coords, cube=values)
    assert est.projection_.shape == (bands, 2)


def test_transform_before_fit_raises():
    est = S3RMLSC()
    with pytest.raises(NotFittedError):
        est.transform(np.zeros((3, 6)))


def test_transform_dim_mismatch():
    rng = np.random.default_rng(4)
    x, y = spectral_instance(rng)
    est = S3RMLSC(n_components=2, beta=1.0, gamma=0.0).fit(x, y)
    with pytest.raises(ValueError):
        est.transform(np.zeros((3, 4)))


def test_guided_filter_estimator_matches_function():
    rng = np.random.default_rng(5)
    values = rng.random((6, 6, 4))
    est = HierarchicalGuidedFilter(radius=1, epsilon=1e-3, levels=2)
    out = est.fit(values).transform(values)
    expected = hgf(HsiCube(6, 6, 4, values), FilterParams(1, 1e-3, 2)).values
    np.testing.assert_array_equal(out, expected)


def test_hinge_classifier_api():
    rng = np.random.default_rng(6)
    x = np.concatenate(
        [
            (-2.0, 0.0) + 0.3 * rng.standard_normal((30, 2)),
            (2.0, 0.0) + 0.3 * rng.standard_normal((30, 2)),
        ]
    )
    y = np.repeat([1, 2], 30)
    clf = OvRHingeClassifier(reg=1e-3, epochs=50, seed=0).fit(x, y)
    assert np.array_equal(clf.classes_, [1, 2])
    assert clf.predict(x).shape == (60,)
    assert clf.decision_function(x).shape == (60, 2)
    assert np.mean(clf.predict(x) == y) == 1.0
    with pytest.raises(NotFittedError):
        OvRHingeClassifier().predict(x)


def test_one_nearest_neighbor_api():
    x = np.array([[0.0, 0.0], [1.0, 1.0], [5.0, 5.0]])
    y = np.array([1, 1, 2])
    clf = OneNearestNeighbor().fit(x, y)
    np.testing.assert_array_equal(clf.predict(np.array([[0.1, 0.0], [4.9, 5.0]])), [1, 2])


def test_estimator_pipeline_composition():
    from sklearn.pipeline import Pipeline

    rng = np.random.default_rng(7)
    x, y = spectral_instance(rng)
    pipe = Pipeline(
        [
            ("reduce", S3RMLSC(n_components=2, beta=1.0, gamma=0.0)),
            ("classify", OvRHingeClassifier(seed=0)),
        ]
    )
    pipe.fit(x, y)
    assert np.mean(pipe.predict(x) == y) > 0.9
