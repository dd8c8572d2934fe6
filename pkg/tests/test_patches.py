import numpy as np
import pytest

from s3rmlsc import (
    LinearityParams,
    Patch,
    SampleSet,
    build_patches,
    geodesic_matrix,
    hdc_mlp,
    nonlinearity_degree,
    pair_patches,
)
from s3rmlsc.exceptions import PairingError

from oracles import floyd_warshall, knn_edge_weights


def make_set(points, labels=None):
    points = np.asarray(points, dtype=float)
    n = points.shape[1]
    coords = np.stack([np.zeros(n, dtype=int), np.arange(n)], axis=1)
    if labels is None:
        labels = np.ones(n, dtype=int)
    return SampleSet(points.shape[0], points, coords, np.asarray(labels))


def circle_points(n, radius=1.0):
    angles = 2.0 * np.pi * np.arange(n) / n
    return radius * np.stack([np.cos(angles), np.sin(angles)])


def test_geodesic_collinear_path_sum():
    points = np.array([[0.0, 1.0, 2.0]])
    geo = geodesic_matrix(points, k_graph=1)
    assert geo[0, 2] == pytest.approx(2.0, abs=1e-12)
    assert geo[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_geodesic_two_points_is_euclidean():
    points = np.array([[0.0, 3.0], [0.0, 4.0]])
    geo = geodesic_matrix(points, k_graph=1)
    assert geo[0, 1] == pytest.approx(5.0, abs=1e-12)


def test_geodesic_circle_matches_floyd_warshall():
    points = circle_points(20)
    geo = geodesic_matrix(points, k_graph=2)
    oracle = floyd_warshall(knn_edge_weights(points, 2))
    np.testing.assert_allclose(geo, oracle, atol=1e-10)
    # antipodal pair travels half the polygon perimeter
    half_perimeter = 10 * 2.0 * np.sin(np.pi / 20)
    assert geo[0, 10] == pytest.approx(half_perimeter, abs=1e-10)


def test_geodesic_disconnected_is_inf():
    # two distant pairs; k=1 keeps them in separate components
    points = np.array([[0.0, 0.1, 10.0, 10.1]])
    geo = geodesic_matrix(points, k_graph=1)
    assert np.isinf(geo[0, 2])
    assert np.isfinite(geo[0, 1])


def test_nonlinearity_degree_collinear_zero():
    points = np.vstack([np.linspace(0, 5, 8), np.zeros(8)])
    assert nonlinearity_degree(points, k_graph=2) == pytest.approx(0.0, abs=1e-12)


def test_nonlinearity_degree_two_points_zero():
    points = np.array([[0.0, 1.0], [0.0, 2.0]])
    assert nonlinearity_degree(points, k_graph=1) == 0.0


def test_nonlinearity_degree_circle_matches_enumeration():
    points = circle_points(20)
    degree = nonlinearity_degree(points, k_graph=2)
    geo = floyd_warshall(knn_edge_weights(points, 2))
    terms = []
    for i in range(20):
        for j in range(i + 1, 20):
            euc = np.linalg.norm(points[:, i] - points[:, j])
            terms.append(geo[i, j] / euc - 1.0)
    assert degree == pytest.approx(np.mean(terms), abs=1e-10)
    assert degree > 0.0


def test_nonlinearity_degree_disconnected_inf():
    points = np.array([[0.0, 0.1, 10.0, 10.1]])
    assert nonlinearity_degree(points, k_graph=1) == np.inf


def test_nonlinearity_degree_coincident_points():
    points = np.array([[1.0, 1.0, 2.0]])
    degree = nonlinearity_degree(points, k_graph=2)
    assert degree == pytest.approx(0.0, abs=1e-12)


def test_hdc_mlp_collinear_single_patch():
    samples = make_set(np.vstack([np.linspace(0, 9, 10), np.zeros(10)]))
    patches = hdc_mlp(samples, LinearityParams(theta=0.05, k_graph=3, min_patch=2))
    assert len(patches) == 1
    assert sorted(patches[0].members.tolist()) == list(range(10))
    np.testing.assert_allclose(patches[0].mean, samples.spectra.mean(axis=1), atol=1e-12)


def test_hdc_mlp_infinite_theta_single_patch():
    rng = np.random.default_rng(0)
    samples = make_set(rng.random((3, 17)))
    patches = hdc_mlp(samples, LinearityParams(theta=np.inf, k_graph=3, min_patch=2))
    assert len(patches) == 1
    assert patches[0].size == 17


def test_hdc_mlp_circle_splits_and_certifies():
    samples = make_set(circle_points(40))
    params = LinearityParams(theta=0.01, k_graph=3, min_patch=5)
    patches = hdc_mlp(samples, params)
    assert len(patches) > 1
    all_members = np.concatenate([p.members for p in patches])
    assert sorted(all_members.tolist()) == list(range(40))
    assert len(set(all_members.tolist())) == 40
    for patch in patches:
        if patch.size > params.min_patch:
            pts = samples.spectra[:, patch.members]
            assert nonlinearity_degree(pts, params.k_graph) <= params.theta
        np.testing.assert_allclose(
            patch.mean, samples.spectra[:, patch.members].mean(axis=1), atol=1e-12
        )


def test_hdc_mlp_deterministic():
    rng = np.random.default_rng(1)
    samples = make_set(rng.random((4, 30)))
    params = LinearityParams(theta=0.005, k_graph=3, min_patch=3)
    first = hdc_mlp(samples, params)
    second = hdc_mlp(samples, params)
    assert len(first) == len(second)
    for a, b in zip(first, second):
        assert np.array_equal(a.members, b.members)


def test_build_patches_partitions_all_classes():
    rng = np.random.default_rng(2)
    points = np.concatenate(
        [circle_points(30), circle_points(24, radius=3.0) + 5.0], axis=1
    )
    labels = np.array([1] * 30 + [2] * 24)
    n = points.shape[1]
    coords = np.stack([np.zeros(n, dtype=int), np.arange(n)], axis=1)
    samples = SampleSet(2, points, coords, labels)
    patches = build_patches(samples, LinearityParams(theta=0.01, k_graph=3, min_patch=4))
    all_members = np.concatenate([p.members for p in patches])
    assert sorted(all_members.tolist()) == list(range(n))
    for patch in patches:
        assert np.unique(labels[patch.members]).tolist() == [patch.class_id]


def _patch(class_id, mean):
    return Patch(class_id, np.array([0 if class_id == 1 else 1]), np.asarray(mean, float))


def test_pair_patches_direct_argmin():
    # class-a patches at 0 and 1, class-b patch at 1.1
    a0 = Patch(1, np.array([0]), np.array([0.0]))
    a1 = Patch(1, np.array([1]), np.array([1.0]))
    b = Patch(2, np.array([2]), np.array([1.1]))
    partner = pair_patches([a0, a1, b])
    assert partner.tolist() == [2, 2, 1]


def test_pair_patches_skips_same_class_neighbor():
    # nearest patch overall shares the class; pairing must go cross-class
    b = Patch(1, np.array([0]), np.array([0.0, 0.0]))
    d = Patch(1, np.array([1]), np.array([0.5, 0.0]))
    c = Patch(2, np.array([2]), np.array([1.5, 0.0]))
    partner = pair_patches([b, d, c])
    assert partner[0] == 2  # b pairs with c although d is closer
    assert partner[1] == 2
    assert partner[2] == 1  # c prefers d over b


def test_pair_patches_matches_exhaustive_oracle():
    rng = np.random.default_rng(3)
    patches = []
    for k in range(6):
        patches.append(Patch(k % 3 + 1, np.array([k]), rng.random(4)))
    partner = pair_patches(patches)
    for k, patch in enumerate(patches):
        best = None
        best_dist = np.inf
        for j, other in enumerate(patches):
            if other.class_id == patch.class_id:
                continue
            d = np.linalg.norm(patch.mean - other.mean)
            if d < best_dist:
                best, best_dist = j, d
        assert partner[k] == best


def test_pair_patches_single_class_raises():
    patches = [_patch(1, [0.0]), _patch(1, [1.0])]
    with pytest.raises(PairingError):
        pair_patches(patches)


def test_pair_patches_never_same_class():
    rng = np.random.default_rng(4)
    patches = [Patch(k % 2 + 1, np.array([k]), rng.random(3)) for k in range(8)]
    partner = pair_patches(patches)
    for k in range(8):
        assert patches[partner[k]].class_id != patches[k].class_id
