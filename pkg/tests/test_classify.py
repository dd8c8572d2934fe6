import numpy as np
import pytest

from s3rmlsc import (
    LinearModel,
    SampleSet,
    default_palette,
    evaluate,
    predict,
    predict_1nn,
    render_map,
    train_linear_ovr,
)
from s3rmlsc.exceptions import RenderError, TrainingError


def make_train(points, labels):
    points = np.asarray(points, dtype=float)
    n = points.shape[1]
    coords = np.stack([np.zeros(n, dtype=int), np.arange(n)], axis=1)
    return SampleSet(points.shape[0], points, coords, np.asarray(labels))


def blobs(rng, centers, per_class, spread=0.3):
    points = []
    labels = []
    for c, center in enumerate(centers):
        points.append(np.asarray(center)[:, None] + spread * rng.standard_normal((2, per_class)))
        labels.extend([c + 1] * per_class)
    return make_train(np.concatenate(points, axis=1), labels)


def test_separable_blobs_perfect_training_accuracy():
    rng = np.random.default_rng(0)
    train = blobs(rng, [(-3.0, 0.0), (3.0, 0.0)], per_class=30, spread=0.4)
    model = train_linear_ovr(train, reg=1e-3, epochs=50, seed=0)
    predicted = predict(model, train)
    assert np.array_equal(predicted, train.labels)


def test_training_deterministic():
    rng = np.random.default_rng(1)
    train = blobs(rng, [(-2.0, 1.0), (2.0, -1.0), (0.0, 3.0)], per_class=20)
    a = train_linear_ovr(train, reg=1e-3, epochs=20, seed=7)
    b = train_linear_ovr(train, reg=1e-3, epochs=20, seed=7)
    assert np.array_equal(a.weights, b.weights)
    assert np.array_equal(a.biases, b.biases)
    c = train_linear_ovr(train, reg=1e-3, epochs=20, seed=8)
    assert not np.array_equal(a.weights, c.weights)


def _grid_oracle_accuracy(train, test):
    """Best one-vs-rest linear classifier over a coarse angle/bias grid."""
    n_classes = int(train.labels.max())
    weights = np.zeros((n_classes, 2))
    biases = np.zeros(n_classes)
    angles = np.linspace(0.0, 2.0 * np.pi, 90, endpoint=False)
    offsets = np.linspace(-4.0, 4.0, 81)
    for c in range(1, n_classes + 1):
        target = np.where(train.labels == c, 1.0, -1.0)
        best = (-1.0, 0.0, 0.0)
        for angle in angles:
            w = np.array([np.cos(angle), np.sin(angle)])
            scores = w @ train.spectra
            for b in offsets:
                acc = float(np.mean(np.sign(scores + b) == target))
                if acc > best[0]:
                    best = (acc, angle, b)
        weights[c - 1] = [np.cos(best[1]), np.sin(best[1])]
        biases[c - 1] = best[2]
    scores = weights @ test.spectra + biases[:, None]
    predicted = np.argmax(scores, axis=0) + 1
    return float(np.mean(predicted == test.labels))


def test_three_class_blobs_close_to_grid_oracle():
    rng = np.random.default_rng(2)
    centers = [(-3.0, -1.0), (3.0, -1.0), (0.0, 3.0)]
    train = blobs(rng, centers, per_class=40)
    test = blobs(rng, centers, per_class=40)
    model = train_linear_ovr(train, reg=1e-3, epochs=50, seed=0)
    model_acc = float(np.mean(predict(model, test) == test.labels))
    oracle_acc = _grid_oracle_accuracy(train, test)
    assert model_acc >= oracle_acc - 0.02


def test_training_rejects_single_class():
    rng = np.random.default_rng(3)
    train = make_train(rng.random((2, 10)), np.ones(10, dtype=int))
    with pytest.raises(TrainingError):
        train_linear_ovr(train)


def test_predict_fixture_and_ties():
    model = LinearModel(np.array([[1.0], [-1.0]]), np.zeros(2), 1e-3, 1, 0)
    x = make_train(np.array([[3.0]]), [1])
    assert predict(model, x)[0] == 1

    tie = LinearModel(np.array([[1.0], [1.0]]), np.zeros(2), 1e-3, 1, 0)
    assert predict(tie, x)[0] == 1  # exact tie goes to the lower class id


def test_predict_matches_dot_product_oracle():
    rng = np.random.default_rng(4)
    weights = rng.standard_normal((3, 4))
    biases = rng.standard_normal(3)
    model = LinearModel(weights, biases, 1e-3, 1, 0)
    samples = make_train(rng.standard_normal((4, 12)), np.ones(12, dtype=int))
    predicted = predict(model, samples)
    for i in range(12):
        scores = [weights[c] @ samples.spectra[:, i] + biases[c] for c in range(3)]
        assert predicted[i] == int(np.argmax(scores)) + 1


def test_predict_scale_invariant():
    rng = np.random.default_rng(5)
    weights = rng.standard_normal((3, 2))
    biases = rng.standard_normal(3)
    samples = make_train(rng.standard_normal((2, 9)), np.ones(9, dtype=int))
    base = predict(LinearModel(weights, biases, 1e-3, 1, 0), samples)
    scaled = predict(LinearModel(4.0 * weights, 4.0 * biases, 1e-3, 1, 0), samples)
    assert np.array_equal(base, scaled)


def test_predict_1nn_ties_to_lower_index():
    train = make_train(np.array([[0.0, 0.0, 5.0]]), [2, 1, 3])
    query = SampleSet(1, np.array([[0.0]]), np.array([[5, 5]]))
    assert predict_1nn(train, query)[0] == 2  # first training column wins


def test_evaluate_perfect():
    metrics = evaluate([1, 2, 2, 1], [1, 2, 2, 1], 2)
    assert metrics.overall_accuracy == 1.0
    assert metrics.average_accuracy == 1.0
    assert metrics.kappa == 1.0
    np.testing.assert_array_equal(metrics.confusion, [[2, 0], [0, 2]])


def test_evaluate_chance_kappa_zero():
    truth = [1] * 5 + [2] * 5
    predicted = [1] * 10
    metrics = evaluate(truth, predicted, 2)
    assert metrics.overall_accuracy == pytest.approx(0.5, abs=1e-15)
    assert metrics.kappa == pytest.approx(0.0, abs=1e-15)


def test_evaluate_hand_computed_kappa():
    # confusion [[4,1],[2,3]]: OA=0.7, p_e=(5*6+5*4)/100=0.5, kappa=0.4
    truth = [1] * 5 + [2] * 5
    predicted = [1, 1, 1, 1, 2, 1, 1, 2, 2, 2]
    metrics = evaluate(truth, predicted, 2)
    np.testing.assert_array_equal(metrics.confusion, [[4, 1], [2, 3]])
    assert metrics.overall_accuracy == pytest.approx(0.7, abs=1e-12)
    assert metrics.kappa == pytest.approx(0.4, abs=1e-12)
    np.testing.assert_allclose(metrics.per_class_accuracy, [0.8, 0.6], atol=1e-12)
    assert metrics.average_accuracy == pytest.approx(0.7, abs=1e-12)


def test_evaluate_kappa_bounded_by_oa():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = int(rng.integers(10, 60))
        k = int(rng.integers(2, 5))
        truth = rng.integers(1, k + 1, size=n)
        truth[:k] = np.arange(1, k + 1)  # every class appears
        predicted = rng.integers(1, k + 1, size=n)
        metrics = evaluate(truth, predicted, k)
        assert metrics.kappa <= metrics.overall_accuracy + 1e-12
        diagonal = np.array_equal(
            metrics.confusion, np.diag(np.diag(metrics.confusion))
        )
        assert (metrics.kappa == 1.0) == (diagonal and metrics.overall_accuracy == 1.0)


def test_evaluate_relabel_invariance():
    rng = np.random.default_rng(7)
    truth = rng.integers(1, 4, size=40)
    truth[:3] = [1, 2, 3]
    predicted = rng.integers(1, 4, size=40)
    base = evaluate(truth, predicted, 3)
    perm = np.array([0, 3, 1, 2])  # class c -> perm[c]
    permuted = evaluate(perm[truth], perm[predicted], 3)
    assert permuted.overall_accuracy == base.overall_accuracy
    assert permuted.average_accuracy == pytest.approx(base.average_accuracy, abs=1e-12)
    assert permuted.kappa == pytest.approx(base.kappa, abs=1e-12)
    np.testing.assert_allclose(
        np.sort(permuted.per_class_accuracy), np.sort(base.per_class_accuracy), atol=1e-12
    )


def test_evaluate_length_mismatch():
    with pytest.raises(ValueError):
        evaluate([1, 2], [1], 2)


def test_render_map_single_pixel():
    palette = default_palette(1)
    data = render_map(np.array([[1]]), (1, 1), palette)
    assert data == b"P6\n1 1\n255\n" + bytes(palette[0])


def test_render_map_all_background_black():
    data = render_map(np.zeros((2, 3), dtype=int), (2, 3))
    assert data == b"P6\n3 2\n255\n" + b"\x00" * 18


def test_render_map_checkerboard_fixture():
    # K=2 palette: hue 0 -> red, hue 1/2 -> cyan
    labels = np.array([[1, 2], [2, 1]])
    data = render_map(labels, (2, 2), default_palette(2))
    red = b"\xff\x00\x00"
    cyan = b"\x00\xff\xff"
    assert data == b"P6\n2 2\n255\n" + red + cyan + cyan + red


def test_render_map_label_out_of_palette():
    with pytest.raises(RenderError):
        render_map(np.array([[3]]), (1, 1), default_palette(2))
