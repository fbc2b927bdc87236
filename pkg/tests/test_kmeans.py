import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockkmeans.image import Dims, Image
from blockkmeans.kmeans import (
    KMeansConfig,
    KMeansInputError,
    KMeansModel,
    canonicalize,
    init_kmeans_pp,
    lloyd_step,
    render,
    run_kmeans,
)

from conftest import brute_force_inertia, ref_splitmix64


def test_init_single_centroid_is_seeded_point():
    pts = np.arange(10.0)[:, None] * 3
    for seed in range(5):
        first = ref_splitmix64(seed, 1)[0] % 10
        assert init_kmeans_pp(pts, 1, seed).tolist() == [[pts[first, 0]]]


def test_init_identical_points():
    pts = np.full((5, 3), 7.0)
    assert init_kmeans_pp(pts, 2, 11).tolist() == [[7.0] * 3] * 2


def test_init_zero_weight_fallback_order():
    # two distinct values, k=4: after both are chosen every weight is zero
    pts = np.array([[5.0], [5.0], [9.0]])
    centroids = init_kmeans_pp(pts, 4, 0)
    assert sorted(centroids[:2, 0].tolist()) == [5.0, 9.0]


def test_init_hand_enumerated_cdf():
    # seed 1: first draw mod 4 = 1 (value 0), u = 0.7458 -> second of the two 10s
    assert init_kmeans_pp([0, 0, 10, 10], 2, 1).tolist() == [[0.0], [10.0]]


@pytest.mark.parametrize("seed", range(40))
def test_init_second_centroid_in_other_group(seed):
    c = init_kmeans_pp([0, 0, 10, 10], 2, seed)
    assert c[0, 0] != c[1, 0]


def test_init_empty_input():
    with pytest.raises(KMeansInputError):
        init_kmeans_pp(np.empty((0, 1)), 2, 0)


def test_lloyd_step_example():
    centroids, labels, inertia = lloyd_step([10, 12, 40, 42], [[10], [40]])
    assert labels.tolist() == [0, 0, 1, 1]
    assert centroids.tolist() == [[11.0], [41.0]]
    assert inertia == 4.0 == brute_force_inertia([10, 12, 40, 42])


def test_lloyd_step_fixed_point():
    c1, _, i1 = lloyd_step([10, 12, 40, 42], [[11], [41]])
    c2, _, i2 = lloyd_step([10, 12, 40, 42], c1)
    assert c1.tolist() == c2.tolist() == [[11.0], [41.0]]
    assert i1 == i2


def test_lloyd_step_repairs_empty_cluster():
    centroids, labels, inertia = lloyd_step([[3.0, 3.0]] * 4, [[3.0, 3.0], [50.0, 50.0]])
    assert centroids.tolist() == [[3.0, 3.0], [3.0, 3.0]]
    assert inertia == 0.0
    assert labels.tolist() == [0, 0, 0, 0]


def test_lloyd_step_repair_moves_to_farthest_point():
    # centroid 1 starts far away and captures nothing; it relocates to value 9
    centroids, labels, _ = lloyd_step([0, 1, 2, 9], [[1], [100]])
    assert centroids[:, 0].tolist() == [3.0, 9.0]
    assert labels.tolist() == [0, 0, 0, 1]


def test_lloyd_step_ties_go_to_lowest_index():
    _, labels, _ = lloyd_step([5], [[4], [6]])
    assert labels.tolist() == [0]


def test_lloyd_step_dimension_mismatch():
    with pytest.raises(KMeansInputError):
        lloyd_step(np.zeros((3, 3)), np.zeros((2, 1)))


@pytest.mark.parametrize("seed", range(12))
def test_run_kmeans_two_groups(seed):
    model = run_kmeans([0, 0, 10, 10], KMeansConfig(k=2, seed=seed))
    assert model.centroids.tolist() == [[0.0], [10.0]]
    assert model.labels.tolist() == [0, 0, 1, 1]
    assert model.inertia == 0.0


def test_run_kmeans_every_first_choice_converges():
    # cover all four possible first picks of the 4-point set
    firsts = {}
    for seed in range(200):
        firsts.setdefault(ref_splitmix64(seed, 1)[0] % 4, seed)
    assert sorted(firsts) == [0, 1, 2, 3]
    for seed in firsts.values():
        assert run_kmeans([0, 0, 10, 10], KMeansConfig(k=2, seed=seed)).inertia == 0.0


def test_run_kmeans_k1_closed_form():
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 255, size=(50, 3))
    model = run_kmeans(pts, KMeansConfig(k=1))
    np.testing.assert_allclose(model.centroids[0], pts.mean(axis=0), rtol=1e-12)
    np.testing.assert_allclose(model.inertia, pts.var(axis=0).sum() * len(pts), rtol=1e-9)


def test_run_kmeans_k_at_least_distinct_points():
    model = run_kmeans([1, 5, 9, 5, 1], KMeansConfig(k=3, seed=4))
    assert model.inertia == 0.0
    model = run_kmeans([1, 5, 9], KMeansConfig(k=5, seed=4))
    assert model.inertia == 0.0


def test_run_kmeans_is_deterministic():
    pts = np.random.default_rng(3).integers(0, 256, size=(300, 3))
    cfg = KMeansConfig(k=4, seed=77)
    a, b = run_kmeans(pts, cfg), run_kmeans(pts, cfg)
    assert a.centroids.tobytes() == b.centroids.tobytes()
    assert a.labels.tobytes() == b.labels.tobytes()
    assert (a.inertia, a.iterations) == (b.inertia, b.iterations)


def test_run_kmeans_respects_max_iters():
    pts = np.random.default_rng(1).uniform(0, 100, size=(500, 2))
    model = run_kmeans(pts, KMeansConfig(k=8, max_iters=1, tol=0))
    assert model.iterations == 1


def _check_model(pts, model):
    pts = np.asarray(pts, dtype=float).reshape(len(model.labels), -1)
    d = ((pts[:, None, :] - model.centroids[None, :, :]) ** 2).sum(axis=2)
    assert model.labels.tolist() == np.argmin(d, axis=1).tolist()
    recomputed = d[np.arange(len(pts)), model.labels].sum()
    assert model.inertia == pytest.approx(recomputed, rel=1e-9, abs=1e-9)
    steps = list(model.inertia_history) + [model.inertia]
    for before, after in zip(steps, steps[1:]):
        assert after <= before * (1 + 1e-12) + 1e-9


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(*[st.integers(0, 255)] * 3), min_size=1, max_size=60),
    st.integers(1, 5),
    st.integers(0, 2**64 - 1),
)
def test_run_kmeans_invariants(points, k, seed):
    model = run_kmeans(points, KMeansConfig(k=k, seed=seed))
    assert model.k == k
    _check_model(points, model)
    means = model.centroids.mean(axis=1)
    assert (np.diff(means) >= 0).all()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 30), min_size=2, max_size=8), st.integers(0, 1000))
def test_never_beats_exhaustive_optimum(values, seed):
    model = run_kmeans(values, KMeansConfig(k=2, seed=seed))
    assert model.inertia >= brute_force_inertia(values) - 1e-9


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.tuples(st.integers(0, 100), st.integers(0, 100)), min_size=2, max_size=40),
    st.sampled_from([0.5, 2.0, 4.0]),
    st.integers(0, 100),
)
def test_scaling_equivariance(points, factor, seed):
    cfg = KMeansConfig(k=3, seed=seed, tol=0)
    base = run_kmeans(points, cfg)
    scaled = run_kmeans(np.asarray(points, dtype=float) * factor, cfg)
    assert scaled.labels.tolist() == base.labels.tolist()
    np.testing.assert_allclose(scaled.centroids, base.centroids * factor, rtol=1e-12, atol=1e-12)


def test_canonicalize_sorts_and_relabels():
    model = KMeansModel(np.array([[200.0], [10.0]]), np.array([0, 1]), 0.0, 1)
    out = canonicalize(model)
    assert out.centroids.tolist() == [[10.0], [200.0]]
    assert out.labels.tolist() == [1, 0]
    assert out.inertia == model.inertia


def test_canonicalize_idempotent():
    model = KMeansModel(np.array([[1.0, 1.0], [5.0, 0.0]]), np.array([1, 0, 1]), 3.0, 2)
    once = canonicalize(model)
    twice = canonicalize(once)
    assert once.centroids.tolist() == twice.centroids.tolist() == [[1.0, 1.0], [5.0, 0.0]]
    assert twice.labels.tolist() == [1, 0, 1]


def test_canonicalize_ties():
    model = KMeansModel(np.array([[4.0], [4.0]]), np.array([1, 0, 1]), 0.0, 1)
    out = canonicalize(model)
    assert out.labels.tolist() == [1, 0, 1]
    # same mean, lexicographic component order decides
    model = KMeansModel(np.array([[2.0, 0.0], [0.0, 2.0]]), np.array([0, 1]), 0.0, 1)
    assert canonicalize(model).centroids.tolist() == [[0.0, 2.0], [2.0, 0.0]]


def test_render_rounding_and_clamping():
    img = render(Dims(4, 1), [0, 1, 2, 3], [[10.5], [10.49], [-3.0], [300.0]], 255)
    assert img.flat() == [11, 10, 0, 255]


def test_render_constant_for_k1():
    img = render(Dims(3, 2), [0] * 6, [[1.5, 2.5, 3.4]], 255)
    assert img.flat() == [2, 3, 3] * 6


def test_render_reconstructs_exact_centroids():
    src = Image(2, 2, 1, 255, [0, 10, 10, 0])
    model = run_kmeans(src.samples.reshape(-1, 1), KMeansConfig(k=2))
    assert render(src.dims, model.labels, model.centroids, 255) == src


def test_render_length_mismatch():
    with pytest.raises(ValueError):
        render(Dims(2, 2), [0, 0, 0], [[1.0]], 255)
