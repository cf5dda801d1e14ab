import numpy as np
import pytest

from wulffkit import kernels
from wulffkit.sphere import parameter_samples, seed_directions


@pytest.fixture
def each_backend():
    def run(fn):
        previous = kernels.BACKEND
        try:
            out = {}
            for name in kernels.available_backends():
                kernels.use_backend(name)
                out[name] = fn()
            return out
        finally:
            kernels.use_backend(previous)

    return run


def test_compiled_backend_is_built():
    # the package build compiles the extension; the fallback exists for hosts without a compiler
    assert "compiled" in kernels.available_backends()
    assert kernels.BACKEND == "compiled"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


@pytest.mark.parametrize("d", [2, 3])
def test_seed_topk_matches_brute_force(d, rng, each_backend):
    seeds = seed_directions(d - 1, 300)
    weights = rng.uniform(0.5, 2.0, size=300)
    x = rng.normal(size=(200, d))
    scores = x @ (seeds * weights[:, None]).T
    expected = np.argsort(-scores, axis=1, kind="stable")[:, :8]
    for name, got in each_backend(lambda: kernels.seed_topk(x, seeds, weights, 8)).items():
        np.testing.assert_array_equal(got, expected, err_msg=name)


def test_seed_topk_ties_prefer_lower_index(each_backend):
    seeds = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    x = np.array([[1.0, 0.0]])
    for got in each_backend(lambda: kernels.seed_topk(x, seeds, np.ones(4), 3)).values():
        np.testing.assert_array_equal(got, [[0, 1, 3]])


def _brute_directed(a, b):
    dist = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1).min(axis=1)
    return dist.max()


@pytest.mark.parametrize("d", [2, 3])
def test_directed_max_min_matches_brute_force(d, rng, each_backend):
    for trial in range(5):
        a = rng.normal(size=(400, d)) * rng.uniform(0.1, 3)
        b = rng.normal(size=(300, d)) + rng.normal(size=d)
        expected = _brute_directed(a, b)
        for name, (dist, i, j) in each_backend(lambda: kernels.directed_max_min(a, b)).items():
            assert dist == pytest.approx(expected, rel=1e-14), name
            assert np.linalg.norm(a[i] - b[j]) == pytest.approx(dist, rel=1e-14)


def test_directed_max_min_backends_agree_on_surfaces(each_backend):
    a = parameter_samples(2, 96)
    b = 1.05 * parameter_samples(2, 80) + 0.01
    results = each_backend(lambda: kernels.directed_max_min(a, b))
    dists = {name: r[0] for name, r in results.items()}
    assert len(set(dists.values())) == 1, dists
    circle = parameter_samples(1, 4096)
    results = each_backend(lambda: kernels.directed_max_min(circle, 1.01 * circle))
    for dist, _, _ in results.values():
        assert dist == pytest.approx(0.01, rel=1e-12)


def test_directed_max_min_degenerate_inputs(each_backend):
    one = np.zeros((1, 3))
    for dist, i, j in each_backend(lambda: kernels.directed_max_min(one, np.ones((1, 3)))).values():
        assert dist == pytest.approx(np.sqrt(3)) and (i, j) == (0, 0)
    for name in kernels.available_backends():
        previous = kernels.use_backend(name)
        with pytest.raises(ValueError):
            kernels.directed_max_min(np.zeros((0, 3)), one)
        kernels.use_backend(previous)
