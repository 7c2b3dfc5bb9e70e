import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holoequiv._validation import all_inputs, input_index
from holoequiv.activations import CLIP, CLIPPED_SQUARE, Activation, affine_squash
from holoequiv.functions import (
    CoordinateMeasure,
    Junta,
    Parity,
    TableFunction,
    WeightedAverage,
    average_measure,
    eval_function,
    function_from_dict,
    sample_coordinate,
    tabulate,
)


class TestEvalFunction:
    def test_weighted_average_uniform_mean(self):
        f = WeightedAverage(CoordinateMeasure.uniform(4), CLIP)
        assert eval_function(f, [1, 0, 1, 0]) == pytest.approx(0.5)

    def test_junta_projection(self):
        f = Junta(3, (0,), [0.0, 1.0])
        assert eval_function(f, [1, 0, 0]) == 1.0

    def test_parity(self):
        assert eval_function(Parity(3), [1, 1, 1]) == 1.0
        assert eval_function(Parity(3), [1, 1, 0]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            eval_function(Parity(3), [1, 0])

    def test_non_binary_input(self):
        with pytest.raises(ValueError):
            eval_function(Parity(2), [2, 0])

    def test_table_canonical_order(self):
        # coordinate 0 is the most significant bit
        f = TableFunction(2, [0.0, 0.25, 0.5, 1.0])
        assert eval_function(f, [1, 0]) == 0.5
        assert eval_function(f, [0, 1]) == 0.25


class TestValidation:
    def test_table_range(self):
        with pytest.raises(ValueError):
            TableFunction(1, [0.0, 1.5])

    def test_table_size_limit(self):
        with pytest.raises(ValueError):
            TableFunction(21, np.zeros(8))

    def test_junta_distinct_coords(self):
        with pytest.raises(ValueError):
            Junta(3, (1, 1), [0, 0, 0, 0])

    def test_junta_coord_range(self):
        with pytest.raises(ValueError):
            Junta(3, (3,), [0, 1])

    def test_weighted_average_requires_1_lipschitz(self):
        with pytest.raises(ValueError):
            WeightedAverage(CoordinateMeasure.uniform(2), CLIPPED_SQUARE)


class TestMeasures:
    def test_average_of_point_masses(self):
        mu = average_measure([CoordinateMeasure.point_mass(2, 0), CoordinateMeasure.point_mass(2, 1)])
        np.testing.assert_allclose(mu.weights, [0.5, 0.5])

    def test_average_idempotent(self):
        mu = CoordinateMeasure([0.2, 0.3, 0.5])
        assert average_measure([mu, mu]) == mu

    def test_average_of_basis(self):
        mu = average_measure([CoordinateMeasure(np.eye(3)[i]) for i in range(3)])
        np.testing.assert_allclose(mu.weights, [1 / 3] * 3)

    def test_average_errors(self):
        with pytest.raises(ValueError):
            average_measure([])
        with pytest.raises(ValueError):
            average_measure([CoordinateMeasure.uniform(2), CoordinateMeasure.uniform(3)])

    def test_renormalizes_small_deviation(self):
        mu = CoordinateMeasure([0.5, 0.5 + 5e-10])
        assert mu.weights.sum() == pytest.approx(1.0, abs=1e-15)

    def test_rejects_large_deviation(self):
        with pytest.raises(ValueError):
            CoordinateMeasure([0.5, 0.6])
        with pytest.raises(ValueError):
            CoordinateMeasure([1.5, -0.5])

    def test_point_mass_sampling(self, rng):
        mu = CoordinateMeasure.point_mass(5, 2)
        assert {sample_coordinate(mu, rng) for _ in range(50)} == {2}

    def test_uniform_frequency(self, rng):
        draws = CoordinateMeasure.uniform(2).sample(rng, size=10**6)
        assert 0.498 <= draws.mean() <= 0.502

    def test_zero_weight_never_drawn(self, rng):
        draws = CoordinateMeasure([0.5, 0.0, 0.5]).sample(rng, size=10**5)
        assert not (draws == 1).any()

    def test_reproducible(self):
        mu = CoordinateMeasure.uniform(7)
        a = mu.sample(np.random.default_rng(3), size=20)
        b = mu.sample(np.random.default_rng(3), size=20)
        np.testing.assert_array_equal(a, b)


class TestActivations:
    def test_lipschitz_constants(self):
        assert CLIP.lipschitz == 1 and CLIPPED_SQUARE.lipschitz == 2
        assert affine_squash(0.5, 0.25).lipschitz == 0.5

    def test_declared_below_actual_rejected(self):
        with pytest.raises(ValueError):
            Activation("piecewise_linear", ((0, 0), (1, 1)), 0.5)

    def test_range(self):
        with pytest.raises(ValueError):
            Activation("piecewise_linear", ((0, 0), (1, 2)))

    def test_constant_outside_breakpoints(self):
        act = Activation("piecewise_linear", ((0.2, 0.1), (0.4, 0.9)))
        assert act(-5) == pytest.approx(0.1) and act(5) == pytest.approx(0.9)


@st.composite
def junta_and_flip(draw):
    n = draw(st.integers(2, 8))
    r = draw(st.integers(0, min(3, n - 1)))
    coords = tuple(draw(st.permutations(range(n)))[:r])
    table = draw(st.lists(st.floats(0, 1), min_size=2**r, max_size=2**r))
    x = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    outside = [i for i in range(n) if i not in coords]
    i = draw(st.sampled_from(outside))
    return Junta(n, coords, table), np.array(x), i


@settings(max_examples=60, deadline=None)
@given(junta_and_flip())
def test_junta_ignores_outside_coordinates(case):
    f, x, i = case
    y = x.copy()
    y[i] ^= 1
    assert eval_function(f, x) == eval_function(f, y)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_weighted_average_flip_bound(n, seed):
    rng = np.random.default_rng(seed)
    mu = CoordinateMeasure.proportional(rng.random(n) + 1e-3)
    act = affine_squash(-0.7, 0.9)
    f = WeightedAverage(mu, act)
    X = all_inputs(n)
    vals = f.evaluate(X)
    for i in range(n):
        flipped = X.copy()
        flipped[:, i] ^= 1
        idx = [input_index(row) for row in flipped]
        assert np.all(np.abs(vals - vals[idx]) <= mu.weights[i] + 1e-12)


@pytest.mark.parametrize("f", [
    TableFunction(3, np.linspace(0, 1, 8)),
    WeightedAverage(CoordinateMeasure([0.1, 0.2, 0.3, 0.4]), affine_squash(1.0, 0.0)),
    Junta(5, (4, 1), [0.3, 0.1, 0.9, 0.5]),
    Junta.constant(3, 0.7),
    Parity(6),
])
def test_outputs_in_range_and_roundtrip(f):
    X = all_inputs(f.n)
    vals = f.evaluate(X)
    assert ((vals >= 0) & (vals <= 1)).all()
    g = function_from_dict(f.to_dict())
    np.testing.assert_array_equal(g.evaluate(X), vals)
    np.testing.assert_array_equal(tabulate(f).evaluate(X), vals)
