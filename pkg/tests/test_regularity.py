import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holoequiv.functions import CoordinateMeasure
from holoequiv.regularity import (
    Partition,
    StepArray,
    box_inner_product,
    conditional_expectation,
    energy,
    find_violating_box,
    step_bound,
    weak_box_regularize,
)
from holoequiv.verification import (
    box_approximation_error,
    box_norm_exhaustive,
    random_regularity_instance,
)

U2 = [CoordinateMeasure.uniform(2)]


class TestBoxInnerProduct:
    def test_constant_full_boxes(self):
        mus = [CoordinateMeasure([0.2, 0.3, 0.5])] * 2
        h = np.full((3, 3), 0.4)
        assert box_inner_product(h, [[0, 1, 2], [0, 1, 2]], mus) == pytest.approx(0.4)

    def test_hand_arithmetic(self):
        assert box_inner_product(np.array([0.0, 1.0]), [[1]], U2) == pytest.approx(0.5)

    def test_empty_box(self):
        mus = [CoordinateMeasure.uniform(3)] * 2
        assert box_inner_product(np.ones((3, 3)), [[0, 1], []], mus) == 0.0


class TestConditionalExpectation:
    def test_singletons_recover_h(self, rng):
        mus = [CoordinateMeasure.uniform(4), CoordinateMeasure([0.1, 0.2, 0.3, 0.4])]
        h = rng.random((4, 4))
        W = conditional_expectation(h, Partition.singletons(4), mus).W
        np.testing.assert_allclose(W, h)

    def test_trivial_is_mean(self, rng):
        mu = CoordinateMeasure([0.1, 0.2, 0.3, 0.4])
        h = rng.random((4, 4))
        W = conditional_expectation(h, Partition.trivial(4), [mu, mu]).W
        assert W.shape == (1, 1)
        assert W[0, 0] == pytest.approx(mu.weights @ h @ mu.weights)

    def test_weighted_mean(self):
        W = conditional_expectation(np.array([0.0, 1.0]), Partition.trivial(2),
                                    [CoordinateMeasure([0.25, 0.75])]).W
        assert W[0] == pytest.approx(0.75)

    def test_zero_measure_cell(self):
        mu = CoordinateMeasure([0.5, 0.5, 0.0])
        W = conditional_expectation(np.array([0.2, 0.4, 0.9]), Partition([0, 0, 1]), [mu]).W
        np.testing.assert_allclose(W, [0.3, 0.0])


class TestEnergy:
    def test_all_ones(self):
        mus = [CoordinateMeasure.uniform(3)] * 2
        hs = [np.ones((3, 3))] * 3
        assert energy(hs, Partition([0, 1, 1]), mus) == pytest.approx(3.0)

    def test_hand_values(self):
        h = [np.array([0.0, 1.0])]
        assert energy(h, Partition.trivial(2), U2) == pytest.approx(0.25)
        assert energy(h, Partition.singletons(2), U2) == pytest.approx(0.5)


class TestFindViolatingBox:
    def test_zero_residuals(self):
        mus = [CoordinateMeasure.uniform(3)] * 2
        assert find_violating_box([np.zeros((3, 3))], mus, 0.01) is None

    def test_hand_case(self):
        found = find_violating_box([np.array([-0.5, 0.5])], U2, 0.2)
        assert found is not None
        i, boxes = found
        assert i == 0 and np.flatnonzero(boxes[0]).tolist() == [1]

    def test_below_threshold(self):
        assert find_violating_box([np.array([-0.5, 0.5])], U2, 0.3) is None

    def test_negative_violation(self):
        found = find_violating_box([np.array([0.1, -0.9])], U2, 0.3)
        assert found is not None and np.flatnonzero(found[1][0]).tolist() == [1]

    def test_alternating_is_sound(self, rng):
        for _ in range(10):
            hs, mus, eta = random_regularity_instance(rng, n_max=6)
            r = [h - h.mean() for h in hs]
            found = find_violating_box(r, mus, eta, search="alternating", restarts=4, rng=rng)
            if found is not None:
                i, boxes = found
                assert abs(box_inner_product(r[i], boxes, mus)) > eta

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            find_violating_box([np.array([0.0, 1.0])], U2, 0.1, search="magic")


class TestWeakBoxRegularize:
    def test_constant_arrays(self):
        mus = [CoordinateMeasure.uniform(4)] * 2
        p0 = Partition([0, 0, 1, 1])
        part, Ws, trace = weak_box_regularize([np.full((4, 4), 0.3)], mus, 0.1, initial=p0)
        assert part == p0 and not trace.steps
        np.testing.assert_allclose(Ws[0].W, 0.3)

    def test_one_step_to_singletons(self):
        h = np.array([0.0, 1.0])
        part, Ws, trace = weak_box_regularize([h], U2, 0.2)
        assert len(trace.steps) == 1
        assert part == Partition.singletons(2)
        assert box_norm_exhaustive(h - Ws[0].lift(part), U2) == 0.0

    def test_step_bound_value(self):
        assert step_bound(1, 0.5) == 4

    def test_bad_eta(self):
        with pytest.raises(ValueError):
            weak_box_regularize([np.zeros(2)], U2, 0.0)

    def test_trace_export(self):
        _, _, trace = weak_box_regularize([np.array([0.0, 1.0])], U2, 0.2)
        d = trace.to_dict()
        assert d["steps"][0]["box"] == [[1]]
        assert d["steps"][0]["energy_after"] - d["steps"][0]["energy_before"] >= 0.04


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_regularity_certificate(seed):
    rng = np.random.default_rng(seed)
    hs, mus, eta = random_regularity_instance(rng, n_max=6)
    part, Ws, trace = weak_box_regularize(hs, mus, eta)
    assert len(trace.steps) <= step_bound(len(hs), eta)
    for step in trace.steps:
        assert step.gain >= eta**2 - 1e-9
    assert part.m <= 2 ** (len(mus) * len(trace.steps))
    for h, W in zip(hs, Ws):
        assert ((W.W >= 0) & (W.W <= 1)).all()
        assert box_norm_exhaustive(h - W.lift(part), mus) <= eta + 1e-9
        assert box_approximation_error(h, part, W, mus) <= eta + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_energy_monotone_under_refinement(seed):
    rng = np.random.default_rng(seed)
    hs, mus, _ = random_regularity_instance(rng)
    n = mus[0].n
    coarse = Partition(rng.integers(0, 3, size=n))
    fine = coarse.refine([rng.random(n) < 0.5])
    assert fine.is_refinement_of(coarse)
    assert energy(hs, fine, mus) >= energy(hs, coarse, mus) - 1e-12


class TestPartition:
    def test_labels_compacted(self):
        p = Partition([5, 2, 5, 9])
        assert p.labels.tolist() == [1, 0, 1, 2] and p.m == 3

    def test_roundtrip(self):
        p = Partition([0, 1, 1, 2])
        assert Partition.from_dict(p.to_dict()) == p
        W = StepArray(np.arange(9, dtype=float).reshape(3, 3) / 10)
        W2 = StepArray.from_dict(W.to_dict())
        np.testing.assert_array_equal(W.W, W2.W)
        assert W.to_dict()["W"][:3] == [0.0, 0.1, 0.2]  # row-major
