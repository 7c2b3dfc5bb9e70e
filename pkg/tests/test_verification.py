import numpy as np
import pytest

from holoequiv._validation import LimitExceededError, all_inputs
from holoequiv.activations import CLIP
from holoequiv.functions import CoordinateMeasure, Junta, WeightedAverage
from holoequiv.holographic import HoloScheme, MeanTest, build_junta_scheme, constant_scheme
from holoequiv.network import compile_poly_to_nn
from holoequiv.polynomial import holo_to_poly, poly_complexity
from holoequiv.verification import (
    PipelineConfig,
    box_norm_exhaustive,
    check_regularity,
    lemma_suite,
    mult_module_grid_error,
    random_regularity_instance,
    run_pipeline,
    sup_norm_error,
)


class TestSupNorm:
    def test_identical(self):
        f = Junta(3, (0,), [0.2, 0.8])
        assert sup_norm_error(f, f)[0] == 0

    def test_zero_vs_one(self):
        err, arg = sup_norm_error(Junta.constant(3, 0.0), Junta.constant(3, 1.0))
        assert err == 1 and len(arg) == 3

    def test_argmax(self):
        f = Junta(3, (2,), [0.0, 0.5])
        err, arg = sup_norm_error(f, Junta.constant(3, 0.0))
        assert err == 0.5 and arg[2] == 1

    def test_junta_vs_compiled_network(self):
        f = Junta(5, (0, 3), [0.1, 0.7, 0.4, 1.0])
        rep, _ = holo_to_poly(build_junta_scheme(f), 0.2)
        net = compile_poly_to_nn(rep, poly_complexity(rep).K)
        assert sup_norm_error(f, net)[0] <= 1e-9

    def test_limit(self):
        f = Junta.constant(14, 0.5)
        with pytest.raises(LimitExceededError):
            sup_norm_error(f, f)


def test_box_norm_of_zero_and_constant():
    mus = [CoordinateMeasure.uniform(3)] * 2
    assert box_norm_exhaustive(np.zeros((3, 3)), mus) == 0
    assert box_norm_exhaustive(np.full((3, 3), 0.5), mus) == pytest.approx(0.5)


def test_regularity_check_and_corruption(rng):
    hs, mus, eta = random_regularity_instance(rng)
    assert check_regularity(hs, mus, eta).passed
    bad = check_regularity(hs, mus, eta, corrupt=True)
    assert not bad.passed and bad.max_approx_error >= 0.5 - 1e-9


class TestPipeline:
    def test_junta(self):
        f = Junta(6, (1, 4), [0.0, 0.3, 0.7, 1.0])
        rep = run_pipeline(f, build_junta_scheme(f), 0.2)
        assert rep.passed
        a, b, c = rep.stages
        assert (a.target, b.target, c.target) == pytest.approx((0.6, 0.2, 0.6))
        assert a.measured <= 1e-9 and b.measured <= 1e-9
        assert c.measured <= c.slack
        assert rep.precondition["passed"]

    def test_constant(self):
        f = Junta.constant(4, 0.5)
        rep = run_pipeline(f, constant_scheme(4, 0.5), 0.2)
        assert rep.passed and all(s.measured <= s.slack + 1e-12 for s in rep.stages)

    def test_mean_scheme_uniform_n10(self):
        mu = CoordinateMeasure.uniform(10)
        f = WeightedAverage(mu, CLIP)
        scheme = HoloScheme(10, 2, [mu, mu], MeanTest(CLIP))
        rep = run_pipeline(f, scheme, 0.25)
        assert [s.target for s in rep.stages] == pytest.approx([0.75, 0.25, 0.75])
        assert rep.passed
        assert rep.stages[2].details["trials"] >= 225 * 0.25 / 0.75

    def test_reproducible(self):
        f = Junta(4, (0,), [0.25, 0.75])
        a = run_pipeline(f, build_junta_scheme(f), 0.3, PipelineConfig(seed=5)).to_dict()
        b = run_pipeline(f, build_junta_scheme(f), 0.3, PipelineConfig(seed=5)).to_dict()
        a["provenance"].pop("seconds"), b["provenance"].pop("seconds")
        assert a == b

    def test_text_report(self):
        f = Junta(3, (0,), [0.0, 1.0])
        text = run_pipeline(f, build_junta_scheme(f), 0.2).to_text()
        assert text.startswith("pipeline eps=0.2: PASS") and "c: nn->holo" in text

    def test_dimension_mismatch(self):
        f = Junta(3, (0,), [0.0, 1.0])
        with pytest.raises(ValueError):
            run_pipeline(f, build_junta_scheme(Junta(4, (0,), [0.0, 1.0])), 0.2)


class TestLemmaSuite:
    def test_default_passes(self):
        rep = lemma_suite((0,))
        assert rep.passed, rep.to_text()
        names = {r.name for r in rep.results}
        assert {"box_approximation", "energy_increment", "hoeffding"} <= names

    def test_fault_injection(self):
        rep = lemma_suite((0,), inject_fault="step_array")
        failed = {r.name for r in rep.results if not r.passed}
        assert "box_approximation" in failed
        bad = next(r for r in rep.results if r.name == "box_approximation")
        assert bad.counterexample is not None

    def test_mult_module_grid(self):
        assert mult_module_grid_error() <= 1e-12
