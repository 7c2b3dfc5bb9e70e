"""Acceptance criteria 1-10.  Each test records one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from holoequiv._validation import LimitExceededError, all_inputs, binomial_slack
from holoequiv.activations import CLIP
from holoequiv.functions import CoordinateMeasure, Junta, WeightedAverage
from holoequiv.holographic import (
    FAIL_TOL,
    ExplicitTests,
    HoloScheme,
    MeanTest,
    averaged_test,
    build_junta_scheme,
    holo_check,
    holographic_parameter,
    identicalize,
)
from holoequiv.network import audit_complexity, compile_poly_to_nn, compiled_bounds
from holoequiv.polynomial import holo_to_poly, poly_complexity
from holoequiv.regularity import step_bound
from holoequiv.sampling import affine_sample_count, nn_to_holo, plan_affine, plan_values
from holoequiv.verification import (
    PipelineConfig,
    check_regularity,
    mult_module_grid_error,
    random_poly_rep,
    random_regularity_instance,
    random_test_scheme,
    run_pipeline,
    sup_norm_error,
)


def test_c01_multiplication_module(acceptance):
    t = time.perf_counter()
    err = mult_module_grid_error(101)
    dt = time.perf_counter() - t
    acceptance(1, err <= 1e-12 and dt < 1, f"101x101 grid, max |module - uv| = {err:.2e}", dt)


@pytest.fixture(scope="module")
def compiled_reps():
    rng = np.random.default_rng(2024)
    out = []
    t = time.perf_counter()
    for _ in range(60):
        rep = random_poly_rep(rng, n_max=10, m_max=3, degree_max=3, K_max=4)
        K = int(rng.integers(poly_complexity(rep).K, 5))
        out.append((rep, K, compile_poly_to_nn(rep, K)))
    return out, time.perf_counter() - t


def test_c02_compiler_exactness(acceptance, compiled_reps):
    cases, build = compiled_reps
    t = time.perf_counter()
    worst = 0.0
    for rep, K, net in cases:
        assert rep.n <= 10 and rep.m <= 3 and K <= 4
        X = all_inputs(rep.n)
        worst = max(worst, float(np.abs(net.evaluate(X) - np.clip(rep.evaluate(X), 0, 1)).max()))
    dt = time.perf_counter() - t + build
    acceptance(2, worst <= 1e-9 and dt < 30,
               f"{len(cases)} random reps, max |net - clip(p)| = {worst:.2e}", dt)


def test_c03_audit_bounds(acceptance, compiled_reps):
    cases, _ = compiled_reps
    t = time.perf_counter()
    bad = 0
    for rep, K, net in cases:
        audit, bounds = audit_complexity(net), compiled_bounds(rep, K)
        ok = (audit.vertex_count <= bounds.vertex_count
              and audit.max_affine_l1 <= bounds.affine_l1 * (1 + 1e-12)
              and audit.max_lipschitz <= 2)
        bad += not ok
    dt = time.perf_counter() - t
    acceptance(3, bad == 0, f"{len(cases)} compiled networks, {bad} audit violations", dt)


def test_c04_test_average(acceptance):
    rng = np.random.default_rng(4)
    t = time.perf_counter()
    worst, cases = 0.0, 0
    ok = True
    for _ in range(25):
        f, scheme = random_test_scheme(rng, n_max=10, k_max=2)
        eps = holographic_parameter(scheme, f)
        X = all_inputs(scheme.n)
        F = np.array([averaged_test(scheme, x) for x in X])
        gap = float(np.abs(F - f.evaluate(X)).max())
        ok &= gap <= 2 * eps + 1e-12
        if eps > 0:
            worst = max(worst, gap / (2 * eps))
        cases += 1
    dt = time.perf_counter() - t
    acceptance(4, ok and dt < 60, f"{cases} schemes, max |F - f| / 2eps = {worst:.3f}", dt)


def test_c05_regularity(acceptance):
    rng = np.random.default_rng(5)
    t = time.perf_counter()
    failures, steps = [], 0
    for i in range(100):
        style = "blocks" if i % 2 else "binary"
        hs, measures, eta = random_regularity_instance(rng, n_max=8, k_max=2, t_max=4,
                                                       style=style)
        chk = check_regularity(hs, measures, eta)
        assert chk.step_bound == step_bound(len(hs), eta) == math.ceil(len(hs) / eta**2)
        steps += chk.steps
        if not chk.passed:
            failures.append(i)
    dt = time.perf_counter() - t
    acceptance(5, not failures and dt < 300,
               f"100 instances, {steps} refinement steps, failing cases {failures}", dt)


def test_c06_holo_to_poly(acceptance):
    t = time.perf_counter()
    rows = []
    junta = Junta(8, (2, 5), [0.1, 0.9, 0.6, 0.3])
    mu = CoordinateMeasure.proportional(np.arange(1, 11))
    wa = WeightedAverage(mu, CLIP)
    cases = [("junta", junta, build_junta_scheme(junta)),
             ("mean-test", wa, HoloScheme(10, 2, [mu, mu], MeanTest(CLIP)))]
    for name, f, scheme in cases:
        for eps in (0.1, 0.2, 0.3):
            rep, _ = holo_to_poly(scheme, eps, search="exhaustive")
            rows.append((name, eps, sup_norm_error(f, rep)[0]))
    ok = all(err <= 3 * eps for _, eps, err in rows)
    dt = time.perf_counter() - t
    worst = max(err / (3 * eps) for _, eps, err in rows)
    acceptance(6, ok and dt < 300, f"{len(rows)} runs, max error / 3eps = {worst:.3f}", dt)


def test_c07_hoeffding(acceptance):
    rng = np.random.default_rng(7)
    delta = rho = 0.1
    runs = 10**5
    t = time.perf_counter()
    worst_rate, worst_z, ok = 0.0, 0.0, True
    for _ in range(12):
        n = int(rng.integers(2, 9))
        B = float(rng.uniform(0.5, 2.0))
        c = float(rng.uniform(-0.5, 0.5)) * B
        w = rng.normal(size=n)
        w *= (B - abs(c)) / np.abs(w).sum()
        plan = plan_affine(c, w, B, delta, rho, n=n)
        assert plan.r == affine_sample_count(B, delta, rho)
        x = rng.integers(0, 2, size=n)
        est = plan.estimate_counts(rng.multinomial(plan.r, plan.weights, size=runs),
                                   x[None, :])[:, 0]
        truth = c + float(w @ x)
        rate = float(np.mean(np.abs(est - truth) > delta + FAIL_TOL))
        se = est.std() / math.sqrt(runs)
        bias = abs(est.mean() - truth)
        ok &= rate <= rho + binomial_slack(rho, runs) and bias <= 4 * se + 1e-12
        worst_rate = max(worst_rate, rate)
        if se > 0:
            worst_z = max(worst_z, bias / se)
    dt = time.perf_counter() - t
    acceptance(7, ok and dt < 60,
               f"12 forms, worst failure {worst_rate:.4f}, worst |bias|/SE {worst_z:.2f}", dt)


def test_c08_network_sampling(acceptance):
    rng = np.random.default_rng(8)
    eps = 0.25
    t = time.perf_counter()
    lines, ok, uniform_runs = [], True, 0
    nets = []
    while len(nets) < 8:
        rep = random_poly_rep(rng, n_max=8, m_max=3, degree_max=3, K_max=4)
        if rep.n >= 4 or len(nets) >= 6:
            nets.append(compile_poly_to_nn(rep, poly_complexity(rep).K))
    f = Junta(6, (0, 4), [0.2, 0.9, 0.5, 0.0])
    jrep, _ = holo_to_poly(build_junta_scheme(f), eps)
    nets.append(compile_poly_to_nn(jrep, poly_complexity(jrep).K))
    worst = 0.0
    for net in nets:
        assert net.n <= 8
        X = all_inputs(net.n)
        truth = net.evaluate(X)
        for constants in ("local", "uniform"):
            scheme = nn_to_holo(net, eps, constants)
            try:
                vals = plan_values(scheme.tests.plan, X, 10**4, rng)
            except LimitExceededError:
                continue  # uniform counts beyond the draw limit
            uniform_runs += constants == "uniform"
            rates = np.mean(np.abs(vals - truth) > eps + FAIL_TOL, axis=0)
            worst = max(worst, float(rates.max()))
            ok &= rates.max() <= eps + binomial_slack(eps, 10**4)
            chk = holo_check(scheme, net, 3 * eps, mode="monte-carlo", trials=10**4, rng=rng)
            ok &= chk.passed
    # the derived scheme of the junta pipeline is 3eps-holographic for the junta itself
    chk = holo_check(nn_to_holo(nets[-1], eps), f, 3 * eps, mode="monte-carlo",
                     trials=10**4, rng=rng)
    ok &= chk.passed
    dt = time.perf_counter() - t
    acceptance(8, ok and dt < 600,
               f"{len(nets)} networks ({uniform_runs} also with uniform constants), "
               f"worst failure {worst:.4f} vs eps {eps}", dt)


def _perturbed_junta_scheme(f: Junta, lam: float) -> HoloScheme:
    measures = [CoordinateMeasure.proportional((1 - lam) * np.eye(f.n)[i] + lam / f.n)
                for i in f.coords]
    grid = np.indices((f.n,) * 2).reshape(2, -1).T
    entries = {tuple(int(i) for i in s): f.table for s in grid}
    return HoloScheme(f.n, 2, measures, ExplicitTests(f.n, 2, entries))


def test_c09_identical_sampling(acceptance):
    rng = np.random.default_rng(9)
    eps = 0.5
    alpha = eps**2 / 4
    t = time.perf_counter()
    ok, worst = True, 0.0
    f1 = Junta(5, (1, 3), [0.0, 1.0, 1.0, 0.0])
    f2 = Junta(4, (0, 2), [0.9, 0.2, 0.4, 0.7])
    sources = [(f1, build_junta_scheme(f1)), (f2, build_junta_scheme(f2)),
               (f1, _perturbed_junta_scheme(f1, 0.03)), (f2, _perturbed_junta_scheme(f2, 0.03))]
    for f, src in sources:
        assert holographic_parameter(src, f) <= alpha
        scheme = identicalize(src, eps, alpha=alpha)
        same = all(np.array_equal(m.weights, scheme.measures[0].weights)
                   for m in scheme.measures)
        chk = holo_check(scheme, f, eps, mode="monte-carlo", trials=10**4, rng=rng)
        ok &= scheme.k == 6 and same and chk.passed
        worst = max(worst, chk.worst_failure_rate)
    dt = time.perf_counter() - t
    acceptance(9, ok and dt < 300,
               f"{len(sources)} k=2 schemes, r=6, worst failure {worst:.4f} vs eps {eps}", dt)


def test_c10_pipeline(acceptance):
    t = time.perf_counter()
    junta = Junta(6, (1, 4), [0.0, 0.3, 0.7, 1.0])
    uni = CoordinateMeasure.uniform(10)
    skew = CoordinateMeasure.proportional([0.9] + [0.1 / 7] * 7)
    runs = [("junta", junta, build_junta_scheme(junta), 0.2),
            ("uniform-wa", WeightedAverage(uni, CLIP), HoloScheme(10, 2, [uni] * 2, MeanTest(CLIP)),
             0.25),
            ("skewed-wa", WeightedAverage(skew, CLIP),
             HoloScheme(8, 2, [skew] * 2, MeanTest(CLIP)), 0.25)]
    verdicts = []
    for name, f, scheme, eps in runs:
        rep = run_pipeline(f, scheme, eps, PipelineConfig(seed=10))
        verdicts.append(rep.passed)
        print(rep.to_text())
    dt = time.perf_counter() - t
    acceptance(10, all(verdicts) and dt < 900,
               "pipeline " + ", ".join(f"{r[0]} {'ok' if v else 'FAIL'}"
                                       for r, v in zip(runs, verdicts)), dt)
