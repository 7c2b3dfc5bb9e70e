"""Exhaustive and Monte Carlo oracles, the end-to-end pipeline and the invariant battery."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ._validation import (
    EXHAUSTIVE_LIMIT,
    LimitExceededError,
    all_inputs,
    as_generator,
    binomial_slack,
    check_open_unit,
)
from .activations import CLIP
from .functions import CoordinateMeasure, FuzzyFunction, Junta, TableFunction, WeightedAverage
from .holographic import (
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
from .network import (
    NetworkBuilder,
    Input,
    add_mult_module,
    audit_complexity,
    compile_poly_to_nn,
    compiled_bounds,
)
from .polynomial import PolyRep, holo_to_poly, poly_complexity
from .regularity import Partition, StepArray, multilinear, step_bound, weak_box_regularize
from .sampling import describe_int, nn_to_holo, plan_affine


def _evaluate(g, X: np.ndarray) -> np.ndarray:
    if hasattr(g, "evaluate"):
        return np.asarray(g.evaluate(X), dtype=float)
    return np.array([g(x) for x in X], dtype=float)


def sup_norm_error(f, g, n: int | None = None, limit: int = EXHAUSTIVE_LIMIT):
    """Exact ``max_x |f(x) - g(x)|`` over ``{0,1}^n``; returns ``(error, argmax)``."""
    if n is None:
        n = f.n
    X = all_inputs(n, limit=limit)
    diff = np.abs(_evaluate(f, X) - _evaluate(g, X))
    i = int(np.argmax(diff))
    return float(diff[i]), tuple(int(b) for b in X[i])


# -- box norms by full enumeration ---------------------------------------------------------


def _subset_matrix(n: int) -> np.ndarray:
    """Row ``A`` is the indicator of the subset with bitmask ``A``."""
    return all_inputs(n, limit=16)[:, ::-1].astype(float)


def _box_values(h: np.ndarray, measures: Sequence[CoordinateMeasure], limit: int) -> np.ndarray:
    k, n = h.ndim, h.shape[0]
    if 2 ** (n * k) > limit:
        raise LimitExceededError(f"{2 ** (n * k)} boxes exceed the enumeration limit {limit}")
    S = _subset_matrix(n)
    return multilinear(h, [S * m.weights for m in measures])


def box_norm_exhaustive(h, measures: Sequence[CoordinateMeasure], limit: int = 2**20) -> float:
    """``sup_A |E h 1_{A_1 x ... x A_k}|`` by enumerating every product box."""
    h = np.asarray(h, dtype=float)
    return float(np.abs(_box_values(h, measures, limit)).max())


def box_approximation_error(g, partition: Partition, W, measures: Sequence[CoordinateMeasure],
                            limit: int = 2**20) -> float:
    """Largest ``|E g 1_A - sum_u W(u) prod_j mu_j(A_j & P_{u_j})|`` over product boxes ``A``.

    The second term is computed from ``W`` and the partition cells directly, so a
    corrupted step array shows up here even if the residual arrays were right.
    """
    g = np.asarray(g, dtype=float)
    W = W.W if isinstance(W, StepArray) else np.asarray(W, dtype=float)
    lhs = _box_values(g, measures, limit)
    S = _subset_matrix(partition.n)
    ind = partition.indicator().T  # (n, q)
    mats = [(S * m.weights) @ ind for m in measures]
    return float(np.abs(lhs - multilinear(W, mats)).max())


# -- random instances -----------------------------------------------------------------------


def random_measure(rng: np.random.Generator, n: int, concentration: float = 1.0) -> CoordinateMeasure:
    w = rng.dirichlet(np.full(n, concentration))
    if rng.random() < 0.3:
        w[rng.random(n) < 0.3] = 0.0
        if w.sum() == 0:
            w[rng.integers(n)] = 1.0
    return CoordinateMeasure.proportional(w)


def random_poly_rep(rng: np.random.Generator, n_max: int = 10, m_max: int = 3,
                    degree_max: int = 3, K_max: int = 4) -> PolyRep:
    """Random representation whose complexity is at most ``K_max``."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, min(m_max, K_max) + 1))
    degree = int(rng.integers(1, min(degree_max, K_max) + 1))
    forms = []
    for _ in range(m):
        support = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
        w = rng.normal(size=support.size)
        w *= rng.uniform(0.2, K_max) / np.abs(w).sum()
        forms.append({int(j): float(x) for j, x in zip(support, w)})
    monos = {tuple([0] * m)}
    for _ in range(int(rng.integers(1, 6))):
        e = np.zeros(m, dtype=int)
        for _ in range(int(rng.integers(1, degree + 1))):
            e[rng.integers(m)] += 1
        monos.add(tuple(int(v) for v in e))
    monos = sorted(monos)
    c = rng.normal(size=len(monos))
    c *= rng.uniform(0.2, K_max) / np.abs(c).sum()
    return PolyRep(n, tuple(forms), {e: float(v) for e, v in zip(monos, c)})


def random_test_scheme(rng: np.random.Generator, n_max: int = 10, k_max: int = 2):
    """A function and a scheme for it with a modest holographic parameter.

    Either a noisy junta read through noisy point-mass-like measures, or a
    weighted average with a short mean test.
    """
    n = int(rng.integers(2, n_max + 1))
    k = int(rng.integers(1, k_max + 1))
    if rng.random() < 0.6:
        coords = tuple(sorted(int(i) for i in rng.choice(n, size=k, replace=False)))
        table = rng.random(2**k)
        lam = rng.uniform(0.0, 0.3)
        measures = [CoordinateMeasure.proportional((1 - lam) * np.eye(n)[i] + lam / n)
                    for i in coords]
        nu = rng.uniform(0.0, 0.1)
        base = Junta(n, coords, table)
        X = all_inputs(n)
        f = TableFunction(n, np.clip(base.evaluate(X) + rng.uniform(-nu, nu, X.shape[0]), 0, 1))
        noise = rng.uniform(-nu, nu, size=(n,) * k + (2**k,))
        grid = np.indices((n,) * k).reshape(k, -1).T
        entries = {tuple(int(i) for i in s): np.clip(table + noise[tuple(s)], 0, 1)
                   for s in grid}
        return f, HoloScheme(n, k, measures, ExplicitTests(n, k, entries), {"family": "noisy_junta"})
    mu = random_measure(rng, n, concentration=0.5)
    f = WeightedAverage(mu, CLIP)
    return f, HoloScheme(n, k, [mu] * k, MeanTest(CLIP), {"family": "weighted_average"})


def random_regularity_instance(rng: np.random.Generator, n_max: int = 8, k_max: int = 2,
                               t_max: int = 4, style: str = "blocks"):
    """Arrays for the regularity engine.

    ``"blocks"`` gives noisy block-constant arrays; ``"binary"`` gives
    unstructured 0/1 arrays with light noise, which need more refinement steps.
    """
    if style not in ("blocks", "binary"):
        raise ValueError(f"unknown style {style!r}")
    n = int(rng.integers(2, n_max + 1))
    k = int(rng.integers(1, k_max + 1))
    t = int(rng.integers(1, t_max + 1))
    if style == "binary":
        measures = [random_measure(rng, n, concentration=3.0) for _ in range(k)]
        hs = [np.clip(rng.integers(0, 2, size=(n,) * k) + rng.normal(scale=0.05, size=(n,) * k),
                      0.0, 1.0) for _ in range(t)]
        return hs, measures, float(rng.uniform(0.1, 0.15))
    measures = [random_measure(rng, n) for _ in range(k)]
    blocks = rng.integers(0, 3, size=n)
    hs = []
    for _ in range(t):
        levels = rng.random((3,) * k)
        h = levels[np.ix_(*([blocks] * k))] + rng.normal(scale=0.15, size=(n,) * k)
        hs.append(np.clip(h, 0.0, 1.0))
    eta = float(rng.uniform(0.1, 0.3))
    return hs, measures, eta


# -- regularity certificate -----------------------------------------------------------------


@dataclass
class RegularityCheck:
    steps: int
    step_bound: int
    min_gain: float
    max_box_norm: float
    max_approx_error: float
    eta: float

    @property
    def passed(self) -> bool:
        return (self.steps <= self.step_bound and self.min_gain >= self.eta**2 - 1e-9
                and self.max_box_norm <= self.eta + 1e-9
                and self.max_approx_error <= self.eta + 1e-9)


def check_regularity(hs, measures, eta: float, corrupt: bool = False) -> RegularityCheck:
    """Run the exhaustive engine and verify its output with independent oracles."""
    partition, Ws, trace = weak_box_regularize(hs, measures, eta, search="exhaustive")
    if corrupt:
        # shifted by 0.5 everywhere: the full box then misses by exactly 0.5
        Ws = [StepArray(Ws[0].W + 0.5)] + list(Ws[1:])
    gains = [s.gain for s in trace.steps] or [math.inf]
    norms, approx = [], []
    for h, W in zip(hs, Ws):
        norms.append(box_norm_exhaustive(np.asarray(h) - W.lift(partition), measures))
        approx.append(box_approximation_error(h, partition, W, measures))
    return RegularityCheck(len(trace.steps), step_bound(len(hs), eta), float(min(gains)),
                           max(norms), max(approx), eta)


# -- pipeline ----------------------------------------------------------------------------------


@dataclass
class PipelineConfig:
    seed: int = 0
    search: str = "exhaustive"
    restarts: int = 32
    exhaustive_limit: int = EXHAUSTIVE_LIMIT
    mc_limit: int = 8
    trials: int = 10_000
    constants: str = "local"
    check_precondition: bool = True


@dataclass
class StageReport:
    name: str
    target: float
    measured: float
    slack: float
    mode: str
    complexity: dict
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.measured <= self.target + self.slack + 1e-9

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


@dataclass
class PipelineReport:
    eps: float
    stages: list[StageReport]
    provenance: dict
    precondition: dict | None = None

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stages)

    def to_dict(self) -> dict:
        return {"eps": self.eps, "passed": self.passed, "precondition": self.precondition,
                "stages": [s.to_dict() for s in self.stages], "provenance": self.provenance}

    def to_text(self) -> str:
        lines = [f"pipeline eps={self.eps}: {'PASS' if self.passed else 'FAIL'}"]
        if self.precondition is not None:
            lines.append(f"  precondition holo_check at eps: worst failure "
                         f"{self.precondition['worst_failure_rate']:.4g} "
                         f"({'certified' if self.precondition['passed'] else 'not certified'})")
        for s in self.stages:
            lines.append(f"  {s.name}: measured {s.measured:.4g} <= target {s.target:.4g}"
                         f" (+{s.slack:.3g} slack, {s.mode}) K={s.complexity.get('K')}"
                         f" {'PASS' if s.passed else 'FAIL'}")
        return "\n".join(lines)


def _mc_trials(n: int, config: PipelineConfig, threshold: float) -> int:
    """Keep the total sample budget of a full sweep at ``trials * 2**mc_limit``.

    Never drop below the count that keeps 3 sigma slack within 20% of the threshold.
    """
    trials = config.trials
    if n > config.mc_limit:
        trials = trials * 2**config.mc_limit // 2**n
    floor = math.ceil(225 * (1 - threshold) / threshold)
    return max(trials, floor)


def run_pipeline(f: FuzzyFunction, scheme: HoloScheme, eps: float,
                 config: PipelineConfig | None = None) -> PipelineReport:
    """Chain scheme -> polynomial -> network -> scheme and check each stage bound.

    Stage targets are ``3 eps`` (polynomial vs ``f``), ``eps`` (network vs ``f``)
    and ``3 eps`` (derived scheme failure rate vs ``f``, Monte Carlo).
    """
    config = config or PipelineConfig()
    eps = check_open_unit(eps)
    if f.n != scheme.n:
        raise ValueError("function and scheme dimensions differ")
    n = f.n
    rng = as_generator(config.seed)
    started = time.perf_counter()
    X = all_inputs(n, limit=config.exhaustive_limit)
    fx = f.evaluate(X)

    precondition = None
    if config.check_precondition:
        pre = holo_check(scheme, f, eps, mode="exact", limit=config.exhaustive_limit)
        precondition = {"eps": eps, "worst_failure_rate": pre.worst_failure_rate,
                        "worst_input": list(pre.worst_input), "passed": pre.passed}

    rep, rp = holo_to_poly(scheme, eps, search=config.search, restarts=config.restarts,
                           rng=rng)
    pa = rep.evaluate(X)
    F = np.array([averaged_test(scheme, x) for x in X])
    stage_a = StageReport(
        "a: holo->poly", 3 * eps, float(np.abs(pa - fx).max()), 0.0, "exhaustive",
        rp.complexity.to_dict(),
        {"q": rp.q, "eta": rp.eta, "search": rp.search, "certified": rp.certified,
         "poly_vs_averaged_test": float(np.abs(pa - F).max()),
         "regularity_steps": len(rp.trace.steps), "coeff_l1": rp.coeff_l1,
         "coeff_bound": rp.coeff_bound})

    K1 = poly_complexity(rep).K
    net = compile_poly_to_nn(rep, K1)
    nb = net.evaluate(X)
    audit = audit_complexity(net)
    bounds = compiled_bounds(rep, K1)
    stage_b = StageReport(
        "b: poly->nn", eps, float(np.abs(nb - fx).max()), 0.0, "exhaustive", audit.to_dict(),
        {"compile_K": K1, "vertex_bound": bounds.vertex_count, "affine_l1_bound": bounds.affine_l1,
         "clip_never_hurts": bool(np.all(np.abs(nb - fx) <= np.abs(pa - fx) + 1e-9)),
         "network_vs_poly": float(np.abs(nb - np.clip(pa, 0, 1)).max())})

    derived = nn_to_holo(net, eps, config.constants)
    trials_f = _mc_trials(n, config, 3 * eps)
    chk = holo_check(derived, f, 3 * eps, mode="monte-carlo", trials=trials_f, rng=rng,
                     limit=config.exhaustive_limit)
    trials_net = _mc_trials(n, config, eps)
    net_chk = holo_check(derived, net, eps, mode="monte-carlo", trials=trials_net, rng=rng,
                         limit=config.exhaustive_limit)
    stage_c = StageReport(
        "c: nn->holo", 3 * eps, chk.worst_failure_rate, chk.slack, "monte-carlo",
        {"K": describe_int(derived.k), "k": describe_int(derived.k),
         "real_length": derived.metadata["real_length"]},
        {"trials": trials_f, "worst_input": list(chk.worst_input),
         "network_sampling": {"eps": eps, "trials": trials_net,
                              "worst_failure_rate": net_chk.worst_failure_rate,
                              "slack": net_chk.slack, "passed": net_chk.passed},
         "constants": config.constants})

    provenance = {"seed": config.seed, "search": config.search, "restarts": config.restarts,
                  "checks": {"a": "exhaustive", "b": "exhaustive", "c": "monte-carlo"},
                  "trials": config.trials, "mc_limit": config.mc_limit,
                  "constants": config.constants,
                  "seconds": round(time.perf_counter() - started, 3)}
    return PipelineReport(eps, [stage_a, stage_b, stage_c], provenance, precondition)


# -- invariant battery --------------------------------------------------------------------------


@dataclass
class LemmaResult:
    name: str
    passed: bool
    cases: int
    detail: dict = field(default_factory=dict)
    counterexample: dict | None = None


@dataclass
class LemmaSuiteReport:
    seeds: tuple
    results: list[LemmaResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {"seeds": list(self.seeds), "passed": self.passed,
                "results": [asdict(r) for r in self.results]}

    def to_text(self) -> str:
        lines = [f"lemma suite seeds={list(self.seeds)}: {'PASS' if self.passed else 'FAIL'}"]
        for r in self.results:
            lines.append(f"  {r.name}: {'PASS' if r.passed else 'FAIL'} ({r.cases} cases)")
            if r.counterexample is not None:
                lines.append(f"    counterexample: {r.counterexample}")
        return "\n".join(lines)


def mult_module_grid_error(points: int = 101) -> float:
    b = NetworkBuilder(2)
    add_mult_module(b, Input(0), Input(1))
    net = b.build()
    u = np.linspace(0.0, 1.0, points)
    U, V = np.meshgrid(u, u, indexing="ij")
    out = _module_values(net, U.ravel(), V.ravel())
    return float(np.abs(out - U.ravel() * V.ravel()).max())


def _module_values(net, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Evaluate a network on real-valued inputs (the module is used on [0,1] values)."""
    z = np.empty((len(net.vertices), u.shape[0]))
    x = np.stack([u, v], axis=1)
    for i, vert in enumerate(net.vertices):
        pre = np.full(u.shape[0], vert.bias)
        for j, w in vert.in_edges.items():
            pre += w * x[:, j]
        for j, w in vert.hid_edges.items():
            pre += w * z[j]
        z[i] = vert.activation(pre)
    return z[net.output]


def _lemma_compiler(rng, cases: int) -> LemmaResult:
    worst, worst_case = 0.0, None
    audit_ok = True
    for _ in range(cases):
        rep = random_poly_rep(rng)
        K = int(rng.integers(poly_complexity(rep).K, 5))
        net = compile_poly_to_nn(rep, K)
        X = all_inputs(rep.n)
        err = float(np.abs(net.evaluate(X) - np.clip(rep.evaluate(X), 0, 1)).max())
        bounds, audit = compiled_bounds(rep, K), audit_complexity(net)
        ok = (audit.vertex_count <= bounds.vertex_count
              and audit.max_affine_l1 <= bounds.affine_l1 * (1 + 1e-12)
              and audit.max_lipschitz <= bounds.lipschitz)
        audit_ok &= ok
        if err > worst or not ok:
            worst = max(worst, err)
            worst_case = {"rep": rep.to_dict(), "K": K, "error": err, "audit_ok": ok}
    passed = worst <= 1e-9 and audit_ok
    return LemmaResult("compiler_exactness", passed, cases, {"max_error": worst},
                       None if passed else worst_case)


def _lemma_test_average(rng, cases: int) -> LemmaResult:
    worst_ratio, bad = 0.0, None
    for _ in range(cases):
        f, scheme = random_test_scheme(rng)
        eps = holographic_parameter(scheme, f)
        X = all_inputs(scheme.n)
        F = np.array([averaged_test(scheme, x) for x in X])
        gap = float(np.abs(F - f.evaluate(X)).max())
        if gap > 2 * eps + 1e-12 and bad is None:
            bad = {"function": f.to_dict(), "eps": eps, "gap": gap}
        if eps > 0:
            worst_ratio = max(worst_ratio, gap / (2 * eps))
    return LemmaResult("test_average", bad is None, cases, {"max_gap_over_2eps": worst_ratio}, bad)


def _lemma_regularity(rng, cases: int, corrupt: bool) -> list[LemmaResult]:
    energy_bad = box_bad = None
    for case in range(cases):
        hs, measures, eta = random_regularity_instance(rng)
        chk = check_regularity(hs, measures, eta, corrupt=corrupt and case == 0)
        info = {"eta": eta, "arrays": [np.asarray(h).tolist() for h in hs],
                "measures": [m.weights.tolist() for m in measures], **asdict(chk)}
        if energy_bad is None and (chk.steps > chk.step_bound
                                   or chk.min_gain < eta**2 - 1e-9):
            energy_bad = info
        if box_bad is None and (chk.max_box_norm > eta + 1e-9
                                or chk.max_approx_error > eta + 1e-9):
            box_bad = info
    return [LemmaResult("energy_increment", energy_bad is None, cases, {}, energy_bad),
            LemmaResult("box_approximation", box_bad is None, cases,
                        {"fault_injected": corrupt}, box_bad)]


def _lemma_hoeffding(rng, cases: int, runs: int) -> LemmaResult:
    delta = rho = 0.1
    bad, worst = None, 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 9))
        w = rng.normal(size=n)
        B = float(rng.uniform(0.3, 2.0))
        c = float(rng.uniform(-0.5, 0.5)) * B
        w *= (B - abs(c)) / np.abs(w).sum()
        plan = plan_affine(c, w, B, delta, rho, n=n)
        x = rng.integers(0, 2, size=n)
        counts = rng.multinomial(plan.r, plan.weights, size=runs)
        est = plan.estimate_counts(counts, x[None, :])[:, 0]
        truth = c + float(w @ x)
        rate = float(np.mean(np.abs(est - truth) > delta + FAIL_TOL))
        worst = max(worst, rate)
        if rate > rho + binomial_slack(rho, runs) and bad is None:
            bad = {"c": c, "w": w.tolist(), "x": x.tolist(), "rate": rate, "r": plan.r}
    return LemmaResult("hoeffding", bad is None, cases, {"worst_failure_rate": worst}, bad)


def _lemma_network_sampling(rng, cases: int, trials: int) -> LemmaResult:
    eps = 0.25
    bad, worst = None, 0.0
    for _ in range(cases):
        rep = random_poly_rep(rng, n_max=4, m_max=2, degree_max=2, K_max=3)
        net = compile_poly_to_nn(rep, poly_complexity(rep).K)
        chk = holo_check(nn_to_holo(net, eps), net, eps, mode="monte-carlo", trials=trials,
                         rng=rng)
        worst = max(worst, chk.worst_failure_rate)
        if not chk.passed and bad is None:
            bad = {"network": net.to_dict(), **chk.to_dict()}
    return LemmaResult("network_sampling", bad is None, cases, {"worst_failure_rate": worst}, bad)


def _lemma_identical(rng, trials: int) -> LemmaResult:
    eps = 0.5
    n = int(rng.integers(3, 6))
    coords = tuple(sorted(int(i) for i in rng.choice(n, size=2, replace=False)))
    f = Junta(n, coords, rng.random(4))
    scheme = identicalize(build_junta_scheme(f), eps, alpha=0.0)
    chk = holo_check(scheme, f, eps, mode="monte-carlo", trials=trials, rng=rng)
    same = all(np.array_equal(m.weights, scheme.measures[0].weights) for m in scheme.measures)
    passed = chk.passed and same and scheme.k == 6
    return LemmaResult("identical_sampling", passed, 1,
                       {"r": scheme.k, "worst_failure_rate": chk.worst_failure_rate,
                        "markov_bound": (2 * 0.0 + eps**2 / 2) / eps},
                       None if passed else {"function": f.to_dict(), **chk.to_dict()})


def lemma_suite(seeds: Sequence[int] = (0,), inject_fault: str | None = None,
                scale: float = 1.0) -> LemmaSuiteReport:
    """Run every invariant over randomized small instances for each seed.

    ``inject_fault="step_array"`` corrupts one step array so the
    box-approximation invariant must fail.  ``scale`` multiplies the case counts.
    """
    if inject_fault not in (None, "step_array"):
        raise ValueError(f"unknown fault {inject_fault!r}")
    results: dict[str, LemmaResult] = {}

    def merge(r: LemmaResult):
        prev = results.get(r.name)
        if prev is None:
            results[r.name] = r
            return
        prev.cases += r.cases
        prev.passed &= r.passed
        if prev.counterexample is None:
            prev.counterexample = r.counterexample

    count = lambda c: max(1, int(round(c * scale)))  # noqa: E731
    for seed in seeds:
        rng = as_generator(int(seed))
        err = mult_module_grid_error()
        merge(LemmaResult("multiplication_module", err <= 1e-12, 101 * 101, {"max_error": err},
                          None if err <= 1e-12 else {"max_error": err}))
        merge(_lemma_compiler(rng, count(10)))
        merge(_lemma_test_average(rng, count(5)))
        for r in _lemma_regularity(rng, count(8), inject_fault == "step_array"):
            merge(r)
        merge(_lemma_hoeffding(rng, count(3), 20_000))
        merge(_lemma_network_sampling(rng, count(2), 2_000))
        merge(_lemma_identical(rng, 4_000))
    return LemmaSuiteReport(tuple(int(s) for s in seeds), list(results.values()))


__all__ = [
    "sup_norm_error", "box_norm_exhaustive", "box_approximation_error", "check_regularity",
    "RegularityCheck", "PipelineConfig", "StageReport", "PipelineReport", "run_pipeline",
    "LemmaResult", "LemmaSuiteReport", "lemma_suite", "mult_module_grid_error",
    "random_poly_rep", "random_test_scheme", "random_regularity_instance", "random_measure",
]
