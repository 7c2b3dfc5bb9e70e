"""Holographic sampling schemes.

A scheme on ``{0,1}^n`` draws ``k`` independent locations ``S_j ~ mu_j`` and
returns ``f_S(x_{S_1}, ..., x_{S_k})``.  Test functions are supplied by a
:class:`TestFunctions` provider; patterns ``a in {0,1}^k`` are indexed in
canonical order (``a[0]`` most significant).
"""

from __future__ import annotations

import itertools
import math
import threading
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from ._validation import (
    ENUMERATION_LIMIT,
    EXHAUSTIVE_LIMIT,
    LimitExceededError,
    all_inputs,
    as_generator,
    binomial_slack,
    check_bits,
    check_open_unit,
    check_positive_int,
)
from .activations import CLIP, Activation
from .functions import CoordinateMeasure, FuzzyFunction, Junta, average_measure

#: Differences up to ``eps + FAIL_TOL`` count as successes (absorbs float noise).
FAIL_TOL = 1e-12


class MissingTestError(KeyError):
    """A positive-probability location tuple has no test table."""


def pattern_index(A: np.ndarray) -> np.ndarray:
    """Canonical index of each row of a bit matrix."""
    A = np.asarray(A, dtype=np.int64)
    k = A.shape[-1]
    return A @ (1 << np.arange(k - 1, -1, -1, dtype=np.int64))


def all_patterns(k: int) -> np.ndarray:
    return all_inputs(k, limit=64)


class TestFunctions:
    """Provider of the test functions ``f_s : {0,1}^k -> [0,1]``."""

    kind = "abstract"

    def values(self, S: np.ndarray, A: np.ndarray) -> np.ndarray:
        """Evaluate ``f_{S[t]}(A[t])`` for each row ``t``."""
        return np.array([self.value(tuple(s), tuple(a)) for s, a in zip(S, A)], dtype=float)

    def value(self, s: tuple, a: tuple) -> float:
        return float(self.values(np.asarray([s]), np.asarray([a]))[0])

    def exact_terms(self, scheme: "HoloScheme", x: np.ndarray, limit: int):
        """Return ``(values, probabilities)`` over the positive-probability tuples."""
        S, probs = positive_tuples(scheme.measures, limit)
        return self.values(S, x[S]), probs

    def sample_values(self, scheme: "HoloScheme", X: np.ndarray, trials: int,
                      rng: np.random.Generator) -> np.ndarray:
        """``(trials, len(X))`` matrix of test outputs.

        One location tuple is drawn per trial and shared by every input, so each
        column is an independent-trials sample for that input.
        """
        S = draw_locations(scheme.measures, trials, rng)
        out = np.empty((trials, X.shape[0]))
        for col, x in enumerate(X):
            out[:, col] = self.values(S, x[S])
        return out

    def draw_once(self, scheme: "HoloScheme", x: np.ndarray, rng: np.random.Generator):
        s = tuple(int(m.sample(rng)) for m in scheme.measures)
        return self.value(s, tuple(int(x[i]) for i in s)), s

    def to_dict(self) -> dict:
        raise NotImplementedError


def positive_tuples(measures: Sequence[CoordinateMeasure], limit: int = ENUMERATION_LIMIT):
    """All location tuples with positive product measure and their probabilities."""
    supports = [np.flatnonzero(m.weights > 0) for m in measures]
    count = math.prod(len(s) for s in supports)
    if count > limit:
        raise LimitExceededError(
            f"{count} positive-probability location tuples exceed the enumeration limit {limit}")
    grids = np.meshgrid(*supports, indexing="ij")
    S = np.stack([g.ravel() for g in grids], axis=1)
    probs = np.ones(S.shape[0])
    for j, m in enumerate(measures):
        probs *= m.weights[S[:, j]]
    return S, probs


def draw_locations(measures: Sequence[CoordinateMeasure], trials: int,
                   rng: np.random.Generator) -> np.ndarray:
    return np.stack([m.sample(rng, size=trials) for m in measures], axis=1)


class ExplicitTests(TestFunctions):
    """Tables of ``2**k`` values keyed by location tuple."""

    kind = "explicit"

    def __init__(self, n: int, k: int, entries: dict):
        self.n = check_positive_int(n, "n")
        self.k = check_positive_int(k, "k")
        self.entries = {}
        for s, table in entries.items():
            s = tuple(int(i) for i in s)
            table = np.asarray(table, dtype=float).ravel()
            if len(s) != k or any(not 0 <= i < n for i in s):
                raise ValueError(f"invalid location tuple {s}")
            if table.shape[0] != 2**k:
                raise ValueError(f"test table for {s} needs {2**k} values")
            if (table < 0).any() or (table > 1).any():
                raise ValueError("test values must lie in [0, 1]")
            table.setflags(write=False)
            self.entries[s] = table
        self._dense = None
        if n**k <= ENUMERATION_LIMIT:
            dense = np.full((n**k, 2**k), np.nan)
            for s, table in self.entries.items():
                dense[np.ravel_multi_index(s, (n,) * k)] = table
            self._dense = dense

    def values(self, S, A):
        S = np.asarray(S, dtype=np.int64)
        cols = pattern_index(A)
        if self._dense is not None:
            out = self._dense[np.ravel_multi_index(S.T, (self.n,) * self.k), cols]
            if np.isnan(out).any():
                bad = tuple(S[np.flatnonzero(np.isnan(out))[0]])
                raise MissingTestError(f"no test table for location tuple {bad}")
            return out
        out = np.empty(S.shape[0])
        for row, (s, c) in enumerate(zip(map(tuple, S.tolist()), cols)):
            if s not in self.entries:
                raise MissingTestError(f"no test table for location tuple {s}")
            out[row] = self.entries[s][c]
        return out

    def table(self, s) -> np.ndarray:
        s = tuple(int(i) for i in s)
        if s not in self.entries:
            raise MissingTestError(f"no test table for location tuple {s}")
        return self.entries[s]

    def to_dict(self) -> dict:
        return {"kind": "explicit",
                "entries": {",".join(map(str, s)): t.tolist()
                            for s, t in sorted(self.entries.items())}}


class MeanTest(TestFunctions):
    """``f_s(a) = sigma(mean(a))``, the same for every location tuple."""

    kind = "mean"

    def __init__(self, activation: Activation = CLIP):
        self.activation = activation

    def values(self, S, A):
        return self.activation(np.asarray(A, dtype=float).mean(axis=1))

    def exact_terms(self, scheme, x, limit):
        # The number of ones among the sampled bits is Poisson-binomial.
        dist = np.array([1.0])
        for m in scheme.measures:
            p = float(m.weights @ x)
            dist = np.concatenate([dist * (1 - p), [0.0]]) + np.concatenate([[0.0], dist * p])
        k = scheme.k
        return self.activation(np.arange(k + 1) / k), dist

    def to_dict(self) -> dict:
        return {"kind": "mean", "activation": self.activation.to_dict()}


def constant_activation(c: float) -> Activation:
    return Activation("piecewise_linear", ((0.0, float(c)),), 0.0)


@dataclass(frozen=True, eq=False)
class HoloScheme:
    """Sampling measures ``mu_1..mu_k`` together with their test functions.

    ``measures`` is any indexable sequence of :class:`CoordinateMeasure`; plans
    derived from networks use a lazy layout because ``k`` can be astronomically
    large.
    """

    n: int
    k: int
    measures: Sequence[CoordinateMeasure]
    tests: TestFunctions
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_positive_int(self.k, "k")
        if isinstance(self.measures, (list, tuple)):
            if len(self.measures) != self.k:
                raise ValueError(f"expected {self.k} measures, got {len(self.measures)}")
            if any(m.n != self.n for m in self.measures):
                raise ValueError("every sampling measure must live on [n]")
            object.__setattr__(self, "measures", tuple(self.measures))

    def to_dict(self) -> dict:
        from .serialization import scheme_to_dict

        return scheme_to_dict(self)


def _values_of(f, X: np.ndarray) -> np.ndarray:
    if hasattr(f, "evaluate"):
        return np.asarray(f.evaluate(X), dtype=float)
    return np.array([f(x) for x in X], dtype=float)


def eval_scheme_once(scheme: HoloScheme, x, rng):
    """Run the scheme once on ``x``: returns ``(value, sampled locations)``."""
    x = check_bits(x, scheme.n)
    return scheme.tests.draw_once(scheme, x, as_generator(rng))


def averaged_test(scheme: HoloScheme, x, limit: int = ENUMERATION_LIMIT) -> float:
    """Exact expectation of the test output over the sampling measures."""
    x = check_bits(x, scheme.n)
    values, probs = scheme.tests.exact_terms(scheme, x, limit)
    return float(np.clip(values @ probs, 0.0, 1.0))


def failure_probability(scheme: HoloScheme, f, x, eps: float, mode: str = "exact",
                        trials: int | None = None, rng=None,
                        limit: int = ENUMERATION_LIMIT) -> float:
    """Probability that the test output misses ``f(x)`` by more than ``eps``."""
    x = check_bits(x, scheme.n)
    fx = float(_values_of(f, x[None, :])[0])
    if mode == "exact":
        values, probs = scheme.tests.exact_terms(scheme, x, limit)
        return float(min(1.0, probs[np.abs(values - fx) > eps + FAIL_TOL].sum()))
    if mode == "monte-carlo":
        trials = check_positive_int(trials, "trials")
        vals = scheme.tests.sample_values(scheme, x[None, :], trials, as_generator(rng))[:, 0]
        return float(np.mean(np.abs(vals - fx) > eps + FAIL_TOL))
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class HoloCheckReport:
    eps_target: float
    worst_failure_rate: float
    worst_input: tuple
    mode: str
    trials: int | None = None
    rates: np.ndarray | None = field(default=None, repr=False)

    @property
    def slack(self) -> float:
        if self.mode == "exact":
            return 0.0
        return binomial_slack(self.eps_target, self.trials)

    @property
    def passed(self) -> bool:
        return self.worst_failure_rate <= self.eps_target + self.slack

    def to_dict(self) -> dict:
        return {"eps_target": self.eps_target, "worst_failure_rate": self.worst_failure_rate,
                "worst_input": list(self.worst_input), "mode": self.mode,
                "trials": self.trials, "slack": self.slack, "passed": self.passed}


def holo_check(scheme: HoloScheme, f, eps: float, mode: str = "exact", trials: int | None = None,
               rng=None, limit: int = EXHAUSTIVE_LIMIT,
               enumeration_limit: int = ENUMERATION_LIMIT, chunk: int = 256) -> HoloCheckReport:
    """Worst failure probability over every input ``x in {0,1}^n``."""
    X = all_inputs(scheme.n, limit=limit)
    fx = _values_of(f, X)
    if mode == "exact":
        rates = np.empty(X.shape[0])
        for row, x in enumerate(X):
            values, probs = scheme.tests.exact_terms(scheme, x, enumeration_limit)
            rates[row] = min(1.0, probs[np.abs(values - fx[row]) > eps + FAIL_TOL].sum())
    elif mode == "monte-carlo":
        trials = check_positive_int(trials, "trials")
        rng = as_generator(rng)
        rates = np.empty(X.shape[0])
        for start in range(0, X.shape[0], chunk):
            block = slice(start, start + chunk)
            vals = scheme.tests.sample_values(scheme, X[block], trials, rng)
            rates[block] = np.mean(np.abs(vals - fx[block]) > eps + FAIL_TOL, axis=0)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    worst = int(np.argmax(rates))
    return HoloCheckReport(float(eps), float(rates[worst]), tuple(int(b) for b in X[worst]),
                           mode, trials if mode == "monte-carlo" else None, rates)


def holographic_parameter(scheme: HoloScheme, f, limit: int = EXHAUSTIVE_LIMIT,
                          enumeration_limit: int = ENUMERATION_LIMIT) -> float:
    """Smallest ``eps`` with ``max_x P(|f(x) - f_S(x_S)| > eps) <= eps`` (exact).

    ``phi(e) = max_x P(err_x > e)`` is a right-continuous step function; on each
    interval between consecutive error levels it is constant, so the answer is
    the first ``max(level, phi)`` that falls inside its interval.
    """
    X = all_inputs(scheme.n, limit=limit)
    fx = _values_of(f, X)
    errs, masses = [], []
    for row, x in enumerate(X):
        values, probs = scheme.tests.exact_terms(scheme, x, enumeration_limit)
        errs.append(np.abs(values - fx[row]))
        masses.append(probs)
    levels = np.unique(np.concatenate([[0.0], *errs]))
    phi = np.zeros(levels.shape[0])
    for e, p in zip(errs, masses):
        # P(err > levels[i]) for every level
        order = np.argsort(e)
        tail = np.concatenate([np.cumsum(p[order][::-1])[::-1], [0.0]])
        phi = np.maximum(phi, tail[np.searchsorted(e[order], levels, side="right")])
    upper = np.append(levels[1:], np.inf)
    for lo, hi, ph in zip(levels, upper, phi):
        cand = max(lo, ph)
        if cand < hi:
            return float(cand)
    return float(levels[-1])


def mean_sample_count(eps: float) -> int:
    eps = check_open_unit(eps)
    return math.ceil(2 * eps**-2 * math.log(2 / eps))


def build_mean_scheme(measure: CoordinateMeasure, activation: Activation = CLIP,
                          eps: float = 0.2) -> HoloScheme:
    """Mean of ``r(eps)`` independent samples from ``measure`` passed through ``activation``."""
    if activation.lipschitz > 1 + 1e-12:
        raise ValueError("activation must be 1-Lipschitz")
    r = mean_sample_count(eps)
    return HoloScheme(measure.n, r, [measure] * r, MeanTest(activation),
                      {"family": "weighted_average", "eps": eps})


def build_junta_scheme(f: Junta) -> HoloScheme:
    """Point masses at the junta coordinates; the test reads those bits."""
    if not f.coords:
        return constant_scheme(f.n, float(f.table[0]))
    k = len(f.coords)
    measures = [CoordinateMeasure.point_mass(f.n, i) for i in f.coords]
    return HoloScheme(f.n, k, measures, ExplicitTests(f.n, k, {f.coords: f.table}),
                      {"family": "junta"})


def constant_scheme(n: int, c: float, k: int = 1) -> HoloScheme:
    return HoloScheme(n, k, [CoordinateMeasure.uniform(n)] * k, MeanTest(constant_activation(c)),
                      {"family": "constant"})


def identicalized_sample_count(k: int, eps: float) -> int:
    return math.ceil(k * math.log(2 * k / eps**2))


class IdenticalizedTests(TestFunctions):
    """Label-free tests over ``r`` identically sampled positions.

    ``g_t(a)`` averages the labelled reconstruction of the source scheme over
    the posterior of the hidden labels given the locations ``t``.  Tables are
    computed per ``t`` on demand and memoized.
    """

    kind = "identicalized"

    def __init__(self, source: HoloScheme, r: int, exact_limit: int = ENUMERATION_LIMIT,
                 posterior_samples: int = 10_000, seed: int = 0):
        self.source = source
        self.r = check_positive_int(r, "r")
        self.exact_limit = exact_limit
        self.posterior_samples = posterior_samples
        self.seed = seed
        k = source.k
        self.exact = k**r <= exact_limit
        self._mu = np.stack([m.weights for m in source.measures])  # (k, n)
        self._labels = (np.array(list(itertools.product(range(k), repeat=r)), dtype=np.int64)
                        if self.exact else None)
        self._cache: dict[tuple, np.ndarray] = {}
        self._lock = threading.Lock()
        self._patterns = all_patterns(r) if r <= 20 else None

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "sampled"

    def _label_draws(self, t: tuple, post: np.ndarray):
        if self.exact:
            weights = np.prod(post[self._labels, np.arange(self.r)], axis=1)
            keep = weights > 0
            return self._labels[keep], weights[keep]
        rng = np.random.default_rng([self.seed, *t])
        cum = np.cumsum(post, axis=0)
        u = rng.random((self.posterior_samples, self.r))
        labels = np.stack([np.searchsorted(cum[:, j], u[:, j], side="right")
                           for j in range(self.r)], axis=1)
        labels = np.minimum(labels, self.source.k - 1)
        return labels, np.full(labels.shape[0], 1.0 / labels.shape[0])

    def table_for(self, t) -> np.ndarray:
        """All ``2**r`` values of ``g_t``."""
        t = tuple(int(i) for i in t)
        with self._lock:
            hit = self._cache.get(t)
        if hit is not None:
            return hit
        k, r = self.source.k, self.r
        mu_t = self._mu[:, t]  # (k, r)
        denom = mu_t.sum(axis=0)
        if (denom <= 0).any():
            raise AssertionError(f"location tuple {t} has zero mass under the average measure")
        post = mu_t / denom
        labels, weights = self._label_draws(t, post)
        present = np.stack([(labels == ell).any(axis=1) for ell in range(k)], axis=1)
        complete = present.all(axis=1)
        labels, weights = labels[complete], weights[complete]
        table = np.zeros(2**r)
        if labels.shape[0]:
            # first occurrence of each label
            first = np.stack([np.argmax(labels == ell, axis=1) for ell in range(k)], axis=1)
            S = np.asarray(t)[first]  # (L, k) source locations
            pats = all_patterns(k)
            # base tables for each selected tuple, (L, 2**k)
            uniq, inv = np.unique(S, axis=0, return_inverse=True)
            base = np.stack([self.source.tests.values(np.repeat(u[None, :], 2**k, axis=0), pats)
                             for u in uniq])[np.ravel(inv)]
            patterns = self._patterns if self._patterns is not None else all_patterns(r)
            step = max(1, 2**22 // 2**r)
            for lo in range(0, labels.shape[0], step):
                sl = slice(lo, lo + step)
                idx = pattern_index(patterns[:, first[sl]].transpose(1, 0, 2))  # (L, 2**r)
                table += weights[sl] @ np.take_along_axis(base[sl], idx, axis=1)
        table = np.clip(table, 0.0, 1.0)
        table.setflags(write=False)
        with self._lock:
            self._cache.setdefault(t, table)
        return table

    def values(self, S, A):
        S = np.asarray(S, dtype=np.int64)
        uniq, inv = np.unique(S, axis=0, return_inverse=True)
        tables = np.stack([self.table_for(u) for u in uniq])
        return tables[np.ravel(inv), pattern_index(A)]

    def to_dict(self) -> dict:
        from .serialization import scheme_to_dict

        return {"kind": "identicalized", "r": self.r, "source": scheme_to_dict(self.source),
                "exact_limit": self.exact_limit, "posterior_samples": self.posterior_samples,
                "seed": self.seed}


def identicalize(scheme: HoloScheme, eps: float, alpha: float | None = None,
                 exact_limit: int = ENUMERATION_LIMIT, posterior_samples: int = 10_000,
                 seed: int = 0) -> HoloScheme:
    """Convert a scheme with distinct sampling measures into one with a single measure.

    The source is assumed to be ``(k, alpha)``-holographic with
    ``alpha <= eps**2 / 4``; that is not checked.  If ``alpha`` is supplied and
    too large a warning is issued and the fact is recorded in the metadata.
    """
    eps = check_open_unit(eps)
    r = identicalized_sample_count(scheme.k, eps)
    mu = average_measure(scheme.measures)
    tests = IdenticalizedTests(scheme, r, exact_limit, posterior_samples, seed)
    meta = {"source_k": scheme.k, "eps": eps, "posterior": tests.mode}
    if alpha is not None:
        meta["source_alpha"] = alpha
        if alpha > eps**2 / 4:
            meta["alpha_exceeds_bound"] = True
            warnings.warn(f"source accuracy {alpha} exceeds eps**2/4 = {eps**2 / 4}; "
                          "the identically sampled guarantee does not apply", stacklevel=2)
    return HoloScheme(scheme.n, r, [mu] * r, tests, meta)


def explicit_from_callable(n: int, measures: Sequence[CoordinateMeasure],
                           test: Callable[[tuple, tuple], float]) -> ExplicitTests:
    """Tabulate ``test(s, a)`` over every positive-probability tuple ``s``."""
    k = len(measures)
    S, _ = positive_tuples(measures)
    pats = [tuple(int(b) for b in a) for a in all_patterns(k)]
    return ExplicitTests(n, k, {tuple(int(i) for i in s): [test(tuple(s), a) for a in pats]
                                for s in S})


__all__ = [
    "HoloScheme", "TestFunctions", "ExplicitTests", "MeanTest", "IdenticalizedTests",
    "HoloCheckReport", "MissingTestError", "eval_scheme_once", "averaged_test",
    "failure_probability", "holo_check", "holographic_parameter", "build_mean_scheme", "build_junta_scheme",
    "constant_scheme", "identicalize", "mean_sample_count", "identicalized_sample_count",
    "positive_tuples", "draw_locations", "pattern_index", "explicit_from_callable",
]
