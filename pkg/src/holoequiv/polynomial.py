"""Polynomials in bounded linear forms of the coordinates.

A polynomial in ``m`` formal variables is a dict mapping exponent tuples of
length ``m`` to float coefficients.  Accumulation always runs over sorted
exponent tuples so results do not depend on insertion order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._validation import ENUMERATION_LIMIT, LimitExceededError, check_bit_matrix, check_bits, check_open_unit
from .holographic import HoloScheme, all_patterns, positive_tuples
from .regularity import Partition, RegularityTrace, StepArray, weak_box_regularize

Poly = dict  # tuple[int, ...] -> float


# -- sparse polynomial arithmetic ---------------------------------------------------------


def canonical(poly: Mapping) -> Poly:
    return {e: float(c) for e, c in sorted(poly.items()) if c != 0}


def poly_add(a: Mapping, b: Mapping) -> Poly:
    out = dict(a)
    for e, c in sorted(b.items()):
        out[e] = out.get(e, 0.0) + c
    return canonical(out)


def poly_scale(a: Mapping, s: float) -> Poly:
    return canonical({e: s * c for e, c in a.items()})


def poly_mul(a: Mapping, b: Mapping) -> Poly:
    out: Poly = {}
    for ea, ca in sorted(a.items()):
        for eb, cb in sorted(b.items()):
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0.0) + ca * cb
    return canonical(out)


def poly_l1(poly: Mapping) -> float:
    return float(sum(abs(c) for c in poly.values()))


def poly_degree(poly: Mapping) -> int:
    return max((sum(e) for e in poly), default=0)


def constant(m: int, c: float) -> Poly:
    return canonical({(0,) * m: c})


def variable(m: int, i: int) -> Poly:
    e = [0] * m
    e[i] = 1
    return {tuple(e): 1.0}


def poly_eval(poly: Mapping, Y: np.ndarray) -> np.ndarray:
    """Evaluate at each row of ``Y`` (shape ``(N, m)``)."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    out = np.zeros(Y.shape[0])
    for e, c in sorted(poly.items()):
        term = np.full(Y.shape[0], c)
        for i, p in enumerate(e):
            if p:
                term = term * Y[:, i] ** p
        out += term
    return out


# -- representations -----------------------------------------------------------------------


@dataclass(frozen=True)
class PolyComplexity:
    m: int
    degree: int
    coeff_l1: float
    max_form_l1: float

    @property
    def K(self) -> int:
        return max(1, math.ceil(max(self.m, self.degree, self.coeff_l1, self.max_form_l1) - 1e-12))

    def to_dict(self) -> dict:
        return {"m": self.m, "degree": self.degree, "coeff_l1": self.coeff_l1,
                "max_form_l1": self.max_form_l1, "K": self.K}


@dataclass(frozen=True, eq=False)
class PolyRep:
    """``x -> p(L_1(x), ..., L_m(x))`` with sparse linear forms ``L_i``."""

    n: int
    forms: tuple
    poly: Poly
    bound: int | None = None

    def __post_init__(self):
        forms = tuple({int(j): float(w) for j, w in sorted(dict(f).items()) if w != 0}
                      for f in self.forms)
        for f in forms:
            if any(not 0 <= j < self.n for j in f):
                raise ValueError(f"form index out of range for n={self.n}")
        m = len(forms)
        poly = canonical({tuple(int(p) for p in e): c for e, c in self.poly.items()})
        if any(len(e) != m or min(e, default=0) < 0 for e in poly):
            raise ValueError(f"exponent vectors must have length m={m} and be nonnegative")
        object.__setattr__(self, "forms", forms)
        object.__setattr__(self, "poly", poly)
        if self.bound is not None and poly_complexity(self).K > self.bound:
            raise ValueError(f"representation exceeds its declared bound {self.bound}")

    @property
    def m(self) -> int:
        return len(self.forms)

    def form_matrix(self) -> np.ndarray:
        F = np.zeros((self.m, self.n))
        for i, f in enumerate(self.forms):
            for j, w in f.items():
                F[i, j] = w
        return F

    def linear_values(self, X) -> np.ndarray:
        X = check_bit_matrix(X, self.n)
        return X @ self.form_matrix().T

    def evaluate(self, X) -> np.ndarray:
        """Unclipped values ``p(L(x))`` for each row of ``X``."""
        return poly_eval(self.poly, self.linear_values(X))

    def to_dict(self) -> dict:
        return {"kind": "poly_rep", "n": self.n,
                "forms": [{str(j): w for j, w in f.items()} for f in self.forms],
                "poly": [{"exps": list(e), "coef": c} for e, c in self.poly.items()]}

    @classmethod
    def from_dict(cls, data) -> "PolyRep":
        forms = [{int(j): float(w) for j, w in f.items()} for f in data["forms"]]
        poly = {tuple(t["exps"]): float(t["coef"]) for t in data["poly"]}
        return cls(int(data["n"]), tuple(forms), poly)


def eval_poly(rep: PolyRep, x) -> float:
    x = check_bits(x, rep.n)
    return float(rep.evaluate(x[None, :])[0])


def poly_complexity(rep: PolyRep) -> PolyComplexity:
    return PolyComplexity(
        m=rep.m,
        degree=poly_degree(rep.poly),
        coeff_l1=poly_l1(rep.poly),
        max_form_l1=max((sum(abs(w) for w in f.values()) for f in rep.forms), default=0.0),
    )


# -- holographic scheme -> polynomial ----------------------------------------------------


@dataclass
class HoloPolyReport:
    k: int
    eps: float
    eta: float
    q: int
    m: int
    coeff_l1: float
    coeff_bound: int
    target: float
    search: str
    certified: bool
    complexity: PolyComplexity
    partition: Partition
    step_arrays: list = field(repr=False)
    trace: RegularityTrace = field(repr=False)

    def to_dict(self) -> dict:
        return {"k": self.k, "eps": self.eps, "eta": self.eta, "q": self.q, "m": self.m,
                "coeff_l1": self.coeff_l1, "coeff_bound": self.coeff_bound,
                "target": self.target, "search": self.search, "certified": self.certified,
                "complexity": self.complexity.to_dict(),
                "partition": self.partition.to_dict(), "trace": self.trace.to_dict()}


def pattern_arrays(scheme: HoloScheme, limit: int = ENUMERATION_LIMIT) -> list[np.ndarray]:
    """The ``2**k`` arrays ``g_a(s) = f_s(a)``; 0 on tuples of product measure zero."""
    n, k = scheme.n, scheme.k
    if n**k > limit:
        raise LimitExceededError(f"n**k = {n**k} location tuples exceed the limit {limit}")
    S, _ = positive_tuples(scheme.measures, limit)
    flat = np.ravel_multi_index(S.T, (n,) * k)
    arrays = []
    for a in all_patterns(k):
        g = np.zeros(n**k)
        g[flat] = scheme.tests.values(S, np.repeat(a[None, :], S.shape[0], axis=0))
        arrays.append(g.reshape((n,) * k))
    return arrays


def holo_to_poly(scheme: HoloScheme, eps: float, search: str = "exhaustive",
                 restarts: int = 32, rng=None, limit: int = ENUMERATION_LIMIT):
    """Polynomial approximation of a holographic scheme's averaged test.

    The ``2**k`` pattern arrays are regularized jointly at ``eta = eps / 2**k``
    with respect to the sampling measures.  Each cell mass ``a`` and cell form
    ``B`` of each sampling measure becomes a variable, and the assembled
    polynomial is within ``eps`` of the averaged test everywhere when the
    search is exhaustive.
    """
    eps = check_open_unit(eps)
    n, k = scheme.n, scheme.k
    arrays = pattern_arrays(scheme, limit)
    eta = eps / 2**k
    partition, steps, trace = weak_box_regularize(arrays, scheme.measures, eta, search=search,
                                                  restarts=restarts, rng=rng)
    q = partition.m
    m = k * q
    parts = partition.parts()
    forms, masses = [], np.zeros((k, q))
    for ell, mu in enumerate(scheme.measures):
        for u, cell in enumerate(parts):
            forms.append({int(i): float(mu.weights[i]) for i in cell})
            masses[ell, u] = mu.weights[cell].sum()

    def factor(ell: int, u: int, bit: int) -> Poly:
        y = variable(m, ell * q + u)
        return y if bit else poly_add(constant(m, masses[ell, u]), poly_scale(y, -1.0))

    P: Poly = {}
    for a_idx, a in enumerate(all_patterns(k)):
        W = steps[a_idx].W
        for u in itertools.product(range(q), repeat=k):
            w = float(W[u])
            if w == 0:
                continue
            term = constant(m, w)
            for ell in range(k):
                term = poly_mul(term, factor(ell, u[ell], int(a[ell])))
            P = poly_add(P, term)
    rep = PolyRep(n, tuple(forms), P)
    coeff_l1 = poly_l1(P)
    coeff_bound = 4**k * q**k
    if coeff_l1 > coeff_bound + 1e-9:
        raise AssertionError(f"coefficient l1-norm {coeff_l1} exceeds 4^k q^k = {coeff_bound}")
    report = HoloPolyReport(k=k, eps=eps, eta=eta, q=q, m=m, coeff_l1=coeff_l1,
                            coeff_bound=coeff_bound, target=3 * eps, search=search,
                            certified=search == "exhaustive", complexity=poly_complexity(rep),
                            partition=partition, step_arrays=steps, trace=trace)
    return rep, report


# -- rescaling to [0,1]-valued variables -----------------------------------------------------


def scaling_bound(K: int) -> int:
    """A priori bound ``K * (3K)**K`` on the rescaled coefficient norm."""
    return K * (3 * K) ** K


def substitute_scaling(rep: PolyRep, K: int) -> Poly:
    """Expand ``Q(y) = p(2K y_1 - K, ..., 2K y_m - K)`` in the monomial basis."""
    if not isinstance(K, (int, np.integer)) or K < 1:
        raise ValueError("K must be a positive integer")
    K = int(K)
    cx = poly_complexity(rep)
    if cx.K > K:
        raise ValueError(f"representation complexity {cx.K} exceeds K={K}")
    m = rep.m
    # (2K y - K)^e = sum_j C(e,j) (2K)^j (-K)^(e-j) y^j, with exact integer factors
    Q: Poly = {}
    for e, c in rep.poly.items():
        per_var = [[(j, math.comb(p, j) * (2 * K) ** j * (-K) ** (p - j)) for j in range(p + 1)]
                   for p in e]
        for combo in itertools.product(*per_var):
            exps = tuple(j for j, _ in combo)
            coef = c * float(math.prod(f for _, f in combo))
            Q[exps] = Q.get(exps, 0.0) + coef
    Q = canonical(Q)
    norm = poly_l1(Q)
    if not math.isfinite(norm):
        raise OverflowError(f"rescaled coefficients overflow (a priori bound {scaling_bound(K)})")
    if norm > scaling_bound(K) * (1 + 1e-12):
        raise AssertionError(f"rescaled norm {norm} exceeds K(3K)^K = {scaling_bound(K)}")
    return Q


def scaled_inputs(rep: PolyRep, K: int, X) -> np.ndarray:
    """``Y_i(x) = (L_i(x) + K) / 2K`` for each row of ``X``."""
    return (rep.linear_values(X) + K) / (2 * K)


__all__ = [
    "PolyRep", "PolyComplexity", "HoloPolyReport", "eval_poly", "poly_complexity",
    "holo_to_poly", "substitute_scaling", "scaled_inputs", "scaling_bound", "pattern_arrays",
    "poly_add", "poly_mul", "poly_scale", "poly_l1", "poly_degree", "poly_eval", "canonical",
]
