"""Coordinate sampling estimators for affine forms and networks.

A bounded affine form ``c + sum_i w_i x_i`` is estimated from ``r`` coordinates
drawn proportionally to ``|w_i|``.  The estimate depends on the drawn locations
only through how often each coordinate was drawn, so runs draw multinomial
count vectors instead of ``r`` explicit locations; the two are equal in
distribution and the count path stays cheap when ``r`` is huge.

Network plans mirror the network's dependency tree from the output vertex,
re-estimating shared predecessors independently for every parent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from ._validation import LimitExceededError, as_generator, check_bit_matrix, check_bits, check_open_unit
from .activations import Activation
from .functions import CoordinateMeasure
from .holographic import HoloScheme, TestFunctions
from .network import Network, audit_complexity

#: Largest per-plan sample count a run can draw (numpy multinomial uses int64).
MAX_DRAW = 2**62
#: Largest real sample count for which explicit location lists are produced.
EXPLICIT_LIMIT = 10**6


def affine_sample_count(B: float, delta: float, rho: float) -> int:
    """``ceil(2 B^2 delta^-2 ln(2/rho))``."""
    value = 2 * B * B / (delta * delta) * math.log(2 / rho)
    if math.isfinite(value) and value < 1e15:
        return math.ceil(value)
    return _exact_count(Fraction(B), Fraction(delta), Fraction(rho))


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def _exact_count(B: Fraction, delta: Fraction, rho: Fraction) -> int:
    # the float logarithm is inflated slightly so the result is an upper bound
    log_term = Fraction(_log(2 / rho) * (1 + 1e-12))
    return math.ceil(2 * B * B / (delta * delta) * log_term)


@dataclass(frozen=True, eq=False)
class AffinePlan:
    """Sampling estimator for ``c + sum_i w_i x_i``."""

    c: float
    A: float
    weights: np.ndarray | None
    signs: np.ndarray
    r: int
    B: float
    delta: float
    rho: float
    offset: int = 0

    @property
    def measure(self) -> CoordinateMeasure | None:
        return None if self.weights is None else CoordinateMeasure(self.weights)

    def estimate_counts(self, counts: np.ndarray, X: np.ndarray) -> np.ndarray:
        """Estimates from count vectors ``(T, n)`` for inputs ``(N, n)``: shape ``(T, N)``."""
        if self.r == 0:
            return np.full((counts.shape[0], X.shape[0]), self.c)
        return self.c + (self.A / self.r) * (counts @ (self.signs[:, None] * X.T))

    def to_dict(self) -> dict:
        return {"c": self.c, "A": self.A, "r": self.r, "B": self.B, "delta": self.delta,
                "rho": self.rho, "offset": self.offset,
                "weights": None if self.weights is None else self.weights.tolist(),
                "signs": self.signs.tolist()}

    @classmethod
    def from_dict(cls, data) -> "AffinePlan":
        weights = None if data["weights"] is None else np.asarray(data["weights"], dtype=float)
        return cls(data["c"], data["A"], weights, np.asarray(data["signs"], dtype=float),
                   int(data["r"]), data["B"], data["delta"], data["rho"], int(data["offset"]))


def _dense(w, n: int | None) -> np.ndarray:
    if isinstance(w, Mapping):
        if n is None:
            raise ValueError("n is required for sparse coefficient maps")
        out = np.zeros(n)
        for j, v in w.items():
            out[int(j)] = v
        return out
    return np.asarray(w, dtype=float)


def plan_affine(c: float, w, B: float, delta: float, rho: float, n: int | None = None,
                offset: int = 0) -> AffinePlan:
    """Plan an estimate of ``c + sum_i w_i x_i`` within ``delta`` w.p. at least ``1 - rho``."""
    delta, rho = check_open_unit(delta, "delta"), check_open_unit(rho, "rho")
    w = _dense(w, n)
    A = float(np.abs(w).sum())
    if abs(c) + A > B * (1 + 1e-12):
        raise ValueError(f"affine l1-norm {abs(c) + A} exceeds B={B}")
    if A == 0:
        return AffinePlan(float(c), 0.0, None, np.zeros_like(w), 0, B, delta, rho, offset)
    r = affine_sample_count(B, delta, rho)
    return AffinePlan(float(c), A, np.abs(w) / A, np.sign(w), r, B, delta, rho, offset)


def run_affine(plan: AffinePlan, x, rng) -> float:
    """One estimate; the drawn locations enter only through their counts."""
    x = np.asarray(x, dtype=float)
    if plan.r == 0:
        return plan.c
    if plan.r > MAX_DRAW:
        raise LimitExceededError(f"sample count {plan.r} is too large to draw")
    counts = as_generator(rng).multinomial(plan.r, plan.weights)
    return float(plan.c + plan.A / plan.r * (counts @ (plan.signs * x)))


def estimate_from_locations(plan: AffinePlan, locations, bits) -> float:
    """The estimator as a deterministic function of drawn locations and their bits."""
    if plan.r == 0:
        return plan.c
    locations = np.asarray(locations, dtype=np.int64)
    return float(plan.c + plan.A / plan.r * np.sum(plan.signs[locations] * np.asarray(bits)))


@dataclass(eq=False)
class PlanNode:
    vertex: int
    activation: Activation
    affine: AffinePlan
    children: list = field(default_factory=list)  # [(beta, PlanNode)]
    tau: float = 0.0
    rho: float = 0.0
    constant: bool = False

    def walk(self):
        yield self
        for _, child in self.children:
            yield from child.walk()

    def to_dict(self) -> dict:
        return {"vertex": self.vertex, "activation": self.activation.to_dict(),
                "affine": self.affine.to_dict(), "tau": self.tau, "rho": self.rho,
                "constant": self.constant,
                "children": [{"beta": b, "node": c.to_dict()} for b, c in self.children]}

    @classmethod
    def from_dict(cls, data) -> "PlanNode":
        return cls(data["vertex"], Activation.from_dict(data["activation"]),
                   AffinePlan.from_dict(data["affine"]),
                   [(ch["beta"], cls.from_dict(ch["node"])) for ch in data["children"]],
                   data["tau"], data["rho"], data.get("constant", False))


class Layout:
    """Lazy sequence of the ``length`` sampling measures of a plan.

    Positions covered by an affine plan use its proportional measure; the
    remaining positions are padding drawn uniformly and ignored.
    """

    def __init__(self, n: int, segments: list[tuple[int, int, np.ndarray]], length: int):
        self.n = n
        self.segments = segments
        self.length = length
        self._uniform = CoordinateMeasure.uniform(n)

    @property
    def real_length(self) -> int:
        return sum(count for _, count, _ in self.segments)

    def __getitem__(self, j: int) -> CoordinateMeasure:
        if not 0 <= j < self.length:
            raise IndexError(j)
        for start, count, weights in self.segments:
            if start <= j < start + count:
                return CoordinateMeasure(weights)
        return self._uniform

    def __iter__(self):
        raise TypeError("layouts can be astronomically long; index them explicitly")

    def to_dict(self) -> dict:
        return {"n": self.n, "length": describe_int(self.length), "padding": "uniform",
                "segments": [{"start": s, "count": c, "weights": w.tolist()}
                             for s, c, w in self.segments]}


def describe_int(value: int) -> int | str:
    """``value`` itself when short, otherwise a ``"~1.23e4567"`` approximation."""
    if value < 10**15:
        return value
    shift = max(value.bit_length() - 60, 0)
    log10 = math.log10(value >> shift) + shift * math.log10(2)
    exponent = math.floor(log10)
    return f"~{10 ** (log10 - exponent):.3f}e{exponent}"


def declared_length(K: int, delta: float) -> int:
    """Closed-form sample budget for every network of complexity at most ``K``.

    Unrolling ``R_j = r_aff(K, tau/2K, rho/2) + sum_{h<j} R_h(tau/2K^2, rho/2K)``
    from ``R_K(delta, delta)`` counts ``C(K-1, e)`` chains of depth ``e``, so the
    budget is ``sum_e C(K-1, e) * r_aff(K, tau_e/2K, rho_e/2)`` with
    ``tau_e = delta/(2K^2)^e`` and ``rho_e = delta/(2K)^e``.
    """
    d = Fraction(delta)
    total = 0
    for e in range(K):
        tau = d / Fraction(2 * K * K) ** e
        rho = d / Fraction(2 * K) ** e
        total += math.comb(K - 1, e) * _exact_count(Fraction(K), tau / (2 * K), rho / 2)
    return max(total, 1)


@dataclass(eq=False)
class SamplerPlan:
    n: int
    root: PlanNode
    K: int
    delta: float
    constants: str
    layout: Layout
    network: Network | None = field(default=None, repr=False)

    @property
    def length(self) -> int:
        return self.layout.length

    @property
    def real_length(self) -> int:
        return self.layout.real_length

    def nodes(self) -> list[PlanNode]:
        return list(self.root.walk())

    def to_dict(self) -> dict:
        return {"kind": "sampler_plan", "n": self.n, "K": self.K, "delta": self.delta,
                "constants": self.constants, "length": describe_int(self.length),
                "real_length": self.real_length, "root": self.root.to_dict(),
                "layout": self.layout.to_dict(),
                "network": None if self.network is None else self.network.to_dict()}

    @classmethod
    def from_dict(cls, data, network: Network | None = None) -> "SamplerPlan":
        if network is None and data.get("network") is not None:
            network = Network.from_dict(data["network"])
        lay = data["layout"]
        segments = [(s["start"], s["count"], np.asarray(s["weights"], dtype=float))
                    for s in lay["segments"]]
        K, delta = int(data["K"]), float(data["delta"])
        real = sum(c for _, c, _ in segments)
        length = max(real, declared_length(K, delta))
        return cls(int(data["n"]), PlanNode.from_dict(data["root"]), K, delta,
                   data["constants"], Layout(int(data["n"]), segments, length), network)


def plan_network(net: Network, delta: float, constants: str = "local") -> SamplerPlan:
    """Sampling plan estimating the network output within ``delta`` w.p. ``1 - delta``.

    ``constants="uniform"`` uses the audited complexity ``K`` at every vertex:
    direct accuracy ``tau/2K`` at failure ``rho/2`` with ``B = K``, and each
    nonzero predecessor at ``(tau/2K^2, rho/2K)``.  ``constants="local"``
    replaces ``K`` by the vertex's own Lipschitz constant, direct affine norm,
    predecessor weight sum and predecessor count; every local count is at most
    the uniform one.  Either way the layout is padded to
    :func:`declared_length`.
    """
    delta = check_open_unit(delta, "delta")
    if constants not in ("local", "uniform"):
        raise ValueError("constants must be 'local' or 'uniform'")
    K = audit_complexity(net).K
    offset = 0
    segments = []

    def build(v: int, tau: float, rho: float) -> PlanNode:
        nonlocal offset
        vert = net.vertices[v]
        lip = vert.activation.lipschitz
        children = [(u, beta) for u, beta in vert.hid_edges.items() if beta != 0]
        if constants == "uniform":
            gamma, B = tau / (2 * K), float(K)
            child_tau, child_rho = gamma / K, rho / (2 * K)
        else:
            if lip == 0:
                affine = AffinePlan(vert.bias, 0.0, None, np.zeros(net.n), 0, 1.0, 0.5, 0.5,
                                    offset)
                return PlanNode(v, vert.activation, affine, [], tau, rho, constant=True)
            gamma = min(tau / (2 * lip), 1 - 1e-9)
            B = max(abs(vert.bias) + sum(abs(w) for w in vert.in_edges.values()), 1e-300)
            beta_total = sum(abs(b) for _, b in children)
            child_tau = gamma / beta_total if children else 0.0
            child_rho = rho / (2 * len(children)) if children else 0.0
        affine = plan_affine(vert.bias, vert.in_edges, B, gamma, rho / 2, n=net.n, offset=offset)
        if affine.r:
            segments.append((offset, affine.r, affine.weights))
        offset += affine.r
        node = PlanNode(v, vert.activation, affine, [], tau, rho)
        for u, beta in sorted(children):
            node.children.append((beta, build(u, child_tau, child_rho)))
        return node

    root = build(net.output, delta, delta)
    length = max(offset, declared_length(K, delta))
    return SamplerPlan(net.n, root, K, delta, constants, Layout(net.n, segments, length), net)


def _evaluate_node(node: PlanNode, X: np.ndarray, trials: int, rng: np.random.Generator,
                   record: list | None) -> np.ndarray:
    aff = node.affine
    if aff.r > MAX_DRAW:
        raise LimitExceededError(f"sample count {aff.r} at vertex {node.vertex} is too large "
                                 "to draw; try constants='local'")
    if node.constant:
        direct = np.full((trials, X.shape[0]), aff.c)
    elif aff.r:
        direct = aff.estimate_counts(rng.multinomial(aff.r, aff.weights, size=trials), X)
    else:
        direct = np.full((trials, X.shape[0]), aff.c)
    pre = direct.copy()
    for beta, child in node.children:
        pre += beta * _evaluate_node(child, X, trials, rng, record)
    out = node.activation(pre)
    if record is not None:
        record.append({"node": node, "direct": direct, "value": out})
    return out


def plan_values(plan: SamplerPlan, X, trials: int, rng, record: list | None = None) -> np.ndarray:
    """Clipped reconstructions for ``trials`` independent runs: shape ``(trials, len(X))``.

    Each trial draws one set of locations shared by every input row.
    """
    X = check_bit_matrix(X, plan.n).astype(float)
    return np.clip(_evaluate_node(plan.root, X, trials, as_generator(rng), record), 0.0, 1.0)


def run_plan(plan: SamplerPlan, x, rng, instrument: bool = False):
    """One run: ``(value, draws)``.

    ``draws`` maps each plan node's layout offset to its coordinate count
    vector.  With ``instrument=True`` a list of per-node records (vertex,
    accuracy targets, estimate, exact value) is returned as a third element;
    nodes are numbered in pre-order and records list children by that number.
    """
    x = check_bits(x, plan.n).astype(float)
    rng = as_generator(rng)
    draws = {}

    def visit(node: PlanNode) -> float:
        aff = node.affine
        if aff.r and not node.constant:
            if aff.r > MAX_DRAW:
                raise LimitExceededError(f"sample count {aff.r} is too large to draw")
            counts = rng.multinomial(aff.r, aff.weights)
            draws[aff.offset] = counts
            direct = float(aff.c + aff.A / aff.r * (counts @ (aff.signs * x)))
        else:
            direct = aff.c
        pre = direct + sum(beta * visit(child) for beta, child in node.children)
        value = float(node.activation(pre))
        if records is not None:
            records.append({"node": index[id(node)], "vertex": node.vertex, "tau": node.tau,
                            "rho": node.rho, "gamma": aff.delta, "direct": direct,
                            "estimate": value,
                            "children": [[beta, index[id(child)]]
                                         for beta, child in node.children]})
        return value

    records = [] if instrument else None
    # pre-order position of each node, used to link records to their children
    index = {id(node): i for i, node in enumerate(plan.root.walk())} if instrument else {}
    value = float(np.clip(visit(plan.root), 0.0, 1.0))
    if not instrument:
        return value, draws
    if plan.network is None:
        raise ValueError("instrumentation needs the source network")
    exact = plan.network.forward_all(x[None, :].astype(np.int8))[0]
    for rec in records:
        vert = plan.network.vertices[rec["vertex"]]
        rec["exact"] = float(exact[rec["vertex"]])
        rec["direct_exact"] = float(vert.bias + sum(w * x[j] for j, w in vert.in_edges.items()))
        rec["error"] = abs(rec["estimate"] - rec["exact"])
    return value, draws, records


def draw_plan_locations(plan: SamplerPlan, rng) -> np.ndarray:
    """Explicit locations for the non-padding layout positions."""
    if plan.real_length > EXPLICIT_LIMIT:
        raise LimitExceededError(f"{plan.real_length} explicit locations exceed the limit")
    rng = as_generator(rng)
    out = np.empty(plan.real_length, dtype=np.int64)
    pos = 0
    for start, count, weights in plan.layout.segments:
        out[pos:pos + count] = rng.choice(plan.n, size=count, p=weights)
        pos += count
    return out


def reconstruct(plan: SamplerPlan, locations, bits) -> float:
    """Deterministic reconstruction from the non-padding locations and their bits."""
    locations = np.asarray(locations, dtype=np.int64)
    bits = np.asarray(bits, dtype=float)
    starts = {}
    pos = 0
    for start, count, _ in plan.layout.segments:
        starts[start] = pos
        pos += count
    if locations.shape[0] != pos or bits.shape[0] != pos:
        raise ValueError(f"expected {pos} locations and bits")

    def visit(node: PlanNode) -> float:
        aff = node.affine
        if aff.r and not node.constant:
            sl = slice(starts[aff.offset], starts[aff.offset] + aff.r)
            direct = estimate_from_locations(aff, locations[sl], bits[sl])
        else:
            direct = aff.c
        return float(node.activation(direct + sum(b * visit(c) for b, c in node.children)))

    return float(np.clip(visit(plan.root), 0.0, 1.0))


class PlanTest(TestFunctions):
    """Test functions given by a network sampling plan's reconstruction."""

    kind = "plan"

    def __init__(self, plan: SamplerPlan):
        self.plan = plan

    def exact_terms(self, scheme, x, limit):
        raise LimitExceededError("plan-based schemes support Monte Carlo checks only")

    def sample_values(self, scheme, X, trials, rng):
        return plan_values(self.plan, X, trials, rng)

    def draw_once(self, scheme, x, rng):
        return run_plan(self.plan, x, rng)

    def values(self, S, A):
        return np.array([reconstruct(self.plan, s, a) for s, a in zip(S, A)])

    def to_dict(self) -> dict:
        return {"kind": "plan", "plan": self.plan.to_dict()}


def nn_to_holo(net: Network, eps: float, constants: str = "local") -> HoloScheme:
    """Holographic scheme whose tests are the plan reconstruction at accuracy ``eps``."""
    eps = check_open_unit(eps)
    plan = plan_network(net, eps, constants)
    return HoloScheme(net.n, plan.length, plan.layout, PlanTest(plan),
                      {"family": "network", "eps": eps, "K": plan.K, "constants": constants,
                       "real_length": plan.real_length})


__all__ = [
    "AffinePlan", "PlanNode", "SamplerPlan", "Layout", "PlanTest", "affine_sample_count",
    "plan_affine", "run_affine", "estimate_from_locations", "plan_network", "plan_values",
    "run_plan", "draw_plan_locations", "reconstruct", "nn_to_holo", "declared_length",
    "describe_int",
]
