"""Bounded Lipschitz networks on Boolean inputs and the polynomial compiler.

Vertices are stored in topological order.  Vertex ``v`` computes
``sigma_v(c_v + sum_j w_j x_j + sum_u w_u z_u)`` over input coordinates ``j``
and earlier vertices ``u < v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._validation import check_bit_matrix, check_bits
from .activations import CLIP, CLIPPED_SQUARE, Activation
from .polynomial import PolyRep, poly_complexity, poly_degree, poly_l1, substitute_scaling


@dataclass(frozen=True)
class Vertex:
    bias: float = 0.0
    in_edges: Mapping[int, float] = field(default_factory=dict)
    hid_edges: Mapping[int, float] = field(default_factory=dict)
    activation: Activation = CLIP

    def __post_init__(self):
        object.__setattr__(self, "bias", float(self.bias))
        for name in ("in_edges", "hid_edges"):
            edges = {int(j): float(w) for j, w in sorted(dict(getattr(self, name)).items())
                     if w != 0}
            if not all(math.isfinite(w) for w in edges.values()):
                raise ValueError("edge weights must be finite")
            object.__setattr__(self, name, edges)

    @property
    def affine_l1(self) -> float:
        return (abs(self.bias) + sum(abs(w) for w in self.in_edges.values())
                + sum(abs(w) for w in self.hid_edges.values()))

    def to_dict(self) -> dict:
        act = self.activation.to_dict()
        out = {"bias": self.bias,
               "in_edges": {str(j): w for j, w in self.in_edges.items()},
               "hid_edges": {str(u): w for u, w in self.hid_edges.items()},
               "act": act["kind"], "lip": self.activation.lipschitz}
        if "points" in act:
            out["points"] = act["points"]
        return out

    @classmethod
    def from_dict(cls, data) -> "Vertex":
        kind = data.get("act", "clip")
        if kind == "piecewise_linear":
            act = Activation(kind, tuple(map(tuple, data["points"])), data.get("lip"))
        else:
            act = Activation(kind)
        return cls(data.get("bias", 0.0),
                   {int(j): w for j, w in data.get("in_edges", {}).items()},
                   {int(u): w for u, w in data.get("hid_edges", {}).items()}, act)


@dataclass(frozen=True, eq=False)
class Network:
    n: int
    vertices: tuple
    output: int

    def __post_init__(self):
        vertices = tuple(self.vertices)
        if not vertices:
            raise ValueError("a network needs at least one non-input vertex")
        for v, vert in enumerate(vertices):
            if any(not 0 <= j < self.n for j in vert.in_edges):
                raise ValueError(f"vertex {v} reads an input outside [0, {self.n})")
            if any(not 0 <= u < v for u in vert.hid_edges):
                raise ValueError(f"vertex {v} reads a vertex that is not earlier in the order")
        if not 0 <= self.output < len(vertices):
            raise ValueError("output index out of range")
        object.__setattr__(self, "vertices", vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def forward_all(self, X) -> np.ndarray:
        """Values of every vertex, shape ``(N, len(self))``."""
        X = check_bit_matrix(X, self.n).astype(float)
        Z = np.empty((X.shape[0], len(self.vertices)))
        for v, vert in enumerate(self.vertices):
            pre = np.full(X.shape[0], vert.bias)
            for j, w in vert.in_edges.items():
                pre += w * X[:, j]
            for u, w in vert.hid_edges.items():
                pre += w * Z[:, u]
            Z[:, v] = vert.activation(pre)
        if ((Z < 0) | (Z > 1)).any():
            raise AssertionError("a vertex value left [0, 1]")
        return Z

    def evaluate(self, X) -> np.ndarray:
        return self.forward_all(X)[:, self.output]

    def reachable(self) -> list[int]:
        """Vertices the output depends on, in topological order."""
        seen = {self.output}
        for v in range(self.output, -1, -1):
            if v in seen:
                seen.update(self.vertices[v].hid_edges)
        return sorted(seen)

    def to_dict(self) -> dict:
        return {"kind": "network", "n": self.n,
                "vertices": [v.to_dict() for v in self.vertices], "output": self.output}

    @classmethod
    def from_dict(cls, data) -> "Network":
        return cls(int(data["n"]), tuple(Vertex.from_dict(v) for v in data["vertices"]),
                   int(data["output"]))


def forward(net: Network, x) -> float:
    x = check_bits(x, net.n)
    return float(net.evaluate(x[None, :])[0])


@dataclass(frozen=True)
class NetComplexity:
    vertex_count: int
    max_affine_l1: float
    max_lipschitz: float

    @property
    def K(self) -> int:
        return max(1, math.ceil(max(self.vertex_count, self.max_affine_l1, self.max_lipschitz)
                                - 1e-12))

    def to_dict(self) -> dict:
        return {"vertex_count": self.vertex_count, "max_affine_l1": self.max_affine_l1,
                "max_lipschitz": self.max_lipschitz, "K": self.K}


def audit_complexity(net: Network) -> NetComplexity:
    return NetComplexity(len(net.vertices),
                         max(v.affine_l1 for v in net.vertices),
                         max(v.activation.lipschitz for v in net.vertices))


class NetworkBuilder:
    """Append-only construction of a network in topological order."""

    def __init__(self, n: int):
        self.n = n
        self.vertices: list[Vertex] = []

    def add_vertex(self, bias: float = 0.0, in_edges=None, hid_edges=None,
                   activation: Activation = CLIP) -> int:
        self.vertices.append(Vertex(bias, in_edges or {}, hid_edges or {}, activation))
        return len(self.vertices) - 1

    def add_constant(self, value: float) -> int:
        """A clip vertex carrying ``value`` (real-valued input to the auxiliary model)."""
        return self.add_vertex(bias=value)

    def build(self, output: int | None = None) -> Network:
        return Network(self.n, tuple(self.vertices),
                       len(self.vertices) - 1 if output is None else output)


@dataclass(frozen=True)
class Input:
    """Reference to input coordinate ``index`` where a vertex index is expected."""

    index: int


def _split_edges(weights: dict) -> tuple[dict, dict]:
    in_edges, hid_edges = {}, {}
    for ref, w in weights.items():
        if isinstance(ref, Input):
            in_edges[ref.index] = in_edges.get(ref.index, 0.0) + w
        else:
            hid_edges[ref] = hid_edges.get(ref, 0.0) + w
    return in_edges, hid_edges


def add_mult_module(builder: NetworkBuilder, u, v) -> int:
    """Append four vertices computing ``z_u * z_v`` exactly for values in ``[0, 1]``.

    ``u`` and ``v`` are vertex indices or :class:`Input` references.  The
    product is ``2((u+v)/2)^2 - u^2/2 - v^2/2``, squares taken by
    clipped-square vertices and the combination by a clip vertex.
    """
    square = CLIPPED_SQUARE
    mid = {u: 1.0} if u == v else {u: 0.5, v: 0.5}
    a = builder.add_vertex(0.0, *_split_edges(mid), activation=square)
    b = builder.add_vertex(0.0, *_split_edges({u: 1.0}), activation=square)
    c = builder.add_vertex(0.0, *_split_edges({v: 1.0}), activation=square)
    return builder.add_vertex(hid_edges={a: 2.0, b: -0.5, c: -0.5}, activation=CLIP)


def monomial_circuit(builder: NetworkBuilder, variables: Sequence[int], alpha) -> int | None:
    """Vertex carrying ``prod_i y_i**alpha_i``; ``None`` for the constant monomial.

    Factors are multiplied left to right, so a degree-``D`` monomial costs
    ``4(D-1)`` vertices.
    """
    factors = [variables[i] for i, p in enumerate(alpha) for _ in range(int(p))]
    if not factors:
        return None
    acc = factors[0]
    for f in factors[1:]:
        acc = add_mult_module(builder, acc, f)
    return acc


def vertex_bound(m: int, degree: int) -> int:
    """``1 + 4(D-1) * C(m+D, D) + m``: output, monomial modules and first layer."""
    return 1 + 4 * max(degree - 1, 0) * math.comb(m + degree, degree) + m


def compile_poly_to_nn(rep: PolyRep, K: int) -> Network:
    """Network computing ``clip(p(L_1(x), ..., L_m(x)))`` exactly on Boolean inputs.

    The first layer carries ``Y_i = (L_i + K) / 2K`` in ``[0, 1]``; the rescaled
    polynomial ``Q(Y) = p(L)`` is then built from multiplication modules and
    combined in a final clip vertex.
    """
    cx = poly_complexity(rep)
    if cx.K > K:
        raise ValueError(f"representation complexity {cx.K} exceeds K={K}")
    Q = substitute_scaling(rep, K)
    builder = NetworkBuilder(rep.n)
    ys = [builder.add_vertex(bias=0.5, in_edges={j: w / (2 * K) for j, w in form.items()})
          for form in rep.forms]
    bias, edges = 0.0, {}
    for alpha, coef in sorted(Q.items()):
        vertex = monomial_circuit(builder, ys, alpha)
        if vertex is None:
            bias += coef
        else:
            edges[vertex] = edges.get(vertex, 0.0) + coef
    builder.add_vertex(bias=bias, hid_edges=edges)
    return builder.build()


@dataclass(frozen=True)
class CompiledBounds:
    vertex_count: int
    affine_l1: float
    lipschitz: float
    Q_l1: float


def compiled_bounds(rep: PolyRep, K: int) -> CompiledBounds:
    """Audit bounds a compiled network must respect."""
    Q = substitute_scaling(rep, K)
    q_l1 = poly_l1(Q)
    return CompiledBounds(vertex_bound(rep.m, poly_degree(rep.poly)), max(q_l1, 3.0), 2.0, q_l1)


__all__ = [
    "Vertex", "Network", "NetworkBuilder", "Input", "NetComplexity", "CompiledBounds", "forward",
    "audit_complexity", "add_mult_module", "monomial_circuit", "compile_poly_to_nn",
    "compiled_bounds", "vertex_bound",
]
