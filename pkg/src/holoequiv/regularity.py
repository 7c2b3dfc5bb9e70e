"""Simultaneous weak box regularity by energy increment.

Arrays are dense numpy arrays of shape ``(n,) * k`` with entries in ``[0, 1]``.
Axis ``j`` is integrated against ``measures[j]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._validation import LimitExceededError, all_inputs, as_generator
from .functions import CoordinateMeasure

#: Largest ``2**(n*(k-1)) * n`` handled by the exhaustive violation search.
EXHAUSTIVE_BUDGET = 2**26


@dataclass(frozen=True, eq=False)
class Partition:
    """Partition of ``0..n-1`` given by part labels ``0..m-1`` (every label used)."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if labels.size == 0:
            raise ValueError("partition of an empty set")
        _, compact = np.unique(labels, return_inverse=True)
        compact = compact.astype(np.int64).ravel()
        compact.setflags(write=False)
        object.__setattr__(self, "labels", compact)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def m(self) -> int:
        return int(self.labels.max()) + 1

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls(np.zeros(n, dtype=np.int64))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(np.arange(n))

    def parts(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.labels == u) for u in range(self.m)]

    def indicator(self) -> np.ndarray:
        """``(m, n)`` 0/1 matrix, row ``u`` the indicator of part ``u``."""
        return (self.labels[None, :] == np.arange(self.m)[:, None]).astype(float)

    def refine(self, subsets: Sequence[np.ndarray]) -> "Partition":
        """Common refinement with each of the given coordinate subsets (boolean masks)."""
        keys = [self.labels] + [np.asarray(s, dtype=np.int64) for s in subsets]
        _, labels = np.unique(np.stack(keys, axis=1), axis=0, return_inverse=True)
        return Partition(np.ravel(labels))

    def is_refinement_of(self, other: "Partition") -> bool:
        pairs = set(zip(self.labels.tolist(), other.labels.tolist()))
        return len(pairs) == self.m

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.labels, other.labels)

    def to_dict(self) -> dict:
        return {"kind": "partition", "n": self.n, "m": self.m, "labels": self.labels.tolist()}

    @classmethod
    def from_dict(cls, data) -> "Partition":
        return cls(data["labels"])


@dataclass(frozen=True, eq=False)
class StepArray:
    """Values ``W(u)`` on the cells ``T_{u_1} x ... x T_{u_k}`` of a product partition."""

    W: np.ndarray

    @property
    def m(self) -> int:
        return self.W.shape[0]

    @property
    def k(self) -> int:
        return self.W.ndim

    def lift(self, partition: Partition) -> np.ndarray:
        """The ``(n,)*k`` array that is constant ``W(u)`` on each cell."""
        return self.W[np.ix_(*([partition.labels] * self.k))]

    def to_dict(self) -> dict:
        return {"kind": "step_array", "m": self.m, "k": self.k, "W": self.W.ravel().tolist()}

    @classmethod
    def from_dict(cls, data) -> "StepArray":
        return cls(np.asarray(data["W"], dtype=float).reshape((data["m"],) * data["k"]))


@dataclass(frozen=True)
class TraceStep:
    array_index: int
    box: tuple[tuple[int, ...], ...]
    energy_before: float
    energy_after: float

    @property
    def gain(self) -> float:
        return self.energy_after - self.energy_before


@dataclass
class RegularityTrace:
    steps: list[TraceStep] = field(default_factory=list)
    final_energy: float = 0.0
    search: str = "exhaustive"

    def to_dict(self) -> dict:
        return {"search": self.search, "final_energy": self.final_energy,
                "steps": [{"array": s.array_index, "box": [list(a) for a in s.box],
                           "energy_before": s.energy_before, "energy_after": s.energy_after}
                          for s in self.steps]}


def multilinear(h: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
    """Apply ``mats[j]`` (shape ``(rows_j, n)``) along axis ``j`` of ``h``."""
    out = h
    for j, mat in enumerate(mats):
        out = np.moveaxis(np.tensordot(out, mat, axes=([j], [1])), -1, j)
    return out


def check_arrays(hs, measures) -> tuple[list[np.ndarray], int, int]:
    measures = list(measures)
    k = len(measures)
    n = measures[0].n
    if any(m.n != n for m in measures):
        raise ValueError("all measures must share n")
    hs = [np.asarray(h, dtype=float) for h in hs]
    for h in hs:
        if h.shape != (n,) * k:
            raise ValueError(f"array shape {h.shape} does not match (n,)*k = {(n,) * k}")
    return hs, n, k


def _mask(subset, n: int) -> np.ndarray:
    subset = np.asarray(subset)
    if subset.dtype == bool:
        return subset.astype(float)
    mask = np.zeros(n)
    mask[subset.astype(np.int64)] = 1.0
    return mask


def box_inner_product(h, boxes: Sequence, measures: Sequence[CoordinateMeasure]) -> float:
    """``sum over s in A_1 x ... x A_k of h(s) * prod_j mu_j(s_j)``."""
    (h,), n, _ = check_arrays([h], measures)
    mats = [(_mask(A, n) * m.weights)[None, :] for A, m in zip(boxes, measures)]
    return float(multilinear(h, mats).reshape(-1)[0])


def _projectors(partition: Partition, measures) -> list[np.ndarray]:
    ind = partition.indicator()
    return [ind * m.weights[None, :] for m in measures]


def _cell_masses(partition: Partition, measures) -> np.ndarray:
    masses = [proj.sum(axis=1) for proj in _projectors(partition, measures)]
    out = masses[0]
    for mass in masses[1:]:
        out = np.multiply.outer(out, mass)
    return out


def conditional_expectation(h, partition: Partition, measures) -> StepArray:
    """Average of ``h`` over each product cell; 0 on cells of product measure zero."""
    (h,), _, _ = check_arrays([h], measures)
    num = multilinear(h, _projectors(partition, measures))
    den = _cell_masses(partition, measures)
    W = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return StepArray(np.clip(W, 0.0, 1.0) if (h >= 0).all() and (h <= 1).all() else W)


def energy(hs, partition: Partition, measures) -> float:
    """Total squared L2 norm of the conditional expectations."""
    hs, _, _ = check_arrays(hs, measures)
    den = _cell_masses(partition, measures)
    return float(sum((conditional_expectation(h, partition, measures).W ** 2 * den).sum()
                     for h in hs))


def _weighted(r: np.ndarray, measures) -> np.ndarray:
    return multilinear(r, [np.diag(m.weights) for m in measures])


def _exhaustive_search(rw: np.ndarray, n: int, k: int, eta: float, budget: int):
    if k == 1:
        for sign in (1.0, -1.0):
            chosen = sign * rw > 0
            if (sign * rw[chosen]).sum() > eta:
                return (chosen,)
        return None
    if 2 ** (n * (k - 1)) * n > budget:
        raise LimitExceededError(
            f"exhaustive box search over 2**({n}*{k - 1}) subset tuples exceeds the budget; "
            "use search='alternating'")
    subsets = all_inputs(n, limit=n).astype(float)
    marg = multilinear(rw, [subsets] * (k - 1) + [np.eye(n)])
    scores = np.stack([np.where(marg > 0, marg, 0).sum(-1),
                       -np.where(marg < 0, marg, 0).sum(-1)], axis=-1)
    hits = np.flatnonzero(scores.ravel() > eta)
    if hits.size == 0:
        return None
    *combo, sign_idx = np.unravel_index(hits[0], scores.shape)
    sign = 1.0 if sign_idx == 0 else -1.0
    last = sign * marg[tuple(combo)] > 0
    return tuple(subsets[c].astype(bool) for c in combo) + (last,)


def _alternating_search(rw: np.ndarray, n: int, k: int, eta: float, restarts: int,
                        rng: np.random.Generator, max_rounds: int = 50):
    for _ in range(restarts):
        start = [rng.random(n) < 0.5 for _ in range(k)]
        for sign in (1.0, -1.0):
            boxes = [b.copy() for b in start]
            best = -np.inf
            for _ in range(max_rounds):
                for j in range(k):
                    mats = [b.astype(float)[None, :] for b in boxes]
                    mats[j] = np.eye(n)
                    marg = multilinear(rw, mats).ravel()
                    boxes[j] = sign * marg > 0
                value = sign * multilinear(rw, [b.astype(float)[None, :] for b in boxes]).item()
                if value <= best + 1e-15:
                    break
                best = value
            if best > eta:
                return tuple(boxes)
    return None


def find_violating_box(residuals, measures, eta: float, search: str = "exhaustive",
                       restarts: int = 32, rng=None, budget: int = EXHAUSTIVE_BUDGET):
    """First ``(array index, boxes)`` whose box inner product exceeds ``eta`` in magnitude.

    Boxes are boolean masks over the coordinates.  Exhaustive search enumerates
    the first ``k-1`` subsets in canonical order and picks the last one
    greedily, which is exact.  Alternating search is a randomized local ascent
    that may miss violations; anything it returns is verified.
    """
    residuals, n, k = check_arrays(residuals, measures)
    if search == "alternating":
        rng = as_generator(0 if rng is None else rng)
    for i, r in enumerate(residuals):
        rw = _weighted(r, measures)
        if search == "exhaustive":
            boxes = _exhaustive_search(rw, n, k, eta, budget)
        elif search == "alternating":
            boxes = _alternating_search(rw, n, k, eta, restarts, rng)
        else:
            raise ValueError(f"unknown search mode {search!r}")
        if boxes is not None:
            value = box_inner_product(r, boxes, measures)
            if abs(value) > eta:
                return i, boxes
    return None


def step_bound(t: int, eta: float) -> int:
    return math.ceil(t / eta**2)


def weak_box_regularize(hs, measures, eta: float, initial: Partition | None = None,
                        search: str = "exhaustive", restarts: int = 32, rng=None,
                        budget: int = EXHAUSTIVE_BUDGET):
    """Refine ``initial`` until no array has a residual box inner product above ``eta``.

    Returns ``(partition, step_arrays, trace)``.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    hs, n, k = check_arrays(hs, measures)
    partition = Partition.trivial(n) if initial is None else initial
    if partition.n != n:
        raise ValueError("initial partition has the wrong size")
    rng = as_generator(0 if rng is None else rng)
    trace = RegularityTrace(search=search)
    current = energy(hs, partition, measures)
    max_steps = step_bound(len(hs), eta)
    while True:
        Ws = [conditional_expectation(h, partition, measures) for h in hs]
        residuals = [h - W.lift(partition) for h, W in zip(hs, Ws)]
        found = find_violating_box(residuals, measures, eta, search, restarts, rng, budget)
        if found is None:
            break
        if len(trace.steps) >= max_steps:
            raise RuntimeError("energy-increment step budget exceeded")
        i, boxes = found
        partition = partition.refine(boxes)
        after = energy(hs, partition, measures)
        if after < current + eta**2 - 1e-9:
            raise AssertionError(f"energy gain {after - current} below eta**2 = {eta**2}")
        trace.steps.append(TraceStep(i, tuple(tuple(np.flatnonzero(b).tolist()) for b in boxes),
                                     current, after))
        current = after
    trace.final_energy = current
    return partition, Ws, trace


__all__ = [
    "Partition", "StepArray", "TraceStep", "RegularityTrace", "box_inner_product",
    "conditional_expectation", "energy", "find_violating_box", "weak_box_regularize",
    "multilinear", "step_bound",
]
