"""Fuzzy Boolean functions, coordinate measures and the elementary example families.

Coordinates are 0-based throughout: a function on ``{0,1}^n`` reads
``x[0], ..., x[n-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from ._validation import TABLE_LIMIT, check_bit_matrix, check_bits, check_positive_int, input_index
from .activations import CLIP, Activation

NORMALIZATION_SLACK = 1e-9


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CoordinateMeasure:
    """Probability distribution over the coordinate indices ``0..n-1``.

    Weights that sum to 1 within ``1e-9`` are renormalized; larger deviations
    are rejected.  Use :meth:`proportional` to normalize arbitrary weights.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        if w.size == 0:
            raise ValueError("a coordinate measure needs n >= 1")
        if not np.all(np.isfinite(w)) or (w < 0).any():
            raise ValueError("measure weights must be finite and nonnegative")
        total = w.sum()
        if abs(total - 1.0) > NORMALIZATION_SLACK:
            raise ValueError(f"measure weights sum to {total}, not 1")
        object.__setattr__(self, "weights", _frozen(w / total))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def uniform(cls, n: int) -> "CoordinateMeasure":
        n = check_positive_int(n, "n")
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, i: int) -> "CoordinateMeasure":
        w = np.zeros(check_positive_int(n, "n"))
        w[i] = 1.0
        return cls(w)

    @classmethod
    def proportional(cls, weights) -> "CoordinateMeasure":
        w = np.abs(np.asarray(weights, dtype=float))
        if w.sum() <= 0:
            raise ValueError("cannot normalize an all-zero weight vector")
        return cls(w / w.sum())

    def mass(self, subset) -> float:
        """Measure of a set of coordinates (boolean mask or index collection)."""
        subset = np.asarray(subset)
        if subset.dtype == bool:
            return float(self.weights[subset].sum())
        return float(self.weights[np.asarray(list(subset), dtype=int)].sum()) if subset.size else 0.0

    def sample(self, rng: np.random.Generator, size=None):
        return rng.choice(self.n, size=size, p=self.weights)

    def __eq__(self, other):
        return isinstance(other, CoordinateMeasure) and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())

    def to_dict(self) -> dict:
        return {"kind": "measure", "n": self.n, "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, data) -> "CoordinateMeasure":
        weights = data["weights"]
        if len(weights) != data.get("n", len(weights)):
            raise ValueError("measure length does not match n")
        return cls(weights)


def average_measure(measures: Sequence[CoordinateMeasure]) -> CoordinateMeasure:
    """The mixture ``(1/k) * sum_i mu_i`` of ``k`` measures on the same coordinates."""
    measures = list(measures)
    if not measures:
        raise ValueError("average_measure needs at least one measure")
    n = measures[0].n
    if any(m.n != n for m in measures):
        raise ValueError("all measures must share n")
    avg = np.mean([m.weights for m in measures], axis=0)
    return CoordinateMeasure(avg / avg.sum())


def sample_coordinate(measure: CoordinateMeasure, rng: np.random.Generator) -> int:
    return int(measure.sample(rng))


class FuzzyFunction:
    """Base class for maps ``{0,1}^n -> [0,1]``.

    Subclasses implement :meth:`evaluate` on a batch of bitstrings.
    """

    n: int
    kind: str

    def evaluate(self, X) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> float:
        return eval_function(self, x)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class TableFunction(FuzzyFunction):
    """Explicit table of ``2**n`` values indexed in canonical input order."""

    n: int
    table: np.ndarray
    kind: str = field(default="table", init=False)

    def __post_init__(self):
        check_positive_int(self.n, "n")
        if self.n > TABLE_LIMIT:
            raise ValueError(f"table functions are limited to n <= {TABLE_LIMIT}")
        table = np.asarray(self.table, dtype=float).ravel()
        if table.shape[0] != 2**self.n:
            raise ValueError(f"table needs 2**n = {2**self.n} entries, got {table.shape[0]}")
        if (table < 0).any() or (table > 1).any():
            raise ValueError("table values must lie in [0, 1]")
        object.__setattr__(self, "table", _frozen(table))

    def evaluate(self, X) -> np.ndarray:
        X = check_bit_matrix(X, self.n)
        weights = 1 << np.arange(self.n - 1, -1, -1, dtype=np.int64)
        return self.table[X.astype(np.int64) @ weights]

    def to_dict(self) -> dict:
        return {"kind": "table", "n": self.n, "table": self.table.tolist()}


@dataclass(frozen=True, eq=False)
class WeightedAverage(FuzzyFunction):
    """``x -> sigma(sum_i mu(i) x_i)`` for a measure ``mu`` and a Lipschitz activation."""

    measure: CoordinateMeasure
    activation: Activation = CLIP
    kind: str = field(default="weighted_average", init=False)

    def __post_init__(self):
        if self.activation.lipschitz > 1 + 1e-12:
            raise ValueError("weighted-average activations must be 1-Lipschitz")

    @property
    def n(self) -> int:
        return self.measure.n

    def evaluate(self, X) -> np.ndarray:
        X = check_bit_matrix(X, self.n)
        return self.activation(X @ self.measure.weights)

    def to_dict(self) -> dict:
        return {"kind": "weighted_average", "n": self.n,
                "weights": self.measure.weights.tolist(),
                "activation": self.activation.to_dict()}


@dataclass(frozen=True, eq=False)
class Junta(FuzzyFunction):
    """A function of the ordered coordinates ``coords`` given by a ``2**r`` table.

    ``coords=()`` with a one-entry table is a constant function.
    """

    n: int
    coords: tuple[int, ...]
    table: np.ndarray
    kind: str = field(default="junta", init=False)

    def __post_init__(self):
        check_positive_int(self.n, "n")
        coords = tuple(int(c) for c in self.coords)
        if len(set(coords)) != len(coords):
            raise ValueError("junta coordinates must be distinct")
        if any(not 0 <= c < self.n for c in coords):
            raise ValueError(f"junta coordinates must lie in [0, {self.n})")
        table = np.asarray(self.table, dtype=float).ravel()
        if table.shape[0] != 2 ** len(coords):
            raise ValueError(f"junta table needs {2**len(coords)} entries")
        if (table < 0).any() or (table > 1).any():
            raise ValueError("table values must lie in [0, 1]")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "table", _frozen(table))

    @classmethod
    def constant(cls, n: int, value: float) -> "Junta":
        return cls(n, (), [value])

    def evaluate(self, X) -> np.ndarray:
        X = check_bit_matrix(X, self.n)
        r = len(self.coords)
        weights = 1 << np.arange(r - 1, -1, -1, dtype=np.int64)
        return self.table[X[:, list(self.coords)].astype(np.int64) @ weights]

    def to_dict(self) -> dict:
        return {"kind": "junta", "n": self.n, "coords": list(self.coords),
                "table": self.table.tolist()}


@dataclass(frozen=True, eq=False)
class Parity(FuzzyFunction):
    n: int
    kind: str = field(default="parity", init=False)

    def __post_init__(self):
        check_positive_int(self.n, "n")

    def evaluate(self, X) -> np.ndarray:
        X = check_bit_matrix(X, self.n)
        return (X.sum(axis=1) % 2).astype(float)

    def to_dict(self) -> dict:
        return {"kind": "parity", "n": self.n}


AnyFunction = Union[TableFunction, WeightedAverage, Junta, Parity]


def eval_function(f: FuzzyFunction, x) -> float:
    x = check_bits(x, f.n)
    return float(f.evaluate(x[None, :])[0])


def function_from_dict(data: dict) -> FuzzyFunction:
    kind = data["kind"]
    if kind == "table":
        return TableFunction(data["n"], data["table"])
    if kind == "weighted_average":
        act = Activation.from_dict(data.get("activation", {"kind": "clip"}))
        measure = CoordinateMeasure(data["weights"])
        if measure.n != data.get("n", measure.n):
            raise ValueError("weights length does not match n")
        return WeightedAverage(measure, act)
    if kind == "junta":
        return Junta(data["n"], tuple(data["coords"]), data["table"])
    if kind == "parity":
        return Parity(data["n"])
    raise ValueError(f"unknown function kind {kind!r}")


def tabulate(f: FuzzyFunction) -> TableFunction:
    """Materialize ``f`` as an explicit table (``n <= TABLE_LIMIT``)."""
    from ._validation import all_inputs

    return TableFunction(f.n, f.evaluate(all_inputs(f.n)))


__all__ = [
    "CoordinateMeasure", "FuzzyFunction", "TableFunction", "WeightedAverage", "Junta",
    "Parity", "average_measure", "sample_coordinate", "eval_function", "function_from_dict",
    "tabulate", "input_index",
]
