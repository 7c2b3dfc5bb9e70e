"""Input validation helpers shared by every module.

Bitstrings are numpy integer vectors of 0/1 entries.  Batches of bitstrings are
``(N, n)`` matrices.  The canonical enumeration of ``{0,1}^n`` is lexicographic
with coordinate 0 as the most significant bit, so row ``i`` of
:func:`all_inputs` is the binary expansion of ``i``.
"""

from __future__ import annotations

import math
import numbers

import numpy as np
from sklearn.utils import check_array

#: Largest ``n`` for which a :class:`~holoequiv.functions.TableFunction` may be built.
TABLE_LIMIT = 20
#: Default largest ``n`` for exhaustive sweeps over all ``2**n`` inputs.
EXHAUSTIVE_LIMIT = 12
#: Default largest number of location tuples enumerated in exact mode.
ENUMERATION_LIMIT = 10**6


class LimitExceededError(ValueError):
    """Raised when an exact computation would exceed a configured size limit."""


def check_bits(x, n: int | None = None) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D bitstring, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"dimension mismatch: bitstring has length {arr.shape[0]}, expected {n}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("bitstring entries must be 0 or 1")
    return arr.astype(np.int8)


def check_bit_matrix(X, n: int | None = None) -> np.ndarray:
    """Validate a batch of bitstrings and return it as an ``int8`` matrix."""
    X = check_array(X, dtype=None, ensure_2d=True, ensure_min_samples=1,
                    ensure_min_features=0 if n == 0 else 1)
    if n is not None and X.shape[1] != n:
        raise ValueError(f"dimension mismatch: inputs have {X.shape[1]} columns, expected {n}")
    if X.size and not np.isin(X, (0, 1)).all():
        raise ValueError("bit matrix entries must be 0 or 1")
    return X.astype(np.int8)


def all_inputs(n: int, limit: int = TABLE_LIMIT) -> np.ndarray:
    """All ``2**n`` bitstrings of length ``n`` in canonical order."""
    if n > limit:
        raise LimitExceededError(f"n={n} exceeds the exhaustive limit {limit}")
    idx = np.arange(2**n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.int8)


def input_index(x) -> int:
    """Position of a bitstring in the canonical order."""
    out = 0
    for b in x:
        out = (out << 1) | int(b)
    return out


def check_open_unit(value: float, name: str = "eps") -> float:
    if not isinstance(value, numbers.Real) or not 0 < value < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
    return float(value)


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, numbers.Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator or an integer seed.  ``None`` is rejected: no global randomness."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, numbers.Integral):
        return np.random.default_rng(int(rng))
    raise TypeError("an explicit numpy Generator or integer seed is required")


def binomial_slack(p: float, trials: int, sigmas: float = 3.0) -> float:
    """``sigmas`` standard deviations of a Bernoulli(p) frequency over ``trials`` runs."""
    return sigmas * math.sqrt(max(p * (1.0 - p), 0.0) / trials)
