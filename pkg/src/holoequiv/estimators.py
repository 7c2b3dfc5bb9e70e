"""Estimator-style wrappers around the three conversions.

``fit`` takes the source representation instead of training data; ``predict``
evaluates the fitted target representation on a batch of bitstrings.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_generator, check_bit_matrix
from .holographic import HoloScheme
from .network import Network, audit_complexity, compile_poly_to_nn
from .polynomial import PolyRep, holo_to_poly, poly_complexity
from .sampling import nn_to_holo


class HoloPolynomialApproximator(BaseEstimator):
    """Fit a holographic scheme, predict with the resulting polynomial (unclipped)."""

    def __init__(self, eps: float = 0.2, search: str = "exhaustive", restarts: int = 32,
                 random_state: int = 0):
        self.eps = eps
        self.search = search
        self.restarts = restarts
        self.random_state = random_state

    def fit(self, scheme: HoloScheme, y=None):
        if not isinstance(scheme, HoloScheme):
            raise TypeError("fit expects a HoloScheme")
        self.rep_, self.report_ = holo_to_poly(scheme, self.eps, search=self.search,
                                               restarts=self.restarts,
                                               rng=as_generator(self.random_state))
        self.n_features_in_ = scheme.n
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "rep_")
        return self.rep_.evaluate(check_bit_matrix(X, self.n_features_in_))


class PolynomialNetworkCompiler(BaseEstimator):
    """Fit a polynomial representation, predict with the compiled network.

    ``K=None`` compiles at the representation's own complexity.
    """

    def __init__(self, K: int | None = None):
        self.K = K

    def fit(self, rep: PolyRep, y=None):
        if not isinstance(rep, PolyRep):
            raise TypeError("fit expects a PolyRep")
        self.K_ = poly_complexity(rep).K if self.K is None else self.K
        self.network_ = compile_poly_to_nn(rep, self.K_)
        self.complexity_ = audit_complexity(self.network_)
        self.n_features_in_ = rep.n
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "network_")
        return self.network_.evaluate(check_bit_matrix(X, self.n_features_in_))


class NetworkSampler(BaseEstimator):
    """Fit a network, predict with one seeded run of the derived sampling scheme per row."""

    def __init__(self, eps: float = 0.2, constants: str = "local", random_state: int = 0):
        self.eps = eps
        self.constants = constants
        self.random_state = random_state

    def fit(self, net: Network, y=None):
        if not isinstance(net, Network):
            raise TypeError("fit expects a Network")
        self.scheme_ = nn_to_holo(net, self.eps, self.constants)
        self.plan_ = self.scheme_.tests.plan
        self.n_features_in_ = net.n
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "scheme_")
        X = check_bit_matrix(X, self.n_features_in_)
        rng = as_generator(self.random_state)
        # one independent run per row
        return np.array([self.scheme_.tests.sample_values(self.scheme_, x[None, :], 1, rng)[0, 0]
                         for x in X])


__all__ = ["HoloPolynomialApproximator", "PolynomialNetworkCompiler", "NetworkSampler"]
