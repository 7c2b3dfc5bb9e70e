import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from holoequiv._validation import all_inputs
from holoequiv.estimators import HoloPolynomialApproximator, NetworkSampler, PolynomialNetworkCompiler
from holoequiv.functions import Junta
from holoequiv.holographic import build_junta_scheme

F = Junta(4, (0, 2), [0.0, 0.4, 0.6, 1.0])
X = all_inputs(4)


def test_chain_reproduces_junta():
    poly = HoloPolynomialApproximator(eps=0.2).fit(build_junta_scheme(F))
    np.testing.assert_allclose(poly.predict(X), F.evaluate(X), atol=1e-9)
    comp = PolynomialNetworkCompiler().fit(poly.rep_)
    np.testing.assert_allclose(comp.predict(X), F.evaluate(X), atol=1e-9)
    assert comp.complexity_.K >= 1 and comp.K_ >= 1
    sampler = NetworkSampler(eps=0.2, random_state=3).fit(comp.network_)
    a, b = sampler.predict(X), sampler.predict(X)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (16,) and np.all((a >= 0) & (a <= 1))


def test_params_and_clone():
    est = NetworkSampler(eps=0.3, constants="uniform")
    assert est.get_params() == {"eps": 0.3, "constants": "uniform", "random_state": 0}
    assert clone(est).set_params(eps=0.1).eps == 0.1


def test_not_fitted_and_wrong_input():
    with pytest.raises(NotFittedError):
        PolynomialNetworkCompiler().predict(X)
    with pytest.raises(TypeError):
        HoloPolynomialApproximator().fit(F)


def test_predict_checks_width():
    poly = HoloPolynomialApproximator().fit(build_junta_scheme(F))
    with pytest.raises(ValueError):
        poly.predict(np.zeros((2, 3), dtype=int))
