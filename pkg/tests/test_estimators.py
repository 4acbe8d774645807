import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

import sparsekit as sk


def make_instance(seed=0):
    F = sk.generate_matrix(16, 24, seed=seed)
    beta = sk.generate_signal(24, 2, ("uniform", 1, 2), seed=seed + 1)
    return F.entries, beta.values, F.entries @ beta.values


def test_basis_pursuit_estimator_recovers():
    X, beta, y = make_instance()
    est = sk.BasisPursuit().fit(X, y)
    assert np.linalg.norm(est.coef_ - beta) <= 1e-6
    assert est.result_.program == "P"
    assert np.allclose(est.predict(X), y, atol=1e-6)


def test_all_estimators_fit_predict():
    X, beta, y = make_instance(3)
    for est in (
        sk.BasisPursuit(),
        sk.DantzigSelector(lam=0.05),
        sk.L2ConstrainedL1(eta=0.05),
        sk.Lasso(rho=0.05),
    ):
        est.fit(X, y)
        assert est.coef_.shape == (24,)
        assert est.n_features_in_ == 24
        pred = est.predict(X)
        assert pred.shape == (16,)


def test_get_set_params_and_clone():
    est = sk.DantzigSelector(lam=0.2, max_iterations=123)
    params = est.get_params()
    assert params["lam"] == 0.2 and params["max_iterations"] == 123
    est.set_params(lam=0.3)
    assert est.lam == 0.3
    cloned = clone(est)
    assert cloned.get_params() == est.get_params()
    assert not hasattr(cloned, "coef_")


def test_predict_before_fit_raises():
    with pytest.raises(NotFittedError):
        sk.Lasso().predict(np.eye(3))


def test_predict_feature_mismatch():
    X, _, y = make_instance(5)
    est = sk.Lasso(rho=0.1).fit(X, y)
    with pytest.raises(ValueError):
        est.predict(np.ones((4, 7)))


def test_estimator_validates_inputs():
    with pytest.raises(ValueError):
        sk.BasisPursuit().fit(np.ones((3, 2)), np.ones(4))  # length mismatch
    with pytest.raises(ValueError):
        sk.BasisPursuit().fit(np.full((2, 2), np.nan), np.ones(2))


def test_score_available_through_mixin():
    X, beta, y = make_instance(7)
    est = sk.BasisPursuit().fit(X, y)
    assert est.score(X, y) == pytest.approx(1.0, abs=1e-9)
