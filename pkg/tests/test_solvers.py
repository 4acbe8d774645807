import math
from itertools import combinations

import numpy as np
import pytest

import sparsekit as sk
from sparsekit.lp import SolverOptions


def sparsest_solution_oracle(a, y, kmax, atol=1e-8):
    """Least squares over every support of size <= kmax; returns the unique
    exact-fit candidate or None (independent of the LP route)."""
    p = a.shape[1]
    hits = []
    for k in range(1, kmax + 1):
        for T in combinations(range(p), k):
            coef, _, _, _ = np.linalg.lstsq(a[:, T], y, rcond=None)
            if np.linalg.norm(a[:, T] @ coef - y) <= atol * (1 + np.linalg.norm(y)):
                x = np.zeros(p)
                x[list(T)] = coef
                hits.append(x)
        if hits:
            break
    if not hits:
        return None
    for other in hits[1:]:
        if np.linalg.norm(other - hits[0]) > 1e-6:
            return None  # not unique at this sparsity level
    return hits[0]


def ista_oracle(a, y, rho, iters=4000, restarts=3, seed=0):
    """Proximal-gradient descent on ||y - a g||^2 + rho ||g||_1 from several
    starts; returns the best objective seen."""
    rng = np.random.default_rng(seed)
    L = 2.0 * np.linalg.eigvalsh(a.T @ a)[-1]
    step = 1.0 / L
    best = np.inf
    p = a.shape[1]
    for r in range(restarts):
        g = np.zeros(p) if r == 0 else rng.standard_normal(p)
        for _ in range(iters):
            grad = 2.0 * (a.T @ (a @ g - y))
            z = g - step * grad
            g = np.sign(z) * np.maximum(np.abs(z) - step * rho, 0.0)
        obj = np.linalg.norm(y - a @ g) ** 2 + rho * np.abs(g).sum()
        best = min(best, obj)
    return best


def objective(a, y, g, rho):
    return np.linalg.norm(y - a @ g) ** 2 + rho * np.abs(g).sum()


# ---------------------------------------------------------------- basis pursuit


def test_bp_identity_and_zero():
    eye = np.eye(4)
    y = np.array([1.0, -2.0, 0.5, 0.0])
    r = sk.basis_pursuit(eye, y)
    assert r.status == "optimal"
    assert np.allclose(r.gamma_hat, y, atol=1e-9)
    r = sk.basis_pursuit(eye, np.zeros(4))
    assert np.allclose(r.gamma_hat, 0.0, atol=1e-12)


def test_bp_recovers_seeded_instance_and_matches_oracle():
    F = sk.generate_matrix(20, 40, "gaussian", True, seed=7)
    beta = sk.generate_signal(40, 3, ("uniform", 1, 2), seed=11)
    y = F.entries @ beta.values
    r = sk.basis_pursuit(F, y)
    assert r.status == "optimal"
    assert np.linalg.norm(r.gamma_hat - beta.values) <= 1e-6
    oracle = sparsest_solution_oracle(F.entries, y, kmax=3)
    assert oracle is not None
    assert np.linalg.norm(oracle - r.gamma_hat) <= 1e-6


def test_bp_infeasible_outside_span():
    a = np.array([[1.0, 2.0], [0.0, 0.0]])  # rank 1, second coordinate dead
    y = np.array([1.0, 1.0])
    assert sk.basis_pursuit(a, y).status == "infeasible"


def test_bp_feasibility_contract():
    F = sk.generate_matrix(15, 30, seed=1)
    beta = sk.generate_signal(30, 4, "unit", seed=2)
    y = F.entries @ beta.values
    r = sk.basis_pursuit(F, y)
    assert r.residual_l2 <= 1e-9 * (1 + np.linalg.norm(y))


# ---------------------------------------------------------------- dantzig


def test_ds_zero_when_lambda_dominates():
    F = sk.generate_matrix(8, 12, seed=3)
    y = F.entries @ sk.generate_signal(12, 2, "unit", seed=4).values
    lam = np.abs(F.entries.T @ y).max() * 1.01
    r = sk.dantzig_selector(F, y, lam)
    assert r.status == "optimal"
    assert np.allclose(r.gamma_hat, 0.0, atol=1e-9)


def test_ds_identity_zero_lambda():
    y = np.array([0.3, -1.2, 0.0, 2.0])
    r = sk.dantzig_selector(np.eye(4), y, 0.0)
    assert np.allclose(r.gamma_hat, y, atol=1e-9)


def test_ds_truth_feasible_domination():
    F = sk.generate_matrix(20, 40, seed=7)
    beta = sk.generate_signal(40, 3, ("uniform", 1, 2), seed=11)
    lam = 0.05
    obs = sk.observe(F, beta, sk.NoiseSpec.correlation_bounded(lam), seed=5)
    r = sk.dantzig_selector(F, obs.y, lam)
    assert r.status == "optimal"
    assert r.residual_corr_inf <= lam + 1e-9
    assert r.l1_norm <= np.abs(beta.values).sum() + 1e-9


def test_ds_zero_lambda_singular_gram():
    # p > n: the zero-lambda equality system has dependent rows
    F = sk.generate_matrix(6, 10, seed=4)
    beta = sk.generate_signal(10, 2, "unit", seed=5)
    r = sk.dantzig_selector(F, F.entries @ beta.values, 0.0)
    assert r.status == "optimal"
    assert r.residual_corr_inf <= 1e-9
    assert np.linalg.norm(r.gamma_hat - beta.values) <= 1e-6


def test_ds_negative_lambda_rejected():
    with pytest.raises(ValueError):
        sk.dantzig_selector(np.eye(2), np.ones(2), -0.1)


def test_ds_l1_monotone_in_lambda():
    F = sk.generate_matrix(12, 24, seed=8)
    beta = sk.generate_signal(24, 3, "unit", seed=9)
    y = F.entries @ beta.values + 0.01 * np.random.default_rng(1).standard_normal(12)
    norms = [sk.dantzig_selector(F, y, lam).l1_norm for lam in (0.01, 0.05, 0.1, 0.4)]
    for lo, hi in zip(norms[1:], norms[:-1]):
        assert lo <= hi + 1e-9


# ---------------------------------------------------------------- l2-constrained


def test_p1_zero_when_eta_dominates():
    F = sk.generate_matrix(8, 12, seed=3)
    y = F.entries @ sk.generate_signal(12, 2, "unit", seed=4).values
    r = sk.l2_constrained_l1(F, y, np.linalg.norm(y) * 1.01)
    assert np.allclose(r.gamma_hat, 0.0, atol=1e-12)


def test_p1_identity_zero_eta():
    y = np.array([0.3, -1.2, 0.0, 2.0])
    r = sk.l2_constrained_l1(np.eye(4), y, 0.0)
    assert r.program == "P1"
    assert np.allclose(r.gamma_hat, y, atol=1e-9)


def test_p1_infeasible_eta_below_reachable_residual():
    a = np.array([[1.0, 2.0], [0.0, 0.0]])
    y = np.array([0.0, 1.0])  # distance 1 from the column span
    assert sk.l2_constrained_l1(a, y, 0.5).status == "infeasible"


def test_p1_eta_at_least_squares_floor():
    # the budget equals the smallest reachable residual: the fit is forced
    a = np.array([[1.0, 0.5], [0.0, 0.0]])
    y = np.array([1.0, 0.7])
    r = sk.l2_constrained_l1(a, y, 0.7)
    assert r.status == "optimal"
    assert r.residual_l2 <= 0.7 * (1 + 1e-9) + 1e-9
    assert r.l1_norm == pytest.approx(1.0, abs=1e-6)


def test_p1_truth_feasible_domination():
    F = sk.generate_matrix(20, 40, seed=7)
    beta = sk.generate_signal(40, 3, ("uniform", 1, 2), seed=11)
    rng = np.random.default_rng(6)
    z = rng.standard_normal(20)
    z *= 0.1 / np.linalg.norm(z)  # exactly on the eps sphere
    y = F.entries @ beta.values + z
    r = sk.l2_constrained_l1(F, y, 0.1)
    assert r.status == "optimal"
    assert r.residual_l2 <= 0.1 * (1 + 1e-9) + 1e-9
    assert r.l1_norm <= np.abs(beta.values).sum() + 1e-8
    assert "stationarity" in r.diagnostics and "multiplier" in r.diagnostics


def test_p1_matches_socp_oracle():
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(12)
    for trial in range(4):
        F = sk.generate_matrix(8, 14, seed=100 + trial)
        beta = sk.generate_signal(14, 2, ("uniform", 0.5, 2.0), seed=200 + trial)
        z = rng.standard_normal(8)
        z *= 0.05 / np.linalg.norm(z)
        y = F.entries @ beta.values + z
        mine = sk.l2_constrained_l1(F, y, 0.05)
        g = cp.Variable(14)
        prob = cp.Problem(
            cp.Minimize(cp.norm1(g)), [cp.norm2(y - F.entries @ g) <= 0.05]
        )
        prob.solve(solver=cp.CLARABEL)
        assert mine.l1_norm == pytest.approx(prob.value, abs=5e-8)


def test_p1_l1_monotone_in_eta():
    F = sk.generate_matrix(12, 24, seed=8)
    beta = sk.generate_signal(24, 3, "unit", seed=9)
    y = F.entries @ beta.values + 0.02 * np.random.default_rng(1).standard_normal(12)
    norms = [sk.l2_constrained_l1(F, y, eta).l1_norm for eta in (0.05, 0.1, 0.3)]
    for lo, hi in zip(norms[1:], norms[:-1]):
        assert lo <= hi + 1e-8


def test_p1_negative_eta_rejected():
    with pytest.raises(ValueError):
        sk.l2_constrained_l1(np.eye(2), np.ones(2), -0.1)


# ---------------------------------------------------------------- lasso


def test_lasso_zero_when_rho_dominates():
    F = sk.generate_matrix(8, 12, seed=3)
    y = F.entries @ sk.generate_signal(12, 2, "unit", seed=4).values
    rho = 2.0 * np.abs(F.entries.T @ y).max() * 1.01
    r = sk.lasso(F, y, rho)
    assert np.allclose(r.gamma_hat, 0.0, atol=1e-12)


def test_lasso_identity_soft_threshold():
    y = np.array([2.0, -0.3, 0.05, -1.0])
    rho = 0.5
    r = sk.lasso(np.eye(4), y, rho)
    expected = np.sign(y) * np.maximum(np.abs(y) - rho / 2.0, 0.0)
    assert np.allclose(r.gamma_hat, expected, atol=1e-10)


def test_lasso_matches_descent_oracle():
    F = sk.generate_matrix(10, 20, seed=17)
    beta = sk.generate_signal(20, 3, ("uniform", 0.5, 1.5), seed=18)
    y = F.entries @ beta.values + 0.05 * np.random.default_rng(2).standard_normal(10)
    rho = 0.1
    r = sk.lasso(F, y, rho)
    assert r.status == "optimal"
    mine = objective(F.entries, y, r.gamma_hat, rho)
    oracle = ista_oracle(F.entries, y, rho)
    assert mine <= oracle + 1e-8


def test_lasso_negative_rho_rejected():
    with pytest.raises(ValueError):
        sk.lasso(np.eye(2), np.ones(2), -1.0)


# ---------------------------------------------------------------- shared


def test_residuals_recomputed_from_inputs():
    F = sk.generate_matrix(10, 20, seed=4)
    beta = sk.generate_signal(20, 2, "unit", seed=5)
    y = F.entries @ beta.values + 0.01 * np.random.default_rng(0).standard_normal(10)
    for result in (
        sk.basis_pursuit(F, F.entries @ beta.values),
        sk.dantzig_selector(F, y, 0.05),
        sk.l2_constrained_l1(F, y, 0.05),
        sk.lasso(F, y, 0.1),
    ):
        g = result.gamma_hat
        assert result.l1_norm == pytest.approx(np.abs(g).sum(), rel=1e-12, abs=1e-15)
        r = y if result.program != "P" else F.entries @ beta.values
        assert result.residual_l2 == pytest.approx(
            np.linalg.norm(r - F.entries @ g), rel=1e-12, abs=1e-15
        )
        assert result.residual_corr_inf == pytest.approx(
            np.abs(F.entries.T @ (r - F.entries @ g)).max(), rel=1e-12, abs=1e-15
        )


def test_gaussian_thresholds():
    assert sk.gaussian_thresholds(0.0, 10, 10) == (0.0, 0.0)
    lam_p, _ = sk.gaussian_thresholds(1.0, 2, 1024)
    assert lam_p == pytest.approx(math.sqrt(2 * math.log(1024)), abs=1e-12)
    assert lam_p == pytest.approx(3.723297411059034, abs=1e-12)
    _, eps_n = sk.gaussian_thresholds(1.0, 100, 2)
    assert eps_n == pytest.approx(
        math.sqrt(100 + 2 * math.sqrt(100 * math.log(100))), abs=1e-12
    )
    assert eps_n == pytest.approx(11.954886888874647, abs=1e-12)
    with pytest.raises(ValueError):
        sk.gaussian_thresholds(1.0, 1, 10)
    with pytest.raises(ValueError):
        sk.gaussian_thresholds(1.0, 10, 1)


def test_iteration_limit_status():
    F = sk.generate_matrix(10, 20, seed=4)
    y = F.entries @ sk.generate_signal(20, 5, "unit", seed=5).values
    opts = SolverOptions(max_iterations=2)
    assert sk.basis_pursuit(F, y, opts).status == "iteration_limit"
