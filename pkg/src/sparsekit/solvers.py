"""The four l1-minimization programs and the Gaussian-regime thresholds.

Programs
--------
P      min ||g||_1  s.t.  F g = y                       (linear program)
DS     min ||g||_1  s.t.  ||F^T (y - F g)||_inf <= lam  (linear program)
P1     min ||g||_1  s.t.  ||y - F g||_2 <= eta          (convex program)
Lasso  min ||y - F g||_2^2 + rho ||g||_1                (coordinate descent)

P and DS run on the dense simplex core via the usual split g = u - v with
u, v >= 0.  P1 is solved by bisecting the Lasso penalty until the residual
norm meets the l2 budget, which is exact for this convex pair and inherits
the coordinate-descent stationarity certificate.  Note the Lasso objective
carries no 1/2 factor on the quadratic term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lp import LpProblem, SolverOptions, solve_lp
from .validation import check_matrix_vector

PROGRAM_P = "P"
PROGRAM_P1 = "P1"
PROGRAM_DS = "DS"
PROGRAM_LASSO = "Lasso"


@dataclass
class RecoveryResult:
    """Solver output with residuals recomputed from (F, y, gamma_hat)."""

    program: str
    gamma_hat: np.ndarray
    l1_norm: float
    residual_l2: float
    residual_corr_inf: float
    iterations: int
    status: str
    diagnostics: dict = field(default_factory=dict)


def _package(program, a, y, gamma, iterations, status, diagnostics=None):
    gamma = np.asarray(gamma, dtype=float)
    r = y - a @ gamma
    return RecoveryResult(
        program=program,
        gamma_hat=gamma,
        l1_norm=float(np.abs(gamma).sum()),
        residual_l2=float(np.linalg.norm(r)),
        residual_corr_inf=float(np.abs(a.T @ r).max()),
        iterations=iterations,
        status=status,
        diagnostics=diagnostics or {},
    )


def basis_pursuit(F, y, opts: SolverOptions | None = None) -> RecoveryResult:
    """Minimum-l1 solution of F g = y, or infeasible status when y is
    outside the column span."""
    a, y = check_matrix_vector(F, y)
    opts = opts or SolverOptions()
    p = a.shape[1]
    prob = LpProblem(
        c=np.ones(2 * p),
        a_eq=np.hstack([a, -a]),
        b_eq=y,
    )
    sol = solve_lp(prob, opts)
    if sol.status != "optimal":
        return _package(PROGRAM_P, a, y, np.zeros(p), sol.iterations, sol.status)
    gamma = sol.x[:p] - sol.x[p:]
    diag = {"unique": sol.unique, "lp_max_violation": sol.max_violation}
    return _package(PROGRAM_P, a, y, gamma, sol.iterations, "optimal", diag)


def dantzig_selector(F, y, lam: float, opts: SolverOptions | None = None) -> RecoveryResult:
    """Minimum-l1 vector whose residual correlations are capped at lam.

    lam = 0 collapses the constraint to the equality F^T F g = F^T y and is
    solved as an equality-constrained LP.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    a, y = check_matrix_vector(F, y)
    opts = opts or SolverOptions()
    p = a.shape[1]
    G = a.T @ a
    d = a.T @ y
    split = np.hstack([G, -G])
    if lam == 0.0:
        prob = LpProblem(c=np.ones(2 * p), a_eq=split, b_eq=d)
    else:
        prob = LpProblem(
            c=np.ones(2 * p),
            a_ub=np.vstack([split, -split]),
            b_ub=np.concatenate([d + lam, lam - d]),
        )
    sol = solve_lp(prob, opts)
    if sol.status != "optimal":
        return _package(PROGRAM_DS, a, y, np.zeros(p), sol.iterations, sol.status)
    gamma = sol.x[:p] - sol.x[p:]
    diag = {"unique": sol.unique, "lp_max_violation": sol.max_violation}
    return _package(PROGRAM_DS, a, y, gamma, sol.iterations, "optimal", diag)


def _soft(x, t):
    return math.copysign(max(abs(x) - t, 0.0), x)


def _cd_stationarity(a, y, gamma, rho):
    """Worst subgradient violation of the penalized least-squares optimum."""
    g = 2.0 * (a.T @ (a @ gamma - y))
    on = gamma != 0.0
    viol = np.abs(g + rho * np.sign(gamma))[on]
    off = np.maximum(np.abs(g[~on]) - rho, 0.0)
    worst = 0.0
    if viol.size:
        worst = float(viol.max())
    if off.size:
        worst = max(worst, float(off.max()))
    return worst


def _lasso_cd(a, y, rho, gamma0, opts, max_sweeps):
    """Cyclic coordinate descent with exact per-coordinate minimization."""
    gamma = gamma0.copy()
    r = y - a @ gamma
    col_sq = np.einsum("ij,ij->j", a, a)
    scale = max(1.0, 2.0 * float(np.abs(a.T @ y).max(initial=0.0)), rho)
    tol = opts.optimality_tol * scale
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        for j in range(a.shape[1]):
            if col_sq[j] <= 0.0:
                continue
            old = gamma[j]
            c = float(a[:, j] @ r) + col_sq[j] * old
            new = _soft(c, rho / 2.0) / col_sq[j]
            if new != old:
                r += a[:, j] * (old - new)
                gamma[j] = new
        if _cd_stationarity(a, y, gamma, rho) <= tol:
            return gamma, sweeps, "optimal"
    return gamma, sweeps, "iteration_limit"


def lasso(F, y, rho: float, opts: SolverOptions | None = None) -> RecoveryResult:
    """Penalized least squares ||y - F g||^2 + rho ||g||_1 (no 1/2 factor)."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    a, y = check_matrix_vector(F, y)
    opts = opts or SolverOptions()
    gamma, sweeps, status = _lasso_cd(
        a, y, rho, np.zeros(a.shape[1]), opts, opts.max_iterations
    )
    diag = {"stationarity": _cd_stationarity(a, y, gamma, rho)}
    return _package(PROGRAM_LASSO, a, y, gamma, sweeps, status, diag)


def l2_constrained_l1(F, y, eta: float, opts: SolverOptions | None = None) -> RecoveryResult:
    """Minimum-l1 vector with residual l2 norm at most eta.

    Solved through the penalized form: the residual norm of the Lasso path
    is nondecreasing in rho, so bisection on rho pins the iterate whose
    residual matches eta from the feasible side.  The implied constraint
    multiplier and the coordinate-descent stationarity residual are
    recorded in ``diagnostics``.
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    a, y = check_matrix_vector(F, y)
    opts = opts or SolverOptions()
    p = a.shape[1]

    ny = float(np.linalg.norm(y))
    if ny <= eta:
        # zero is feasible and has minimal l1 norm
        return _package(PROGRAM_P1, a, y, np.zeros(p), 0, "optimal", {"multiplier": 0.0})

    gamma_ls, _, _, _ = np.linalg.lstsq(a, y, rcond=None)
    res_min = float(np.linalg.norm(y - a @ gamma_ls))
    if eta < res_min - opts.feasibility_tol * (1.0 + eta):
        return _package(PROGRAM_P1, a, y, np.zeros(p), 0, "infeasible")
    tiny = opts.feasibility_tol * (1.0 + ny)
    if eta <= tiny and res_min <= tiny:
        # budget below the feasibility tolerance: the equality program
        bp = basis_pursuit(a, y, opts)
        bp.program = PROGRAM_P1
        return bp

    rho_hi = 2.0 * float(np.abs(a.T @ y).max())  # gamma = 0 optimal above this
    rho_lo = 0.0
    sweeps_total = 0
    gamma = np.zeros(p)
    best = None  # (gamma, res, rho, cd_status) from the feasible side res <= eta
    converged = False
    max_outer = 200
    for _ in range(max_outer):
        budget = opts.max_iterations - sweeps_total
        if budget <= 0:
            break
        rho_mid = 0.5 * (rho_lo + rho_hi)
        gamma, sweeps, cd_status = _lasso_cd(a, y, rho_mid, gamma, opts, budget)
        sweeps_total += sweeps
        res = float(np.linalg.norm(y - a @ gamma))
        if res <= eta:
            best = (gamma.copy(), res, rho_mid, cd_status)
            rho_lo = rho_mid
        else:
            rho_hi = rho_mid
        if best is not None:
            # 2 eta / rho_b upper-bounds the constraint multiplier on the
            # remaining residual gap, so this is a true suboptimality bound
            _, res_b, rho_b, _ = best
            slack = (eta - res_b) * (2.0 * eta / max(rho_b, 1e-300))
            if slack <= opts.optimality_tol:
                converged = True
                break
        if rho_hi - rho_lo <= 1e-15 * rho_hi:
            converged = True
            break
    if best is None:
        # feasible side never reached: residual floor sits at eta itself
        gamma, sweeps, cd_status = _lasso_cd(
            a, y, rho_hi * 1e-12, gamma, opts, max(opts.max_iterations - sweeps_total, 1)
        )
        sweeps_total += sweeps
        best = (gamma, float(np.linalg.norm(y - a @ gamma)), rho_hi * 1e-12, cd_status)
        converged = True
    gamma, res, rho_star, cd_status = best
    status = "optimal" if converged and cd_status == "optimal" else "iteration_limit"
    diag = {
        "multiplier": 2.0 * res / rho_star if rho_star > 0 else 0.0,
        "stationarity": _cd_stationarity(a, y, gamma, rho_star),
        "residual_gap": eta - res,
        "rho": rho_star,
    }
    return _package(PROGRAM_P1, a, y, gamma, sweeps_total, status, diag)


def gaussian_thresholds(sigma: float, n: int, p: int) -> tuple[float, float]:
    """Constraint levels for the Gaussian-noise programs.

    Returns ``(lam_p, eps_n)`` with ``lam_p = sigma sqrt(2 log p)`` and
    ``eps_n = sigma sqrt(n + 2 sqrt(n log n))`` (natural logarithm).
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if n < 2 or p < 2:
        raise ValueError("need n >= 2 and p >= 2")
    lam_p = sigma * math.sqrt(2.0 * math.log(p))
    eps_n = sigma * math.sqrt(n + 2.0 * math.sqrt(n * math.log(n)))
    return lam_p, eps_n
