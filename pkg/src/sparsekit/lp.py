"""Dense two-phase simplex for small linear programs.

Minimizes ``c @ x`` subject to equality rows, inequality rows and simple
variable bounds.  The pivot rule is Bland's smallest-index rule, which is
anti-cycling and fully deterministic, and an explicit Phase I handles
infeasibility detection and redundant equality rows.  Intended for desk
scale (a few hundred variables), where a dense tableau is the simplest
thing that is exactly reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PIVOT_TOL = 1e-10
_RATIO_TIE_TOL = 1e-9


@dataclass
class SolverOptions:
    """Shared tolerances for the optimization routines."""

    feasibility_tol: float = 1e-9
    optimality_tol: float = 1e-9
    max_iterations: int = 50_000

    def __post_init__(self):
        if self.feasibility_tol <= 0 or self.optimality_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class LpProblem:
    """min c @ x  s.t.  a_eq x = b_eq,  a_ub x (<=|>=) b_ub,  bounds on x.

    ``senses`` gives the direction of each a_ub row ('<=' or '>='); rows
    are normalized to <= at construction.  ``bounds`` is one (lo, hi) pair
    per variable with None for unbounded; the default is (0, None).
    """

    c: np.ndarray
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    senses: list | None = None
    bounds: list | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        if self.c.ndim != 1:
            raise ValueError("objective must be a vector")
        n = self.c.size
        for name in ("a_eq", "a_ub"):
            a = getattr(self, name)
            if a is not None:
                a = np.asarray(a, dtype=float)
                if a.ndim != 2 or a.shape[1] != n:
                    raise ValueError(f"{name} must be 2-d with {n} columns")
                setattr(self, name, a)
        for aname, bname in (("a_eq", "b_eq"), ("a_ub", "b_ub")):
            a, b = getattr(self, aname), getattr(self, bname)
            if (a is None) != (b is None):
                raise ValueError(f"{aname} and {bname} must come together")
            if b is not None:
                b = np.asarray(b, dtype=float)
                if b.shape != (a.shape[0],):
                    raise ValueError(f"{bname} length mismatch")
                setattr(self, bname, b)
        if self.senses is not None:
            if self.a_ub is None or len(self.senses) != self.a_ub.shape[0]:
                raise ValueError("senses must match a_ub rows")
            flip = np.array([s == ">=" for s in self.senses])
            if not all(s in ("<=", ">=") for s in self.senses):
                raise ValueError("senses entries must be '<=' or '>='")
            self.a_ub = np.where(flip[:, None], -self.a_ub, self.a_ub)
            self.b_ub = np.where(flip, -self.b_ub, self.b_ub)
            self.senses = None
        if self.bounds is not None and len(self.bounds) != n:
            raise ValueError("bounds must have one (lo, hi) pair per variable")
        arrays = [self.c] + [
            x for x in (self.a_eq, self.b_eq, self.a_ub, self.b_ub) if x is not None
        ]
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise ValueError("problem data must be finite")


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    x: np.ndarray
    objective_value: float
    max_violation: float
    iterations: int
    unique: bool = True


def _standardize(problem: LpProblem):
    """Rewrite as min c_std @ u s.t. A u = b, u >= 0 with x = S u + offset."""
    n = problem.c.size
    bounds = problem.bounds if problem.bounds is not None else [(0.0, None)] * n
    offset = np.zeros(n)
    terms = []
    caps = []  # (std column, cap) extra rows u_j <= cap
    ncol = 0
    for j, (lo, hi) in enumerate(bounds):
        if lo is None and hi is None:
            terms.append(((ncol, 1.0), (ncol + 1, -1.0)))
            ncol += 2
        elif lo is None:
            offset[j] = hi
            terms.append(((ncol, -1.0),))
            ncol += 1
        else:
            if hi is not None and hi < lo:
                raise ValueError(f"variable {j}: upper bound below lower bound")
            offset[j] = lo
            terms.append(((ncol, 1.0),))
            ncol += 1
            if hi is not None:
                caps.append((ncol - 1, hi - lo))
    S = np.zeros((n, ncol))
    for j, tt in enumerate(terms):
        for col, sign in tt:
            S[j, col] = sign

    eq_rows, eq_rhs = [], []
    if problem.a_eq is not None:
        eq_rows.append(problem.a_eq @ S)
        eq_rhs.append(problem.b_eq - problem.a_eq @ offset)
    ub_rows, ub_rhs = [], []
    if problem.a_ub is not None:
        ub_rows.append(problem.a_ub @ S)
        ub_rhs.append(problem.b_ub - problem.a_ub @ offset)
    if caps:
        cap_a = np.zeros((len(caps), ncol))
        for i, (col, cap) in enumerate(caps):
            cap_a[i, col] = 1.0
        ub_rows.append(cap_a)
        ub_rhs.append(np.array([cap for _, cap in caps]))

    a_eq = np.vstack(eq_rows) if eq_rows else np.zeros((0, ncol))
    b_eq = np.concatenate(eq_rhs) if eq_rhs else np.zeros(0)
    a_ub = np.vstack(ub_rows) if ub_rows else np.zeros((0, ncol))
    b_ub = np.concatenate(ub_rhs) if ub_rhs else np.zeros(0)

    m_eq, m_ub = a_eq.shape[0], a_ub.shape[0]
    A = np.zeros((m_eq + m_ub, ncol + m_ub))
    A[:m_eq, :ncol] = a_eq
    A[m_eq:, :ncol] = a_ub
    A[m_eq:, ncol:] = np.eye(m_ub)
    b = np.concatenate([b_eq, b_ub])
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    c_std = np.concatenate([S.T @ problem.c, np.zeros(m_ub)])
    return A, b, c_std, S, offset, ncol


def _pivot(T, obj, basis, row, col):
    piv_row = T[row] / T[row, col]
    T -= np.outer(T[:, col], piv_row)
    T[row] = piv_row
    obj -= obj[col] * piv_row
    basis[row] = col


def _bland_loop(T, obj, basis, n_active, opts, budget):
    """Run pivots until optimal/unbounded or the iteration budget runs out."""
    iterations = 0
    while True:
        neg = np.flatnonzero(obj[:n_active] < -opts.optimality_tol)
        if neg.size == 0:
            return "optimal", iterations
        enter = int(neg[0])  # Bland: smallest eligible index
        col = T[:, enter]
        ok = col > _PIVOT_TOL
        if not np.any(ok):
            return "unbounded", iterations
        ratios = np.full(col.shape, np.inf)
        ratios[ok] = T[ok, -1] / col[ok]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + _RATIO_TIE_TOL * (1.0 + abs(best)))
        leave = int(ties[np.argmin([basis[i] for i in ties])])
        _pivot(T, obj, basis, leave, enter)
        iterations += 1
        if iterations >= budget:
            return "iteration_limit", iterations


def solve_lp(problem: LpProblem, opts: SolverOptions | None = None) -> LpSolution:
    """Two-phase simplex solve; deterministic for identical inputs."""
    opts = opts or SolverOptions()
    A, b, c_std, S, offset, ncol = _standardize(problem)
    m, N = A.shape
    iterations = 0

    # Phase I: artificial basis, minimize the sum of artificials.
    T = np.hstack([A, np.eye(m), b[:, None]])
    basis = list(range(N, N + m))
    obj = np.zeros(N + m + 1)
    obj[:N] = -T[:, :N].sum(axis=0)
    obj[-1] = -T[:, -1].sum()
    status, its = _bland_loop(T, obj, basis, N + m, opts, opts.max_iterations)
    iterations += its
    if status == "iteration_limit":
        return _finish(problem, S, offset, None, status, iterations)
    if -obj[-1] > opts.feasibility_tol:
        return _finish(problem, S, offset, None, "infeasible", iterations)

    # Drive artificials out of the basis; an all-zero row is redundant.
    dead = []
    for i in range(m):
        if basis[i] >= N:
            row = T[i, :N]
            cand = np.flatnonzero(np.abs(row) > _PIVOT_TOL)
            if cand.size:
                _pivot(T, obj, basis, i, int(cand[0]))
            else:
                dead.append(i)
    if dead:
        T = np.delete(T, dead, axis=0)
        basis = [bi for i, bi in enumerate(basis) if i not in dead]

    # Phase II on the artificial-free tableau.
    T2 = np.hstack([T[:, :N], T[:, -1:]])
    obj2 = np.concatenate([c_std, [0.0]])
    for i, bi in enumerate(basis):
        if c_std[bi] != 0.0:
            obj2 -= c_std[bi] * T2[i]
    status, its = _bland_loop(T2, obj2, basis, N, opts, opts.max_iterations - iterations)
    iterations += its
    if status != "optimal":
        return _finish(problem, S, offset, None, status, iterations)

    u = np.zeros(N)
    for i, bi in enumerate(basis):
        u[bi] = max(T2[i, -1], 0.0)
    x = S @ u[:ncol] + offset
    in_basis = set(basis)
    alt = any(
        j not in in_basis and obj2[j] <= opts.optimality_tol for j in range(N)
    )
    return _finish(problem, S, offset, x, "optimal", iterations, unique=not alt)


def _finish(problem, S, offset, x, status, iterations, unique=True):
    if x is None:
        x = np.full(problem.c.size, np.nan)
        return LpSolution(status, x, np.nan, np.nan, iterations, unique)
    viol = 0.0
    if problem.a_eq is not None:
        viol = max(viol, float(np.abs(problem.a_eq @ x - problem.b_eq).max(initial=0.0)))
    if problem.a_ub is not None:
        viol = max(viol, float((problem.a_ub @ x - problem.b_ub).max(initial=0.0)))
    if problem.bounds is not None:
        for j, (lo, hi) in enumerate(problem.bounds):
            if lo is not None:
                viol = max(viol, lo - x[j])
            if hi is not None:
                viol = max(viol, x[j] - hi)
    else:
        viol = max(viol, float((-x).max(initial=0.0)))
    return LpSolution(
        status=status,
        x=x,
        objective_value=float(problem.c @ x),
        max_violation=max(viol, 0.0),
        iterations=iterations,
        unique=unique,
    )
