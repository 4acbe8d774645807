"""Exact restricted-isometry / orthogonality / coherence constants.

All constants are computed by exhaustive support enumeration on small
matrices (with a budget guard), or bounded from below by Monte Carlo when
enumeration is infeasible.  Recovery-condition variants are evaluated from
a table of computed constants and certified only when every input was
exact.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .model import SensingMatrix, UNIT_COLUMN_ATOL
from .validation import check_matrix

DEFAULT_BRUTE_FORCE_LIMIT = 200_000
SQRT2_MINUS_1 = math.sqrt(2.0) - 1.0

#: Recovery-condition variants: id -> human-readable description.
CONDITION_VARIANTS = {
    "dt1.5": "delta(ceil(1.5k)) + theta(k, ceil(1.5k)) < 1",
    "dt2": "delta(2k) + theta(k, 2k) < 1",
    "dtt": "delta(k) + theta(k, k) + theta(k, 2k) < 1",
    "d2-radical": "delta(2k) < sqrt(2) - 1",
    "dd2.5": "delta(ceil(1.5k)) + delta(ceil(2.5k)) < 1",
    "d1.75-radical": "delta(ceil(1.75k)) < sqrt(2) - 1",
    "mip": "k < (2 + 2M) / ((3 + sqrt(6)) M)",
}


class EnumerationBudgetError(RuntimeError):
    """Support enumeration would exceed the brute-force budget."""


class IncompleteReportError(KeyError):
    """A condition check needs constants the report does not hold."""

    def __init__(self, variant: str, missing: list):
        self.variant = variant
        self.missing = missing
        super().__init__(f"variant {variant!r} needs missing constants: {missing}")


@dataclass(frozen=True)
class ConstantEstimate:
    value: float
    exact: bool


@dataclass(frozen=True, eq=False)
class RipReport:
    """Table of computed isometry/orthogonality constants for one matrix."""

    matrix_id: str
    delta: dict
    theta: dict
    coherence_M: float | None
    brute_force_limit: int

    def theta_entry(self, k: int, kp: int) -> ConstantEstimate | None:
        return self.theta.get((k, kp)) or self.theta.get((kp, k))


@dataclass(frozen=True)
class ConditionReport:
    variant: str
    k: int
    lhs_value: float
    threshold: float
    holds: bool
    exactness: str  # "certified" or "not_certified"


def matrix_digest(F) -> str:
    a = check_matrix(F)
    h = hashlib.sha256()
    h.update(str(a.shape).encode())
    h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()[:16]


def _support_deviation(G: np.ndarray, T) -> float:
    # Largest deviation of the sub-Gram spectrum from 1 on support T.
    w = np.linalg.eigvalsh(G[np.ix_(T, T)])
    return max(w[-1] - 1.0, 1.0 - w[0])


def _cross_gram_norm(G: np.ndarray, T, Tp) -> float:
    block = G[np.ix_(T, Tp)]
    if block.shape[0] == 1 or block.shape[1] == 1:
        return float(np.linalg.norm(block))
    return float(np.linalg.svd(block, compute_uv=False)[0])


def delta_exact(F, k: int, budget: int = DEFAULT_BRUTE_FORCE_LIMIT) -> tuple[float, bool]:
    """Exact order-k isometry constant by enumerating all size-k supports.

    Raises :class:`EnumerationBudgetError` when C(p, k) exceeds ``budget``;
    callers should fall back to :func:`delta_theta_mc_lower`.
    """
    a = check_matrix(F)
    p = a.shape[1]
    if not 1 <= k <= p:
        raise ValueError(f"need 1 <= k <= {p}, got k={k}")
    count = math.comb(p, k)
    if count > budget:
        raise EnumerationBudgetError(
            f"delta_{k} needs {count} support evaluations, budget is {budget}"
        )
    G = a.T @ a
    worst = 0.0
    for T in combinations(range(p), k):
        worst = max(worst, _support_deviation(G, T))
    return float(worst), True


def theta_exact(
    F, k: int, kp: int, budget: int = DEFAULT_BRUTE_FORCE_LIMIT
) -> tuple[float, bool]:
    """Exact (k, kp) orthogonality constant over all disjoint support pairs."""
    a = check_matrix(F)
    p = a.shape[1]
    if k < 1 or kp < 1 or k + kp > p:
        raise ValueError(f"need k, kp >= 1 and k + kp <= {p}, got ({k}, {kp})")
    count = math.comb(p, k) * math.comb(p - k, kp)
    if count > budget:
        raise EnumerationBudgetError(
            f"theta_({k},{kp}) needs {count} pair evaluations, budget is {budget}"
        )
    G = a.T @ a
    worst = 0.0
    idx = range(p)
    for T in combinations(idx, k):
        rest = [j for j in idx if j not in T]
        for Tp in combinations(rest, kp):
            worst = max(worst, _cross_gram_norm(G, T, Tp))
    return float(worst), True


def delta_theta_mc_lower(
    F, k: int, kp: int | None = None, trials: int = 1000, seed: int = 0
) -> tuple[float, bool]:
    """Monte Carlo lower bound on delta_k (kp None) or theta_(k,kp).

    A max over random supports: a certified lower bound on the true
    constant, never an estimate of it.  The sampled sequence is
    deterministic per seed, so growing ``trials`` only extends it.
    """
    a = check_matrix(F)
    p = a.shape[1]
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if kp is None:
        if not 1 <= k <= p:
            raise ValueError(f"need 1 <= k <= {p}")
    elif k < 1 or kp < 1 or k + kp > p:
        raise ValueError(f"need k, kp >= 1 and k + kp <= {p}")
    rng = np.random.default_rng(seed)
    G = a.T @ a
    best = 0.0
    for _ in range(trials):
        perm = rng.permutation(p)
        if kp is None:
            best = max(best, _support_deviation(G, perm[:k]))
        else:
            best = max(best, _cross_gram_norm(G, perm[:k], perm[k : k + kp]))
    return float(best), False


def coherence(F) -> float:
    """Largest |<f_i, f_j>| over distinct columns; needs unit columns."""
    if isinstance(F, SensingMatrix):
        unit = F.unit_columns
        a = F.entries
    else:
        a = check_matrix(F)
        unit = bool(
            np.all(np.abs(np.linalg.norm(a, axis=0) - 1.0) <= UNIT_COLUMN_ATOL)
        )
    if not unit:
        raise ValueError("coherence is defined for unit-norm columns only")
    G = np.abs(a.T @ a)
    np.fill_diagonal(G, 0.0)
    return float(G.max())


def theta_split_bound(values) -> float:
    """Root-sum-square combination bound for orthogonality constants.

    Feeding per-block theta values gives the split bound; feeding
    delta values at the combined orders gives the corollary bound.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("need at least one value")
    if np.any(v < 0):
        raise ValueError("inputs must be nonnegative")
    return float(np.sqrt(np.sum(v**2)))


def mip_to_rip(M: float, k: int, kp: int) -> tuple[float, float]:
    """Coherence-based upper bounds: delta_k <= (k-1)M, theta <= sqrt(k kp) M."""
    if M < 0:
        raise ValueError("coherence must be nonnegative")
    if k < 1 or kp < 1:
        raise ValueError("orders must be >= 1")
    return (k - 1) * M, math.sqrt(k * kp) * M


def build_rip_report(
    F,
    delta_ks,
    theta_pairs=(),
    budget: int = DEFAULT_BRUTE_FORCE_LIMIT,
    mc_trials: int = 2000,
    seed: int = 0,
) -> RipReport:
    """Compute a constants table, exactly where the budget allows.

    Entries past the budget fall back to Monte Carlo lower bounds and are
    flagged ``exact=False``.
    """
    delta = {}
    for k in sorted(set(int(k) for k in delta_ks)):
        try:
            val, exact = delta_exact(F, k, budget=budget)
        except EnumerationBudgetError:
            val, exact = delta_theta_mc_lower(F, k, trials=mc_trials, seed=seed)
        delta[k] = ConstantEstimate(val, exact)
    theta = {}
    for k, kp in sorted(set((int(k), int(kp)) for k, kp in theta_pairs)):
        try:
            val, exact = theta_exact(F, k, kp, budget=budget)
        except EnumerationBudgetError:
            val, exact = delta_theta_mc_lower(F, k, kp, trials=mc_trials, seed=seed)
        theta[(k, kp)] = ConstantEstimate(val, exact)
    M = None
    if isinstance(F, SensingMatrix) and F.unit_columns:
        M = coherence(F)
    return RipReport(
        matrix_id=matrix_digest(F),
        delta=delta,
        theta=theta,
        coherence_M=M,
        brute_force_limit=budget,
    )


def ceil_mult(num: int, den: int, k: int) -> int:
    """ceil(k * num / den) in exact integer arithmetic."""
    return -((-num * k) // den)


def condition_requirements(variant: str, k: int) -> dict:
    """The delta orders / theta pairs a variant needs at sparsity k."""
    if variant == "dt1.5":
        m = ceil_mult(3, 2, k)
        return {"delta": [m], "theta": [(k, m)], "coherence": False}
    if variant == "dt2":
        return {"delta": [2 * k], "theta": [(k, 2 * k)], "coherence": False}
    if variant == "dtt":
        return {"delta": [k], "theta": [(k, k), (k, 2 * k)], "coherence": False}
    if variant == "d2-radical":
        return {"delta": [2 * k], "theta": [], "coherence": False}
    if variant == "dd2.5":
        return {
            "delta": [ceil_mult(3, 2, k), ceil_mult(5, 2, k)],
            "theta": [],
            "coherence": False,
        }
    if variant == "d1.75-radical":
        return {"delta": [ceil_mult(7, 4, k)], "theta": [], "coherence": False}
    if variant == "mip":
        return {"delta": [], "theta": [], "coherence": True}
    raise ValueError(f"unknown condition variant {variant!r}")


def check_condition(report: RipReport, k: int, variant: str) -> ConditionReport:
    """Evaluate one recovery-condition variant from a constants table.

    ``certified`` requires every input constant to be exact; Monte Carlo
    lower bounds can only falsify a condition, never certify it.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    req = condition_requirements(variant, k)
    missing = []
    deltas = {}
    thetas = {}
    for m in req["delta"]:
        entry = report.delta.get(m)
        if entry is None:
            missing.append(("delta", m))
        else:
            deltas[m] = entry
    for pair in req["theta"]:
        entry = report.theta_entry(*pair)
        if entry is None:
            missing.append(("theta", pair))
        else:
            thetas[pair] = entry
    if req["coherence"] and report.coherence_M is None:
        missing.append(("coherence", None))
    if missing:
        raise IncompleteReportError(variant, missing)

    exact = all(e.exact for e in deltas.values()) and all(
        e.exact for e in thetas.values()
    )
    if variant == "dt1.5":
        m = ceil_mult(3, 2, k)
        lhs = deltas[m].value + thetas[(k, m)].value
        threshold = 1.0
    elif variant == "dt2":
        lhs = deltas[2 * k].value + thetas[(k, 2 * k)].value
        threshold = 1.0
    elif variant == "dtt":
        lhs = deltas[k].value + thetas[(k, k)].value + thetas[(k, 2 * k)].value
        threshold = 1.0
    elif variant == "d2-radical":
        lhs = deltas[2 * k].value
        threshold = SQRT2_MINUS_1
    elif variant == "dd2.5":
        lhs = deltas[ceil_mult(3, 2, k)].value + deltas[ceil_mult(5, 2, k)].value
        threshold = 1.0
    elif variant == "d1.75-radical":
        lhs = deltas[ceil_mult(7, 4, k)].value
        threshold = SQRT2_MINUS_1
    else:  # mip
        M = report.coherence_M
        if M == 0.0:
            lhs, threshold = float(k), math.inf
        else:
            lhs = float(k)
            threshold = (2.0 + 2.0 * M) / ((3.0 + math.sqrt(6.0)) * M)
        exact = True  # coherence is always computed exactly

    return ConditionReport(
        variant=variant,
        k=k,
        lhs_value=lhs,
        threshold=threshold,
        holds=bool(lhs < threshold),
        exactness="certified" if exact else "not_certified",
    )
