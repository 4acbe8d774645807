"""Observation model: sensing matrices, sparse signals, noise, and measurements.

The measurement model is ``y = F @ beta + z`` with a dense ``n x p`` matrix
``F``, a sparse coefficient vector ``beta`` and a noise vector ``z`` drawn
from one of four regimes (none, l2-ball bounded, correlation bounded, or
i.i.d. Gaussian).  Everything here is deterministic given a 64-bit seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

UNIT_COLUMN_ATOL = 1e-9
MIN_SIGNAL_MAGNITUDE = 1e-6

NOISE_REGIMES = ("noiseless", "l2_bounded", "correlation_bounded", "gaussian")
MATRIX_ENSEMBLES = ("gaussian", "bernoulli", "from_file")


class DegenerateMatrixError(ValueError):
    """Raised when a zero column makes column normalization impossible."""


def _frozen_array(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SensingMatrix:
    """Dense measurement matrix with per-column l2-norm metadata."""

    n: int
    p: int
    entries: np.ndarray
    column_norms: np.ndarray
    unit_columns: bool

    @classmethod
    def from_entries(cls, entries) -> "SensingMatrix":
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"need a 2-d matrix with n, p >= 1, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        norms = np.linalg.norm(a, axis=0)
        unit = bool(np.all(np.abs(norms - 1.0) <= UNIT_COLUMN_ATOL))
        return cls(
            n=a.shape[0],
            p=a.shape[1],
            entries=_frozen_array(a),
            column_norms=_frozen_array(norms),
            unit_columns=unit,
        )


@dataclass(frozen=True, eq=False)
class SparseSignal:
    """A p-vector with a declared sparsity budget ``k``.

    ``k`` may exceed the true support size; it never undercounts it.
    """

    p: int
    values: np.ndarray
    k: int

    @classmethod
    def from_values(cls, values, k: int | None = None) -> "SparseSignal":
        v = np.asarray(values, dtype=float)
        if v.ndim != 1:
            raise ValueError("signal must be a 1-d vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal entries must be finite")
        support = int(np.count_nonzero(v))
        if k is None:
            k = support
        if k < 0 or k > v.size:
            raise ValueError(f"sparsity budget k={k} outside [0, {v.size}]")
        if support > k:
            raise ValueError(f"signal has {support} nonzeros, exceeds declared k={k}")
        return cls(p=v.size, values=_frozen_array(v), k=k)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise regime plus its single scalar parameter (eps, lam or sigma)."""

    regime: str
    parameter: float = 0.0

    def __post_init__(self):
        if self.regime not in NOISE_REGIMES:
            raise ValueError(f"unknown noise regime {self.regime!r}")
        if self.parameter < 0:
            raise ValueError("noise parameter must be nonnegative")

    @classmethod
    def noiseless(cls) -> "NoiseSpec":
        return cls("noiseless", 0.0)

    @classmethod
    def l2_bounded(cls, eps: float) -> "NoiseSpec":
        return cls("l2_bounded", eps)

    @classmethod
    def correlation_bounded(cls, lam: float) -> "NoiseSpec":
        return cls("correlation_bounded", lam)

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseSpec":
        return cls("gaussian", sigma)


@dataclass(frozen=True, eq=False)
class Observation:
    """Realized measurement ``y = F @ beta + realized_noise``."""

    y: np.ndarray
    realized_noise: np.ndarray
    seed: int
    noise_spec: NoiseSpec


def generate_matrix(
    n: int,
    p: int,
    ensemble: str = "gaussian",
    normalize: bool = True,
    seed: int = 0,
    path: str | Path | None = None,
) -> SensingMatrix:
    """Draw (or load) a sensing matrix, deterministically per seed.

    Gaussian entries are i.i.d. with variance 1/n before the optional
    column normalization; Bernoulli entries are +-1/sqrt(n).
    """
    if n < 1 or p < 1:
        raise ValueError("need n >= 1 and p >= 1")
    if ensemble not in MATRIX_ENSEMBLES:
        raise ValueError(f"unknown ensemble {ensemble!r}")
    if ensemble == "from_file":
        if path is None:
            raise ValueError("from_file ensemble needs a path")
        mat = read_matrix_text(path)
        if mat.n != n or mat.p != p:
            raise ValueError(
                f"file holds a {mat.n}x{mat.p} matrix, expected {n}x{p}"
            )
    else:
        rng = np.random.default_rng(seed)
        if ensemble == "gaussian":
            a = rng.standard_normal((n, p)) / math.sqrt(n)
        else:
            a = (2.0 * rng.integers(0, 2, size=(n, p)) - 1.0) / math.sqrt(n)
        mat = SensingMatrix.from_entries(a)
    if normalize:
        mat = column_normalize(mat)
    return mat


def generate_signal(p: int, k: int, amplitude="unit", seed: int = 0) -> SparseSignal:
    """Draw a signal with exactly k nonzeros at distinct random positions.

    ``amplitude`` is ``"unit"``, ``("uniform", a, b)`` or ``("gaussian", s)``.
    Nonzero magnitudes are kept >= 1e-6 so exact-recovery checks stay
    numerically meaningful.
    """
    if p < 1:
        raise ValueError("need p >= 1")
    if k < 0 or k > p:
        raise ValueError(f"sparsity k={k} outside [0, {p}]")
    rng = np.random.default_rng(seed)
    values = np.zeros(p)
    if k > 0:
        positions = rng.choice(p, size=k, replace=False)
        values[positions] = _draw_amplitudes(rng, k, amplitude)
    return SparseSignal.from_values(values, k=k)


def _draw_amplitudes(rng, k, amplitude) -> np.ndarray:
    if amplitude == "unit":
        return 2.0 * rng.integers(0, 2, size=k) - 1.0
    if not isinstance(amplitude, (tuple, list)) or not amplitude:
        raise ValueError(f"bad amplitude spec {amplitude!r}")
    kind = amplitude[0]
    if kind == "uniform":
        a, b = float(amplitude[1]), float(amplitude[2])
        if not (MIN_SIGNAL_MAGNITUDE <= a <= b):
            raise ValueError("uniform amplitude needs 1e-6 <= a <= b")
        signs = 2.0 * rng.integers(0, 2, size=k) - 1.0
        return signs * rng.uniform(a, b, size=k)
    if kind == "gaussian":
        s = float(amplitude[1])
        if s <= 0:
            raise ValueError("gaussian amplitude needs sigma > 0")
        vals = rng.normal(0.0, s, size=k)
        small = np.abs(vals) < MIN_SIGNAL_MAGNITUDE
        while np.any(small):
            vals[small] = rng.normal(0.0, s, size=int(small.sum()))
            small = np.abs(vals) < MIN_SIGNAL_MAGNITUDE
        return vals
    raise ValueError(f"bad amplitude spec {amplitude!r}")


def observe(
    F: SensingMatrix, beta: SparseSignal, noise: NoiseSpec, seed: int = 0
) -> Observation:
    """Realize ``y = F @ beta + z`` with z drawn from the requested regime."""
    if F.p != beta.p:
        raise ValueError(f"dimension mismatch: matrix has p={F.p}, signal p={beta.p}")
    rng = np.random.default_rng(seed)
    a = F.entries
    n = F.n
    if noise.regime == "noiseless":
        z = np.zeros(n)
    elif noise.regime == "l2_bounded":
        z = _l2_ball_noise(rng, n, noise.parameter)
    elif noise.regime == "correlation_bounded":
        z = _correlation_bounded_noise(rng, a, noise.parameter)
    else:
        z = rng.normal(0.0, noise.parameter, size=n)
    y = a @ beta.values + z
    return Observation(
        y=_frozen_array(y),
        realized_noise=_frozen_array(z),
        seed=seed,
        noise_spec=noise,
    )


def _l2_ball_noise(rng, n, eps) -> np.ndarray:
    # Random direction scaled to rho * eps, rho uniform in [0, 1).
    g = rng.standard_normal(n)
    rho = rng.uniform()
    nrm = np.linalg.norm(g)
    if eps == 0.0 or nrm == 0.0:
        return np.zeros(n)
    z = g * (rho * eps / nrm)
    zn = np.linalg.norm(z)
    while zn > eps:  # guard against roundup past the ball boundary
        z *= 1.0 - 1e-12
        zn = np.linalg.norm(z)
    return z


def _correlation_bounded_noise(rng, a, lam) -> np.ndarray:
    # Gaussian draw scaled back until ||F^T z||_inf <= lam.
    g = rng.standard_normal(a.shape[0])
    c = np.abs(a.T @ g).max()
    if c <= lam:
        return g
    if c == 0.0:
        return g
    z = g * (lam / c)
    while np.abs(a.T @ z).max() > lam:
        z *= 1.0 - 1e-12
    return z


def best_k_term(v, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Split ``v`` into its best k-term part and the remainder.

    Keeps the k largest-magnitude entries (ties broken by lowest index),
    zeros everywhere else; the remainder is ``v - kept`` exactly.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError("expected a 1-d vector")
    if k < 0 or k > v.size:
        raise ValueError(f"k={k} outside [0, {v.size}]")
    v_max = np.zeros_like(v)
    if k > 0:
        order = np.argsort(-np.abs(v), kind="stable")
        keep = order[:k]
        v_max[keep] = v[keep]
    return v_max, v - v_max


def column_normalize(F: SensingMatrix) -> SensingMatrix:
    """Rescale every column to unit l2 norm."""
    norms = F.column_norms
    if np.any(norms == 0.0):
        bad = int(np.flatnonzero(norms == 0.0)[0])
        raise DegenerateMatrixError(f"column {bad} has zero norm")
    return SensingMatrix.from_entries(F.entries / norms)


def write_matrix_text(F: SensingMatrix, path: str | Path) -> None:
    """Write the text format: a "n p" header then n rows of p reals.

    Entries use the shortest round-trip-exact decimal representation.
    """
    lines = [f"{F.n} {F.p}"]
    for row in F.entries:
        lines.append(" ".join(repr(float(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_text(path: str | Path) -> SensingMatrix:
    """Read the text format written by :func:`write_matrix_text`."""
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise ValueError(f"{path}: empty matrix file")
    header = text[0].split()
    if len(header) != 2:
        raise ValueError(f"{path}: first line must be 'n p'")
    n, p = int(header[0]), int(header[1])
    if len(text) - 1 != n:
        raise ValueError(f"{path}: expected {n} rows, found {len(text) - 1}")
    rows = []
    for i, line in enumerate(text[1:]):
        vals = [float(tok) for tok in line.split()]
        if len(vals) != p:
            raise ValueError(f"{path}: row {i} has {len(vals)} entries, expected {p}")
        rows.append(vals)
    return SensingMatrix.from_entries(np.array(rows, dtype=float))


def write_vector_text(v, path: str | Path) -> None:
    v = np.asarray(v, dtype=float)
    Path(path).write_text("\n".join(repr(float(x)) for x in v) + "\n")


def read_vector_text(path: str | Path) -> np.ndarray:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    return np.array([float(ln) for ln in lines])
