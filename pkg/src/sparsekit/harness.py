"""Experiment harness: generate, observe, solve, certify, aggregate.

A single JSON config drives a sweep over (sparsity, noise regime, program)
cells.  Per-trial seeds are derived from the base seed and the (cell,
trial) coordinates through a fixed mixing function, so results do not
depend on execution order and identical configs reproduce byte-identical
outputs.  The environment variable ``SPARSEKIT_SEED`` overrides the
config seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import bounds, constants, model, solvers

SEED_ENV_VAR = "SPARSEKIT_SEED"
EXACT_RECOVERY_TOL = 1e-6
CSV_COLUMNS = [
    "k",
    "regime",
    "program",
    "trials",
    "successes",
    "success_rate",
    "mean_error",
    "max_error",
    "cert_pass_rate",
]

_PROGRAM_ALIASES = {
    "p": solvers.PROGRAM_P,
    "p1": solvers.PROGRAM_P1,
    "ds": solvers.PROGRAM_DS,
    "lasso": solvers.PROGRAM_LASSO,
}

# Which bound applies to which (program, regime) pairing.
_CERT_MAP = {
    (solvers.PROGRAM_P, "noiseless"): ("noiseless",),
    (solvers.PROGRAM_DS, "correlation_bounded"): ("ds_bounded",),
    (solvers.PROGRAM_P1, "l2_bounded"): ("l2_bounded", "mip_l2"),
    (solvers.PROGRAM_DS, "gaussian"): ("ds_gaussian",),
    (solvers.PROGRAM_P1, "gaussian"): ("l2_gaussian",),
}


def derive_seed(base: int, *key: int) -> int:
    """Fixed mixing of the base seed with integer coordinates."""
    ss = np.random.SeedSequence(entropy=int(base), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class MatrixSpec:
    n: int
    p: int
    ensemble: str = "gaussian"
    normalize: bool = True
    path: str | None = None


@dataclass(frozen=True)
class SignalSpec:
    k_values: tuple
    amplitude: object = "unit"


@dataclass(frozen=True)
class ProgramSpec:
    name: str  # canonical: P | P1 | DS | Lasso
    param: float | None = None  # None -> per-regime auto rule


@dataclass(frozen=True)
class ExperimentConfig:
    matrix: MatrixSpec
    signal: SignalSpec
    noise: tuple
    programs: tuple
    trials: int
    seed: int
    theorems: tuple = ()
    output: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for k in self.signal.k_values:
            if not 0 <= k <= self.matrix.p:
                raise ValueError(f"k={k} outside [0, p={self.matrix.p}]")
        for t in self.theorems:
            if t not in bounds.THEOREMS:
                raise ValueError(f"unknown theorem id {t!r}")


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Build a config from the JSON document format (see README)."""
    m = doc["matrix"]
    matrix = MatrixSpec(
        n=int(m["n"]),
        p=int(m["p"]),
        ensemble=m.get("ensemble", "gaussian"),
        normalize=bool(m.get("normalize", True)),
        path=m.get("path"),
    )
    s = doc["signal"]
    kspec = s["k"]
    if isinstance(kspec, dict):
        k_values = tuple(range(int(kspec["min"]), int(kspec["max"]) + 1))
    else:
        k_values = tuple(int(k) for k in kspec)
    amplitude = s.get("amplitude", "unit")
    if isinstance(amplitude, list):
        amplitude = tuple(amplitude)
    noise = []
    for item in doc["noise"]:
        noise.append(model.NoiseSpec(item["regime"], float(item.get("parameter", 0.0))))
    programs = []
    for item in doc["programs"]:
        if isinstance(item, str):
            programs.append(ProgramSpec(_canonical_program(item)))
        else:
            programs.append(
                ProgramSpec(_canonical_program(item["name"]), item.get("param"))
            )
    seed = int(doc["seed"])
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        seed = int(env)
    return ExperimentConfig(
        matrix=matrix,
        signal=SignalSpec(k_values, amplitude),
        noise=tuple(noise),
        programs=tuple(programs),
        trials=int(doc["trials"]),
        seed=seed,
        theorems=tuple(doc.get("theorems", ())),
        output=doc.get("output"),
    )


def load_config(path) -> ExperimentConfig:
    return config_from_dict(json.loads(Path(path).read_text()))


def _canonical_program(name: str) -> str:
    key = name.lower()
    if key not in _PROGRAM_ALIASES:
        raise ValueError(f"unknown program {name!r}")
    return _PROGRAM_ALIASES[key]


@dataclass
class TrialRecord:
    k: int
    regime: str
    program: str
    trial: int
    signal_seed: int
    noise_seed: int
    observed_error: float
    l1_truth: float
    l1_estimate: float
    certificates: dict
    solver_status: str
    wall_time: float


@dataclass(frozen=True)
class CellResult:
    k: int
    regime: str
    program: str
    trials: int
    successes: int
    success_rate: float
    mean_error: float | None
    max_error: float | None
    cert_pass_rate: float | None


@dataclass(frozen=True)
class ResultsTable:
    cells: tuple

    def to_dict(self) -> dict:
        return {"cells": [asdict(c) for c in self.cells]}

    @classmethod
    def from_dict(cls, doc: dict) -> "ResultsTable":
        return cls(cells=tuple(CellResult(**c) for c in doc["cells"]))


@dataclass
class ExperimentRun:
    table: ResultsTable
    trial_records: list
    matrix_id: str
    config: ExperimentConfig


def _auto_param(program: str, noise: model.NoiseSpec, n: int, p: int) -> float | None:
    """Default constraint level for a program under a noise regime."""
    if program == solvers.PROGRAM_P:
        return None
    if noise.regime == "noiseless":
        base = 0.0
    elif noise.regime == "gaussian":
        lam_p, eps_n = solvers.gaussian_thresholds(noise.parameter, n, p)
        base = eps_n if program == solvers.PROGRAM_P1 else lam_p
    else:
        base = noise.parameter
    if program == solvers.PROGRAM_LASSO:
        return 2.0 * base
    return base


def _solve(program: str, F, y, param, opts=None):
    if program == solvers.PROGRAM_P:
        return solvers.basis_pursuit(F, y, opts)
    if program == solvers.PROGRAM_DS:
        return solvers.dantzig_selector(F, y, param, opts)
    if program == solvers.PROGRAM_P1:
        return solvers.l2_constrained_l1(F, y, param, opts)
    return solvers.lasso(F, y, param, opts)


def _constant_sets(config, F, report):
    """Pre-evaluate theorem constants for every (theorem, k) pair."""
    out = {}
    for theorem in config.theorems:
        for k in config.signal.k_values:
            if k < 1:
                continue
            if theorem == "mip_l2":
                if report.coherence_M is None:
                    continue
                cs = bounds.theorem_constants(
                    theorem, coherence=report.coherence_M, k=k
                )
            else:
                m = constants.ceil_mult(3, 2, k)
                d = report.delta.get(m)
                th = report.theta_entry(k, m)
                if d is None or th is None:
                    continue
                cs = bounds.theorem_constants(
                    theorem,
                    delta=d.value,
                    theta=th.value,
                    k=k,
                    inputs_exact=d.exact and th.exact,
                )
            out[(theorem, k)] = cs
    return out


def _tail_event_ok(theorem, obs, F, n, p):
    """Gaussian-regime bounds are conditional on the noise tail event."""
    sigma = obs.noise_spec.parameter
    lam_p, eps_n = solvers.gaussian_thresholds(sigma, n, p)
    if theorem == "ds_gaussian":
        return bool(np.abs(F.entries.T @ obs.realized_noise).max() <= lam_p)
    return bool(np.linalg.norm(obs.realized_noise) <= eps_n)


def _certify_trial(F, obs, beta, result, cset, theorem, param):
    n, p = F.n, F.p
    regime = obs.noise_spec.regime
    if not cset.condition_ok:
        return "skipped:condition_failed"
    if regime == "gaussian" and not _tail_event_ok(theorem, obs, F, n, p):
        return "skipped:tail_event_missed"
    noise_params = {}
    if theorem == "ds_bounded":
        # the bound presumes the noise meets the program's own level
        if np.abs(F.entries.T @ obs.realized_noise).max() > param:
            return "skipped:noise_exceeds_level"
        noise_params["lam"] = param
    elif theorem in ("l2_bounded", "mip_l2"):
        noise_params["eta"] = param
        noise_params["eps"] = obs.noise_spec.parameter
    elif theorem == "ds_gaussian":
        noise_params["sigma"] = obs.noise_spec.parameter
        noise_params["p"] = p
    elif theorem == "l2_gaussian":
        noise_params["sigma"] = obs.noise_spec.parameter
        noise_params["n"] = n
    try:
        cert = bounds.certify(result, beta, theorem, cset, noise_params)
    except bounds.CertificateError as exc:
        return f"skipped:{exc}"
    return "pass" if cert.holds else "fail"


def run_experiment(config: ExperimentConfig) -> ExperimentRun:
    """Run the full sweep; deterministic given the config (incl. seed).

    Per-trial failures are recorded, never raised, so one bad cell cannot
    abort a sweep.
    """
    mspec = config.matrix
    F = model.generate_matrix(
        n=mspec.n,
        p=mspec.p,
        ensemble=mspec.ensemble,
        normalize=mspec.normalize,
        seed=derive_seed(config.seed, 0),
        path=mspec.path,
    )
    report_needed_deltas = set()
    report_needed_pairs = set()
    for theorem in config.theorems:
        if theorem == "mip_l2":
            continue
        for k in config.signal.k_values:
            if k >= 1:
                m = constants.ceil_mult(3, 2, k)
                if m <= F.p and k + m <= F.p:
                    report_needed_deltas.add(m)
                    report_needed_pairs.add((k, m))
    rip = constants.build_rip_report(
        F,
        delta_ks=sorted(report_needed_deltas),
        theta_pairs=sorted(report_needed_pairs),
        seed=derive_seed(config.seed, 3),
    )
    csets = _constant_sets(config, F, rip)

    cells = []
    records = []
    cell_index = 0
    for k in config.signal.k_values:
        for noise in config.noise:
            for prog in config.programs:
                cell = _run_cell(config, F, rip, csets, k, noise, prog, cell_index)
                cells.append(cell[0])
                records.extend(cell[1])
                cell_index += 1
    return ExperimentRun(
        table=ResultsTable(cells=tuple(cells)),
        trial_records=records,
        matrix_id=rip.matrix_id,
        config=config,
    )


def _run_cell(config, F, rip, csets, k, noise, prog, cell_index):
    errors = []
    successes = 0
    cert_pass = 0
    cert_total = 0
    records = []
    for trial in range(config.trials):
        sig_seed = derive_seed(config.seed, 1, cell_index, trial)
        noise_seed = derive_seed(config.seed, 2, cell_index, trial)
        start = time.perf_counter()
        certs = {}
        try:
            param = prog.param
            if param is None:
                param = _auto_param(prog.name, noise, F.n, F.p)
            beta = model.generate_signal(F.p, k, config.signal.amplitude, sig_seed)
            obs = model.observe(F, beta, noise, noise_seed)
            result = _solve(prog.name, F, obs.y, param)
            err = float(np.linalg.norm(result.gamma_hat - beta.values))
            status = result.status
            for theorem in _CERT_MAP.get((prog.name, noise.regime), ()):
                if theorem not in config.theorems:
                    continue
                cset = csets.get((theorem, k))
                if cset is None:
                    certs[theorem] = "skipped:constants_unavailable"
                    continue
                verdict = _certify_trial(F, obs, beta, result, cset, theorem, param)
                certs[theorem] = verdict
                if verdict in ("pass", "fail"):
                    cert_total += 1
                    cert_pass += verdict == "pass"
            l1_truth = float(np.abs(beta.values).sum())
            l1_est = result.l1_norm
        except Exception as exc:  # recorded, never aborts the sweep
            err = math.nan
            status = f"error:{type(exc).__name__}"
            l1_truth = math.nan
            l1_est = math.nan
        wall = time.perf_counter() - start
        ok = status == "optimal" and err <= EXACT_RECOVERY_TOL
        successes += ok
        if not math.isnan(err):
            errors.append(err)
        records.append(
            TrialRecord(
                k=k,
                regime=noise.regime,
                program=prog.name,
                trial=trial,
                signal_seed=sig_seed,
                noise_seed=noise_seed,
                observed_error=err,
                l1_truth=l1_truth,
                l1_estimate=l1_est,
                certificates=certs,
                solver_status=status,
                wall_time=wall,
            )
        )
    cell = CellResult(
        k=k,
        regime=noise.regime,
        program=prog.name,
        trials=config.trials,
        successes=successes,
        success_rate=successes / config.trials,
        mean_error=(sum(errors) / len(errors)) if errors else None,
        max_error=max(errors) if errors else None,
        cert_pass_rate=(cert_pass / cert_total) if cert_total else None,
    )
    return cell, records


@dataclass(frozen=True)
class TailReport:
    """Empirical Gaussian tail frequencies next to their lower bounds."""

    n: int
    p: int
    sigma: float
    trials: int
    lam_p: float
    eps_n: float
    freq_corr: float
    freq_l2: float
    bound_corr: float
    bound_l2: float
    margin_corr: float
    margin_l2: float

    @property
    def corr_ok(self) -> bool:
        return self.freq_corr >= self.bound_corr - self.margin_corr

    @property
    def l2_ok(self) -> bool:
        return self.freq_l2 >= self.bound_l2 - self.margin_l2


def validate_tails(
    n: int, p: int, sigma: float, F: model.SensingMatrix, trials: int, seed: int = 0
) -> TailReport:
    """Monte Carlo check of the two Gaussian noise tail bounds.

    Draws ``trials`` noise vectors and reports how often the correlation
    and l2 events hold, next to the analytic lower bounds
    1 - 1/(2 sqrt(pi log p)) and 1 - 1/n with a 3-standard-error margin.
    """
    if n < 2 or p < 2:
        raise ValueError("need n >= 2 and p >= 2")
    if trials < 1000:
        raise ValueError("need trials >= 1000 for a meaningful frequency")
    if F.n != n or F.p != p:
        raise ValueError(f"matrix is {F.n}x{F.p}, expected {n}x{p}")
    if not F.unit_columns:
        raise ValueError("tail validation needs unit-norm columns")
    lam_p, eps_n = solvers.gaussian_thresholds(sigma, n, p)
    rng = np.random.default_rng(seed)
    a = F.entries
    hit_corr = 0
    hit_l2 = 0
    chunk = max(1, min(trials, 4096))
    done = 0
    while done < trials:
        take = min(chunk, trials - done)
        z = rng.normal(0.0, sigma, size=(take, n)) if sigma > 0 else np.zeros((take, n))
        hit_l2 += int(np.count_nonzero(np.linalg.norm(z, axis=1) <= eps_n))
        hit_corr += int(np.count_nonzero(np.abs(z @ a).max(axis=1) <= lam_p))
        done += take
    bound_corr = 1.0 - 1.0 / (2.0 * math.sqrt(math.pi * math.log(p)))
    bound_l2 = 1.0 - 1.0 / n
    return TailReport(
        n=n,
        p=p,
        sigma=sigma,
        trials=trials,
        lam_p=lam_p,
        eps_n=eps_n,
        freq_corr=hit_corr / trials,
        freq_l2=hit_l2 / trials,
        bound_corr=bound_corr,
        bound_l2=bound_l2,
        margin_corr=3.0 * math.sqrt(bound_corr * (1.0 - bound_corr) / trials),
        margin_l2=3.0 * math.sqrt(bound_l2 * (1.0 - bound_l2) / trials),
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_csv_text(table: ResultsTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for c in table.cells:
        writer.writerow([_fmt(getattr(c, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def plotdata_dict(table: ResultsTable) -> dict:
    """Success-rate-vs-k series per (regime, program), for external plotting."""
    series = {}
    for c in table.cells:
        series.setdefault((c.regime, c.program), []).append((c.k, c.success_rate))
    out = []
    for (regime, program), pts in sorted(series.items()):
        pts.sort()
        out.append(
            {
                "regime": regime,
                "program": program,
                "k": [k for k, _ in pts],
                "success_rate": [r for _, r in pts],
            }
        )
    return {"series": out}


def report(table: ResultsTable, formats=("csv", "json", "plotdata"), out_dir=".") -> dict:
    """Persist the aggregate table; returns {format: path}."""
    if not table.cells:
        raise ValueError("results non-empty: nothing to report")
    out = {}
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    for fmt in formats:
        if fmt == "csv":
            path = base / "results.csv"
            _write_text(path, results_csv_text(table))
        elif fmt == "json":
            path = base / "results.json"
            _write_text(path, json.dumps(table.to_dict(), indent=2, sort_keys=True) + "\n")
        elif fmt == "plotdata":
            path = base / "plotdata.json"
            _write_text(path, json.dumps(plotdata_dict(table), indent=2, sort_keys=True) + "\n")
        else:
            raise ValueError(f"unknown report format {fmt!r}")
        out[fmt] = str(path)
    return out


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc
