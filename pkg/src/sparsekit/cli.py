"""Command-line interface.

Subcommands: gen-matrix, gen-signal, solve, constants, verify, experiment,
tails.  Structured results are emitted as JSON on stdout (or to --out).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, constants, harness, model, solvers
from .lp import SolverOptions


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_amplitude(text: str):
    if text == "unit":
        return "unit"
    kind, _, rest = text.partition(":")
    parts = [float(x) for x in rest.split(",") if x]
    if kind == "uniform" and len(parts) == 2:
        return ("uniform", parts[0], parts[1])
    if kind == "gaussian" and len(parts) == 1:
        return ("gaussian", parts[0])
    raise argparse.ArgumentTypeError(
        f"bad amplitude {text!r}; use unit, uniform:a,b or gaussian:s"
    )


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi or lo)


def _cmd_gen_matrix(args) -> int:
    F = model.generate_matrix(
        n=args.n,
        p=args.p,
        ensemble=args.ensemble,
        normalize=not args.no_normalize,
        seed=args.seed,
        path=args.input,
    )
    model.write_matrix_text(F, args.out)
    return 0


def _cmd_gen_signal(args) -> int:
    sig = model.generate_signal(args.p, args.k, args.amplitude, args.seed)
    model.write_vector_text(sig.values, args.out)
    return 0


def _cmd_solve(args) -> int:
    F = model.read_matrix_text(args.matrix)
    y = model.read_vector_text(args.y)
    opts = SolverOptions(
        feasibility_tol=args.tol,
        optimality_tol=args.tol,
        max_iterations=args.max_iterations,
    )
    program = args.program
    if program == "p":
        result = solvers.basis_pursuit(F, y, opts)
    elif program == "ds":
        result = solvers.dantzig_selector(F, y, args.lam, opts)
    elif program == "p1":
        result = solvers.l2_constrained_l1(F, y, args.eta, opts)
    else:
        result = solvers.lasso(F, y, args.rho, opts)
    _emit(
        {
            "program": result.program,
            "gamma_hat": [float(g) for g in result.gamma_hat],
            "l1_norm": result.l1_norm,
            "residuals": {
                "l2": result.residual_l2,
                "corr_inf": result.residual_corr_inf,
            },
            "status": result.status,
            "iterations": result.iterations,
        },
        args.out,
    )
    return 0 if result.status == "optimal" else 1


def _cmd_constants(args) -> int:
    F = model.read_matrix_text(args.matrix)
    k_lo, k_hi = args.k_range
    delta_ks = list(range(max(1, k_lo), min(k_hi, F.p) + 1))
    if args.kp_range:
        kp_lo, kp_hi = args.kp_range
        pairs = [
            (k, kp)
            for k in delta_ks
            for kp in range(max(1, kp_lo), kp_hi + 1)
            if k + kp <= F.p
        ]
    else:
        pairs = []
    variants = [v for v in (args.variants or "").split(",") if v]
    # conditions may need constants beyond the requested ranges
    need_delta = set(delta_ks)
    need_pairs = set(pairs)
    for variant in variants:
        for k in delta_ks:
            req = constants.condition_requirements(variant, k)
            need_delta.update(m for m in req["delta"] if m <= F.p)
            need_pairs.update(pr for pr in req["theta"] if pr[0] + pr[1] <= F.p)
    rip = constants.build_rip_report(
        F,
        delta_ks=sorted(need_delta),
        theta_pairs=sorted(need_pairs),
        budget=args.budget,
        mc_trials=args.mc_trials,
        seed=args.seed,
    )
    conditions = []
    for variant in variants:
        for k in delta_ks:
            try:
                rep = constants.check_condition(rip, k, variant)
            except constants.IncompleteReportError:
                continue
            conditions.append(
                {
                    "variant": rep.variant,
                    "k": rep.k,
                    "lhs": rep.lhs_value,
                    "threshold": rep.threshold,
                    "holds": rep.holds,
                    "certified": rep.exactness == "certified",
                }
            )
    _emit(
        {
            "matrix_id": rip.matrix_id,
            "delta": [
                {"k": k, "value": e.value, "exact": e.exact}
                for k, e in sorted(rip.delta.items())
            ],
            "theta": [
                {"k": k, "kp": kp, "value": e.value, "exact": e.exact}
                for (k, kp), e in sorted(rip.theta.items())
            ],
            "coherence": rip.coherence_M,
            "conditions": conditions,
        },
        args.out,
    )
    return 0


def _cmd_verify(args) -> int:
    solve_doc = json.loads(Path(args.solve).read_text())
    truth = model.SparseSignal.from_values(model.read_vector_text(args.truth), k=args.k)
    constants_doc = json.loads(Path(args.constants).read_text())
    delta = {d["k"]: (d["value"], d["exact"]) for d in constants_doc["delta"]}
    theta = {(t["k"], t["kp"]): (t["value"], t["exact"]) for t in constants_doc["theta"]}
    k = args.k
    theorem = args.theorem
    if theorem == "mip_l2":
        cset = bounds.theorem_constants(
            theorem, coherence=constants_doc["coherence"], k=k
        )
    else:
        m = constants.ceil_mult(3, 2, k)
        if m not in delta or ((k, m) not in theta and (m, k) not in theta):
            raise SystemExit(
                f"constants file lacks delta[{m}] or theta[({k},{m})] for k={k}"
            )
        dv, dex = delta[m]
        tv, tex = theta.get((k, m)) or theta[(m, k)]
        cset = bounds.theorem_constants(
            theorem, delta=dv, theta=tv, k=k, inputs_exact=dex and tex
        )
    noise = {
        "lam": args.lam,
        "eps": args.eps,
        "eta": args.eta,
        "sigma": args.sigma,
        "n": args.n,
        "p": args.p,
    }
    noise = {key: val for key, val in noise.items() if val is not None}

    class _Shim:
        gamma_hat = np.array(solve_doc["gamma_hat"], dtype=float)

    try:
        cert = bounds.certify(_Shim(), truth, theorem, cset, noise)
    except bounds.CertificateError as exc:
        raise SystemExit(f"cannot certify: {exc}")
    _emit(
        {
            "theorem": cert.theorem,
            "bound": cert.bound_value,
            "error": cert.observed_error,
            "holds": cert.holds,
            "advisory": cert.advisory,
        },
        args.out,
    )
    return 0 if cert.holds else 1


def _cmd_experiment(args) -> int:
    config = harness.load_config(args.config)
    run = harness.run_experiment(config)
    out_dir = args.out_dir or config.output or "."
    paths = harness.report(run.table, out_dir=out_dir)
    _emit({"matrix_id": run.matrix_id, "outputs": paths}, args.out)
    return 0


def _cmd_tails(args) -> int:
    if args.matrix:
        F = model.read_matrix_text(args.matrix)
    else:
        F = model.generate_matrix(args.n, args.p, seed=args.seed)
    rep = harness.validate_tails(args.n, args.p, args.sigma, F, args.trials, args.seed)
    _emit(
        {
            "n": rep.n,
            "p": rep.p,
            "sigma": rep.sigma,
            "trials": rep.trials,
            "lam_p": rep.lam_p,
            "eps_n": rep.eps_n,
            "corr": {
                "frequency": rep.freq_corr,
                "lower_bound": rep.bound_corr,
                "margin": rep.margin_corr,
                "ok": rep.corr_ok,
            },
            "l2": {
                "frequency": rep.freq_l2,
                "lower_bound": rep.bound_l2,
                "margin": rep.margin_l2,
                "ok": rep.l2_ok,
            },
        },
        args.out,
    )
    return 0 if (rep.corr_ok and rep.l2_ok) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsekit", description="Sparse-signal recovery toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gm = sub.add_parser("gen-matrix", help="generate a sensing matrix file")
    gm.add_argument("--n", type=int, required=True)
    gm.add_argument("--p", type=int, required=True)
    gm.add_argument("--ensemble", choices=model.MATRIX_ENSEMBLES, default="gaussian")
    gm.add_argument("--no-normalize", action="store_true")
    gm.add_argument("--seed", type=int, default=0)
    gm.add_argument("--input", help="source file for the from_file ensemble")
    gm.add_argument("--out", required=True)
    gm.set_defaults(func=_cmd_gen_matrix)

    gs = sub.add_parser("gen-signal", help="generate a sparse signal file")
    gs.add_argument("--p", type=int, required=True)
    gs.add_argument("--k", type=int, required=True)
    gs.add_argument("--amplitude", type=_parse_amplitude, default="unit")
    gs.add_argument("--seed", type=int, default=0)
    gs.add_argument("--out", required=True)
    gs.set_defaults(func=_cmd_gen_signal)

    sv = sub.add_parser("solve", help="run one recovery program")
    sv.add_argument("--program", choices=["p", "p1", "ds", "lasso"], required=True)
    sv.add_argument("--matrix", required=True)
    sv.add_argument("--y", required=True)
    sv.add_argument("--lambda", dest="lam", type=float, default=0.0)
    sv.add_argument("--eta", type=float, default=0.0)
    sv.add_argument("--rho", type=float, default=0.0)
    sv.add_argument("--tol", type=float, default=1e-9)
    sv.add_argument("--max-iterations", type=int, default=50_000)
    sv.add_argument("--out")
    sv.set_defaults(func=_cmd_solve)

    co = sub.add_parser("constants", help="compute isometry constants and conditions")
    co.add_argument("--matrix", required=True)
    co.add_argument("--k-range", type=_parse_range, default=(1, 2))
    co.add_argument("--kp-range", type=_parse_range, default=None)
    co.add_argument(
        "--variants", help=f"comma list from {sorted(constants.CONDITION_VARIANTS)}"
    )
    co.add_argument("--budget", type=int, default=constants.DEFAULT_BRUTE_FORCE_LIMIT)
    co.add_argument("--mc-trials", type=int, default=2000)
    co.add_argument("--seed", type=int, default=0)
    co.add_argument("--out")
    co.set_defaults(func=_cmd_constants)

    ve = sub.add_parser("verify", help="certify a solve output against a bound")
    ve.add_argument("--solve", required=True, help="JSON from the solve subcommand")
    ve.add_argument("--truth", required=True, help="true signal, one real per line")
    ve.add_argument("--constants", required=True, help="JSON from the constants subcommand")
    ve.add_argument("--theorem", choices=bounds.THEOREMS, required=True)
    ve.add_argument("--k", type=int, required=True)
    ve.add_argument("--lambda", dest="lam", type=float)
    ve.add_argument("--eps", type=float)
    ve.add_argument("--eta", type=float)
    ve.add_argument("--sigma", type=float)
    ve.add_argument("--n", type=int)
    ve.add_argument("--p", type=int)
    ve.add_argument("--out")
    ve.set_defaults(func=_cmd_verify)

    ex = sub.add_parser("experiment", help="run a config-driven sweep")
    ex.add_argument("--config", required=True)
    ex.add_argument("--out-dir")
    ex.add_argument("--out")
    ex.set_defaults(func=_cmd_experiment)

    ta = sub.add_parser("tails", help="Monte Carlo check of the Gaussian tail bounds")
    ta.add_argument("--n", type=int, required=True)
    ta.add_argument("--p", type=int, required=True)
    ta.add_argument("--sigma", type=float, default=1.0)
    ta.add_argument("--trials", type=int, default=100_000)
    ta.add_argument("--seed", type=int, default=0)
    ta.add_argument("--matrix", help="optional matrix file; generated when absent")
    ta.add_argument("--out")
    ta.set_defaults(func=_cmd_tails)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
