"""Command-line interface.

Subcommands: train, certify, prox-eval, support-vectors, counterexample,
gen-data.  Every command prints a JSON report to stdout; reports contain no
timestamps and use sorted keys, so identical inputs and seeds produce
byte-identical output.

Exit codes: 0 success; 2 input or parse error; 3 numerical failure
(diverged solve or factorization failure); 4 when ``--expect p-stationary``
was passed and the final verdict is anything else.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .certify import (
    DEFAULT_TOL,
    Certificate,
    KKTCheck,
    PrimalDualPoint,
    Verdict,
    check_kkt,
    check_pstationary,
    default_gamma_grid,
    estimate_multiplier,
)
from .datasets import (
    COUNTEREXAMPLE_C,
    DataFormat,
    DataFormatError,
    counterexample_dataset,
    counterexample_point,
    gen_synthetic,
    parse_dataset,
    write_csv,
)
from .losses import objective
from .problem import ProblemData, build_problem
from .prox import ProxParams, prox_scalar, prox_vector
from .solver import SolveResult, SolveStatus, SolverConfig, train_admm
from .support import DEFAULT_SV_TOL, extract_support, verify_support_margins

__all__ = ["main", "build_parser"]

COUNTEREXAMPLE_GAMMAS = (0.4, 4.0, 8.0, 16.0)


# --- serialization helpers --------------------------------------------------


def _floats(arr) -> list[float]:
    return [float(v) for v in np.asarray(arr).ravel()]


def _cert_dict(cert: Certificate) -> dict:
    return {
        "r_grad": cert.r_grad,
        "r_y": cert.r_y,
        "r_feas": cert.r_feas,
        "r_prox": cert.r_prox,
        "gamma": cert.gamma,
        "verdict": cert.verdict.value,
    }


def _kkt_dict(chk: KKTCheck) -> dict:
    return {
        "passed": chk.passed,
        "r_grad": chk.r_grad,
        "r_y": chk.r_y,
        "r_feas": chk.r_feas,
        "r_multiplier": chk.r_multiplier,
    }


def _point_dict(point: PrimalDualPoint) -> dict:
    return {
        "w": _floats(point.w),
        "b": point.b,
        "u": _floats(point.u),
        "lambda": _floats(point.lam),
    }


def _result_dict(res: SolveResult) -> dict:
    return {
        "status": res.status.value,
        "iterations": res.iterations,
        "objective": res.objective,
        "point": _point_dict(res.point),
        "certificate": _cert_dict(res.certificate),
        "diagnostics": res.diagnostics,
    }


def _problem_dict(problem: ProblemData) -> dict:
    return {
        "m": problem.m,
        "n": problem.n,
        "full_column_rank": problem.full_column_rank,
        "lambda_h": problem.lambda_h,
    }


def _versions() -> dict:
    return {
        "rampsvm": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _digest(file_path=None, **params) -> str:
    """Hex digest of the input file bytes (if any) plus the parameters."""
    h = hashlib.sha256()
    if file_path is not None:
        h.update(Path(file_path).read_bytes())
    h.update(json.dumps(params, sort_keys=True).encode())
    return h.hexdigest()


def _emit(report: dict, out=None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if out is not None:
        Path(out).write_text(text)


def _expect_exit(args, verdict: Verdict) -> int:
    if getattr(args, "expect", None) == "p-stationary":
        if verdict is not Verdict.P_STATIONARY:
            return 4
    return 0


# --- subcommand handlers -----------------------------------------------------


def cmd_train(args) -> int:
    dataset = parse_dataset(args.data, DataFormat(args.format))
    problem = build_problem(dataset)
    config = SolverConfig(
        C=args.C,
        sigma=args.sigma,
        tol=args.tol,
        max_iter=args.max_iter,
        seed=args.seed,
    )
    res = train_admm(problem, config)
    report = {
        "command": "train",
        "inputs_digest": _digest(
            args.data,
            C=config.C,
            sigma=config.sigma,
            tol=config.tol,
            max_iter=config.max_iter,
            seed=config.seed,
        ),
        "problem": _problem_dict(problem),
        "params": {
            "C": config.C,
            "sigma": config.sigma,
            "gamma": config.gamma,
            "tol": config.tol,
            "max_iter": config.max_iter,
        },
        "result": _result_dict(res),
        "seed": config.seed,
        "versions": _versions(),
    }
    _emit(report, args.out)
    if res.status is SolveStatus.DIVERGED:
        return 3
    return _expect_exit(args, res.certificate.verdict)


def cmd_certify(args) -> int:
    dataset = parse_dataset(args.data, DataFormat.CSV)
    problem = build_problem(dataset)
    w = np.asarray(args.w, dtype=float)
    if w.shape != (problem.n,):
        raise ValueError(
            f"--w has {w.size} entries, dataset has {problem.n} features"
        )
    C = args.C
    gammas = args.gammas if args.gammas else default_gamma_grid(problem, C)
    u = 1.0 - problem.A @ w - args.b * problem.y
    mult_residual = None
    if args.lam is not None:
        lam = np.asarray(args.lam, dtype=float)
        if lam.shape != (problem.m,):
            raise ValueError(
                f"--lambda has {lam.size} entries, dataset has {problem.m} samples"
            )
    else:
        lam, mult_residual = estimate_multiplier(w, problem)
    point = PrimalDualPoint(w=w, b=args.b, u=u, lam=lam)
    certs = [
        check_pstationary(point, problem, C, gamma, DEFAULT_TOL)
        for gamma in gammas
    ]
    kkt = check_kkt(point, problem, C, DEFAULT_TOL)
    passing = [c for c in certs if c.verdict is Verdict.P_STATIONARY]
    if passing:
        verdict = Verdict.P_STATIONARY
    elif kkt.passed:
        verdict = Verdict.KKT_ONLY
    else:
        verdict = Verdict.NEITHER
    report = {
        "command": "certify",
        "inputs_digest": _digest(
            args.data,
            w=_floats(w),
            b=args.b,
            C=C,
            gammas=list(gammas),
            lam=None if args.lam is None else _floats(args.lam),
        ),
        "problem": _problem_dict(problem),
        "params": {"C": C, "gammas": list(gammas), "tol": DEFAULT_TOL},
        "result": {
            "verdict": verdict.value,
            "stationarity": [_cert_dict(c) for c in certs],
            "kkt": _kkt_dict(kkt),
            "point": _point_dict(point),
            "multiplier_residual": mult_residual,
        },
        "seed": None,
        "versions": _versions(),
    }
    _emit(report)
    return _expect_exit(args, verdict)


def cmd_prox_eval(args) -> int:
    params = ProxParams(args.gamma, args.C)
    sets = prox_vector(args.s, params)
    report = {
        "command": "prox-eval",
        "inputs_digest": _digest(s=list(args.s), gamma=args.gamma, C=args.C),
        "params": {"gamma": args.gamma, "C": args.C, "gammaC": params.gammaC},
        "result": [
            {"s": float(s), "values": list(p.values), "tie": p.tie}
            for s, p in zip(args.s, sets)
        ],
        "seed": None,
        "versions": _versions(),
    }
    _emit(report)
    return 0


def cmd_support_vectors(args) -> int:
    dataset = parse_dataset(args.data, DataFormat.CSV)
    problem = build_problem(dataset)
    config = SolverConfig(C=args.C, sigma=args.sigma)
    res = train_admm(problem, config)
    gamma = config.gamma
    verdict = res.certificate.verdict
    # Multipliers below the solver tolerance are numerically zero; keep the
    # support cutoff at or above it so iterate noise never becomes a vector.
    sv_tol = max(DEFAULT_SV_TOL, config.tol)
    support = extract_support(res.point, problem, sv_tol, source_verdict=verdict)
    margin_check = None
    if res.status is SolveStatus.DIVERGED:
        skipped = "solver diverged"
    elif gamma * args.C < 2.0:
        skipped = f"gamma*C = {gamma * args.C} < 2, margin geometry not applicable"
    elif verdict is not Verdict.P_STATIONARY:
        skipped = f"point not certified p-stationary (verdict {verdict.value})"
    else:
        holds, deviation = verify_support_margins(
            res.point, problem, args.C, gamma, sv_tol=sv_tol
        )
        margin_check = {"holds": holds, "max_deviation": deviation}
        skipped = None
    report = {
        "command": "support-vectors",
        "inputs_digest": _digest(args.data, C=args.C, sigma=args.sigma),
        "problem": _problem_dict(problem),
        "params": {"C": args.C, "sigma": args.sigma, "gamma": gamma},
        "result": {
            "train_status": res.status.value,
            "iterations": res.iterations,
            "objective": res.objective,
            "certificate": _cert_dict(res.certificate),
            "support": {
                "indices": list(support.indices),
                "lambdas": _floats(support.lambdas),
                "margins": _floats(support.margins),
                "source_verdict": verdict.value,
            },
            "margin_check": margin_check,
            "margin_check_skipped": skipped,
        },
        "seed": config.seed,
        "versions": _versions(),
    }
    _emit(report)
    if res.status is SolveStatus.DIVERGED:
        return 3
    return 0


def cmd_counterexample(args) -> int:
    gammas = args.gammas if args.gammas else list(COUNTEREXAMPLE_GAMMAS)
    dataset = counterexample_dataset()
    problem = build_problem(dataset)
    point = counterexample_point()
    C = COUNTEREXAMPLE_C
    kkt = check_kkt(point, problem, C, DEFAULT_TOL)
    stationarity = []
    for gamma in gammas:
        cert = check_pstationary(point, problem, C, gamma, DEFAULT_TOL)
        params = ProxParams(gamma, C)
        s = point.u - gamma * point.lam
        dists = [
            prox_scalar(float(si), params).distance(float(ui))
            for si, ui in zip(s, point.u)
        ]
        entry = _cert_dict(cert)
        entry["prox_distances"] = dists
        stationarity.append(entry)
    if any(c["verdict"] == Verdict.P_STATIONARY.value for c in stationarity):
        verdict = Verdict.P_STATIONARY
    elif kkt.passed:
        verdict = Verdict.KKT_ONLY
    else:
        verdict = Verdict.NEITHER
    report = {
        "command": "counterexample",
        "inputs_digest": _digest(gammas=list(gammas)),
        "problem": _problem_dict(problem),
        "params": {"C": C, "gammas": list(gammas), "tol": DEFAULT_TOL},
        "result": {
            "verdict": verdict.value,
            "kkt": _kkt_dict(kkt),
            "stationarity": stationarity,
            "point": _point_dict(point),
            "objective": objective(point.w, point.b, dataset, C),
        },
        "seed": None,
        "versions": _versions(),
    }
    _emit(report)
    return 0


def cmd_gen_data(args) -> int:
    dataset = gen_synthetic(args.n, args.sep, args.outliers, args.seed)
    write_csv(dataset, args.out)
    report = {
        "command": "gen-data",
        "inputs_digest": _digest(
            n=args.n, sep=args.sep, outliers=args.outliers, seed=args.seed
        ),
        "result": {
            "out": str(args.out),
            "m": dataset.m,
            "n": dataset.n,
            "csv_sha256": hashlib.sha256(
                Path(args.out).read_bytes()
            ).hexdigest(),
        },
        "seed": args.seed,
        "versions": _versions(),
    }
    _emit(report)
    return 0


# --- parser ------------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        items = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from None
    if not items:
        raise argparse.ArgumentTypeError("empty list")
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rampsvm",
        description="Ramp-loss SVM: train, certify stationarity, inspect "
        "the prox, and verify support-vector margin geometry.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("train", help="train on a dataset and certify the result")
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--format", choices=["csv", "libsvm"], default="csv")
    p.add_argument("--C", type=float, required=True, help="loss penalty")
    p.add_argument(
        "--sigma",
        type=float,
        default=None,
        help="penalty parameter; default C/2 (prox step gamma = 1/sigma)",
    )
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="also write the report here")
    p.add_argument("--expect", choices=["p-stationary"], default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("certify", help="grade a candidate (w, b) on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--w", type=_float_list, required=True, help="comma-separated")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--gammas", type=_float_list, default=None)
    p.add_argument("--lambda", dest="lam", type=_float_list, default=None)
    p.add_argument("--expect", choices=["p-stationary"], default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("prox-eval", help="evaluate the ramp prox componentwise")
    p.add_argument("--s", type=_float_list, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.set_defaults(func=cmd_prox_eval)

    p = sub.add_parser(
        "support-vectors",
        help="train, extract support vectors, check margin geometry",
    )
    p.add_argument("--data", required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.set_defaults(func=cmd_support_vectors)

    p = sub.add_parser(
        "counterexample",
        help="run the embedded KKT-but-not-P-stationary fixture",
    )
    p.add_argument("--gammas", type=_float_list, default=None)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("gen-data", help="generate a synthetic CSV dataset")
    p.add_argument("--n", type=int, required=True, help="samples per class")
    p.add_argument("--sep", type=float, required=True)
    p.add_argument("--outliers", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
