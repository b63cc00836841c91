"""Command-line interface: simulate, estimate, roc, rates.

Exit codes: 0 on success, 1 on a numerical or estimation failure
(reported as one JSON object on stderr), 2 on usage or configuration
errors. The output directory resolves flag > SMOOTHGM_OUTPUT_DIR > config.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, panelio
from .clime import estimate_precision, threshold_graph
from .covariance import smoothed_covariance
from .errors import ConfigError, SmoothgmError
from .experiment import (
    AUTO_BANDWIDTHS,
    OUTPUT_DIR_ENV,
    config_hash,
    load_config,
    rates_report,
    run_roc,
    run_roc_from_dir,
    run_simulate,
    validate_config,
)
from .kernels import KERNEL_FAMILIES, KernelSpec, theoretical_bandwidth_dependent, theoretical_bandwidth_iid


def _config_from_args(args) -> "ExperimentConfig":
    """Merge config file, environment, and flag overrides; validate strictly."""
    raw = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {args.config}: {err}") from err
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir:
        raw["output_dir"] = env_dir

    scalar_overrides = {
        "d": args.d, "n": args.n, "T": args.T,
        "setting": args.setting,
        "n_fix": args.n_fix, "n_grow": args.n_grow,
        "n_decay": args.n_decay, "n_ed": args.n_ed,
        "diag_boost": args.diag_boost,
        "gamma": args.gamma, "replicates": args.replicates,
        "seed": args.seed, "output_dir": args.output_dir,
        "error_lambda": args.error_lambda,
    }
    for key, value in scalar_overrides.items():
        if value is not None:
            raw[key] = value
    if args.h is not None:
        raw["h"] = args.h if args.h in AUTO_BANDWIDTHS else float(args.h)
    if args.kernel is not None or args.eta is not None:
        kernel = dict(raw.get("kernel", {}))
        if args.kernel is not None:
            kernel["family"] = args.kernel
        if args.eta is not None:
            kernel["eta"] = args.eta
        raw["kernel"] = kernel
    if args.lambda_lo is not None or args.lambda_hi is not None or args.lambda_count is not None:
        grid = dict(raw.get("lambda_grid", {"lo": 0.01, "hi": 1.0, "count": 15}))
        if args.lambda_lo is not None:
            grid["lo"] = args.lambda_lo
        if args.lambda_hi is not None:
            grid["hi"] = args.lambda_hi
        if args.lambda_count is not None:
            grid["count"] = args.lambda_count
        raw["lambda_grid"] = grid
    if args.methods is not None:
        raw["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.target_labels is not None:
        raw["target_labels"] = [float(u) for u in args.target_labels.split(",")]
    if args.normalize_weights:
        raw["normalize_weights"] = True
    if args.center:
        raw["center"] = True
    if args.permute:
        raw["permute"] = True
    for key, value in (
        ("structure", args.transition_structure),
        ("rho", args.transition_rho),
        ("target_norm", args.transition_target_norm),
    ):
        if value is not None:
            transition = dict(raw.get("transition", {}))
            transition[key] = value
            raw["transition"] = transition
    if args.transition_blocks is not None:
        transition = dict(raw.get("transition", {}))
        transition["blocks"] = [int(v) for v in args.transition_blocks.split(",")]
        raw["transition"] = transition
    return validate_config(raw)


def _add_config_flags(parser):
    parser.add_argument("--config", help="JSON experiment config; flags override its keys")
    parser.add_argument("--d", type=int)
    parser.add_argument("--n", type=int)
    parser.add_argument("--T", type=int)
    parser.add_argument("--setting", choices=["simultaneous", "sequential", "random"])
    parser.add_argument("--n-fix", type=int, dest="n_fix")
    parser.add_argument("--n-grow", type=int, dest="n_grow")
    parser.add_argument("--n-decay", type=int, dest="n_decay")
    parser.add_argument("--n-ed", type=int, dest="n_ed")
    parser.add_argument("--diag-boost", type=float, dest="diag_boost")
    parser.add_argument("--h", help="bandwidth: a number, auto-iid, or auto-dependent")
    parser.add_argument("--kernel", choices=list(KERNEL_FAMILIES))
    parser.add_argument("--eta", type=float)
    parser.add_argument("--normalize-weights", action="store_true", dest="normalize_weights")
    parser.add_argument("--center", action="store_true")
    parser.add_argument("--lambda-lo", type=float, dest="lambda_lo")
    parser.add_argument("--lambda-hi", type=float, dest="lambda_hi")
    parser.add_argument("--lambda-count", type=int, dest="lambda_count")
    parser.add_argument("--error-lambda", type=float, dest="error_lambda")
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--replicates", type=int)
    parser.add_argument("--methods", help="comma list from kse,naive")
    parser.add_argument("--target-labels", dest="target_labels", help="comma list of u0 values")
    parser.add_argument("--permute", action="store_true",
                        help="apply a seeded label permutation before estimation")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--transition-structure", dest="transition_structure",
                        choices=["diagonal", "band", "block_ar", "random_sparse", "custom"])
    parser.add_argument("--transition-rho", type=float, dest="transition_rho")
    parser.add_argument("--transition-target-norm", type=float, dest="transition_target_norm")
    parser.add_argument("--transition-blocks", dest="transition_blocks", help="comma list of block sizes")


def _cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    written = run_simulate(cfg)
    print(f"wrote {len(written)} files to {cfg.output_dir} (config_hash={config_hash(cfg)})")
    return 0


def _cmd_roc(args) -> int:
    cfg = _config_from_args(args)
    if args.panel_dir:
        written = run_roc_from_dir(cfg, args.panel_dir, figures=not args.no_figures)
    else:
        written = run_roc(cfg, workers=args.workers, figures=not args.no_figures)
    print(f"wrote {len(written)} files to {cfg.output_dir} (config_hash={config_hash(cfg)})")
    return 0


def _resolve_estimate_bandwidth(args, kernel, n, T, d) -> float:
    if args.h not in AUTO_BANDWIDTHS:
        return float(args.h)
    if args.h == "auto-iid":
        return theoretical_bandwidth_iid(n, T, d, kernel.eta)
    if None in (args.xi, args.sigma_op, args.a_op):
        raise ConfigError("h=auto-dependent requires --xi, --sigma-op, and --a-op")
    return theoretical_bandwidth_dependent(n, T, d, kernel.eta, args.xi, args.sigma_op, args.a_op)


def _cmd_estimate(args) -> int:
    kernel = KernelSpec(family=args.kernel, eta=args.eta)
    panel = panelio.read_panel(args.panel)
    # T for the bandwidth rules: the common scan count, or its mean when unequal
    T = int(round(float(np.mean([obs.shape[0] for obs in panel.observations]))))
    h = _resolve_estimate_bandwidth(args, kernel, panel.n_subjects, T, panel.dim)
    S = smoothed_covariance(panel, args.u0, h, kernel,
                            normalize=args.normalize_weights, center=args.center)
    est = estimate_precision(S.matrix, args.lam)
    graph = threshold_graph(est, args.gamma)

    out_dir = args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "."
    os.makedirs(out_dir, exist_ok=True)
    omega_path = os.path.join(out_dir, "omega.csv")
    graph_path = os.path.join(out_dir, "graph.csv")
    meta_path = os.path.join(out_dir, "estimate.json")
    panelio.write_matrix(omega_path, est.matrix)
    panelio.write_graph(graph_path, sorted(graph.edge_set()))
    panelio.write_json(meta_path, {
        "command": "estimate",
        "inputs": {
            "panel": os.path.abspath(args.panel),
            "u0": args.u0, "h": h, "h_requested": args.h,
            "kernel": kernel.family, "eta": kernel.eta,
            "lambda": args.lam, "gamma": args.gamma,
            "normalize_weights": args.normalize_weights, "center": args.center,
        },
        "tolerances": {"lp_tol": 1e-9, "feasibility_slack": 1e-8},
        "versions": {"smoothgm": __version__, "numpy": np.__version__},
        "n_subjects": panel.n_subjects, "dim": panel.dim,
        "n_edges": graph.n_edges,
    })
    print(f"wrote {omega_path}, {graph_path}, {meta_path}")
    return 0


def _cmd_rates(args) -> int:
    report = rates_report(args.n, args.T, args.d, args.eta,
                          xi=args.xi, sigma_op=args.sigma_op, a_op=args.a_op)
    for key in ("h_iid", "kappa_star", "h_dependent", "kappa"):
        if key in report:
            print(f"{key} = {report[key]:.10g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothgm",
        description="Kernel-smoothed joint estimation of label-indexed graphical models",
    )
    parser.add_argument("--version", action="version", version=f"smoothgm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="write per-replicate panel and truth files")
    _add_config_flags(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_roc = sub.add_parser("roc", help="run the ROC experiment and write report CSVs")
    _add_config_flags(p_roc)
    p_roc.add_argument("--workers", type=int, default=1, help="parallel replicate workers")
    p_roc.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p_roc.add_argument("--panel-dir", dest="panel_dir",
                       help="reuse panels written by simulate (hash-checked)")
    p_roc.set_defaults(func=_cmd_roc)

    p_est = sub.add_parser("estimate", help="estimate precision and graph from a panel CSV")
    p_est.add_argument("--panel", required=True, help="panel CSV path")
    p_est.add_argument("--u0", type=float, required=True, help="target label in [0,1]")
    p_est.add_argument("--h", required=True, help="bandwidth: number, auto-iid, or auto-dependent")
    p_est.add_argument("--kernel", default="epanechnikov", choices=list(KERNEL_FAMILIES))
    p_est.add_argument("--eta", type=float, default=2.0)
    p_est.add_argument("--lambda", type=float, required=True, dest="lam")
    p_est.add_argument("--gamma", type=float, default=1e-5)
    p_est.add_argument("--normalize-weights", action="store_true", dest="normalize_weights")
    p_est.add_argument("--center", action="store_true")
    p_est.add_argument("--xi", type=float, help="for h=auto-dependent")
    p_est.add_argument("--sigma-op", type=float, dest="sigma_op", help="for h=auto-dependent")
    p_est.add_argument("--a-op", type=float, dest="a_op", help="for h=auto-dependent")
    p_est.add_argument("--output-dir", dest="output_dir")
    p_est.set_defaults(func=_cmd_estimate)

    p_rates = sub.add_parser("rates", help="print theoretical bandwidths and rates")
    p_rates.add_argument("--n", type=int, required=True)
    p_rates.add_argument("--T", type=int, required=True)
    p_rates.add_argument("--d", type=int, required=True)
    p_rates.add_argument("--eta", type=float, default=2.0)
    p_rates.add_argument("--xi", type=float)
    p_rates.add_argument("--sigma-op", type=float, dest="sigma_op")
    p_rates.add_argument("--a-op", type=float, dest="a_op")
    p_rates.set_defaults(func=_cmd_rates)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        json.dump({"error": type(err).__name__, "message": str(err)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (SmoothgmError, ValueError) as err:
        json.dump({"error": type(err).__name__, "message": str(err)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
