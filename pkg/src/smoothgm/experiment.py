"""Experiment configuration and the deterministic simulate/roc pipelines.

A single integer seed drives every random choice through documented
``numpy.random.SeedSequence`` spawn keys:

    (0, r)  precision-path draw for replicate r
    (1, r)  panel sampling for replicate r (one child stream per subject)
    (2,)    transition-matrix draw (one matrix per config)
    (3,)    label permutation (one permutation per config)

Replicates are therefore independent of execution order and worker count,
and identical seeds give byte-identical outputs.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import panelio
from .clime import GraphEstimate, Infeasible, estimate_precision, lambda_grid
from .covariance import smoothed_covariance
from .errors import ConfigError
from .evaluate import (
    ExperimentReport,
    RateParams,
    auc,
    estimation_errors,
    kappa,
    kappa_star,
    naive_covariance,
    roc_curve,
)
from .kernels import (
    KernelSpec,
    theoretical_bandwidth_dependent,
    theoretical_bandwidth_iid,
)
from .matstat import build_transition, invert_spd, matrix_norms
from .simulate import (
    SimConfig,
    equispaced_labels,
    path_random,
    path_sequential,
    path_simultaneous,
    permute_labels,
    sample_panel,
)

AUTO_BANDWIDTHS = ("auto-iid", "auto-dependent")
OUTPUT_DIR_ENV = "SMOOTHGM_OUTPUT_DIR"


@dataclass(frozen=True)
class TransitionSpec:
    structure: str = "diagonal"
    rho: float = 0.0
    blocks: tuple | None = None
    target_norm: float | None = None
    scale: float | None = None
    matrix: tuple | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    n: int
    T: int
    setting: str = "simultaneous"
    n_fix: int = 0
    n_grow: int = 0
    n_decay: int = 0
    n_ed: int = 0
    strength_range: tuple = (-0.3, -0.1)
    diag_boost: float = 0.25
    transition: TransitionSpec = field(default_factory=TransitionSpec)
    target_labels: tuple = (0.0,)
    h: float | str = 0.5
    kernel: KernelSpec = field(default_factory=KernelSpec)
    normalize_weights: bool = False
    center: bool = False
    lambda_grid: tuple = (0.01, 1.0, 15)
    error_lambda: float | None = None
    gamma: float = 1e-5
    replicates: int = 20
    methods: tuple = ("kse", "naive")
    permute: bool | tuple = False
    rate_params: tuple | None = None  # (xi, sigma_op, a_op)
    seed: int = 0
    output_dir: str = "smoothgm_out"

    def sim_config(self) -> SimConfig:
        return SimConfig(
            d=self.d, n=self.n, T=self.T,
            n_fix=self.n_fix, n_grow=self.n_grow,
            n_decay=self.n_decay, n_ed=self.n_ed,
            strength_range=self.strength_range,
            diag_boost=self.diag_boost, seed=self.seed,
        )

    def grid(self) -> np.ndarray:
        lo, hi, count = self.lambda_grid
        return lambda_grid(lo, hi, count)

    def resolved_error_lambda(self) -> float:
        if self.error_lambda is not None:
            return float(self.error_lambda)
        grid = self.grid()
        return float(grid[grid.size // 2])


_SCHEMA = {
    "d": int, "n": int, "T": int,
    "setting": str,
    "n_fix": int, "n_grow": int, "n_decay": int, "n_ed": int,
    "strength_range": list, "diag_boost": (int, float),
    "transition": dict, "target_labels": list,
    "h": (int, float, str), "kernel": dict,
    "normalize_weights": bool, "center": bool,
    "lambda_grid": dict, "error_lambda": (int, float, type(None)),
    "gamma": (int, float), "replicates": int,
    "methods": list, "permute": (bool, list),
    "rate_params": (dict, type(None)),
    "seed": int, "output_dir": str,
}
_TRANSITION_KEYS = {"structure", "rho", "blocks", "target_norm", "scale", "matrix"}
_KERNEL_KEYS = {"family", "eta"}
_GRID_KEYS = {"lo", "hi", "count"}
_RATE_KEYS = {"xi", "sigma_op", "a_op"}


def validate_config(raw: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from a raw dict, rejecting unknown keys."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - set(_SCHEMA)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("d", "n", "T"):
        if key not in raw:
            raise ConfigError(f"missing required config key {key!r}")
    for key, expected in _SCHEMA.items():
        if key in raw and not isinstance(raw[key], expected):
            raise ConfigError(f"config key {key!r} has wrong type {type(raw[key]).__name__}")

    kwargs = {k: raw[k] for k in raw if k in {"d", "n", "T", "setting", "n_fix", "n_grow",
             "n_decay", "n_ed", "diag_boost", "normalize_weights", "center",
             "error_lambda", "gamma", "replicates", "seed", "output_dir", "h"}}
    if "strength_range" in raw:
        if len(raw["strength_range"]) != 2:
            raise ConfigError("strength_range must be [lo, hi]")
        kwargs["strength_range"] = tuple(float(v) for v in raw["strength_range"])
    if "transition" in raw:
        t = raw["transition"]
        unknown = set(t) - _TRANSITION_KEYS
        if unknown:
            raise ConfigError(f"unknown transition keys: {sorted(unknown)}")
        kwargs["transition"] = TransitionSpec(
            structure=t.get("structure", "diagonal"),
            rho=float(t.get("rho", 0.0)),
            blocks=tuple(t["blocks"]) if t.get("blocks") is not None else None,
            target_norm=t.get("target_norm"),
            scale=t.get("scale"),
            matrix=tuple(tuple(row) for row in t["matrix"]) if t.get("matrix") is not None else None,
        )
    if "target_labels" in raw:
        kwargs["target_labels"] = tuple(float(u) for u in raw["target_labels"])
    if "kernel" in raw:
        k = raw["kernel"]
        unknown = set(k) - _KERNEL_KEYS
        if unknown:
            raise ConfigError(f"unknown kernel keys: {sorted(unknown)}")
        kwargs["kernel"] = KernelSpec(family=k.get("family", "epanechnikov"),
                                      eta=float(k.get("eta", 2.0)))
    if "lambda_grid" in raw:
        g = raw["lambda_grid"]
        unknown = set(g) - _GRID_KEYS
        if unknown:
            raise ConfigError(f"unknown lambda_grid keys: {sorted(unknown)}")
        kwargs["lambda_grid"] = (float(g["lo"]), float(g["hi"]), int(g["count"]))
    if "methods" in raw:
        methods = tuple(str(m).lower() for m in raw["methods"])
        bad = set(methods) - {"kse", "naive"}
        if bad:
            raise ConfigError(f"unknown methods: {sorted(bad)}")
        if not methods:
            raise ConfigError("methods must be nonempty")
        kwargs["methods"] = methods
    if "permute" in raw:
        kwargs["permute"] = tuple(raw["permute"]) if isinstance(raw["permute"], list) else raw["permute"]
    if "rate_params" in raw and raw["rate_params"] is not None:
        rp = raw["rate_params"]
        unknown = set(rp) - _RATE_KEYS
        if unknown:
            raise ConfigError(f"unknown rate_params keys: {sorted(unknown)}")
        kwargs["rate_params"] = (float(rp["xi"]), float(rp["sigma_op"]), float(rp["a_op"]))

    try:
        cfg = ExperimentConfig(**kwargs)
        cfg.sim_config()  # runs the edge-budget checks
        cfg.grid()
        if isinstance(cfg.h, str) and cfg.h not in AUTO_BANDWIDTHS:
            raise ConfigError(f"h must be a number or one of {AUTO_BANDWIDTHS}")
        if not isinstance(cfg.h, str) and not cfg.h > 0:
            raise ConfigError("h must be positive")
        if cfg.setting not in ("simultaneous", "sequential", "random"):
            raise ConfigError(f"unknown setting {cfg.setting!r}")
        if cfg.replicates < 1:
            raise ConfigError("replicates must be >= 1")
    except ConfigError:
        raise
    except Exception as err:
        raise ConfigError(str(err)) from err
    return cfg


def load_config(path, overrides=None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if overrides:
        raw.update(overrides)
    return validate_config(raw)


def config_hash(cfg: ExperimentConfig) -> str:
    """Short identity hash of everything except the output directory."""
    payload = asdict(cfg)
    payload.pop("output_dir")
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def build_transition_matrix(cfg: ExperimentConfig):
    t = cfg.transition
    return build_transition(
        t.structure, cfg.d, rho=t.rho,
        blocks=list(t.blocks) if t.blocks else None,
        target_norm=t.target_norm,
        seed=np.random.SeedSequence(cfg.seed, spawn_key=(2,)),
        matrix=np.array(t.matrix) if t.matrix is not None else None,
        scale=t.scale,
    )


def make_path(cfg: ExperimentConfig, replicate: int):
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(0, replicate)))
    sim = cfg.sim_config()
    if cfg.setting == "simultaneous":
        return path_simultaneous(sim, rng)
    if cfg.setting == "sequential":
        return path_sequential(sim, rng)
    return path_random(sim, equispaced_labels(cfg.n), rng)


def make_panel(cfg: ExperimentConfig, path, transition, replicate: int):
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(1, replicate)))
    return sample_panel(path, equispaced_labels(cfg.n), cfg.T, transition, rng)


def resolve_permutation(cfg: ExperimentConfig):
    """None when disabled; otherwise a permutation shared by all replicates."""
    if cfg.permute is False:
        return None
    if cfg.permute is True:
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(3,)))
        return rng.permutation(cfg.n)
    return np.asarray(cfg.permute, dtype=int)


def resolve_bandwidth(cfg: ExperimentConfig, transition=None) -> float:
    """Numeric h, or the theoretical rule named by 'auto-iid'/'auto-dependent'.

    auto-dependent takes (xi, sigma_op, a_op) from the config when present;
    otherwise it measures them from the replicate-0 truth path and the
    transition matrix.
    """
    if not isinstance(cfg.h, str):
        return float(cfg.h)
    eta = cfg.kernel.eta
    if cfg.h == "auto-iid":
        return theoretical_bandwidth_iid(cfg.n, cfg.T, cfg.d, eta)
    if cfg.rate_params is not None:
        xi, sigma_op, a_op = cfg.rate_params
    else:
        if transition is None:
            transition = build_transition_matrix(cfg)
        xi, sigma_op = measured_rate_params(make_path(cfg, 0), equispaced_labels(cfg.n))
        a_op = transition.norm
    return theoretical_bandwidth_dependent(cfg.n, cfg.T, cfg.d, eta, xi, sigma_op, a_op)


def measured_rate_params(path, labels):
    """sup over labels of the Sigma diagonal max/min ratio and of ||Sigma||_2."""
    xi = 1.0
    sigma_op = 0.0
    for u in labels:
        sigma = invert_spd(path.omega(u))
        diag = np.diag(sigma)
        xi = max(xi, diag.max() / diag.min())
        sigma_op = max(sigma_op, matrix_norms(sigma)["l2"])
    return xi, sigma_op


def _truth_label(cfg, labels, permutation, u0) -> float:
    """Label whose true graph governs the data found at u0 after permutation."""
    if permutation is None:
        return float(u0)
    match = np.nonzero(np.abs(labels - u0) <= 1e-12)[0]
    if match.size == 0:
        return float(u0)
    return float(labels[permutation[match[0]]])


def _score_methods(cfg: ExperimentConfig, panel, h, u0, truth_graph, truth_omega, replicate) -> dict:
    """Run every configured method at one target label; one report each."""
    grid = cfg.grid()
    err_lam = cfg.resolved_error_lambda()
    chash = config_hash(cfg)
    per_method = {}
    for method in cfg.methods:
        curve = roc_curve(
            panel, u0, h, cfg.kernel, grid, cfg.gamma, truth_graph, method,
            normalize=cfg.normalize_weights, center=cfg.center,
        )
        if method == "kse":
            S = smoothed_covariance(
                panel, u0, h, cfg.kernel,
                normalize=cfg.normalize_weights, center=cfg.center,
            ).matrix
        else:
            S = naive_covariance(panel, u0)
        try:
            est = estimate_precision(S, err_lam)
            errors = estimation_errors(est, truth_omega)
        except Infeasible:
            errors = {"l1": math.nan, "l2": math.nan, "frobenius": math.nan}
        per_method[method] = ExperimentReport(
            method=method,
            replicate=replicate,
            roc=curve,
            auc=auc(curve) if curve.points else math.nan,
            errors=errors,
            config_hash=chash,
        )
    return per_method


def run_replicate(cfg: ExperimentConfig, transition, permutation, h, replicate: int) -> dict:
    """One replicate: simulate, estimate along the grid, score every method.

    Returns {target_label: {method: {"curve", "auc", "errors"}}}. Under a
    permutation the truth follows the data: the scored graph is the one the
    subject now sitting at u0 was generated from.
    """
    path = make_path(cfg, replicate)
    panel = make_panel(cfg, path, transition, replicate)
    if permutation is not None:
        panel = permute_labels(panel, permutation)
    out = {}
    for u0 in cfg.target_labels:
        u_truth = _truth_label(cfg, panel.labels, permutation, u0)
        truth_omega = path.omega(u_truth)
        truth_graph = GraphEstimate.from_edges(cfg.d, path.support(u_truth))
        out[float(u0)] = _score_methods(cfg, panel, h, u0, truth_graph, truth_omega, replicate)
    return out


def _replicate_worker(args):
    cfg, transition, permutation, h, replicate = args
    return replicate, run_replicate(cfg, transition, permutation, h, replicate)


def run_roc(cfg: ExperimentConfig, workers=1, figures=True) -> list:
    """Full ROC experiment; writes per-replicate CSVs, summaries, skipped
    audits, and (optionally) one rendered figure per target label.

    Returns the list of written file paths.
    """
    transition = build_transition_matrix(cfg)
    permutation = resolve_permutation(cfg)
    h = resolve_bandwidth(cfg, transition)

    jobs = [(cfg, transition, permutation, h, r) for r in range(cfg.replicates)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(_replicate_worker, jobs))
    else:
        results = dict(map(_replicate_worker, jobs))
    return _write_reports(cfg, [results[r] for r in range(cfg.replicates)], figures)


def run_roc_from_dir(cfg: ExperimentConfig, panel_dir, figures=True) -> list:
    """ROC experiment over panels previously written by run_simulate.

    Every panel/truth file must carry the hash of this config; a mismatch
    (files simulated under some other config) raises ConfigError. Truth
    matrices are rebuilt from the edge files, with the diagonal implied by
    the compensation rule (boost plus incident off-diagonal magnitudes).
    """
    chash = config_hash(cfg)
    permutation = resolve_permutation(cfg)
    h = resolve_bandwidth(cfg)
    results = []
    for r in range(cfg.replicates):
        ppath = os.path.join(panel_dir, f"panel_r{r:03d}.csv")
        tpath = os.path.join(panel_dir, f"truth_r{r:03d}.csv")
        for path in (ppath, tpath):
            found = panelio.read_comments(path).get("config_hash")
            if found != chash:
                raise ConfigError(
                    f"{path}: config_hash {found} does not match this config ({chash})"
                )
        panel = panelio.read_panel(ppath)
        truth_edges = panelio.read_truth(tpath)
        if permutation is not None:
            panel = permute_labels(panel, permutation)
        out = {}
        for u0 in cfg.target_labels:
            u_truth = _truth_label(cfg, panel.labels, permutation, u0)
            matches = [u for u in truth_edges if abs(u - u_truth) <= 1e-12]
            if not matches:
                raise ConfigError(f"{tpath}: no truth entry for label {u_truth}")
            edges = truth_edges[matches[0]]
            omega = np.zeros((cfg.d, cfg.d))
            for j, k, value in edges:
                omega[j, k] = omega[k, j] = value
            omega[np.diag_indices(cfg.d)] = cfg.diag_boost + np.abs(omega).sum(axis=1)
            truth_graph = GraphEstimate.from_edges(cfg.d, [(j, k) for j, k, _ in edges])
            out[float(u0)] = _score_methods(cfg, panel, h, u0, truth_graph, omega, r)
        results.append(out)
    return _write_reports(cfg, results, figures)


def _write_reports(cfg: ExperimentConfig, results, figures) -> list:
    os.makedirs(cfg.output_dir, exist_ok=True)
    chash = config_hash(cfg)
    written = []
    for ti, u0 in enumerate(cfg.target_labels):
        u0 = float(u0)
        for r, res in enumerate(results):
            rows = [
                (method, r, p.lam, p.tpr, p.fpr)
                for method in cfg.methods
                for p in res[u0][method]["curve"].points
            ]
            path = os.path.join(cfg.output_dir, f"roc_t{ti}_r{r:03d}.csv")
            panelio.write_roc(path, rows, chash, u0)
            written.append(path)
        skipped_rows = [
            (method, r, lam)
            for r, res in enumerate(results)
            for method in cfg.methods
            for lam in res[u0][method]["curve"].skipped
        ]
        path = os.path.join(cfg.output_dir, f"skipped_t{ti}.csv")
        panelio.write_skipped(path, skipped_rows, chash, u0)
        written.append(path)

        summary_rows = []
        for method in cfg.methods:
            aucs = np.array([res[u0][method]["auc"] for res in results])
            sd = float(np.std(aucs, ddof=1)) if aucs.size > 1 else 0.0
            means = {
                key: float(np.mean([res[u0][method]["errors"][key] for res in results]))
                for key in ("l1", "l2", "frobenius")
            }
            summary_rows.append(
                (method, float(np.mean(aucs)), sd, means["l1"], means["l2"], means["frobenius"])
            )
        path = os.path.join(cfg.output_dir, f"summary_t{ti}.csv")
        panelio.write_summary(path, summary_rows, chash, u0)
        written.append(path)

        if figures:
            from .figures import render_roc_figure

            fig_path = os.path.join(cfg.output_dir, f"roc_curves_t{ti}.png")
            render_roc_figure(
                {m: [res[u0][m]["curve"] for res in results] for m in cfg.methods},
                {m: float(np.mean([res[u0][m]["auc"] for res in results])) for m in cfg.methods},
                u0,
                fig_path,
            )
            written.append(fig_path)
    return written


def rates_report(n, T, d, eta, xi=None, sigma_op=None, a_op=None) -> dict:
    """Theoretical bandwidths and convergence rates for the rates command.

    Dependent-data quantities appear only when all of xi, sigma_op, a_op
    are supplied.
    """
    out = {
        "h_iid": theoretical_bandwidth_iid(n, T, d, eta),
        "kappa_star": kappa_star(n, T, d, eta),
    }
    if None not in (xi, sigma_op, a_op):
        params = RateParams(xi=xi, sigma_op=sigma_op, a_op=a_op, eta=eta)
        out["h_dependent"] = theoretical_bandwidth_dependent(n, T, d, eta, xi, sigma_op, a_op)
        out["kappa"] = kappa(n, T, d, params)
    return out


def run_simulate(cfg: ExperimentConfig) -> list:
    """Write one panel file and one truth file per replicate."""
    os.makedirs(cfg.output_dir, exist_ok=True)
    chash = config_hash(cfg)
    transition = build_transition_matrix(cfg)
    labels = equispaced_labels(cfg.n)
    written = []
    for r in range(cfg.replicates):
        path = make_path(cfg, r)
        panel = make_panel(cfg, path, transition, r)
        ppath = os.path.join(cfg.output_dir, f"panel_r{r:03d}.csv")
        panelio.write_panel(panel, ppath, config_hash=chash)
        written.append(ppath)
        edges_by_label = {}
        for u in labels:
            omega = path.omega(u)
            edges_by_label[float(u)] = [
                (j, k, omega[j, k]) for (j, k) in sorted(path.support(u))
            ]
        tpath = os.path.join(cfg.output_dir, f"truth_r{r:03d}.csv")
        panelio.write_truth(tpath, edges_by_label, config_hash=chash)
        written.append(tpath)
    cpath = os.path.join(cfg.output_dir, "config.json")
    payload = asdict(cfg)
    payload.pop("output_dir")  # the file's own location; keeps runs byte-comparable
    payload["config_hash"] = chash
    panelio.write_json(cpath, payload)
    written.append(cpath)
    return written
