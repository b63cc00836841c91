"""CSV and JSON file formats for panels, truths, estimates, and reports.

All floats are written with 17 significant digits so a write/read round
trip reproduces the in-memory values bit for bit. Files carry provenance
as leading comment lines of the form ``# key=value``; readers expose them
without interpreting unknown keys.

Formats:

    panel CSV     header ``label,t,x1,...,xd``; one row per observation,
                  sorted by (label, t) with t = 1..T_i per subject.
                  Duplicate labels cannot be represented (writer refuses).
    truth CSV     header ``label,j,k,value``; one row per present edge,
                  j < k, 1-based variable indices matching x1..xd.
    graph CSV     header ``j,k``; 1-based edge list, j < k.
    matrix CSV    d rows of d comma-separated values, no header.
    roc CSV       header ``method,replicate,lambda,tpr,fpr``.
    summary CSV   header ``method,auc_mean,auc_sd,l1,l2,frobenius``.
"""

from __future__ import annotations

import json

import numpy as np

from .covariance import Panel

FLOAT_FMT = ".17g"


def _fmt(x) -> str:
    return format(float(x), FLOAT_FMT)


def _write_lines(path, comments, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in comments:
            fh.write(f"# {key}={value}\n")
        for line in lines:
            fh.write(line + "\n")


def read_comments(path) -> dict:
    """Leading ``# key=value`` lines of a file as a dict."""
    meta = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
    return meta


def write_panel(panel: Panel, path, config_hash=None):
    """Write a panel to CSV; refuses duplicate labels (not representable)."""
    labels = panel.labels
    if np.unique(labels).size != labels.size:
        raise ValueError("panel CSV cannot represent duplicate labels")
    d = panel.dim
    header = "label,t," + ",".join(f"x{j + 1}" for j in range(d))
    lines = [header]
    for label, obs in panel.subjects():
        ltxt = _fmt(label)
        for t in range(obs.shape[0]):
            lines.append(ltxt + f",{t + 1}," + ",".join(_fmt(v) for v in obs[t]))
    comments = [("config_hash", config_hash)] if config_hash else []
    _write_lines(path, comments, lines)


def read_panel(path) -> Panel:
    """Read a panel CSV written by write_panel."""
    labels, blocks = [], []
    current_label, current_rows = None, []
    with open(path, encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                if header[:2] != ["label", "t"]:
                    raise ValueError(f"unexpected panel header {header[:2]}")
                continue
            parts = line.split(",")
            label = float(parts[0])
            row = [float(v) for v in parts[2:]]
            if current_label is None or label != current_label:
                if current_rows:
                    labels.append(current_label)
                    blocks.append(np.array(current_rows))
                current_label, current_rows = label, []
            current_rows.append(row)
    if current_rows:
        labels.append(current_label)
        blocks.append(np.array(current_rows))
    if not blocks:
        raise ValueError(f"no observation rows in {path}")
    return Panel(labels=np.array(labels), observations=tuple(blocks))


def write_truth(path, edges_by_label, config_hash=None):
    """Write per-label edge values; keys are labels, values are lists of
    (j, k, value) with 0-based j < k (written 1-based)."""
    lines = ["label,j,k,value"]
    for label in sorted(edges_by_label):
        for j, k, value in sorted(edges_by_label[label]):
            lines.append(f"{_fmt(label)},{j + 1},{k + 1},{_fmt(value)}")
    comments = [("config_hash", config_hash)] if config_hash else []
    _write_lines(path, comments, lines)


def read_truth(path) -> dict:
    """Inverse of write_truth; indices come back 0-based."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        header_seen = False
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                header_seen = True
                continue
            label, j, k, value = line.split(",")
            out.setdefault(float(label), []).append((int(j) - 1, int(k) - 1, float(value)))
    return out


def write_matrix(path, M):
    M = np.asarray(M, dtype=float)
    lines = [",".join(_fmt(v) for v in row) for row in M]
    _write_lines(path, [], lines)


def read_matrix(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(v) for v in line.split(",")])
    return np.array(rows)


def write_graph(path, edges):
    """Edge list CSV from 0-based (j, k) pairs, written 1-based."""
    lines = ["j,k"]
    for j, k in sorted(edges):
        lines.append(f"{j + 1},{k + 1}")
    _write_lines(path, [], lines)


def write_roc(path, rows, config_hash, target_label):
    """rows: iterable of (method, replicate, lam, tpr, fpr)."""
    lines = ["method,replicate,lambda,tpr,fpr"]
    for method, rep, lam, tpr, fpr in rows:
        lines.append(f"{method},{rep},{_fmt(lam)},{_fmt(tpr)},{_fmt(fpr)}")
    _write_lines(
        path,
        [("config_hash", config_hash), ("target_label", _fmt(target_label))],
        lines,
    )


def write_skipped(path, rows, config_hash, target_label):
    """rows: iterable of (method, replicate, lam) for infeasible grid points."""
    lines = ["method,replicate,lambda"]
    for method, rep, lam in rows:
        lines.append(f"{method},{rep},{_fmt(lam)}")
    _write_lines(
        path,
        [("config_hash", config_hash), ("target_label", _fmt(target_label))],
        lines,
    )


def write_summary(path, rows, config_hash, target_label):
    """rows: iterable of (method, auc_mean, auc_sd, l1, l2, frobenius)."""
    lines = ["method,auc_mean,auc_sd,l1,l2,frobenius"]
    for method, auc_mean, auc_sd, l1, l2, fro in rows:
        lines.append(
            f"{method},{_fmt(auc_mean)},{_fmt(auc_sd)},{_fmt(l1)},{_fmt(l2)},{_fmt(fro)}"
        )
    _write_lines(
        path,
        [("config_hash", config_hash), ("target_label", _fmt(target_label))],
        lines,
    )


def write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
