"""Rendering of ROC report figures alongside the CSV output."""

from __future__ import annotations

import math

import numpy as np

_STYLE = {"kse": ("tab:blue", "o"), "naive": ("tab:orange", "s")}


def _mean_curve(curves):
    """Average TPR/FPR at each grid lambda across replicate curves."""
    by_lam = {}
    for curve in curves:
        for p in curve.points:
            if math.isnan(p.tpr) or math.isnan(p.fpr):
                continue
            by_lam.setdefault(p.lam, []).append((p.fpr, p.tpr))
    lams = sorted(by_lam, reverse=True)
    fpr = [float(np.mean([xy[0] for xy in by_lam[lam]])) for lam in lams]
    tpr = [float(np.mean([xy[1] for xy in by_lam[lam]])) for lam in lams]
    return fpr, tpr


def render_roc_figure(curves_by_method, auc_by_method, target_label, out_path):
    """Write one PNG with the replicate-averaged ROC curve per method."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.0, 4.2), dpi=150)
    for method, curves in curves_by_method.items():
        fpr, tpr = _mean_curve(curves)
        color, marker = _STYLE.get(method, ("tab:gray", "x"))
        ax.plot(
            fpr, tpr, marker=marker, markersize=3.5, color=color,
            label=f"{method} (AUC={auc_by_method[method]:.3f})",
        )
    ax.plot([0, 1], [0, 1], linestyle=":", color="gray", linewidth=0.8)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(f"ROC at target label {target_label:g}")
    ax.legend(loc="lower right", fontsize=9)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
