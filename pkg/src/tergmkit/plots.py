"""Figure rendering for CLI reports.

Everything here takes a report (dataclass or its dict form) and writes one
PNG, returning the path. Only the CLI report path imports this module, so
the core library stays free of plotting dependencies.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "entropy_heatmap",
    "assessment_bands",
    "recovery_losses",
    "fit_trace",
    "ga_progress",
]


def _as_dict(report):
    return report.to_dict() if hasattr(report, "to_dict") else report


def entropy_heatmap(theta_d_axis, theta_s_axis, entropy, path, title="Second-step entropy (nats)"):
    d = np.asarray(theta_d_axis, dtype=float)
    s = np.asarray(theta_s_axis, dtype=float)
    z = np.asarray(entropy, dtype=float)
    fig, ax = plt.subplots(figsize=(6.4, 5.2), constrained_layout=True)
    im = ax.imshow(
        z.T,
        origin="lower",
        aspect="auto",
        extent=(d[0], d[-1], s[0], s[-1]),
        cmap="viridis",
    )
    fig.colorbar(im, ax=ax, label="entropy (nats)")
    ax.set_xlabel("density weight")
    ax.set_ylabel("stability weight")
    ax.set_title(title)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def assessment_bands(assessment, path):
    doc = _as_dict(assessment)
    names = list(doc["statistics"])
    cells = doc["cells"]
    cols = min(3, len(names))
    rows_n = (len(names) + cols - 1) // cols
    fig, axes = plt.subplots(
        rows_n, cols, figsize=(4.2 * cols, 3.2 * rows_n), constrained_layout=True, squeeze=False
    )
    for j, name in enumerate(names):
        ax = axes[j // cols][j % cols]
        mine = sorted((c for c in cells if c["statistic"] == name), key=lambda c: c["t"])
        ts = [c["t"] for c in mine]
        ax.fill_between(
            ts,
            [c["p5"] for c in mine],
            [c["p95"] for c in mine],
            alpha=0.3,
            color="tab:green",
            label="5-95 band",
        )
        ax.plot(ts, [c["observed"] for c in mine], "o-", color="tab:blue", label="observed")
        ax.set_title(name)
        ax.set_xlabel("t")
        if j == 0:
            ax.legend(fontsize=8)
    for j in range(len(names), rows_n * cols):
        axes[j // cols][j % cols].axis("off")
    fig.suptitle("Held-out statistic bands")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def recovery_losses(report, path):
    doc = _as_dict(report)
    ok = [r for r in doc["records"] if "error" not in r]
    seeds = [r["seed"] for r in ok]
    keys = ["loss_exact_vs_truth", "loss_sampled_vs_truth", "loss_sampled_vs_exact"]
    labels = ["exact vs truth", "sampled vs truth", "sampled vs exact"]
    x = np.arange(len(seeds), dtype=float)
    width = 0.27
    fig, ax = plt.subplots(figsize=(7.5, 4.2), constrained_layout=True)
    for i, (key, lab) in enumerate(zip(keys, labels)):
        vals = [r[key] for r in ok]
        ax.bar(x + (i - 1) * width, vals, width, label=lab)
    ax.set_xticks(x)
    ax.set_xticklabels([str(s) for s in seeds])
    ax.set_xlabel("seed")
    ax.set_ylabel("Euclidean loss")
    ax.set_title(f"Parameter recovery (n={doc['n']}, T={doc['T']})")
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def fit_trace(fit, path):
    doc = _as_dict(fit)
    trace = doc.get("trace", [])
    its = [row["iteration"] for row in trace]
    fig, axes = plt.subplots(1, 2, figsize=(8.5, 3.6), constrained_layout=True)
    lls = [row["log_likelihood"] for row in trace if "log_likelihood" in row]
    if lls:
        axes[0].plot(its[: len(lls)], lls, "o-")
        axes[0].set_ylabel("log-likelihood")
    else:
        steps = [row.get("step", np.nan) for row in trace]
        axes[0].plot(its, steps, "o-")
        axes[0].set_ylabel("step size")
    axes[0].set_xlabel("iteration")
    gn = [row.get("gradient_norm", np.nan) for row in trace]
    axes[1].semilogy(its, gn, "o-")
    axes[1].set_xlabel("iteration")
    axes[1].set_ylabel("gradient norm")
    fig.suptitle(f"{doc.get('method', 'fit')} fit trace")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def ga_progress(result, path):
    doc = _as_dict(result)
    trace = doc.get("ga_trace", [])
    gens = [row["generation"] for row in trace]
    fig, ax = plt.subplots(figsize=(6.4, 4.0), constrained_layout=True)
    ax.plot(gens, [row["p_value"] for row in trace], "o-", label="running max p-value")
    ax.plot(gens, [row["best_frequency"] for row in trace], "s--", label="generation best")
    ax.plot(gens, [row["mean_frequency"] for row in trace], "^:", label="generation mean")
    ax.set_xlabel("generation")
    ax.set_ylabel("empirical frequency")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    ax.set_title("p-value search progress")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
