"""Report rendering: sampling-convergence figures and delimited tables."""
from __future__ import annotations

import csv
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import metrics, oracle


def convergence_data(state, grouping, budgets, num_seeds: int) -> list[float]:
    """Mean |estimate - exact| per budget, averaged over seeds."""
    exact = oracle.expectation(state, [m.term for c in grouping.collections
                                       for m in c.members])
    tables = oracle.sampling_tables(state, grouping)
    variances = metrics.collection_variances(grouping, state)
    out = []
    for budget in budgets:
        counts = metrics.optimal_allocation(variances, int(budget)).counts
        counts = np.maximum(counts, 1)
        errs = [abs(oracle.sample_estimate(state, grouping, counts, seed, tables) - exact)
                for seed in range(num_seeds)]
        out.append(float(np.mean(errs)))
    return out


def convergence_report(state, groupings: dict, budgets, num_seeds: int,
                       out_dir: str) -> list[str]:
    """Write error-vs-budget CSV and a log-log figure; returns file paths."""
    os.makedirs(out_dir, exist_ok=True)
    series = {name: convergence_data(state, g, budgets, num_seeds)
              for name, g in groupings.items()}

    csv_path = os.path.join(out_dir, "convergence.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["budget"] + [f"mean_abs_error_{name}" for name in series])
        for i, budget in enumerate(budgets):
            writer.writerow([budget] + [f"{series[name][i]:.6e}" for name in series])

    fig_path = os.path.join(out_dir, "convergence.png")
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for name, errors in series.items():
        ax.loglog(budgets, errors, marker="o", label=name)
    ref = series[next(iter(series))]
    scale = ref[0] * np.sqrt(budgets[0])
    ax.loglog(budgets, scale / np.sqrt(np.asarray(budgets, dtype=float)),
              linestyle="--", color="gray", label=r"$\propto 1/\sqrt{N}$")
    ax.set_xlabel("total shots")
    ax.set_ylabel("mean |error|")
    ax.legend()
    fig.tight_layout()
    fig.savefig(fig_path, dpi=160)
    plt.close(fig)

    summary_path = os.path.join(out_dir, "summary.csv")
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grouping", "collections", "r_hat", "true_r"])
        for name, g in groupings.items():
            r = metrics.true_r(g, state)
            writer.writerow([name, len(g.collections),
                             f"{metrics.r_hat(g):.4f}", f"{r.value:.4f}"])
    return [csv_path, fig_path, summary_path]
