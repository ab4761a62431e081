"""Static SVG figures: data with deterministic model, residual with SNR, horizon."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "karma"


def channel_figure(
    path,
    name: str,
    method: str,
    train: np.ndarray,
    deterministic: np.ndarray,
    residual: np.ndarray,
    snr: float,
    horizon_truth: np.ndarray | None,
    horizon_pred: np.ndarray,
    horizon_var: np.ndarray,
    pq: float,
) -> None:
    n0 = train.size
    K = horizon_pred.size
    t_train = np.arange(n0)
    t_hor = np.arange(n0, n0 + K)
    fig, axes = plt.subplots(3, 1, figsize=(8, 9))

    ax = axes[0]
    ax.plot(t_train, train, lw=0.8, label="data")
    ax.plot(np.arange(deterministic.size), deterministic, lw=1.5, label="deterministic model")
    ax.set_title(f"{name}: data and deterministic model")
    ax.legend(loc="upper left", fontsize=8)

    ax = axes[1]
    ax.plot(t_train, residual, lw=0.8, color="tab:gray")
    ax.set_title(f"residual, SNR = {snr:.3g}")

    ax = axes[2]
    sd = np.sqrt(np.maximum(horizon_var, 0.0))
    ax.fill_between(t_hor, horizon_pred - 2 * sd, horizon_pred + 2 * sd, alpha=0.2, label="±2σ")
    ax.plot(t_hor, horizon_pred, marker="o", ms=3, label=f"{method.upper()} prediction")
    if horizon_truth is not None:
        ax.plot(t_hor, horizon_truth, marker="x", ms=3, color="k", lw=0.8, label="measured")
    ax.set_title(f"prediction horizon, PQ = {pq:.2f}%")
    ax.legend(loc="upper left", fontsize=8)

    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
