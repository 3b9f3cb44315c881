"""Figure rendering for the CLI report paths.

All functions write PNG files next to the delimited output; nothing here is
imported by the numerical modules.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_voltage_plot(path, t, series: dict, ylabel="Terminal voltage [V]",
                      title=None):
    """Overlay one or more voltage series against time."""
    fig, ax = plt.subplots(figsize=(9, 4.5))
    for label, v in series.items():
        ax.plot(t, v, label=label, lw=1.0)
    ax.set_xlabel("Time [s]")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_comparison_plot(path, t, v_a, v_b, label_a="predicted", label_b="measured"):
    """Two series plus their residual in a shared-x two-panel figure."""
    t = np.asarray(t)
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(9, 6), sharex=True,
                                   height_ratios=[2, 1])
    ax0.plot(t, v_b, label=label_b, lw=1.0)
    ax0.plot(t, v_a, label=label_a, lw=1.0, ls="--")
    ax0.set_ylabel("Voltage [V]")
    ax0.grid(True, alpha=0.4)
    ax0.legend()
    resid = np.asarray(v_a) - np.asarray(v_b)
    ax1.plot(t, 1e3 * resid, lw=0.8, color="tab:red")
    ax1.axhline(0.0, color="k", lw=0.5)
    ax1.set_ylabel("Residual [mV]")
    ax1.set_xlabel("Time [s]")
    ax1.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_benchmark_plot(path, t, v_caputo, v_gl, report):
    """Voltage overlay, inter-method residual, and burden bars."""
    t = np.asarray(t)
    fig = plt.figure(figsize=(10, 7))
    gs = fig.add_gridspec(3, 2, height_ratios=[2, 1, 1.2])
    ax0 = fig.add_subplot(gs[0, :])
    ax0.plot(t, v_caputo, label="two-state recursion", lw=1.0)
    ax0.plot(t, v_gl, label=f"GL, N={report.n_memory}", lw=1.0, ls="--")
    ax0.set_ylabel("Voltage [V]")
    ax0.grid(True, alpha=0.4)
    ax0.legend()
    ax1 = fig.add_subplot(gs[1, :], sharex=ax0)
    ax1.plot(t, 1e3 * (np.asarray(v_caputo) - np.asarray(v_gl)), lw=0.8,
             color="tab:red")
    ax1.set_ylabel("Difference [mV]")
    ax1.set_xlabel("Time [s]")
    ax1.grid(True, alpha=0.4)
    ax2 = fig.add_subplot(gs[2, 0])
    ax2.bar(["recursion", "GL"], [report.caputo.peak_history_len,
                                  report.gl.peak_history_len], color=["C0", "C1"])
    ax2.set_ylabel("States / branch")
    ax3 = fig.add_subplot(gs[2, 1])
    ax3.bar(["recursion", "GL"], [1e6 * report.caputo.runtime_per_step,
                                  1e6 * report.gl.runtime_per_step],
            color=["C0", "C1"])
    ax3.set_ylabel("Step time [us]")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
