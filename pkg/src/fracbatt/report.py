"""Error metrics and the Caputo-vs-GL burden benchmark.

The benchmark measures, not assumes: retained-state counts come from
instrumented buffers around the actual stepping loops, and per-step runtimes
from wall-clock timing of the plain (uninstrumented) loops.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .ecm import CellModel, discretize, simulate_trace
from .errors import DomainError
from .glbaseline import GLBranchState, gl_simulate_trace, gl_step
from .mlfunc import DEFAULT_TOL
from .ocv import ocv_eval


@dataclass(frozen=True)
class RunReport:
    """Voltage error metrics plus the computational-burden figures."""

    rmse: float
    mae: float
    max_abs_err: float
    runtime_per_step: float = 0.0
    peak_history_len: int = 0

    def __post_init__(self):
        slack = 1e-15 + 1e-12 * abs(self.max_abs_err)
        if min(self.rmse, self.mae, self.max_abs_err) < 0.0:
            raise DomainError("error metrics must be >= 0")
        if self.rmse > self.max_abs_err + slack or self.mae > self.max_abs_err + slack:
            raise DomainError("rmse and mae cannot exceed max_abs_err")
        if self.runtime_per_step < 0.0 or self.peak_history_len < 0:
            raise DomainError("burden figures must be >= 0")


@dataclass(frozen=True)
class BenchmarkReport:
    """Per-method reports; the error fields hold the inter-method discrepancy."""

    caputo: RunReport
    gl: RunReport
    n_steps: int
    n_memory: int


def evaluate(pred, meas) -> RunReport:
    """Compare a predicted voltage series against a measured one."""
    pred = np.asarray(pred, dtype=float)
    meas = np.asarray(meas, dtype=float)
    if pred.shape != meas.shape or pred.ndim != 1 or pred.size < 1:
        raise DomainError("pred and meas must be equal-length 1-D series")
    d = pred - meas
    return RunReport(
        rmse=float(np.sqrt(np.mean(d * d))),
        mae=float(np.mean(np.abs(d))),
        max_abs_err=float(np.max(np.abs(d))),
    )


class _PeakCounter:
    """High-water mark of simultaneously retained per-branch state values."""

    __slots__ = ("live", "peak")

    def __init__(self):
        self.live = 0
        self.peak = 0

    def add(self, n=1):
        self.live += n
        if self.live > self.peak:
            self.peak = self.live

    def drop(self, n=1):
        self.live -= n


def _caputo_instrumented(model: CellModel, dm, i_arr, soc0) -> int:
    """Run the recursion while counting retained branch states; returns the peak."""
    counters = [_PeakCounter() for _ in model.branches]
    u = []
    for c in counters:
        c.add()          # the retained current value
        u.append(0.0)
    a, b = dm.a, dm.b
    soc = soc0
    for ik in i_arr:
        i_eff = model.signed_current(float(ik))
        soc += dm.b0 * i_eff
        for bi in range(model.n):
            counters[bi].add()            # next value is formed...
            u_next = a[bi] * u[bi] + b[bi] * i_eff
            counters[bi].drop()           # ...and the old one is released
            u[bi] = u_next
    return max(c.peak for c in counters)


def _gl_instrumented(model: CellModel, N, i_arr, T) -> int:
    """Run the GL baseline while tracking the retained history length."""
    states = [GLBranchState.fresh(br.alpha, N) for br in model.branches]
    peak = 0
    for ik in i_arr:
        i_eff = model.signed_current(float(ik))
        for bi, br in enumerate(model.branches):
            states[bi], _ = gl_step(br, states[bi], i_eff, T)
            if len(states[bi].history) > peak:
                peak = len(states[bi].history)
    return peak


def benchmark(model: CellModel, t, i, n_memory: int = 64, soc0: float = 0.5,
              tol: float = DEFAULT_TOL) -> BenchmarkReport:
    """Run both discretizations on one trace; report accuracy gap and burden."""
    t = np.asarray(t, dtype=float)
    i = np.asarray(i, dtype=float)
    dm = discretize(model, float(t[1] - t[0]), tol=tol)

    t0 = time.perf_counter()
    sim_c = simulate_trace(dm, dm.initial_state(soc0), t, i)
    dt_caputo = (time.perf_counter() - t0) / t.size

    t0 = time.perf_counter()
    sim_g = gl_simulate_trace(model, n_memory, t, i, soc0=soc0)
    dt_gl = (time.perf_counter() - t0) / t.size

    errs = evaluate(sim_c.v, sim_g.v)
    peak_c = _caputo_instrumented(model, dm, i, soc0)
    peak_g = _gl_instrumented(model, n_memory, i, dm.T)

    return BenchmarkReport(
        caputo=RunReport(errs.rmse, errs.mae, errs.max_abs_err,
                         runtime_per_step=dt_caputo, peak_history_len=peak_c),
        gl=RunReport(errs.rmse, errs.mae, errs.max_abs_err,
                     runtime_per_step=dt_gl, peak_history_len=peak_g),
        n_steps=int(t.size),
        n_memory=int(n_memory),
    )
