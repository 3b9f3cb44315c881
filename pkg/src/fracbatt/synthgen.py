"""Synthetic ground-truth datasets from a known cell model.

Replaces the (unpublished) laboratory data as the verification backbone:
pulse-and-relax protocols, constant-current holds, and urban-style drive
cycles are generated from a :class:`~fracbatt.ecm.CellModel` whose parameters
are recorded in a truth sidecar together with the per-sample hidden states.

Two row conventions are used deliberately:

* ``constant_current`` / ``drive_cycle`` traces come from the simulation
  paths (``caputo`` recursion, ``gl`` baseline, or exact ``analytic``
  per-interval response) and carry interval-END rows: row k is the state
  advanced by sample k's current.

* ``hppc`` traces carry interval-START rows: row k holds the state before
  sample k's interval together with sample k's current.  Around a current
  switch, consecutive rows then share the state exactly, so the four pulse
  edge voltages bracket the instantaneous ohmic jumps and the first
  relaxation row sits at elapsed time zero.  Pulses are driven with the
  recursion (whose fixed point under constant current is exactly I*R, reached
  geometrically), and relaxations follow the exact zero-input decay
  u(T4) * E_a(-t^a/tau), which is the curve the identification stage fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .ecm import (CellModel, CellState, DiscreteModel, SimTrace, discretize,
                  simulate_trace, step)
from .errors import DomainError, RangeError
from .glbaseline import gl_simulate_trace
from .mlfunc import DEEP_EVAL_MAX_TERMS, DEFAULT_TOL, ml_e_array
from .ocv import ocv_eval

KIND_HPPC = "hppc"
KIND_CONSTANT_CURRENT = "constant_current"
KIND_DRIVE_CYCLE = "drive_cycle"


@dataclass(frozen=True)
class ProtocolSpec:
    """Recipe for one synthetic dataset."""

    kind: str
    T: float = 1.0
    pulse_current: float = 40.0      # magnitude, A
    pulse_duration: float = 10.0     # s, used when soc_steps gives no SOC gap
    relax_duration: float = 300.0    # s
    rest_duration: float = 30.0      # s of zero current before the first pulse
    soc_steps: tuple = ()            # SOC targets; pulses step between them
    soc0: float = 0.5
    cycle_profile: tuple | None = None   # explicit (t, i) arrays for drive_cycle
    cycle_samples: int = 2000
    cycle_peak: float = 100.0        # A, drive-cycle peak current
    noise_sigma: float = 0.0         # V
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (KIND_HPPC, KIND_CONSTANT_CURRENT, KIND_DRIVE_CYCLE):
            raise DomainError(f"unknown protocol kind {self.kind!r}")
        for name in ("T", "pulse_duration", "relax_duration"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive")
        if self.rest_duration < 0.0:
            raise DomainError("rest_duration must be >= 0")
        if self.pulse_current <= 0.0:
            raise DomainError("pulse_current is a magnitude and must be positive")
        if self.noise_sigma < 0.0:
            raise DomainError("noise_sigma must be >= 0")
        if any(not (0.0 <= s <= 1.0) for s in self.soc_steps):
            raise DomainError("soc_steps must lie within [0, 1]")
        object.__setattr__(self, "soc_steps", tuple(self.soc_steps))


@dataclass(frozen=True)
class GenResult:
    t: np.ndarray
    i: np.ndarray
    v_true: np.ndarray
    v_noisy: np.ndarray
    truth: dict


def fuds_surrogate(n: int, T: float = 1.0, peak: float = 100.0,
                   rng=None) -> np.ndarray:
    """Bundled urban-cycle current template.

    Micro-trips of accelerating discharge, cruise, regen spike, and idle;
    each trip is shifted to zero mean (charge-sustaining), and the whole
    profile has a crest factor near 3.  Discharge is negative in the
    charge-positive convention.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    out: list[float] = []
    while len(out) < n:
        a = float(rng.uniform(0.6, 1.0))
        seg = []
        seg += list(np.linspace(0.0, -a * peak, int(rng.integers(8, 15))))
        seg += [-a * peak * 0.25] * int(rng.integers(20, 40))
        seg += list(np.linspace(a * peak * 0.7, 0.0, int(rng.integers(5, 10))))
        seg += [0.0] * int(rng.integers(10, 25))
        arr = np.array(seg)
        out += list(arr - arr.mean())
    return np.asarray(out[:n])


def _soc_guard(model: CellModel, soc: float, k: int):
    if not (model.ocv.soc_min <= soc <= model.ocv.soc_max):
        raise RangeError(
            f"SOC {soc:.4f} left the OCV domain at sample {k}")


def _hppc_current_profile(model: CellModel, spec: ProtocolSpec):
    """Build the per-sample current sequence and segment bookkeeping."""
    T = spec.T
    rest_n = int(round(spec.rest_duration / T))
    relax_n = int(round(spec.relax_duration / T))
    if relax_n < 2:
        raise DomainError("relax_duration must cover at least two samples")
    i_seq: list[float] = [0.0] * rest_n
    seg_marks = []  # (pulse_start, pulse_end_exclusive, relax_end_exclusive, i_signed)
    soc = spec.soc0
    b0 = T / model.Qn
    sign_factor = 1.0 if model.current_sign == "charge-positive" else -1.0
    targets = spec.soc_steps if spec.soc_steps else (None,)
    for target in targets:
        if target is None or abs(target - soc) < b0 * spec.pulse_current:
            pulse_n = int(round(spec.pulse_duration / T))
            i_signed = spec.pulse_current
        else:
            gap = target - soc
            # trace-convention current that moves SOC toward the target
            i_signed = math.copysign(spec.pulse_current, gap * sign_factor)
            pulse_n = int(round(abs(gap) / (b0 * spec.pulse_current)))
        if pulse_n < 2:
            raise DomainError("pulse shorter than two samples; lower the current or T")
        start = len(i_seq)
        i_seq += [i_signed] * pulse_n
        i_seq += [0.0] * relax_n
        seg_marks.append((start, start + pulse_n, len(i_seq), i_signed))
        soc += sign_factor * i_signed * pulse_n * b0
    return np.asarray(i_seq), seg_marks


def _generate_hppc(model: CellModel, spec: ProtocolSpec, tol: float) -> GenResult:
    dm = discretize(model, spec.T, tol=tol)
    i_arr, seg_marks = _hppc_current_profile(model, spec)
    K = i_arr.size
    t_arr = np.arange(K) * spec.T

    n = model.n
    v = np.empty(K)
    soc_hist = np.empty(K)
    u_hist = np.empty((K, n))
    state = dm.initial_state(spec.soc0)
    segments = []
    seg_iter = iter(seg_marks)
    current_seg = next(seg_iter, None)

    k = 0
    while k < K:
        if current_seg is not None and k == current_seg[1]:
            # relaxation phase: exact zero-input decay from the switch state
            p_start, p_end, r_end, i_signed = current_seg
            u_sw = np.asarray(state.u)
            soc_sw = state.soc
            _soc_guard(model, soc_sw, k)
            ocv_sw = ocv_eval(model.ocv, soc_sw)
            elapsed = (np.arange(r_end - p_end)) * spec.T  # row = interval start
            decay = np.zeros((r_end - p_end, n))
            for bi, br in enumerate(model.branches):
                zz = np.where(elapsed > 0.0, -(elapsed ** br.alpha) / br.tau, 0.0)
                decay[:, bi] = u_sw[bi] * ml_e_array(br.alpha, zz, tol=tol,
                                                     max_terms=DEEP_EVAL_MAX_TERMS)
            rows = slice(p_end, r_end)
            u_hist[rows] = decay
            soc_hist[rows] = soc_sw
            v[rows] = ocv_sw + decay.sum(axis=1)  # i = 0 during relaxation
            segments.append({
                "index": len(segments),
                "soc_j": soc_sw,
                "i_pulse": abs(i_signed),
                "pulse_sign": 1 if i_signed >= 0 else -1,
                "t1_index": p_start - 1,
                "t2_index": p_start,
                "t3_index": p_end - 1,
                "t4_index": p_end,
                "relax_end_index": r_end - 1,
                "u_at_switch": list(u_sw),
            })
            # hand the post-relaxation state back to the recursion
            tail = float(elapsed[-1] + spec.T)
            u_tail = []
            for bi, br in enumerate(model.branches):
                zt = -(tail ** br.alpha) / br.tau
                u_tail.append(u_sw[bi] * float(ml_e_array(
                    br.alpha, [zt], tol=tol, max_terms=DEEP_EVAL_MAX_TERMS)[0]))
            state = CellState(soc_sw, tuple(u_tail))
            current_seg = next(seg_iter, None)
            k = r_end
            continue
        # rest or pulse phase: interval-start row, then advance the recursion
        _soc_guard(model, state.soc, k)
        i_k = float(i_arr[k])
        i_eff = model.signed_current(i_k)
        v[k] = ocv_eval(model.ocv, state.soc) + sum(state.u) + model.R0 * i_eff
        soc_hist[k] = state.soc
        u_hist[k] = state.u
        state = step(dm, state, i_k)
        k += 1

    rng = np.random.default_rng(spec.seed)
    noise = rng.normal(0.0, spec.noise_sigma, K) if spec.noise_sigma > 0 else 0.0
    truth = {
        "segments": segments,
        "per_sample": {"soc": soc_hist.tolist(),
                       "u": u_hist.tolist(),
                       "v_true": v.tolist()},
    }
    return GenResult(t=t_arr, i=i_arr, v_true=v, v_noisy=v + noise, truth=truth)


def _analytic_sim(model: CellModel, t: np.ndarray, i: np.ndarray, soc0: float,
                  T: float, tol: float) -> SimTrace:
    """Exact per-interval response: the closed form restarts at current changes."""
    b0 = T / model.Qn
    n = model.n
    K = t.size
    v = np.empty(K)
    soc_out = np.empty(K)
    u_out = np.empty((K, n))
    soc = soc0
    k0 = 0
    u_run = np.zeros(n)  # state at the start of the current run
    while k0 < K:
        k1 = k0
        while k1 < K and i[k1] == i[k0]:
            k1 += 1
        i_eff = model.signed_current(float(i[k0]))
        elapsed = (np.arange(1, k1 - k0 + 1)) * T
        for bi, br in enumerate(model.branches):
            zz = -(elapsed ** br.alpha) / br.tau
            e = ml_e_array(br.alpha, zz, tol=tol, max_terms=DEEP_EVAL_MAX_TERMS)
            u_out[k0:k1, bi] = u_run[bi] * e + i_eff * br.R * (1.0 - e)
        for j, k in enumerate(range(k0, k1)):
            soc = soc + b0 * i_eff
            _soc_guard(model, soc, k)
            soc_out[k] = soc
            v[k] = ocv_eval(model.ocv, soc) + u_out[k].sum() + model.R0 * i_eff
        u_run = u_out[k1 - 1].copy()
        k0 = k1
    return SimTrace(t=t.copy(), i=i.copy(), v=v, soc=soc_out, u=u_out)


def _generate_profile(model: CellModel, spec: ProtocolSpec, method: str,
                      tol: float) -> GenResult:
    T = spec.T
    if spec.kind == KIND_CONSTANT_CURRENT:
        K = max(2, int(round(spec.pulse_duration / T)))
        i_arr = np.full(K, spec.pulse_current)
        rng = np.random.default_rng(spec.seed)
    else:
        rng = np.random.default_rng(spec.seed)
        if spec.cycle_profile is not None:
            t_in, i_in = spec.cycle_profile
            i_arr = np.asarray(i_in, dtype=float)
            if np.asarray(t_in).size != i_arr.size:
                raise DomainError("cycle_profile t and i lengths differ")
        else:
            i_arr = fuds_surrogate(spec.cycle_samples, T, spec.cycle_peak, rng)
    t_arr = np.arange(i_arr.size) * T

    # locate any SOC-domain violation before simulating (reports the sample index)
    sign_factor = 1.0 if model.current_sign == "charge-positive" else -1.0
    soc_path = spec.soc0 + (T / model.Qn) * sign_factor * np.cumsum(i_arr)
    off = (soc_path < model.ocv.soc_min) | (soc_path > model.ocv.soc_max)
    if off.any():
        k = int(np.argmax(off))
        raise RangeError(f"SOC {soc_path[k]:.4f} left the OCV domain at sample {k}")

    if method == "caputo":
        dm = discretize(model, T, tol=tol)
        sim = simulate_trace(dm, dm.initial_state(spec.soc0), t_arr, i_arr)
    elif method == "gl":
        from .glbaseline import DEFAULT_MEMORY
        sim = gl_simulate_trace(model, DEFAULT_MEMORY, t_arr, i_arr, soc0=spec.soc0)
    elif method == "analytic":
        sim = _analytic_sim(model, t_arr, i_arr, spec.soc0, T, tol)
    else:
        raise DomainError(f"unknown generation method {method!r}")

    if np.any(sim.soc < model.ocv.soc_min) or np.any(sim.soc > model.ocv.soc_max):
        k = int(np.argmax((sim.soc < model.ocv.soc_min) | (sim.soc > model.ocv.soc_max)))
        raise RangeError(f"SOC left the OCV domain at sample {k}")

    noise = rng.normal(0.0, spec.noise_sigma, i_arr.size) if spec.noise_sigma > 0 else 0.0
    truth = {
        "per_sample": {"soc": sim.soc.tolist(),
                       "u": sim.u.tolist(),
                       "v_true": sim.v.tolist()},
    }
    return GenResult(t=t_arr, i=i_arr, v_true=sim.v, v_noisy=sim.v + noise, truth=truth)


def generate(model: CellModel, spec: ProtocolSpec, method: str = "caputo",
             tol: float = DEFAULT_TOL) -> GenResult:
    """Generate a synthetic dataset with its truth sidecar.

    ``method`` selects the voltage engine for constant-current and
    drive-cycle protocols (``caputo`` | ``gl`` | ``analytic``); HPPC uses the
    dedicated pulse/relaxation scheme described in the module docstring.
    """
    res = None
    if spec.kind == KIND_HPPC:
        res = _generate_hppc(model, spec, tol)
    else:
        res = _generate_profile(model, spec, method, tol)
    res.truth["model"] = {
        "R0": model.R0, "Qn": model.Qn, "sign": model.current_sign,
        "branches": [{"R": b.R, "C": b.C, "alpha": b.alpha, "tau": b.tau}
                     for b in model.branches],
    }
    res.truth["protocol"] = {k: (list(v) if isinstance(v, tuple) else v)
                             for k, v in asdict(spec).items()
                             if k != "cycle_profile"}
    res.truth["method"] = method if spec.kind != KIND_HPPC else "hppc-hybrid"
    return res
