"""Parameter identification from pulse-and-relax (HPPC-style) data.

The ohmic resistance comes from the four voltage samples bracketing the pulse
edges,

    R0 = (u_t2 - u_t1 + u_t3 - u_t4) / (2 * i_pulse),

and the branch parameters (R_i, tau_i, alpha_i) from a bound-constrained
nonlinear least-squares fit of the relaxation window against

    v(t) = OCV(soc_j) + i * sum_i R_i * E_{alpha_i}(-t^alpha_i / tau_i).

The fit parameterizes tau = R*C directly (better conditioned than C) and runs
scipy's trust-region reflective solver with a forward-difference Jacobian.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .ecm import CHARGE_POSITIVE, FractionalBranch, check_uniform
from .errors import DegenerateDataError, DomainError
from .mlfunc import DEEP_EVAL_MAX_TERMS, DEFAULT_TOL, ml_e_array
from .ocv import OCVTable, ocv_eval

log = logging.getLogger(__name__)

# forward-difference step: max(1e-7, 1e-7 * |p|)
_FD_STEP = 1e-7


@dataclass(frozen=True)
class PulseSegment:
    """One pulse event: edge voltages, pulse current, and the relaxation window.

    ``pulse_sign`` carries the direction of the pulse current in the trace's
    convention (+1 for current that raises the terminal voltage); with it the
    edge formula recovers a positive R0 for pulses of either direction.
    """

    soc_j: float
    i_pulse: float                 # magnitude, > 0
    u_t1: float
    u_t2: float
    u_t3: float
    u_t4: float
    relax_t: np.ndarray            # from 0, strictly increasing
    relax_v: np.ndarray
    pulse_sign: int = 1

    def __post_init__(self):
        rt = np.asarray(self.relax_t, dtype=float)
        rv = np.asarray(self.relax_v, dtype=float)
        if rt.ndim != 1 or rt.shape != rv.shape:
            raise DomainError("relaxation series needs matching 1-D t and v arrays")
        if rt.size and (rt[0] != 0.0 or np.any(np.diff(rt) <= 0)):
            raise DomainError("relaxation timestamps must start at 0 and strictly increase")
        object.__setattr__(self, "relax_t", rt)
        object.__setattr__(self, "relax_v", rv)


@dataclass(frozen=True)
class FitConfig:
    """Fit dimensioning, bounds, and stopping tolerances."""

    n_branches: int = 1
    r_bounds: tuple = (1e-5, 1e-1)       # ohm
    tau_bounds: tuple = (0.1, 1e4)       # s^alpha
    alpha_bounds: tuple = (0.3, 1.0)
    init: np.ndarray | None = None       # packed start vector, overrides heuristics
    max_iter: int = 400                  # residual-evaluation budget
    cost_tol: float = 1e-12
    step_tol: float = 1e-12
    fix_alpha: float | None = None       # pin every branch order (e.g. 1.0)
    ml_tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.n_branches < 1:
            raise DomainError("n_branches must be >= 1")
        for name in ("r_bounds", "tau_bounds", "alpha_bounds"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise DomainError(f"{name}: lower bound must be below upper")
        alo, ahi = self.alpha_bounds
        if not (0.0 < alo and ahi <= 1.0):
            raise DomainError("alpha bounds must lie within (0, 1]")
        if self.fix_alpha is not None and not (0.0 < self.fix_alpha <= 1.0):
            raise DomainError("fix_alpha must lie within (0, 1]")


@dataclass(frozen=True)
class FitResult:
    """Identified branch parameters in canonical (increasing tau) order."""

    params: tuple                  # FractionalBranch per branch
    r0: float
    cost: float                    # mean squared error, V^2
    iterations: int
    converged: bool
    residual_t: np.ndarray
    residual_v: np.ndarray


def extract_r0(seg: PulseSegment) -> float:
    """Ohmic resistance from the instantaneous voltage jumps at the pulse edges."""
    if seg.i_pulse <= 0.0:
        raise DomainError(f"pulse current must be positive, got {seg.i_pulse}")
    r0 = (seg.u_t2 - seg.u_t1 + seg.u_t3 - seg.u_t4) / (2.0 * seg.i_pulse * seg.pulse_sign)
    if r0 < 0.0:
        log.warning("extract_r0: negative value %.3e ohm; edge data violates physics", r0)
    return r0


def relax_model(branches, ocv_at_soc: float, i_pulse: float, t,
                tol: float = DEFAULT_TOL) -> np.ndarray:
    """Predicted relaxation voltage OCV + i * sum_i R_i E_{a_i}(-t^a_i/tau_i)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("relaxation times must be >= 0")
    out = np.full(t.shape, ocv_at_soc, dtype=float)
    for br in branches:
        z = np.where(t > 0.0, -(t ** br.alpha) / br.tau, 0.0)
        out += i_pulse * br.R * ml_e_array(br.alpha, z, tol=tol,
                                           max_terms=DEEP_EVAL_MAX_TERMS)
    return out


def _unpack(p, cfg: FitConfig):
    """Packed vector -> list of (R, tau, alpha) triples."""
    trip = []
    if cfg.fix_alpha is None:
        for b in range(cfg.n_branches):
            trip.append((p[3 * b], p[3 * b + 1], p[3 * b + 2]))
    else:
        for b in range(cfg.n_branches):
            trip.append((p[2 * b], p[2 * b + 1], cfg.fix_alpha))
    return trip


def _model_on(p, cfg, ocv0, i_signed, t):
    out = np.full(t.shape, ocv0, dtype=float)
    for R, tau, alpha in _unpack(p, cfg):
        z = np.where(t > 0.0, -(t ** alpha) / tau, 0.0)
        out += i_signed * R * ml_e_array(alpha, z, tol=cfg.ml_tol,
                                         max_terms=DEEP_EVAL_MAX_TERMS)
    return out


def fd_jacobian(fun, p, f0=None):
    """Forward-difference Jacobian with step max(1e-7, 1e-7*|p_j|)."""
    p = np.asarray(p, dtype=float)
    if f0 is None:
        f0 = fun(p)
    J = np.empty((f0.size, p.size))
    for j in range(p.size):
        h = max(_FD_STEP, _FD_STEP * abs(p[j]))
        pj = p.copy()
        pj[j] += h
        J[:, j] = (fun(pj) - f0) / h
    return J


def _initial_guess(cfg: FitConfig, amp_per_amp: float, t_relax: float):
    """Design-rule start point: alpha 0.8, log-spaced tau, amplitude split evenly."""
    r_lo, r_hi = cfg.r_bounds
    t_lo, t_hi = cfg.tau_bounds
    lo = max(t_lo, t_relax / 50.0)
    hi = min(t_hi, max(t_relax, lo * 1.01))
    if cfg.n_branches == 1:
        taus = [math.sqrt(lo * hi)]
    else:
        taus = list(np.logspace(math.log10(lo), math.log10(hi), cfg.n_branches))
    r_init = min(max(amp_per_amp / cfg.n_branches, r_lo * 1.01), r_hi * 0.99)
    p0 = []
    for b in range(cfg.n_branches):
        p0 += [r_init, taus[b]]
        if cfg.fix_alpha is None:
            p0.append(0.8)
    return np.asarray(p0)


def fit_relaxation(seg: PulseSegment, ocv: OCVTable, cfg: FitConfig) -> FitResult:
    """Fit the relaxation window; returns canonically ordered parameters."""
    t = seg.relax_t
    v = seg.relax_v
    need = 10 * (3 * cfg.n_branches)
    if t.size < need:
        raise DomainError(
            f"relaxation window has {t.size} samples; need >= {need} "
            f"for {cfg.n_branches} branch(es)")
    ocv0 = ocv_eval(ocv, seg.soc_j)
    spread = float(np.max(v) - np.min(v))
    amp0 = float(v[0] - ocv0)
    if spread < 1e-9 and abs(amp0) < 1e-9:
        raise DegenerateDataError(
            f"flat relaxation (spread {spread:.2e} V): nothing to fit")
    # side of OCV the relaxation decays from fixes the effective current sign
    i_signed = math.copysign(seg.i_pulse, amp0)

    def residuals(p):
        return _model_on(p, cfg, ocv0, i_signed, t) - v

    p0 = cfg.init if cfg.init is not None else _initial_guess(
        cfg, abs(amp0) / seg.i_pulse, float(t[-1]))
    lo, hi = [], []
    for b in range(cfg.n_branches):
        lo += [cfg.r_bounds[0], cfg.tau_bounds[0]]
        hi += [cfg.r_bounds[1], cfg.tau_bounds[1]]
        if cfg.fix_alpha is None:
            lo.append(cfg.alpha_bounds[0])
            hi.append(cfg.alpha_bounds[1])
    p0 = np.minimum(np.maximum(np.asarray(p0, dtype=float), lo), hi)

    res = least_squares(residuals, p0, jac=lambda p: fd_jacobian(residuals, p),
                        bounds=(lo, hi), method="trf", x_scale="jac",
                        ftol=cfg.cost_tol, xtol=cfg.step_tol, gtol=1e-14,
                        max_nfev=cfg.max_iter)

    triples = sorted(_unpack(res.x, cfg), key=lambda rt_a: rt_a[1])
    branches = tuple(FractionalBranch(R=R, C=tau / R, alpha=alpha)
                     for R, tau, alpha in triples)
    try:
        r0 = extract_r0(seg)
    except DomainError:
        r0 = math.nan
    return FitResult(
        params=branches,
        r0=r0,
        cost=float(np.mean(res.fun ** 2)),
        iterations=int(res.nfev),
        converged=bool(res.status > 0),
        residual_t=t.copy(),
        residual_v=res.fun.copy(),
    )


def segment_hppc(t, i, v, threshold: float, soc0: float | None = None,
                 qn: float | None = None,
                 current_sign: str = CHARGE_POSITIVE) -> list[PulseSegment]:
    """Split a uniform (t, i, v) trace into pulse segments by current threshold.

    Edge voltages are the samples immediately before/after each threshold
    crossing; the relaxation window runs from the pulse end to the next pulse
    (or trace end).  SOC setpoints are coulomb-counted when ``soc0`` and
    ``qn`` are given, otherwise NaN.  Segments without a usable relaxation
    are dropped with a logged diagnostic.
    """
    t = np.asarray(t, dtype=float)
    i = np.asarray(i, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (t.shape == i.shape == v.shape):
        raise DomainError("t, i, v must have identical shapes")
    if threshold <= 0.0:
        raise DomainError("threshold must be positive")
    T = check_uniform(t)

    sign_factor = 1.0 if current_sign == CHARGE_POSITIVE else -1.0
    soc_series = None
    if soc0 is not None and qn is not None:
        soc_series = soc0 + (T / qn) * sign_factor * np.cumsum(i)

    above = np.abs(i) > threshold
    edges = np.flatnonzero(np.diff(above.astype(int)))
    starts = [int(e) + 1 for e in edges if above[e + 1]]
    ends = [int(e) for e in edges if not above[e + 1]]

    segments = []
    for n_seg, s in enumerate(starts):
        e_candidates = [e for e in ends if e >= s]
        if not e_candidates:
            log.warning("segment %d at sample %d: pulse never ends; dropped", n_seg, s)
            continue
        e = e_candidates[0]
        nxt = min([s2 for s2 in starts if s2 > e], default=t.size)
        if s < 1:
            log.warning("segment %d: no pre-pulse sample; dropped", n_seg)
            continue
        relax_lo, relax_hi = e + 1, nxt  # [T4, next pulse)
        if relax_hi - relax_lo < 2:
            log.warning("segment %d at sample %d: missing relaxation; dropped", n_seg, s)
            continue
        i_mean = float(np.mean(i[s:e + 1]))
        segments.append(PulseSegment(
            soc_j=float(soc_series[e]) if soc_series is not None else math.nan,
            i_pulse=abs(i_mean),
            u_t1=float(v[s - 1]),
            u_t2=float(v[s]),
            u_t3=float(v[e]),
            u_t4=float(v[e + 1]),
            relax_t=t[relax_lo:relax_hi] - t[relax_lo],
            relax_v=v[relax_lo:relax_hi],
            pulse_sign=1 if i_mean * sign_factor >= 0 else -1,
        ))
    return segments
