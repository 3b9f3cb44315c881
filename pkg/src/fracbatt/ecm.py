"""Fractional-order nRC equivalent-circuit cell model.

Continuous closed-form branch response, discretization to the two-state
recursion, and terminal-voltage observation.  Each polarization branch is a
resistor in parallel with a constant phase element; under constant current
over one interval its voltage is

    u(t) = u0 * E_a(-t^a/tau) + i * R * (1 - E_a(-t^a/tau)),  tau = R*C.

Sampling at period T gives the recursion u' = a*u + b*i with
a = E_a(-T^a/tau), b = R*(1-a): only the current and next step are ever
stored.  The Mittag-Leffler function has no semigroup property, so chaining
steps across intervals is an approximation to the exact multi-interval
response; the discrepancy is measured against the GL baseline, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RangeError
from .mlfunc import DEEP_EVAL_MAX_TERMS, DEFAULT_TOL, Z_CUT, ml_e, ml_e_array
from .ocv import OCVTable, ocv_eval

CHARGE_POSITIVE = "charge-positive"
DISCHARGE_POSITIVE = "discharge-positive"

# relative slack when checking a trace for uniform sampling
UNIFORM_RTOL = 1e-6


@dataclass(frozen=True)
class FractionalBranch:
    """One R || CPE polarization branch."""

    R: float       # ohm
    C: float       # pseudo-capacitance, F*s^(alpha-1)
    alpha: float   # fractional order in (0, 1]

    def __post_init__(self):
        if self.R <= 0.0:
            raise DomainError(f"branch resistance must be positive, got {self.R}")
        if self.C <= 0.0:
            raise DomainError(f"branch pseudo-capacitance must be positive, got {self.C}")
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"branch order must be in (0, 1], got {self.alpha}")

    @property
    def tau(self) -> float:
        """Time constant R*C in s^alpha."""
        return self.R * self.C


@dataclass(frozen=True)
class CellModel:
    """Full cell: ohmic resistance, n polarization branches, capacity, OCV."""

    R0: float                       # ohm
    branches: tuple                 # FractionalBranch, strictly increasing tau
    Qn: float                       # nominal capacity, coulomb
    ocv: OCVTable
    current_sign: str = CHARGE_POSITIVE

    def __post_init__(self):
        if self.R0 < 0.0:
            raise DomainError(f"ohmic resistance must be >= 0, got {self.R0}")
        if self.Qn <= 0.0:
            raise DomainError(f"nominal capacity must be positive, got {self.Qn}")
        branches = tuple(self.branches)
        if len(branches) < 1:
            raise DomainError("model needs at least one branch")
        taus = [b.tau for b in branches]
        if any(t2 <= t1 for t1, t2 in zip(taus, taus[1:])):
            raise DomainError("branch time constants must be strictly increasing")
        if self.current_sign not in (CHARGE_POSITIVE, DISCHARGE_POSITIVE):
            raise DomainError(f"unknown current sign convention {self.current_sign!r}")
        object.__setattr__(self, "branches", branches)

    @property
    def n(self) -> int:
        return len(self.branches)

    def signed_current(self, i: float) -> float:
        """Map a measured current into the charge-positive internal convention."""
        return i if self.current_sign == CHARGE_POSITIVE else -i


@dataclass(frozen=True)
class CellState:
    """State vector: SOC plus one polarization voltage per branch."""

    soc: float
    u: tuple

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(x) for x in self.u))


@dataclass(frozen=True)
class DiscreteModel:
    """Sampling period plus the precomputed recursion coefficients."""

    T: float
    a: tuple      # decay factor per branch, E_a(-T^a/tau)
    b: tuple      # drive gain per branch, R*(1-a), ohm
    b0: float     # SOC increment per ampere-step, T/Qn
    parent: CellModel

    def initial_state(self, soc: float) -> CellState:
        return CellState(soc, (0.0,) * self.parent.n)


def _branch_z(branch: FractionalBranch, t: float) -> float:
    z = -(t ** branch.alpha) / branch.tau
    if z < -Z_CUT:
        raise DomainError(
            f"-t^alpha/tau = {z:.3f} below -{Z_CUT}: outside the validated "
            f"series domain of the model path (t={t}, tau={branch.tau})")
    return z


def analytic_branch_response(branch: FractionalBranch, u0: float, i0: float,
                             t: float, tol: float = DEFAULT_TOL) -> float:
    """Closed-form branch voltage after time t under constant current i0."""
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return u0
    e = ml_e(branch.alpha, _branch_z(branch, t), tol=tol,
             max_terms=DEEP_EVAL_MAX_TERMS)
    return u0 * e + i0 * branch.R * (1.0 - e)


def discretize(model: CellModel, T: float, tol: float = DEFAULT_TOL) -> DiscreteModel:
    """Precompute the recursion coefficients for sampling period T."""
    if T <= 0.0:
        raise DomainError(f"sampling period must be positive, got {T}")
    a = []
    b = []
    for br in model.branches:
        e = ml_e(br.alpha, _branch_z(br, T), tol=tol)
        a.append(e)
        b.append(br.R * (1.0 - e))
    return DiscreteModel(T=T, a=tuple(a), b=tuple(b), b0=T / model.Qn, parent=model)


def step(dm: DiscreteModel, state: CellState, i_k: float) -> CellState:
    """Advance the state by one sampling interval under current i_k."""
    if len(state.u) != dm.parent.n:
        raise DomainError(
            f"state has {len(state.u)} branch voltages, model has {dm.parent.n}")
    i_eff = dm.parent.signed_current(i_k)
    soc = state.soc + dm.b0 * i_eff
    u = tuple(a * uu + b * i_eff for a, b, uu in zip(dm.a, dm.b, state.u))
    return CellState(soc, u)


def observe(dm: DiscreteModel, state: CellState, i_k: float) -> float:
    """Terminal voltage for the given state and applied current."""
    if len(state.u) != dm.parent.n:
        raise DomainError(
            f"state has {len(state.u)} branch voltages, model has {dm.parent.n}")
    i_eff = dm.parent.signed_current(i_k)
    return ocv_eval(dm.parent.ocv, state.soc) + sum(state.u) + dm.parent.R0 * i_eff


@dataclass(frozen=True)
class SimTrace:
    """Simulated trajectory: per input sample, the post-step state and voltage."""

    t: np.ndarray
    i: np.ndarray
    v: np.ndarray
    soc: np.ndarray
    u: np.ndarray  # shape (K, n)


def check_uniform(t: np.ndarray, T: float | None = None) -> float:
    """Validate uniform sampling; returns the period."""
    t = np.asarray(t, dtype=float)
    if t.size < 2:
        raise DomainError("trace needs at least two samples")
    dt = np.diff(t)
    period = T if T is not None else float(dt[0])
    if period <= 0.0:
        raise DomainError("sampling period must be positive")
    if np.any(np.abs(dt - period) > UNIFORM_RTOL * period):
        k = int(np.argmax(np.abs(dt - period)))
        raise DomainError(
            f"non-uniform sampling at index {k + 1}: dt={dt[k]:.9g}, expected {period:.9g}")
    return period


def simulate_trace(dm: DiscreteModel, init: CellState, t, i) -> SimTrace:
    """Step-then-observe simulation over a uniformly sampled current trace.

    Row k holds the state advanced by sample k's current and the terminal
    voltage with that same current, i.e. conditions at the end of interval k.
    """
    t = np.asarray(t, dtype=float)
    i = np.asarray(i, dtype=float)
    if t.shape != i.shape:
        raise DomainError("time and current arrays must have the same shape")
    check_uniform(t, dm.T)

    n = dm.parent.n
    K = t.size
    v_out = np.empty(K)
    soc_out = np.empty(K)
    u_out = np.empty((K, n))
    state = init
    for k in range(K):
        state = step(dm, state, float(i[k]))
        v_out[k] = observe(dm, state, float(i[k]))
        soc_out[k] = state.soc
        u_out[k] = state.u
    return SimTrace(t=t.copy(), i=i.copy(), v=v_out, soc=soc_out, u=u_out)


def zero_input_decay(branch: FractionalBranch, u0: float, t,
                     tol: float = DEFAULT_TOL) -> np.ndarray:
    """Exact relaxation u0 * E_a(-t^a/tau) over an array of elapsed times."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("elapsed times must be >= 0")
    z = np.where(t > 0.0, -(t ** branch.alpha) / branch.tau, 0.0)
    return u0 * ml_e_array(branch.alpha, z, tol=tol, max_terms=DEEP_EVAL_MAX_TERMS)
