"""Grunwald-Letnikov finite-memory baseline for the same branch dynamics.

The fractional branch equation D^a u = -u/tau + i/C is discretized with the
standard explicit short-memory GL scheme: the discrete fractional difference
is a weighted sum over the last N states with binomial weights

    w_0 = 1,  w_j = w_{j-1} * (1 - (a+1)/j),

and the update places the new sample on the left:

    u_{k+1} = T^a * (-u_k/tau + i_k/C) - sum_{j=1}^{min(k+1,N)} w_j u_{k+1-j}.

Every step must touch min(k+1, N) past states; that cost is exactly what the
two-state recursion in :mod:`fracbatt.ecm` avoids.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .ecm import CellModel, FractionalBranch, SimTrace, check_uniform
from .errors import DomainError
from .ocv import ocv_eval

DEFAULT_MEMORY = 64


def gl_weights(alpha: float, N: int) -> np.ndarray:
    """Binomial weights w_0..w_N of the GL difference of order alpha."""
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must be in (0, 1], got {alpha}")
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise DomainError(f"memory length must be an integer >= 1, got {N}")
    w = np.empty(N + 1)
    w[0] = 1.0
    for j in range(1, N + 1):
        w[j] = w[j - 1] * (1.0 - (alpha + 1.0) / j)
    return w


@dataclass
class GLBranchState:
    """Ring buffer of recent branch voltages plus the precomputed weights.

    ``last_touched`` records how many history entries the previous step read;
    the memory-bound tests assert it equals min(k+1, N).
    """

    weights: np.ndarray
    N: int
    history: deque = field(default_factory=deque)
    k: int = 0
    last_touched: int = 0

    @classmethod
    def fresh(cls, alpha: float, N: int) -> "GLBranchState":
        return cls(weights=gl_weights(alpha, N), N=N,
                   history=deque(maxlen=N))

    def copy(self) -> "GLBranchState":
        out = GLBranchState(weights=self.weights, N=self.N,
                            history=deque(self.history, maxlen=self.N),
                            k=self.k, last_touched=self.last_touched)
        return out


def gl_step(branch: FractionalBranch, st: GLBranchState, i_k: float,
            T: float) -> tuple[GLBranchState, float]:
    """One explicit GL step; returns the new state and branch voltage."""
    if st.weights.size != st.N + 1:
        raise DomainError("weights inconsistent with memory length")
    if T <= 0.0:
        raise DomainError(f"sampling period must be positive, got {T}")
    new = st.copy()
    hist = new.history
    u_k = hist[0] if hist else 0.0
    m = min(st.k + 1, st.N)
    s = 0.0
    w = st.weights
    for j in range(1, m + 1):
        u_past = hist[j - 1] if j - 1 < len(hist) else 0.0
        s += w[j] * u_past
    u_next = T ** branch.alpha * (-u_k / branch.tau + i_k / branch.C) - s
    hist.appendleft(u_next)  # maxlen drops the oldest entry
    new.k = st.k + 1
    new.last_touched = m
    return new, u_next


def gl_simulate_trace(model: CellModel, N: int, t, i,
                      soc0: float = 0.5) -> SimTrace:
    """GL counterpart of :func:`fracbatt.ecm.simulate_trace` (same output schema).

    SOC bookkeeping is identical to the recursion path: soc' = soc + (T/Qn)*i.
    Branch histories start empty (relaxed cell).
    """
    t = np.asarray(t, dtype=float)
    i = np.asarray(i, dtype=float)
    if t.shape != i.shape:
        raise DomainError("time and current arrays must have the same shape")
    T = check_uniform(t)
    b0 = T / model.Qn

    states = [GLBranchState.fresh(br.alpha, N) for br in model.branches]
    n = model.n
    K = t.size
    v_out = np.empty(K)
    soc_out = np.empty(K)
    u_out = np.empty((K, n))
    soc = soc0
    for k in range(K):
        i_eff = model.signed_current(float(i[k]))
        soc = soc + b0 * i_eff
        total_u = 0.0
        for bi, br in enumerate(model.branches):
            states[bi], u_new = gl_step(br, states[bi], i_eff, T)
            u_out[k, bi] = u_new
            total_u += u_new
        v_out[k] = ocv_eval(model.ocv, soc) + total_u + model.R0 * i_eff
        soc_out[k] = soc
    return SimTrace(t=t.copy(), i=i.copy(), v=v_out, soc=soc_out, u=u_out)
