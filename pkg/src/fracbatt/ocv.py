"""Open-circuit-voltage curve: built from slow charge/discharge data, queried by SOC."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RangeError

RESAMPLE_POINTS = 201  # sub-millivolt resampling error for smooth curves


@dataclass(frozen=True)
class OCVTable:
    """Monotone piecewise-linear OCV(SOC) lookup."""

    soc: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        soc = np.asarray(self.soc, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if soc.ndim != 1 or soc.shape != v.shape or soc.size < 2:
            raise DomainError("OCV table needs matching 1-D soc/v arrays with >= 2 points")
        if np.any(np.diff(soc) <= 0):
            raise DomainError("soc grid must be strictly increasing")
        if np.any(np.diff(v) <= 0):
            raise DomainError("OCV must be strictly increasing in soc")
        object.__setattr__(self, "soc", soc)
        object.__setattr__(self, "v", v)

    @property
    def soc_min(self) -> float:
        return float(self.soc[0])

    @property
    def soc_max(self) -> float:
        return float(self.soc[-1])


def ocv_eval(table: OCVTable, soc: float) -> float:
    """Interpolate OCV at the given SOC; no extrapolation outside the grid."""
    if not (table.soc_min <= soc <= table.soc_max):
        raise RangeError(
            f"soc {soc} outside OCV table domain [{table.soc_min}, {table.soc_max}]")
    return float(np.interp(soc, table.soc, table.v))


def build_ocv(charge_soc, charge_v, discharge_soc, discharge_v) -> OCVTable:
    """Average a slow charge and a slow discharge curve into one OCV table.

    Both curves are resampled onto a common uniform grid over the overlap of
    their SOC ranges by linear interpolation, then averaged pointwise.
    """
    cs = np.asarray(charge_soc, dtype=float)
    cv = np.asarray(charge_v, dtype=float)
    ds = np.asarray(discharge_soc, dtype=float)
    dv = np.asarray(discharge_v, dtype=float)
    for s, v, name in ((cs, cv, "charge"), (ds, dv, "discharge")):
        if s.ndim != 1 or s.shape != v.shape or s.size < 2:
            raise DomainError(f"{name} curve needs matching 1-D arrays with >= 2 points")
        if np.any(np.diff(s) <= 0):
            raise DomainError(f"{name} curve soc must be strictly increasing")
        if np.any(np.diff(v) < 0):
            raise DomainError(f"{name} curve voltage must be monotone in soc")
    lo = max(cs[0], ds[0])
    hi = min(cs[-1], ds[-1])
    if hi <= lo:
        raise DomainError("charge and discharge curves have no overlapping SOC range")
    grid = np.linspace(lo, hi, RESAMPLE_POINTS)
    avg = 0.5 * (np.interp(grid, cs, cv) + np.interp(grid, ds, dv))
    return OCVTable(grid, avg)
