"""Model, trace, and protocol serialization.

Model documents are JSON:
    {"R0":, "Qn":, "T":, "sign":, "branches": [{"R":, "C":, "alpha":}, ...],
     "ocv": {"soc": [...], "v": [...]}}
Traces are CSV with a mandatory header ``t,i[,v...]`` (comma separators,
dot decimals, UTF-8); the voltage column is optional on input.  Standalone
OCV tables are CSV with header ``soc,v``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict

import numpy as np

from .ecm import CellModel, FractionalBranch, SimTrace
from .errors import DomainError
from .ocv import OCVTable
from .synthgen import ProtocolSpec


def model_to_dict(model: CellModel, T: float | None = None) -> dict:
    doc = {
        "R0": model.R0,
        "Qn": model.Qn,
        "sign": model.current_sign,
        "branches": [{"R": b.R, "C": b.C, "alpha": b.alpha} for b in model.branches],
        "ocv": {"soc": model.ocv.soc.tolist(), "v": model.ocv.v.tolist()},
    }
    if T is not None:
        doc["T"] = T
    return doc


def model_from_dict(doc: dict) -> tuple[CellModel, float | None]:
    try:
        branches = tuple(FractionalBranch(R=b["R"], C=b["C"], alpha=b["alpha"])
                         for b in doc["branches"])
        ocv = OCVTable(np.asarray(doc["ocv"]["soc"], dtype=float),
                       np.asarray(doc["ocv"]["v"], dtype=float))
        model = CellModel(R0=doc["R0"], branches=branches, Qn=doc["Qn"], ocv=ocv,
                          current_sign=doc.get("sign", "charge-positive"))
    except KeyError as e:
        raise DomainError(f"model document missing field {e}") from e
    return model, doc.get("T")


def save_model(path, model: CellModel, T: float | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model, T), fh, indent=1)


def load_model(path) -> tuple[CellModel, float | None]:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def load_trace(path):
    """Read a trace CSV; returns (t, i, v) with v None when absent."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DomainError(f"{path}: empty trace file")
        cols = [h.strip().lower() for h in header]
        if "t" not in cols or "i" not in cols:
            raise DomainError(f"{path}: header must contain 't' and 'i' columns")
        it, ii = cols.index("t"), cols.index("i")
        iv = cols.index("v") if "v" in cols else None
        t, i, v = [], [], []
        for row in reader:
            if not row:
                continue
            t.append(float(row[it]))
            i.append(float(row[ii]))
            if iv is not None:
                v.append(float(row[iv]))
    return (np.asarray(t), np.asarray(i),
            np.asarray(v) if iv is not None else None)


def save_trace(path, t, i, v=None, soc=None, u=None):
    """Write a trace CSV; state columns are appended when provided."""
    t = np.asarray(t)
    i = np.asarray(i)
    header = ["t", "i"]
    cols = [t, i]
    if v is not None:
        header.append("v")
        cols.append(np.asarray(v))
    if soc is not None:
        header.append("soc")
        cols.append(np.asarray(soc))
    if u is not None:
        u = np.asarray(u)
        for bi in range(u.shape[1]):
            header.append(f"u{bi + 1}")
            cols.append(u[:, bi])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(t.size):
            writer.writerow([repr(float(c[k])) for c in cols])


def save_sim_trace(path, sim: SimTrace):
    save_trace(path, sim.t, sim.i, sim.v, sim.soc, sim.u)


def load_ocv_csv(path) -> OCVTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DomainError(f"{path}: empty OCV file")
        cols = [h.strip().lower() for h in header]
        if "soc" not in cols or "v" not in cols:
            raise DomainError(f"{path}: header must contain 'soc' and 'v' columns")
        isoc, iv = cols.index("soc"), cols.index("v")
        soc, v = [], []
        for row in reader:
            if not row:
                continue
            soc.append(float(row[isoc]))
            v.append(float(row[iv]))
    return OCVTable(np.asarray(soc), np.asarray(v))


def save_ocv_csv(path, table: OCVTable):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["soc", "v"])
        for s, vv in zip(table.soc, table.v):
            writer.writerow([repr(float(s)), repr(float(vv))])


def load_protocol(path) -> ProtocolSpec:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "cycle_profile" in doc and doc["cycle_profile"] is not None:
        cp = doc["cycle_profile"]
        doc["cycle_profile"] = (np.asarray(cp["t"], dtype=float),
                                np.asarray(cp["i"], dtype=float))
    if "soc_steps" in doc:
        doc["soc_steps"] = tuple(doc["soc_steps"])
    try:
        return ProtocolSpec(**doc)
    except TypeError as e:
        raise DomainError(f"bad protocol document: {e}") from e


def save_protocol(path, spec: ProtocolSpec):
    doc = asdict(spec)
    if doc.get("cycle_profile") is not None:
        tt, ii = doc["cycle_profile"]
        doc["cycle_profile"] = {"t": list(np.asarray(tt)), "i": list(np.asarray(ii))}
    doc["soc_steps"] = list(doc["soc_steps"])
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
