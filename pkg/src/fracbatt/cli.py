"""Command-line interface: ml-eval, simulate, gen, identify, evaluate, benchmark.

Commands print JSON reports to stdout and write delimited files where asked;
``--plot`` options render PNG figures alongside.  Failures exit nonzero with
one machine-readable JSON object on stderr.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import ecm, glbaseline, ident, modelio, report, synthgen
from .errors import FracbattError
from .mlfunc import DEFAULT_MAX_TERMS, DEFAULT_TOL, MLParams, ml_one, ml_two
from .ocv import build_ocv  # noqa: F401  (re-exported for scripting convenience)


def _fail(exc: BaseException) -> "click.exceptions.Exit":
    sys.stderr.write(json.dumps({"error": str(exc), "type": type(exc).__name__}) + "\n")
    return click.exceptions.Exit(1)


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


@click.group()
def main():
    """Fractional-order lithium-ion cell modeling toolkit."""


@main.command("ml-eval")
@click.option("--alpha", type=float, required=True, help="Order in (0, 1].")
@click.option("--beta", type=float, default=None, help="Second parameter (default 1).")
@click.option("--z", type=float, required=True, help="Argument.")
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True,
              help="Term-size truncation tolerance.")
@click.option("--max-terms", type=int, default=DEFAULT_MAX_TERMS, show_default=True)
def ml_eval_cmd(alpha, beta, z, tol, max_terms):
    """Evaluate a Mittag-Leffler function; prints one JSON object."""
    try:
        if beta is None:
            res = ml_one(MLParams(alpha=alpha, z=z, tol=tol, max_terms=max_terms))
        else:
            res = ml_two(MLParams(alpha=alpha, z=z, beta=beta, tol=tol,
                                  max_terms=max_terms))
    except (FracbattError, OverflowError) as e:
        raise _fail(e)
    click.echo(json.dumps(_jsonable(res)))


@main.command("simulate")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--trace", "trace_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--method", type=click.Choice(["caputo", "gl"]), default="caputo",
              show_default=True)
@click.option("--memory", type=int, default=glbaseline.DEFAULT_MEMORY,
              show_default=True, help="GL history length N.")
@click.option("--soc0", type=float, default=0.5, show_default=True)
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True)
@click.option("--plot", "plot_path", type=click.Path(), default=None,
              help="Also render a voltage/SOC figure to this PNG.")
def simulate_cmd(model_path, trace_path, out_path, method, memory, soc0, tol,
                 plot_path):
    """Run a current trace through the model; writes t,i,v,soc,u* CSV."""
    try:
        model, T_doc = modelio.load_model(model_path)
        t, i, _ = modelio.load_trace(trace_path)
        if method == "caputo":
            T = T_doc if T_doc is not None else float(t[1] - t[0])
            dm = ecm.discretize(model, T, tol=tol)
            sim = ecm.simulate_trace(dm, dm.initial_state(soc0), t, i)
        else:
            sim = glbaseline.gl_simulate_trace(model, memory, t, i, soc0=soc0)
        modelio.save_sim_trace(out_path, sim)
        if plot_path:
            from . import plots
            plots.save_voltage_plot(plot_path, sim.t, {"terminal voltage": sim.v})
    except (FracbattError, OSError) as e:
        raise _fail(e)
    click.echo(json.dumps({"out": out_path, "samples": int(t.size), "method": method}))


@main.command("gen")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True,
              help="Ground-truth model JSON.")
@click.option("--protocol", "protocol_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--truth", "truth_path", type=click.Path(), default=None,
              help="Sidecar JSON with generating parameters and hidden states.")
@click.option("--method", type=click.Choice(["caputo", "gl", "analytic"]),
              default="caputo", show_default=True)
@click.option("--seed", type=int, default=None, help="Override the protocol seed.")
def gen_cmd(model_path, protocol_path, out_path, truth_path, method, seed):
    """Generate a synthetic dataset from a known model."""
    try:
        model, _ = modelio.load_model(model_path)
        spec = modelio.load_protocol(protocol_path)
        if seed is not None:
            spec = dataclasses.replace(spec, seed=seed)
        res = synthgen.generate(model, spec, method=method)
        modelio.save_trace(out_path, res.t, res.i, res.v_noisy)
        if truth_path:
            with open(truth_path, "w", encoding="utf-8") as fh:
                json.dump(_jsonable(res.truth), fh)
    except (FracbattError, OSError) as e:
        raise _fail(e)
    click.echo(json.dumps({"out": out_path, "samples": int(res.t.size),
                           "kind": spec.kind}))


@main.command("identify")
@click.option("--trace", "trace_path", type=click.Path(exists=True), required=True)
@click.option("--ocv", "ocv_path", type=click.Path(exists=True), required=True)
@click.option("--branches", type=int, default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Identified model JSON (segment nearest the median SOC).")
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Per-segment fit report, one JSON object per line.")
@click.option("--threshold", type=float, default=1.0, show_default=True,
              help="Pulse detection threshold [A].")
@click.option("--qn", type=float, required=True, help="Nominal capacity [C].")
@click.option("--soc0", type=float, default=0.5, show_default=True)
@click.option("--sign", type=click.Choice([ecm.CHARGE_POSITIVE, ecm.DISCHARGE_POSITIVE]),
              default=ecm.CHARGE_POSITIVE, show_default=True)
@click.option("--fix-alpha", type=float, default=None,
              help="Pin every branch order (1.0 gives the integer-order fit).")
@click.option("--threads", type=int, default=1, show_default=True)
def identify_cmd(trace_path, ocv_path, branches, out_path, report_path, threshold,
                 qn, soc0, sign, fix_alpha, threads):
    """Identify R0 and branch parameters from an HPPC-style trace."""
    try:
        t, i, v = modelio.load_trace(trace_path)
        if v is None:
            raise FracbattError("identification needs a voltage column")
        table = modelio.load_ocv_csv(ocv_path)
        segs = ident.segment_hppc(t, i, v, threshold, soc0=soc0, qn=qn,
                                  current_sign=sign)
        if not segs:
            raise FracbattError("no usable pulse segments found")
        cfg = ident.FitConfig(n_branches=branches, fix_alpha=fix_alpha)

        def run(seg):
            return ident.fit_relaxation(seg, table, cfg)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                fits = list(pool.map(run, segs))
        else:
            fits = [run(s) for s in segs]

        lines = []
        for idx, (seg, fit) in enumerate(zip(segs, fits)):
            lines.append({
                "segment": idx, "soc_j": seg.soc_j, "r0": fit.r0,
                "params": [{"R": b.R, "tau": b.tau, "alpha": b.alpha}
                           for b in fit.params],
                "cost": fit.cost, "iterations": fit.iterations,
                "converged": fit.converged,
            })
        if report_path:
            with open(report_path, "w", encoding="utf-8") as fh:
                for line in lines:
                    fh.write(json.dumps(_jsonable(line)) + "\n")

        socs = np.array([s.soc_j for s in segs])
        pick = int(np.argmin(np.abs(socs - np.median(socs))))
        chosen = fits[pick]
        model = ecm.CellModel(R0=max(chosen.r0, 0.0), branches=chosen.params,
                              Qn=qn, ocv=table, current_sign=sign)
        T = float(t[1] - t[0])
        modelio.save_model(out_path, model, T)
    except (FracbattError, OSError) as e:
        raise _fail(e)
    for line in lines:
        click.echo(json.dumps(_jsonable(line)))


@main.command("evaluate")
@click.option("--pred", "pred_path", type=click.Path(exists=True), required=True)
@click.option("--meas", "meas_path", type=click.Path(exists=True), required=True)
@click.option("--plot", "plot_path", type=click.Path(), default=None,
              help="Render an overlay + residual figure to this PNG.")
def evaluate_cmd(pred_path, meas_path, plot_path):
    """Voltage error metrics between two traces (their v columns)."""
    try:
        tp, _, vp = modelio.load_trace(pred_path)
        _, _, vm = modelio.load_trace(meas_path)
        if vp is None or vm is None:
            raise FracbattError("both traces need a voltage column")
        rep = report.evaluate(vp, vm)
        if plot_path:
            from . import plots
            plots.save_comparison_plot(plot_path, tp, vp, vm)
    except (FracbattError, OSError) as e:
        raise _fail(e)
    click.echo(json.dumps(_jsonable(rep)))


@main.command("benchmark")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--trace", "trace_path", type=click.Path(exists=True), required=True)
@click.option("--memory", type=int, default=glbaseline.DEFAULT_MEMORY,
              show_default=True, help="GL history length N.")
@click.option("--soc0", type=float, default=0.5, show_default=True)
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True)
@click.option("--plot", "plot_path", type=click.Path(), default=None,
              help="Render the comparison figure to this PNG.")
def benchmark_cmd(model_path, trace_path, memory, soc0, tol, plot_path):
    """Compare the two-state recursion against the GL baseline on one trace."""
    try:
        model, _ = modelio.load_model(model_path)
        t, i, _ = modelio.load_trace(trace_path)
        rep = report.benchmark(model, t, i, n_memory=memory, soc0=soc0, tol=tol)
        if plot_path:
            from . import plots
            dm = ecm.discretize(model, float(t[1] - t[0]), tol=tol)
            sim_c = ecm.simulate_trace(dm, dm.initial_state(soc0), t, i)
            sim_g = glbaseline.gl_simulate_trace(model, memory, t, i, soc0=soc0)
            plots.save_benchmark_plot(plot_path, t, sim_c.v, sim_g.v, rep)
    except (FracbattError, OSError) as e:
        raise _fail(e)
    click.echo(json.dumps(_jsonable(rep)))


if __name__ == "__main__":
    main()
