"""Scenario runner: sweeps, CSV output and a matching plotting script.

For every sweep value, architecture, design and user drop the runner
solves the fully digital EE problem, decomposes the result onto the
architecture's analog network and evaluates the hybrid precoder under the
true PA model. Rows are ordered by (sweep value, architecture, design,
drop) whatever order the points finish in, and every random draw is
seeded from ``(seed, drop, ...)`` so a fixed seed gives identical bytes.

Usage::

    leo-hybrid --scenario fig8_architectures --out results/fig8
"""

import argparse
import csv
import dataclasses
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from .channel import draw_user_stats, steering_matrix
from .digital_opt import EEProblem, SolverConfig, dinkelbach_solve
from .hybrid import TrpsNetwork, decompose
from .npa import pa_power
from .power import transmitter_power
from .rate import ergodic_rate_mc, sum_rate_bound
from .scenario import Scenario, ScenarioError, load_scenario

__all__ = [
    "ResultRow",
    "PointResult",
    "CSV_COLUMNS",
    "CSV_UNITS",
    "run_point",
    "run_points",
    "run_scenario",
    "emit_csv",
    "read_csv",
    "emit_plot_script",
    "write_outputs",
    "main",
]

logger = logging.getLogger(__name__)

DESIGNS = ("nonlinear", "linear")


@dataclass
class ResultRow:
    """One evaluated design. ``wall_time`` is kept out of ``results.csv``."""

    scenario: str
    architecture: str
    design: str
    drop: int
    sweep: str
    sweep_value: float
    energy_efficiency: float
    sum_rate_bound: float
    mc_sum_rate: float
    mc_stderr: float
    pa_power: float
    transmitter_power: float
    residual: float
    relative_residual: float
    outer_iterations: int
    converged: bool
    status: str
    wall_time: float = dataclasses.field(default=float("nan"), compare=False)


CSV_COLUMNS = [f.name for f in dataclasses.fields(ResultRow) if f.name != "wall_time"]
CSV_UNITS = {
    "sweep_value": "dBW, ratio, count or dB by sweep",
    "energy_efficiency": "bit/J",
    "sum_rate_bound": "bit/s/Hz",
    "mc_sum_rate": "bit/s/Hz",
    "mc_stderr": "bit/s/Hz",
    "pa_power": "W",
    "transmitter_power": "W",
    "residual": "sqrt(W)",
    "relative_residual": "1",
}


@dataclass
class PointResult:
    row: ResultRow
    ee_trace: List[tuple]
    residual_trace: List[float]
    precoder: Optional[np.ndarray] = None


def _seed_sequence(scenario, *key):
    return np.random.SeedSequence(scenario.seed, spawn_key=tuple(int(k) for k in key))


def _users(scenario, drop):
    rng = np.random.default_rng(_seed_sequence(scenario, drop))
    stats = draw_user_stats(scenario.users, scenario.channel_gain, scenario.rician_factor, rng)
    return steering_matrix(scenario.geometry, stats), np.array([s.avg_power for s in stats])


def run_point(scenario: Scenario, index: int, architecture: str, design: str, drop: int,
              mc_validate=False, keep_precoder=False) -> PointResult:
    """Solve and evaluate one (sweep value, architecture, design, drop) combination.

    Any error is recorded in the row's ``status`` instead of propagating.
    """
    value = scenario.sweep_values[index] if scenario.sweep != "none" else float("nan")
    point = scenario.point(value)
    nan = float("nan")
    row = ResultRow(scenario.name, architecture, design, drop, scenario.sweep, float(value),
                    nan, nan, nan, nan, nan, nan, nan, nan, 0, False, "ok")
    ee_trace, res_trace, precoder = [], [], None
    start = time.perf_counter()
    try:
        steering, gains = _users(point, drop)
        npa = point.npa
        design_npa = npa if design == "nonlinear" else npa.linearized()
        spec = point.architecture_spec(architecture)
        comps = point.components
        problem = EEProblem(steering, gains, design_npa, point.noise, point.bandwidth_hz,
                            spec, comps)
        config = SolverConfig(point.power_budget_w, inner_iters=point.inner_iters,
                              max_outer_iters=point.max_outer_iters)
        B, trace = dinkelbach_solve(problem, config)
        row.outer_iterations = trace.n_iter
        row.converged = trace.converged
        ee_trace = [(r.eta, r.objective, r.energy_efficiency, r.pa_power) for r in trace.outer]
        if spec.kind.is_digital:
            B_h = B
            row.residual = row.relative_residual = 0.0
        else:
            network = TrpsNetwork.from_spec(spec, point.r_high, point.r_low)
            kwargs = ({"max_iter": point.mm_max_iter} if network.arch == "fully"
                      else {"mm_rounds": point.mm_rounds})
            result = decompose(B, network, design_npa, **kwargs)
            B_h = result.precoder
            row.residual = result.residual
            row.relative_residual = result.residual / float(np.linalg.norm(B))
            res_trace = list(result.residual_trace)
        row.sum_rate_bound = sum_rate_bound(B_h, steering, gains, npa, point.noise)
        row.pa_power = pa_power(npa, B_h)
        row.transmitter_power = transmitter_power(spec, comps)
        row.energy_efficiency = (point.bandwidth_hz * row.sum_rate_bound
                                 / (row.pa_power + row.transmitter_power))
        if mc_validate:
            rng = np.random.default_rng(_seed_sequence(
                point, drop, index, point.architectures.index(architecture),
                DESIGNS.index(design), 1))
            rates, err = ergodic_rate_mc(B_h, steering, gains, point.rician_factor, npa,
                                         point.noise, point.mc_samples, rng,
                                         return_stderr=True)
            row.mc_sum_rate = float(rates.sum())
            row.mc_stderr = float(np.sqrt(np.sum(err**2)))
        if not trace.converged:
            row.status = "not_converged"
        if keep_precoder:
            precoder = B_h
    except Exception as exc:  # noqa: BLE001 - recorded per row
        logger.warning("point %s/%s/%s/%d failed: %s", value, architecture, design, drop, exc)
        row.status = f"failed: {type(exc).__name__}: {exc}"
    row.wall_time = time.perf_counter() - start
    return PointResult(row, ee_trace, res_trace, precoder)


def _tasks(scenario):
    n = len(scenario.sweep_values) if scenario.sweep != "none" else 1
    designs = DESIGNS if scenario.linear_baseline else DESIGNS[:1]
    return [(i, a, d, k) for i in range(n) for a in scenario.architectures
            for d in designs for k in range(scenario.drops)]


def _run_task(args):
    return run_point(*args)


def run_points(scenario: Scenario, mc_validate=False, keep_precoders=False, jobs=1):
    """All points of ``scenario`` as :class:`PointResult`, in canonical order."""
    mc_validate = mc_validate or scenario.mc_validate
    tasks = [(scenario, *t, mc_validate, keep_precoders) for t in _tasks(scenario)]
    if jobs <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks))


def run_scenario(scenario: Scenario, mc_validate=False, jobs=1) -> List[ResultRow]:
    return [p.row for p in run_points(scenario, mc_validate=mc_validate, jobs=jobs)]


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def emit_csv(rows, path):
    """Write ``rows`` with a ``#`` units line, a header and 17-digit floats."""
    units = "; ".join(f"{k} [{v}]" for k, v in CSV_UNITS.items())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# units: {units}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into rows."""
    types = {f.name: f.type for f in dataclasses.fields(ResultRow)}
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    for rec in csv.DictReader(lines):
        kwargs = {}
        for name, raw in rec.items():
            t = types[name]
            if t in (bool, "bool"):
                kwargs[name] = raw == "true"
            elif t in (int, "int"):
                kwargs[name] = int(raw)
            elif t in (float, "float"):
                kwargs[name] = float(raw)
            else:
                kwargs[name] = raw
        rows.append(ResultRow(**kwargs))
    return rows


_PLOT_TEMPLATE = '''"""Plot {csv_name}: energy efficiency versus {sweep}, one curve per architecture and design."""

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
curves = defaultdict(lambda: defaultdict(list))
with open(here / "{csv_name}", encoding="utf-8", newline="") as fh:
    lines = [ln for ln in fh if not ln.startswith("#")]
for rec in csv.DictReader(lines):
    ee = float(rec["energy_efficiency"])
    if ee == ee:
        label = rec["architecture"] + " (" + rec["design"] + ")"
        curves[label][float(rec["sweep_value"])].append(ee)

fig, ax = plt.subplots(figsize=(6, 4))
for label in sorted(curves):
    xs = sorted(curves[label])
    ys = [sum(curves[label][x]) / len(curves[label][x]) for x in xs]
    ax.plot(xs, ys, marker="o", label=label)
ax.set_xlabel("{sweep}")
ax.set_ylabel("energy efficiency [bit/J]")
ax.grid(True, alpha=0.3)
if curves:
    ax.legend()
fig.tight_layout()
fig.savefig(here / "{png_name}", dpi=150)
'''


def emit_plot_script(rows, path, csv_name="results.csv"):
    """Write a standalone matplotlib script that plots the CSV next to it."""
    sweep = rows[0].sweep if rows else "sweep value"
    path = Path(path)
    path.write_text(
        _PLOT_TEMPLATE.format(csv_name=csv_name, sweep=sweep, png_name=path.stem + ".png"),
        encoding="utf-8",
    )


def write_outputs(points, out_dir, save_precoders=False):
    """Write results, timings, Dinkelbach traces, residual traces and the plot script."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [p.row for p in points]
    emit_csv(rows, out / "results.csv")
    emit_plot_script(rows, out / "plot_results.py")
    keys = ["architecture", "design", "drop", "sweep_value"]
    with open(out / "timings.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys + ["wall_time_s"])
        for r in rows:
            w.writerow([_fmt(getattr(r, k)) for k in keys] + [_fmt(r.wall_time)])
    with open(out / "trace.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys + ["outer", "eta", "objective", "energy_efficiency", "pa_power"])
        for p in points:
            for i, rec in enumerate(p.ee_trace):
                w.writerow([_fmt(getattr(p.row, k)) for k in keys] + [i]
                           + [_fmt(float(v)) for v in rec])
    with open(out / "residuals.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys + ["step", "residual"])
        for p in points:
            for i, v in enumerate(p.residual_trace):
                w.writerow([_fmt(getattr(p.row, k)) for k in keys] + [i, _fmt(float(v))])
    if save_precoders:
        arrays = {
            f"{p.row.architecture}__{p.row.design}__{p.row.drop}__{i}": p.precoder
            for i, p in enumerate(points) if p.precoder is not None
        }
        np.savez(out / "precoders.npz", **arrays)


def _parser():
    p = argparse.ArgumentParser(
        prog="leo-hybrid",
        description="Run an energy-efficiency sweep for hybrid precoding with "
                    "twin-resolution phase shifters and nonlinear PAs.",
    )
    p.add_argument("--scenario", required=True,
                   help="scenario file, or the name of a built-in scenario")
    p.add_argument("--out", default=None, help="output directory (default: results/<name>)")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed (u64)")
    p.add_argument("--paper-scale", action="store_true",
                   help="use the 12x12 array with 9 users and 9 RF chains")
    p.add_argument("--mc-validate", action="store_true",
                   help="also estimate the ergodic sum rate by Monte Carlo")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--save-precoders", action="store_true",
                   help="store every hybrid precoder in precoders.npz")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _error(kind, message, code):
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        scenario = load_scenario(args.scenario)
        if args.seed is not None:
            scenario = dataclasses.replace(scenario, seed=args.seed)
        if args.paper_scale:
            scenario = scenario.paper_scale()
        if args.jobs < 1:
            raise ScenarioError("--jobs must be at least 1")
    except ScenarioError as exc:
        return _error("scenario", str(exc), 2)
    out = Path(args.out) if args.out else Path("results") / scenario.name
    try:
        points = run_points(scenario, mc_validate=args.mc_validate,
                            keep_precoders=args.save_precoders, jobs=args.jobs)
        write_outputs(points, out, save_precoders=args.save_precoders)
    except OSError as exc:
        return _error("io", str(exc), 1)
    failed = [p.row for p in points if p.row.status.startswith("failed")]
    summary = {"scenario": scenario.name, "out": str(out), "rows": len(points),
               "failed": len(failed)}
    print(json.dumps(summary))
    if failed and len(failed) == len(points):
        return _error("run", "every point failed; see results.csv", 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
