"""Figure presets, experiment runs, CSV/fit output and parameter sweeps."""
import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import PRESET_DIMS, SWEEPABLE, ConfigError, parse_value
from .diagnostics import EnergyRecord, InsufficientDataError, fit_decay_rate, record
from .integrators import run
from .spectral_core import Field, make_grid
from .svgplot import energy_figure

log = logging.getLogger(__name__)

CSV_HEADER = EnergyRecord.columns()
SUMMARY_HEADER = (
    "value", "status", "alpha_phi", "r2_phi", "alpha_gap", "r2_gap", "q_final", "e_psi_final", "error",
)


def _zero(*xs):
    return np.zeros_like(xs[0])


_PRESETS = {
    "fig1_left": (lambda x: 1 + 3 * np.cos(x), _zero),
    "fig1_right": (lambda x: (1 + 0.5 * np.cos(x)) ** 2, _zero),
    "fig2_left": (
        lambda x, y: 1 + np.cos(x) + 2 * np.cos(y),
        lambda x, y: np.sin(x) + 2 * np.sin(y),
    ),
    "fig2_right": (lambda x, y: 1 + 0.2 * np.cos(x) + 0.5 * np.cos(y), _zero),
}


def preset(name, grid):
    """Initial data ``(psi0, v0)`` of the named figure preset."""
    if name not in _PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(_PRESETS)}")
    if PRESET_DIMS[name] != grid.dim:
        raise ValueError(f"preset {name} needs a {PRESET_DIMS[name]}-dimensional grid, got dim={grid.dim}")
    f0, f1 = _PRESETS[name]
    return Field.from_function(grid, f0), Field.from_function(grid, f1)


def initial_data(cfg):
    grid = make_grid(cfg.dim, cfg.n)
    if cfg.preset:
        psi0, v0 = preset(cfg.preset, grid)
    else:
        psi0 = Field.from_modes(grid, _merge(cfg.psi0))
        v0 = Field.from_modes(grid, _merge(cfg.v0))
    if cfg.amplitude != 1.0:
        psi0, v0 = psi0 * cfg.amplitude, v0 * cfg.amplitude
    return psi0, v0


def _merge(modes):
    out = {}
    for kvec, amp in modes:
        out[kvec] = out.get(kvec, 0) + amp
    return out


def simulate(cfg):
    """Run the integrator and return the sampled ``EnergyRecord`` list (no I/O)."""
    psi0, v0 = initial_data(cfg)
    params = cfg.params()
    records = []

    def observer(_step, state):
        records.append(record(state, cfg.dt, cfg.p, cfg.eps, cfg.q_position, potential=cfg.nonlinear))

    run(psi0, v0, params, observer, stride=cfg.observe_stride)
    return records


def format_float(x):
    return f"{x:.17g}"


def write_series(path, records):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r.step] + [format_float(v) for v in r.as_tuple()[1:]])


def read_series(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header {rows[0] if rows else None}")
    return [EnergyRecord(int(row[0]), *(float(v) for v in row[1:])) for row in rows[1:]]


def fit_series(records, column, cfg):
    series = [(r.t, getattr(r, column)) for r in records]
    floor = None
    if series:
        floor = max(cfg.fit_floor * series[0][1], 1e-300)
    return fit_decay_rate(series, window=(cfg.fit_start, cfg.t_final), floor=floor)


def _fit_block(name, records, column, cfg):
    lines = [f"[{name}]"]
    try:
        fit = fit_series(records, column, cfg)
    except InsufficientDataError as exc:
        lines.append("status=insufficient_data")
        lines.append(f"error={exc}")
        return lines, None
    lines += [
        f"alpha={format_float(fit.alpha)}",
        f"c={format_float(fit.c)}",
        f"r2={format_float(fit.r2)}",
        f"window={format_float(fit.window[0])},{format_float(fit.window[1])}",
    ]
    return lines, fit


def run_experiment(cfg, out_dir=None):
    """Simulate, then write ``series.csv``, ``fit.txt`` and (optionally) ``energies.svg``."""
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = simulate(cfg)
    write_series(out / "series.csv", records)
    fits = {}
    text = []
    for name in ("e_phi", "gap"):
        lines, fits[name] = _fit_block(name, records, name, cfg)
        text += lines
    (out / "fit.txt").write_text("\n".join(text) + "\n", encoding="utf-8")
    if cfg.emit_plots:
        title = cfg.preset or f"d={cfg.dim}"
        (out / "energies.svg").write_text(energy_figure(records, title), encoding="utf-8")
    log.info("wrote %d records to %s", len(records), out)
    return records


def _summary_row(value, records=None, fits=None, error=None):
    if error is not None:
        return {"value": value, "status": "error", "error": error}
    row = {"value": value, "status": "ok", "error": ""}
    for key, fit in fits.items():
        row[f"alpha_{key}"] = format_float(fit.alpha) if fit else ""
        row[f"r2_{key}"] = format_float(fit.r2) if fit else ""
    row["q_final"] = format_float(records[-1].q)
    row["e_psi_final"] = format_float(records[-1].e_psi)
    return row


def _sweep_one(cfg, out_dir, value):
    try:
        records = run_experiment(cfg, out_dir)
        fits = {}
        for key, col in (("phi", "e_phi"), ("gap", "gap")):
            try:
                fits[key] = fit_series(records, col, cfg)
            except InsufficientDataError:
                fits[key] = None
        return _summary_row(value, records, fits)
    except Exception as exc:  # noqa: BLE001 - recorded in the summary, siblings continue
        return _summary_row(value, error=f"{type(exc).__name__}: {exc}")


def parse_sweep_values(axis, text):
    if axis not in SWEEPABLE:
        raise ConfigError(f"axis {axis!r} is not sweepable; choose from {SWEEPABLE}")
    items = [v for v in text.split(",") if v.strip()]
    if not items:
        raise ConfigError("sweep needs at least one value")
    try:
        return [parse_value(axis, v) for v in items]
    except ValueError as exc:
        raise ConfigError(f"bad sweep value for {axis}: {exc}") from None


def sweep(base, axis, values, out_dir=None, max_workers=None):
    """Independent runs over ``values`` of ``axis``; writes per-run dirs and ``summary.csv``."""
    if axis not in SWEEPABLE:
        raise ConfigError(f"axis {axis!r} is not sweepable; choose from {SWEEPABLE}")
    values = list(values)
    if not values:
        raise ConfigError("sweep needs at least one value")
    root = Path(out_dir or base.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    jobs = []
    for value in values:
        sub = root / f"{axis}_{value}"
        try:
            cfg = base.with_value(axis, value)
        except ConfigError as exc:
            jobs.append((value, None, sub, str(exc)))
            continue
        jobs.append((value, cfg, sub, None))

    if max_workers is None:
        max_workers = min(len(jobs), os.cpu_count() or 1)
    results = {}
    runnable = [(v, c, s) for v, c, s, err in jobs if err is None]
    if max_workers > 1 and len(runnable) > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            futures = {pool.submit(_sweep_one, c, s, v): i for i, (v, c, s) in enumerate(runnable)}
            for fut, i in futures.items():
                results[i] = fut.result()
    else:
        for i, (v, c, s) in enumerate(runnable):
            results[i] = _sweep_one(c, s, v)

    rows, it = [], iter(range(len(runnable)))
    for value, cfg, _sub, err in jobs:
        rows.append(_summary_row(value, error=err) if err is not None else results[next(it)])
    with open(root / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_HEADER, lineterminator="\n", restval="")
        w.writeheader()
        w.writerows(rows)
    return rows
