"""Replicated Monte-Carlo study of the estimators on simulated SDE paths."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DomainError, HurstQVError
from .estimate import estimate_from_stats, estimate_known_g
from .quadvar import GridDesign, window_stats
from .sde import get_process, simulate

log = logging.getLogger(__name__)

ESTIMATORS = ("h1", "h2", "h3", "h4", "known_g")
_MASK64 = (1 << 64) - 1
SUMMARY_HEADER = ["n", "H", "estimator", "mse_scaled", "mad_scaled", "bias", "sd", "failures"]
RAW_HEADER = ["n", "H", "estimator", "rep", "estimate", "status"]


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, n_index: int, h_index: int, rep: int) -> int:
    state = splitmix64(base_seed & _MASK64)
    for part in (n_index, h_index, rep):
        state = splitmix64(state ^ part)
    return state


def mse_scale(estimator: str) -> float:
    return 1e5 if estimator == "known_g" else 1e3


@dataclass(frozen=True)
class ExperimentConfig:
    process: str = "I"
    n_list: tuple = (50, 150, 500)
    h_list: tuple = (0.55, 0.65, 0.85, 0.95)
    reps: int = 200
    base_seed: int = 0
    estimators: tuple = ESTIMATORS
    grid: dict = field(default_factory=dict)
    output_dir: str = "results"
    horizon: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "h_list", tuple(float(h) for h in self.h_list))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "grid", dict(self.grid))
        get_process(self.process)
        if self.reps < 1:
            raise DomainError(f"reps must be >= 1, got {self.reps}")
        if not self.n_list or any(n < 10 for n in self.n_list):
            raise DomainError("n_list entries must be >= 10")
        if not self.h_list or any(not 0.5 < h < 1.0 for h in self.h_list):
            raise DomainError("h_list entries must lie in (1/2, 1)")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown or not self.estimators:
            raise DomainError(f"unknown estimators {sorted(unknown)}; choose from {ESTIMATORS}")
        bad_grid = set(self.grid) - {"beta", "phi_mode", "alpha"}
        if bad_grid:
            raise DomainError(f"unknown grid keys {sorted(bad_grid)}")
        if not 0 <= self.base_seed < 2**64:
            raise DomainError("base_seed must be a 64-bit unsigned integer")
        for n in self.n_list:
            self.design(n)

    def design(self, n: int) -> GridDesign:
        return GridDesign(n, **self.grid)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise DomainError(f"unknown config keys {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def as_dict(self) -> dict:
        out = asdict(self)
        for key in ("n_list", "h_list", "estimators"):
            out[key] = list(out[key])
        return out


def summarize(estimates, h_true: float) -> tuple[float, float, float, float]:
    """Return (mse, mad, bias, sd) of ``estimates`` around ``h_true``."""
    e = np.asarray(estimates, dtype=float)
    if e.size == 0:
        raise DomainError("cannot summarize an empty set of estimates")
    err = e - h_true
    mse = float(np.mean(err * err))
    mad = float(np.mean(np.abs(err)))
    bias = float(np.mean(err))
    sd = float(np.std(err, ddof=1)) if e.size > 1 else 0.0
    return mse, mad, bias, sd


@dataclass
class CellSummary:
    n: int
    H: float
    estimator: str
    mse: Optional[float]
    mad: Optional[float]
    bias: Optional[float]
    sd: Optional[float]
    failures: int
    successes: int
    out_of_hypothesis: bool = False


@dataclass
class RawEstimate:
    n: int
    H: float
    estimator: str
    rep: int
    estimate: Optional[float]
    status: str


@dataclass
class ExperimentReport:
    config: dict
    cells: list
    raw: list

    def cell(self, n, h, estimator) -> CellSummary:
        for c in self.cells:
            if c.n == n and c.H == h and c.estimator == estimator:
                return c
        raise KeyError((n, h, estimator))

    def summary_dict(self) -> dict:
        return {"config": self.config, "cells": [asdict(c) for c in self.cells]}

    def to_dict(self) -> dict:
        out = self.summary_dict()
        out["raw"] = [asdict(r) for r in self.raw]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        return cls(
            config=data["config"],
            cells=[CellSummary(**c) for c in data["cells"]],
            raw=[RawEstimate(**r) for r in data.get("raw", [])],
        )


def _run_unit(config: ExperimentConfig, n_index: int, h_index: int, rep: int):
    """One replication: simulate a path and evaluate every requested estimator on it."""
    n, hurst = config.n_list[n_index], config.h_list[h_index]
    spec = get_process(config.process)
    design = config.design(n)
    seed = derive_seed(config.base_seed, n_index, h_index, rep)
    results = {}
    try:
        path = simulate(spec, design.m_n, config.horizon, hurst, seed)
    except HurstQVError as exc:
        return {name: (None, exc.code) for name in config.estimators}
    stats = None
    for name in config.estimators:
        try:
            if name == "known_g":
                est = estimate_known_g(path, spec.diffusion, confidence=None)
            else:
                if stats is None:
                    stats = window_stats(path, design)
                est = estimate_from_stats(stats, int(name[1]), confidence=None)
            results[name] = (est.h_hat, "ok")
        except HurstQVError as exc:
            results[name] = (None, exc.code)
    return results


def _run_chunk(config, units):
    return [_run_unit(config, *u) for u in units]


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """Run every (n, H, rep) unit; the report does not depend on ``threads``."""
    units = [
        (i, j, r)
        for i in range(len(config.n_list))
        for j in range(len(config.h_list))
        for r in range(config.reps)
    ]
    if threads > 1 and len(units) > 1:
        chunk = max(1, math.ceil(len(units) / (4 * threads)))
        chunks = [units[k:k + chunk] for k in range(0, len(units), chunk)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_chunk, [config] * len(chunks), chunks))
        outcomes = [res for part in parts for res in part]
    else:
        outcomes = _run_chunk(config, units)
    by_unit = dict(zip(units, outcomes))

    spec = get_process(config.process)
    cells, raw = [], []
    for i, n in enumerate(config.n_list):
        for j, hurst in enumerate(config.h_list):
            for name in config.estimators:
                values = []
                failures = 0
                for r in range(config.reps):
                    value, status = by_unit[(i, j, r)][name]
                    raw.append(RawEstimate(n, hurst, name, r, value, status))
                    if value is None:
                        failures += 1
                    else:
                        values.append(value)
                stats = summarize(values, hurst) if values else (None,) * 4
                cells.append(CellSummary(
                    n, hurst, name, *stats, failures=failures, successes=len(values),
                    out_of_hypothesis=name == "known_g" and not spec.diffusion_bounded_below,
                ))
                log.info("n=%d H=%g %s: mse=%s failures=%d", n, hurst, name, stats[0], failures)
    summary_config = config.as_dict()
    summary_config.pop("output_dir")
    return ExperimentReport(summary_config, cells, raw)


def _fmt(x):
    return "" if x is None else f"{x:.17g}"


def write_report(report: ExperimentReport, output_dir, formats=("csv", "json")) -> list:
    """Write ``summary.csv``, ``raw.csv`` and/or ``summary.json`` into ``output_dir``.

    CSV columns use the display scaling (MSE x1e3, or x1e5 for known_g; mean
    absolute deviation x10); JSON holds unscaled values.
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        with open(out / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SUMMARY_HEADER)
            for c in report.cells:
                scale = mse_scale(c.estimator)
                w.writerow([
                    c.n, repr(c.H), c.estimator,
                    _fmt(None if c.mse is None else c.mse * scale),
                    _fmt(None if c.mad is None else c.mad * 10.0),
                    _fmt(c.bias), _fmt(c.sd), c.failures,
                ])
        with open(out / "raw.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RAW_HEADER)
            for r in report.raw:
                w.writerow([r.n, repr(r.H), r.estimator, r.rep, _fmt(r.estimate), r.status])
        written += [out / "summary.csv", out / "raw.csv"]
    if "json" in formats:
        with open(out / "summary.json", "w") as fh:
            json.dump(report.summary_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(out / "summary.json")
    return written


def format_table(report: ExperimentReport) -> str:
    """Plain-text summary: scaled MSE and mean absolute deviation to 4 significant digits."""
    lines = [f"{'n':>5} {'H':>5} {'estimator':>9} {'mse_scale':>9} {'mse':>8} {'mad*10':>8} {'fail':>5}"]
    for c in report.cells:
        mse = "-" if c.mse is None else f"{c.mse * mse_scale(c.estimator):.4g}"
        mad = "-" if c.mad is None else f"{c.mad * 10:.4g}"
        scale = f"{mse_scale(c.estimator):.0e}"
        lines.append(f"{c.n:>5} {c.H:>5} {c.estimator:>9} {scale:>9} {mse:>8} {mad:>8} {c.failures:>5}")
    return "\n".join(lines)


def default_threads() -> int:
    return os.cpu_count() or 1
