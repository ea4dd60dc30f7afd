"""Seeded Monte Carlo sweeps over source power and SNR thresholds.

Instance ``j`` of a sweep is drawn with seed ``base_seed + j`` and reused in
every cell (common random numbers); only the source power and thresholds
change between cells. Per-instance results are reduced in index order, so
the output does not depend on evaluation order.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .model import NetworkInstance, PowerConfig, Thresholds, achievable_rate, sample_instance
from .p1 import solve_p1
from .p2 import solve_p2_sdr
from .sdp import SolverSettings

log = logging.getLogger(__name__)

CSV_HEADER = ["sweep", "P_s", "gamma_d", "gamma_e", "series", "mean", "stderr",
              "n_success", "n_infeasible", "n_gap"]
INSTANCE_HEADER = ["sweep", "P_s", "gamma_d", "gamma_e", "series", "instance", "seed",
                   "instance_hash", "status", "value"]

# shrink factors below this count as a relaxation gap in the SNR sweep
_SHRINK_TOL = 1e-6


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep parameters. Grid defaults are reconstructions, not published values."""

    M: int = 5
    K: int = 5
    P_i: float = 10.0
    sigma2: float = 1.0
    P_s_grid: tuple = tuple(float(p) for p in range(1, 21))
    gamma_e_grid: tuple = (0.005, 0.01, 0.05)
    gamma_d: float = 0.01
    gamma_e: float = 0.005
    n_instances: int = 100
    base_seed: int = 0
    output_path: str = "results.csv"

    def __post_init__(self):
        if self.M < 1 or self.K < 0:
            raise ConfigError(f"invalid dimensions M={self.M}, K={self.K}")
        if not self.P_s_grid or not self.gamma_e_grid:
            raise ConfigError("grids must be nonempty")
        if self.n_instances < 1:
            raise ConfigError("n_instances must be at least 1")
        if min(self.P_s_grid) <= 0 or self.sigma2 <= 0 or self.P_i < 0:
            raise ConfigError("powers must be positive")
        if min(self.gamma_e_grid) <= 0 or self.gamma_d <= 0 or self.gamma_e <= 0:
            raise ConfigError("thresholds must be positive")

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        """Parse ``key = value`` lines; ``#`` starts a comment, lists are comma separated."""
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, val = (part.strip() for part in line.split("=", 1))
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            try:
                if key.endswith("_grid"):
                    values[key] = tuple(float(v) for v in val.split(",") if v.strip())
                elif types[key] == "int":
                    values[key] = int(val)
                elif types[key] == "float":
                    values[key] = float(val)
                else:
                    values[key] = val
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
        return cls(**values)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text())

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def instances(self) -> list[NetworkInstance]:
        power = PowerConfig.uniform(self.M, self.P_s_grid[0], self.P_i, self.sigma2)
        return [sample_instance(self.M, self.K, power, seed=self.base_seed + j)
                for j in range(self.n_instances)]


def instance_hash(instance: NetworkInstance) -> str:
    """Digest of the channel gains only (power settings excluded)."""
    gains = np.concatenate([instance.h_s, instance.h_d, instance.h_e.ravel()])
    return hashlib.sha256(gains.tobytes()).hexdigest()[:16]


@dataclass
class SweepRecord:
    sweep: str
    P_s: float
    gamma_d: float
    gamma_e: float
    series: str
    values: list = field(default_factory=list)
    n_infeasible: int = 0
    n_gap: int = 0

    @property
    def n_success(self) -> int:
        return len(self.values)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values)) if self.values else math.nan

    @property
    def stderr(self) -> float:
        if len(self.values) < 2:
            return math.nan
        return float(np.std(self.values, ddof=1) / math.sqrt(len(self.values)))


def _fmt(x) -> str:
    return f"{x:.9g}" if isinstance(x, float) else str(x)


class _InstanceLog:
    def __init__(self):
        self.rows: list[list] = []

    def add(self, sweep, P_s, gamma_d, gamma_e, series, j, seed, h, status, value):
        self.rows.append([sweep, P_s, gamma_d, gamma_e, series, j, seed, h, status, value])


def run_snr_sweep(config: ExperimentConfig, settings: SolverSettings | None = None,
                  instance_log: _InstanceLog | None = None) -> list[SweepRecord]:
    """Destination-SNR maximization over every (P_s, gamma_e) cell.

    Series ``rate`` is ``log2(1 + SNR_d)`` at the recovered scaling vector,
    ``sdr_rate`` the same for the relaxation value, ``secure_rate`` the
    thresholded half-log rate using ``config.gamma_d``.
    """
    base = config.instances()
    hashes = [instance_hash(inst) for inst in base]
    records = []
    for P_s in config.P_s_grid:
        for ge in config.gamma_e_grid:
            th = Thresholds.uniform(config.gamma_d, ge, config.K)
            cell = {name: SweepRecord("snr", P_s, config.gamma_d, ge, name)
                    for name in ("rate", "sdr_rate", "secure_rate")}
            for j, inst in enumerate(base):
                sol = solve_p1(inst.with_source_power(P_s), th, settings)
                ok = sol.status == "optimal"
                gapped = sol.shrink_factor < 1.0 - _SHRINK_TOL
                values = {"rate": sol.rate, "sdr_rate": achievable_rate(max(sol.relaxed_snr, 0.0)),
                          "secure_rate": sol.secrecy_rate}
                for name, rec in cell.items():
                    if ok:
                        rec.values.append(values[name])
                    else:
                        rec.n_infeasible += 1
                    rec.n_gap += int(gapped)
                    if instance_log is not None:
                        instance_log.add("snr", P_s, config.gamma_d, ge, name, j,
                                         config.base_seed + j, hashes[j], sol.status,
                                         values[name])
            log.info("snr sweep P_s=%g gamma_e=%g: mean rate %.6g", P_s, ge, cell["rate"].mean)
            records.extend(cell.values())
    return records


def run_power_sweep(config: ExperimentConfig, settings: SolverSettings | None = None,
                    instance_log: _InstanceLog | None = None) -> list[SweepRecord]:
    """Total relay power minimization over the P_s grid.

    Series ``sdr`` is the relaxation value, ``recovered`` the power of the
    recovered scaling vector (instances with a resolved rank-one solution
    only), ``analytical`` the eigenvalue lower bound. ``sdr`` and
    ``analytical`` are averaged over the same instances: those whose
    relaxation is feasible.
    """
    base = config.instances()
    hashes = [instance_hash(inst) for inst in base]
    th = Thresholds.uniform(config.gamma_d, config.gamma_e, config.K)
    records = []
    for P_s in config.P_s_grid:
        cell = {name: SweepRecord("power", P_s, config.gamma_d, config.gamma_e, name)
                for name in ("sdr", "recovered", "analytical")}
        for j, inst in enumerate(base):
            sol = solve_p2_sdr(inst.with_source_power(P_s), th, settings)
            relaxed_ok = sol.status in ("optimal", "gap-unresolved") and math.isfinite(sol.lower_bound)
            values = {"sdr": sol.sdr_objective, "recovered": sol.total_power,
                      "analytical": sol.lower_bound}
            for name, rec in cell.items():
                ok = sol.status == "optimal" if name == "recovered" else relaxed_ok
                if ok:
                    rec.values.append(values[name])
                elif sol.status == "gap-unresolved":
                    rec.n_gap += 1
                else:
                    rec.n_infeasible += 1
                if instance_log is not None:
                    instance_log.add("power", P_s, config.gamma_d, config.gamma_e, name, j,
                                     config.base_seed + j, hashes[j], sol.status, values[name])
        log.info("power sweep P_s=%g: mean sdr %.6g, infeasible %d", P_s,
                 cell["sdr"].mean, cell["sdr"].n_infeasible)
        records.extend(cell.values())
    return records


def emit_csv(records: list[SweepRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r.sweep, _fmt(float(r.P_s)), _fmt(float(r.gamma_d)), _fmt(float(r.gamma_e)),
                        r.series, _fmt(r.mean), _fmt(r.stderr), r.n_success, r.n_infeasible,
                        r.n_gap])


def emit_instance_log(instance_log: _InstanceLog, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(INSTANCE_HEADER)
        for row in instance_log.rows:
            w.writerow([_fmt(x) if isinstance(x, float) else x for x in row])


def read_csv(path) -> list[dict]:
    """Parse a file written by :func:`emit_csv` back into typed rows."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append({
                "sweep": row["sweep"], "series": row["series"],
                **{k: float(row[k]) for k in ("P_s", "gamma_d", "gamma_e", "mean", "stderr")},
                **{k: int(row[k]) for k in ("n_success", "n_infeasible", "n_gap")},
            })
    return out
