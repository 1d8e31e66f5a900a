"""Experiment orchestration: seeded Monte Carlo sweeps over channel draws
producing CSV result tables for the three figure-class experiments
(rate regions, capacity scaling with relay count, DMT outage curves).

Work is partitioned over draw/batch indices with per-index RNG streams,
so a table's value columns are byte-identical for any worker count.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import joblib
import numpy as np

from . import __version__
from .af import af_rate_region
from .bounds import cutset_region
from .channel import NetworkDims, PowerConfig, PowerConstraint, draw_channels
from .dcm import dcm_rates
from .dmt import (
    DmtDims,
    Duplex,
    InsufficientEvents,
    Strategy,
    dmt_upper_full,
    outage_curve,
)
from .errors import ConfigError, TableValidationError

_EXPERIMENTS = ("RateRegion", "Scaling", "Dmt")
_CONSTRAINT_ALIASES = {
    "SumAcrossRelays": PowerConstraint.SUM_ACROSS_RELAYS,
    "PerRelay": PowerConstraint.PER_RELAY,
    "sum": PowerConstraint.SUM_ACROSS_RELAYS,
    "per_relay": PowerConstraint.PER_RELAY,
}
_STRATEGY_KINDS = ("CF_Full", "CF_Half", "UpperFull", "UpperHalf")
# Mean-ordering slack in bits for the table validator.
ORDER_SLACK = 1e-6
# Sentinel written in exponent columns when too few outage events exist.
MISSING_FIT = -1.0


@dataclass
class ExperimentConfig:
    """One experiment specification; mirrors the JSON config schema."""

    experiment: str
    dims: dict
    power: dict
    draws: int
    seed: int
    output_path: str | None = None
    beta_grid: list = field(default_factory=list)
    alpha_grid: list = field(default_factory=list)
    K_list: list = field(default_factory=list)
    snr_grid_db: list = field(default_factory=list)
    r_grid: list = field(default_factory=list)
    t_grid: list = field(default_factory=list)
    strategy: str = "CF_Full"
    t1: float | None = None
    t2: float | None = None
    min_target_bits: float = 1.0

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "dims": self.dims,
            "power": self.power,
            "draws": self.draws,
            "seed": self.seed,
            "output_path": self.output_path,
            "beta_grid": list(self.beta_grid),
            "alpha_grid": list(self.alpha_grid),
            "K_list": list(self.K_list),
            "snr_grid_db": list(self.snr_grid_db),
            "r_grid": [list(r) for r in self.r_grid],
            "t_grid": [list(t) for t in self.t_grid],
            "strategy": self.strategy,
            "t1": self.t1,
            "t2": self.t2,
            "min_target_bits": self.min_target_bits,
        }


def _fail(msg: str) -> ConfigError:
    return ConfigError(msg)


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build and validate an ExperimentConfig from parsed JSON."""
    if not isinstance(raw, dict):
        raise _fail("config root must be a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise _fail(f"unknown config fields: {sorted(unknown)}")
    try:
        cfg = ExperimentConfig(**raw)
    except TypeError as exc:
        raise _fail(f"bad config structure: {exc}") from exc
    _validate_config(cfg)
    return cfg


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise _fail(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _fail(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw)


def _validate_config(cfg: ExperimentConfig) -> None:
    if cfg.experiment not in _EXPERIMENTS:
        raise _fail(f"experiment must be one of {_EXPERIMENTS}, got {cfg.experiment!r}")
    if not isinstance(cfg.draws, int) or cfg.draws < 1:
        raise _fail(f"draws must be a positive integer, got {cfg.draws!r}")
    if not isinstance(cfg.seed, int) or cfg.seed < 0:
        raise _fail(f"seed must be a nonnegative integer, got {cfg.seed!r}")
    power = cfg.power
    for key in ("P_dB", "P_R_dB"):
        if key not in power or not np.isfinite(power[key]):
            raise _fail(f"power.{key} must be a finite number")
    kind = power.get("constraint_kind", "SumAcrossRelays")
    if kind not in _CONSTRAINT_ALIASES:
        raise _fail(
            f"power.constraint_kind must be one of {sorted(_CONSTRAINT_ALIASES)}"
        )
    if cfg.experiment == "RateRegion":
        dims = _network_dims(cfg)
        if dims.M != 1:
            raise _fail("RateRegion computes the optimal AF boundary; it needs M = 1")
        if not cfg.beta_grid:
            raise _fail("RateRegion needs a non-empty beta_grid")
        if any(not 0.0 <= b <= 1.0 for b in cfg.beta_grid):
            raise _fail("beta_grid entries must lie in [0, 1]")
        if not cfg.alpha_grid:
            raise _fail("RateRegion needs a non-empty alpha_grid")
        if any(not 0.0 < a < 1.0 for a in cfg.alpha_grid):
            raise _fail("alpha_grid entries must lie in (0, 1)")
    elif cfg.experiment == "Scaling":
        _network_dims(cfg)
        if not cfg.K_list:
            raise _fail("Scaling needs a non-empty K_list")
        if any(not isinstance(k, int) or k < 1 for k in cfg.K_list):
            raise _fail("K_list entries must be positive integers")
    else:
        ddims = _dmt_dims(cfg)
        if not cfg.snr_grid_db:
            raise _fail("Dmt needs a non-empty snr_grid_db")
        if not cfg.r_grid:
            raise _fail("Dmt needs a non-empty r_grid of [r12, r21] pairs")
        rmax = min(ddims.m1, ddims.m2)
        for pair in cfg.r_grid:
            if len(pair) != 2 or any(not 0.0 <= r <= rmax for r in pair):
                raise _fail(
                    f"r_grid entries must be [r12, r21] pairs within [0, {rmax}]"
                )
        if cfg.strategy not in _STRATEGY_KINDS:
            raise _fail(f"strategy must be one of {_STRATEGY_KINDS}")
        if cfg.strategy.endswith("Half"):
            if cfg.t1 is None or cfg.t2 is None:
                raise _fail(f"strategy {cfg.strategy} needs t1 and t2")
            if not (cfg.t1 > 0 and cfg.t2 > 0 and cfg.t1 + cfg.t2 < 1):
                raise _fail("need t1, t2 > 0 with t1 + t2 < 1")
        if cfg.draws < 1000:
            raise _fail("Dmt uses draws as trials per SNR point; needs >= 1000")


def _network_dims(cfg: ExperimentConfig) -> NetworkDims:
    try:
        return NetworkDims(
            M=int(cfg.dims["M"]), N=int(cfg.dims["N"]), K=int(cfg.dims.get("K", 1))
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise _fail(f"dims must carry positive integers M, N[, K]: {exc}") from exc


def _dmt_dims(cfg: ExperimentConfig) -> DmtDims:
    duplex = cfg.dims.get("duplex", "Full")
    try:
        return DmtDims(
            m1=int(cfg.dims["m1"]),
            m2=int(cfg.dims["m2"]),
            mr=int(cfg.dims["mr"]),
            duplex=Duplex(duplex),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise _fail(f"dims must carry positive integers m1, m2, mr: {exc}") from exc


def _power_config(cfg: ExperimentConfig) -> PowerConfig:
    return PowerConfig(
        P=10.0 ** (cfg.power["P_dB"] / 10.0),
        P_R=10.0 ** (cfg.power["P_R_dB"] / 10.0),
        constraint=_CONSTRAINT_ALIASES[cfg.power.get("constraint_kind", "SumAcrossRelays")],
    )


def _dmt_strategy(cfg: ExperimentConfig) -> Strategy:
    if cfg.strategy == "CF_Full":
        return Strategy.cf_full()
    if cfg.strategy == "CF_Half":
        return Strategy.cf_half(cfg.t1, cfg.t2)
    if cfg.strategy == "UpperFull":
        return Strategy.upper_full()
    return Strategy.upper_half(cfg.t1, cfg.t2)


# ---------------------------------------------------------------------------
# Result tables
# ---------------------------------------------------------------------------


@dataclass
class ResultTable:
    columns: tuple[str, ...]
    rows: np.ndarray
    metadata: dict

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise ValueError(
                f"rows shape {self.rows.shape} does not match {len(self.columns)} columns"
            )
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("result tables must not contain NaN or infinities")

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


def write_table(table: ResultTable, path: str) -> None:
    """CSV with '# ' metadata lines, a header row, and 9-significant-digit
    values; the value section is byte-stable for a given config."""
    lines = []
    for key, value in table.metadata.items():
        lines.append(f"# {key}: {value}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(format(v, ".9g") for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_table(path: str) -> ResultTable:
    metadata = {}
    columns = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ": " in body:
                    key, value = body.split(": ", 1)
                    metadata[key] = value
                continue
            if columns is None:
                columns = tuple(line.split(","))
                continue
            rows.append([float(v) for v in line.split(",")])
    if columns is None:
        raise ValueError(f"{path} has no header row")
    return ResultTable(columns=columns, rows=np.asarray(rows, dtype=float), metadata=metadata)


def value_section(path: str) -> str:
    """Header plus data rows, with metadata lines stripped; the part of a
    result file that must reproduce byte-identically."""
    with open(path) as fh:
        return "".join(line for line in fh if not line.startswith("#"))


def validate_table(table: ResultTable, experiment: str) -> None:
    """Post-pass ordering checks before a table is written."""
    cols = table.columns
    if experiment == "RateRegion":
        if np.any(table.rows < -ORDER_SLACK):
            raise TableValidationError("negative rate in rate-region table")
        for direction in ("12", "21"):
            ub_col = f"ub_r{direction}_a0.5"
            if ub_col not in cols:
                continue
            ub = table.column(ub_col)
            for col in (f"af_r{direction}", f"dcm_r{direction}"):
                if np.any(table.column(col) > ub + ORDER_SLACK):
                    raise TableValidationError(
                        f"{col} exceeds {ub_col}: ordering invariant violated"
                    )
    elif experiment == "Scaling":
        gap = table.column("ub_sum") - table.column("dcm_sum")
        if np.any(gap < -ORDER_SLACK):
            raise TableValidationError("upper bound fell below the DCM rate")
        if np.any(np.abs(gap - table.column("gap")) > 1e-9):
            raise TableValidationError("gap column inconsistent with ub_sum - dcm_sum")
    elif experiment == "Dmt":
        for col in ("p_out_12", "p_out_21"):
            p = table.column(col)
            if np.any((p < 0) | (p > 1)):
                raise TableValidationError(f"{col} outside [0, 1]")


def _base_metadata(cfg: ExperimentConfig, wall_time: float) -> dict:
    return {
        "tool": "twrelay",
        "version": __version__,
        "experiment": cfg.experiment,
        "config": json.dumps(cfg.to_dict(), sort_keys=True),
        "seed": str(cfg.seed),
        "wall_time_s": f"{wall_time:.3f}",
    }


def _pmap(fn, argument_tuples, jobs: int):
    if jobs <= 1:
        return [fn(*args) for args in argument_tuples]
    return joblib.Parallel(n_jobs=jobs)(
        joblib.delayed(fn)(*args) for args in argument_tuples
    )


# ---------------------------------------------------------------------------
# Workers (module level so joblib can pickle them by reference)
# ---------------------------------------------------------------------------


def _rate_region_draw(m, n, k, p, p_r, kind_value, betas, alphas, seed, draw_idx):
    dims = NetworkDims(M=m, N=n, K=k)
    pc = PowerConfig(P=p, P_R=p_r, constraint=PowerConstraint(kind_value))
    ch = draw_channels(dims, seed, draw_idx)
    region = af_rate_region(ch, pc, p, betas)
    af_pairs = [(s.r12, s.r21) for s in region.samples]
    dcm_pair = dcm_rates(ch, p, pc)
    caps = cutset_region(ch, p, p_r, alphas)
    out = []
    for r12, r21 in af_pairs:
        out.extend((r12, r21))
    out.extend(dcm_pair)
    for i in range(len(alphas)):
        out.extend((caps.cap12[i], caps.cap21[i]))
    return np.asarray(out)


def _scaling_draw(m, n, k, p, p_r, kind_value, seed, draw_idx):
    dims = NetworkDims(M=m, N=n, K=k)
    pc = PowerConfig(P=p, P_R=p_r, constraint=PowerConstraint(kind_value))
    ch = draw_channels(dims, seed, draw_idx)
    r12, r21 = dcm_rates(ch, p, pc)
    caps = cutset_region(ch, p, p_r, (0.5,))
    return np.asarray([r12 + r21, caps.cap12[0] + caps.cap21[0]])


# ---------------------------------------------------------------------------
# Experiment runners
# ---------------------------------------------------------------------------


def run_rate_region(cfg: ExperimentConfig, jobs: int = 1) -> ResultTable:
    """Monte Carlo mean rate-region table: optimal AF and DCM achievable
    pairs per beta, with cut-set caps per alpha."""
    start = time.perf_counter()
    dims = _network_dims(cfg)
    pc = _power_config(cfg)
    betas = [float(b) for b in cfg.beta_grid]
    alphas = [float(a) for a in cfg.alpha_grid]
    args = [
        (dims.M, dims.N, dims.K, pc.P, pc.P_R, pc.constraint.value, betas, alphas,
         cfg.seed, i)
        for i in range(cfg.draws)
    ]
    per_draw = np.stack(_pmap(_rate_region_draw, args, jobs))
    means = per_draw.mean(axis=0)
    n_beta, n_alpha = len(betas), len(alphas)
    af = means[: 2 * n_beta].reshape(n_beta, 2)
    dcm = means[2 * n_beta : 2 * n_beta + 2]
    caps = means[2 * n_beta + 2 :].reshape(n_alpha, 2)
    columns = ["beta", "af_r12", "af_r21", "dcm_r12", "dcm_r21"]
    for a in alphas:
        columns.extend([f"ub_r12_a{a:g}", f"ub_r21_a{a:g}"])
    rows = np.empty((n_beta, len(columns)))
    for i, beta in enumerate(betas):
        row = [beta, af[i, 0], af[i, 1], dcm[0], dcm[1]]
        for j in range(n_alpha):
            row.extend([caps[j, 0], caps[j, 1]])
        rows[i] = row
    table = ResultTable(
        columns=tuple(columns),
        rows=rows,
        metadata=_base_metadata(cfg, time.perf_counter() - start),
    )
    validate_table(table, "RateRegion")
    return table


def run_scaling(cfg: ExperimentConfig, jobs: int = 1) -> ResultTable:
    """Mean DCM sum rate and cut-set cap (alpha = 1/2) per relay count."""
    start = time.perf_counter()
    dims = _network_dims(cfg)
    pc = _power_config(cfg)
    args = [
        (dims.M, dims.N, int(k), pc.P, pc.P_R, pc.constraint.value, cfg.seed, i)
        for k in cfg.K_list
        for i in range(cfg.draws)
    ]
    flat = np.stack(_pmap(_scaling_draw, args, jobs))
    per_k = flat.reshape(len(cfg.K_list), cfg.draws, 2).mean(axis=1)
    rows = np.column_stack(
        [
            np.asarray(cfg.K_list, dtype=float),
            per_k[:, 0],
            per_k[:, 1],
            per_k[:, 1] - per_k[:, 0],
        ]
    )
    table = ResultTable(
        columns=("K", "dcm_sum", "ub_sum", "gap"),
        rows=rows,
        metadata=_base_metadata(cfg, time.perf_counter() - start),
    )
    validate_table(table, "Scaling")
    return table


def run_dmt(cfg: ExperimentConfig, jobs: int = 1) -> ResultTable:
    """Outage curves and fitted exponents per (r12, r21) pair, alongside
    the analytic cooperative-bound values.

    SNR points with too few events flag their exponent columns with
    ``fit_ok_* = 0`` and the sentinel value -1 instead of aborting.
    """
    start = time.perf_counter()
    dims = _dmt_dims(cfg)
    strategy = _dmt_strategy(cfg)
    rows = []
    for r12, r21 in cfg.r_grid:
        try:
            curve = outage_curve(
                dims, float(r12), float(r21), cfg.snr_grid_db, cfg.draws,
                cfg.seed, strategy, jobs=jobs, min_target_bits=cfg.min_target_bits,
            )
        except InsufficientEvents as exc:
            curve = exc.curve
        d12a, _ = dmt_upper_full(dims.m1, dims.m2, dims.mr, float(r12))
        _, d21a = dmt_upper_full(dims.m1, dims.m2, dims.mr, float(r21))
        d12f = MISSING_FIT if curve.d12_fit is None else curve.d12_fit
        d21f = MISSING_FIT if curve.d21_fit is None else curve.d21_fit
        for i, snr in enumerate(curve.snr_grid_db):
            rows.append(
                [
                    float(r12), float(r21), snr,
                    curve.p12[i], curve.p21[i],
                    float(curve.events12[i]), float(curve.events21[i]),
                    d12f, d21f, d12a, d21a,
                    0.0 if curve.d12_fit is None else 1.0,
                    0.0 if curve.d21_fit is None else 1.0,
                ]
            )
    table = ResultTable(
        columns=(
            "r12", "r21", "snr_db", "p_out_12", "p_out_21", "events_12",
            "events_21", "d12_fit", "d21_fit", "d12_analytic", "d21_analytic",
            "fit_ok_12", "fit_ok_21",
        ),
        rows=np.asarray(rows),
        metadata=_base_metadata(cfg, time.perf_counter() - start),
    )
    validate_table(table, "Dmt")
    return table


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ResultTable:
    runner = {
        "RateRegion": run_rate_region,
        "Scaling": run_scaling,
        "Dmt": run_dmt,
    }[cfg.experiment]
    return runner(cfg, jobs=jobs)
