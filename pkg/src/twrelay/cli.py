"""Batch command-line interface.

Subcommands: rate-region, scaling, dmt (experiment runners driven by a
JSON config), plot (SVG line/scatter from any result table), selftest
(quick oracle suite).  Exit codes: 0 success, 2 config error, 3 numeric
failure, 4 selftest failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .channel import ChannelSet, NetworkDims, PowerConfig, draw_direct_channels
from .dcm import dcm_normalization
from .dmt import compression_noise_full, fit_outage_exponent
from .af import solve_min_power
from .bounds import waterfill
from .errors import ConfigError, TwrelayError
from .harness import load_config, read_table, run_experiment, validate_table, write_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_SELFTEST = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twrelay",
        description="Two-way relay channel rate regions, bounds and DMT experiments",
    )
    parser.add_argument("--version", action="version", version=f"twrelay {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("rate-region", "scaling", "dmt"):
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="override config output_path")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("plot", help="render a result table as an SVG")
    p.add_argument("table", help="result CSV produced by an experiment run")
    p.add_argument("--out", required=True, help="SVG output path")
    p.add_argument("--x", default=None, help="x column (default: first)")
    p.add_argument("--y", default=None, help="comma-separated y columns (default: rest)")
    p.add_argument("--logy", action="store_true", help="log-scale the y axis")

    sub.add_parser("selftest", help="run the built-in oracle checks")
    return parser


_COMMAND_TO_EXPERIMENT = {
    "rate-region": "RateRegion",
    "scaling": "Scaling",
    "dmt": "Dmt",
}


def _run_experiment_command(args) -> int:
    cfg = load_config(args.config)
    expected = _COMMAND_TO_EXPERIMENT[args.command]
    if cfg.experiment != expected:
        raise ConfigError(
            f"config declares experiment {cfg.experiment!r}; "
            f"this subcommand runs {expected!r}"
        )
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("seed must be nonnegative")
        cfg.seed = args.seed
    out = args.out or cfg.output_path
    if not out:
        raise ConfigError("no output path: set output_path in the config or pass --out")
    table = run_experiment(cfg, jobs=max(1, args.jobs))
    write_table(table, out)
    print(f"wrote {out} ({table.rows.shape[0]} rows)")
    return EXIT_OK


def _plot_command(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    table = read_table(args.table)
    x_col = args.x or table.columns[0]
    if x_col not in table.columns:
        raise ConfigError(f"unknown x column {x_col!r}; have {table.columns}")
    if args.y:
        y_cols = [c.strip() for c in args.y.split(",")]
    else:
        y_cols = [c for c in table.columns if c != x_col]
    for col in y_cols:
        if col not in table.columns:
            raise ConfigError(f"unknown y column {col!r}; have {table.columns}")
    x = table.column(x_col)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for col in y_cols:
        ax.plot(x, table.column(col), marker="o", markersize=3, label=col)
    if args.logy:
        ax.set_yscale("log")
    ax.set_xlabel(x_col)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, format="svg")
    plt.close(fig)
    print(f"wrote {args.out}")
    return EXIT_OK


def _unit_scalar_channels() -> ChannelSet:
    one = np.ones((1, 1, 1), dtype=complex)
    return ChannelSet(dims=NetworkDims(M=1, N=1, K=1), h=one, hr=one, g=one, gr=one)


def _selftest_command() -> int:
    """Quick closed-form oracle checks; exercises one representative
    operation from each numeric subsystem."""
    failures = []

    def check(name, ok):
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures.append(name)

    # Single-relay beamformer: unit channels, both SINR targets 1 at P=10
    # force |w|^2 = 1/9 and total power 21/9.
    sol = solve_min_power(_unit_scalar_channels(), 10.0, 1.0, 1.0)
    check(
        "min-power beamformer, single-relay closed form",
        abs(sol.total_power - 21.0 / 9.0) < 1e-9
        and abs(np.abs(sol.weights[0, 0, 0]) ** 2 - 1.0 / 9.0) < 1e-9,
    )

    # Waterfilling budget identity on random eigenvalue lists.
    rng = np.random.default_rng(0)
    ok = True
    for _ in range(100):
        lam = rng.uniform(0.05, 5.0, size=rng.integers(1, 17))
        nu = waterfill(lam, 2.5)
        ok &= abs(np.sum(np.maximum(0.0, nu - 1.0 / lam)) - 2.5) < 1e-9
    lam1 = 0.7
    ok &= waterfill([lam1], 3.0) == 3.0 + 1.0 / lam1
    check("waterfilling budget identity", bool(ok))

    # Exponent fit recovers a synthetic power law exactly.
    snr_db = np.array([5.0, 10.0, 15.0, 20.0])
    trials = 10**7
    p = 0.3 * (10.0 ** (snr_db / 10.0)) ** -1.75
    d, _ = fit_outage_exponent(snr_db, p * trials, trials)
    check("outage exponent fit on synthetic power law", abs(d - 1.75) < 1e-6)

    # Compression-noise bisection pinned against a grid scan.
    dch = draw_direct_channels(1, 1, 1, 7, 0)
    nhat12, _ = compression_noise_full(dch, 10.0)
    grid = np.logspace(-9, 9, 10001)
    lhs_minus_rhs = _scalar_constraint_gap(dch, 10.0, grid)
    idx = int(np.argmax(lhs_minus_rhs <= 0.0))
    step = np.log(grid[1]) - np.log(grid[0])
    check(
        "compression-noise fixed point vs grid scan",
        abs(np.log(nhat12) - np.log(grid[idx])) <= step,
    )

    # Dual-channel-matching normalization, scalar oracle beta = P_R / 84.
    beta = dcm_normalization(_unit_scalar_channels(), 10.0, PowerConfig(P=10.0, P_R=10.0))
    check("dual channel matching normalization", abs(beta[0] - 10.0 / 84.0) < 1e-12)

    if failures:
        print(f"selftest failed: {len(failures)} check(s)")
        return EXIT_SELFTEST
    print("selftest passed")
    return EXIT_OK


def _scalar_constraint_gap(dch, P, nhat_grid):
    """Per-receiver compression constraint for the forward direction."""
    a12 = P * abs(dch.h12[0, 0]) ** 2
    ah = P * abs(dch.h[0, 0]) ** 2
    ag = P * abs(dch.g[0, 0]) ** 2
    l12 = 1.0 + a12
    rhs = np.log2((1 + a12 + ag) / l12)
    l1 = l12 * (1.0 + nhat_grid + ah) - a12 * ah
    lhs = np.log2(l1 / l12) - np.log2(nhat_grid)
    return lhs - rhs


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in _COMMAND_TO_EXPERIMENT:
            return _run_experiment_command(args)
        if args.command == "plot":
            return _plot_command(args)
        return _selftest_command()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TwrelayError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
