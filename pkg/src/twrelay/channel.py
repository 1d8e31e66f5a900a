"""Rayleigh-fading channel draws for the two-way relay network models.

Every draw is keyed by ``(rng_seed, draw_index)`` through numpy's
SeedSequence, so Monte Carlo loops reproduce bit-identically no matter how
draw indices are scheduled across workers.  Noise power is normalized to 1
everywhere, which makes the transmit powers ``P`` and ``P_R`` linear SNRs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch


class PowerConstraint(Enum):
    """Relay power budget style: one shared budget or one per relay."""

    SUM_ACROSS_RELAYS = "SumAcrossRelays"
    PER_RELAY = "PerRelay"


@dataclass(frozen=True)
class NetworkDims:
    """Antenna counts for the K-relay network.

    M antennas at each terminal, N antennas per relay, K relays.
    """

    M: int
    N: int
    K: int

    def __post_init__(self):
        for name in ("M", "N", "K"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")


@dataclass(frozen=True)
class PowerConfig:
    """Terminal power P and relay budget P_R, both linear (unit noise)."""

    P: float
    P_R: float
    constraint: PowerConstraint = PowerConstraint.SUM_ACROSS_RELAYS

    def __post_init__(self):
        if not (self.P > 0 and np.isfinite(self.P)):
            raise ValueError(f"P must be positive and finite, got {self.P}")
        if not (self.P_R > 0 and np.isfinite(self.P_R)):
            raise ValueError(f"P_R must be positive and finite, got {self.P_R}")


@dataclass(frozen=True)
class ChannelSet:
    """One realization of all fading matrices for the K-relay network.

    Per relay k:
      h[k]  : (N, M) terminal-1 -> relay k (transmit phase)
      hr[k] : (M, N) relay k -> terminal 1 (receive phase)
      g[k]  : (M, N) relay k -> terminal 2 (receive phase)
      gr[k] : (N, M) terminal-2 -> relay k (transmit phase)
    """

    dims: NetworkDims
    h: np.ndarray
    hr: np.ndarray
    g: np.ndarray
    gr: np.ndarray

    def __post_init__(self):
        d = self.dims
        expected = {
            "h": (d.K, d.N, d.M),
            "hr": (d.K, d.M, d.N),
            "g": (d.K, d.M, d.N),
            "gr": (d.K, d.N, d.M),
        }
        for name, shape in expected.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise DimensionMismatch(
                    f"{name} has shape {arr.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")


@dataclass(frozen=True)
class DirectChannelSet:
    """Single-relay network with a direct terminal-to-terminal path.

      h    : (mr, m1) terminal-1 -> relay
      hr   : (m1, mr) relay -> terminal 1
      g    : (m2, mr) relay -> terminal 2
      gr   : (mr, m2) terminal-2 -> relay
      h12  : (m2, m1) terminal-1 -> terminal-2 direct path
      h12r : (m1, m2) terminal-2 -> terminal-1 direct path
    """

    m1: int
    m2: int
    mr: int
    h: np.ndarray
    hr: np.ndarray
    g: np.ndarray
    gr: np.ndarray
    h12: np.ndarray
    h12r: np.ndarray

    def __post_init__(self):
        expected = {
            "h": (self.mr, self.m1),
            "hr": (self.m1, self.mr),
            "g": (self.m2, self.mr),
            "gr": (self.mr, self.m2),
            "h12": (self.m2, self.m1),
            "h12r": (self.m1, self.m2),
        }
        for name, shape in expected.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise DimensionMismatch(
                    f"{name} has shape {arr.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")


def _rng_for(rng_seed: int, draw_index: int) -> np.random.Generator:
    if rng_seed < 0 or draw_index < 0:
        raise ValueError("rng_seed and draw_index must be nonnegative")
    return np.random.default_rng(
        np.random.SeedSequence((int(rng_seed), int(draw_index)))
    )


def _cn01(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. circularly-symmetric complex Gaussian, zero mean, unit variance."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def draw_channels(dims: NetworkDims, rng_seed: int, draw_index: int) -> ChannelSet:
    """Draw one i.i.d. CN(0,1) realization of all four channel families.

    Deterministic given ``(rng_seed, draw_index)``; the four families are
    drawn from disjoint sections of the per-draw stream, in the fixed
    order h, hr, g, gr.
    """
    rng = _rng_for(rng_seed, draw_index)
    d = dims
    h = _freeze(_cn01(rng, (d.K, d.N, d.M)))
    hr = _freeze(_cn01(rng, (d.K, d.M, d.N)))
    g = _freeze(_cn01(rng, (d.K, d.M, d.N)))
    gr = _freeze(_cn01(rng, (d.K, d.N, d.M)))
    return ChannelSet(dims=d, h=h, hr=hr, g=g, gr=gr)


def draw_direct_channels(
    m1: int, m2: int, mr: int, rng_seed: int, draw_index: int
) -> DirectChannelSet:
    """Draw one realization of the single-relay network with direct paths.

    Draw order is fixed: h, hr, g, gr, h12, h12r.
    """
    for name, v in (("m1", m1), ("m2", m2), ("mr", mr)):
        if not isinstance(v, (int, np.integer)) or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")
    rng = _rng_for(rng_seed, draw_index)
    return DirectChannelSet(
        m1=m1,
        m2=m2,
        mr=mr,
        h=_freeze(_cn01(rng, (mr, m1))),
        hr=_freeze(_cn01(rng, (m1, mr))),
        g=_freeze(_cn01(rng, (m2, mr))),
        gr=_freeze(_cn01(rng, (mr, m2))),
        h12=_freeze(_cn01(rng, (m2, m1))),
        h12r=_freeze(_cn01(rng, (m1, m2))),
    )


def draw_direct_batch(
    m1: int, m2: int, mr: int, rng_seed: int, batch_index: int, count: int
) -> dict[str, np.ndarray]:
    """Vectorized trial sampler for Monte Carlo over the direct-path model.

    Returns a dict of arrays with leading axis ``count``, keyed by the same
    names as :class:`DirectChannelSet`.  The stream is keyed by
    ``(rng_seed, batch_index)``, so batch results do not depend on how
    batches are scheduled across workers.  Draw order matches
    :func:`draw_direct_channels` field order.
    """
    rng = _rng_for(rng_seed, batch_index)
    shapes = {
        "h": (count, mr, m1),
        "hr": (count, m1, mr),
        "g": (count, m2, mr),
        "gr": (count, mr, m2),
        "h12": (count, m2, m1),
        "h12r": (count, m1, m2),
    }
    return {name: _cn01(rng, shape) for name, shape in shapes.items()}


_DUMP_FIELDS = ("h", "hr", "g", "gr")


def dump_channel_set(ch: ChannelSet, path: str) -> None:
    """Write a ChannelSet as CSV rows (k, matrix_name, row, col, re, im)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "matrix_name", "row", "col", "re", "im"])
        for name in _DUMP_FIELDS:
            arr = getattr(ch, name)
            for k in range(arr.shape[0]):
                for r in range(arr.shape[1]):
                    for c in range(arr.shape[2]):
                        v = arr[k, r, c]
                        writer.writerow(
                            [k, name, r, c, repr(float(v.real)), repr(float(v.imag))]
                        )


def load_channel_set(path: str) -> ChannelSet:
    """Read a ChannelSet written by :func:`dump_channel_set`."""
    entries: dict[str, dict[tuple[int, int, int], complex]] = {
        name: {} for name in _DUMP_FIELDS
    }
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            name = row["matrix_name"]
            if name not in entries:
                raise ValueError(f"unknown matrix name {name!r} in {path}")
            key = (int(row["k"]), int(row["row"]), int(row["col"]))
            entries[name][key] = float(row["re"]) + 1j * float(row["im"])
    if not entries["h"]:
        raise ValueError(f"no channel entries found in {path}")
    K = max(k for k, _, _ in entries["h"]) + 1
    N = max(r for _, r, _ in entries["h"]) + 1
    M = max(c for _, _, c in entries["h"]) + 1
    dims = NetworkDims(M=M, N=N, K=K)
    shapes = {
        "h": (K, N, M),
        "hr": (K, M, N),
        "g": (K, M, N),
        "gr": (K, N, M),
    }
    arrays = {}
    for name, shape in shapes.items():
        arr = np.zeros(shape, dtype=complex)
        for (k, r, c), v in entries[name].items():
            arr[k, r, c] = v
        arrays[name] = _freeze(arr)
    return ChannelSet(dims=dims, **arrays)
