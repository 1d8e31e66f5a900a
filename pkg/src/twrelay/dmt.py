"""Diversity-multiplexing tradeoff machinery for the single-relay two-way
channel with a direct terminal-to-terminal path.

Covers the compress-and-forward (CF) achievable rates for full-duplex and
half-duplex (three-phase) operation, the compression-noise fixed point,
Monte Carlo outage estimation with exponent fitting, and the analytic
cooperative upper bound on the tradeoff.

Conventions
-----------
* Terminal and relay powers all equal P; with unit noise P is the SNR.
* The outage target at multiplexing gain r is max(r * log2(SNR), 1 bit).
  The floor keeps the r = 0 endpoint meaningful (a fixed-rate outage,
  whose exponent is the diversity order); additive rate offsets do not
  move asymptotic exponents.
* The compression-noise level is set per receiving terminal: for each
  direction, the smallest quantization noise such that that terminal can
  recover the relay's description using its own side information and its
  own relay downlink.  Coupling the two directions through a single
  worst-case constraint would let the weaker terminal's relay downlink
  destroy the other direction's relay diversity (the cross-link gain
  ratio is heavy-tailed, costing a full diversity order), which is
  exactly what the decoupling property of full-duplex CF rules out.
* The half-duplex compression signal adds the two listening phases, so
  its conditional covariance carries two units of receiver noise plus the
  quantization noise: the relay noise block is (2 + Nhat) I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import joblib
import numpy as np

from .channel import DirectChannelSet, draw_direct_batch, draw_direct_channels
from .errors import InsufficientEvents, InvalidMultiplexingGain

LOG2_10 = math.log2(10.0)
# Bisection bracket for the compression noise and its constraint tolerance.
NHAT_BRACKET = (1e-9, 1e9)
NHAT_TOL_BITS = 1e-8
# Outage events needed before an SNR point enters the exponent fit.
MIN_FIT_EVENTS = 20
# Trials drawn per RNG batch; fixed so results never depend on the worker
# count or on total trial count beyond truncation of the last batch.
BATCH_SIZE = 1 << 14
DEFAULT_TARGET_FLOOR_BITS = 1.0


class Duplex(Enum):
    FULL = "Full"
    HALF = "Half"


@dataclass(frozen=True)
class DmtDims:
    m1: int
    m2: int
    mr: int
    duplex: Duplex = Duplex.FULL

    def __post_init__(self):
        for name in ("m1", "m2", "mr"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")


@dataclass(frozen=True)
class LQuantities:
    """Determinant values entering the CF mutual informations."""

    L1_r2: float
    L2_r1: float
    L12: float
    L21: float
    L1r_2: float
    L2r_1: float
    Nhat: float


@dataclass(frozen=True)
class Strategy:
    """Rate expression evaluated per realization in the outage loop."""

    kind: str  # cf_full | cf_half | upper_full | upper_half
    t1: float | None = None
    t2: float | None = None

    def __post_init__(self):
        if self.kind not in ("cf_full", "cf_half", "upper_full", "upper_half"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind.endswith("_half"):
            if self.t1 is None or self.t2 is None:
                raise ValueError(f"{self.kind} needs phase fractions t1, t2")
            _check_phase_split(self.t1, self.t2)

    @classmethod
    def cf_full(cls):
        return cls("cf_full")

    @classmethod
    def cf_half(cls, t1, t2):
        return cls("cf_half", t1, t2)

    @classmethod
    def upper_full(cls):
        return cls("upper_full")

    @classmethod
    def upper_half(cls, t1, t2):
        return cls("upper_half", t1, t2)


@dataclass(frozen=True)
class OutageCurve:
    dims: DmtDims
    strategy: Strategy
    r12: float
    r21: float
    snr_grid_db: tuple[float, ...]
    trials: int
    events12: np.ndarray
    events21: np.ndarray
    p12: np.ndarray
    p21: np.ndarray
    stderr12: np.ndarray
    stderr21: np.ndarray
    d12_fit: float | None
    d12_fit_stderr: float | None
    d21_fit: float | None
    d21_fit_stderr: float | None
    min_target_bits: float


@dataclass(frozen=True)
class HalfDuplexExponentBound:
    """Max-min Monte Carlo exponents over a (t1, t2) grid."""

    d12: float
    d21: float
    per_point: tuple
    note: str


def _check_phase_split(t1: float, t2: float) -> None:
    # A zero phase fraction is allowed (that direction just sends nothing)
    # but the relay must keep a nonempty transmit phase.
    if not (t1 >= 0 and t2 >= 0 and 0 < t1 + t2 < 1):
        raise ValueError(f"need t1, t2 >= 0 with 0 < t1 + t2 < 1, got ({t1}, {t2})")


def _hermitian_det(a: np.ndarray) -> float:
    sym = 0.5 * (a + a.conj().T)
    eigs = np.linalg.eigvalsh(sym)
    return float(np.exp(np.sum(np.log(eigs))))


def _stacked_det(top: np.ndarray, bottom: np.ndarray, power_per_antenna: float,
                 relay_noise: float) -> float:
    """det((P/m) [top; bottom][top; bottom]* + diag(I, relay_noise I)),
    with the relay rows last to match the noise block ordering."""
    s = np.vstack([top, bottom])
    cov = power_per_antenna * (s @ s.conj().T)
    n_top = top.shape[0]
    diag = np.ones(s.shape[0])
    diag[n_top:] = relay_noise
    cov[np.diag_indices_from(cov)] += diag
    return _hermitian_det(cov)


def _direct_dets(dch: DirectChannelSet, P: float):
    """The Nhat-independent determinants (L12, L21, L1r_2, L2r_1, Lr2, Lr1)."""
    m1, m2, mr = dch.m1, dch.m2, dch.mr
    eye2 = np.eye(m2)
    eye1 = np.eye(m1)
    L12 = _hermitian_det((P / m1) * (dch.h12 @ dch.h12.conj().T) + eye2)
    L21 = _hermitian_det((P / m2) * (dch.h12r @ dch.h12r.conj().T) + eye1)
    L1r_2 = _hermitian_det(
        (P / m1) * (dch.h12 @ dch.h12.conj().T)
        + (P / mr) * (dch.g @ dch.g.conj().T)
        + eye2
    )
    L2r_1 = _hermitian_det(
        (P / m2) * (dch.h12r @ dch.h12r.conj().T)
        + (P / mr) * (dch.hr @ dch.hr.conj().T)
        + eye1
    )
    Lr2 = _hermitian_det((P / mr) * (dch.g @ dch.g.conj().T) + eye2)
    Lr1 = _hermitian_det((P / mr) * (dch.hr @ dch.hr.conj().T) + eye1)
    return L12, L21, L1r_2, L2r_1, Lr2, Lr1


def _joint_dets(dch: DirectChannelSet, P: float, relay_noise: float):
    """(L1_r2, L2_r1) with the given relay-block noise level."""
    l1 = _stacked_det(dch.h12, dch.h, P / dch.m1, relay_noise)
    l2 = _stacked_det(dch.h12r, dch.gr, P / dch.m2, relay_noise)
    return l1, l2


def l_quantities(dch: DirectChannelSet, P: float, nhat: float) -> LQuantities:
    """Determinant values for the full-duplex CF expressions at a given
    quantization noise level (relay noise block (1 + Nhat) I)."""
    if nhat < 0 or not np.isfinite(nhat):
        raise ValueError(f"Nhat must be finite and nonnegative, got {nhat}")
    L12, L21, L1r_2, L2r_1, _, _ = _direct_dets(dch, P)
    L1_r2, L2_r1 = _joint_dets(dch, P, 1.0 + nhat)
    return LQuantities(
        L1_r2=L1_r2, L2_r1=L2_r1, L12=L12, L21=L21,
        L1r_2=L1r_2, L2r_1=L2r_1, Nhat=float(nhat),
    )


def _solve_nhat(lhs_fn, rhs_bits: float, weight_fwd: float, weight_rel: float) -> float:
    """Smallest Nhat with weight_fwd * lhs(Nhat) <= weight_rel * rhs.

    lhs is strictly decreasing in Nhat; returns +inf when no Nhat in the
    bracket satisfies the constraint (degenerate relay->terminal links).
    """
    if rhs_bits <= 0.0:
        return math.inf

    def g(nhat):
        return weight_fwd * lhs_fn(nhat) - weight_rel * rhs_bits

    lo, hi = NHAT_BRACKET
    if g(lo) <= 0.0:
        return lo
    if g(hi) > 0.0:
        return math.inf
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(200):
        mid = 0.5 * (llo + lhi)
        val = g(math.exp(mid))
        if abs(val) < NHAT_TOL_BITS:
            return math.exp(mid)
        if val > 0.0:
            llo = mid
        else:
            lhi = mid
    return math.exp(lhi)


def compression_noise_full(dch: DirectChannelSet, P: float):
    """Smallest quantization noise per direction satisfying the
    per-receiver compression-rate constraint for full-duplex operation.

    Returns ``(nhat12, nhat21)`` where nhat12 makes the relay description
    decodable at terminal 2 (its side information and relay downlink) and
    nhat21 the terminal-1 analogue.  Either entry is +inf (sentinel) when
    that relay downlink carries nothing; CF then degrades to the direct
    path for that direction.
    """
    if P <= 0:
        raise ValueError(f"P must be positive, got {P}")
    mr = dch.mr
    L12, L21, L1r_2, L2r_1, _, _ = _direct_dets(dch, P)

    def lhs12(nhat):
        l1, _ = _joint_dets(dch, P, 1.0 + nhat)
        return math.log2(l1 / L12) - mr * math.log2(nhat)

    def lhs21(nhat):
        _, l2 = _joint_dets(dch, P, 1.0 + nhat)
        return math.log2(l2 / L21) - mr * math.log2(nhat)

    nhat12 = _solve_nhat(lhs12, math.log2(L1r_2 / L12), 1.0, 1.0)
    nhat21 = _solve_nhat(lhs21, math.log2(L2r_1 / L21), 1.0, 1.0)
    return nhat12, nhat21


def cf_rates_full(dch: DirectChannelSet, P: float):
    """Full-duplex CF rate pair (r12, r21) in bits."""
    nhat12, nhat21 = compression_noise_full(dch, P)
    L12, L21, _, _, _, _ = _direct_dets(dch, P)
    if math.isinf(nhat12):
        r12 = math.log2(L12)
    else:
        l1, _ = _joint_dets(dch, P, 1.0 + nhat12)
        r12 = math.log2(l1) - dch.mr * math.log2(1.0 + nhat12)
    if math.isinf(nhat21):
        r21 = math.log2(L21)
    else:
        _, l2 = _joint_dets(dch, P, 1.0 + nhat21)
        r21 = math.log2(l2) - dch.mr * math.log2(1.0 + nhat21)
    return r12, r21


def compression_noise_half(dch: DirectChannelSet, P: float, t1: float, t2: float):
    """Per-direction compression noise for the three-phase half-duplex
    protocol.

    The compression signal sums the two listening phases, so the relay
    block of the joint covariance is (2 + Nhat) I; the constraint weights
    are (t1 + t2) against (1 - t1 - t2).  Returns ``(nhat12, nhat21)``.
    """
    if P <= 0:
        raise ValueError(f"P must be positive, got {P}")
    _check_phase_split(t1, t2)
    mr = dch.mr
    L12, L21, L1r_2, L2r_1, _, _ = _direct_dets(dch, P)

    def lhs12(nhat):
        l1, _ = _joint_dets(dch, P, 2.0 + nhat)
        return math.log2(l1 / L12) - mr * math.log2(nhat)

    def lhs21(nhat):
        _, l2 = _joint_dets(dch, P, 2.0 + nhat)
        return math.log2(l2 / L21) - mr * math.log2(nhat)

    wsum = t1 + t2
    nhat12 = _solve_nhat(lhs12, math.log2(L1r_2 / L12), wsum, 1.0 - wsum)
    nhat21 = _solve_nhat(lhs21, math.log2(L2r_1 / L21), wsum, 1.0 - wsum)
    return nhat12, nhat21


def cf_rates_half(dch: DirectChannelSet, P: float, t1: float, t2: float):
    """Half-duplex CF rate pair (r12, r21) in bits."""
    nhat12, nhat21 = compression_noise_half(dch, P, t1, t2)
    L12, L21, _, _, _, _ = _direct_dets(dch, P)
    if math.isinf(nhat12):
        r12 = t1 * math.log2(L12)
    else:
        l1, _ = _joint_dets(dch, P, 2.0 + nhat12)
        r12 = t1 * (math.log2(l1) - dch.mr * math.log2(2.0 + nhat12))
    if math.isinf(nhat21):
        r21 = t2 * math.log2(L21)
    else:
        _, l2 = _joint_dets(dch, P, 2.0 + nhat21)
        r21 = t2 * (math.log2(l2) - dch.mr * math.log2(2.0 + nhat21))
    return r12, r21


def dmt_upper_full(m1: int, m2: int, mr: int, r: float):
    """Cooperative upper bound on the tradeoff at multiplexing gain r:
    the worse of the two colocated MIMO channels per direction."""
    if r < 0 or r > min(m1, m2):
        raise InvalidMultiplexingGain(
            f"r = {r} outside [0, {min(m1, m2)}] for (m1, m2) = ({m1}, {m2})"
        )
    d12 = min((m1 - r) * (mr + m2 - r), (m1 + mr - r) * (m2 - r))
    d21 = min((m2 - r) * (mr + m1 - r), (m2 + mr - r) * (m1 - r))
    return float(d12), float(d21)


# ---------------------------------------------------------------------------
# Outage Monte Carlo
# ---------------------------------------------------------------------------


def target_rate_bits(r: float, snr_db: float,
                     floor_bits: float = DEFAULT_TARGET_FLOOR_BITS) -> float:
    """Outage target r*log2(SNR), floored so r = 0 stays measurable."""
    return max(r * (snr_db / 10.0) * LOG2_10, floor_bits)


def strategy_rates(strategy: Strategy, P: float, dch: DirectChannelSet):
    """Per-realization rate pair whose outage the strategy's curve counts.

    For the upper-bound strategies the "rate" is the smaller of the two
    cooperative-cut mutual informations, so its outage exponent is the
    min of the per-cut exponents.
    """
    if strategy.kind == "cf_full":
        return cf_rates_full(dch, P)
    if strategy.kind == "cf_half":
        return cf_rates_half(dch, P, strategy.t1, strategy.t2)
    L12, L21, L1r_2, L2r_1, Lr2, Lr1 = _direct_dets(dch, P)
    l1l, l2l = _joint_dets(dch, P, 1.0)
    if strategy.kind == "upper_full":
        r12 = min(math.log2(l1l), math.log2(L1r_2))
        r21 = min(math.log2(l2l), math.log2(L2r_1))
        return r12, r21
    t1, t2, t3 = strategy.t1, strategy.t2, 1.0 - strategy.t1 - strategy.t2
    r12 = min(t1 * math.log2(l1l), t1 * math.log2(L12) + t3 * math.log2(Lr2))
    r21 = min(t2 * math.log2(l2l), t2 * math.log2(L21) + t3 * math.log2(Lr1))
    return r12, r21


def _scalar_channel(chans: dict[str, np.ndarray], P: float):
    """Squared-gain arrays (times P) for the all-scalar case."""
    sq = lambda name: P * np.abs(chans[name][:, 0, 0]) ** 2
    return {
        "a12": sq("h12"), "a21": sq("h12r"),
        "ah": sq("h"), "agr": sq("gr"),
        "ag": sq("g"), "ahr": sq("hr"),
    }


def _scalar_nhat_half(direct, own, cross, weight_fwd: float, weight_rel: float):
    """Vectorized per-direction compression-noise bisection for scalar
    channels, half duplex (relay noise 2 + Nhat).

    direct/own/cross are P-scaled gains of the direct path, the source ->
    relay link, and the relay -> receiver link; +inf where the constraint
    cannot hold.
    """
    ld = 1.0 + direct
    rhs = np.log2((ld + cross) / ld)

    def lhs(nhat):
        # det of the 2x2 joint covariance over the direct-only det
        ljoint = ld * (2.0 + nhat + own) - direct * own
        return np.log2(ljoint / ld) - np.log2(nhat)

    lo, hi = NHAT_BRACKET
    llo = np.full(rhs.shape, math.log(lo))
    lhi = np.full(rhs.shape, math.log(hi))
    target = weight_rel * rhs
    for _ in range(100):
        mid = 0.5 * (llo + lhi)
        high = weight_fwd * lhs(np.exp(mid)) > target
        llo = np.where(high, mid, llo)
        lhi = np.where(high, lhi, mid)
    nhat = np.exp(0.5 * (llo + lhi))
    nhat = np.where(weight_fwd * lhs(np.full(rhs.shape, lo)) <= target, lo, nhat)
    bad = (rhs <= 0.0) | (weight_fwd * lhs(np.full(rhs.shape, hi)) > target)
    return np.where(bad, np.inf, nhat)


def _scalar_strategy_rates(strategy: Strategy, P: float, chans):
    a = _scalar_channel(chans, P)
    L12 = 1.0 + a["a12"]
    L21 = 1.0 + a["a21"]
    if strategy.kind == "cf_full":
        # Per-direction constraint has a closed form for scalars:
        # Nhat = (1 + direct + own-link) / cross-link.
        with np.errstate(divide="ignore"):
            nhat12 = (L12 + a["ah"]) / a["ag"]
            nhat21 = (L21 + a["agr"]) / a["ahr"]
        r12 = np.where(
            np.isinf(nhat12),
            np.log2(L12),
            np.log2(L12 + a["ah"] / (1.0 + nhat12)),
        )
        r21 = np.where(
            np.isinf(nhat21),
            np.log2(L21),
            np.log2(L21 + a["agr"] / (1.0 + nhat21)),
        )
        return r12, r21
    if strategy.kind == "cf_half":
        t1, t2 = strategy.t1, strategy.t2
        wsum = t1 + t2
        nhat12 = _scalar_nhat_half(a["a12"], a["ah"], a["ag"], wsum, 1.0 - wsum)
        nhat21 = _scalar_nhat_half(a["a21"], a["agr"], a["ahr"], wsum, 1.0 - wsum)
        noise12 = 2.0 + np.where(np.isinf(nhat12), 0.0, nhat12)
        noise21 = 2.0 + np.where(np.isinf(nhat21), 0.0, nhat21)
        l1 = L12 * (noise12 + a["ah"]) - a["a12"] * a["ah"]
        l2 = L21 * (noise21 + a["agr"]) - a["a21"] * a["agr"]
        r12 = np.where(np.isinf(nhat12), t1 * np.log2(L12), t1 * np.log2(l1 / noise12))
        r21 = np.where(np.isinf(nhat21), t2 * np.log2(L21), t2 * np.log2(l2 / noise21))
        return r12, r21
    if strategy.kind == "upper_full":
        r12 = np.minimum(np.log2(L12 + a["ah"]), np.log2(L12 + a["ag"]))
        r21 = np.minimum(np.log2(L21 + a["agr"]), np.log2(L21 + a["ahr"]))
        return r12, r21
    t1, t2 = strategy.t1, strategy.t2
    t3 = 1.0 - t1 - t2
    r12 = np.minimum(
        t1 * np.log2(L12 + a["ah"]),
        t1 * np.log2(L12) + t3 * np.log2(1.0 + a["ag"]),
    )
    r21 = np.minimum(
        t2 * np.log2(L21 + a["agr"]),
        t2 * np.log2(L21) + t3 * np.log2(1.0 + a["ahr"]),
    )
    return r12, r21


def _batch_rates(strategy: Strategy, P: float, dims: DmtDims, chans):
    if dims.m1 == dims.m2 == dims.mr == 1:
        return _scalar_strategy_rates(strategy, P, chans)
    count = chans["h"].shape[0]
    r12 = np.empty(count)
    r21 = np.empty(count)
    for i in range(count):
        dch = DirectChannelSet(
            m1=dims.m1, m2=dims.m2, mr=dims.mr,
            h=chans["h"][i], hr=chans["hr"][i],
            g=chans["g"][i], gr=chans["gr"][i],
            h12=chans["h12"][i], h12r=chans["h12r"][i],
        )
        r12[i], r21[i] = strategy_rates(strategy, P, dch)
    return r12, r21


def _count_batch(dims, strategy, snr_lin, thr12, thr21, seed, batch_index, use):
    chans = draw_direct_batch(dims.m1, dims.m2, dims.mr, seed, batch_index, BATCH_SIZE)
    if use < BATCH_SIZE:
        chans = {k: v[:use] for k, v in chans.items()}
    ev12 = np.zeros(len(snr_lin), dtype=np.int64)
    ev21 = np.zeros(len(snr_lin), dtype=np.int64)
    for i, P in enumerate(snr_lin):
        r12, r21 = _batch_rates(strategy, P, dims, chans)
        ev12[i] = int(np.count_nonzero(r12 <= thr12[i]))
        ev21[i] = int(np.count_nonzero(r21 <= thr21[i]))
    return ev12, ev21


def fit_outage_exponent(snr_db, events, trials, min_events: int = MIN_FIT_EVENTS):
    """Weighted least-squares slope of log2(p_hat) against log2(SNR).

    Only SNR points with at least ``min_events`` outage events enter the
    fit; weights are inverse binomial variances of log2(p_hat).  Returns
    ``(exponent, stderr)`` with the exponent sign-flipped so diversity
    orders come out positive.
    """
    snr_db = np.asarray(snr_db, dtype=float)
    events = np.asarray(events, dtype=float)
    trials = np.broadcast_to(np.asarray(trials, dtype=float), snr_db.shape)
    mask = events >= min_events
    if np.count_nonzero(mask) < 2:
        raise InsufficientEvents(
            f"only {int(np.count_nonzero(mask))} SNR points have >= {min_events} events"
        )
    p = events[mask] / trials[mask]
    x = snr_db[mask] / 10.0 * LOG2_10
    y = np.log2(p)
    resid = np.maximum(1.0 - p, 0.5 / trials[mask])
    weights = trials[mask] * p * (math.log(2.0) ** 2) / resid
    xbar = np.sum(weights * x) / np.sum(weights)
    ybar = np.sum(weights * y) / np.sum(weights)
    sxx = np.sum(weights * (x - xbar) ** 2)
    if sxx <= 0.0:
        raise InsufficientEvents("SNR points are degenerate; cannot fit a slope")
    slope = np.sum(weights * (x - xbar) * (y - ybar)) / sxx
    stderr = math.sqrt(1.0 / sxx)
    return float(-slope), float(stderr)


def outage_curve(
    dims: DmtDims,
    r12: float,
    r21: float,
    snr_grid_db,
    trials: int,
    seed: int,
    strategy: Strategy,
    jobs: int = 1,
    min_target_bits: float = DEFAULT_TARGET_FLOOR_BITS,
) -> OutageCurve:
    """Monte Carlo outage probabilities over an SNR grid with a fitted
    SNR exponent per direction.

    Trials are drawn in fixed-size batches keyed by (seed, batch index),
    and event counts are summed over batches, so results are bit-identical
    for any worker count.  The same channel draws are reused across the
    SNR grid (common random numbers).

    Raises
    ------
    InsufficientEvents
        When neither direction has two SNR points with enough events; the
        partial curve rides on the exception's ``curve`` attribute.
    """
    if trials < 1000:
        raise ValueError(f"trials must be at least 1000, got {trials}")
    snr_grid_db = tuple(float(s) for s in snr_grid_db)
    snr_lin = [10.0 ** (s / 10.0) for s in snr_grid_db]
    thr12 = [target_rate_bits(r12, s, min_target_bits) for s in snr_grid_db]
    thr21 = [target_rate_bits(r21, s, min_target_bits) for s in snr_grid_db]
    n_batches = (trials + BATCH_SIZE - 1) // BATCH_SIZE

    def batch_args(b):
        use = min(BATCH_SIZE, trials - b * BATCH_SIZE)
        return (dims, strategy, snr_lin, thr12, thr21, seed, b, use)

    if jobs <= 1:
        parts = [_count_batch(*batch_args(b)) for b in range(n_batches)]
    else:
        parts = joblib.Parallel(n_jobs=jobs)(
            joblib.delayed(_count_batch)(*batch_args(b)) for b in range(n_batches)
        )
    events12 = np.sum([p[0] for p in parts], axis=0)
    events21 = np.sum([p[1] for p in parts], axis=0)
    p12 = events12 / trials
    p21 = events21 / trials
    stderr12 = np.sqrt(p12 * (1.0 - p12) / trials)
    stderr21 = np.sqrt(p21 * (1.0 - p21) / trials)

    fits = []
    for ev in (events12, events21):
        try:
            fits.append(fit_outage_exponent(snr_grid_db, ev, trials))
        except InsufficientEvents:
            fits.append((None, None))
    curve = OutageCurve(
        dims=dims, strategy=strategy, r12=float(r12), r21=float(r21),
        snr_grid_db=snr_grid_db, trials=int(trials),
        events12=events12, events21=events21,
        p12=p12, p21=p21, stderr12=stderr12, stderr21=stderr21,
        d12_fit=fits[0][0], d12_fit_stderr=fits[0][1],
        d21_fit=fits[1][0], d21_fit_stderr=fits[1][1],
        min_target_bits=float(min_target_bits),
    )
    if curve.d12_fit is None and curve.d21_fit is None:
        raise InsufficientEvents(
            "no direction has two SNR points with enough outage events",
            curve=curve,
        )
    return curve


# ---------------------------------------------------------------------------
# Half-duplex exponent bounds over a phase-split grid
# ---------------------------------------------------------------------------


def default_t_grid(points: int = 9):
    """Uniform grid on the open simplex {t1, t2 >= 0.05, t1 + t2 <= 0.9}."""
    vals = np.linspace(0.05, 0.85, points)
    return [
        (float(t1), float(t2))
        for t1 in vals
        for t2 in vals
        if t1 + t2 <= 0.9 + 1e-12
    ]


def _half_event_rates(side: str, t1: float, t2: float, P: float, dims, chans):
    """Per-trial values of the two half-duplex bounding events, per
    direction: (eventA12, eventB12, eventA21, eventB21) rate arrays."""
    t3 = 1.0 - t1 - t2
    if dims.m1 == dims.m2 == dims.mr == 1:
        a = _scalar_channel(chans, P)
        l12 = np.log2(1.0 + a["a12"])
        l21 = np.log2(1.0 + a["a21"])
        l1l = np.log2(1.0 + a["a12"] + a["ah"])
        l2l = np.log2(1.0 + a["a21"] + a["agr"])
        lr2 = np.log2(1.0 + a["ag"])
        lr1 = np.log2(1.0 + a["ahr"])
        l1r2 = np.log2(1.0 + a["a12"] + a["ag"])
        l2r1 = np.log2(1.0 + a["a21"] + a["ahr"])
    else:
        count = chans["h"].shape[0]
        l12 = np.empty(count); l21 = np.empty(count)
        l1l = np.empty(count); l2l = np.empty(count)
        lr2 = np.empty(count); lr1 = np.empty(count)
        l1r2 = np.empty(count); l2r1 = np.empty(count)
        for i in range(count):
            dch = DirectChannelSet(
                m1=dims.m1, m2=dims.m2, mr=dims.mr,
                h=chans["h"][i], hr=chans["hr"][i],
                g=chans["g"][i], gr=chans["gr"][i],
                h12=chans["h12"][i], h12r=chans["h12r"][i],
            )
            d12v, d21v, d1r2, d2r1, dr2, dr1 = _direct_dets(dch, P)
            j1, j2 = _joint_dets(dch, P, 1.0)
            l12[i], l21[i] = math.log2(d12v), math.log2(d21v)
            l1r2[i], l2r1[i] = math.log2(d1r2), math.log2(d2r1)
            lr2[i], lr1[i] = math.log2(dr2), math.log2(dr1)
            l1l[i], l2l[i] = math.log2(j1), math.log2(j2)
    ev_a12 = t1 * l1l
    ev_a21 = t2 * l2l
    if side == "upper":
        ev_b12 = t1 * l12 + t3 * lr2
        ev_b21 = t2 * l21 + t3 * lr1
    else:
        # Achievability side: the published weighted combination, verbatim.
        wsum = t1 + t2
        ev_b12 = ((2.0 * wsum - 1.0) * t1 / wsum) * l12 + (t3 * t1 / wsum) * l1r2
        ev_b21 = ((2.0 * wsum - 1.0) * t2 / wsum) * l21 + (t3 * t2 / wsum) * l2r1
    return ev_a12, ev_b12, ev_a21, ev_b21


def _half_exponent_bound(
    side, dims, r12, r21, snr_grid_db, trials, t_grid, seed, jobs, min_target_bits
):
    snr_grid_db = tuple(float(s) for s in snr_grid_db)
    snr_lin = [10.0 ** (s / 10.0) for s in snr_grid_db]
    thr12 = [target_rate_bits(r12, s, min_target_bits) for s in snr_grid_db]
    thr21 = [target_rate_bits(r21, s, min_target_bits) for s in snr_grid_db]
    n_batches = (trials + BATCH_SIZE - 1) // BATCH_SIZE

    def run_point(t1, t2):
        _check_phase_split(t1, t2)
        counts = np.zeros((4, len(snr_lin)), dtype=np.int64)
        for b in range(n_batches):
            use = min(BATCH_SIZE, trials - b * BATCH_SIZE)
            chans = draw_direct_batch(dims.m1, dims.m2, dims.mr, seed, b, BATCH_SIZE)
            if use < BATCH_SIZE:
                chans = {k: v[:use] for k, v in chans.items()}
            for i, P in enumerate(snr_lin):
                rates = _half_event_rates(side, t1, t2, P, dims, chans)
                for j, (rate, thr) in enumerate(
                    zip(rates, (thr12[i], thr12[i], thr21[i], thr21[i]))
                ):
                    counts[j, i] += int(np.count_nonzero(rate <= thr))
        out = []
        for j, direction_events in enumerate(counts):
            try:
                d, _ = fit_outage_exponent(snr_grid_db, direction_events, trials)
            except InsufficientEvents:
                d = None
            out.append(d)
        d12 = None if out[0] is None or out[1] is None else min(out[0], out[1])
        d21 = None if out[2] is None or out[3] is None else min(out[2], out[3])
        return d12, d21

    if jobs <= 1:
        results = [run_point(t1, t2) for t1, t2 in t_grid]
    else:
        results = joblib.Parallel(n_jobs=jobs)(
            joblib.delayed(run_point)(t1, t2) for t1, t2 in t_grid
        )
    per_point = tuple(
        (t1, t2, d12, d21) for (t1, t2), (d12, d21) in zip(t_grid, results)
    )
    valid12 = [d for _, _, d, _ in per_point if d is not None]
    valid21 = [d for _, _, _, d in per_point if d is not None]
    if not valid12 or not valid21:
        raise InsufficientEvents("no phase-split point produced a usable exponent pair")
    note = (
        "upper bound: per-cut events (t1 log2 L_joint, t1 log2 L_direct + "
        "t3 log2 L_relay)"
        if side == "upper"
        else "achievability side: weighted event coefficients "
        "(2(t1+t2)-1) t/(t1+t2) and (1-t1-t2) t/(t1+t2) used verbatim"
    )
    return HalfDuplexExponentBound(
        d12=float(max(valid12)), d21=float(max(valid21)),
        per_point=per_point, note=note,
    )


def dmt_upper_half(
    dims: DmtDims, r12: float, r21: float, snr_grid_db, trials: int,
    t_grid, seed: int, jobs: int = 1,
    min_target_bits: float = DEFAULT_TARGET_FLOOR_BITS,
) -> HalfDuplexExponentBound:
    """Monte Carlo upper bound on the half-duplex tradeoff: per phase
    split, the min of the broadcast-type and relay-transmit-type event
    exponents; reported as the max over the grid."""
    return _half_exponent_bound(
        "upper", dims, r12, r21, snr_grid_db, trials, t_grid, seed, jobs,
        min_target_bits,
    )


def dmt_lower_half(
    dims: DmtDims, r12: float, r21: float, snr_grid_db, trials: int,
    t_grid, seed: int, jobs: int = 1,
    min_target_bits: float = DEFAULT_TARGET_FLOOR_BITS,
) -> HalfDuplexExponentBound:
    """Achievability-side exponents of the half-duplex CF strategy.

    The second event uses the published weighted coefficient pattern
    verbatim (see the returned ``note``); it can go negative for
    t1 + t2 < 1/2, which the max over the grid discards naturally.
    """
    return _half_exponent_bound(
        "achievable", dims, r12, r21, snr_grid_db, trials, t_grid, seed, jobs,
        min_target_bits,
    )
