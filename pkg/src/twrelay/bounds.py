"""Cut-set upper bounds on the two-way relay capacity region.

Broadcast cut: each terminal against all relays cooperating as one
receiver, giving an alpha-weighted log-det cap per direction.  Multiple
access cut: all relays cooperating as one transmitter with the relay
power budget waterfilled over the composite channel's eigenmodes.  The
outer region is the union over the time-split grid of the rectangles the
two caps carve out.

Both directions of the broadcast cut use P/M (the published reverse-link
expression carries a 1/K that the derivation's symmetry rules out).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .errors import NoPositiveEigenvalue
from .linalg import hermitian_eigvals, hermitian_logdet2

# Eigenvalues below this are dropped before waterfilling.
EIG_DROP = 1e-12


@dataclass(frozen=True)
class CutSetBound:
    """Per-alpha rate caps; cap12/cap21 are the min of the two cuts."""

    alpha_grid: tuple[float, ...]
    bc12: np.ndarray
    bc21: np.ndarray
    mac12: np.ndarray
    mac21: np.ndarray
    cap12: np.ndarray
    cap21: np.ndarray

    def envelope(self) -> list[tuple[float, float]]:
        """Pareto-maximal (cap12, cap21) corner points, sorted by cap12."""
        pts = sorted(zip(self.cap12, self.cap21))
        keep: list[tuple[float, float]] = []
        best21 = -np.inf
        for c12, c21 in reversed(pts):
            if c21 > best21:
                keep.append((float(c12), float(c21)))
                best21 = c21
        return keep[::-1]


def broadcast_bound(ch: ChannelSet, P: float, alpha: float):
    """Broadcast-cut caps (bc12, bc21) in bits at time split alpha."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    d = ch.dims
    eye = np.eye(d.M)
    s1 = np.einsum("knm,knq->mq", ch.h.conj(), ch.h)
    s2 = np.einsum("knm,knq->mq", ch.gr.conj(), ch.gr)
    bc12 = alpha * hermitian_logdet2(eye + (P / d.M) * s1)
    bc21 = alpha * hermitian_logdet2(eye + (P / d.M) * s2)
    return bc12, bc21


def waterfill(eigs, p_r: float) -> float:
    """Water level nu with sum_l max(0, nu - 1/lambda_l) = p_r."""
    lam = np.asarray(eigs, dtype=float)
    if lam.size == 0 or np.any(lam <= 0.0):
        raise NoPositiveEigenvalue("waterfilling needs strictly positive eigenvalues")
    if p_r <= 0.0:
        raise ValueError(f"power budget must be positive, got {p_r}")
    inv = np.sort(1.0 / lam)
    # Fill the m strongest levels; m is the largest count whose common
    # water level still sits above the m-th floor.
    nu = 0.0
    for m in range(1, inv.size + 1):
        cand = (p_r + inv[:m].sum()) / m
        if cand > inv[m - 1] and (m == inv.size or cand <= inv[m]):
            nu = cand
            break
    else:  # pragma: no cover - the loop always finds a level
        nu = (p_r + inv.sum()) / inv.size
    return float(nu)


def _mac_one_direction(stacked: np.ndarray, K: int, p_r: float, alpha: float) -> float:
    phi = stacked / np.sqrt(K)
    eigs = hermitian_eigvals(phi @ phi.conj().T)
    eigs = eigs[eigs > EIG_DROP]
    if eigs.size == 0:
        return 0.0
    nu = waterfill(eigs, p_r)
    terms = np.log2(K * eigs * nu)
    return float((1.0 - alpha) * np.sum(np.maximum(0.0, terms)))


def mac_bound(ch: ChannelSet, P_R: float, alpha: float):
    """Multiple-access-cut caps (mac12, mac21) in bits at split alpha.

    The cap per direction is (1-alpha) sum_l max(0, log2(K lambda_l nu))
    over the eigenvalues of Phi Phi* with Phi = K^{-1/2}[G_1 ... G_K]
    (relays -> terminal 2), or the H^r stack for relays -> terminal 1.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    d = ch.dims
    to_t2 = np.concatenate([ch.g[k] for k in range(d.K)], axis=1)
    to_t1 = np.concatenate([ch.hr[k] for k in range(d.K)], axis=1)
    mac12 = _mac_one_direction(to_t2, d.K, P_R, alpha)
    mac21 = _mac_one_direction(to_t1, d.K, P_R, alpha)
    return mac12, mac21


def cutset_region(ch: ChannelSet, P: float, P_R: float, alpha_grid) -> CutSetBound:
    """Cut-set caps over a grid of time splits."""
    alphas = tuple(float(a) for a in alpha_grid)
    if not alphas:
        raise ValueError("alpha_grid must be non-empty")
    bc12 = np.empty(len(alphas))
    bc21 = np.empty(len(alphas))
    mac12 = np.empty(len(alphas))
    mac21 = np.empty(len(alphas))
    for i, a in enumerate(alphas):
        bc12[i], bc21[i] = broadcast_bound(ch, P, a)
        mac12[i], mac21[i] = mac_bound(ch, P_R, a)
    return CutSetBound(
        alpha_grid=alphas,
        bc12=bc12,
        bc21=bc21,
        mac12=mac12,
        mac21=mac21,
        cap12=np.minimum(bc12, mac12),
        cap21=np.minimum(bc21, mac21),
    )
