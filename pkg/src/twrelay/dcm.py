"""Dual channel matching: a local-CSI amplify-and-forward strategy with a
closed-form achievable rate pair for any antenna counts.

Relay k multiplies its received vector by sqrt(beta_k) * F_k with

    F_k = G_k* H_k* + H_k^r* G_k^r*,

matching both directions' channels at once.  beta_k normalizes the relay
transmit power against the exact per-realization receive covariance, so
the power constraint holds for every draw (not just on ensemble average).
Rates use the equal two-phase time split (1/2 prefactor).
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelSet, NetworkDims, PowerConfig, PowerConstraint, draw_channels
from .errors import DegenerateChannel
from .linalg import hermitian_logdet2, solve_hermitian

# Relay loads below this are treated as carrying no signal.
_LOAD_FLOOR = 1e-300


def _conj_t(arr: np.ndarray) -> np.ndarray:
    return arr.conj().transpose(0, 2, 1)


def dcm_gains(ch: ChannelSet) -> np.ndarray:
    """Matching gains F_k = G_k* H_k* + H_k^r* G_k^r*, stacked (K, N, N)."""
    return _conj_t(ch.g) @ _conj_t(ch.h) + _conj_t(ch.hr) @ _conj_t(ch.gr)


def relay_input_covariance(ch: ChannelSet, P: float) -> np.ndarray:
    """Receive covariance at each relay: (P/M)(H H* + G^r G^r*) + I_N."""
    d = ch.dims
    sig = (P / d.M) * (ch.h @ _conj_t(ch.h) + ch.gr @ _conj_t(ch.gr))
    return sig + np.eye(d.N)[None, :, :]


def _relay_loads(ch: ChannelSet, P: float, gains: np.ndarray) -> np.ndarray:
    """tr(F_k Sigma_k F_k*): relay-k transmit power per unit beta_k."""
    cov = relay_input_covariance(ch, P)
    prod = gains @ cov @ _conj_t(gains)
    return np.real(np.trace(prod, axis1=1, axis2=2))


def dcm_normalization(ch: ChannelSet, P: float, power_config: PowerConfig) -> np.ndarray:
    """Power-normalization factors beta_k.

    Sum constraint: one common beta with total transmit power exactly P_R.
    Per-relay constraint: each relay exhausts its own budget P_R.

    Raises
    ------
    DegenerateChannel
        If every relay load is zero (all-zero channels); rates are then
        defined as zero by the caller.
    """
    gains = dcm_gains(ch)
    loads = _relay_loads(ch, P, gains)
    if np.all(loads <= _LOAD_FLOOR):
        raise DegenerateChannel("all relay loads are zero")
    if power_config.constraint == PowerConstraint.SUM_ACROSS_RELAYS:
        return np.full(ch.dims.K, power_config.P_R / float(loads.sum()))
    beta = np.zeros(ch.dims.K)
    active = loads > _LOAD_FLOOR
    beta[active] = power_config.P_R / loads[active]
    return beta


def dcm_weights(ch: ChannelSet, P: float, power_config: PowerConfig) -> np.ndarray:
    """Effective AF relay weights sqrt(beta_k) F_k, stacked (K, N, N)."""
    beta = dcm_normalization(ch, P, power_config)
    return np.sqrt(beta)[:, None, None] * dcm_gains(ch)


def dcm_rates(ch: ChannelSet, P: float, power_config: PowerConfig):
    """Achievable rate pair (r12, r21) in bits under dual channel matching.

    r12 = (1/2) log2 det(I + A A* (sum_k B_k B_k* + I)^{-1}) with
    A = sum_k sqrt(P beta_k / M) G_k F_k H_k and B_k = sqrt(beta_k) G_k F_k;
    r21 analogously through the reverse channels.
    """
    d = ch.dims
    try:
        beta = dcm_normalization(ch, P, power_config)
    except DegenerateChannel:
        return 0.0, 0.0
    gains = dcm_gains(ch)
    amp = np.sqrt(P * beta / d.M)[:, None, None]
    noise_amp = np.sqrt(beta)[:, None, None]

    fwd_sig = (amp * (ch.g @ gains @ ch.h)).sum(axis=0)
    fwd_noise = noise_amp * (ch.g @ gains)
    r12 = _logdet_rate(fwd_sig, fwd_noise, d.M)

    rev_sig = (amp * (ch.hr @ gains @ ch.gr)).sum(axis=0)
    rev_noise = noise_amp * (ch.hr @ gains)
    r21 = _logdet_rate(rev_sig, rev_noise, d.M)
    return r12, r21


def _logdet_rate(sig: np.ndarray, noise_terms: np.ndarray, m: int) -> float:
    """(1/2) log2 det(I + S S* (sum_k N_k N_k* + I)^{-1}) via the
    equivalent Hermitian form det(I + S* Cov^{-1} S)."""
    cov = (noise_terms @ _conj_t(noise_terms)).sum(axis=0) + np.eye(m)
    inv_sig = solve_hermitian(cov, sig)
    quad = sig.conj().T @ inv_sig
    quad = 0.5 * (quad + quad.conj().T)
    return 0.5 * hermitian_logdet2(np.eye(m) + quad)


def asymptotic_constants(
    dims: NetworkDims, P: float, P_R: float, n_samples: int, seed: int
):
    """Monte Carlo estimates of the large-K normalization constants.

    ``c1`` is the expected relay transmit power per unit beta,
    E{(F r)* (F r)}; ``theta`` is the isotropic level of the forwarded
    noise covariance, E{(G F)(G F)*} = theta I_M, estimated from the
    diagonal average.  ``P_R`` does not enter either expectation; it is
    accepted for interface symmetry with the normalization it feeds.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    del P_R
    c1_acc = 0.0
    theta_acc = 0.0
    count = 0
    for i in range(n_samples):
        ch = draw_channels(dims, seed, i)
        gains = dcm_gains(ch)
        loads = _relay_loads(ch, P, gains)
        gf = ch.g @ gains
        theta_vals = np.real(np.trace(gf @ _conj_t(gf), axis1=1, axis2=2)) / dims.M
        c1_acc += float(loads.sum())
        theta_acc += float(theta_vals.sum())
        count += dims.K
    return c1_acc / count, theta_acc / count
