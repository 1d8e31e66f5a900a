"""Optimal amplify-and-forward relay weights via SINR-constrained power
minimization, and the rate-profile sweep that traces the achievable
rate-region boundary.

Scope: single-antenna terminals (M = 1); relays may carry any N.  Each
relay weight matrix is flattened column-major so every SINR and power
expression becomes a quadratic form in one stacked complex vector, and the
N > 1 case reduces to the same solver as N = 1.

The inner problem (minimize relay power subject to two SINR floors) is
nonconvex but its KKT system is sufficient: the optimal weight vector is a
null vector of the stationarity matrix

    M(l1, l2) = A - l1*((P/g0) c* c - B) - l2*((P/g1) e* e - D),

with multipliers l1, l2 >= 0 determined by the constraints.  This module
solves for the multipliers with a damped Newton iteration on
(min-eigenvalue of M, equality of the two constraint margins), falling
back to Nelder-Mead restarts and a deterministic boundary sweep.  When one
constraint is inactive the problem degenerates to classical max-SINR
beamforming and is solved exactly as a generalized eigenproblem.

Rate convention: achievable rates are end-to-end bits per channel use of
the two-phase protocol with an equal time split, i.e. R = (1/2) log2(1 +
SINR).  A rate target R therefore maps to the SINR floor 2^(2R) - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg
import scipy.optimize

from .channel import ChannelSet, NetworkDims, PowerConfig, PowerConstraint
from .errors import DidNotConverge, DimensionMismatch, Infeasible

# Relative slack allowed on SINR constraints of a returned solution.
SINR_SLACK = 1e-6
# Stationarity residual bound ||M w|| / ||w|| for a converged solution.
KKT_TOL = 1e-6
# Outer bisection bracket width on the sum rate, in bits.
RATE_TOL_BITS = 1e-4
MAX_INNER_ITER = 200


class Direction(Enum):
    T1_TO_T2 = "T1to2"
    T2_TO_T1 = "T2to1"


@dataclass(frozen=True)
class BeamformerSolution:
    """Relay weights plus the KKT certificate of the inner solve."""

    weights: np.ndarray  # (K, N, N)
    sinr12: float
    sinr21: float
    total_power: float
    per_relay_power: np.ndarray  # (K,)
    lambda1: float
    lambda2: float
    kkt_residual: float
    iterations: int
    feasible: bool


@dataclass(frozen=True)
class RegionSample:
    beta: float
    r12: float
    r21: float
    solution: BeamformerSolution


@dataclass(frozen=True)
class RateRegion:
    samples: tuple[RegionSample, ...]
    power_config: PowerConfig
    dims: NetworkDims


def _scalar_views(ch: ChannelSet):
    """Channel rows/columns for M = 1: g, h, hr, gr per relay."""
    if ch.dims.M != 1:
        raise DimensionMismatch(
            f"amplify-and-forward solver requires M = 1, got M = {ch.dims.M}"
        )
    return ch.g[:, 0, :], ch.h[:, :, 0], ch.hr[:, 0, :], ch.gr[:, :, 0]


def _check_weights(weights: np.ndarray, dims: NetworkDims) -> np.ndarray:
    weights = np.asarray(weights, dtype=complex)
    if weights.shape != (dims.K, dims.N, dims.N):
        raise DimensionMismatch(
            f"weights shape {weights.shape} != {(dims.K, dims.N, dims.N)}"
        )
    return weights


def af_sinr(weights: np.ndarray, ch: ChannelSet, P: float, direction: Direction) -> float:
    """Receive SINR of one link under AF relaying (forwarded noise counts
    as interference).  Includes the terminal transmit power P."""
    g, h, hr, gr = _scalar_views(ch)
    weights = _check_weights(weights, ch.dims)
    if direction == Direction.T1_TO_T2:
        rows, cols = g, h
    else:
        rows, cols = hr, gr
    signal = np.einsum("kn,knm,km->", rows, weights, cols)
    fwd = np.einsum("kn,knm->km", rows, weights)
    denom = 1.0 + float(np.sum(np.abs(fwd) ** 2))
    return float(P * np.abs(signal) ** 2 / denom)


def relay_power(weights: np.ndarray, ch: ChannelSet, P: float):
    """Transmit power consumed by each relay and their total.

    Per relay: P (||W h||^2 + ||W gr||^2) + ||W||_F^2, with unit-power
    relay noise contributing the Frobenius term.
    """
    _, h, _, gr = _scalar_views(ch)
    weights = _check_weights(weights, ch.dims)
    wh = np.einsum("knm,km->kn", weights, h)
    wgr = np.einsum("knm,km->kn", weights, gr)
    per = P * (
        np.sum(np.abs(wh) ** 2, axis=1) + np.sum(np.abs(wgr) ** 2, axis=1)
    ) + np.sum(np.abs(weights) ** 2, axis=(1, 2))
    per = per.real.astype(float)
    return float(per.sum()), per


@dataclass
class _VecSolution:
    w: np.ndarray
    lam1: float
    lam2: float
    iterations: int


class _AfProblem:
    """Quadratic forms of the power-minimization problem for one channel
    realization, in the stacked vec-weight coordinates."""

    def __init__(self, ch: ChannelSet, P: float):
        g, h, hr, gr = _scalar_views(ch)
        self.ch = ch
        self.P = float(P)
        K, N = ch.dims.K, ch.dims.N
        self.K, self.N = K, N
        d = N * N
        self.block = d
        eye_n = np.eye(N)
        a_blocks, b_blocks, d_blocks = [], [], []
        c_rows, e_rows = [], []
        for k in range(K):
            c_rows.append(np.kron(h[k], g[k]))
            e_rows.append(np.kron(gr[k], hr[k]))
            b_blocks.append(np.kron(eye_n, np.outer(g[k].conj(), g[k])))
            d_blocks.append(np.kron(eye_n, np.outer(hr[k].conj(), hr[k])))
            a_blocks.append(
                P
                * (
                    np.kron(np.outer(h[k].conj(), h[k]), eye_n)
                    + np.kron(np.outer(gr[k].conj(), gr[k]), eye_n)
                )
                + np.eye(d)
            )
        self.A = scipy.linalg.block_diag(*a_blocks)
        self.B = scipy.linalg.block_diag(*b_blocks)
        self.D = scipy.linalg.block_diag(*d_blocks)
        self.c = np.concatenate(c_rows)
        self.e = np.concatenate(e_rows)
        self.outer_c = np.outer(self.c.conj(), self.c)
        self.outer_e = np.outer(self.e.conj(), self.e)
        self.n = K * d
        self.scale = float(np.real(np.trace(self.A))) / self.n

    # -- conversions ---------------------------------------------------

    def vec_to_weights(self, w: np.ndarray) -> np.ndarray:
        out = np.empty((self.K, self.N, self.N), dtype=complex)
        for k in range(self.K):
            out[k] = w[k * self.block : (k + 1) * self.block].reshape(
                (self.N, self.N), order="F"
            )
        return out

    def total_power(self, w: np.ndarray) -> float:
        return float(np.real(w.conj() @ (self.A @ w)))

    def per_relay_power(self, w: np.ndarray) -> np.ndarray:
        out = np.empty(self.K)
        for k in range(self.K):
            wk = w[k * self.block : (k + 1) * self.block]
            ak = self.A[
                k * self.block : (k + 1) * self.block,
                k * self.block : (k + 1) * self.block,
            ]
            out[k] = np.real(wk.conj() @ (ak @ wk))
        return out

    def _margin_matrices(self, gamma0: float, gamma1: float):
        q1 = (self.P / gamma0) * self.outer_c - self.B if gamma0 > 0 else None
        q2 = (self.P / gamma1) * self.outer_e - self.D if gamma1 > 0 else None
        return q1, q2

    # -- single-constraint subproblem -----------------------------------

    def _solve_single(self, qmat: np.ndarray):
        """Min-power weights meeting one SINR floor: the top generalized
        eigenpair of the margin matrix against the power matrix."""
        vals, vecs = scipy.linalg.eigh(qmat, self.A)
        lam_max = float(vals[-1])
        if lam_max <= 0.0:
            raise Infeasible("SINR target at or above its achievable supremum")
        u = vecs[:, -1]
        margin = float(np.real(u.conj() @ (qmat @ u)))
        w = u / np.sqrt(margin)
        return w, 1.0 / lam_max

    def _margin(self, qmat: np.ndarray, w: np.ndarray) -> float:
        return float(np.real(w.conj() @ (qmat @ w)))

    # -- both-constraints-active machinery ------------------------------

    def _stationarity(self, lam, q1, q2):
        return self.A - lam[0] * q1 - lam[1] * q2

    def _residuals(self, lam, q1, q2):
        mm = self._stationarity(lam, q1, q2)
        evals, evecs = np.linalg.eigh(mm)
        u = evecs[:, 0]
        m1 = self._margin(q1, u)
        m2 = self._margin(q2, u)
        f = np.array(
            [evals[0] / self.scale, (m1 - m2) / (abs(m1) + abs(m2) + 1e-300)]
        )
        return f, u, m1, m2

    def _balanced_direction(self, q1, q2):
        """Minimize the top eigenvalue of mu Q1 + (1 - mu) Q2 over [0, 1].

        The joint numerical range of two Hermitian forms is convex, so the
        two constraints admit a common strictly-positive direction exactly
        when this minimum is positive; the function is convex in mu.
        Returns (mu_star, phi_star).
        """
        invphi = (np.sqrt(5.0) - 1.0) / 2.0

        def phi(mu):
            return float(np.linalg.eigvalsh(mu * q1 + (1.0 - mu) * q2)[-1])

        lo, hi = 0.0, 1.0
        x1 = hi - invphi * (hi - lo)
        x2 = lo + invphi * (hi - lo)
        f1, f2 = phi(x1), phi(x2)
        for _ in range(70):
            if f1 > f2:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + invphi * (hi - lo)
                f2 = phi(x2)
            else:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - invphi * (hi - lo)
                f1 = phi(x1)
        mu = x1 if f1 <= f2 else x2
        return mu, min(f1, f2)

    def _boundary_on_ray(self, q1, q2, ray, iters=48):
        """Largest multiplier pair along `ray` keeping the stationarity
        matrix PSD, or None if the ray never leaves the PSD region."""
        ray = np.asarray(ray, dtype=float)
        ray = ray / np.linalg.norm(ray)
        qd = ray[0] * q1 + ray[1] * q2
        qnorm = np.linalg.norm(qd, 2)
        if qnorm == 0.0:
            return None

        def emin(t):
            return np.linalg.eigvalsh(self.A - t * qd)[0]

        t_lo, t_hi = 0.0, self.scale / qnorm
        grow = 0
        while emin(t_hi) > 0.0:
            t_lo, t_hi = t_hi, 2.0 * t_hi
            grow += 1
            if grow > 60:
                return None
        for _ in range(iters):
            mid = 0.5 * (t_lo + t_hi)
            if emin(mid) > 0.0:
                t_lo = mid
            else:
                t_hi = mid
        return t_lo * ray

    def _newton(self, lam0, q1, q2, max_iter):
        lam = np.asarray(lam0, dtype=float).copy()
        f, u, m1, m2 = self._residuals(lam, q1, q2)
        it = 0
        for it in range(1, max_iter + 1):
            if abs(f[0]) < 1e-10 and abs(f[1]) < 1e-9 and min(m1, m2) > 0:
                return lam, it, True
            jac = np.empty((2, 2))
            for i in range(2):
                step = 1e-7 * (1.0 + abs(lam[i]))
                bumped = lam.copy()
                bumped[i] += step
                fb, _, _, _ = self._residuals(bumped, q1, q2)
                jac[:, i] = (fb - f) / step
            try:
                delta = np.linalg.solve(jac, -f)
            except np.linalg.LinAlgError:
                return lam, it, False
            fnorm = np.max(np.abs(f))
            t, accepted = 1.0, False
            for _ in range(30):
                cand = lam + t * delta
                if cand[0] > 0 and cand[1] > 0:
                    fc, uc, m1c, m2c = self._residuals(cand, q1, q2)
                    if np.max(np.abs(fc)) < fnorm:
                        lam, f, u, m1, m2 = cand, fc, uc, m1c, m2c
                        accepted = True
                        break
                t *= 0.5
            if not accepted:
                return lam, it, False
        return lam, it, abs(f[0]) < 1e-10 and abs(f[1]) < 1e-9 and min(m1, m2) > 0

    def _nelder_mead(self, q1, q2, lam_ref, restarts=8):
        """Randomized fallback minimizing the residual norm; deterministic
        via a fixed restart stream."""

        def cost(lam):
            if lam[0] <= 0 or lam[1] <= 0:
                return 1e6 + np.sum(np.maximum(0.0, -lam))
            f, _, _, _ = self._residuals(lam, q1, q2)
            return float(np.max(np.abs(f)))

        rng = np.random.default_rng(0)
        best, best_cost = None, np.inf
        for _ in range(restarts):
            start = lam_ref * np.exp(rng.uniform(-1.5, 1.5, size=2))
            res = scipy.optimize.minimize(
                cost, start, method="Nelder-Mead",
                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 400},
            )
            if res.fun < best_cost:
                best, best_cost = res.x, res.fun
        return best

    def _boundary_sweep(self, q1, q2):
        """Golden-section over the multiplier-ray angle, maximizing
        lam1 + lam2 on the PSD boundary.  Deterministic last resort."""

        def value(theta):
            ray = np.array([np.cos(theta), np.sin(theta)])
            lam = self._boundary_on_ray(q1, q2, ray, iters=40)
            if lam is None:
                return -np.inf, None
            return lam[0] + lam[1], lam

        lo, hi = 1e-3, np.pi / 2 - 1e-3
        invphi = (np.sqrt(5.0) - 1.0) / 2.0
        x1 = hi - invphi * (hi - lo)
        x2 = lo + invphi * (hi - lo)
        f1, lam1v = value(x1)
        f2, lam2v = value(x2)
        for _ in range(60):
            if f1 < f2:
                lo, x1, f1, lam1v = x1, x2, f2, lam2v
                x2 = lo + invphi * (hi - lo)
                f2, lam2v = value(x2)
            else:
                hi, x2, f2, lam2v = x2, x1, f1, lam1v
                x1 = hi - invphi * (hi - lo)
                f1, lam1v = value(x1)
        return lam1v if f1 >= f2 else lam2v

    def _extract(self, lam, q1, q2):
        mm = self._stationarity(lam, q1, q2)
        _, evecs = np.linalg.eigh(mm)
        u = evecs[:, 0]
        m1 = self._margin(q1, u)
        m2 = self._margin(q2, u)
        if min(m1, m2) <= 0:
            return None
        w = u / np.sqrt(min(m1, m2))
        return w

    def solve(self, gamma0: float, gamma1: float, warm=None, max_iter=MAX_INNER_ITER):
        """Minimum-power weights meeting SINR floors (gamma0, gamma1).

        Targets are in the same units as :func:`af_sinr` (terminal power
        included).  Returns a :class:`_VecSolution`; raises
        :class:`Infeasible` when a target exceeds its supremum and
        :class:`DidNotConverge` when every search stage fails.
        """
        if gamma0 < 0 or gamma1 < 0:
            raise ValueError("SINR targets must be nonnegative")
        if gamma0 == 0 and gamma1 == 0:
            return _VecSolution(np.zeros(self.n, dtype=complex), 0.0, 0.0, 0)
        q1, q2 = self._margin_matrices(gamma0, gamma1)
        if gamma1 == 0:
            w, dual = self._solve_single(q1)
            return _VecSolution(w, dual, 0.0, 1)
        if gamma0 == 0:
            w, dual = self._solve_single(q2)
            return _VecSolution(w, 0.0, dual, 1)

        w1, dual1 = self._solve_single(q1)
        if self._margin(q2, w1) >= 1.0 - 1e-9:
            return _VecSolution(w1, dual1, 0.0, 1)
        w2, dual2 = self._solve_single(q2)
        if self._margin(q1, w2) >= 1.0 - 1e-9:
            return _VecSolution(w2, 0.0, dual2, 1)

        # Both constraints active at the optimum.
        total_it = 0
        if warm is not None and warm[0] > 0 and warm[1] > 0:
            lam, it, ok = self._newton(np.asarray(warm, dtype=float), q1, q2, max_iter)
            total_it += it
            if ok:
                w = self._extract(lam, q1, q2)
                if w is not None:
                    return _VecSolution(w, lam[0], lam[1], total_it)
        # A common strictly-positive direction for both margins exists iff
        # min_mu lambda_max(mu Q1 + (1 - mu) Q2) > 0 (convex joint range).
        mu_star, phi_star = self._balanced_direction(q1, q2)
        qscale = max(np.linalg.norm(q1, 2), np.linalg.norm(q2, 2))
        if phi_star <= 1e-13 * qscale:
            raise Infeasible(
                "SINR targets jointly unattainable: some nonnegative "
                "combination of the margin forms is negative semidefinite"
            )
        init = self._boundary_on_ray(q1, q2, (mu_star, 1.0 - mu_star))
        if init is not None:
            lam, it, ok = self._newton(init, q1, q2, max_iter)
            total_it += it
            if ok:
                w = self._extract(lam, q1, q2)
                if w is not None:
                    return _VecSolution(w, lam[0], lam[1], total_it)
        # Fallbacks: randomized simplex restarts, then the deterministic
        # boundary sweep; both are polished by Newton.
        lam_ref = init if init is not None else np.array([dual1, dual2])
        for lam_try in (
            self._nelder_mead(q1, q2, lam_ref),
            self._boundary_sweep(q1, q2),
        ):
            if lam_try is None:
                continue
            lam, it, ok = self._newton(np.maximum(lam_try, 1e-300), q1, q2, 60)
            total_it += it
            if ok:
                w = self._extract(lam, q1, q2)
                if w is not None:
                    return _VecSolution(w, lam[0], lam[1], total_it)
        raise DidNotConverge(
            f"inner KKT search failed: gamma0={gamma0:.6g}, gamma1={gamma1:.6g}"
        )

    # -- one-way (single direction) maximum rate ------------------------

    def one_way_max(self, direction_idx: int, budget: float):
        """Budget-limited max SINR for one link: closed form via
        (B + A/P_R)^{-1}.  Returns (rate_bits, weight_vec)."""
        row = self.c if direction_idx == 0 else self.e
        xmat = self.B if direction_idx == 0 else self.D
        smat = xmat + self.A / budget
        y = np.linalg.solve(smat, row.conj())
        gmax = float(self.P * np.real(row @ y))
        if gmax <= 0.0:
            return 0.0, np.zeros(self.n, dtype=complex)
        pa = float(np.real(y.conj() @ (self.A @ y)))
        w = y * np.sqrt(budget / pa)
        return 0.5 * np.log2(1.0 + gmax), w

    def one_way_max_per_relay(self, direction_idx: int, budget: float, tol_bits: float):
        """Conservative per-relay variant: bisect the rate, solving the
        sum-power problem and testing each relay against the budget."""
        hi, _ = self.one_way_max(direction_idx, budget * self.K)
        if hi <= 0.0:
            return 0.0, np.zeros(self.n, dtype=complex)
        lo = 0.0
        w_best = np.zeros(self.n, dtype=complex)
        while hi - lo > tol_bits:
            mid = 0.5 * (lo + hi)
            gamma = 2.0 ** (2.0 * mid) - 1.0
            q1, q2 = self._margin_matrices(
                gamma if direction_idx == 0 else 0.0,
                gamma if direction_idx == 1 else 0.0,
            )
            try:
                w, _ = self._solve_single(q1 if direction_idx == 0 else q2)
            except Infeasible:
                hi = mid
                continue
            if self.per_relay_power(w).max() <= budget * (1 + 1e-12):
                lo, w_best = mid, w
            else:
                hi = mid
        return lo, w_best


def _finish_solution(
    prob: _AfProblem, vec: _VecSolution, gamma0: float, gamma1: float
) -> BeamformerSolution:
    """Assemble the public solution record and verify its certificate."""
    w = vec.w
    weights = prob.vec_to_weights(w)
    wnorm = float(np.linalg.norm(w))
    if wnorm == 0.0:
        kkt = 0.0
    else:
        q1, q2 = prob._margin_matrices(gamma0, gamma1)
        mm = prob.A.copy()
        if q1 is not None:
            mm -= vec.lam1 * q1
        if q2 is not None:
            mm -= vec.lam2 * q2
        kkt = float(np.linalg.norm(mm @ w) / wnorm)
        # Canonical global phase: forward signal coefficient real positive.
        ph = prob.c @ w
        if abs(ph) > 0:
            weights = weights * (ph.conjugate() / abs(ph))
    sinr12 = af_sinr(weights, prob.ch, prob.P, Direction.T1_TO_T2)
    sinr21 = af_sinr(weights, prob.ch, prob.P, Direction.T2_TO_T1)
    total, per = relay_power(weights, prob.ch, prob.P)
    sol = BeamformerSolution(
        weights=weights,
        sinr12=sinr12,
        sinr21=sinr21,
        total_power=total,
        per_relay_power=per,
        lambda1=vec.lam1,
        lambda2=vec.lam2,
        kkt_residual=kkt,
        iterations=vec.iterations,
        feasible=True,
    )
    _verify(sol, gamma0, gamma1)
    return sol


def _verify(sol: BeamformerSolution, gamma0: float, gamma1: float) -> None:
    for target, achieved, lam in (
        (gamma0, sol.sinr12, sol.lambda1),
        (gamma1, sol.sinr21, sol.lambda2),
    ):
        if target > 0 and achieved < target * (1.0 - SINR_SLACK):
            raise DidNotConverge(
                f"SINR constraint violated: achieved {achieved:.9g} < target {target:.9g}"
            )
        if lam > 1e-9 and target > 0 and achieved > target * (1.0 + 1e-4):
            raise DidNotConverge(
                f"active constraint slack too large: {achieved:.9g} vs {target:.9g}"
            )
    if sol.kkt_residual > KKT_TOL:
        raise DidNotConverge(f"stationarity residual {sol.kkt_residual:.3e} > {KKT_TOL}")


def solve_min_power(
    ch: ChannelSet, P: float, gamma0: float, gamma1: float
) -> BeamformerSolution:
    """Minimum total relay power meeting both SINR floors.

    ``gamma0`` bounds the terminal-1 -> terminal-2 SINR and ``gamma1`` the
    reverse link, both in :func:`af_sinr` units (terminal power included).
    The returned solution carries its own KKT certificate: active
    constraints are tight to 1e-6 relative and the stationarity residual
    is below 1e-6.
    """
    prob = _AfProblem(ch, P)
    vec = prob.solve(gamma0, gamma1)
    return _finish_solution(prob, vec, gamma0, gamma1)


def _budget_ok(prob: _AfProblem, w: np.ndarray, pc: PowerConfig) -> bool:
    if pc.constraint == PowerConstraint.SUM_ACROSS_RELAYS:
        return prob.total_power(w) <= pc.P_R * (1 + 1e-12)
    return prob.per_relay_power(w).max() <= pc.P_R * (1 + 1e-12)


def _zero_solution(prob: _AfProblem) -> BeamformerSolution:
    vec = _VecSolution(np.zeros(prob.n, dtype=complex), 0.0, 0.0, 0)
    return _finish_solution(prob, vec, 0.0, 0.0)


def _one_way_endpoint(prob, pc, direction_idx, tol_bits):
    if pc.constraint == PowerConstraint.SUM_ACROSS_RELAYS:
        rate, w = prob.one_way_max(direction_idx, pc.P_R)
    else:
        rate, w = prob.one_way_max_per_relay(direction_idx, pc.P_R, tol_bits)
    gamma = 2.0 ** (2.0 * rate) - 1.0
    dual = prob.total_power(w)
    if direction_idx == 0:
        vec = _VecSolution(w, dual, 0.0, 1)
        return rate, _finish_solution(prob, vec, gamma, 0.0)
    vec = _VecSolution(w, 0.0, dual, 1)
    return rate, _finish_solution(prob, vec, 0.0, gamma)


def rate_profile_solve(
    ch: ChannelSet,
    power_config: PowerConfig,
    P: float,
    beta: float,
    tol_bits: float = RATE_TOL_BITS,
):
    """Largest feasible sum rate with the split R12 = beta * R_sum,
    R21 = (1 - beta) * R_sum, by bisection between the last feasible and
    last infeasible sum rate.

    Returns ``(r_sum_bits, BeamformerSolution)``.  Rates are end-to-end
    (equal two-phase time split), so the SINR floors passed to the inner
    solver are 2^(2 beta R) - 1 and 2^(2 (1-beta) R) - 1.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    prob = _AfProblem(ch, P)
    return _rate_profile(prob, power_config, beta, tol_bits)


def _rate_profile(prob, pc, beta, tol_bits):
    if beta == 1.0:
        return _one_way_endpoint(prob, pc, 0, tol_bits)
    if beta == 0.0:
        return _one_way_endpoint(prob, pc, 1, tol_bits)
    if pc.constraint == PowerConstraint.SUM_ACROSS_RELAYS:
        r12_max, _ = prob.one_way_max(0, pc.P_R)
        r21_max, _ = prob.one_way_max(1, pc.P_R)
    else:
        r12_max, _ = prob.one_way_max_per_relay(0, pc.P_R, tol_bits)
        r21_max, _ = prob.one_way_max_per_relay(1, pc.P_R, tol_bits)
    if r12_max <= 0.0 or r21_max <= 0.0:
        return 0.0, _zero_solution(prob)

    def attempt(r_sum, warm):
        g0 = 2.0 ** (2.0 * beta * r_sum) - 1.0
        g1 = 2.0 ** (2.0 * (1.0 - beta) * r_sum) - 1.0
        try:
            vec = prob.solve(g0, g1, warm=warm)
        except Infeasible:
            return False, None, (g0, g1)
        return _budget_ok(prob, vec.w, pc), vec, (g0, g1)

    hi = min(r12_max / beta, r21_max / (1.0 - beta))
    lo = 0.0
    warm = None
    ok, vec, gammas = attempt(hi, warm)
    if ok:
        return hi, _finish_solution(prob, vec, *gammas)
    best = None
    while hi - lo > tol_bits:
        mid = 0.5 * (lo + hi)
        ok, vec, gammas = attempt(mid, warm)
        if vec is not None:
            warm = (vec.lam1, vec.lam2)
        if ok:
            lo, best = mid, (vec, gammas)
        else:
            hi = mid
    if best is None:
        return 0.0, _zero_solution(prob)
    vec, gammas = best
    return lo, _finish_solution(prob, vec, *gammas)


def af_rate_region(
    ch: ChannelSet,
    power_config: PowerConfig,
    P: float,
    beta_grid,
    tol_bits: float = RATE_TOL_BITS,
) -> RateRegion:
    """Boundary of the achievable AF rate region, one sample per beta."""
    prob = _AfProblem(ch, P)
    samples = []
    for beta in beta_grid:
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {beta}")
        r_sum, sol = _rate_profile(prob, power_config, float(beta), tol_bits)
        samples.append(
            RegionSample(
                beta=float(beta),
                r12=float(beta) * r_sum,
                r21=(1.0 - float(beta)) * r_sum,
                solution=sol,
            )
        )
    return RateRegion(samples=tuple(samples), power_config=power_config, dims=ch.dims)
