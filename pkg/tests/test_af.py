import numpy as np
import pytest

from twrelay.af import (
    Direction,
    af_rate_region,
    af_sinr,
    rate_profile_solve,
    relay_power,
    solve_min_power,
)
from twrelay.channel import ChannelSet, NetworkDims, PowerConfig, PowerConstraint, draw_channels
from twrelay.errors import DimensionMismatch, Infeasible

from oracles import (
    min_power_random_search,
    min_power_single_relay,
    one_way_rate_grid,
    relay_power_scalar,
    sinr_forward_scalar,
    sinr_reverse_scalar,
)


def unit_channels():
    one = np.ones((1, 1, 1), dtype=complex)
    return ChannelSet(dims=NetworkDims(1, 1, 1), h=one, hr=one, g=one, gr=one)


def scalar_channels(seed, K):
    return draw_channels(NetworkDims(1, 1, K), seed, 0)


def scalar_parts(ch):
    return ch.g[:, 0, 0], ch.h[:, 0, 0], ch.hr[:, 0, 0], ch.gr[:, 0, 0]


class TestSinrAndPower:
    def test_zero_weights(self):
        ch = scalar_channels(0, 3)
        w = np.zeros((3, 1, 1), dtype=complex)
        assert af_sinr(w, ch, 10.0, Direction.T1_TO_T2) == 0.0
        total, per = relay_power(w, ch, 10.0)
        assert total == 0.0
        np.testing.assert_array_equal(per, np.zeros(3))

    def test_unit_case(self):
        ch = unit_channels()
        w = np.ones((1, 1, 1), dtype=complex)
        assert af_sinr(w, ch, 10.0, Direction.T1_TO_T2) == pytest.approx(5.0)
        total, _ = relay_power(w, ch, 10.0)
        assert total == pytest.approx(21.0)

    def test_matches_scalar_recomputation(self):
        ch = scalar_channels(1, 2)
        g, h, hr, gr = scalar_parts(ch)
        rng = np.random.default_rng(2)
        w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        weights = w.reshape(2, 1, 1)
        assert af_sinr(weights, ch, 7.0, Direction.T1_TO_T2) == pytest.approx(
            sinr_forward_scalar(w, g, h, 7.0), rel=1e-12
        )
        assert af_sinr(weights, ch, 7.0, Direction.T2_TO_T1) == pytest.approx(
            sinr_reverse_scalar(w, hr, gr, 7.0), rel=1e-12
        )
        total, per = relay_power(weights, ch, 7.0)
        exp_total, exp_per = relay_power_scalar(w, h, gr, 7.0)
        assert total == pytest.approx(exp_total, rel=1e-12)
        np.testing.assert_allclose(per, exp_per, rtol=1e-12)

    def test_global_phase_invariance(self):
        ch = scalar_channels(3, 4)
        rng = np.random.default_rng(4)
        w = (rng.standard_normal(4) + 1j * rng.standard_normal(4)).reshape(4, 1, 1)
        base = af_sinr(w, ch, 5.0, Direction.T1_TO_T2)
        rotated = af_sinr(np.exp(1j * 0.7) * w, ch, 5.0, Direction.T1_TO_T2)
        assert rotated == pytest.approx(base, rel=1e-12)

    def test_dimension_checks(self):
        ch = draw_channels(NetworkDims(2, 1, 1), 0, 0)
        with pytest.raises(DimensionMismatch):
            af_sinr(np.ones((1, 1, 1), complex), ch, 1.0, Direction.T1_TO_T2)
        ch = scalar_channels(0, 2)
        with pytest.raises(DimensionMismatch):
            relay_power(np.ones((3, 1, 1), complex), ch, 1.0)


class TestSolveMinPower:
    def test_single_relay_closed_form_unit(self):
        sol = solve_min_power(unit_channels(), 10.0, 1.0, 1.0)
        assert sol.total_power == pytest.approx(21.0 / 9.0, abs=1e-9)
        assert abs(sol.weights[0, 0, 0]) ** 2 == pytest.approx(1.0 / 9.0, abs=1e-9)
        assert sol.feasible

    def test_single_relay_closed_form_random(self):
        rng = np.random.default_rng(5)
        for trial in range(25):
            ch = scalar_channels(100 + trial, 1)
            g, h, hr, gr = scalar_parts(ch)
            P = 10.0
            g0 = float(rng.uniform(0.1, 0.9)) * P * abs(h[0]) ** 2
            g1 = float(rng.uniform(0.1, 0.9)) * P * abs(gr[0]) ** 2
            sol = solve_min_power(ch, P, g0, g1)
            expected = min_power_single_relay(g[0], h[0], hr[0], gr[0], P, g0, g1)
            assert sol.total_power == pytest.approx(expected, rel=1e-6)

    def test_vacuous_targets_give_zero_power(self):
        sol = solve_min_power(scalar_channels(6, 2), 10.0, 0.0, 0.0)
        assert sol.total_power == 0.0
        assert sol.sinr12 == 0.0

    def test_power_monotone_in_targets(self):
        ch = scalar_channels(7, 2)
        g, h, hr, gr = scalar_parts(ch)
        P = 10.0
        base0 = 0.3 * P * min(abs(x) ** 2 for x in h)
        base1 = 0.3 * P * min(abs(x) ** 2 for x in gr)
        p_prev = 0.0
        for f in (0.4, 0.7, 1.0):
            sol = solve_min_power(ch, P, f * base0, f * base1)
            assert sol.total_power >= p_prev - 1e-12
            p_prev = sol.total_power

    def test_beats_random_search(self):
        rng = np.random.default_rng(8)
        P = 10.0
        for trial in range(8):
            ch = scalar_channels(200 + trial, 2)
            g, h, hr, gr = scalar_parts(ch)
            u = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            s1 = P * abs(u @ (g * h)) ** 2 / np.sum(np.abs(u * g) ** 2)
            s2 = P * abs(u @ (hr * gr)) ** 2 / np.sum(np.abs(u * hr) ** 2)
            g0 = float(rng.uniform(0.2, 0.9)) * s1
            g1 = float(rng.uniform(0.2, 0.9)) * s2
            sol = solve_min_power(ch, P, g0, g1)
            best = min_power_random_search(ch, P, g0, g1, 50_000, rng)
            assert sol.total_power <= best * 1.005

    def test_kkt_certificate(self):
        rng = np.random.default_rng(9)
        P = 10.0
        for trial in range(10):
            ch = scalar_channels(300 + trial, 3)
            g, h, hr, gr = scalar_parts(ch)
            u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            s1 = P * abs(u @ (g * h)) ** 2 / np.sum(np.abs(u * g) ** 2)
            s2 = P * abs(u @ (hr * gr)) ** 2 / np.sum(np.abs(u * hr) ** 2)
            sol = solve_min_power(ch, P, 0.6 * s1, 0.6 * s2)
            assert sol.kkt_residual < 1e-6
            assert sol.lambda1 >= 0 and sol.lambda2 >= 0
            if sol.lambda1 > 1e-9:
                assert sol.sinr12 == pytest.approx(0.6 * s1, rel=1e-6)
            if sol.lambda2 > 1e-9:
                assert sol.sinr21 == pytest.approx(0.6 * s2, rel=1e-6)
            assert sol.total_power == pytest.approx(
                float(np.sum(sol.per_relay_power)), rel=1e-9
            )

    def test_infeasible_targets_raise(self):
        ch = unit_channels()
        # Above the forward supremum P |h|^2 = 10.
        with pytest.raises(Infeasible):
            solve_min_power(ch, 10.0, 11.0, 0.1)


class TestRateProfile:
    def test_one_way_endpoint_matches_grid_oracle(self):
        for seed in (11, 12, 13):
            ch = scalar_channels(seed, 1)
            g, h, hr, gr = scalar_parts(ch)
            pc = PowerConfig(P=10.0, P_R=10.0)
            r_sum, sol = rate_profile_solve(ch, pc, 10.0, 1.0)
            expected = one_way_rate_grid(g[0], h[0], hr[0], gr[0], 10.0, 10.0)
            assert r_sum == pytest.approx(expected, abs=1e-3)
            assert sol.total_power == pytest.approx(10.0, rel=1e-9)

    def test_zero_channels_give_zero_rate(self):
        zero = np.zeros((1, 1, 1), dtype=complex)
        ch = ChannelSet(dims=NetworkDims(1, 1, 1), h=zero, hr=zero, g=zero, gr=zero)
        pc = PowerConfig(P=10.0, P_R=10.0)
        r_sum, sol = rate_profile_solve(ch, pc, 10.0, 0.5)
        assert r_sum == 0.0
        assert sol.total_power == 0.0

    def test_symmetric_channels_balanced_split(self):
        # Reverse channels mirror the forward ones, so beta = 1/2 must
        # give equal per-direction rates.
        rng = np.random.default_rng(14)
        K = 3
        h = (rng.standard_normal((K, 1, 1)) + 1j * rng.standard_normal((K, 1, 1)))
        g = (rng.standard_normal((K, 1, 1)) + 1j * rng.standard_normal((K, 1, 1)))
        ch = ChannelSet(
            dims=NetworkDims(1, 1, K), h=h, hr=g.conj(), g=g, gr=h.conj()
        )
        pc = PowerConfig(P=10.0, P_R=10.0)
        r_sum, sol = rate_profile_solve(ch, pc, 10.0, 0.5)
        assert sol.sinr12 == pytest.approx(sol.sinr21, rel=1e-6)

    def test_feasibility_bracket(self):
        # Returned rate is feasible; 1.001x the rate is not.
        from twrelay.af import _AfProblem

        ch = scalar_channels(15, 2)
        pc = PowerConfig(P=10.0, P_R=10.0)
        beta = 0.4
        r_sum, sol = rate_profile_solve(ch, pc, 10.0, beta)
        assert sol.total_power <= pc.P_R * (1 + 1e-9)
        prob = _AfProblem(ch, 10.0)
        bumped = r_sum * 1.001
        g0 = 2.0 ** (2 * beta * bumped) - 1.0
        g1 = 2.0 ** (2 * (1 - beta) * bumped) - 1.0
        try:
            vec = prob.solve(g0, g1)
            assert prob.total_power(vec.w) > pc.P_R
        except Infeasible:
            pass

    def test_rate_monotone_in_relay_budget(self):
        ch = scalar_channels(16, 2)
        prev = -1.0
        for p_r in (2.0, 10.0, 50.0):
            pc = PowerConfig(P=10.0, P_R=p_r)
            r_sum, _ = rate_profile_solve(ch, pc, 10.0, 0.5)
            assert r_sum >= prev - 1e-9
            prev = r_sum

    def test_global_phase_invariance_of_rate(self):
        ch = scalar_channels(17, 2)
        pc = PowerConfig(P=10.0, P_R=10.0)
        r_base, _ = rate_profile_solve(ch, pc, 10.0, 0.5)
        rotated = ChannelSet(
            dims=ch.dims, h=ch.h, hr=ch.hr, g=np.exp(1j * 1.1) * ch.g, gr=ch.gr
        )
        r_rot, _ = rate_profile_solve(rotated, pc, 10.0, 0.5)
        assert r_rot == pytest.approx(r_base, abs=1e-6)

    def test_multiantenna_relays_beat_random_search(self):
        # N = 2: the flattened-weights solver must dominate random search.
        ch = draw_channels(NetworkDims(1, 2, 2), 18, 0)
        pc = PowerConfig(P=10.0, P_R=10.0)
        beta = 0.5
        r_sum, sol = rate_profile_solve(ch, pc, 10.0, beta)
        assert sol.total_power <= pc.P_R * (1 + 1e-9)
        rng = np.random.default_rng(19)
        g0 = 2.0 ** (2 * beta * r_sum) - 1.0
        g1 = 2.0 ** (2 * (1 - beta) * r_sum) - 1.0
        best = min_power_random_search(ch, 10.0, g0, g1, 100_000, rng)
        assert sol.total_power <= best * 1.005

    def test_per_relay_constraint_conservative(self):
        ch = scalar_channels(20, 3)
        p = 10.0
        pc_sum = PowerConfig(P=p, P_R=p, constraint=PowerConstraint.SUM_ACROSS_RELAYS)
        pc_ind = PowerConfig(P=p, P_R=p, constraint=PowerConstraint.PER_RELAY)
        r_sum, _ = rate_profile_solve(ch, pc_sum, p, 0.5)
        r_ind, sol_ind = rate_profile_solve(ch, pc_ind, p, 0.5)
        assert np.max(sol_ind.per_relay_power) <= p * (1 + 1e-9)
        # Each relay may use up to P_R, so the individual-constraint rate
        # is at least the shared-budget rate.
        assert r_ind >= r_sum - 1e-6


class TestRateRegion:
    def test_endpoints_dominate_interior(self):
        ch = scalar_channels(21, 2)
        pc = PowerConfig(P=10.0, P_R=10.0)
        region = af_rate_region(ch, pc, 10.0, [0.0, 0.25, 0.5, 0.75, 1.0])
        r12 = {s.beta: s.r12 for s in region.samples}
        r21 = {s.beta: s.r21 for s in region.samples}
        assert r12[1.0] >= max(r12.values()) - 1e-9
        assert r21[0.0] >= max(r21.values()) - 1e-9

    def test_samples_respect_rate_profile_split(self):
        ch = scalar_channels(22, 2)
        pc = PowerConfig(P=10.0, P_R=10.0)
        region = af_rate_region(ch, pc, 10.0, [0.3, 0.6])
        for s in region.samples:
            total = s.r12 + s.r21
            assert s.r12 == pytest.approx(s.beta * total, abs=1e-6)

    def test_rejects_bad_beta(self):
        ch = scalar_channels(23, 1)
        pc = PowerConfig(P=10.0, P_R=10.0)
        with pytest.raises(ValueError):
            af_rate_region(ch, pc, 10.0, [0.5, 1.5])
