import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twrelay.bounds import broadcast_bound, cutset_region, mac_bound, waterfill
from twrelay.channel import ChannelSet, NetworkDims, draw_channels
from twrelay.errors import NoPositiveEigenvalue
from twrelay.linalg import hermitian_eigvals

from oracles import waterfill_capacity_slsqp


def unit_channels():
    one = np.ones((1, 1, 1), dtype=complex)
    return ChannelSet(dims=NetworkDims(1, 1, 1), h=one, hr=one, g=one, gr=one)


class TestBroadcastBound:
    def test_zero_power(self):
        bc12, bc21 = broadcast_bound(draw_channels(NetworkDims(2, 1, 3), 0, 0), 0.0, 0.5)
        assert bc12 == 0.0 and bc21 == 0.0

    def test_scalar_value(self):
        bc12, _ = broadcast_bound(unit_channels(), 10.0, 0.5)
        assert bc12 == pytest.approx(0.5 * np.log2(11.0), rel=1e-12)

    def test_matches_eigenvalue_sum(self):
        ch = draw_channels(NetworkDims(2, 2, 3), 1, 0)
        p = 7.0
        bc12, bc21 = broadcast_bound(ch, p, 0.4)
        s1 = sum(ch.h[k].conj().T @ ch.h[k] for k in range(3))
        eigs = hermitian_eigvals(s1)
        expected = 0.4 * float(np.sum(np.log2(1.0 + (p / 2.0) * eigs)))
        assert bc12 == pytest.approx(expected, abs=1e-8)

    def test_monotone_in_alpha(self):
        ch = draw_channels(NetworkDims(1, 1, 2), 2, 0)
        values = [broadcast_bound(ch, 10.0, a)[0] for a in (0.2, 0.5, 0.8)]
        assert values == sorted(values)


class TestWaterfill:
    def test_single_level_closed_form(self):
        lam = 0.37
        assert waterfill([lam], 4.0) == 4.0 + 1.0 / lam

    def test_two_equal_levels(self):
        assert waterfill([1.0, 1.0], 2.0) == pytest.approx(2.0)

    def test_partial_fill_hand_case(self):
        # lam = [4, 1], budget 0.5: only the strong level is active and
        # nu = 0.75 balances the budget: (0.75 - 0.25) = 0.5.
        nu = waterfill([4.0, 1.0], 0.5)
        assert nu == pytest.approx(0.75, abs=1e-12)

    def test_rejects_empty_and_nonpositive(self):
        with pytest.raises(NoPositiveEigenvalue):
            waterfill([], 1.0)
        with pytest.raises(NoPositiveEigenvalue):
            waterfill([1.0, -0.5], 1.0)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=1, max_size=16),
        st.floats(min_value=1e-3, max_value=1e3),
    )
    def test_budget_identity(self, lam, p_r):
        lam = np.asarray(lam)
        nu = waterfill(lam, p_r)
        spent = np.sum(np.maximum(0.0, nu - 1.0 / lam))
        assert spent == pytest.approx(p_r, abs=1e-9)

    def test_allocation_is_capacity_optimal(self):
        # The waterfilled split maximizes sum log2(1 + lambda p); SLSQP is
        # the independent maximizer.
        rng = np.random.default_rng(3)
        for _ in range(5):
            lam = rng.uniform(0.1, 4.0, size=5)
            p_r = float(rng.uniform(0.5, 8.0))
            nu = waterfill(lam, p_r)
            ours = float(np.sum(np.log2(1.0 + lam * np.maximum(0.0, nu - 1.0 / lam))))
            best, _ = waterfill_capacity_slsqp(lam, p_r)
            assert ours == pytest.approx(best, abs=1e-6)


class TestMacBound:
    def test_scalar_value(self):
        # K = 1, |g|^2 = 1: nu = P_R + 1, cap = (1 - alpha) log2(11).
        mac12, _ = mac_bound(unit_channels(), 10.0, 0.5)
        assert mac12 == pytest.approx(0.5 * np.log2(11.0), rel=1e-12)

    def test_vanishes_with_budget(self):
        mac12, mac21 = mac_bound(unit_channels(), 1e-9, 0.5)
        assert mac12 == pytest.approx(0.0, abs=1e-8)
        assert mac21 == pytest.approx(0.0, abs=1e-8)

    def test_monotone_decreasing_in_alpha(self):
        ch = draw_channels(NetworkDims(2, 1, 4), 4, 0)
        values = [mac_bound(ch, 10.0, a)[0] for a in (0.2, 0.5, 0.8)]
        assert values == sorted(values, reverse=True)

    def test_formula_against_waterfill_identity(self):
        # Rebuild the bound from the eigenvalues and an independently
        # verified optimal allocation.
        ch = draw_channels(NetworkDims(2, 1, 4), 5, 0)
        p_r, alpha, K = 10.0, 0.5, 4
        phi = np.concatenate([ch.g[k] for k in range(K)], axis=1) / np.sqrt(K)
        lam = hermitian_eigvals(phi @ phi.conj().T)
        lam = lam[lam > 1e-12]
        nu = waterfill(lam, p_r)
        _, p_opt = waterfill_capacity_slsqp(lam, p_r)
        np.testing.assert_allclose(
            np.maximum(0.0, nu - 1.0 / lam), p_opt, atol=1e-5
        )
        expected = (1 - alpha) * np.sum(np.maximum(0.0, np.log2(K * lam * nu)))
        mac12, _ = mac_bound(ch, p_r, alpha)
        assert mac12 == pytest.approx(float(expected), rel=1e-12)


class TestCutsetRegion:
    def test_combined_caps_are_minima(self):
        ch = draw_channels(NetworkDims(1, 1, 2), 6, 0)
        bound = cutset_region(ch, 10.0, 10.0, [0.5])
        assert bound.cap12[0] == min(bound.bc12[0], bound.mac12[0])
        assert bound.cap21[0] == min(bound.bc21[0], bound.mac21[0])

    def test_alpha_monotonicity_pattern(self):
        ch = draw_channels(NetworkDims(1, 2, 3), 7, 0)
        bound = cutset_region(ch, 10.0, 10.0, [0.2, 0.4, 0.6, 0.8])
        assert np.all(np.diff(bound.bc12) >= -1e-12)
        assert np.all(np.diff(bound.mac12) <= 1e-12)

    def test_denser_grid_grows_envelope(self):
        ch = draw_channels(NetworkDims(1, 1, 2), 8, 0)
        coarse = cutset_region(ch, 10.0, 10.0, [0.3, 0.7])
        dense = cutset_region(ch, 10.0, 10.0, [0.3, 0.5, 0.7])
        # Every coarse rectangle corner stays dominated in the dense region.
        for c12, c21 in coarse.envelope():
            assert any(
                d12 >= c12 - 1e-12 and d21 >= c21 - 1e-12
                for d12, d21 in dense.envelope()
            )

    def test_rejects_empty_grid(self):
        ch = draw_channels(NetworkDims(1, 1, 1), 9, 0)
        with pytest.raises(ValueError):
            cutset_region(ch, 10.0, 10.0, [])
