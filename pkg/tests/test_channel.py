import numpy as np
import pytest

from twrelay.channel import (
    ChannelSet,
    NetworkDims,
    PowerConfig,
    draw_channels,
    draw_direct_batch,
    draw_direct_channels,
    dump_channel_set,
    load_channel_set,
)

SCALAR = NetworkDims(M=1, N=1, K=1)


def test_dims_validation():
    with pytest.raises(ValueError):
        NetworkDims(M=0, N=1, K=1)
    with pytest.raises(ValueError):
        PowerConfig(P=-1.0, P_R=1.0)


def test_shapes():
    dims = NetworkDims(M=2, N=3, K=4)
    ch = draw_channels(dims, 0, 0)
    assert ch.h.shape == (4, 3, 2)
    assert ch.hr.shape == (4, 2, 3)
    assert ch.g.shape == (4, 2, 3)
    assert ch.gr.shape == (4, 3, 2)


def test_deterministic_given_seed_and_index():
    a = draw_channels(NetworkDims(1, 2, 3), 123, 7)
    b = draw_channels(NetworkDims(1, 2, 3), 123, 7)
    for name in ("h", "hr", "g", "gr"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


def test_distinct_across_indices_and_seeds():
    a = draw_channels(SCALAR, 123, 7)
    b = draw_channels(SCALAR, 123, 8)
    c = draw_channels(SCALAR, 124, 7)
    assert a.h[0, 0, 0] != b.h[0, 0, 0]
    assert a.h[0, 0, 0] != c.h[0, 0, 0]


def test_arrays_immutable():
    ch = draw_channels(SCALAR, 0, 0)
    with pytest.raises(ValueError):
        ch.h[0, 0, 0] = 0.0


class TestMoments:
    """Law-of-large-numbers checks at n = 1e5 draws."""

    N_DRAWS = 100_000

    @pytest.fixture(scope="class")
    def samples(self):
        vals = np.empty(self.N_DRAWS, dtype=complex)
        for i in range(self.N_DRAWS):
            vals[i] = draw_channels(SCALAR, 42, i).h[0, 0, 0]
        return vals

    def test_zero_mean(self, samples):
        assert abs(samples.mean()) < 0.02

    def test_unit_second_moment(self, samples):
        assert abs(np.mean(np.abs(samples) ** 2) - 1.0) < 0.02

    def test_half_variance_per_component(self, samples):
        assert abs(np.var(samples.real) - 0.5) < 0.02
        assert abs(np.var(samples.imag) - 0.5) < 0.02


def test_direct_channels_shapes_and_determinism():
    a = draw_direct_channels(2, 3, 4, 5, 6)
    assert a.h.shape == (4, 2)
    assert a.hr.shape == (2, 4)
    assert a.g.shape == (3, 4)
    assert a.gr.shape == (4, 3)
    assert a.h12.shape == (3, 2)
    assert a.h12r.shape == (2, 3)
    b = draw_direct_channels(2, 3, 4, 5, 6)
    np.testing.assert_array_equal(a.h, b.h)
    np.testing.assert_array_equal(a.h12r, b.h12r)


def test_direct_channels_scalar_entries_distinct():
    d = draw_direct_channels(1, 1, 1, 9, 0)
    vals = [d.h[0, 0], d.hr[0, 0], d.g[0, 0], d.gr[0, 0], d.h12[0, 0], d.h12r[0, 0]]
    assert len({complex(v) for v in vals}) == 6


def test_direct_batch_matches_shapes_and_is_deterministic():
    a = draw_direct_batch(1, 2, 3, 11, 4, 17)
    assert a["h"].shape == (17, 3, 1)
    assert a["h12"].shape == (17, 2, 1)
    b = draw_direct_batch(1, 2, 3, 11, 4, 17)
    for k in a:
        np.testing.assert_array_equal(a[k], b[k])


def test_dump_load_roundtrip(tmp_path):
    ch = draw_channels(NetworkDims(M=2, N=1, K=3), 3, 1)
    path = tmp_path / "channels.csv"
    dump_channel_set(ch, str(path))
    back = load_channel_set(str(path))
    assert back.dims == ch.dims
    for name in ("h", "hr", "g", "gr"):
        np.testing.assert_array_equal(getattr(back, name), getattr(ch, name))


def test_channel_set_rejects_bad_shapes():
    from twrelay.errors import DimensionMismatch

    one = np.ones((1, 1, 1), dtype=complex)
    with pytest.raises(DimensionMismatch):
        ChannelSet(dims=NetworkDims(1, 1, 2), h=one, hr=one, g=one, gr=one)
