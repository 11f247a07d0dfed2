import dataclasses
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from thzlink import chanmodel as ch
from thzlink import link, modem, polar
from thzlink.decoders import DecoderConfig
from thzlink.errors import ConfigError, FramingError


CODE64 = polar.construct(64, 57)


def make_chan(L, sigma2=1e-6, model=None, seed=0, d=None):
    f = 0.142e12
    d = d if d is not None else ch.SPEED_OF_LIGHT / (4 * np.pi * f)
    spec = ch.PathGainSpec(f, 4e9 if L > 1 else 0.0, L, d)
    return ch.realize_channel(spec, model or ch.AlphaMu(2, 1), sigma2, np.random.default_rng(seed))


def random_info(cfg, seed=0):
    return np.random.default_rng(seed).integers(0, 2, (cfg.parallelism, cfg.bits_per_lane)).astype(np.uint8)


# --- parallelism --------------------------------------------------------------------


@pytest.mark.parametrize("L,q,N,V", [(128, 1, 64, 2), (128, 2, 64, 4), (64, 1, 64, 1), (256, 2, 128, 4)])
def test_parallelism_examples(L, q, N, V):
    assert link.compute_parallelism(L, q, N) == V


def test_parallelism_error_names_nearest():
    with pytest.raises(ConfigError, match="nearest valid number of subcarriers is 128"):
        link.compute_parallelism(100, 1, 64)
    with pytest.raises(ConfigError, match="is 64"):
        link.compute_parallelism(70, 1, 64)
    with pytest.raises(ConfigError, match="is 32"):
        link.compute_parallelism(30, 2, 64)


# --- frame round trips ---------------------------------------------------------------


@pytest.mark.parametrize("mod", ["bpsk", "qpsk"])
@pytest.mark.parametrize("regime", ["hard", "psi", "soft"])
@pytest.mark.parametrize("kind", ["sc", "scl", "grand", "orbgrand"])
def test_noiseless_identity(mod, regime, kind):
    c = modem.constellation(mod)
    cfg = link.FrameConfig(128, c, CODE64)
    chan = make_chan(128, sigma2=1e-12, seed=1)
    info = random_info(cfg, 2)
    y = cfg.amplitude * chan.gains * modem.map_bits(link.encode_frame(info, cfg), c)
    res = link.receive_frame(y, chan, cfg, regime, DecoderConfig(kind), tx_info=info)
    assert res.block_errors == 0 and res.bit_errors == 0


def test_encode_frame_contiguous_lanes():
    cfg = link.FrameConfig(128, modem.bpsk(), CODE64)
    info = random_info(cfg, 3)
    bits = link.encode_frame(info, cfg)
    for v in range(2):
        np.testing.assert_array_equal(bits[64 * v : 64 * (v + 1)], polar.encode_info(info[v], CODE64))


def test_encode_frame_rejects_wrong_size():
    cfg = link.FrameConfig(64, modem.bpsk(), CODE64)
    with pytest.raises(FramingError):
        link.encode_frame(np.zeros(45, np.uint8), cfg)


def test_transmit_power_scaling():
    c = modem.bpsk()
    chan = make_chan(64, sigma2=1e-300, seed=4)
    info = random_info(link.FrameConfig(64, c, CODE64), 5)
    y1 = link.transmit_frame(info, link.FrameConfig(64, c, CODE64, tx_power_w=1.0), chan, np.random.default_rng(0))
    y4 = link.transmit_frame(info, link.FrameConfig(64, c, CODE64, tx_power_w=4.0), chan, np.random.default_rng(0))
    np.testing.assert_allclose(np.abs(y4) ** 2, 4 * np.abs(y1) ** 2, rtol=1e-12)


def test_transmit_noise_variance():
    c = modem.bpsk()
    cfg = link.FrameConfig(64, c, CODE64, tx_power_w=0.0)
    chan = make_chan(64, sigma2=2.5, seed=6)
    rng = np.random.default_rng(7)
    info = random_info(cfg)
    n = np.concatenate([link.transmit_frame(info, cfg, chan, rng) for _ in range(400)])
    assert np.mean(np.abs(n) ** 2) == pytest.approx(2.5, rel=0.03)
    assert np.mean(n.real**2) == pytest.approx(1.25, rel=0.05)


def test_lane_isolation():
    # corrupting lane 2 must not change the decisions for lanes 1, 3, 4
    c = modem.qpsk()
    cfg = link.FrameConfig(128, c, CODE64)  # V = 4
    chan = make_chan(128, sigma2=1e-3, seed=8, model=ch.Unfaded())
    info = random_info(cfg, 9)
    y = cfg.amplitude * chan.gains * modem.map_bits(link.encode_frame(info, cfg), c)
    y_bad = y.copy()
    y_bad[32:64] += np.random.default_rng(10).normal(0, 3, 32) + 1j * np.random.default_rng(11).normal(0, 3, 32)
    for regime in ("hard", "psi", "soft"):
        a = link.receive_frame(y, chan, cfg, regime, DecoderConfig("orbgrand"), info)
        b = link.receive_frame(y_bad, chan, cfg, regime, DecoderConfig("orbgrand"), info)
        for v in (0, 2, 3):
            np.testing.assert_array_equal(a.decoded_info[v], b.decoded_info[v])
            assert a.outcomes[v].queries == b.outcomes[v].queries
        assert b.lane_errors[1] or b.outcomes[1].queries > 1


def test_parallel_decoding_equals_sequential():
    c = modem.bpsk()
    cfg = link.FrameConfig(256, c, CODE64)  # V = 4
    chan = make_chan(256, sigma2=1.0, seed=12)
    scale = np.sqrt(2.0 / np.mean(np.abs(chan.gains) ** 2))
    cfg = dataclasses.replace(cfg, tx_power_w=scale**2)
    rng = np.random.default_rng(13)
    with ThreadPoolExecutor(4) as pool:
        for t in range(10):
            info = random_info(cfg, 100 + t)
            y = link.transmit_frame(info, cfg, chan, rng)
            for kind in ("orbgrand", "scl"):
                seq = link.receive_frame(y, chan, cfg, "soft", DecoderConfig(kind), info)
                par = link.receive_frame(y, chan, cfg, "soft", DecoderConfig(kind), info, mapper=pool.map)
                np.testing.assert_array_equal(seq.decoded_info, par.decoded_info)
                assert [o.queries for o in seq.outcomes] == [o.queries for o in par.outcomes]


def test_uncoded_frame_passes_bits_through():
    c = modem.bpsk()
    cfg = link.FrameConfig(64, c, CODE64, uncoded=True)
    assert cfg.bits_per_lane == 64
    chan = make_chan(64, sigma2=1e-12, seed=14)
    info = random_info(cfg, 15)
    y = link.transmit_frame(info, cfg, chan, np.random.default_rng(0))
    res = link.receive_frame(y, chan, cfg, "hard", DecoderConfig("orbgrand"), info)
    assert res.bit_errors == 0


def test_channel_size_mismatch():
    cfg = link.FrameConfig(64, modem.bpsk(), CODE64)
    with pytest.raises(FramingError):
        link.transmit_frame(random_info(cfg), cfg, make_chan(128), np.random.default_rng(0))
