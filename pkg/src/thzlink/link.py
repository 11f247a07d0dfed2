"""Short-codeword multicarrier framing.

A frame of ``L`` subcarriers carries ``V = L*q/N`` codewords of length ``N``,
mapped contiguously: codeword ``v`` occupies bits ``v*N .. (v+1)*N - 1`` of the
frame. Detection is per subcarrier and each codeword is decoded on its own,
so lanes never share state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import detect
from .chanmodel import ChannelRealization
from .decoders import DecodeOutcome, DecoderConfig, decode
from .errors import ConfigError, FramingError
from .modem import Constellation, map_bits
from .polar import PolarCode, encode_info


def compute_parallelism(num_subcarriers: int, q: int, n_bits: int) -> int:
    if min(num_subcarriers, q, n_bits) < 1:
        raise ConfigError("L, q and N must all be >= 1")
    total = num_subcarriers * q
    if total % n_bits:
        step = n_bits // math.gcd(n_bits, q)
        lower = (num_subcarriers // step) * step
        upper = lower + step
        nearest = upper if lower == 0 or num_subcarriers - lower > upper - num_subcarriers else lower
        raise ConfigError(
            f"L*q = {total} is not a multiple of N = {n_bits}; nearest valid number of subcarriers is {nearest}"
        )
    return total // n_bits


@dataclass
class FrameConfig:
    num_subcarriers: int
    constellation: Constellation
    code: PolarCode
    tx_power_w: float = 1.0
    tx_gain_lin: float = 1.0
    rx_gain_lin: float = 1.0
    uncoded: bool = False

    def __post_init__(self):
        self.parallelism = compute_parallelism(self.num_subcarriers, self.constellation.q, self.code.n_bits)

    @property
    def bits_per_lane(self) -> int:
        return self.code.n_bits if self.uncoded else self.code.n_info

    @property
    def amplitude(self) -> float:
        return math.sqrt(self.tx_power_w * self.tx_gain_lin * self.rx_gain_lin)


@dataclass
class FrameResult:
    tx_info: np.ndarray
    decoded_info: np.ndarray
    outcomes: list = field(default_factory=list)

    @property
    def lane_errors(self) -> np.ndarray:
        return np.any(self.tx_info != self.decoded_info, axis=1)

    @property
    def block_errors(self) -> int:
        return int(self.lane_errors.sum())

    @property
    def bit_errors(self) -> int:
        return int(np.sum(self.tx_info != self.decoded_info))


def encode_frame(info_bits, cfg: FrameConfig) -> np.ndarray:
    """Codewords for all lanes, concatenated in lane order."""
    V = cfg.parallelism
    info = np.asarray(info_bits, dtype=np.uint8).reshape(V, -1)
    if info.shape[1] != cfg.bits_per_lane:
        raise FramingError(f"expected {V}x{cfg.bits_per_lane} information bits, got {info.size}")
    if cfg.uncoded:
        return info.ravel()
    return np.concatenate([encode_info(row, cfg.code) for row in info])


def transmit_frame(info_bits, cfg: FrameConfig, chan: ChannelRealization, rng: np.random.Generator) -> np.ndarray:
    """``y_l = sqrt(P_t G_r G_t) h_l x_l + n_l`` with ``n_l ~ CN(0, sigma^2)``."""
    if chan.num_subcarriers != cfg.num_subcarriers:
        raise FramingError("channel and frame disagree on the number of subcarriers")
    x = map_bits(encode_frame(info_bits, cfg), cfg.constellation)
    L = cfg.num_subcarriers
    noise = (rng.standard_normal(L) + 1j * rng.standard_normal(L)) * math.sqrt(chan.noise_variance / 2)
    return cfg.amplitude * chan.gains * x + noise


def detect_frame(y, chan: ChannelRealization, cfg: FrameConfig, regime: str) -> detect.ReliabilityVector:
    return detect.detect_frame(y, cfg.amplitude * chan.gains, chan.noise_variance, cfg.constellation, regime)


def decode_lanes(rel: detect.ReliabilityVector, cfg: FrameConfig, decoder_cfg: DecoderConfig, mapper=map) -> list:
    """Decode every lane. ``mapper`` may be any order-preserving map (e.g. an executor's)."""
    N = cfg.code.n_bits
    segments = [rel.segment(v * N, (v + 1) * N) for v in range(cfg.parallelism)]
    kind = "uncoded" if cfg.uncoded else decoder_cfg.kind
    dcfg = DecoderConfig(kind, decoder_cfg.list_size, decoder_cfg.budget)
    return list(mapper(lambda seg: decode(seg, cfg.code, dcfg), segments))


def receive_frame(
    y, chan: ChannelRealization, cfg: FrameConfig, regime: str, decoder_cfg: DecoderConfig, tx_info=None, mapper=map
) -> FrameResult:
    rel = detect_frame(y, chan, cfg, regime)
    outcomes: list[DecodeOutcome] = decode_lanes(rel, cfg, decoder_cfg, mapper)
    decoded = np.stack([o.info_bits for o in outcomes]).astype(np.uint8)
    if tx_info is None:
        tx_info = np.zeros_like(decoded)
    tx = np.asarray(tx_info, dtype=np.uint8).reshape(decoded.shape)
    return FrameResult(tx_info=tx, decoded_info=decoded, outcomes=outcomes)
