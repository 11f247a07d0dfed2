"""Monte Carlo BLER/BER engine.

Frames are independent work items. Every random draw of frame ``i`` at SNR
point ``s`` comes from streams keyed by ``(seed, s, i, purpose, lane)``, and
the stopping rule is applied to per-frame results in frame order, so the
output does not depend on how many worker processes are used.

SNR is the average receive SNR ``P_t G_t G_r E[|h|^2] / sigma^2`` with
``sigma^2 = k_B T B`` the total complex noise power per subcarrier sample.
Each SNR point is reached by solving for ``P_t``.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import stats

from . import rng as rngmod
from .chanmodel import (
    AlphaMu,
    FadingModel,
    MixtureGamma,
    PathGainSpec,
    SimplifiedMultipath,
    Unfaded,
    mean_power_gain,
    path_gain,
    realize_channel,
)
from .decoders import DecoderConfig
from .errors import ConfigError
from .link import FrameConfig, decode_lanes, detect_frame, transmit_frame
from .modem import constellation
from .polar import CRC11_NR, construct

BOLTZMANN = 1.380649e-23

CSV_COLUMNS = (
    "snr_db", "frames", "blocks", "block_errors", "bler", "ci_low", "ci_high", "bit_errors", "ber",
    "mean_queries", "decoder", "regime", "code_n", "code_k", "modulation", "channel", "seed",
)

# frames handed to the workers per round; results past the stopping point are dropped
_ROUND = 64


def noise_power(temperature_k: float, bandwidth_hz: float) -> float:
    """Thermal noise power ``k_B T B`` in watts."""
    if not (temperature_k > 0 and bandwidth_hz > 0):
        raise ValueError("temperature and bandwidth must be positive")
    return BOLTZMANN * temperature_k * bandwidth_hz


def db2lin(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def channel_name(model: FadingModel) -> str:
    return {AlphaMu: "alpha_mu", MixtureGamma: "mixture_gamma", SimplifiedMultipath: "multipath", Unfaded: "awgn"}[
        type(model)
    ]


@dataclass(frozen=True)
class SimConfig:
    path: PathGainSpec
    fading: FadingModel
    modulation: str = "bpsk"
    code_n: int = 64
    code_k: int = 57
    crc_poly: Optional[int] = CRC11_NR
    tx_gain_dbi: float = 0.0
    rx_gain_dbi: float = 19.0
    regime: str = "psi"
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    snr_grid_db: tuple = (0.0,)
    max_frames: int = 1000
    min_block_errors: int = 100
    seed: int = 1
    temperature_k: float = 300.0
    regimes: tuple = ("hard", "psi", "soft")
    lanes: int = 1

    def __post_init__(self):
        errors = []
        if not self.snr_grid_db:
            errors.append("snr_grid_db must not be empty")
        if self.max_frames < 1:
            errors.append("max_frames must be >= 1")
        if self.min_block_errors < 1:
            errors.append("min_block_errors must be >= 1")
        if self.lanes < 1:
            errors.append("lanes must be >= 1")
        if errors:
            raise ConfigError(errors)

    @property
    def uncoded(self) -> bool:
        return self.decoder.kind == "uncoded"


@dataclass
class BlerPoint:
    snr_db: float
    frames: int
    blocks: int
    block_errors: int
    bler: float
    ci_low: float
    ci_high: float
    bit_errors: int
    ber: float
    mean_queries: float
    mean_list_rank: float = 0.0
    decoder: str = ""
    regime: str = ""
    code_n: int = 0
    code_k: int = 0
    modulation: str = ""
    channel: str = ""
    seed: int = 0

    @property
    def queries_per_frame(self) -> float:
        return self.mean_queries * self.blocks / self.frames if self.frames else 0.0


class Scenario:
    """Heavy objects derived from a :class:`SimConfig` (code, constellation, calibration)."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.constellation = constellation(cfg.modulation)
        if cfg.uncoded:
            self.code = construct(cfg.code_n, cfg.code_n, None)
        else:
            self.code = construct(cfg.code_n, cfg.code_k, cfg.crc_poly)
        self.frame = FrameConfig(
            cfg.path.num_subcarriers,
            self.constellation,
            self.code,
            tx_gain_lin=float(db2lin(cfg.tx_gain_dbi)),
            rx_gain_lin=float(db2lin(cfg.rx_gain_dbi)),
            uncoded=cfg.uncoded,
        )
        self.sigma2 = noise_power(cfg.temperature_k, cfg.path.bandwidth_hz)
        self.mean_channel_power = float(np.mean(np.asarray(path_gain(cfg.path)) ** 2) * mean_power_gain(cfg.fading))

    def tx_power_for(self, snr_db: float) -> float:
        g = self.frame.tx_gain_lin * self.frame.rx_gain_lin
        return float(db2lin(snr_db) * self.sigma2 / (g * self.mean_channel_power))

    def frame_at(self, snr_db: float) -> FrameConfig:
        return replace(self.frame, tx_power_w=self.tx_power_for(snr_db))


@dataclass
class ArmFrame:
    """Outcome of one frame for one (regime, decoder) arm."""

    lane_errors: np.ndarray
    bit_errors: int
    queries: int
    list_ranks: int


def simulate_frame(scn: Scenario, snr_index: int, frame_index: int, arms) -> list:
    """Run one frame through every arm on the same channel and noise draw."""
    cfg = scn.cfg
    fcfg = scn.frame_at(cfg.snr_grid_db[snr_index])
    V = fcfg.parallelism
    info = np.stack([
        rngmod.frame_stream(cfg.seed, snr_index, frame_index, rngmod.INFO, v).integers(0, 2, fcfg.bits_per_lane, dtype=np.uint8)
        for v in range(V)
    ])
    attempt = 0
    while True:
        chan = realize_channel(
            cfg.path, cfg.fading, scn.sigma2, rngmod.frame_stream(cfg.seed, snr_index, frame_index, rngmod.CHANNEL, attempt)
        )
        if np.all(chan.gains != 0):
            break
        attempt += 1  # singular channel: redraw from the next keyed stream
    y = transmit_frame(info, fcfg, chan, rngmod.frame_stream(cfg.seed, snr_index, frame_index, rngmod.NOISE))
    out = []
    for regime, dcfg in arms:
        rel = detect_frame(y, chan, fcfg, regime)
        outcomes = decode_lanes(rel, fcfg, dcfg)
        decoded = np.stack([o.info_bits for o in outcomes])
        out.append(ArmFrame(
            lane_errors=np.any(decoded != info, axis=1),
            bit_errors=int(np.sum(decoded != info)),
            queries=sum(o.queries for o in outcomes),
            list_ranks=sum(o.list_rank for o in outcomes),
        ))
    return out


# worker-process state
_WORKER = {}


def _init_worker(cfg, arms):
    _WORKER["scn"] = Scenario(cfg)
    _WORKER["arms"] = arms


def _work(args):
    snr_index, frame_index = args
    return simulate_frame(_WORKER["scn"], snr_index, frame_index, _WORKER["arms"])


def _run_point(scn: Scenario, snr_index: int, arms, pool) -> list:
    """Frames for one SNR point, stopped once every arm has enough block errors."""
    cfg = scn.cfg
    errors = np.zeros(len(arms), dtype=np.int64)
    frames = []
    next_frame = 0
    while next_frame < cfg.max_frames:
        batch = range(next_frame, min(cfg.max_frames, next_frame + _ROUND * cfg.lanes))
        if pool is None:
            results = [simulate_frame(scn, snr_index, i, arms) for i in batch]
        else:
            results = list(pool.map(_work, [(snr_index, i) for i in batch], chunksize=_ROUND))
        for res in results:
            frames.append(res)
            errors += [int(a.lane_errors.sum()) for a in res]
            if np.all(errors >= cfg.min_block_errors):
                return frames
        next_frame = batch.stop
    return frames


def _summarize(scn: Scenario, snr_db: float, per_frame: list, regime: str, dcfg: DecoderConfig) -> BlerPoint:
    cfg = scn.cfg
    V = scn.frame.parallelism
    frames = len(per_frame)
    blocks = frames * V
    block_errors = int(sum(f.lane_errors.sum() for f in per_frame))
    bit_errors = int(sum(f.bit_errors for f in per_frame))
    ci = stats.binomtest(block_errors, blocks).proportion_ci(confidence_level=0.95, method="wilson")
    grand = dcfg.kind in ("grand", "orbgrand") and not cfg.uncoded
    return BlerPoint(
        snr_db=float(snr_db),
        frames=frames,
        blocks=blocks,
        block_errors=block_errors,
        bler=block_errors / blocks,
        ci_low=float(ci.low),
        ci_high=float(ci.high),
        bit_errors=bit_errors,
        ber=bit_errors / (blocks * scn.frame.bits_per_lane),
        mean_queries=float(sum(f.queries for f in per_frame) / blocks) if grand else 0.0,
        mean_list_rank=float(sum(f.list_ranks for f in per_frame) / blocks),
        decoder="uncoded" if cfg.uncoded else dcfg.kind,
        regime=regime,
        code_n=cfg.code_n,
        code_k=cfg.code_n if cfg.uncoded else cfg.code_k,
        modulation=cfg.modulation,
        channel=channel_name(cfg.fading),
        seed=cfg.seed,
    )


@dataclass
class ArmResult:
    regime: str
    decoder: DecoderConfig
    points: list
    # per SNR point: (frames, V) block-error indicators in frame order
    errors: list


def run_arms(cfg: SimConfig, arms, lanes: Optional[int] = None) -> list:
    """Simulate several (regime, decoder) arms on common random numbers."""
    if lanes is not None:
        cfg = replace(cfg, lanes=lanes)
    arms = [(r, d) for r, d in arms]
    scn = Scenario(cfg)
    results = [ArmResult(r, d, [], []) for r, d in arms]
    pool = None
    if cfg.lanes > 1:
        pool = ProcessPoolExecutor(max_workers=cfg.lanes, initializer=_init_worker, initargs=(cfg, arms))
    try:
        for s, snr_db in enumerate(cfg.snr_grid_db):
            per_frame = _run_point(scn, s, arms, pool)
            for a, (regime, dcfg) in enumerate(arms):
                arm_frames = [f[a] for f in per_frame]
                results[a].points.append(_summarize(scn, snr_db, arm_frames, regime, dcfg))
                results[a].errors.append(np.array([f.lane_errors for f in arm_frames]))
    finally:
        if pool is not None:
            pool.shutdown()
    return results


def run_sweep(cfg: SimConfig, lanes: Optional[int] = None) -> list:
    """BLER/BER curve for the configured regime and decoder."""
    return run_arms(cfg, [(cfg.regime, cfg.decoder)], lanes)[0].points


def snr_at_bler(points, target: float) -> Optional[float]:
    """SNR where the curve crosses ``target``, interpolating log10(BLER) linearly.

    Returns None when the sweep does not bracket the target.
    """
    for p, q in zip(points, points[1:]):
        if p.bler >= target >= q.bler and p.bler > 0 and p.bler != q.bler:
            if q.bler == 0:
                return None
            lp, lq, lt = math.log10(p.bler), math.log10(q.bler), math.log10(target)
            return p.snr_db + (lt - lp) * (q.snr_db - p.snr_db) / (lq - lp)
        if p.bler == target:
            return p.snr_db
    if points and points[-1].bler == target:
        return points[-1].snr_db
    return None


def paired_sign_test(errors_a, errors_b) -> float:
    """One-sided exact sign test that arm ``a`` makes fewer block errors than ``b``.

    Only discordant blocks count. Returns the p-value.
    """
    a = np.asarray(errors_a, dtype=bool).ravel()
    b = np.asarray(errors_b, dtype=bool).ravel()
    a_only = int(np.sum(a & ~b))
    b_only = int(np.sum(b & ~a))
    if a_only + b_only == 0:
        return 1.0
    return float(stats.binomtest(b_only, a_only + b_only, 0.5, alternative="greater").pvalue)


@dataclass
class Comparison:
    arms: list
    targets: tuple = (1e-2, 1e-3)

    def gap_db(self, a: int, b: int, target: float) -> Optional[float]:
        """SNR arm ``a`` needs minus SNR arm ``b`` needs at a BLER target."""
        sa = snr_at_bler(self.arms[a].points, target)
        sb = snr_at_bler(self.arms[b].points, target)
        if sa is None or sb is None:
            return None
        return sa - sb

    def p_better(self, a: int, b: int, snr_index: int) -> float:
        """p-value that arm ``a`` beats arm ``b`` at one SNR point (paired)."""
        return paired_sign_test(self.arms[a].errors[snr_index], self.arms[b].errors[snr_index])

    def table(self) -> list:
        """One row per SNR: BLER of each arm, plus gaps to the first arm at each target."""
        rows = []
        snrs = [p.snr_db for p in self.arms[0].points]
        for s, snr in enumerate(snrs):
            rows.append({"snr_db": snr, **{f"bler[{i}:{arm.regime}]": arm.points[s].bler for i, arm in enumerate(self.arms)}})
        return rows

    def gaps(self) -> dict:
        out = {}
        for t in self.targets:
            for i in range(1, len(self.arms)):
                out[(i, t)] = self.gap_db(i, 0, t)
        return out


def paired_compare(cfg: SimConfig, regimes=None, lanes: Optional[int] = None) -> Comparison:
    """Run every regime on identical channel and noise realizations."""
    regimes = list(regimes if regimes is not None else cfg.regimes)
    if len(regimes) < 2:
        raise ConfigError("paired comparison needs at least two regimes")
    return Comparison(run_arms(cfg, [(r, cfg.decoder) for r in regimes], lanes))


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def points_to_csv(points) -> str:
    if not points:
        raise ValueError("no results to write")
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for p in points:
        buf.write(",".join(_fmt(getattr(p, c)) for c in CSV_COLUMNS) + "\n")
    return buf.getvalue()
