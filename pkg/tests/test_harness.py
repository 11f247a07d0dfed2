import csv
import dataclasses
import io
import math

import numpy as np
import pytest
from scipy import stats

from thzlink import chanmodel as ch
from thzlink import harness as hz
from thzlink.decoders import DecoderConfig
from thzlink.errors import ConfigError


def small_cfg(**kw):
    base = dict(
        path=ch.PathGainSpec(0.142e12, 4e9, 64, 10.1),
        fading=ch.AlphaMu(2, 1),
        snr_grid_db=(4.0, 8.0),
        max_frames=60,
        min_block_errors=5,
        seed=11,
    )
    base.update(kw)
    return hz.SimConfig(**base)


def test_noise_power():
    assert abs(hz.noise_power(300, 4e9) - 1.6568e-11) < 1e-15
    assert hz.noise_power(300, 4e9) == pytest.approx(1.380649e-23 * 1.2e12, rel=1e-15)
    with pytest.raises(ValueError):
        hz.noise_power(0, 1e9)


def test_tx_power_calibration():
    scn = hz.Scenario(small_cfg())
    for snr in (0.0, 10.0, 17.5):
        fc = scn.frame_at(snr)
        snr_lin = fc.amplitude**2 * scn.mean_channel_power / scn.sigma2
        assert 10 * math.log10(snr_lin) == pytest.approx(snr, abs=1e-9)


def test_bler_point_and_wilson_interval():
    pts = hz.run_sweep(small_cfg(snr_grid_db=(2.0,), max_frames=40, min_block_errors=1000))
    p = pts[0]
    assert p.frames == 40 and p.blocks == 40
    assert p.bler == p.block_errors / p.blocks
    ci = stats.binomtest(p.block_errors, p.blocks).proportion_ci(method="wilson")
    assert (p.ci_low, p.ci_high) == pytest.approx((ci.low, ci.high))
    assert p.ci_low <= p.bler <= p.ci_high
    assert 0 <= p.ber <= p.bler


def test_stopping_rule_counts_errors():
    p = hz.run_sweep(small_cfg(snr_grid_db=(0.0,), max_frames=500, min_block_errors=7))[0]
    assert p.block_errors == 7 and p.frames < 500


def test_high_snr_has_no_errors_and_one_query():
    cfg = small_cfg(fading=ch.Unfaded(), snr_grid_db=(30.0,), max_frames=20)
    for regime in ("hard", "psi", "soft"):
        p = hz.run_sweep(dataclasses.replace(cfg, regime=regime))[0]
        assert p.block_errors == 0 and p.bler == 0 and p.mean_queries == 1.0
        assert p.ci_low == 0 and p.ci_high > 0


def test_seed_determinism():
    a = hz.points_to_csv(hz.run_sweep(small_cfg()))
    b = hz.points_to_csv(hz.run_sweep(small_cfg()))
    assert a == b
    c = hz.points_to_csv(hz.run_sweep(small_cfg(seed=12)))
    assert a != c


def test_lane_count_does_not_change_results():
    cfg = small_cfg(max_frames=150)
    assert hz.points_to_csv(hz.run_sweep(cfg, lanes=1)) == hz.points_to_csv(hz.run_sweep(cfg, lanes=2))


def test_same_regime_twice_has_zero_gap():
    cfg = small_cfg(regime="soft", snr_grid_db=(0.0, 3.0, 6.0, 9.0), max_frames=200, min_block_errors=1000)
    comp = hz.Comparison(hz.run_arms(cfg, [("soft", cfg.decoder), ("soft", cfg.decoder)]))
    for s in range(4):
        np.testing.assert_array_equal(comp.arms[0].errors[s], comp.arms[1].errors[s])
        assert comp.p_better(0, 1, s) == 1.0
    g = comp.gap_db(1, 0, 0.1)
    assert g is not None and g == 0.0


def test_paired_compare_requires_two_regimes():
    with pytest.raises(ConfigError):
        hz.paired_compare(small_cfg(), regimes=["soft"])


def test_paired_sign_test():
    a = np.zeros(30, bool)
    b = np.zeros(30, bool)
    b[:10] = True
    assert hz.paired_sign_test(a, b) == pytest.approx(0.5**10)
    assert hz.paired_sign_test(b, a) == 1.0
    assert hz.paired_sign_test(a, a) == 1.0


def test_snr_at_bler_interpolation():
    P = lambda s, b: hz.BlerPoint(s, 1, 1, 0, b, 0, 0, 0, 0, 0)
    pts = [P(0, 1e-1), P(2, 1e-3)]
    assert hz.snr_at_bler(pts, 1e-2) == pytest.approx(1.0)
    assert hz.snr_at_bler(pts, 1e-4) is None
    assert hz.snr_at_bler([P(0, 1e-1), P(2, 0.0)], 1e-2) is None


def test_csv_format():
    text = hz.points_to_csv(hz.run_sweep(small_cfg()))
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == hz.CSV_COLUMNS
    assert len(rows) == 3
    rec = dict(zip(rows[0], rows[1]))
    assert float(rec["snr_db"]) == 4.0
    assert rec["decoder"] == "orbgrand" and rec["regime"] == "psi" and rec["channel"] == "alpha_mu"
    assert rec["code_n"] == "64" and rec["code_k"] == "57" and rec["seed"] == "11"
    with pytest.raises(ValueError):
        hz.points_to_csv([])


def test_uncoded_mode_reports_bits():
    cfg = small_cfg(decoder=DecoderConfig("uncoded"), fading=ch.Unfaded(), snr_grid_db=(4.0,), max_frames=30)
    p = hz.run_sweep(cfg)[0]
    assert p.decoder == "uncoded" and p.code_k == 64 and p.mean_queries == 0.0
    assert p.bit_errors > 0


def test_invalid_sim_config():
    with pytest.raises(ConfigError):
        small_cfg(snr_grid_db=())
    with pytest.raises(ConfigError):
        small_cfg(max_frames=0)
