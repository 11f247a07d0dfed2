import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thzlink import detect as det
from thzlink import modem
from thzlink.errors import FramingError, SingularChannelError

BPSK, QPSK = modem.bpsk(), modem.qpsk()


# --- modem ----------------------------------------------------------------------


@pytest.mark.parametrize("c", [BPSK, QPSK])
def test_constellation_invariants(c):
    assert c.size == 2**c.q
    assert len({tuple(l) for l in c.labels}) == c.size
    assert np.mean(np.abs(c.points) ** 2) == pytest.approx(1.0, abs=1e-12)
    # Gray: nearest neighbours differ in exactly one bit
    d = np.abs(c.points[:, None] - c.points[None, :])
    np.fill_diagonal(d, np.inf)
    for i in range(c.size):
        for j in np.flatnonzero(np.isclose(d[i], d[i].min())):
            assert np.sum(c.labels[i] != c.labels[j]) == 1


def test_map_bits_examples():
    assert modem.map_bits([0], BPSK)[0] == 1
    assert modem.map_bits([1], BPSK)[0] == -1
    assert modem.map_bits([0, 0], QPSK)[0] == pytest.approx((1 + 1j) / math.sqrt(2))
    np.testing.assert_array_equal(modem.map_bits([0, 1, 1], BPSK), [1, -1, -1])


def test_map_bits_framing_error():
    with pytest.raises(FramingError):
        modem.map_bits([0, 1, 1], QPSK)


def test_slice_examples():
    pt, bits = modem.slice_hard(0.3, BPSK)
    assert pt == 1 and list(bits) == [0]
    pt, bits = modem.slice_hard(-2 - 0.1j, QPSK)
    assert pt.real < 0 and pt.imag < 0 and list(bits) == [1, 1]
    pt, bits = modem.slice_hard(0.0, BPSK)  # tie -> lowest index
    assert pt == BPSK.points[0] and list(bits) == [0]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=2, max_size=64).filter(lambda b: len(b) % 2 == 0))
def test_round_trip(bits):
    for c in (BPSK, QPSK):
        _, out = modem.slice_hard(modem.map_bits(bits, c), c)
        assert out.ravel().tolist() == bits


@pytest.mark.parametrize("c", [BPSK, QPSK])
def test_unit_energy_empirical(c):
    bits = np.random.default_rng(0).integers(0, 2, 100_000 * c.q)
    assert np.mean(np.abs(modem.map_bits(bits, c)) ** 2) == pytest.approx(1.0, abs=1e-3)


# --- equalization and PSI -------------------------------------------------------


def test_zf_examples():
    assert det.zf_equalize(2 + 2j, 1 + 1j) == 2
    assert det.zf_equalize(1, 0.5) == 2.0
    rng = np.random.default_rng(1)
    h = rng.normal(size=50) + 1j * rng.normal(size=50)
    x = modem.map_bits(rng.integers(0, 2, 100), QPSK)
    np.testing.assert_allclose(det.zf_equalize(h * x, h), x, rtol=1e-13)


def test_zero_gain_is_singular():
    with pytest.raises(SingularChannelError):
        det.zf_equalize(1.0, 0.0)
    with pytest.raises(SingularChannelError):
        det.psi_zf(np.array([1.0, 0.0]), 1.0)


def test_effective_noise_variance_examples():
    assert det.effective_noise_variance_zf(1, 1) == 1.0
    assert det.effective_noise_variance_zf(0.5, 0.25) == 1.0
    assert det.effective_noise_variance_zf(2j, 1) == 0.25


def test_psi_examples():
    assert det.psi_zf(1, 1) == 1.0
    assert det.psi_zf(2, 0.5) == 8.0


@settings(max_examples=100, deadline=None)
@given(
    st.floats(0.1, 10), st.floats(-3.1, 3.1), st.floats(0.01, 10),
    st.sampled_from([0.5, 2.0, 4.0, 0.25]), st.sampled_from([1, 1j, -1, -1j]),
)
def test_psi_scale_invariance(mag, phase, sigma2, c, rot):
    # |c|^2 a power of two keeps the rescaling exact in floating point
    h = mag * np.exp(1j * phase)
    assert det.psi_zf(c * rot * h, c**2 * sigma2) == pytest.approx(det.psi_zf(h, sigma2), rel=1e-15)


# --- LLRs -----------------------------------------------------------------------


def test_llr_ml_examples():
    assert det.llr_ml(0.5, 1.0, 1.0, BPSK)[0] == pytest.approx(2.0)
    assert det.llr_ml(0.0, 1.0, 1.0, BPSK)[0] == 0.0


def test_llr_zf_examples():
    assert det.llr_zf(0.5, 1.0, BPSK)[0] == pytest.approx(2.0)
    assert det.llr_zf(0.0, 1.0, BPSK)[0] == 0.0
    # on the imaginary axis the first QPSK bit is undecided
    assert det.llr_zf(0.4j, 1.0, QPSK)[0] == 0.0


def test_noiseless_llr_signs_match_slicer():
    rng = np.random.default_rng(2)
    for c in (BPSK, QPSK):
        bits = rng.integers(0, 2, 40 * c.q)
        x = modem.map_bits(bits, c)
        h = rng.normal(size=len(x)) + 1j * rng.normal(size=len(x))
        llr = det.llr_ml(h * x, h, 1e-6, c)
        np.testing.assert_array_equal((llr < 0).astype(int).ravel(), bits)


def test_sign_consistency_random():
    rng = np.random.default_rng(3)
    for c in (BPSK, QPSK):
        y = rng.normal(size=5000) + 1j * rng.normal(size=5000)
        h = rng.normal(size=5000) + 1j * rng.normal(size=5000)
        llr = det.llr_ml(y, h, 0.7, c)
        _, bits = modem.slice_hard(det.zf_equalize(y, h), c)
        np.testing.assert_array_equal((llr < 0).astype(np.uint8), bits)


def test_bpsk_closed_form():
    rng = np.random.default_rng(4)
    y_hat = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    s2 = rng.uniform(0.1, 5, size=1000)
    np.testing.assert_allclose(det.llr_zf(y_hat, s2, BPSK)[:, 0], 4 * y_hat.real / s2, rtol=1e-12, atol=1e-12)


def test_ml_detect_examples():
    rng = np.random.default_rng(5)
    h = rng.normal(size=8) + 1j * rng.normal(size=8)
    x = modem.map_bits(rng.integers(0, 2, 16), QPSK)
    np.testing.assert_array_equal(det.ml_detect(h * x, h, QPSK), x)
    h2 = np.array([0.7 - 0.2j, 1.1j])
    np.testing.assert_array_equal(det.ml_detect(np.array([0.1, -3]) * h2, h2, BPSK), [1, -1])


def test_ml_detect_matches_joint_search():
    rng = np.random.default_rng(6)
    for _ in range(20):
        h = rng.normal(size=4) + 1j * rng.normal(size=4)
        y = rng.normal(size=4) + 1j * rng.normal(size=4)
        np.testing.assert_array_equal(det.ml_detect(y, h, QPSK), det.ml_detect_joint(y, h, QPSK))


def test_ml_detect_equals_zf_slice():
    rng = np.random.default_rng(7)
    h = rng.normal(size=500) + 1j * rng.normal(size=500)
    y = rng.normal(size=500) + 1j * rng.normal(size=500)
    pts, _ = modem.slice_hard(det.zf_equalize(y, h), QPSK)
    np.testing.assert_array_equal(det.ml_detect(y, h, QPSK), pts)


# --- reliability packaging ------------------------------------------------------


def test_build_reliability_examples():
    r = det.build_reliability("soft", [0, 1], llrs=[2.0, -1.0])
    assert r.hard_bits.tolist() == [0, 1] and r.values.tolist() == [2.0, 1.0]
    r = det.build_reliability("psi", [1, 0], psi=[8.0], q=2)
    assert r.values.tolist() == [8.0, 8.0]
    r = det.build_reliability("hard", [1, 0, 1])
    assert r.values is None and r.hard_bits.tolist() == [1, 0, 1]


def test_build_reliability_rejects_sign_mismatch():
    with pytest.raises(ValueError):
        det.build_reliability("soft", [0, 0], llrs=[2.0, -1.0])


def test_psi_shared_within_symbol():
    rng = np.random.default_rng(8)
    h = rng.normal(size=32) + 1j * rng.normal(size=32)
    y = h * modem.map_bits(rng.integers(0, 2, 64), QPSK)
    rel = det.detect_frame(y, h, 0.1, QPSK, "psi")
    v = rel.values.reshape(-1, 2)
    assert np.array_equal(v[:, 0], v[:, 1])
    assert np.all(rel.values >= 0)


def test_signed_llrs_follow_convention():
    r = det.build_reliability("soft", [0, 1, 1], llrs=[0.5, -2.0, -0.1])
    np.testing.assert_allclose(r.signed_llrs(), [0.5, -2.0, -0.1])
    np.testing.assert_allclose(det.build_reliability("hard", [0, 1]).signed_llrs(), [1.0, -1.0])


def test_joint_search_cost_is_small():
    # guard: the brute-force oracle above is only meant for tiny L
    assert len(list(itertools.product(QPSK.points, repeat=4))) == 256
