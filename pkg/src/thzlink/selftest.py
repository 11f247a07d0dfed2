"""Quick smoke checks runnable without pytest (``thzlink selftest``)."""

from __future__ import annotations

import math

import numpy as np

from . import chanmodel as ch
from . import decoders as dec
from . import detect as det
from . import modem, polar
from .harness import noise_power
from .link import compute_parallelism


def _checks():
    bpsk, qpsk = modem.bpsk(), modem.qpsk()
    yield "mixture-gamma pdf at 0", lambda: math.isclose(ch.fading_pdf(ch.MixtureGamma(((1, 1, 2),)), 0.0), 2.0)
    yield "alpha-mu Rayleigh pdf", lambda: math.isclose(ch.fading_pdf(ch.AlphaMu(2, 1, 1), 1.0), 2 * math.exp(-1))
    yield "path gain, inverse distance", lambda: math.isclose(
        ch.path_gain(ch.PathGainSpec(0.3e12, 0, 1, 0.2), 1), 10 * ch.path_gain(ch.PathGainSpec(0.3e12, 0, 1, 2.0), 1)
    )
    yield "bpsk mapping", lambda: np.array_equal(modem.map_bits([0, 1, 1], bpsk), [1, -1, -1])
    yield "qpsk corner", lambda: np.isclose(modem.map_bits([0, 0], qpsk)[0], (1 + 1j) / math.sqrt(2))
    yield "zf equalize", lambda: det.zf_equalize(2 + 2j, 1 + 1j) == 2
    yield "psi", lambda: det.psi_zf(2, 0.5) == 8.0
    yield "ml llr", lambda: np.isclose(det.llr_ml(0.5, 1.0, 1.0, bpsk)[0], 2.0)
    yield "crc of [1]", lambda: np.array_equal(polar.crc_remainder([1], polar.CRC11_NR), [1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1])
    yield "frozen count (64,57)", lambda: int(polar.construct(64, 57).frozen_mask.sum()) == 7
    yield "polar involution", lambda: np.array_equal(polar.polar_transform(polar.polar_transform(np.arange(16) % 2)), np.arange(16) % 2)
    yield "parallelism", lambda: compute_parallelism(128, 1, 64) == 2
    yield "noise power", lambda: abs(noise_power(300, 4e9) - 1.6568e-11) < 1e-15

    def grand_clean():
        code = polar.construct(64, 57)
        x = polar.encode_info(np.zeros(code.n_info, np.uint8), code)
        out = dec.grand_decode(det.build_reliability("hard", x), code)
        return out.queries == 1 and not out.codeword.any()

    yield "grand on a codeword", grand_clean

    def first_patterns():
        return list(dec.rank_sets(8, dec.LOGISTIC))[:5] == [(), (1,), (2,), (3,), (1, 2)]

    yield "logistic-weight order", first_patterns


def run_selftest(stream=None) -> bool:
    import sys

    stream = stream or sys.stdout
    ok = True
    for name, fn in _checks():
        try:
            passed = bool(fn())
        except Exception as exc:  # report and keep going
            passed = False
            name = f"{name} ({exc})"
        ok &= passed
        stream.write(f"{'PASS' if passed else 'FAIL'}  {name}\n")
    return ok
