"""
Decoding one (64,57) polar codeword four ways
=============================================

Successive cancellation, CRC-aided list decoding and two flavours of GRAND
on the same noisy word.
"""

import numpy as np

from thzlink import decoders as dec
from thzlink import detect, polar

code = polar.construct(64, 57)  # 46 information bits + CRC-11
print("frozen mask", code.frozen_mask_hex(), "| information bits", code.n_info)

rng = np.random.default_rng(11)
info = rng.integers(0, 2, code.n_info)
x = polar.encode_info(info, code)
# BPSK over AWGN at 1 dB Es/N0
sigma2 = 10 ** (-1 / 10)
r = (1 - 2.0 * x) + rng.normal(0, np.sqrt(sigma2 / 2), 64)
llr = 4 * r / sigma2

soft = detect.build_reliability("soft", (llr < 0).astype(np.uint8), llrs=llr)
print("channel bit errors:", int(np.sum(soft.hard_bits != x)))

for kind in ("sc", "scl", "grand", "orbgrand"):
    out = dec.decode(soft, code, dec.DecoderConfig(kind))
    ok = np.array_equal(out.info_bits, info)
    extra = f"queries={out.queries}" if "grand" in kind else f"list rank={out.list_rank}"
    print(f"{kind:>8}: {'correct' if ok else 'wrong  '} status={out.status:<18} {extra}")

# The first patterns ORBGRAND tries, as positions to flip (least reliable first).
gen = dec.make_pattern_generator(soft, dec.LOGISTIC, budget=8)
print("first ORBGRAND patterns:", list(gen))
