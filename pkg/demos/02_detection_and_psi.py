"""
Hard, pseudo-soft and soft reliabilities
========================================

After zero-forcing, every bit of a subcarrier shares the same noise level
``sigma^2/|h|^2``. The pseudo-soft value ``|h|^2/sigma^2`` only needs channel
knowledge, so it can rank bits without per-bit LLRs. This script shows how
closely that ranking tracks the true LLR magnitudes.
"""

import numpy as np
from scipy import stats

from thzlink import chanmodel as ch
from thzlink import detect, modem

rng = np.random.default_rng(3)
c = modem.bpsk()
L = 4096
h = ch.sample_fading_amplitude(ch.AlphaMu(2, 1), rng, size=L) * np.exp(2j * np.pi * rng.random(L))
bits = rng.integers(0, 2, L)
sigma2 = 0.2
y = h * modem.map_bits(bits, c) + np.sqrt(sigma2 / 2) * (rng.standard_normal(L) + 1j * rng.standard_normal(L))

soft = detect.detect_frame(y, h, sigma2, c, "soft")
psi = detect.detect_frame(y, h, sigma2, c, "psi")
hard = detect.detect_frame(y, h, sigma2, c, "hard")

# All three regimes agree on the hard decisions.
assert np.array_equal(soft.hard_bits, psi.hard_bits) and np.array_equal(psi.hard_bits, hard.hard_bits)
print("raw bit errors:", int(np.sum(hard.hard_bits != bits)), "of", L)

# How well does PSI rank bits compared to |LLR|?
rho = stats.spearmanr(psi.values, soft.values).statistic
print(f"Spearman rank correlation PSI vs |LLR|: {rho:.3f}")

# Where are the errors? Sort bits by each reliability and see how many
# errors fall among the least reliable 5%.
wrong = hard.hard_bits != bits
k = L // 20
for name, rel in (("soft", soft.values), ("psi", psi.values)):
    idx = np.argsort(rel, kind="stable")[:k]
    print(f"{name:>4}: {wrong[idx].sum() / max(wrong.sum(), 1):.0%} of errors in the least reliable 5% of bits")
