"""
Two short codewords per frame instead of one long one
=====================================================

A 128-subcarrier BPSK frame can carry one N=128 codeword or two N=64
codewords decoded independently. GRAND's query count grows quickly with the
number of redundancy bits, so splitting the frame cuts the work per frame.
"""

from thzlink import chanmodel as ch
from thzlink import harness as hz
from thzlink.link import compute_parallelism

path = ch.PathGainSpec(142e9, 4e9, 128, 10.1)
common = dict(path=path, fading=ch.AlphaMu(2, 1), regime="psi", snr_grid_db=(8.0, 10.0, 12.0),
              max_frames=150, min_block_errors=10**9, seed=9)

for n, k in ((64, 57), (128, 114)):
    V = compute_parallelism(128, 1, n)
    pts = hz.run_sweep(hz.SimConfig(code_n=n, code_k=k, **common))
    for p in pts:
        print(f"V={V} x N={n:<3}  {p.snr_db:4.1f} dB  BLER {p.bler:.3f}  queries/frame {p.queries_per_frame:9.0f}")
