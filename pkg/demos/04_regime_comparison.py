"""
Hard vs pseudo-soft vs soft on an alpha-mu channel
==================================================

Paired simulation: every regime sees exactly the same channels and noise.
A short run (a couple of minutes on one core) is enough to see the ordering.
"""

from pathlib import Path

from thzlink import chanmodel as ch
from thzlink import harness as hz
from thzlink.cli import write_svg

cfg = hz.SimConfig(
    path=ch.PathGainSpec(142e9, 4e9, 64, 10.1),
    fading=ch.AlphaMu(2.0, 1.0),
    snr_grid_db=(2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0),
    max_frames=1500,
    min_block_errors=50,
    seed=5,
)
comp = hz.paired_compare(cfg, regimes=["soft", "psi", "hard"])

print(f"{'SNR':>5} " + " ".join(f"{a.regime:>8}" for a in comp.arms))
for row in comp.table():
    print(f"{row['snr_db']:5.1f} " + " ".join(f"{v:8.4f}" for k, v in row.items() if k != "snr_db"))

for (i, target), gap in comp.gaps().items():
    g = "out of range" if gap is None else f"{gap:+.2f} dB"
    print(f"{comp.arms[i].regime} needs {g} relative to soft at BLER {target:g}")

# paired significance at the middle SNR
s = 2
print(f"p(soft better than psi) at {cfg.snr_grid_db[s]} dB: {comp.p_better(0, 1, s):.2e}")

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
write_svg([p for a in comp.arms for p in a.points], out / "regimes.svg")
print("curve written to", out / "regimes.svg")
