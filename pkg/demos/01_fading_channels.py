"""
Fading channels at 142 GHz
==========================

Compare the amplitude distributions the simulator can draw from, and look at
one multicarrier realization of each. Figures go to ``demos/out/``.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from thzlink import chanmodel as ch

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
rng = np.random.default_rng(7)

# Three fading families. The alpha-mu parameters reduce to Rayleigh when
# alpha=2, mu=1; larger mu means milder fading.
models = {
    "Rayleigh (alpha-mu 2,1)": ch.AlphaMu(2.0, 1.0),
    "alpha-mu 2.5, 3": ch.AlphaMu(2.5, 3.0),
    "mixture gamma": ch.MixtureGamma(((0.6, 2.0, 2.2), (0.4, 5.0, 4.0))),
}

# Histogram of samples against the closed-form density.
t = np.linspace(1e-3, 3.5, 400)
fig, ax = plt.subplots(figsize=(6, 3.5))
for name, m in models.items():
    s = ch.sample_fading_amplitude(m, rng, size=50_000)
    ax.hist(s, bins=120, density=True, alpha=0.3)
    ax.plot(t, ch.fading_pdf(m, t), label=f"{name}  E|a|^2={ch.mean_power_gain(m):.2f}")
ax.set_xlabel("amplitude")
ax.set_ylabel("density")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(out / "fading_pdfs.png", dpi=120)

# Path gain across the band: 4 GHz around 142 GHz at 10.1 m.
spec = ch.PathGainSpec(142e9, 4e9, 64, 10.1)
g = ch.path_gain(spec)
print(f"path gain {20 * np.log10(g[0]):.2f} .. {20 * np.log10(g[-1]):.2f} dB over the band")

# One frame per model. The multipath channel is frequency selective, the
# others are independent per subcarrier.
sigma2 = 1.380649e-23 * 300 * 4e9
fig, ax = plt.subplots(figsize=(6, 3.2))
for name, m in {**models, "multipath (3 NLoS)": ch.SimplifiedMultipath(3.0, per_path_decay_db=3.0)}.items():
    chan = ch.realize_channel(spec, m, sigma2, rng)
    ax.plot(20 * np.log10(np.abs(chan.gains)), label=name)
ax.set_xlabel("subcarrier")
ax.set_ylabel("|h| (dB)")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(out / "frequency_response.png", dpi=120)
print("figures written to", out)
