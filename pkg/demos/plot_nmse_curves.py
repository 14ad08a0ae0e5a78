"""
NMSE against SNR for the three sign modes
=========================================

The normalized pilot grid only becomes a pure exponential once the sign of
the real Bessel amplitude is undone. ``genie`` uses the true elevation,
``prior`` the midpoint of the main-lobe range and ``none`` skips the step.
All three sweeps share noise draws trial for trial.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from oamaoa import ExperimentConfig
from oamaoa.experiments import nmse_sweep

config = ExperimentConfig(trials=200)

fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharey=True)
for mode in ("genie", "prior", "none"):
    result = nmse_sweep(config.replace(sign_mode=mode))
    snr = [row[0] for row in result.table]
    axes[0].semilogy(snr, [row[1] for row in result.table], marker="o", label=mode)
    axes[1].semilogy(snr, [row[2] for row in result.table], marker="o", label=mode)
    print(mode, [f"{row[1]:.3g}/{row[2]:.3g}" for row in result.table])

axes[0].set_title("azimuth")
axes[1].set_title("elevation")
for ax in axes:
    ax.set_xlabel("SNR (dB)")
    ax.grid(True, which="both", alpha=0.3)
axes[0].set_ylabel("NMSE")
axes[1].legend()
fig.tight_layout()
fig.savefig("nmse_curves.png", dpi=120)
