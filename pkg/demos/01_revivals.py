"""
Collapse and revival of the survival probability
================================================

An oscillator starts in its ground state while the spring constant is
controlled by a coherent field. Each photon number ``p`` gives its own
frequency ``omega * sqrt(1 + mu p)``, and the probability of finding the
oscillator back in its ground state is the Poisson average of the single
frequency results. Here that average is compared with a classical drive of
the same mean strength.
"""
# %%
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qospring import (SourceState, SpringParams, TimeGrid, survival_classical,
                      survival_probability)

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)

# %%
# Times are quoted in units of tau with ``omega t = 2 pi tau``.
cases = [(0.1, 4.0, 20.0), (0.3, 25.0, 30.0)]
fig, axes = plt.subplots(len(cases), 1, figsize=(7, 6))
for ax, (mu, nbar, tau_max) in zip(axes, cases):
    params = SpringParams(mu)
    source = SourceState.from_nbar(nbar)
    grid = TimeGrid.linspace(tau_max, 4000)
    t = grid.times()
    ax.plot(grid.tau, survival_classical(params, nbar, t), lw=0.5, color="0.6", label="classical drive")
    ax.plot(grid.tau, survival_probability(params, source, t), lw=0.8, label="quantized source")
    ax.set_title(f"mu = {mu}, mean photon number {nbar:g}")
    ax.set_ylabel("P0")
    t_rev = math.sqrt(1 + mu * nbar) / mu
    ax.axvline(t_rev, ls=":", color="k")
    print(f"mu={mu} nbar={nbar}: revival expected near tau = {t_rev:.2f}")
axes[0].legend(loc="lower right")
axes[-1].set_xlabel("tau")
fig.tight_layout()
fig.savefig(out / "survival.png", dpi=120)

# %%
# The classical curve keeps oscillating at ``2 omega_alpha`` forever. The
# quantum curve dephases because neighbouring photon numbers have slightly
# different frequencies, then rephases near the dotted line.
params = SpringParams(0.1)
source = SourceState.from_nbar(4.0)
grid = TimeGrid.linspace(20.0, 20001)
P0 = survival_probability(params, source, grid.times())
for lo, hi in [(4, 8), (10.8, 12.8)]:
    sel = (grid.tau >= lo) & (grid.tau <= hi)
    print(f"tau in [{lo}, {hi}]: P0 swings between {P0[sel].min():.5f} and {P0[sel].max():.5f}")
