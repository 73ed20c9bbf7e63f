"""
Squeezing of the position quadrature
====================================

Because the photon number is conserved, every sector evolves as a harmonic
oscillator with a suddenly changed frequency. The normalised position
variance ``V_x`` therefore never exceeds one, while ``V_p`` never drops
below one.
"""
# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from qospring import (SourceState, SpringParams, TimeGrid, variance_p, variance_x,
                      variance_x_classical, variance_x_classical_min)

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)

# %%
fig, axes = plt.subplots(2, 1, figsize=(7, 6))
for ax, (mu, nbar, tau_max) in zip(axes, [(0.1, 4.0, 20.0), (0.3, 25.0, 30.0)]):
    params = SpringParams(mu)
    source = SourceState.from_nbar(nbar)
    grid = TimeGrid.linspace(tau_max, 4000)
    t = grid.times()
    vx = variance_x(params, source, t)
    floor = variance_x_classical_min(params, nbar)
    ax.plot(grid.tau, variance_x_classical(params, nbar, t), lw=0.4, color="0.6", label="classical drive")
    ax.plot(grid.tau, vx, lw=0.8, label="quantized source")
    ax.axhline(floor, ls=":", color="k")
    ax.set_ylabel("V_x")
    ax.set_title(f"mu = {mu}, mean photon number {nbar:g}")
    vp = variance_p(params, source, t)
    print(f"mu={mu}: min V_x = {vx.min():.4f} (classical floor {floor:.4f}), "
          f"min V_x V_p = {(vx * vp).min():.6f}")
axes[0].legend(loc="lower right")
axes[-1].set_xlabel("tau")
fig.tight_layout()
fig.savefig(out / "squeezing.png", dpi=120)

# %%
# The quantum curve stays above the classical floor ``1 - mu n / (1 + mu n)``:
# ``mu n / (1 + mu n)`` is concave in ``n``, so its Poisson average is below
# its value at the mean.
