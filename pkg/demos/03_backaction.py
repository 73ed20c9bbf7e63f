"""
Back-action on the source
=========================

The coupling conserves photon number, so the photon statistics of the
source never change. Its coherences do: the mean amplitude ``<a>`` acquires
an imaginary part and the source state loses purity as it becomes entangled
with the oscillator.
"""
# %%
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qospring import (CONDITIONAL, PARTIAL_TRACE, SourceState, SpringParams, TimeGrid,
                      mean_displacement, purity, source_density)

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)

params = SpringParams(0.3)
source = SourceState.from_nbar(25.0)

# %%
# Here ``omega t = 16 pi tau``. Two readings of ``<a>`` are shown: the
# unconditioned reduced state of the source, and the state left after the
# oscillator is found in its ground state.
grid = TimeGrid.linspace(1.0, 2000, scaling=16 * math.pi)
fig, ax = plt.subplots(figsize=(7, 3.5))
for mode in (PARTIAL_TRACE, CONDITIONAL):
    d = mean_displacement(params, source, grid.times(), mode=mode)
    ax.plot(grid.tau, d.imag, label=mode)
    print(f"{mode:>14}: Im<a> goes from {d.imag[0]:.3f} to {d.imag[-1]:.3f}")
ax.set_xlabel("tau")
ax.set_ylabel("Im <a>")
ax.legend()
fig.tight_layout()
fig.savefig(out / "backaction.png", dpi=120)

# %%
# Purity of the reduced source state.
for wt in (0.0, 1.0, 5.0, 20.0, 50.0):
    rho = source_density(params, source, wt)
    drift = np.max(np.abs(rho.diagonal() - source.weights))
    print(f"omega t = {wt:5.1f}: Tr rho^2 = {purity(rho):.4f}, diagonal drift {drift:.1e}")
