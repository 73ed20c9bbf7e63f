"""
Cross-checking the closed forms by brute force
==============================================

The closed-form results are checked against direct evolution of the joint
state in a truncated Fock basis (400 oscillator levels per photon number).
"""
# %%
import math

import numpy as np

from qospring import (SourceState, SpringParams, TimeGrid, mean_displacement, source_density,
                      survival_probability, variance_x, x_matrix_element)
from qospring.oracle import (JointState, Propagator, reduced_source, x_matrix_element_oracle)

params = SpringParams(0.3)
source = SourceState.from_nbar(25.0)
prop = Propagator(params, 400)
state = JointState.coherent_ground(source, 400)

# %%
# Observables along the first revival window.
grid = TimeGrid.linspace(12.0, 600)
t = grid.times()
ref = prop.trajectory(state, t)
print("P0   max error", np.max(np.abs(survival_probability(params, source, t) - ref["survival"])))
print("V_x  max error", np.max(np.abs(variance_x(params, source, t) - 2 * ref["x2"])))
print("<a>  max error", np.max(np.abs(mean_displacement(params, source, t) - ref["a"])))
print("worst basis leakage", ref["leakage"].max())

# %%
# The disentangled kernel against two explicit evolutions.
for n, l, wt in [(25, 24, 2.0), (60, 0, 50.0), (5, 60, 10.0)]:
    closed = x_matrix_element(params, n, l, wt)
    brute = x_matrix_element_oracle(params, n, l, wt, propagator=prop)
    print(f"X[{n},{l}] at omega t = {wt}: {closed:.12f}  |diff| = {abs(closed - brute):.1e}")

# %%
# Full reduced density matrix of the source.
later = prop.evolve(state, 2.0)
diff = np.abs(source_density(params, source, 2.0).data - reduced_source(later).data).max()
print(f"source density matrix at omega t = 2: max entry error {diff:.1e}")
