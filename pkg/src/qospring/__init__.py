"""Quantum optical spring: an oscillator whose spring constant is set by a photon number."""

from .backaction import (CONDITIONAL, PARTIAL_TRACE, HermitianMatrix, Su11Gammas,
                         mean_displacement, source_density, su11_coefficients,
                         x_kernel, x_matrix_element)
from .dynamics import (ComplexSeries, RealSeries, amplitude_A, amplitude_spectral_sum,
                       sample_series, survival_classical, survival_probability,
                       variance_p, variance_x, variance_x_classical,
                       variance_x_classical_min)
from .model import (FrequencyBranch, SourceState, SpringParams, TimeGrid,
                    TruncationError, frequency_branch, overlap_ground,
                    overlaps_ground, poisson_weights)
from .oracle import purity

__version__ = "0.1.0"
