"""Closed-form oscillator observables: survival probability and quadrature variances.

All observables accept a scalar time or an array of times and return values
of the same shape. Quantum results average the single-branch expressions
over the truncated Poisson table of a :class:`~qospring.model.SourceState`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (FrequencyBranch, SourceState, SpringParams, TimeGrid,
                    frequency_branch, overlaps_ground)


@dataclass(frozen=True)
class RealSeries:
    grid: TimeGrid
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        _check_series(self.grid, self.values, np.floating)


@dataclass(frozen=True)
class ComplexSeries:
    grid: TimeGrid
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        _check_series(self.grid, self.values, np.complexfloating)

    @property
    def real(self) -> RealSeries:
        return RealSeries(self.grid, self.values.real.copy(), f"Re {self.label}")

    @property
    def imag(self) -> RealSeries:
        return RealSeries(self.grid, self.values.imag.copy(), f"Im {self.label}")


def _check_series(grid, values, kind):
    if values.shape != (grid.count,):
        raise ValueError(f"series length {values.shape} does not match grid ({grid.count},)")
    if not np.issubdtype(values.dtype, kind):
        raise TypeError(f"unexpected dtype {values.dtype} for series")
    if not np.all(np.isfinite(values)):
        raise ValueError("series contains non-finite values")
    values.setflags(write=False)


def _times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("times must be >= 0")
    return t


def _branches(params: SpringParams, source: SourceState):
    """Vectorised branch data ``(eta, omega_p, beta_sq, squeeze)`` over the Poisson table."""
    shift = params.mu * source.photon_numbers
    eta = 1.0 + shift
    root = np.sqrt(eta)
    return eta, params.omega * root, 2.0 * root / (1.0 + root), shift / (1.0 + root) ** 2


def amplitude_A(branch: FrequencyBranch, t):
    """Return-amplitude generating sum of one photon-number branch.

    ``A = beta_sq / (eta**0.25 * sqrt(1 - (beta_sq - 1)**2 exp(-2i omega_p t)))``.
    The principal square root is continuous here because the subtracted
    term has modulus below one, so the radicand stays in the right half plane.
    """
    t = _times(t)
    z = branch.squeeze ** 2 * np.exp(-2j * branch.omega_p * t)
    radicand = 1.0 - z
    assert np.all(radicand.real > 0), "radicand left the right half plane"
    return branch.beta_sq / (branch.eta ** 0.25 * np.sqrt(radicand))


def amplitude_spectral_sum(branch: FrequencyBranch, t, m_max: int = 200):
    """``A`` as the explicit sum over even levels ``l = 2m <= 2 m_max``.

    Uses the closed-form overlaps; a direct check on :func:`amplitude_A`.
    """
    t = _times(t)
    probs = overlaps_ground(branch, m_max) ** 2
    m = np.arange(m_max + 1)
    phases = np.exp(-2j * branch.omega_p * np.multiply.outer(t, m))
    return phases @ probs


def _survival_branch(eta, omega_p, beta_sq, squeeze, t):
    r = squeeze ** 2
    return beta_sq ** 2 / np.sqrt(eta * (1.0 - 2.0 * r * np.cos(2.0 * omega_p * t) + r * r))


def survival_probability(params: SpringParams, source: SourceState, t):
    """Probability that the oscillator is still in its initial ground state.

    Each photon-number branch contributes ``|A_p(t)|**2`` evaluated from its
    real form, weighted by the Poisson table of the source.
    """
    t = _times(t)
    eta, omega_p, beta_sq, squeeze = _branches(params, source)
    per_branch = _survival_branch(eta[:, None], omega_p[:, None], beta_sq[:, None],
                                  squeeze[:, None], t.reshape(1, -1))
    return (source.weights @ per_branch).reshape(t.shape)


def survival_classical(params: SpringParams, nbar: float, t):
    """Survival probability under a classical modulation of strength ``mu * nbar``.

    Periodic in ``t`` with period ``pi / omega_alpha``.
    """
    t = _times(t)
    eta = 1.0 + params.mu * nbar
    root = np.sqrt(eta)
    beta_sq = 2.0 * root / (1.0 + root)
    omega_a = params.omega * root
    return beta_sq ** 2 / np.sqrt(
        eta * (1.0 - 2.0 * (beta_sq - 1.0) ** 2 * np.cos(2.0 * omega_a * t)
               + (beta_sq - 1.0) ** 4))


def _sin2_table(params: SpringParams, source: SourceState, t):
    omega_p = _branches(params, source)[1]
    return np.sin(np.multiply.outer(omega_p, t.reshape(-1))) ** 2


def variance_x(params: SpringParams, source: SourceState, t):
    """Position variance relative to its ground-state value; never above one."""
    t = _times(t)
    shift = params.mu * source.photon_numbers
    gain = source.weights * shift / (1.0 + shift)
    return (1.0 - gain @ _sin2_table(params, source, t)).reshape(t.shape)


def variance_p(params: SpringParams, source: SourceState, t):
    """Momentum variance relative to its ground-state value; never below one."""
    t = _times(t)
    gain = source.weights * params.mu * source.photon_numbers
    return (1.0 + gain @ _sin2_table(params, source, t)).reshape(t.shape)


def variance_x_classical(params: SpringParams, nbar: float, t):
    t = _times(t)
    shift = params.mu * nbar
    return 1.0 - np.sin(params.omega * t * np.sqrt(1.0 + shift)) ** 2 * shift / (1.0 + shift)


def variance_x_classical_min(params: SpringParams, nbar: float) -> float:
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar!r}")
    shift = params.mu * nbar
    return 1.0 - shift / (1.0 + shift)


def sample_series(op, grid: TimeGrid, params: SpringParams, *args, label: str | None = None):
    """Evaluate ``op(params, *args, t)`` on a grid, with ``omega t = scaling * tau``.

    Returns a :class:`RealSeries` or :class:`ComplexSeries` depending on the
    dtype produced by ``op``.
    """
    values = np.asarray(op(params, *args, grid.times(params.omega)))
    label = label if label is not None else getattr(op, "__name__", "")
    if np.iscomplexobj(values):
        return ComplexSeries(grid, values.astype(complex).copy(), label)
    return RealSeries(grid, values.astype(float).copy(), label)

