"""Back-action of the oscillator on the source mode.

The oscillator starts in its ground state, so the source density matrix at
time ``t`` is built from the kernel

    X[n, l] = <phi_0| exp(i h(n)) exp(-i h(l)) |phi_0>,

where ``h(n)`` is the oscillator Hamiltonian (times ``t``) in the sector
with ``n`` source photons. Writing ``h(n)`` in terms of the SU(1,1)
generators ``K+ = b+^2 / 2``, ``K- = b^2 / 2``, ``K3 = (b+ b + b b+) / 4``
and disentangling the exponential gives ``X`` in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SourceState, SpringParams

PARTIAL_TRACE = "partial-trace"
CONDITIONAL = "conditional"
MODES = (PARTIAL_TRACE, CONDITIONAL)


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense Hermitian matrix, e.g. a reduced density matrix."""

    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {data.shape}")
        scale = max(1.0, float(np.max(np.abs(data), initial=0.0)))
        if np.max(np.abs(data - data.conj().T), initial=0.0) > 1e-10 * scale:
            raise ValueError("matrix is not Hermitian")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def diagonal(self) -> np.ndarray:
        return self.data.diagonal().real.copy()


@dataclass(frozen=True)
class Su11Gammas:
    """Disentangling coefficients of ``exp(-i h(n))`` at one time.

    ``exp(g+ K+ + g- K- + g3 K3) = exp(G+ K+) exp(ln(G3) K3) exp(G- K-)``.
    ``quarter_root`` is the branch of ``G3 ** (1/4)`` continuous in ``t``
    from 1 at ``t = 0``, equal to ``<phi_0| exp(-i h(n)) |phi_0>``.
    """

    n: int
    t: float
    gamma_plus: complex
    gamma_minus: complex
    gamma_3: complex
    beta_arg_sq: complex
    Gamma_plus: complex
    Gamma_minus: complex
    Gamma_3: complex
    quarter_root: complex


def _disentangle(params: SpringParams, n, t):
    """Broadcasting core of the disentangling step.

    Returns ``(gamma_pm, gamma_3, beta_arg_sq, denom, Gamma_pm, quarter_root)``
    where ``Gamma_3 = denom ** -2``.
    """
    n = np.asarray(n, dtype=float)
    t = np.asarray(t, dtype=float)
    wt = params.omega * t
    gamma_pm = -0.5j * params.mu * n * wt
    gamma_3 = -1j * wt * (params.mu * n + 2.0)
    beta_arg_sq = gamma_3 ** 2 / 4 - gamma_pm * gamma_pm
    # gammas are pure imaginary, so beta^2 is real and <= 0
    # cosh(beta) and sinh(beta)/beta are even in beta: evaluate them from
    # theta = sqrt(-beta^2) and never form beta itself
    theta = np.sqrt(np.maximum(-beta_arg_sq.real, 0.0))
    cosh_b = np.cos(theta)
    sinhc_b = np.sinc(theta / np.pi)
    denom = cosh_b - 0.5 * gamma_3 * sinhc_b
    Gamma_pm = gamma_pm * sinhc_b / denom
    # denom = cos(theta) + i k sin(theta) with k >= 1 shares the quadrant of
    # theta, which fixes the winding number of its phase
    phase = np.angle(denom)
    phase = phase + 2 * np.pi * np.round((theta - phase) / (2 * np.pi))
    quarter_root = np.exp(-0.5j * phase) / np.sqrt(np.abs(denom))
    return gamma_pm, gamma_3, beta_arg_sq, denom, Gamma_pm, quarter_root


def su11_coefficients(params: SpringParams, n: int, t: float) -> Su11Gammas:
    if n < 0 or t < 0:
        raise ValueError("n and t must be >= 0")
    g_pm, g_3, b_sq, denom, G_pm, q = _disentangle(params, n, t)
    return Su11Gammas(n=n, t=float(t), gamma_plus=complex(g_pm), gamma_minus=complex(g_pm),
                      gamma_3=complex(g_3), beta_arg_sq=complex(b_sq),
                      Gamma_plus=complex(G_pm), Gamma_minus=complex(G_pm),
                      Gamma_3=complex(denom ** -2), quarter_root=complex(q))


def _kernel(q_n, G_n, q_l, G_l):
    return np.conj(q_n) * q_l / np.sqrt(1.0 - np.conj(G_n) * G_l)


def x_matrix_element(params: SpringParams, n: int, l: int, t: float) -> complex:
    """``<phi_0| exp(i h(n)) exp(-i h(l)) |phi_0>`` from the disentangled form."""
    if n < 0 or l < 0:
        raise ValueError("photon numbers must be >= 0")
    *_, G_n, q_n = _disentangle(params, n, t)
    *_, G_l, q_l = _disentangle(params, l, t)
    return complex(_kernel(q_n, G_n, q_l, G_l))


def x_kernel(params: SpringParams, dim: int, t: float) -> np.ndarray:
    """Full ``dim x dim`` matrix ``X[n, l]`` at one time."""
    *_, G, q = _disentangle(params, np.arange(dim), t)
    return _kernel(q[:, None], G[:, None], q[None, :], G[None, :])


def _check_dim(source: SourceState, dim):
    if dim is None:
        return source.p_max + 1
    if not 1 <= dim <= source.p_max + 1:
        raise ValueError(f"dimension {dim} exceeds the {source.p_max + 1} available weights")
    return dim


def source_density(params: SpringParams, source: SourceState, t: float,
                   dim: int | None = None, mode: str = PARTIAL_TRACE) -> HermitianMatrix:
    """Density matrix of the source mode at time ``t`` in the Fock basis.

    ``mode="partial-trace"`` traces out the oscillator:
    ``rho[n, l] = c_n conj(c_l) X[l, n]``. ``mode="conditional"`` returns the
    normalised pure state left after finding the oscillator in its ground
    state, with amplitudes ``c_n <phi_0| exp(-i h(n)) |phi_0>``.
    """
    dim = _check_dim(source, dim)
    c = source.coefficients()[:dim]
    if mode == PARTIAL_TRACE:
        rho = np.outer(c, c.conj()) * x_kernel(params, dim, t).T
    elif mode == CONDITIONAL:
        v = c * _disentangle(params, np.arange(dim), t)[-1]
        rho = np.outer(v, v.conj()) / np.vdot(v, v).real
    else:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    # enforce exact Hermiticity; the kernel satisfies it to rounding
    return HermitianMatrix(0.5 * (rho + rho.conj().T))


def mean_displacement(params: SpringParams, source: SourceState, t,
                      mode: str = PARTIAL_TRACE, dim: int | None = None):
    """Mean amplitude ``<a>`` of the source, ``sum_n sqrt(n) rho[n, n-1]``.

    Vectorised over ``t``; only the first off-diagonal of ``rho`` is formed.
    """
    dim = _check_dim(source, dim)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("times must be >= 0")
    n = np.arange(dim)
    c = source.coefficients()[:dim]
    *_, G, q = _disentangle(params, n[:, None], t.reshape(1, -1))
    root_n = np.sqrt(n[1:])[:, None]
    if mode == PARTIAL_TRACE:
        lower = (c[1:] * c[:-1].conj())[:, None] * _kernel(q[:-1], G[:-1], q[1:], G[1:])
        d = np.sum(root_n * lower, axis=0)
    elif mode == CONDITIONAL:
        v = c[:, None] * q
        d = np.sum(root_n * v[1:] * v[:-1].conj(), axis=0) / np.sum(np.abs(v) ** 2, axis=0)
    else:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    return d.reshape(t.shape)

