"""Static model quantities for the quantum optical spring.

Natural units hbar = m = 1 are used throughout; the base frequency ``omega``
stays a free parameter. An oscillator of frequency ``omega`` has its squared
frequency multiplied by ``1 + mu * p`` when the source mode holds ``p``
photons.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

#: default tail mass allowed outside the truncated Poisson table
DEFAULT_EPS = 1e-12
#: hard ceiling on the photon-number truncation
DEFAULT_PMAX_CAP = 4096


class TruncationError(ValueError):
    """Raised when a requested truncation cannot be honoured."""


@dataclass(frozen=True)
class SpringParams:
    """Model constants: modulation strength ``mu`` and base frequency ``omega``."""

    mu: float
    omega: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.mu) or self.mu < 0:
            raise ValueError(f"mu must be finite and >= 0, got {self.mu!r}")
        if not np.isfinite(self.omega) or self.omega <= 0:
            raise ValueError(f"omega must be finite and > 0, got {self.omega!r}")


@dataclass(frozen=True)
class FrequencyBranch:
    """Oscillator data in the sector with ``p`` source photons.

    ``p`` is normally a photon number. A non-integer value describes a
    classical modulation of the same strength, which is how the classical
    survival curve is obtained from the branch formulas.
    """

    p: float
    eta: float
    omega_p: float
    beta_sq: float
    # beta_sq - 1, computed without cancellation
    squeeze: float


def frequency_branch(params: SpringParams, p: float) -> FrequencyBranch:
    if p < 0:
        raise ValueError(f"photon number must be >= 0, got {p!r}")
    shift = params.mu * p
    eta = 1.0 + shift
    root = math.sqrt(eta)
    beta_sq = 2.0 * root / (1.0 + root)
    squeeze = shift / (1.0 + root) ** 2
    return FrequencyBranch(p=p, eta=eta, omega_p=params.omega * root,
                           beta_sq=beta_sq, squeeze=squeeze)


def _log_overlap_magnitude(branch: FrequencyBranch, m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    out = (0.5 * math.log(branch.beta_sq) - 0.125 * math.log(branch.eta)
           + 0.5 * gammaln(2 * m + 1) - m * math.log(2.0) - gammaln(m + 1))
    if branch.squeeze > 0:
        return out + m * math.log(branch.squeeze)
    # unmodulated branch: only m = 0 survives
    return np.where(m == 0, out, -np.inf)


def overlap_ground(branch: FrequencyBranch, l: int) -> float:
    """Overlap of the ``l``-th eigenstate of the branch with the bare ground state.

    Odd ``l`` vanish by parity. Even ``l = 2m`` use log-factorials, so
    ``m`` in the thousands is fine.
    """
    if l < 0:
        raise ValueError(f"level index must be >= 0, got {l!r}")
    if l % 2:
        return 0.0
    return float(np.exp(_log_overlap_magnitude(branch, l // 2)))


def overlaps_ground(branch: FrequencyBranch, m_max: int) -> np.ndarray:
    """Even-level overlaps ``<psi_{2m}|phi_0>`` for ``m = 0..m_max``."""
    return np.exp(_log_overlap_magnitude(branch, np.arange(m_max + 1)))


def poisson_weights(nbar: float, eps: float = DEFAULT_EPS,
                    cap: int = DEFAULT_PMAX_CAP) -> tuple[np.ndarray, int]:
    """Truncated Poisson table ``w_p = nbar**p exp(-nbar) / p!``.

    Returns ``(weights, p_max)`` where ``p_max`` is the smallest index whose
    cumulative mass reaches ``1 - eps``. The table is seeded at the mode and
    filled outwards with ``w_{p+1} = w_p * nbar / (p + 1)`` (and its inverse
    below the mode) and normalised, so ``exp(-nbar)`` is never formed on
    its own.

    Raises
    ------
    TruncationError
        If the required ``p_max`` exceeds ``cap``.
    """
    if not np.isfinite(nbar) or nbar < 0:
        raise ValueError(f"nbar must be finite and >= 0, got {nbar!r}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    if nbar == 0:
        return np.array([1.0]), 0
    if nbar >= cap:
        raise TruncationError(f"nbar={nbar} is not below cap={cap}")
    mode = int(nbar)
    # the log-gamma seed carries a relative error ~ 1e-16 * nbar * log(nbar);
    # normalising the filled table removes it
    peak = math.exp(mode * math.log(nbar) - nbar - gammaln(mode + 1))
    up = peak * np.cumprod(nbar / np.arange(mode + 1, cap + 1))
    down = peak * np.cumprod(np.arange(mode, 0, -1) / nbar)
    weights = np.concatenate((down[::-1], [peak], up))
    # geometric bound on the mass beyond the cap
    if weights[-1] * (cap + 1) / (cap + 1 - nbar) > 1e-3 * eps:
        raise TruncationError(
            f"nbar={nbar} needs more than cap={cap} photon numbers at eps={eps}")
    weights /= math.fsum(weights)
    mass = np.cumsum(weights)
    hit = np.flatnonzero(mass >= 1.0 - eps)
    if hit.size == 0:
        raise TruncationError(
            f"nbar={nbar} needs more than cap={cap} photon numbers at eps={eps}")
    p_max = int(hit[0])
    return weights[: p_max + 1].copy(), p_max


@dataclass(frozen=True)
class SourceState:
    """Coherent state of the source mode, truncated at ``p_max`` photons.

    The raw Poisson table is checked against the tail bound ``eps`` and then
    renormalised, so the truncated state has unit norm and ``weights`` sums
    to one up to rounding.
    """

    alpha: complex
    eps: float = DEFAULT_EPS
    cap: int = DEFAULT_PMAX_CAP
    weights: np.ndarray = field(init=False, repr=False, compare=False)
    p_max: int = field(init=False)

    def __post_init__(self):
        weights, p_max = poisson_weights(self.nbar, self.eps, self.cap)
        weights = weights / math.fsum(weights)
        weights.setflags(write=False)
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "p_max", p_max)

    @classmethod
    def from_nbar(cls, nbar: float, phase: float = 0.0, **kwargs) -> "SourceState":
        return cls(math.sqrt(nbar) * np.exp(1j * phase), **kwargs)

    @property
    def nbar(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def photon_numbers(self) -> np.ndarray:
        return np.arange(self.p_max + 1)

    def coefficients(self) -> np.ndarray:
        """Fock amplitudes ``c_n = alpha**n exp(-|alpha|**2 / 2) / sqrt(n!)``."""
        n = self.photon_numbers
        phase = np.exp(1j * np.angle(self.alpha) * n)
        return np.sqrt(self.weights) * phase


@dataclass(frozen=True)
class TimeGrid:
    """Dimensionless sample times ``tau`` with ``omega * t = scaling * tau``."""

    tau: np.ndarray
    scaling: float = 2 * math.pi

    def __post_init__(self):
        tau = np.array(self.tau, dtype=float).reshape(-1)
        if tau.size == 0:
            raise ValueError("time grid is empty")
        if tau[0] < 0 or not np.all(np.isfinite(tau)):
            raise ValueError("time grid must be finite and start at tau >= 0")
        if np.any(np.diff(tau) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if not self.scaling > 0:
            raise ValueError(f"scaling must be > 0, got {self.scaling!r}")
        tau.setflags(write=False)
        object.__setattr__(self, "tau", tau)

    @classmethod
    def linspace(cls, tau_max: float, points: int = 2000,
                 scaling: float = 2 * math.pi) -> "TimeGrid":
        return cls(np.linspace(0.0, tau_max, points), scaling)

    @property
    def count(self) -> int:
        return self.tau.size

    def times(self, omega: float = 1.0) -> np.ndarray:
        """Physical times ``t`` for a base frequency ``omega``."""
        return self.scaling * self.tau / omega
