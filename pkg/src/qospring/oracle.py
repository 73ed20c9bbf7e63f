"""Brute-force reference numerics in a truncated oscillator Fock basis.

Everything here is computed without the closed forms: each photon-number
sector gets its own dense Hamiltonian in the Fock basis of the unmodulated
oscillator (frequency ``omega``), which is diagonalised once and reused for
any time. Reduced density matrices come from explicit partial traces.

The sector Hamiltonian only couples levels ``k`` and ``k +- 2``, so the even
and odd levels are diagonalised separately.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import eigh

from .backaction import HermitianMatrix
from .model import FrequencyBranch, SourceState, SpringParams

DEFAULT_BASIS = 400
MAX_BASIS = 2048
LEAKAGE_TOL = 1e-10


class LeakageWarning(RuntimeWarning):
    """Population reached the top decile of the truncated basis."""


@dataclass(frozen=True)
class BlockHamiltonian:
    """Oscillator Hamiltonian in the sector with ``p`` source photons."""

    p: int
    matrix: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    # (level indices, energies, eigenvectors) per parity sector
    sectors: tuple = field(repr=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def build_block(params: SpringParams, p: int, basis_size: int = DEFAULT_BASIS) -> BlockHamiltonian:
    """Dense sector Hamiltonian ``p^2/2 + omega^2 (1 + mu p) x^2 / 2``.

    In the ``omega`` Fock basis the diagonal is ``omega (2 + mu p)/2 (k + 1/2)``
    and levels ``k``, ``k + 2`` couple through
    ``omega mu p / 4 * sqrt((k + 1)(k + 2))``.
    """
    if not 4 <= basis_size <= MAX_BASIS:
        raise ValueError(f"basis size must lie in [4, {MAX_BASIS}], got {basis_size}")
    if p < 0:
        raise ValueError(f"photon number must be >= 0, got {p}")
    k = np.arange(basis_size)
    w = params.omega
    H = np.diag(0.5 * w * (2.0 + params.mu * p) * (k + 0.5))
    off = 0.25 * w * params.mu * p * np.sqrt((k[:-2] + 1.0) * (k[:-2] + 2.0))
    H[k[2:], k[:-2]] = off
    H[k[:-2], k[2:]] = off
    sectors = []
    energies = np.empty(basis_size)
    vectors = np.zeros((basis_size, basis_size))
    col = 0
    for parity in (0, 1):
        idx = k[parity::2]
        e, v = eigh(H[np.ix_(idx, idx)])
        sectors.append((idx, e, v))
        energies[col:col + idx.size] = e
        vectors[idx, col:col + idx.size] = v
        col += idx.size
    order = np.argsort(energies, kind="stable")
    for arr in (H, energies, vectors):
        arr.setflags(write=False)
    return BlockHamiltonian(p=p, matrix=H, energies=energies[order].copy(),
                            vectors=vectors[:, order].copy(), sectors=tuple(sectors))


def _propagate(block: BlockHamiltonian, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """``exp(-i H t) psi0`` for every time; returns shape ``(L, T)``."""
    out = np.zeros((block.size, times.size), dtype=complex)
    for idx, e, v in block.sectors:
        amp = v.T @ psi0[idx]
        if not np.any(amp):
            continue
        out[idx] = v @ (amp[:, None] * np.exp(-1j * np.multiply.outer(e, times)))
    return out


def _leakage(psi: np.ndarray) -> np.ndarray:
    """Fraction of the norm in the top decile of levels, per column."""
    L = psi.shape[0]
    top = np.sum(np.abs(psi[L - max(1, L // 10):]) ** 2, axis=0)
    norm = np.sum(np.abs(psi) ** 2, axis=0)
    return np.divide(top, norm, out=np.zeros_like(top), where=norm > 0)


def _flag_leakage(leak, where=""):
    worst = float(np.max(leak, initial=0.0))
    if worst > LEAKAGE_TOL:
        warnings.warn(f"basis leakage {worst:.3g} exceeds {LEAKAGE_TOL:g}{where}",
                      LeakageWarning, stacklevel=3)
    return worst


@dataclass(frozen=True)
class JointState:
    """Amplitudes ``C[p, k]`` on ``|p> (x) |k>``: source photons ``p``, oscillator level ``k``."""

    coefficients: np.ndarray
    t: float = 0.0
    leakage: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        C = np.array(self.coefficients, dtype=complex)
        if C.ndim != 2:
            raise ValueError("coefficients must be a 2-D array (photons x levels)")
        C.setflags(write=False)
        object.__setattr__(self, "coefficients", C)

    @classmethod
    def coherent_ground(cls, source: SourceState, basis_size: int = DEFAULT_BASIS) -> "JointState":
        """Coherent source times the oscillator ground state."""
        C = np.zeros((source.p_max + 1, basis_size), dtype=complex)
        C[:, 0] = source.coefficients()
        return cls(C)

    @property
    def shape(self):
        return self.coefficients.shape

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))


class Propagator:
    """Sector Hamiltonians for photon numbers ``0..p_max``, built on first use."""

    def __init__(self, params: SpringParams, basis_size: int = DEFAULT_BASIS):
        self.params = params
        self.basis_size = basis_size
        self._blocks: dict[int, BlockHamiltonian] = {}

    def block(self, p: int) -> BlockHamiltonian:
        if p not in self._blocks:
            self._blocks[p] = build_block(self.params, p, self.basis_size)
        return self._blocks[p]

    def _check(self, state: JointState):
        if state.shape[1] != self.basis_size:
            raise ValueError(f"state has {state.shape[1]} levels, propagator {self.basis_size}")

    def evolve(self, state: JointState, t: float) -> JointState:
        self._check(state)
        times = np.array([float(t)])
        C = np.empty_like(state.coefficients)
        for p in range(state.shape[0]):
            C[p] = _propagate(self.block(p), state.coefficients[p], times)[:, 0]
        leak = _leakage(C.T)
        _flag_leakage(leak, f" at t={t}")
        return JointState(C, state.t + t, leak)

    def trajectory(self, state: JointState, times) -> dict[str, np.ndarray]:
        """Reduced observables along a time axis without storing the joint state.

        Keys: ``survival`` (ground-state population of the oscillator),
        ``x``, ``p``, ``x2``, ``p2``, ``xp_sym`` (oscillator moments),
        ``a`` (source mean amplitude, partial trace), ``a_conditional``
        (source mean amplitude given the oscillator is found in its ground
        state) and ``leakage`` (worst top-decile population per time).
        """
        self._check(state)
        times = np.asarray(times, dtype=float).reshape(-1)
        L, T = self.basis_size, times.size
        w = self.params.omega
        acc = {key: np.zeros(T) for key in ("survival", "x", "p", "x2", "p2", "xp_sym", "leakage")}
        a = np.zeros(T, dtype=complex)
        a_cond = np.zeros(T, dtype=complex)
        norm0 = np.zeros(T)
        prev = None
        for p in range(state.shape[0]):
            psi = _propagate(self.block(p), state.coefficients[p], times)
            acc["leakage"] = np.maximum(acc["leakage"], _leakage(psi))
            acc["survival"] += np.abs(psi[0]) ** 2
            bpsi, bdpsi = _lower(psi), _raise(psi)
            xpsi = (bpsi + bdpsi) / math.sqrt(2 * w)
            ppsi = 1j * math.sqrt(w / 2) * (bdpsi - bpsi)
            acc["x"] += np.real(np.sum(psi.conj() * xpsi, axis=0))
            acc["p"] += np.real(np.sum(psi.conj() * ppsi, axis=0))
            acc["x2"] += np.sum(np.abs(xpsi) ** 2, axis=0)
            acc["p2"] += np.sum(np.abs(ppsi) ** 2, axis=0)
            acc["xp_sym"] += 2 * np.real(np.sum(xpsi.conj() * ppsi, axis=0))
            norm0 += np.abs(psi[0]) ** 2
            if prev is not None:
                a += math.sqrt(p) * np.sum(psi * prev.conj(), axis=0)
                a_cond += math.sqrt(p) * psi[0] * prev[0].conj()
            prev = psi
        _flag_leakage(acc["leakage"])
        acc["a"] = a
        acc["a_conditional"] = a_cond / norm0
        return acc


def _lower(psi):
    out = np.zeros_like(psi)
    out[:-1] = np.sqrt(np.arange(1, psi.shape[0]))[:, None] * psi[1:]
    return out


def _raise(psi):
    # truncated b^dagger: the top level is dropped
    out = np.zeros_like(psi)
    out[1:] = np.sqrt(np.arange(1, psi.shape[0]))[:, None] * psi[:-1]
    return out


def evolve(state: JointState, params: SpringParams, t: float) -> JointState:
    """Evolve a joint state by ``exp(-i H t)``, sector by sector."""
    return Propagator(params, state.shape[1]).evolve(state, t)


def reduced_oscillator(state: JointState) -> HermitianMatrix:
    C = state.coefficients
    return HermitianMatrix(C.T @ C.conj())


def reduced_source(state: JointState) -> HermitianMatrix:
    C = state.coefficients
    return HermitianMatrix(C @ C.conj().T)


def moments(state: JointState, params: SpringParams) -> tuple[float, float, float, float, float]:
    """Oscillator moments ``(<x>, <p>, <x^2>, <p^2>, <xp + px>)``."""
    psi = state.coefficients.T
    w = params.omega
    bpsi, bdpsi = _lower(psi), _raise(psi)
    xpsi = (bpsi + bdpsi) / math.sqrt(2 * w)
    ppsi = 1j * math.sqrt(w / 2) * (bdpsi - bpsi)
    return (float(np.real(np.vdot(psi, xpsi))), float(np.real(np.vdot(psi, ppsi))),
            float(np.vdot(xpsi, xpsi).real), float(np.vdot(ppsi, ppsi).real),
            float(2 * np.real(np.vdot(xpsi, ppsi))))


def hermite_functions(n_max: int, y: np.ndarray) -> np.ndarray:
    """Normalised Hermite functions ``h_0..h_{n_max}`` at ``y``, shape ``(n_max + 1, len(y))``.

    ``h_n(y) = H_n(y) exp(-y^2 / 2) / sqrt(2^n n! sqrt(pi))``, by the
    three-term recurrence on the normalised functions (no factorials).
    """
    y = np.asarray(y, dtype=float)
    h = np.empty((n_max + 1,) + y.shape)
    h[0] = np.pi ** -0.25 * np.exp(-0.5 * y * y)
    if n_max >= 1:
        h[1] = math.sqrt(2.0) * y * h[0]
    for n in range(2, n_max + 1):
        h[n] = math.sqrt(2.0 / n) * y * h[n - 1] - math.sqrt((n - 1) / n) * h[n - 2]
    return h


def overlap_quadrature(branch: FrequencyBranch, l: int, omega: float = 1.0,
                       half_width: float = 12.0, points: int = 4001) -> float:
    """``<psi_l^p | phi_0>`` by Simpson quadrature on a symmetric position grid.

    The grid spans ``+- half_width`` ground-state widths of the bare oscillator.
    """
    if points < 4001 or half_width < 12.0:
        raise ValueError("quadrature grid must cover +-12 widths with >= 4001 points")
    x = np.linspace(-half_width, half_width, points) / math.sqrt(omega)
    width_p = math.sqrt(branch.omega_p)
    psi_l = math.sqrt(width_p) * hermite_functions(l, width_p * x)[l]
    phi_0 = math.sqrt(math.sqrt(omega)) * hermite_functions(0, math.sqrt(omega) * x)[0]
    return float(simpson(psi_l * phi_0, x=x))


def evolved_ground(params: SpringParams, n: int, t: float,
                   basis_size: int = DEFAULT_BASIS, propagator: Propagator | None = None) -> np.ndarray:
    """``exp(-i h(n)) |phi_0>`` in the Fock basis."""
    prop = propagator or Propagator(params, basis_size)
    psi0 = np.zeros(prop.basis_size, dtype=complex)
    psi0[0] = 1.0
    psi = _propagate(prop.block(n), psi0, np.array([float(t)]))
    _flag_leakage(_leakage(psi), f" for n={n}, t={t}")
    return psi[:, 0]


def x_matrix_element_oracle(params: SpringParams, n: int, l: int, t: float,
                            basis_size: int = DEFAULT_BASIS,
                            propagator: Propagator | None = None) -> complex:
    """``<evolved n | evolved l>`` from two truncated-basis evolutions."""
    prop = propagator or Propagator(params, basis_size)
    return complex(np.vdot(evolved_ground(params, n, t, propagator=prop),
                           evolved_ground(params, l, t, propagator=prop)))


def purity(matrix) -> float:
    """``Tr(rho^2)``; for a Hermitian matrix this is the sum of ``|rho_ij|^2``."""
    rho = np.asarray(matrix)
    return float(np.sum(np.abs(rho) ** 2))
