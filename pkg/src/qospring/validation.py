"""Cross-checks of the closed forms against the brute-force oracle.

Each check measures an error and compares it with a fixed tolerance. The
command-line ``validate`` command prints the resulting report.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import backaction, dynamics, oracle
from .model import SourceState, SpringParams, TimeGrid, frequency_branch, overlaps_ground

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class Check:
    name: str
    error: float
    tol: float
    # "max": error must stay <= tol; "min": error must reach >= tol
    kind: str = "max"

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.error):
            return False
        return self.error <= self.tol if self.kind == "max" else self.error >= self.tol

    def line(self) -> str:
        rel = "<=" if self.kind == "max" else ">="
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<58s} measured {self.error:.3e} (need {rel} {self.tol:.0e})"


def _maxabs(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def unmodulated_checks(points: int = 2000) -> list[Check]:
    params = SpringParams(0.0)
    source = SourceState.from_nbar(4.0, eps=1e-15)
    t = TimeGrid.linspace(20.0, points).times()
    d = backaction.mean_displacement(params, source, t)
    rho0 = backaction.source_density(params, source, 0.0).data
    rho1 = backaction.source_density(params, source, float(t[-1])).data
    return [
        Check("mu=0: survival identically 1", _maxabs(dynamics.survival_probability(params, source, t), 1), 1e-12),
        Check("mu=0: V_x identically 1", _maxabs(dynamics.variance_x(params, source, t), 1), 1e-12),
        Check("mu=0: V_p identically 1", _maxabs(dynamics.variance_p(params, source, t), 1), 1e-12),
        Check("mu=0: <a> identically alpha", _maxabs(d, source.alpha), 1e-12),
        Check("mu=0: source density constant", _maxabs(rho0, rho1), 1e-12),
    ]


def closed_form_checks(mus=(0.1, 0.3), photons=(0, 1, 4, 25, 60), n_times: int = 50) -> list[Check]:
    checks = []
    for mu in mus:
        params = SpringParams(mu)
        t = np.linspace(0.0, 60.0, n_times)
        err_sum = err_norm = 0.0
        for p in photons:
            branch = frequency_branch(params, p)
            err_sum = max(err_sum, _maxabs(dynamics.amplitude_A(branch, t),
                                           dynamics.amplitude_spectral_sum(branch, t, 200)))
            err_norm = max(err_norm, abs(float(np.sum(overlaps_ground(branch, 200) ** 2)) - 1))
        checks.append(Check(f"mu={mu}: A_p closed form vs spectral sum", err_sum, 1e-10))
        checks.append(Check(f"mu={mu}: overlap completeness at M=200", err_norm, 1e-10))
    return checks


def quadrature_checks(mus=(0.1, 0.3), photons=(0, 4, 25, 60), l_max: int = 80) -> list[Check]:
    checks = []
    for mu in mus:
        params = SpringParams(mu)
        err = 0.0
        for p in photons:
            branch = frequency_branch(params, p)
            closed = overlaps_ground(branch, l_max // 2)
            for l in range(0, l_max + 1, 4):
                err = max(err, abs(oracle.overlap_quadrature(branch, l) - closed[l // 2]))
        checks.append(Check(f"mu={mu}: overlaps vs quadrature (l <= {l_max})", err, 1e-10))
    return checks


def oracle_checks(mu: float, nbar: float, basis_size: int, points: int,
                  windows=((20.0, TWO_PI), (1.0, 8 * TWO_PI))) -> list[Check]:
    params = SpringParams(mu)
    source = SourceState.from_nbar(nbar)
    prop = oracle.Propagator(params, basis_size)
    state = oracle.JointState.coherent_ground(source, basis_size)
    errs = dict.fromkeys(("P0", "V_x", "V_p", "Im <a>", "Im <a> conditional"), 0.0)
    for tau_max, scaling in windows:
        t = TimeGrid.linspace(tau_max, points, scaling).times(params.omega)
        ref = prop.trajectory(state, t)
        x0 = 1 / (2 * params.omega)
        p0 = params.omega / 2
        pairs = {
            "P0": (dynamics.survival_probability(params, source, t), ref["survival"]),
            "V_x": (dynamics.variance_x(params, source, t), (ref["x2"] - ref["x"] ** 2) / x0),
            "V_p": (dynamics.variance_p(params, source, t), (ref["p2"] - ref["p"] ** 2) / p0),
            "Im <a>": (backaction.mean_displacement(params, source, t).imag, ref["a"].imag),
            "Im <a> conditional": (
                backaction.mean_displacement(params, source, t, backaction.CONDITIONAL).imag,
                ref["a_conditional"].imag),
        }
        for key, (closed, brute) in pairs.items():
            errs[key] = max(errs[key], _maxabs(closed, brute))
    tag = f"(mu={mu}, nbar={nbar}, L={basis_size})"
    checks = [Check(f"{key} vs oracle {tag}", err, 1e-8) for key, err in errs.items()]
    rho_err = 0.0
    for wt in (0.5, 2.0, 10.0, 50.0):
        brute = oracle.reduced_source(prop.evolve(state, wt)).data
        rho_err = max(rho_err, _maxabs(backaction.source_density(params, source, wt).data, brute))
    checks.append(Check(f"source density vs partial trace {tag}", rho_err, 1e-8))
    return checks


def x_lattice_checks(mu: float, basis_size: int, photons=(0, 1, 5, 24, 25, 60),
                     times=(0.5, 2.0, 10.0, 50.0)) -> list[Check]:
    params = SpringParams(mu)
    prop = oracle.Propagator(params, basis_size)
    err = 0.0
    for wt in times:
        for n in photons:
            for l in photons:
                err = max(err, abs(backaction.x_matrix_element(params, n, l, wt)
                                   - oracle.x_matrix_element_oracle(params, n, l, wt, propagator=prop)))
    return [Check(f"X_nl kernel vs oracle lattice (mu={mu}, L={basis_size})", err, 1e-8)]


def spectrum_checks(mu: float, photons, basis_size: int = 400, levels: int = 50) -> list[Check]:
    params = SpringParams(mu)
    err = 0.0
    for p in photons:
        branch = frequency_branch(params, p)
        e = oracle.build_block(params, p, basis_size).energies[:levels]
        exact = branch.omega_p * (np.arange(levels) + 0.5)
        err = max(err, float(np.max(np.abs(e - exact) / exact)))
    return [Check(f"sector spectra vs omega_p (n + 1/2) (mu={mu}, L={basis_size})", err, 1e-9)]


def convergence_checks(mu: float, nbar: float, points: int = 200) -> list[Check]:
    params = SpringParams(mu)
    source = SourceState.from_nbar(nbar)
    t = TimeGrid.linspace(30.0, points).times(params.omega)
    out = []
    for L in (400, 800):
        ref = oracle.Propagator(params, L).trajectory(oracle.JointState.coherent_ground(source, L), t)
        out.append(np.concatenate([ref["survival"], ref["x2"], ref["p2"], ref["a"].real, ref["a"].imag]))
    return [Check(f"oracle change when L doubles 400 -> 800 (mu={mu}, nbar={nbar})",
                  _maxabs(*out), 1e-9)]


def run_validation(level: str = "quick", basis_size: int | None = None) -> list[Check]:
    if level == "quick":
        L = basis_size or 200
        checks = unmodulated_checks()
        checks += closed_form_checks(n_times=20)
        checks += quadrature_checks(mus=(0.1,), photons=(4,), l_max=40)
        checks += oracle_checks(0.1, 4.0, L, points=400)
        checks += x_lattice_checks(0.1, L, photons=(0, 1, 5), times=(0.5, 10.0))
        checks += spectrum_checks(0.1, photons=(0, 4), basis_size=L)
        return checks
    if level == "full":
        L = basis_size or 400
        checks = unmodulated_checks()
        checks += closed_form_checks()
        checks += quadrature_checks()
        for mu, nbar in ((0.1, 4.0), (0.3, 25.0)):
            checks += oracle_checks(mu, nbar, L, points=2000,
                                    windows=((20.0 if mu == 0.1 else 30.0, TWO_PI), (1.0, 8 * TWO_PI)))
        checks += x_lattice_checks(0.3, L)
        checks += spectrum_checks(0.1, photons=range(0, 26), basis_size=L)
        checks += spectrum_checks(0.3, photons=range(0, 69), basis_size=L)
        checks += convergence_checks(0.3, 25.0)
        return checks
    raise ValueError(f"unknown validation level {level!r}; expected 'quick' or 'full'")


def report(checks: list[Check], elapsed: float | None = None) -> str:
    lines = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    tail = f"{len(checks) - failed}/{len(checks)} checks passed"
    if elapsed is not None:
        tail += f" in {elapsed:.1f} s"
    return "\n".join(lines + [tail])


def timed_validation(level: str, basis_size: int | None = None):
    start = time.perf_counter()
    checks = run_validation(level, basis_size)
    return checks, time.perf_counter() - start
