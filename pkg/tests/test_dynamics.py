import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qospring import (ComplexSeries, RealSeries, SourceState, SpringParams, TimeGrid,
                      amplitude_A, amplitude_spectral_sum, frequency_branch, sample_series,
                      survival_classical, survival_probability, variance_p, variance_x,
                      variance_x_classical, variance_x_classical_min)


@pytest.mark.parametrize("mu,p", [(0.0, 3), (0.1, 0), (0.1, 4), (0.3, 25), (0.3, 60), (2.0, 500)])
def test_amplitude_at_zero_is_one(mu, p):
    assert amplitude_A(frequency_branch(SpringParams(mu), p), 0.0) == pytest.approx(1.0, abs=1e-14)


def test_amplitude_unmodulated():
    t = np.linspace(0, 100, 57)
    np.testing.assert_allclose(amplitude_A(frequency_branch(SpringParams(0.0), 9), t), 1.0, atol=1e-15)


def test_amplitude_matches_spectral_sum_fig2_branch():
    b = frequency_branch(SpringParams(0.3), 25)
    assert amplitude_A(b, math.pi) == pytest.approx(amplitude_spectral_sum(b, math.pi, 200), abs=1e-10)


@given(st.floats(0, 1.0), st.integers(0, 200), st.floats(0, 500))
def test_amplitude_bounded(mu, p, t):
    assert abs(amplitude_A(frequency_branch(SpringParams(mu), p), t)) <= 1 + 1e-12


def test_survival_real_form_equals_complex_modulus():
    params = SpringParams(0.3)
    source = SourceState.from_nbar(25.0)
    t = np.linspace(0, 40, 301)
    direct = sum(w * np.abs(amplitude_A(frequency_branch(params, p), t)) ** 2
                 for p, w in enumerate(source.weights))
    np.testing.assert_allclose(survival_probability(params, source, t), direct, atol=1e-13)


def test_classical_equals_branch_at_mean_photon_number():
    params = SpringParams(0.1)
    t = np.linspace(0, 30, 401)
    branch = frequency_branch(params, 4.0)
    np.testing.assert_allclose(survival_classical(params, 4.0, t),
                               np.abs(amplitude_A(branch, t)) ** 2, atol=1e-14)


@pytest.mark.parametrize("mu,nbar", [(0.1, 4.0), (0.3, 25.0), (1.0, 7.0)])
def test_classical_periodicity(mu, nbar):
    params = SpringParams(mu, omega=1.3)
    period = math.pi / (params.omega * math.sqrt(1 + mu * nbar))
    t = np.linspace(0, 20, 500)
    np.testing.assert_allclose(survival_classical(params, nbar, t + period),
                               survival_classical(params, nbar, t), atol=1e-12)


def test_scalar_and_array_shapes():
    params = SpringParams(0.1)
    source = SourceState.from_nbar(4.0)
    assert np.ndim(survival_probability(params, source, 1.0)) == 0
    assert variance_x(params, source, np.zeros((2, 3))).shape == (2, 3)
    with pytest.raises(ValueError):
        variance_p(params, source, -1.0)


def test_t0_and_unmodulated_values():
    source = SourceState.from_nbar(25.0)
    for op in (survival_probability, variance_x, variance_p):
        assert op(SpringParams(0.3), source, 0.0) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(op(SpringParams(0.0), source, np.linspace(0, 50, 99)), 1.0, atol=1e-12)


def test_variance_closed_form_against_branch_moments():
    # per-branch Heisenberg solution: <x^2>(t) = cos^2/(2w) + sin^2 w/(2 W^2)
    params = SpringParams(0.3, omega=0.8)
    source = SourceState.from_nbar(6.0)
    t = np.linspace(0, 25, 77)
    x2 = p2 = 0.0
    w = params.omega
    for n, weight in enumerate(source.weights):
        W = w * math.sqrt(1 + params.mu * n)
        c, s = np.cos(W * t), np.sin(W * t)
        x2 = x2 + weight * (c ** 2 / (2 * w) + s ** 2 * w / (2 * W ** 2))
        p2 = p2 + weight * (c ** 2 * w / 2 + s ** 2 * W ** 2 / (2 * w))
    np.testing.assert_allclose(variance_x(params, source, t), x2 * 2 * w, atol=1e-13)
    np.testing.assert_allclose(variance_p(params, source, t), p2 * 2 / w, atol=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1.0), st.floats(0, 40.0), st.floats(0, 300.0))
def test_observable_bounds(mu, nbar, t):
    params = SpringParams(mu)
    source = SourceState.from_nbar(nbar)
    P0 = survival_probability(params, source, t)
    vx, vp = variance_x(params, source, t), variance_p(params, source, t)
    assert 0 < P0 <= 1 + 1e-12
    assert 0 < vx <= 1 + 1e-12 and vp >= 1 - 1e-12
    assert vx * vp >= 1 - 1e-12
    # concavity of mu n / (1 + mu n) bounds the quantum curve by the classical minimum
    assert vx >= variance_x_classical_min(params, nbar) - 1e-12


def test_classical_variance_minimum_values():
    assert variance_x_classical_min(SpringParams(0.1), 4.0) == pytest.approx(5 / 7, abs=1e-15)
    assert variance_x_classical_min(SpringParams(0.3), 25.0) == pytest.approx(2 / 17, abs=1e-15)
    assert variance_x_classical_min(SpringParams(0.0), 9.0) == 1.0
    np.testing.assert_allclose(variance_x_classical(SpringParams(0.0), 9.0, np.linspace(0, 9, 9)), 1.0)
    params = SpringParams(0.3)
    t_min = math.pi / 2 / math.sqrt(8.5)
    assert variance_x_classical(params, 25.0, t_min) == pytest.approx(2 / 17, abs=1e-14)


def test_sample_series_scaling_and_types():
    params = SpringParams(0.1, omega=2.0)
    source = SourceState.from_nbar(4.0)
    grid = TimeGrid.linspace(3.0, 31, scaling=2 * math.pi)
    series = sample_series(survival_probability, grid, params, source)
    assert isinstance(series, RealSeries) and series.label == "survival_probability"
    np.testing.assert_array_equal(series.values,
                                  survival_probability(params, source, 2 * math.pi * grid.tau / 2.0))
    branch = frequency_branch(params, 4)
    cseries = sample_series(lambda prm, t: amplitude_A(branch, t), grid, params, label="A")
    assert isinstance(cseries, ComplexSeries) and cseries.imag.values.shape == (31,)
    single = sample_series(variance_x, TimeGrid(np.zeros(1)), params, source)
    assert single.values.tolist() == [1.0]
    flat = sample_series(variance_p, grid, SpringParams(0.0), source)
    np.testing.assert_allclose(flat.values, 1.0, atol=1e-15)


def test_series_rejects_bad_values():
    grid = TimeGrid.linspace(1.0, 3)
    with pytest.raises(ValueError):
        RealSeries(grid, np.array([1.0, np.nan, 2.0]))
    with pytest.raises(ValueError):
        RealSeries(grid, np.ones(4))


def test_revival_is_higher_than_collapse_relative_to_depth():
    """Fig. 1 parameters: the revival near tau = sqrt(1 + mu nbar)/mu rises
    well above the collapse plateau, measured against the full swing of P0."""
    params = SpringParams(0.1)
    source = SourceState.from_nbar(4.0)
    grid = TimeGrid.linspace(20.0, 20001)
    P0 = survival_probability(params, source, grid.times())
    tau = grid.tau
    t_rev = math.sqrt(1.4) / 0.1
    revival = P0[np.abs(tau - t_rev) <= 1].max()
    collapse = P0[(tau >= 4) & (tau <= 8)].max()
    assert (revival - collapse) / (1 - P0.min()) > 0.3
