import math
import warnings

import numpy as np
import pytest

from qospring import (SourceState, SpringParams, frequency_branch, overlaps_ground, purity,
                      source_density, survival_probability, variance_p, variance_x)
from qospring.oracle import (JointState, LeakageWarning, Propagator, build_block, evolve,
                             hermite_functions, moments, overlap_quadrature, reduced_oscillator,
                             reduced_source, x_matrix_element_oracle)


def test_block_unmodulated_is_diagonal():
    for params, p in ((SpringParams(0.0), 5), (SpringParams(0.3), 0)):
        block = build_block(params, p, 40)
        np.testing.assert_array_equal(block.matrix, np.diag(np.diag(block.matrix)))
        np.testing.assert_allclose(block.energies, np.arange(40) + 0.5)


def test_block_structure():
    block = build_block(SpringParams(0.3, omega=2.0), 7, 12)
    H = block.matrix
    np.testing.assert_array_equal(H, H.T)
    k = np.arange(12)
    coupled = np.abs(np.subtract.outer(k, k))
    assert np.all(H[(coupled != 0) & (coupled != 2)] == 0)
    assert H[5, 3] == pytest.approx(2.0 * 0.3 * 7 / 4 * math.sqrt(4 * 5))
    assert H[4, 4] == pytest.approx(2.0 * (2 + 2.1) / 2 * 4.5)
    # eigenvectors have definite parity
    V = block.vectors
    even = np.sum(V[0::2] ** 2, axis=0)
    assert np.all((np.abs(even - 1) < 1e-14) | (even < 1e-14))
    with pytest.raises(ValueError):
        build_block(SpringParams(0.1), 1, 3)


def test_block_spectrum_matches_branch_frequency():
    params = SpringParams(0.1)
    block = build_block(params, 4, 400)
    exact = frequency_branch(params, 4).omega_p * (np.arange(50) + 0.5)
    np.testing.assert_allclose(block.energies[:50], exact, rtol=1e-9)


def test_evolve_identity_and_free_phase():
    source = SourceState.from_nbar(4.0)
    state = JointState.coherent_ground(source, 60)
    same = evolve(state, SpringParams(0.2), 0.0)
    np.testing.assert_allclose(same.coefficients, state.coefficients, atol=1e-14)
    free = evolve(state, SpringParams(0.0), 3.0)
    np.testing.assert_allclose(free.coefficients, state.coefficients * np.exp(-1.5j), atol=1e-13)


# the truncated system conserves both exactly, leakage or not
@pytest.mark.filterwarnings("ignore::qospring.oracle.LeakageWarning")
def test_evolve_conserves_norm_and_energy():
    params = SpringParams(0.3)
    rng = np.random.default_rng(7)
    C = rng.normal(size=(6, 120)) + 1j * rng.normal(size=(6, 120))
    C[:, 40:] = 0
    C /= np.linalg.norm(C)
    state = JointState(C)
    prop = Propagator(params, 120)
    later = prop.evolve(state, 37.0)
    np.testing.assert_allclose(np.linalg.norm(later.coefficients, axis=1),
                               np.linalg.norm(C, axis=1), atol=1e-12)
    for p in range(6):
        H = prop.block(p).matrix
        e0 = np.vdot(C[p], H @ C[p]).real
        e1 = np.vdot(later.coefficients[p], H @ later.coefficients[p]).real
        assert e1 == pytest.approx(e0, rel=1e-10)


def test_evolve_survival_matches_closed_form_branch():
    params = SpringParams(0.3)
    source = SourceState.from_nbar(25.0)
    prop = Propagator(params, 400)
    state = JointState.coherent_ground(source, 400)
    branch = frequency_branch(params, 25)
    from qospring import amplitude_A
    for wt in (0.7, 13.0, 60.0):
        psi = prop.evolve(state, wt).coefficients[25] / source.coefficients()[25]
        assert abs(psi[0]) ** 2 == pytest.approx(abs(amplitude_A(branch, wt)) ** 2, abs=1e-8)
        # parity superselection
        assert np.max(np.abs(psi[1::2])) == 0


def test_leakage_is_flagged():
    state = JointState.coherent_ground(SourceState.from_nbar(25.0), 20)
    with pytest.warns(LeakageWarning):
        later = evolve(state, SpringParams(0.3), 1.0)
    assert later.leakage.max() > 1e-10


def test_reduced_matrices_product_state():
    state = JointState.coherent_ground(SourceState.from_nbar(4.0), 50)
    for rho in (reduced_oscillator(state), reduced_source(state)):
        assert rho.trace() == pytest.approx(1.0, abs=1e-12)
        assert purity(rho) == pytest.approx(1.0, abs=1e-12)


def test_reduced_matrices_match_closed_forms():
    params = SpringParams(0.3)
    source = SourceState.from_nbar(25.0)
    later = evolve(JointState.coherent_ground(source, 400), params, 2.0)
    osc = reduced_oscillator(later)
    assert osc.data[0, 0].real == pytest.approx(survival_probability(params, source, 2.0), abs=1e-8)
    np.testing.assert_allclose(reduced_source(later).data,
                               source_density(params, source, 2.0).data, atol=1e-8)
    assert purity(reduced_source(later)) < 1


def test_moments_ground_state_and_dynamics():
    source = SourceState.from_nbar(4.0)
    state = JointState.coherent_ground(source, 200)
    x, p, x2, p2, xp = moments(state, SpringParams(0.1))
    assert (x, p, xp) == (0.0, 0.0, 0.0)
    assert x2 == pytest.approx(0.5, abs=1e-12) and p2 == pytest.approx(0.5, abs=1e-12)
    params = SpringParams(0.1)
    for wt in (1.0, 25.0):
        later = evolve(state, params, wt)
        x, p, x2, p2, _ = moments(later, params)
        assert 2 * x2 == pytest.approx(variance_x(params, source, wt), abs=1e-8)
        assert 2 * p2 == pytest.approx(variance_p(params, source, wt), abs=1e-8)
    free = evolve(state, SpringParams(0.0), 40.0)
    np.testing.assert_allclose(moments(free, SpringParams(0.0)), (0, 0, 0.5, 0.5, 0), atol=1e-12)


def test_trajectory_matches_pointwise_evolution():
    params = SpringParams(0.3)
    source = SourceState(4.0 * np.exp(0.2j))
    prop = Propagator(params, 300)
    state = JointState.coherent_ground(source, 300)
    times = np.array([0.0, 1.1, 9.0])
    traj = prop.trajectory(state, times)
    for k, t in enumerate(times):
        later = prop.evolve(state, t)
        x, p, x2, p2, xp = moments(later, params)
        rho = reduced_source(later).data
        n = np.arange(1, rho.shape[0])
        assert traj["survival"][k] == pytest.approx(reduced_oscillator(later).data[0, 0].real, abs=1e-13)
        assert (traj["x2"][k], traj["p2"][k], traj["xp_sym"][k]) == pytest.approx((x2, p2, xp), abs=1e-12)
        assert traj["a"][k] == pytest.approx(np.sum(np.sqrt(n) * rho[n, n - 1]), abs=1e-12)


def test_hermite_functions_orthonormal():
    y = np.linspace(-20, 20, 8001)
    h = hermite_functions(30, y)
    gram = h @ h.T * (y[1] - y[0])
    np.testing.assert_allclose(gram, np.eye(31), atol=1e-10)


def test_overlap_quadrature():
    b = frequency_branch(SpringParams(0.3), 25)
    assert abs(overlap_quadrature(b, 3)) <= 1e-12
    assert overlap_quadrature(frequency_branch(SpringParams(0.0), 0), 0) == pytest.approx(1, abs=1e-10)
    with pytest.raises(ValueError):
        overlap_quadrature(b, 2, points=1001)


@pytest.mark.parametrize("mu,p", [(0.1, 4), (0.3, 25), (0.3, 60), (0.05, 1)])
def test_overlap_quadrature_matches_closed_form(mu, p):
    b = frequency_branch(SpringParams(mu), p)
    closed = overlaps_ground(b, 40)
    quad = np.array([overlap_quadrature(b, 2 * m) for m in range(41)])
    np.testing.assert_allclose(quad, closed, atol=1e-10)


def test_x_oracle_trivial():
    params = SpringParams(0.3)
    assert x_matrix_element_oracle(params, 5, 5, 10.0) == pytest.approx(1.0, abs=1e-10)
    assert x_matrix_element_oracle(params, 5, 24, 0.0) == pytest.approx(1.0, abs=1e-14)


def test_purity_reference_values():
    v = np.array([1.0, 1j, -1.0]) / math.sqrt(3)
    assert purity(np.outer(v, v.conj())) == pytest.approx(1.0)
    assert purity(np.eye(4) / 4) == pytest.approx(0.25)
