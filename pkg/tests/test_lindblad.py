import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerr_spectroscopy import _kernels
from kerr_spectroscopy.hamiltonian import DriveTerm, TimeDependentHamiltonian, build_probe_drive
from kerr_spectroscopy.lindblad import (
    IntegrationError,
    SolverConfig,
    _Packed,
    check_density_matrix,
    collapse_operators,
    evolve,
    excitation_probability,
    ground_state,
    lindblad_rhs,
    rk4_step_size,
)
from kerr_spectroscopy.operators import SIGMA_MINUS, SIGMA_X, ModeLayout

from conftest import mhz
from oracles import decay_excitation, probe_excitation, propagate, rabi_excitation

ONE_QUBIT = ModeLayout.qubits(1)
EXCITED = np.diag([0.0, 1.0]).astype(complex)


def _random_density(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(method="euler")
    with pytest.raises(ValueError):
        SolverConfig(dt_max=0)
    with pytest.raises(ValueError):
        SolverConfig(rel_tol=-1)
    with pytest.raises(ValueError):
        SolverConfig(record_stride=0)


def test_collapse_operators():
    ops = collapse_operators(0.5, ModeLayout.qubits(2))
    assert len(ops) == 2
    assert ops[0][0, 2] == pytest.approx(math.sqrt(0.5))
    with pytest.raises(ValueError):
        collapse_operators(-1.0, ONE_QUBIT)


def test_compiled_rhs_matches_reference(fig3_params):
    rng = np.random.default_rng(7)
    p = fig3_params.with_probe_detuning(mhz(0.3))
    H = build_probe_drive(p)
    collapse = collapse_operators(p.gamma, H.layout)
    packed = _Packed.build(H, collapse)
    for t in (0.0, 0.41, 3.3):
        rho = _random_density(16, rng)
        out = np.empty_like(rho)
        _kernels.lindblad_rhs_hermitian(rho, t, *packed.args, out)
        np.testing.assert_allclose(out, lindblad_rhs(rho, H.at(t), collapse), atol=1e-10)


def test_rhs_is_traceless_and_hermitian():
    rng = np.random.default_rng(3)
    h = rng.normal(size=(4, 4))
    h = h + h.T
    rho = _random_density(4, rng)
    L = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    d = lindblad_rhs(rho, h, [L])
    assert abs(np.trace(d)) < 1e-12
    np.testing.assert_allclose(d, d.conj().T, atol=1e-12)


def test_rhs_shape_errors():
    with pytest.raises(ValueError):
        lindblad_rhs(np.eye(2), np.eye(3), [])
    with pytest.raises(ValueError):
        lindblad_rhs(np.eye(2), np.eye(2), [np.eye(3)])


def test_check_density_matrix(caplog):
    assert check_density_matrix(np.diag([0.5, 0.5])) == pytest.approx(0.5)
    with pytest.raises(IntegrationError) as info:
        check_density_matrix(np.diag([0.6, 0.6]), time=2.0)
    assert info.value.time == 2.0
    with pytest.raises(IntegrationError):
        check_density_matrix(np.diag([1.0 + 1e-4, -1e-4]))
    with caplog.at_level(logging.WARNING):
        check_density_matrix(np.diag([1.0 + 1e-6, -1e-6]))
    assert "eigenvalue" in caplog.text
    with pytest.raises(IntegrationError):
        check_density_matrix(np.diag([np.nan, 1.0]))


def test_evolve_rejects_bad_input():
    H = TimeDependentHamiltonian(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        evolve(np.eye(3) / 3, H, [], 1.0, SolverConfig())
    with pytest.raises(ValueError):
        evolve(np.array([[1, 1j], [1j, 0]]), H, [], 1.0, SolverConfig())
    with pytest.raises(ValueError):
        evolve(ground_state(ONE_QUBIT), H, [], -1.0, SolverConfig())


def test_zero_time_returns_initial_state():
    traj = evolve(ground_state(ONE_QUBIT), TimeDependentHamiltonian(np.zeros((2, 2))), [], 0.0, SolverConfig())
    assert traj.steps == 0
    np.testing.assert_array_equal(traj.final, ground_state(ONE_QUBIT))


def test_rk4_step_rule(fig3_params):
    H = build_probe_drive(fig3_params)
    collapse = collapse_operators(fig3_params.gamma, H.layout)
    dt, n = rk4_step_size(H, collapse, 30.0, SolverConfig())
    assert dt * n == pytest.approx(30.0)
    bound = 0.1 / (H.max_element() + fig3_params.gamma)
    assert dt <= bound and n == math.ceil(30.0 / bound)
    dt, n = rk4_step_size(H, collapse, 30.0, SolverConfig(dt_max=1e-3))
    assert dt == pytest.approx(1e-3) and n == 30000


@pytest.mark.parametrize("method", ["rk4", "rk45"])
def test_rabi_oscillation(method):
    lam = 1.3
    H = TimeDependentHamiltonian(lam * SIGMA_X, layout=ONE_QUBIT)
    cfg = SolverConfig(method=method, dt_max=0.01, rel_tol=1e-10, abs_tol=1e-12, record_stride=50)
    traj = evolve(ground_state(ONE_QUBIT), H, [], 2.0, cfg)
    for t, rho in zip(traj.times, traj.states):
        assert excitation_probability(rho, 1, ONE_QUBIT) == pytest.approx(rabi_excitation(lam, t), abs=1e-6)


@pytest.mark.parametrize("method", ["rk4", "rk45"])
def test_rotating_drive_rabi(method):
    # H = 0.5 sx e^{...}: a resonant drive of a zero-frequency qubit is static
    lam = 0.8
    H = TimeDependentHamiltonian(np.zeros((2, 2)), (DriveTerm(SIGMA_MINUS, lam, 0.0),), ONE_QUBIT)
    cfg = SolverConfig(method=method, dt_max=0.01, rel_tol=1e-10, abs_tol=1e-12)
    traj = evolve(ground_state(ONE_QUBIT), H, [], 1.7, cfg)
    assert excitation_probability(traj.final, 1, ONE_QUBIT) == pytest.approx(rabi_excitation(lam, 1.7), abs=1e-6)


@pytest.mark.parametrize("method", ["rk4", "rk45"])
def test_spontaneous_decay(method):
    gamma = 0.7
    H = TimeDependentHamiltonian(np.zeros((2, 2)), layout=ONE_QUBIT)
    cfg = SolverConfig(method=method, dt_max=0.01, rel_tol=1e-10, abs_tol=1e-12, record_stride=25)
    traj = evolve(EXCITED, H, collapse_operators(gamma, ONE_QUBIT), 3.0, cfg)
    for t, rho in zip(traj.times, traj.states):
        assert excitation_probability(rho, 1, ONE_QUBIT) == pytest.approx(decay_excitation(gamma, t), abs=1e-6)


def test_unitary_limit_matches_matrix_exponential(fig3_params):
    p = fig3_params.replace(gamma=0.0).with_probe_detuning(mhz(-4.0))
    p = p.replace(lambda_probe=mhz(0.3))
    H = build_probe_drive(p)
    cfg = SolverConfig(dt_max=1e-3)
    traj = evolve(ground_state(H.layout), H, [], 2.0, cfg)
    # static rotating-frame propagator (see oracles.py)
    from oracles import N1, SX, qubit_h0, site

    h = qubit_h0(p.omega, p.omega_rot, p.g, p.lambda_rabi, p.J)
    h = h - mhz(-4.0) * (site(N1, 2) + site(N1, 3)) + p.lambda_probe * site(SX, 2)
    ref = propagate(ground_state(H.layout), h, [], 2.0)
    # the lab-frame state differs by a diagonal phase, which leaves populations alone
    np.testing.assert_allclose(np.diag(traj.final).real, np.diag(ref).real, atol=1e-7)
    np.testing.assert_allclose(np.abs(traj.final), np.abs(ref), atol=1e-7)


@pytest.mark.parametrize("method", ["rk4", "rk45"])
def test_probe_point_matches_exact_propagator(fig3_params, method):
    p = fig3_params.with_probe_detuning(mhz(-4.0))
    H = build_probe_drive(p)
    cfg = SolverConfig(method=method, rel_tol=1e-9, abs_tol=1e-12)
    traj = evolve(ground_state(H.layout), H, collapse_operators(p.gamma, H.layout), 30.0, cfg)
    got = excitation_probability(traj.final, 4, H.layout)
    ref = probe_excitation(p.omega, p.omega_rot, p.g, p.lambda_rabi, p.lambda_probe, p.J, p.gamma, mhz(-4.0), 30.0)
    assert got == pytest.approx(ref, rel=1e-5)
    assert ref == pytest.approx(2.639808656679e-4, rel=1e-9)


def test_trace_and_hermiticity_preserved(fig3_params):
    p = fig3_params.with_probe_detuning(mhz(1.0))
    H = build_probe_drive(p)
    traj = evolve(ground_state(H.layout), H, collapse_operators(p.gamma, H.layout), 30.0, SolverConfig(record_stride=200))
    for rho in traj.states:
        assert abs(np.trace(rho) - 1) <= 1e-7
        assert np.abs(rho - rho.conj().T).max() <= 1e-8


def test_fourth_order_convergence(fig3_params):
    p = fig3_params.with_probe_detuning(mhz(1.0))
    H = build_probe_drive(p)
    collapse = collapse_operators(p.gamma, H.layout)
    rho0 = ground_state(H.layout)

    def final(step):
        return evolve(rho0, H, collapse, 1.0, SolverConfig(dt_max=step)).final

    # start from the step the stability rule picks by itself
    dt, _ = rk4_step_size(H, collapse, 1.0, SolverConfig(dt_max=1.0))
    ref = final(dt / 8)
    coarse = np.abs(final(dt) - ref).max()
    fine = np.abs(final(dt / 2) - ref).max()
    assert coarse / fine >= 12


def test_adaptive_steps_reported(fig3_params):
    p = fig3_params.with_probe_detuning(mhz(0.5))
    H = build_probe_drive(p)
    traj = evolve(ground_state(H.layout), H, collapse_operators(p.gamma, H.layout), 5.0,
                  SolverConfig(method="rk45", rel_tol=1e-6, abs_tol=1e-9, record_stride=100))
    assert traj.steps > 0
    assert traj.final_time == pytest.approx(5.0)
    assert np.all(np.diff(traj.times) > 0)


def test_excitation_probability_checks_mode():
    with pytest.raises(ValueError):
        excitation_probability(np.eye(2) / 2, 2, ONE_QUBIT)
    with pytest.raises(ValueError):
        excitation_probability(np.eye(3) / 3, 1, ModeLayout((3,)))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(0.05, 2.0), st.floats(0.1, 2.0))
def test_driven_damped_qubit_matches_exponential(lam, gamma, T):
    H = TimeDependentHamiltonian(lam * SIGMA_X, layout=ONE_QUBIT)
    collapse = collapse_operators(gamma, ONE_QUBIT)
    traj = evolve(ground_state(ONE_QUBIT), H, collapse, T, SolverConfig(dt_max=0.005))
    ref = propagate(ground_state(ONE_QUBIT), lam * SIGMA_X, collapse, T)
    np.testing.assert_allclose(traj.final, ref, atol=1e-8)
