import math

import numpy as np
import pytest

from starlab.codes import codewords
from starlab.lindblad import (
    SectorPropagator,
    Superoperator,
    liouvillian,
    logical_observables,
    lx_corotating_series,
    process_observables,
    propagate_fixed,
    propagate_timedep,
    expectation,
    vectorize,
)
from starlab.qspace import DEFAULT_LAYOUT, Operator, State, basis_ket, embed, identity, transition
from starlab.starmodel import (
    SystemParams,
    build_rot_hamiltonian,
    build_static_hamiltonian,
    collapse_channels,
    qq_sideband_coupling,
)

TWO_PI = 2 * math.pi


def zero_op():
    return Operator(DEFAULT_LAYOUT, np.zeros((36, 36), dtype=complex))


def test_liouvillian_zero_generator():
    L = liouvillian(zero_op(), [])
    assert np.abs(L.matrix).max() == 0.0


def test_liouvillian_trace_row_is_null():
    p = SystemParams()
    L = liouvillian(build_rot_hamiltonian(p), collapse_channels(p))
    assert L.trace_residual() <= 1e-10


def test_liouvillian_annihilates_trace_of_anything():
    p = SystemParams()
    L = liouvillian(build_rot_hamiltonian(p), collapse_channels(p))
    v = vectorize(np.eye(36, dtype=complex) / 36)
    out = L.matrix @ v
    rho_dot = out.reshape(36, 36, order="F")
    assert abs(np.trace(rho_dot)) < 1e-12


def test_liouvillian_rejects_non_hermitian():
    m = np.zeros((36, 36), dtype=complex)
    m[0, 1] = 1.0
    with pytest.raises(ValueError):
        liouvillian(Operator(DEFAULT_LAYOUT, m), [])


def test_single_channel_exponential_decay():
    kappa = 0.8
    chan = [(embed(transition(2, 0, 1), 2), kappa)]
    L = liouvillian(zero_op(), chan)
    rho0 = basis_ket((0, 0, 1, 0))
    n_r1 = embed(np.diag([0.0, 1.0]).astype(complex), 2)
    traj = propagate_fixed(L, rho0, dt=0.25, n_steps=40, observables={"n": n_r1})
    expect = np.exp(-kappa * traj.times)
    assert np.abs(traj.series("n") - expect).max() < 1e-9


def test_propagate_fixed_constant_under_zero_generator():
    L = liouvillian(zero_op(), [])
    rho0 = codewords().Lx
    obs = logical_observables()
    traj = propagate_fixed(L, rho0, dt=0.5, n_steps=10, observables=obs)
    for name in obs:
        assert np.abs(traj.series(name) - traj.series(name)[0]).max() < 1e-14


def test_fast_path_matches_reference_path():
    p = SystemParams(gamma1=1 / 30, gamma2=1 / 30)
    h = build_rot_hamiltonian(p)
    chans = collapse_channels(p)
    obs = logical_observables()
    rho0 = codewords().L0
    L = liouvillian(h, chans)
    ref = propagate_fixed(L, rho0, dt=0.05, n_steps=30, observables=obs)
    fast = SectorPropagator(h, chans).propagate(rho0, 0.05, 30, obs)
    for name in obs:
        assert np.abs(ref.series(name) - fast.series(name)).max() < 1e-10
    assert ref.max_trace_error < 1e-10 and fast.max_trace_error < 1e-10


def test_fast_path_handles_parity_preserving_channel():
    # a dephasing-type jump conserves parity; both routes must agree
    p = SystemParams(gamma1=0, gamma2=0, kappa1=0, kappa2=0)
    h = build_rot_hamiltonian(p)
    chans = collapse_channels(p) + [(embed(transition(3, 2, 2), 0), 0.2)]
    obs = logical_observables()
    rho0 = codewords().L0
    ref = propagate_fixed(liouvillian(h, chans), rho0, dt=0.1, n_steps=15, observables=obs)
    fast = SectorPropagator(h, chans).propagate(rho0, 0.1, 15, obs)
    for name in obs:
        assert np.abs(ref.series(name) - fast.series(name)).max() < 1e-10


def test_fast_path_rejects_parity_mixing_channel():
    p = SystemParams()
    mixer = np.zeros((36, 36), dtype=complex)
    mixer[0, 0] = 1.0
    mixer[0, 1] = 1.0  # couples even diagonal and cross-parity element
    with pytest.raises(ValueError, match="parity"):
        SectorPropagator(build_rot_hamiltonian(p),
                         [(Operator(DEFAULT_LAYOUT, mixer), 0.1)])


def test_fast_path_rejects_parity_coherent_state():
    p = SystemParams()
    prop = SectorPropagator(build_rot_hamiltonian(p), collapse_channels(p))
    mixed_parity = (basis_ket((0, 0, 0, 0)).data + basis_ket((1, 0, 0, 0)).data) / math.sqrt(2)
    with pytest.raises(ValueError, match="parity"):
        prop.propagate(State(DEFAULT_LAYOUT, mixed_parity), 0.1, 5, {})


def test_propagation_hygiene_long_run():
    p = SystemParams(gamma1=1 / 20, gamma2=1 / 20)
    prop = SectorPropagator(build_rot_hamiltonian(p), collapse_channels(p))
    traj = prop.propagate(codewords().L0, 0.5, 400, logical_observables(),
                          checkpoint_every=50.0)
    assert traj.max_trace_error <= 1e-8
    assert traj.min_eigenvalue >= -1e-7
    assert traj.max_hermiticity_error <= 1e-9
    assert len(traj.checkpoints) >= 4
    for _, rho in traj.checkpoints:
        State(DEFAULT_LAYOUT, rho).validate(trace_tol=1e-8, eig_tol=-1e-7)


def test_adaptive_matches_fixed_for_constant_generator():
    p = SystemParams(gamma1=1 / 40, gamma2=1 / 40)
    h = build_rot_hamiltonian(p)
    chans = collapse_channels(p)
    obs = logical_observables()
    rho0 = codewords().L0
    fixed = SectorPropagator(h, chans).propagate(rho0, 0.5, 20, obs)
    adaptive = propagate_timedep(h, chans, rho0, (0.0, 10.0), tol=1e-10,
                                 t_eval=fixed.times, observables=obs)
    for name in obs:
        assert np.abs(fixed.series(name) - adaptive.series(name)).max() < 1e-7


def test_adaptive_pure_resonator_decay():
    kappa = 0.6
    chan = [(embed(transition(2, 0, 1), 3), kappa)]
    n_r2 = embed(np.diag([0.0, 1.0]).astype(complex), 3)
    traj = propagate_timedep(zero_op(), chan, basis_ket((0, 0, 0, 1)), (0.0, 5.0),
                             tol=1e-10, observables={"n": n_r2})
    assert np.abs(traj.series("n") - np.exp(-kappa * traj.times)).max() < 1e-8


def test_static_frame_run_matches_rotating_frame():
    # same dissipative dynamics expressed in two frames: the codeword
    # populations are frame invariant
    p = SystemParams(gamma1=1 / 20, gamma2=1 / 20)
    chans = collapse_channels(p)
    obs = {k: v for k, v in logical_observables().items() if k in ("p_L0", "p_L1")}
    rho0 = codewords().L0
    fixed = SectorPropagator(build_rot_hamiltonian(p), chans).propagate(
        rho0, 0.5, 20, obs)

    # cache the coupling blocks; rebuilding operators at every RHS
    # evaluation would dominate the integration
    h_common = build_static_hamiltonian(p.replace(W=0.0), 0.0).matrix
    into_ee = np.array([DEFAULT_LAYOUT.labels(i)[:2] == (1, 1) for i in range(36)])
    blocks = {}
    for tag, (ph0, ph1) in (("b0", (1.0, 0.0)), ("b1", (0.0, 1.0))):
        full = qq_sideband_coupling(p.W, phase0=ph0, phase1=ph1).matrix
        blocks[tag] = full * into_ee[None, :]  # the |ab><ee| halves
    check_t = 0.377
    rebuilt = (h_common + blocks["b0"] * np.exp(-1j * p.nu0 * check_t)
               + blocks["b0"].conj().T * np.exp(1j * p.nu0 * check_t)
               + blocks["b1"] * np.exp(-1j * p.nu1 * check_t)
               + blocks["b1"].conj().T * np.exp(1j * p.nu1 * check_t))
    assert np.abs(rebuilt - build_static_hamiltonian(p, check_t).matrix).max() < 1e-12

    def h_of_t(t):
        return (h_common + blocks["b0"] * np.exp(-1j * p.nu0 * t)
                + blocks["b0"].conj().T * np.exp(1j * p.nu0 * t)
                + blocks["b1"] * np.exp(-1j * p.nu1 * t)
                + blocks["b1"].conj().T * np.exp(1j * p.nu1 * t))

    adaptive = propagate_timedep(h_of_t, chans, rho0, (0.0, 10.0), tol=1e-8,
                                 t_eval=fixed.times, observables=obs)
    for name in obs:
        assert np.abs(fixed.series(name) - adaptive.series(name)).max() < 1e-3


def test_expectation_values():
    rho_l0 = codewords().L0
    assert expectation(identity(), rho_l0) == pytest.approx(1.0, abs=1e-14)
    p_l0 = Operator(DEFAULT_LAYOUT, np.outer(rho_l0.data, rho_l0.data.conj()))
    assert expectation(p_l0, rho_l0) == pytest.approx(1.0, abs=1e-14)
    # maximally mixed qutrit pair with resonators in vacuum
    rho = np.zeros((36, 36), dtype=complex)
    for a in range(3):
        for b in range(3):
            i = DEFAULT_LAYOUT.index((a, b, 0, 0))
            rho[i, i] = 1 / 9
    from starlab.qspace import projector

    assert expectation(projector(1, 1), State(DEFAULT_LAYOUT, rho)) == pytest.approx(1 / 9)


def test_expectation_warns_on_imaginary_residue():
    m = np.zeros((36, 36), dtype=complex)
    m[0, 1] = 1.0  # not Hermitian
    rho = np.zeros((36, 36), dtype=complex)
    rho[0, 0] = 0.5
    rho[1, 1] = 0.5
    rho[1, 0] = 0.5j
    rho[0, 1] = -0.5j
    with pytest.warns(UserWarning, match="imaginary"):
        expectation(Operator(DEFAULT_LAYOUT, m), State(DEFAULT_LAYOUT, rho))


def test_process_series_start_at_unity():
    p = SystemParams()
    prop = SectorPropagator(build_rot_hamiltonian(p), collapse_channels(p))
    obs = logical_observables()
    for label in ("L0", "Lx"):
        rho0 = getattr(codewords(), label)
        traj = prop.propagate(rho0, 0.5, 4, obs)
        series = process_observables(traj, label, p.nu0, p.nu1)
        assert series[0] == pytest.approx(1.0, abs=1e-12)


def test_dark_states_are_stationary_without_dissipation():
    # drives only: the codewords are exact stationary states, and the
    # demodulated superposition fidelity stays at unity
    p = SystemParams(Omega1=0, Omega2=0, kappa1=0, kappa2=0, gamma1=0, gamma2=0)
    h = build_rot_hamiltonian(p)
    prop = SectorPropagator(h, [])
    obs = logical_observables()
    for label in ("L0", "L1"):
        traj = prop.propagate(getattr(codewords(), label), 1.0, 100, obs)
        key = "p_L0" if label == "L0" else "p_L1"
        assert np.abs(traj.series(key) - 1.0).max() < 1e-9
    traj = prop.propagate(codewords().Lx, 1.0, 100, obs)
    fid = lx_corotating_series(traj, p.nu0, p.nu1)
    assert np.abs(fid - 1.0).max() < 1e-9
    # the raw superposition projector oscillates at the frame frequency,
    # which is exactly why the demodulated series is the right observable
    raw = 0.5 * (traj.series("p_L0") + traj.series("p_L1")) + 0.5 * traj.series("x_L")
    assert raw.min() < 0.2


def test_trajectory_csv_roundtrip(tmp_path):
    p = SystemParams()
    prop = SectorPropagator(build_rot_hamiltonian(p), collapse_channels(p))
    traj = prop.propagate(codewords().L0, 0.5, 5, logical_observables())
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    data = np.genfromtxt(path, delimiter=",", names=True)
    assert data.dtype.names[0] == "time_us"
    assert set(data.dtype.names) >= {"time_us", "p_L0", "p_L1", "x_L", "y_L"}
    assert np.allclose(data["p_L0"], traj.series("p_L0"))


def test_superoperator_shape_validation():
    with pytest.raises(ValueError):
        Superoperator(DEFAULT_LAYOUT, np.zeros((36, 36)))
