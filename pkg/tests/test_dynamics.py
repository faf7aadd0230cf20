import math

import numpy as np
import pytest

from qtransfer import (
    CavityParams,
    CavityState,
    InvalidGridError,
    InvalidParametersError,
    NumericFailureError,
    PulseEnvelope,
    TimeGrid,
    WaveguideParams,
    adiabatic_thresholds,
    cavity_efficiency,
    default_grid,
    generator_matrix,
    propagate_exact,
    rk4_step,
    simulate_cavity,
    simulate_waveguide,
    waveguide_amplitude_analytic,
    waveguide_efficiency,
)

SYMMETRIC = CavityParams(g_es=1, kappa_es=1, g_ef=1, kappa_ef=1,
                         gamma_es=1e-9, gamma_ef=1e-9)
MISMATCHED = CavityParams(g_es=1, kappa_es=1, g_ef=math.sqrt(2), kappa_ef=1,
                          gamma_es=1e-9, gamma_ef=1e-9)


def random_cavity(rng, gamma_eo=True):
    return CavityParams(
        g_es=rng.uniform(0.5, 1.5),
        kappa_es=rng.uniform(0.5, 1.5),
        g_ef=rng.uniform(0.5, 1.5),
        kappa_ef=rng.uniform(0.5, 1.5),
        gamma_es=rng.uniform(0.0, 0.3),
        gamma_ef=rng.uniform(0.0, 0.3),
        gamma_eo=rng.uniform(0.0, 0.3) if gamma_eo else 0.0,
    )


def random_waveguide(rng, gamma_eo=True):
    return WaveguideParams(
        Gamma_es=rng.uniform(0.5, 1.5),
        Gamma_ef=rng.uniform(0.5, 1.5),
        gamma_es=rng.uniform(0.0, 0.4),
        gamma_ef=rng.uniform(0.0, 0.4),
        gamma_eo=rng.uniform(0.0, 0.4) if gamma_eo else 0.0,
    )


# -- generator and thresholds -------------------------------------------------


def test_generator_single_coupling_term():
    # lossless coupled modes are rejected by the parameter type, so probe the
    # e-s coupling block alongside the matching loss entry
    G = generator_matrix(CavityParams(g_es=1, kappa_es=1))
    expected = np.zeros((3, 3), dtype=complex)
    expected[0, 1] = 1j
    expected[1, 0] = -1j
    expected[0, 0] = -1j
    np.testing.assert_array_equal(G, expected)


def test_generator_pure_cavity_loss():
    G = generator_matrix(CavityParams(g_es=0, kappa_es=1))
    np.testing.assert_array_equal(G, np.diag([-1j, 0, 0]))


def test_generator_eigenvalues_match_thresholds():
    p = CavityParams(g_es=1, kappa_es=1, g_ef=1, kappa_ef=1)
    magnitudes = sorted(np.abs(np.linalg.eigvals(generator_matrix(p))))
    np.testing.assert_allclose(magnitudes, [1.0, math.sqrt(2), math.sqrt(2)], atol=1e-12)


def test_generator_gamma_eo_widens_excited_state():
    G = generator_matrix(CavityParams(g_es=1, kappa_es=1, gamma_es=0.2, gamma_ef=0.3, gamma_eo=0.5))
    assert G[1, 1] == pytest.approx(-0.5j)


def test_adiabatic_thresholds_complex_branch():
    th = adiabatic_thresholds(CavityParams(g_es=1, kappa_es=1, g_ef=1, kappa_ef=1))
    np.testing.assert_allclose(th, [1.0, 1.41421, 1.41421], atol=1e-5)


def test_adiabatic_thresholds_uncoupled():
    th = adiabatic_thresholds(CavityParams(g_es=0, kappa_es=1))
    np.testing.assert_allclose(th, [1.0, 1.0, 0.0], atol=1e-15)


def test_adiabatic_thresholds_degenerate():
    # gamma_es + gamma_ef = 2 kappa_es makes both eigenfrequencies equal kappa_es
    th = adiabatic_thresholds(CavityParams(g_es=0, kappa_es=1, gamma_es=1.0, gamma_ef=1.0))
    np.testing.assert_allclose(th, [1.0, 1.0, 1.0], atol=1e-15)


# -- single-step propagators ---------------------------------------------------


def test_propagate_exact_identity():
    state = CavityState(0.3 + 0.1j, -0.2j, 0.5)
    out = propagate_exact(np.zeros((3, 3), dtype=complex), state, 1.0)
    np.testing.assert_allclose(out.as_array(), state.as_array(), atol=1e-15)


def test_propagate_exact_scalar_decay():
    G = np.diag([-1j, 0, 0]).astype(complex)
    out = propagate_exact(G, CavityState(1, 0, 0), 1.0)
    assert out.psi_S == pytest.approx(math.exp(-1), abs=1e-12)
    assert out.psi_E == 0 and out.psi_F == 0


def test_propagate_exact_defective_generator_warns():
    # nilpotent Jordan block: eigendecomposition unusable, series fallback exact
    G = np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]], dtype=complex)
    state = CavityState(0.0, 1.0, 0.0)
    with pytest.warns(RuntimeWarning):
        out = propagate_exact(G, state, 0.5)
    # exp(-iG dt) = 1 - iG dt for nilpotent G
    np.testing.assert_allclose(out.as_array(), [-0.5j, 1.0, 0.0], atol=1e-12)


def test_rk4_step_against_exact_propagator():
    rng = np.random.default_rng(11)
    for _ in range(5):
        p = random_cavity(rng)
        G = generator_matrix(p)
        dt = 0.01
        state = rng.normal(size=3) + 1j * rng.normal(size=3)
        state /= np.linalg.norm(state)
        approx = CavityState.from_array(state)
        exact = CavityState.from_array(state)
        for _ in range(1000):
            approx = rk4_step(G, approx, dt)
            exact = propagate_exact(G, exact, dt)
        dev = np.max(np.abs(approx.as_array() - exact.as_array()))
        assert dev < 1e-6


def test_homogeneous_norm_never_grows():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = random_cavity(rng)
        G = generator_matrix(p)
        h = 0.05 / max(p.all_rates())
        state = rng.normal(size=3) + 1j * rng.normal(size=3)
        state /= np.linalg.norm(state)
        st = CavityState.from_array(state)
        for _ in range(20):
            nxt = rk4_step(G, st, h)
            assert nxt.norm() <= st.norm() * (1 + 1e-12)
            st = nxt


# -- cavity simulation ----------------------------------------------------------


def test_cavity_zero_envelope_gives_zero():
    env = PulseEnvelope.tabulated([-1.0, 0.0, 1.0], [0.0, 0.0, 0.0])
    traj, out = simulate_cavity(SYMMETRIC, env)
    assert out.P_sf == 0.0
    assert out.input_norm == 0.0
    assert np.all(traj.states == 0)


def test_cavity_matched_approaches_unity():
    env = PulseEnvelope.gaussian(5e-3)
    _, out = simulate_cavity(SYMMETRIC, env, record_every=10**9)
    assert out.P_sf == pytest.approx(cavity_efficiency(SYMMETRIC).eta, abs=1e-3)
    assert out.P_sf > 0.999


def test_cavity_mismatched_eight_ninths():
    env = PulseEnvelope.gaussian(5e-3)
    _, out = simulate_cavity(MISMATCHED, env, record_every=10**9)
    assert out.P_sf == pytest.approx(8 / 9, abs=1e-3)


def test_cavity_requires_input_channel():
    with pytest.raises(InvalidParametersError):
        simulate_cavity(CavityParams(g_es=0, kappa_es=0, gamma_ef=1),
                        PulseEnvelope.gaussian(0.1))


def test_step_bound_enforced():
    env = PulseEnvelope.gaussian(0.1)
    grid = TimeGrid(t_start=-100, t_end=100, step=0.06)
    with pytest.raises(InvalidGridError):
        simulate_cavity(SYMMETRIC, env, grid)


def test_timegrid_validation():
    with pytest.raises(InvalidGridError):
        TimeGrid(t_start=1.0, t_end=0.0, step=0.01)
    with pytest.raises(InvalidGridError):
        TimeGrid(t_start=0.0, t_end=1.0, step=0.0)
    with pytest.raises(InvalidGridError):
        TimeGrid(t_start=0.0, t_end=1.0, step=0.01, stop_norm=0.0)


def test_step_halving_converged():
    for dw in (0.1, 0.3):
        env = PulseEnvelope.gaussian(dw)
        grid = default_grid(env, SYMMETRIC)
        _, coarse = simulate_cavity(SYMMETRIC, env, grid, record_every=10**9)
        fine_grid = TimeGrid(grid.t_start, grid.t_end, grid.step / 2, grid.stop_norm)
        _, fine = simulate_cavity(SYMMETRIC, env, fine_grid, record_every=10**9)
        assert abs(coarse.P_sf - fine.P_sf) < 1e-8


def test_trajectory_norm_bounded_by_supplied_input():
    env = PulseEnvelope.gaussian(0.2)
    traj, out = simulate_cavity(SYMMETRIC, env, record_every=50)
    norms_sq = np.sum(np.abs(traj.states) ** 2, axis=1)
    # cumulative input norm up to each sample bounds the state norm
    assert np.all(norms_sq <= out.input_norm + 1e-9)


def test_outcome_bookkeeping_fields():
    p = CavityParams(g_es=1, kappa_es=1, g_ef=1, kappa_ef=1,
                     gamma_es=0.1, gamma_ef=0.2, gamma_eo=0.15)
    env = PulseEnvelope.gaussian(0.05)
    _, out = simulate_cavity(p, env, record_every=10**9)
    assert 0 <= out.P_sf <= 1 and 0 <= out.P_other <= 1 and 0 <= out.P_back_bg <= 1
    assert out.P_sf + out.P_other + out.P_back_bg <= out.input_norm + 1e-9
    assert out.P_back >= -1e-9
    assert out.residual_norm <= 1e-12**2 * 1.01 or out.residual_norm < 1e-20
    assert len(out.adiabaticity) == 3


def test_linearity_in_the_drive():
    dw = 0.3
    src = PulseEnvelope.gaussian(dw)
    t = np.linspace(-10 / dw, 10 / dw, 4001)
    c = 0.6 - 0.3j
    env1 = PulseEnvelope.tabulated(t, src(t))
    env2 = PulseEnvelope.tabulated(t, c * src(t))
    grid = default_grid(env1, SYMMETRIC)
    traj1, out1 = simulate_cavity(SYMMETRIC, env1, grid, record_every=500)
    traj2, out2 = simulate_cavity(SYMMETRIC, env2, grid, record_every=500)
    n = min(traj1.states.shape[0], traj2.states.shape[0])
    np.testing.assert_allclose(traj2.states[:n], c * traj1.states[:n], atol=1e-12)
    assert out2.P_sf == pytest.approx(abs(c) ** 2 * out1.P_sf, rel=1e-10)
    assert out2.input_norm == pytest.approx(abs(c) ** 2 * out1.input_norm, rel=1e-10)


def test_shape_independence_in_adiabatic_regime():
    dw = 1e-2
    _, g_out = simulate_cavity(SYMMETRIC, PulseEnvelope.gaussian(dw), record_every=10**9)
    _, a_out = simulate_cavity(SYMMETRIC, PulseEnvelope.antisymmetric(dw), record_every=10**9)
    assert abs(g_out.P_sf - a_out.P_sf) < 1e-3


def test_record_every_thins_trajectory():
    env = PulseEnvelope.gaussian(0.2)
    dense, _ = simulate_cavity(SYMMETRIC, env, record_every=1)
    sparse, _ = simulate_cavity(SYMMETRIC, env, record_every=100)
    assert sparse.times.size < dense.times.size
    assert sparse.times.size >= dense.times.size // 100


def test_trajectory_csv_export(tmp_path):
    env = PulseEnvelope.gaussian(0.2)
    traj, _ = simulate_cavity(SYMMETRIC, env, record_every=200)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,re_S,im_S,re_E,im_E,re_F,im_F,abs_f_in"
    assert len(lines) == traj.times.size + 1


def test_loop_fallback_at_exceptional_point():
    # g = (kappa - w)/2 makes the S-E block defective (double eigenvalue), so
    # the modal shortcut is rejected and the plain-loop stepper must agree
    # with the closed form just as well
    p = CavityParams(g_es=0.4, kappa_es=1.0, gamma_ef=0.4)
    from qtransfer.dynamics import _Modal, _Rk4Maps, generator_matrix as gm

    a = np.asarray(gm(p), dtype=complex) * (-1j)
    maps = _Rk4Maps(a, np.array([1, 0, 0], dtype=complex), 0.05)
    assert not _Modal(maps.M).ok
    env = PulseEnvelope.gaussian(1e-2)
    _, out = simulate_cavity(p, env, record_every=10**9)
    assert out.P_sf == pytest.approx(cavity_efficiency(p).eta_sf, abs=1e-3)


def test_tail_cap_raises_numeric_failure():
    # nearly closed e-s channel: the excited state drains at ~2 g^2/kappa = 2e-8,
    # far too slow to reach the stop threshold within the step cap
    p = CavityParams(g_es=1e-4, kappa_es=1.0)
    env = PulseEnvelope.gaussian(0.05)
    with pytest.raises(NumericFailureError):
        simulate_cavity(p, env, record_every=10**9)


# -- waveguide simulation --------------------------------------------------------


def test_waveguide_matched_unity():
    _, out = simulate_waveguide(WaveguideParams(Gamma_es=1, Gamma_ef=1),
                                PulseEnvelope.gaussian(5e-3), record_every=10**9)
    assert out.P_sf == pytest.approx(1.0, abs=1e-3)


def test_waveguide_mismatched_eight_ninths():
    _, out = simulate_waveguide(WaveguideParams(Gamma_es=1, Gamma_ef=2),
                                PulseEnvelope.gaussian(5e-3), record_every=10**9)
    assert out.P_sf == pytest.approx(8 / 9, abs=1e-3)


def test_waveguide_no_f_channel_no_transfer():
    _, out = simulate_waveguide(WaveguideParams(Gamma_es=1, Gamma_ef=0),
                                PulseEnvelope.antisymmetric(0.05), record_every=10**9)
    assert out.P_sf == 0.0


def test_waveguide_requires_input_channel():
    with pytest.raises(InvalidParametersError):
        simulate_waveguide(WaveguideParams(Gamma_es=0, Gamma_ef=1),
                           PulseEnvelope.gaussian(0.1))


def test_waveguide_branching_is_exact():
    p = WaveguideParams(Gamma_es=0.9, Gamma_ef=1.4, gamma_es=0.3, gamma_ef=0.2)
    _, out = simulate_waveguide(p, PulseEnvelope.gaussian(0.05), record_every=10**9)
    total_rate = p.Gamma_es + p.Gamma_ef + p.gamma_es + p.gamma_ef
    excited_integral = out.P_back_bg / p.gamma_es
    total_decayed = total_rate * excited_integral
    assert out.P_sf / total_decayed == pytest.approx(
        (p.Gamma_ef + p.gamma_ef) / total_rate, abs=1e-9
    )


def test_waveguide_amplitude_analytic_zero_envelope():
    env = PulseEnvelope.tabulated([-1.0, 1.0], [0.0, 0.0])
    val = waveguide_amplitude_analytic(WaveguideParams(Gamma_es=1), env, 0.5)
    assert val == 0.0


def test_waveguide_ode_matches_convolution():
    p = WaveguideParams(Gamma_es=0.8, Gamma_ef=1.3, gamma_es=0.2, gamma_ef=0.1, gamma_eo=0.05)
    env = PulseEnvelope.antisymmetric(0.02)
    traj, _ = simulate_waveguide(p, env, record_every=2000)
    take = np.linspace(0, traj.times.size - 1, 20, dtype=int)
    for i in take:
        ana = waveguide_amplitude_analytic(p, env, float(traj.times[i]))
        assert abs(ana - traj.states[i]) < 1e-8


def test_waveguide_adiabatic_amplitude_follows_envelope():
    p = WaveguideParams(Gamma_es=1.0, Gamma_ef=1.0)
    env = PulseEnvelope.gaussian(1e-3)
    r = 2.0
    for t in (-200.0, 0.0, 150.0):
        expected = 2j * math.sqrt(p.Gamma_es) / r * env(t)
        got = waveguide_amplitude_analytic(p, env, t)
        assert abs(got - expected) <= 5 * (1e-3 / r) * abs(expected) + 1e-12


def test_waveguide_simulation_matches_closed_form_efficiency():
    p = WaveguideParams(Gamma_es=1.1, Gamma_ef=0.7, gamma_es=0.2, gamma_ef=0.1, gamma_eo=0.3)
    _, out = simulate_waveguide(p, PulseEnvelope.gaussian(2e-3), record_every=10**9)
    report = waveguide_efficiency(p)
    assert out.P_sf == pytest.approx(report.eta_sf, abs=1e-3)
    assert out.P_sf + out.P_other == pytest.approx(report.eta, abs=1e-3)
