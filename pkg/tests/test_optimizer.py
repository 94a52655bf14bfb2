import numpy as np
import pytest

from risoam.channel import ChannelSet
from risoam.manifold import RcgConfig
from risoam.oam import (
    RisState,
    TransmitState,
    effective_channel_bob,
    rate_report,
    ris2_radiated_power,
    sinr_bob,
    sinr_eve,
)
from risoam.optimizer import (
    AoConfig,
    build_amplifier_problem,
    build_power_problem,
    egrad_theta1,
    egrad_theta2,
    objective_theta1,
    objective_theta2,
    optimize_design,
    theta1_workspace,
    theta2_workspace,
    update_t,
    update_tau_omega,
)
from risoam.solvers import amplifier_objective
from risoam.testing import finite_difference_grad, random_instance


# ---------------------------------------------------------------- update_t


def test_update_t_no_interference():
    gains = np.diag([2.0, 3.0])
    t_bob, _ = update_t(gains, np.zeros((2, 2)), np.array([0.5, 0.5]),
                        np.zeros(2), np.zeros(2), 1.0, 1.0)
    assert np.allclose(t_bob, 1.0)


def test_lemma1_grid_scan_at_x2():
    t = np.arange(1e-4, 5.0, 1e-4)
    theta = -t * 2.0 + np.log(t) + 1.0
    best = t[np.argmax(theta)]
    assert abs(best - 0.5) <= 1e-4 + 1e-12
    assert abs(theta.max() - (-np.log(2.0))) < 1e-7


def test_lemma1_grid_scan_random_x():
    rng = np.random.default_rng(0)
    t = np.arange(1e-4, 5.0, 1e-4)
    for x in rng.uniform(0.25, 4.0, size=100):
        theta = -t * x + np.log(t) + 1.0
        assert abs(t[np.argmax(theta)] - 1.0 / x) <= 1e-4 + 1e-12


def test_update_t_matches_closed_forms():
    inst = random_instance(seed=1)
    pair = inst.codebook.pairs[0]
    h_b, rows = effective_channel_bob(inst.channels, inst.ris, inst.f_matrix,
                                      pair.signal_modes)
    gains_b = np.abs(h_b) ** 2
    rng = np.random.default_rng(2)
    gains_e = rng.uniform(0.1, 1.0, gains_b.shape)
    c1 = rng.uniform(0.0, 0.2, 3)
    c2 = rng.uniform(0.0, 0.2, 3)
    p = inst.state.p_s
    t_bob, t_eve = update_t(gains_b, gains_e, p, c1, c2, 0.05, 0.07)
    for l in range(3):
        interf = sum(p[k] * gains_b[l, k] for k in range(3) if k != l)
        assert abs(t_bob[l] - 1.0 / (1.0 + (interf + c1[l]) / 0.05)) < 1e-12
        full = sum(p[k] * gains_e[l, k] for k in range(3))
        assert abs(t_eve[l] - 1.0 / (1.0 + (full + c2[l]) / 0.07)) < 1e-12


# ---------------------------------------------------------------- tau/omega


def _bob_tables(inst):
    pair = inst.codebook.pairs[0]
    h_b, rows = effective_channel_bob(inst.channels, inst.ris, inst.f_matrix,
                                      pair.signal_modes)
    noise_quad = inst.budget.sigma_r2_sq * (
        np.abs(rows) ** 2 * inst.ris.a[None, :] ** 2
    ).sum(axis=1)
    return h_b, rows, noise_quad


def test_omega_equals_one_plus_sinr():
    inst = random_instance(seed=3)
    h_b, rows, noise_quad = _bob_tables(inst)
    _, omega = update_tau_omega(h_b, noise_quad, inst.state.p_s, inst.budget.sigma_b_sq)
    gamma = sinr_bob(h_b, rows, inst.ris.a, inst.state.p_s,
                     inst.budget.sigma_r2_sq, inst.budget.sigma_b_sq)
    assert np.max(np.abs(omega - (1.0 + gamma))) < 1e-10


def test_zero_power_mode_gives_unit_omega_zero_tau():
    inst = random_instance(seed=4)
    h_b, _, noise_quad = _bob_tables(inst)
    p = inst.state.p_s.copy()
    p[0] = 0.0
    tau, omega = update_tau_omega(h_b, noise_quad, p, inst.budget.sigma_b_sq)
    assert tau[0] == 0.0
    assert omega[0] == 1.0
    assert np.all(omega >= 1.0)


def test_mse_reciprocal_identity():
    inst = random_instance(seed=5)
    h_b, _, noise_quad = _bob_tables(inst)
    p = inst.state.p_s
    tau, omega = update_tau_omega(h_b, noise_quad, p, inst.budget.sigma_b_sq)
    for l in range(3):
        err = abs(1.0 - np.conj(tau[l]) * np.sqrt(p[l]) * h_b[l, l]) ** 2
        interf = sum(p[k] * abs(h_b[l, k]) ** 2 for k in range(3) if k != l)
        err += abs(tau[l]) ** 2 * (interf + noise_quad[l] + inst.budget.sigma_b_sq)
        assert abs(err - 1.0 / omega[l]) < 1e-12


# ---------------------------------------------------------------- amplifier assembly


def test_amplifier_problem_zero_weights():
    inst = random_instance(seed=6)
    zero = np.zeros(3)
    problem = build_amplifier_problem(inst.channels, inst.ris, inst.state,
                                      inst.codebook, 0, inst.f_matrix,
                                      tau=zero.astype(complex), omega=np.ones(3) * 0.0,
                                      budget=inst.budget)
    assert np.all(problem.omega == 0)
    assert np.all(problem.g == 0)


def test_amplifier_problem_hermitian_psd():
    inst = random_instance(seed=7)
    h_b, _, noise_quad = _bob_tables(inst)
    tau, omega = update_tau_omega(h_b, noise_quad, inst.state.p_s,
                                  inst.budget.sigma_b_sq)
    problem = build_amplifier_problem(inst.channels, inst.ris, inst.state,
                                      inst.codebook, 0, inst.f_matrix, tau, omega,
                                      inst.budget)
    assert np.max(np.abs(problem.omega - np.conj(problem.omega).T)) < 1e-10
    eigenvalues = np.linalg.eigvalsh(problem.omega)
    assert eigenvalues.min() >= -1e-10
    assert np.all(np.diag(np.real(problem.power_matrix)) > 0)


def test_amplifier_problem_power_constraint_matches_radiated_power():
    inst = random_instance(seed=8)
    h_b, _, noise_quad = _bob_tables(inst)
    tau, omega = update_tau_omega(h_b, noise_quad, inst.state.p_s,
                                  inst.budget.sigma_b_sq)
    problem = build_amplifier_problem(inst.channels, inst.ris, inst.state,
                                      inst.codebook, 0, inst.f_matrix, tau, omega,
                                      inst.budget)
    quad = inst.ris.a @ np.real(problem.power_matrix) @ inst.ris.a
    direct = ris2_radiated_power(inst.channels, inst.ris, inst.state, inst.codebook,
                                 0, inst.f_matrix, inst.budget.sigma_r2_sq)
    assert abs(quad - direct) < 1e-12 * max(1.0, direct)


def test_amplifier_objective_matches_mse_surrogate_difference():
    inst = random_instance(seed=9)
    h_b, _, noise_quad = _bob_tables(inst)
    p = inst.state.p_s
    tau, omega = update_tau_omega(h_b, noise_quad, p, inst.budget.sigma_b_sq)
    problem = build_amplifier_problem(inst.channels, inst.ris, inst.state,
                                      inst.codebook, 0, inst.f_matrix, tau, omega,
                                      inst.budget)
    rng = np.random.default_rng(10)
    pair = inst.codebook.pairs[0]

    def surrogate_sum(a):
        ris = RisState(inst.ris.theta1, inst.ris.theta2, a)
        h, rows = effective_channel_bob(inst.channels, ris, inst.f_matrix,
                                        pair.signal_modes)
        nq = inst.budget.sigma_r2_sq * (np.abs(rows) ** 2 * a[None, :] ** 2).sum(axis=1)
        total = 0.0
        for l in range(3):
            err = abs(1.0 - np.conj(tau[l]) * np.sqrt(p[l]) * h[l, l]) ** 2
            interf = sum(p[k] * abs(h[l, k]) ** 2 for k in range(3) if k != l)
            err += abs(tau[l]) ** 2 * (interf + nq[l] + inst.budget.sigma_b_sq)
            total += np.log(omega[l]) - omega[l] * err + 1.0
        return total

    a1 = rng.uniform(0.1, 1.0, size=inst.ris.a.size)
    a2 = rng.uniform(0.1, 1.0, size=inst.ris.a.size)
    lhs = surrogate_sum(a1) - surrogate_sum(a2)
    rhs = amplifier_objective(problem, a1) - amplifier_objective(problem, a2)
    assert abs(lhs - rhs) < 1e-10


# ---------------------------------------------------------------- phase gradients


def _workspaces(inst):
    ws1 = theta1_workspace(inst.channels, inst.ris.theta2, inst.ris.a, inst.state,
                           inst.codebook, 0, inst.f_matrix, inst.budget)
    ws2 = theta2_workspace(inst.channels, inst.ris.theta1, inst.ris.a, inst.state,
                           inst.codebook, 0, inst.f_matrix, inst.budget)
    return ws1, ws2


def test_phase_objectives_match_rate_report():
    inst = random_instance(seed=11)
    ws1, ws2 = _workspaces(inst)
    report = rate_report(inst.channels, inst.ris, inst.state, inst.codebook, 0,
                         inst.f_matrix, inst.budget.sigma_b_sq,
                         inst.budget.sigma_e_sq, inst.budget.sigma_r2_sq)
    assert abs(objective_theta1(inst.ris.theta1, ws1) + (report.r_b - report.r_e)) < 1e-10
    assert abs(objective_theta2(inst.ris.theta2, ws2) + report.r_b) < 1e-10


def test_zero_channels_give_zero_gradients():
    inst = random_instance(seed=12, n_modes=4, n_eve=4, q1=5, q2=5,
                           n_low=2, n_signal=2, n_an=2)
    zeros = ChannelSet(
        h_ar1=np.zeros_like(inst.channels.h_ar1),
        h_r1r2=np.zeros_like(inst.channels.h_r1r2),
        h_r2b=np.zeros_like(inst.channels.h_r2b),
        h_ae=np.zeros_like(inst.channels.h_ae),
        h_r1e=np.zeros_like(inst.channels.h_r1e),
    )
    ws1 = theta1_workspace(zeros, inst.ris.theta2, inst.ris.a, inst.state,
                           inst.codebook, 0, inst.f_matrix, inst.budget)
    ws2 = theta2_workspace(zeros, inst.ris.theta1, inst.ris.a, inst.state,
                           inst.codebook, 0, inst.f_matrix, inst.budget)
    assert np.all(egrad_theta1(inst.ris.theta1, ws1) == 0)
    assert np.all(egrad_theta2(inst.ris.theta2, ws2) == 0)


@pytest.mark.parametrize("seed", range(3))
def test_theta1_gradient_matches_finite_differences(seed):
    inst = random_instance(seed=seed, n_modes=4, n_eve=4, q1=6, q2=6,
                           n_low=2, n_signal=2, n_an=2)
    ws1, _ = _workspaces(inst)
    rel = finite_difference_grad(
        lambda th: objective_theta1(th, ws1),
        lambda th: egrad_theta1(th, ws1),
        inst.ris.theta1,
    )
    assert rel < 1e-5


@pytest.mark.parametrize("seed", range(3))
def test_theta2_gradient_matches_finite_differences(seed):
    inst = random_instance(seed=seed + 50, n_modes=4, n_eve=4, q1=6, q2=6,
                           n_low=2, n_signal=2, n_an=2)
    _, ws2 = _workspaces(inst)
    rel = finite_difference_grad(
        lambda th: objective_theta2(th, ws2),
        lambda th: egrad_theta2(th, ws2),
        inst.ris.theta2,
    )
    assert rel < 1e-5


def test_theta2_does_not_affect_eve():
    inst = random_instance(seed=13)
    rng = np.random.default_rng(14)
    base = sinr_eve(inst.channels, inst.ris, inst.state, inst.codebook, 0,
                    inst.f_matrix, inst.budget.sigma_e_sq)
    for _ in range(3):
        perturbed = RisState(inst.ris.theta1,
                             np.exp(2j * np.pi * rng.random(inst.ris.theta2.size)),
                             inst.ris.a)
        gamma = sinr_eve(inst.channels, perturbed, inst.state, inst.codebook, 0,
                         inst.f_matrix, inst.budget.sigma_e_sq)
        assert np.array_equal(gamma, base)


# ---------------------------------------------------------------- power assembly


def test_power_problem_constraint_matches_radiated_power():
    inst = random_instance(seed=15)
    problem = build_power_problem(inst.channels, inst.ris, inst.state, inst.codebook,
                                  0, inst.f_matrix, inst.budget)
    direct = ris2_radiated_power(inst.channels, inst.ris, inst.state, inst.codebook,
                                 0, inst.f_matrix, inst.budget.sigma_r2_sq)
    linear = problem.ris2_coeffs @ inst.state.p_s + problem.ris2_offset
    assert abs(linear - direct) < 1e-12 * max(1.0, direct)


# ---------------------------------------------------------------- the AO loop


def test_ao_degenerate_secure_channel():
    inst = random_instance(seed=16, n_modes=4, n_eve=4, q1=6, q2=6,
                           n_low=1, n_signal=1, n_an=0, rho=1.0)
    channels = ChannelSet(
        h_ar1=inst.channels.h_ar1, h_r1r2=inst.channels.h_r1r2,
        h_r2b=inst.channels.h_r2b, h_ae=np.zeros_like(inst.channels.h_ae),
        h_r1e=None,
    )
    assert inst.codebook.size == 1
    cfg = AoConfig(seed=0, max_outer_iters=40, rcg=RcgConfig(max_iters=100))
    design, trace = optimize_design(channels, inst.f_matrix, inst.budget,
                                    inst.codebook, 0, cfg)
    r = trace.r_oam_series()
    clean = ~trace.repaired_flags()
    diffs = np.diff(r)
    assert np.all(diffs[clean[1:]] >= -1e-6)
    state = TransmitState(design.p_s, inst.budget.rho, inst.budget.p_transmit, 0)
    report = rate_report(channels, design.ris_state(), state, inst.codebook, 0,
                         inst.f_matrix, inst.budget.sigma_b_sq,
                         inst.budget.sigma_e_sq, inst.budget.sigma_r2_sq)
    assert abs(report.r_oam - np.log2(1 + report.gamma_b[0])) < 1e-12
    assert abs(report.r_oam - r.max()) < 1e-9


def test_ao_desk_instance_monotone_and_convergent():
    inst = random_instance(seed=17, n_modes=4, n_eve=4, q1=8, q2=8,
                           n_low=2, n_signal=2, n_an=2)
    cfg = AoConfig(seed=1, max_outer_iters=100, outer_tolerance=1e-4,
                   rcg=RcgConfig(max_iters=150))
    _, trace = optimize_design(inst.channels, inst.f_matrix, inst.budget,
                               inst.codebook, 0, cfg)
    r = trace.r_oam_series()
    assert len(r) <= 100
    clean = ~trace.repaired_flags()
    diffs = np.diff(r)
    assert np.all(diffs[clean[1:]] >= -1e-6)
    assert abs(r[-1] - r[-2]) < 1e-4


def test_ao_final_point_feasible():
    inst = random_instance(seed=18)
    cfg = AoConfig(seed=2, max_outer_iters=30, rcg=RcgConfig(max_iters=100))
    design, _ = optimize_design(inst.channels, inst.f_matrix, inst.budget,
                                inst.codebook, 0, cfg)
    budget = inst.budget
    assert design.p_s.sum() <= budget.rho * budget.p_transmit + 1e-8
    assert np.all(design.p_s >= budget.p_floor - 1e-8)
    assert np.all(design.a >= -1e-12)
    assert np.all(design.a <= budget.a_max + 1e-10)
    assert np.max(np.abs(np.abs(design.theta1) - 1)) < 1e-10
    assert np.max(np.abs(np.abs(design.theta2) - 1)) < 1e-10
    state = TransmitState(design.p_s, budget.rho, budget.p_transmit,
                          inst.codebook.n_an)
    power = ris2_radiated_power(inst.channels, design.ris_state(), state,
                                inst.codebook, 0, inst.f_matrix, budget.sigma_r2_sq)
    assert power <= budget.p_ris_limit * (1 + 1e-8)


def test_alternating_optimize_on_baseline_preset():
    from risoam.optimizer import alternating_optimize
    from risoam.scenario import paper_default, with_ris_counts

    scenario = with_ris_counts(paper_default(), 8)
    cfg = AoConfig(seed=0, max_outer_iters=5, rcg=RcgConfig(max_iters=30))
    design, trace = alternating_optimize(scenario, config=cfg)
    assert design.p_s.size == scenario.n_signal
    assert design.theta1.size == 8 and design.theta2.size == 8
    assert len(trace.rows) >= 1
    assert np.isfinite(trace.r_oam_series()).all()


def test_ao_deterministic_given_seed():
    inst = random_instance(seed=19, n_modes=4, n_eve=4, q1=6, q2=6,
                           n_low=2, n_signal=2, n_an=2)
    cfg = AoConfig(seed=3, max_outer_iters=10, rcg=RcgConfig(max_iters=50))
    d1, t1 = optimize_design(inst.channels, inst.f_matrix, inst.budget,
                             inst.codebook, 0, cfg)
    d2, t2 = optimize_design(inst.channels, inst.f_matrix, inst.budget,
                             inst.codebook, 0, cfg)
    assert np.array_equal(d1.p_s, d2.p_s)
    assert np.array_equal(d1.theta1, d2.theta1)
    assert np.array_equal(t1.r_oam_series(), t2.r_oam_series())
