import numpy as np
import pytest

from risoam.channel import ChannelSet
from risoam.oam import (
    ConfigurationError,
    RisState,
    TransmitState,
    assemble_transmit,
    composite_bob_matrix,
    composite_eve_matrix,
    effective_channel_bob,
    effective_channel_eve,
    enumerate_sn_pairs,
    idft_matrix,
    index_mutual_info_mc,
    rate_report,
    ris2_radiated_power,
    simulate_reception,
    sinr_bob,
    sinr_eve,
    zc_weights,
)
from risoam.testing import random_instance


# ---------------------------------------------------------------- IDFT


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_idft_unitary(n):
    f = idft_matrix(n, initial_azimuth=0.37)
    assert np.max(np.abs(np.conj(f).T @ f - np.eye(n))) < 1e-12


def test_idft_smallest_case():
    f = idft_matrix(2)
    root = 1 / np.sqrt(2)
    assert np.allclose(f[:, 0], [root, root])
    assert np.allclose(f[:, 1], [root, -root])


def test_idft_diagonalizes_circulant():
    rng = np.random.default_rng(0)
    n = 4
    first_col = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    circ = np.empty((n, n), dtype=complex)
    for m in range(n):
        for k in range(n):
            circ[m, k] = first_col[(m - k) % n]
    f = idft_matrix(n)
    d = np.conj(f).T @ circ @ f
    eigenvalues = np.fft.fft(first_col)
    assert np.max(np.abs(d - np.diag(eigenvalues))) < 1e-10


# ---------------------------------------------------------------- codebook


def test_codebook_baseline_partition():
    codebook = enumerate_sn_pairs(8, 4, 3, 3)
    assert codebook.size == 8  # C(3,2) * C(4,3) = 12 -> 2^floor(log2 12) = 8
    assert codebook.index_bits == 3.0
    assert len(set(codebook.pairs)) == 8
    for pair in codebook.pairs:
        assert 0 in pair.signal_modes
        assert len(pair.signal_modes) == 3
        assert all(m < 4 for m in pair.signal_modes)
        assert len(pair.an_modes) == 3
        assert all(4 <= m < 8 for m in pair.an_modes)


def test_codebook_forced_single_pair():
    codebook = enumerate_sn_pairs(8, 4, 4, 4)
    assert codebook.size == 1
    assert codebook.pairs[0].signal_modes == (0, 1, 2, 3)
    assert codebook.pairs[0].an_modes == (4, 5, 6, 7)


def test_codebook_small_case():
    codebook = enumerate_sn_pairs(4, 2, 1, 1)
    assert codebook.size == 2  # C(1,0) * C(2,1) = 2
    assert codebook.pairs[0].signal_modes == (0,)
    assert {p.an_modes for p in codebook.pairs} == {(2,), (3,)}


def test_codebook_lexicographic_order():
    codebook = enumerate_sn_pairs(8, 4, 3, 3)
    signal_rank = [p.signal_modes for p in codebook.pairs]
    assert signal_rank == sorted(signal_rank)


def test_codebook_infeasible_counts():
    with pytest.raises(ConfigurationError):
        enumerate_sn_pairs(8, 4, 5, 3)
    with pytest.raises(ConfigurationError):
        enumerate_sn_pairs(8, 4, 3, 5)


# ---------------------------------------------------------------- transmit


def test_transmit_state_an_power_split():
    state = TransmitState(p_s=[0.1, 0.2], rho=0.6, p_transmit=2.0, n_an=4)
    assert abs(state.sigma_an_sq - 0.4 * 2.0 / 4) < 1e-12
    no_an = TransmitState(p_s=[0.1], rho=1.0, p_transmit=1.0, n_an=0)
    assert no_an.sigma_an_sq == 0.0


def test_transmit_state_rejects_overbudget():
    with pytest.raises(ValueError):
        TransmitState(p_s=[1.0, 1.0], rho=0.5, p_transmit=1.0, n_an=1)


def test_assemble_transmit_zero_powers():
    codebook = enumerate_sn_pairs(8, 4, 3, 3)
    f = idft_matrix(8)
    state = TransmitState(p_s=np.zeros(3), rho=0.9, p_transmit=1.0, n_an=3)
    x = assemble_transmit(codebook, 0, np.ones(3), np.zeros(3), state, f)
    assert np.allclose(x, 0)


def test_assemble_transmit_unit_selection():
    codebook = enumerate_sn_pairs(8, 1, 1, 0)
    f = idft_matrix(8, initial_azimuth=0.2)
    state = TransmitState(p_s=[1.0], rho=1.0, p_transmit=1.0, n_an=0)
    x = assemble_transmit(codebook, 0, np.array([1.0]), np.array([]), state, f)
    assert np.allclose(x, f[:, 0])


def test_assemble_transmit_matches_elementwise_oracle():
    rng = np.random.default_rng(2)
    codebook = enumerate_sn_pairs(8, 4, 3, 3)
    pair = codebook.pairs[5]
    f = idft_matrix(8)
    p = rng.uniform(0.1, 0.3, size=3)
    state = TransmitState(p_s=p, rho=0.9, p_transmit=1.0, n_an=3)
    symbols = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    an = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    x = assemble_transmit(codebook, 5, symbols, an, state, f)
    expected = np.zeros(8, dtype=complex)
    for n in range(8):
        for idx, mode in enumerate(pair.signal_modes):
            expected[n] += f[n, mode] * np.sqrt(p[idx]) * symbols[idx]
        for idx, mode in enumerate(pair.an_modes):
            expected[n] += f[n, mode] * an[idx]
    assert np.max(np.abs(x - expected)) < 1e-12


def test_assemble_transmit_index_out_of_range():
    codebook = enumerate_sn_pairs(4, 2, 1, 1)
    f = idft_matrix(4)
    state = TransmitState(p_s=[0.1], rho=0.9, p_transmit=1.0, n_an=1)
    with pytest.raises(IndexError):
        assemble_transmit(codebook, 2, np.ones(1), np.ones(1), state, f)


# ---------------------------------------------------------------- RIS2 power


def test_ris2_power_zero_gains():
    inst = random_instance(seed=1)
    ris = RisState(inst.ris.theta1, inst.ris.theta2, np.zeros_like(inst.ris.a))
    power = ris2_radiated_power(inst.channels, ris, inst.state, inst.codebook, 0,
                                inst.f_matrix, inst.budget.sigma_r2_sq)
    assert power == 0.0


def test_ris2_power_noise_only_term():
    inst = random_instance(seed=2)
    state = TransmitState(np.zeros(3), rho=1.0, p_transmit=1.0, n_an=3)
    power = ris2_radiated_power(inst.channels, inst.ris, state, inst.codebook, 0,
                                inst.f_matrix, sigma_r2_sq=0.07)
    assert abs(power - 0.07 * np.sum(inst.ris.a**2)) < 1e-12


def test_ris2_power_matches_monte_carlo():
    inst = random_instance(seed=3, n_modes=4, n_eve=4, q1=6, q2=6,
                           n_low=2, n_signal=2, n_an=2)
    sigma_r2_sq = inst.budget.sigma_r2_sq
    analytic = ris2_radiated_power(inst.channels, inst.ris, inst.state, inst.codebook,
                                   0, inst.f_matrix, sigma_r2_sq)
    pair = inst.codebook.pairs[0]
    h_r2 = inst.channels.h_r1r2 @ (np.conj(inst.ris.theta1)[:, None] * inst.channels.h_ar1)
    rng = np.random.default_rng(99)
    draws = 100_000
    n = inst.codebook.n_modes

    def cn(shape, var):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(var / 2)

    s = np.zeros((n, draws), dtype=complex)
    for idx, mode in enumerate(pair.signal_modes):
        s[mode] = cn(draws, inst.state.p_s[idx])
    for mode in pair.an_modes:
        s[mode] += cn(draws, inst.state.sigma_an_sq)
    x_r2 = h_r2 @ (inst.f_matrix @ s) + cn((h_r2.shape[0], draws), sigma_r2_sq)
    samples = np.sum(np.abs(inst.ris.a[:, None] * x_r2) ** 2, axis=0)
    stderr = samples.std(ddof=1) / np.sqrt(draws)
    assert abs(samples.mean() - analytic) < 3 * stderr


# ---------------------------------------------------------------- effective channels


def _identity_channels(n):
    eye = np.eye(n, dtype=complex)
    return ChannelSet(h_ar1=eye, h_r1r2=eye, h_r2b=eye, h_ae=eye, h_r1e=None)


def test_effective_bob_identity_chain_is_orthonormal():
    n = 8
    channels = _identity_channels(n)
    ris = RisState(np.ones(n), np.ones(n), np.ones(n))
    f = idft_matrix(n)
    h_b, _ = effective_channel_bob(channels, ris, f, [0, 1, 2])
    assert np.max(np.abs(h_b - np.eye(3))) < 1e-12


def test_effective_bob_conjugate_covariance():
    inst = random_instance(seed=4)
    pair = inst.codebook.pairs[0]
    h_b, _ = effective_channel_bob(inst.channels, inst.ris, inst.f_matrix,
                                   pair.signal_modes)
    conj_channels = ChannelSet(
        h_ar1=np.conj(inst.channels.h_ar1),
        h_r1r2=np.conj(inst.channels.h_r1r2),
        h_r2b=np.conj(inst.channels.h_r2b),
        h_ae=np.conj(inst.channels.h_ae),
        h_r1e=np.conj(inst.channels.h_r1e),
    )
    conj_ris = RisState(np.conj(inst.ris.theta1), np.conj(inst.ris.theta2), inst.ris.a)
    h_b_conj, _ = effective_channel_bob(conj_channels, conj_ris,
                                        np.conj(inst.f_matrix), pair.signal_modes)
    assert np.max(np.abs(h_b_conj - np.conj(h_b))) < 1e-12


def test_effective_bob_matches_matrix_chain_oracle():
    inst = random_instance(seed=5)
    pair = inst.codebook.pairs[0]
    sig = list(pair.signal_modes)
    h_b, rows = effective_channel_bob(inst.channels, inst.ris, inst.f_matrix, sig)
    theta1 = np.diag(np.conj(inst.ris.theta1))
    theta2 = np.diag(np.conj(inst.ris.theta2))
    chain = (inst.channels.h_r2b @ theta2 @ np.diag(inst.ris.a)
             @ inst.channels.h_r1r2 @ theta1 @ inst.channels.h_ar1)
    for i, l in enumerate(sig):
        expected_row = np.conj(inst.f_matrix[:, l]) @ inst.channels.h_r2b @ theta2
        assert np.max(np.abs(rows[i] - expected_row)) < 1e-12
        for j, k in enumerate(sig):
            expected = np.conj(inst.f_matrix[:, l]) @ chain @ inst.f_matrix[:, k]
            assert abs(h_b[i, j] - expected) < 1e-12


def test_effective_eve_requires_enough_elements():
    inst = random_instance(seed=6, n_eve=2)
    with pytest.raises(ConfigurationError):
        effective_channel_eve(inst.channels, inst.ris, inst.f_matrix, [0, 3], [4])


# ---------------------------------------------------------------- SINRs


def test_sinr_bob_interference_free():
    h_b = np.array([[2.0 + 0j]])
    rows = np.zeros((1, 4), dtype=complex)
    gamma = sinr_bob(h_b, rows, np.ones(4), np.array([0.5]), 0.0, 0.25)
    assert abs(gamma[0] - 0.5 * 4.0 / 0.25) < 1e-12


def test_sinr_bob_zero_power_mode():
    inst = random_instance(seed=7)
    pair = inst.codebook.pairs[0]
    h_b, rows = effective_channel_bob(inst.channels, inst.ris, inst.f_matrix,
                                      pair.signal_modes)
    p = inst.state.p_s.copy()
    p[1] = 0.0
    gamma = sinr_bob(h_b, rows, inst.ris.a, p, inst.budget.sigma_r2_sq,
                     inst.budget.sigma_b_sq)
    assert gamma[1] == 0.0
    assert np.all(gamma >= 0)


def test_sinr_bob_matches_direct_formula():
    inst = random_instance(seed=8)
    pair = inst.codebook.pairs[0]
    sig = list(pair.signal_modes)
    h_b, rows = effective_channel_bob(inst.channels, inst.ris, inst.f_matrix, sig)
    p = inst.state.p_s
    gamma = sinr_bob(h_b, rows, inst.ris.a, p, inst.budget.sigma_r2_sq,
                     inst.budget.sigma_b_sq)
    for i in range(len(sig)):
        interference = sum(p[j] * abs(h_b[i, j]) ** 2 for j in range(len(sig)) if j != i)
        noise_gain = sum(abs(rows[i, q]) ** 2 * inst.ris.a[q] ** 2
                         for q in range(inst.ris.a.size))
        expected = p[i] * abs(h_b[i, i]) ** 2 / (
            interference + inst.budget.sigma_r2_sq * noise_gain + inst.budget.sigma_b_sq
        )
        assert abs(gamma[i] - expected) < 1e-12 * max(1.0, expected)


def test_sinr_bob_scale_consistency():
    inst = random_instance(seed=9)
    pair = inst.codebook.pairs[0]
    sig = list(pair.signal_modes)
    h_b, rows = effective_channel_bob(inst.channels, inst.ris, inst.f_matrix, sig)
    p = inst.state.p_s
    base = sinr_bob(h_b, rows, inst.ris.a, p, 0.0, inst.budget.sigma_b_sq)
    scaled = sinr_bob(3.0 * h_b, rows, inst.ris.a, p, 0.0, 9.0 * inst.budget.sigma_b_sq)
    assert np.max(np.abs(scaled - base) / base) < 1e-12


def test_sinr_eve_silent_eavesdropper():
    inst = random_instance(seed=10)
    channels = ChannelSet(
        h_ar1=inst.channels.h_ar1,
        h_r1r2=inst.channels.h_r1r2,
        h_r2b=inst.channels.h_r2b,
        h_ae=np.zeros_like(inst.channels.h_ae),
        h_r1e=None,
    )
    gamma = sinr_eve(channels, inst.ris, inst.state, inst.codebook, 0,
                     inst.f_matrix, inst.budget.sigma_e_sq)
    assert np.all(gamma == 0)


def test_sinr_eve_monotone_in_an_power():
    inst = random_instance(seed=11)
    p = inst.state.p_s * 0.2
    previous = None
    for rho in (0.9, 0.5, 0.2):
        state = TransmitState(p, rho, inst.state.p_transmit, inst.codebook.n_an)
        gamma = sinr_eve(inst.channels, inst.ris, state, inst.codebook, 0,
                         inst.f_matrix, inst.budget.sigma_e_sq)
        if previous is not None:
            assert np.all(gamma < previous)
        previous = gamma


def test_sinr_eve_matches_direct_formula():
    inst = random_instance(seed=12)
    pair = inst.codebook.pairs[0]
    sig = list(pair.signal_modes)
    an = list(pair.an_modes)
    gamma = sinr_eve(inst.channels, inst.ris, inst.state, inst.codebook, 0,
                     inst.f_matrix, inst.budget.sigma_e_sq)
    composite = (inst.channels.h_ae
                 + inst.channels.h_r1e @ np.diag(np.conj(inst.ris.theta1))
                 @ inst.channels.h_ar1)
    p = inst.state.p_s
    for i, l in enumerate(sig):
        h_row = composite[l]
        h_ll = h_row @ inst.f_matrix[:, l]
        interference = sum(p[j] * abs(h_row @ inst.f_matrix[:, k]) ** 2
                           for j, k in enumerate(sig) if k != l)
        an_term = inst.state.sigma_an_sq * sum(
            abs(h_row @ inst.f_matrix[:, z]) ** 2 for z in an
        )
        expected = p[i] * abs(h_ll) ** 2 / (
            interference + an_term + inst.budget.sigma_e_sq
        )
        assert abs(gamma[i] - expected) < 1e-12 * max(1.0, expected)


# ---------------------------------------------------------------- rates


def test_rate_report_identities():
    inst = random_instance(seed=13)
    report = rate_report(inst.channels, inst.ris, inst.state, inst.codebook, 0,
                         inst.f_matrix, inst.budget.sigma_b_sq,
                         inst.budget.sigma_e_sq, inst.budget.sigma_r2_sq)
    assert abs(report.c_b - report.r_b - inst.codebook.index_bits) < 1e-12
    assert abs(report.r_oam - (report.c_b - report.r_e)) < 1e-12
    assert np.all(report.gamma_b >= 0)
    assert np.all(report.gamma_e >= 0)


def test_rate_report_zero_eve_channels():
    inst = random_instance(seed=14)
    channels = ChannelSet(
        h_ar1=inst.channels.h_ar1, h_r1r2=inst.channels.h_r1r2,
        h_r2b=inst.channels.h_r2b, h_ae=np.zeros_like(inst.channels.h_ae),
        h_r1e=None,
    )
    report = rate_report(channels, inst.ris, inst.state, inst.codebook, 0,
                         inst.f_matrix, inst.budget.sigma_b_sq,
                         inst.budget.sigma_e_sq, inst.budget.sigma_r2_sq)
    assert report.r_e == 0.0
    assert abs(report.r_oam - report.c_b) < 1e-12


def test_rate_report_single_pair_drops_index_bits():
    inst = random_instance(seed=15, n_low=4, n_signal=4, n_an=4)
    assert inst.codebook.size == 1
    report = rate_report(inst.channels, inst.ris, inst.state, inst.codebook, 0,
                         inst.f_matrix, inst.budget.sigma_b_sq,
                         inst.budget.sigma_e_sq, inst.budget.sigma_r2_sq)
    assert report.c_b == report.r_b


def test_rate_report_cross_checked_per_term():
    inst = random_instance(seed=16)
    report = rate_report(inst.channels, inst.ris, inst.state, inst.codebook, 0,
                         inst.f_matrix, inst.budget.sigma_b_sq,
                         inst.budget.sigma_e_sq, inst.budget.sigma_r2_sq)
    assert abs(report.r_b - sum(np.log2(1 + g) for g in report.gamma_b)) < 1e-12
    assert abs(report.r_e - sum(np.log2(1 + g) for g in report.gamma_e)) < 1e-12


# ---------------------------------------------------------------- reception


def _aligned_circulant_channels(n):
    from risoam.channel import los_channel
    from risoam.geometry import UcaSpec, uca_element_positions

    eye = np.eye(n, dtype=complex)
    a = uca_element_positions(UcaSpec(center=(0, 0, 0), radius=0.5, count=n))
    b = uca_element_positions(UcaSpec(center=(0, 0, 5.0), radius=0.5, count=n))
    h = los_channel(a, b, 1.0, 0.02)
    return ChannelSet(h_ar1=eye, h_r1r2=eye, h_r2b=h, h_ae=eye, h_r1e=None)


def test_reception_supported_on_signal_modes_in_aligned_chain():
    n = 8
    codebook = enumerate_sn_pairs(n, 4, 3, 3)
    channels = _aligned_circulant_channels(n)
    ris = RisState(np.ones(n), np.ones(n), np.ones(n))
    f = idft_matrix(n)
    state = TransmitState(p_s=np.full(3, 0.2), rho=0.9, p_transmit=1.0, n_an=3)
    x = assemble_transmit(codebook, 2, np.ones(3), np.zeros(3), state, f)
    zeros = np.zeros(n, dtype=complex)
    _, _, decomposed = simulate_reception(channels, ris, x, zeros, zeros, zeros, f)
    active = np.abs(decomposed) > 1e-9 * np.abs(decomposed).max()
    assert set(np.nonzero(active)[0]) == set(codebook.pairs[2].signal_modes)


def test_reception_additive_in_transmit_vector():
    inst = random_instance(seed=17)
    rng = np.random.default_rng(3)
    n = inst.codebook.n_modes
    q2 = inst.ris.a.size
    n_e = inst.channels.h_ae.shape[0]
    x1 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x2 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    noise = (np.zeros(q2, complex), np.zeros(n, complex), np.zeros(n_e, complex))
    y1 = simulate_reception(inst.channels, inst.ris, x1, *noise, inst.f_matrix)
    y2 = simulate_reception(inst.channels, inst.ris, x2, *noise, inst.f_matrix)
    y12 = simulate_reception(inst.channels, inst.ris, x1 + x2, *noise, inst.f_matrix)
    for a, b, c in zip(y1, y2, y12):
        assert np.max(np.abs(a + b - c)) < 1e-12


def test_reception_matches_term_by_term_oracle():
    inst = random_instance(seed=18)
    rng = np.random.default_rng(4)
    n = inst.codebook.n_modes
    q2 = inst.ris.a.size
    n_e = inst.channels.h_ae.shape[0]
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    n_r2 = rng.standard_normal(q2) + 1j * rng.standard_normal(q2)
    n_b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    n_ev = rng.standard_normal(n_e) + 1j * rng.standard_normal(n_e)
    y_b, y_e, decomposed = simulate_reception(inst.channels, inst.ris, x, n_r2, n_b,
                                              n_ev, inst.f_matrix)
    theta1 = np.diag(np.conj(inst.ris.theta1))
    theta2 = np.diag(np.conj(inst.ris.theta2))
    amp = np.diag(inst.ris.a)
    chain = inst.channels.h_r2b @ theta2 @ amp @ inst.channels.h_r1r2 @ theta1 @ inst.channels.h_ar1
    expected_b = chain @ x + inst.channels.h_r2b @ theta2 @ amp @ n_r2 + n_b
    expected_e = (inst.channels.h_ae + inst.channels.h_r1e @ theta1 @ inst.channels.h_ar1) @ x + n_ev
    assert np.max(np.abs(y_b - expected_b)) < 1e-12
    assert np.max(np.abs(y_e - expected_e)) < 1e-12
    assert np.max(np.abs(decomposed - np.conj(inst.f_matrix).T @ expected_b)) < 1e-12


def test_composite_matrices_consistent_with_reception():
    inst = random_instance(seed=19)
    n = inst.codebook.n_modes
    x = np.eye(n, dtype=complex)[:, 0]
    zeros = (np.zeros(inst.ris.a.size, complex), np.zeros(n, complex),
             np.zeros(inst.channels.h_ae.shape[0], complex))
    y_b, y_e, _ = simulate_reception(inst.channels, inst.ris, x, *zeros, inst.f_matrix)
    assert np.allclose(y_b, composite_bob_matrix(inst.channels, inst.ris)[:, 0])
    assert np.allclose(y_e, composite_eve_matrix(inst.channels, inst.ris)[:, 0])


# ---------------------------------------------------------------- ZC weights


def test_zc_unit_modulus():
    w = zc_weights(8, 3)
    assert np.max(np.abs(np.abs(w) - 1)) < 1e-12


def test_zc_precoder_stays_unitary():
    w = zc_weights(8, 1)
    f = idft_matrix(8)
    m = np.diag(w) @ f
    assert np.max(np.abs(np.conj(m).T @ m - np.eye(8))) < 1e-12


def test_zc_hand_phases_n4():
    w = zc_weights(4, 1)
    expected = np.exp(1j * np.pi * np.array([0.0, 1.0, 4.0, 9.0]) / 4.0)
    assert np.max(np.abs(w - expected)) < 1e-12


def test_zc_rejects_odd_length():
    with pytest.raises(ValueError):
        zc_weights(5, 1)
    with pytest.raises(ValueError):
        zc_weights(8, 8)


# ---------------------------------------------------------------- index MI


def test_index_mi_single_pair_is_zero():
    inst = random_instance(seed=20, n_modes=4, n_eve=4, q1=6, q2=6,
                           n_low=2, n_signal=2, n_an=2)
    assert inst.codebook.size == 1
    est, stderr = index_mutual_info_mc(inst.channels, inst.ris, inst.state,
                                       inst.codebook, inst.f_matrix,
                                       inst.budget.sigma_b_sq,
                                       inst.budget.sigma_r2_sq, 1000, seed=0)
    assert est == 0.0 and stderr == 0.0


def test_index_mi_identical_components_is_zero():
    inst = random_instance(seed=21, n_modes=4, n_eve=4, q1=6, q2=6,
                           n_low=2, n_signal=1, n_an=1)
    assert inst.codebook.size == 2
    channels = ChannelSet(
        h_ar1=inst.channels.h_ar1, h_r1r2=inst.channels.h_r1r2,
        h_r2b=np.zeros_like(inst.channels.h_r2b), h_ae=inst.channels.h_ae,
        h_r1e=inst.channels.h_r1e,
    )
    est, _ = index_mutual_info_mc(channels, inst.ris, inst.state, inst.codebook,
                                  inst.f_matrix, inst.budget.sigma_b_sq,
                                  inst.budget.sigma_r2_sq, 2000, seed=1)
    assert abs(est) < 1e-12


def test_index_mi_bounded_by_log_g():
    for seed in range(5):
        inst = random_instance(seed=seed, n_modes=4, n_eve=4, q1=6, q2=6,
                               n_low=2, n_signal=1, n_an=1)
        est, stderr = index_mutual_info_mc(inst.channels, inst.ris, inst.state,
                                           inst.codebook, inst.f_matrix,
                                           inst.budget.sigma_b_sq,
                                           inst.budget.sigma_r2_sq, 10_000, seed=seed)
        assert est <= inst.codebook.index_bits + 3 * stderr
        assert est > -3 * stderr  # mutual information is nonnegative


def test_index_mi_singular_covariance_reports_regularization():
    inst = random_instance(seed=23, n_modes=4, n_eve=4, q1=6, q2=6,
                           n_low=2, n_signal=1, n_an=1)
    channels = ChannelSet(
        h_ar1=inst.channels.h_ar1, h_r1r2=inst.channels.h_r1r2,
        h_r2b=np.zeros_like(inst.channels.h_r2b), h_ae=inst.channels.h_ae,
        h_r1e=inst.channels.h_r1e,
    )
    with pytest.raises(RuntimeError, match="regulariz"):
        index_mutual_info_mc(channels, inst.ris, inst.state, inst.codebook,
                             inst.f_matrix, 0.0, 0.0, 1000, seed=0)


def test_index_mi_matches_entropy_form_estimator():
    """Independent oracle: I = h(mixture) - mean component entropy, where the
    component entropies are closed-form and only h(mixture) is sampled."""
    inst = random_instance(seed=42, n_modes=4, n_eve=4, q1=6, q2=6,
                           n_low=2, n_signal=1, n_an=1)
    est, stderr = index_mutual_info_mc(inst.channels, inst.ris, inst.state,
                                       inst.codebook, inst.f_matrix,
                                       inst.budget.sigma_b_sq,
                                       inst.budget.sigma_r2_sq, 40_000, seed=0)

    n = inst.codebook.n_modes
    f = inst.f_matrix
    t = composite_bob_matrix(inst.channels, inst.ris)
    w = np.conj(f).T @ t @ f
    b = (np.conj(f).T @ inst.channels.h_r2b) * (np.conj(inst.ris.theta2) * inst.ris.a)[None, :]
    cov_noise = inst.budget.sigma_r2_sq * (b @ np.conj(b).T)
    cov_noise += inst.budget.sigma_b_sq * np.eye(n)
    covs = []
    for pair in inst.codebook.pairs:
        d = np.zeros(n)
        d[list(pair.signal_modes)] = inst.state.p_s
        if pair.an_modes:
            d[list(pair.an_modes)] = inst.state.sigma_an_sq
        cov = w @ (d[:, None] * np.conj(w).T) + cov_noise
        covs.append(0.5 * (cov + np.conj(cov).T))
    chols = [np.linalg.cholesky(c) for c in covs]
    invs = [np.linalg.inv(c) for c in covs]
    logdets = [np.linalg.slogdet(c)[1] for c in covs]

    rng = np.random.default_rng(7)
    draws = 40_000
    g_pick = rng.integers(0, len(covs), size=draws)
    xi = (rng.standard_normal((n, draws)) + 1j * rng.standard_normal((n, draws))) / np.sqrt(2)
    y = np.empty((n, draws), dtype=complex)
    for g in range(len(covs)):
        mask = g_pick == g
        y[:, mask] = chols[g] @ xi[:, mask]
    log_f = np.stack([
        -np.real(np.einsum("nm,nk,km->m", np.conj(y), invs[g], y))
        - logdets[g] - n * np.log(np.pi)
        for g in range(len(covs))
    ])
    log_mix = np.logaddexp.reduce(log_f, axis=0) - np.log(len(covs))
    # h(mixture) sampled; component entropies are log det(pi e Sigma_g)
    h_mix_samples = -log_mix / np.log(2.0)
    h_components = np.mean([(ld + n * np.log(np.pi) + n) / np.log(2.0) for ld in logdets])
    oracle = h_mix_samples.mean() - h_components
    oracle_se = h_mix_samples.std(ddof=1) / np.sqrt(draws)
    assert abs(est - oracle) < 3 * (stderr + oracle_se)
