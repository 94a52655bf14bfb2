"""QPSK bit-error Monte Carlo for Bob and Eve over an optimized design.

The swept axis is the transmit SNR P_T / sigma^2 in dB; each point rescales
both receivers' noise floors. Bob decodes with the mode-domain DFT, the
pre-shared pair index and per-mode scalar equalization (AN is known and
removed); Eve runs a conventional MIMO MMSE equalizer on the composite
antenna-domain channel with no knowledge of the mode structure or index.
For the antenna-stream baseline both ends use MMSE with true covariances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .oam import TransmitState, composite_bob_matrix, composite_eve_matrix
from .optimizer import DesignPoint
from .scenario import Scenario
from .schemes import System, prepare_system


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bob_ber: float
    bob_stderr: float
    eve_ber: float
    eve_stderr: float
    bits: int


BER_COLUMNS = ("snr_db", "bob_ber", "bob_stderr", "eve_ber", "eve_stderr", "bits")


def qpsk_awgn_ber(snr_db: float) -> float:
    """Analytic per-bit QPSK error rate at symbol SNR gamma: Q(sqrt(gamma))."""
    gamma = 10.0 ** (snr_db / 10.0)
    return 0.5 * math.erfc(math.sqrt(gamma / 2.0))


def _qpsk_bits_to_symbols(bits: np.ndarray) -> np.ndarray:
    """Gray-mapped QPSK: bit pair (b0, b1) -> ((1-2b0) + j(1-2b1)) / sqrt(2)."""
    return ((1.0 - 2.0 * bits[..., 0]) + 1j * (1.0 - 2.0 * bits[..., 1])) / np.sqrt(2.0)


def _qpsk_decide(values: np.ndarray) -> np.ndarray:
    return np.stack([(values.real < 0).astype(np.int8),
                     (values.imag < 0).astype(np.int8)], axis=-1)


def _complex_noise(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(
        variance / 2.0
    )


def simulate_awgn_qpsk(snr_db: float, frames: int, seed: int = 0) -> tuple[float, float]:
    """Single-stream QPSK over AWGN; returns (BER, standard error)."""
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(frames, 2))
    x = _qpsk_bits_to_symbols(bits)
    noise = _complex_noise(rng, frames, 10.0 ** (-snr_db / 10.0))
    errors = int(np.sum(_qpsk_decide(x + noise) != bits))
    n_bits = 2 * frames
    ber = errors / n_bits
    return ber, math.sqrt(max(ber * (1 - ber), 1e-300) / n_bits)


def ber_monte_carlo(
    scenario: Scenario,
    design: DesignPoint,
    snr_db_list,
    frames: int,
    seed: int = 0,
    scheme: str = "proposed",
) -> list[BerPoint]:
    """Frame-level BER for Bob and Eve at each transmit SNR point."""
    system = prepare_system(scenario, scheme)
    points = []
    for i, snr_db in enumerate(snr_db_list):
        noise = system.budget.p_transmit / 10.0 ** (snr_db / 10.0)
        budget = replace(system.budget, sigma_b_sq=noise, sigma_e_sq=noise)
        point_system = System(
            channels=system.channels, f_matrix=system.f_matrix,
            codebook=system.codebook, budget=budget, mimo=system.mimo,
        )
        bob_err, eve_err, n_bits = _run_frames(point_system, design, frames,
                                               np.random.default_rng((seed, i)))
        bob = bob_err / n_bits
        eve = eve_err / n_bits
        points.append(
            BerPoint(
                snr_db=float(snr_db),
                bob_ber=bob,
                bob_stderr=math.sqrt(max(bob * (1 - bob), 1e-300) / n_bits),
                eve_ber=eve,
                eve_stderr=math.sqrt(max(eve * (1 - eve), 1e-300) / n_bits),
                bits=n_bits,
            )
        )
    return points


def _run_frames(
    system: System,
    design: DesignPoint,
    frames: int,
    rng: np.random.Generator,
) -> tuple[int, int, int]:
    channels = system.channels
    budget = system.budget
    codebook = system.codebook
    f = system.f_matrix
    ris = design.ris_state()
    state = TransmitState(design.p_s, budget.rho, budget.p_transmit, codebook.n_an)
    n = codebook.n_modes
    n_sig = codebook.n_signal

    t = composite_bob_matrix(channels, ris)
    amp = channels.h_r2b * (np.conj(ris.theta2) * ris.a)[None, :]
    h_eve = composite_eve_matrix(channels, ris)
    t_modes = np.conj(f).T @ t @ f

    if system.mimo:
        pair = codebook.pairs[0]
        d_x = np.zeros(n)
        d_x[list(pair.signal_modes)] = state.p_s
        if pair.an_modes:
            d_x[list(pair.an_modes)] = state.sigma_an_sq
        cov_b = (t * d_x[None, :]) @ np.conj(t).T
        cov_b += budget.sigma_r2_sq * (amp @ np.conj(amp).T)
        cov_b += budget.sigma_b_sq * np.eye(n)
        w_bob = (d_x[:, None] * np.conj(t).T) @ np.linalg.inv(cov_b)
        cov_e = (h_eve * d_x[None, :]) @ np.conj(h_eve).T
        cov_e += budget.sigma_e_sq * np.eye(h_eve.shape[0])
        w_eve = (d_x[:, None] * np.conj(h_eve).T) @ np.linalg.inv(cov_e)
    else:
        # Eve assumes white per-antenna streams: the conventional MIMO reading.
        rx = budget.p_transmit / n
        cov_e = rx * (h_eve @ np.conj(h_eve).T) + budget.sigma_e_sq * np.eye(h_eve.shape[0])
        w_eve = rx * np.conj(h_eve).T @ np.linalg.inv(cov_e)
        w_bob = None

    pair_draws = rng.integers(0, codebook.size, size=frames)
    bob_errors = 0
    eve_errors = 0
    total_bits = 0
    for g in range(codebook.size):
        m = int(np.sum(pair_draws == g))
        if m == 0:
            continue
        pair = codebook.pairs[g]
        sig = list(pair.signal_modes)
        an = list(pair.an_modes)
        bits = rng.integers(0, 2, size=(m, n_sig, 2))
        symbols = _qpsk_bits_to_symbols(bits)
        s = np.zeros((n, m), dtype=complex)
        s[sig, :] = (np.sqrt(state.p_s)[None, :] * symbols).T
        z = np.zeros((n, m), dtype=complex)
        if an:
            z[an, :] = _complex_noise(rng, (len(an), m), state.sigma_an_sq)
        x = f @ (s + z)
        noise_r2 = _complex_noise(rng, (amp.shape[1], m), budget.sigma_r2_sq)
        y_b = t @ x + amp @ noise_r2 + _complex_noise(rng, (n, m), budget.sigma_b_sq)
        y_e = h_eve @ x + _complex_noise(rng, (h_eve.shape[0], m), budget.sigma_e_sq)

        if system.mimo:
            est_bob = (w_bob @ y_b)[sig, :]
        else:
            decomposed = np.conj(f).T @ y_b
            cleaned = decomposed[sig, :] - t_modes[np.ix_(sig, an)] @ z[an, :] if an else decomposed[sig, :]
            est_bob = cleaned / np.diag(t_modes[np.ix_(sig, sig)])[:, None]
        est_eve = (w_eve @ y_e)[sig, :]

        bob_errors += int(np.sum(_qpsk_decide(est_bob.T) != bits))
        eve_errors += int(np.sum(_qpsk_decide(est_eve.T) != bits))
        total_bits += 2 * n_sig * m
    return bob_errors, eve_errors, total_bits
