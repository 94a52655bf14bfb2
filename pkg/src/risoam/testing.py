"""Helpers shared by the test suite and the validate command: random desk-scale
instances with well-conditioned channels, and finite-difference gradient checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .oam import OamCodebook, RisState, TransmitState, enumerate_sn_pairs, idft_matrix
from .optimizer import LinkBudget


@dataclass(frozen=True)
class Instance:
    channels: ChannelSet
    f_matrix: np.ndarray
    codebook: OamCodebook
    state: TransmitState
    ris: RisState
    budget: LinkBudget


def _cn(rng: np.random.Generator, shape, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_channels(rng: np.random.Generator, n_modes: int, n_eve: int, q1: int, q2: int,
                    blocked_ris1_eve: bool = False) -> ChannelSet:
    return ChannelSet(
        h_ar1=_cn(rng, (q1, n_modes), 1.0 / np.sqrt(q1)),
        h_r1r2=_cn(rng, (q2, q1), 1.0 / np.sqrt(q2)),
        h_r2b=_cn(rng, (n_modes, q2), 1.0 / np.sqrt(n_modes)),
        h_ae=_cn(rng, (n_eve, n_modes), 1.0 / np.sqrt(n_eve)),
        h_r1e=None if blocked_ris1_eve else _cn(rng, (n_eve, q1), 1.0 / np.sqrt(n_eve)),
    )


def random_instance(
    seed: int = 0,
    n_modes: int = 8,
    n_eve: int = 8,
    q1: int = 12,
    q2: int = 12,
    n_low: int = 4,
    n_signal: int = 3,
    n_an: int = 3,
    rho: float = 0.9,
    sigma_b_sq: float = 0.05,
    sigma_e_sq: float = 0.05,
    sigma_r2_sq: float = 0.01,
) -> Instance:
    """Random, unit-scale instance: Gaussian channels, random phases and gains."""
    rng = np.random.default_rng(seed)
    codebook = enumerate_sn_pairs(n_modes, n_low, n_signal, n_an)
    p_transmit = 1.0
    state = TransmitState(
        p_s=rho * p_transmit / n_signal * rng.uniform(0.5, 1.0, size=n_signal),
        rho=rho,
        p_transmit=p_transmit,
        n_an=n_an,
    )
    ris = RisState(
        theta1=np.exp(2j * np.pi * rng.random(q1)),
        theta2=np.exp(2j * np.pi * rng.random(q2)),
        a=rng.uniform(0.2, 1.0, size=q2),
    )
    budget = LinkBudget(
        p_transmit=p_transmit,
        rho=rho,
        p_ris_limit=0.5,
        a_max=4.0,
        p_floor=1e-4,
        sigma_b_sq=sigma_b_sq,
        sigma_e_sq=sigma_e_sq,
        sigma_r2_sq=sigma_r2_sq,
    )
    return Instance(
        channels=random_channels(rng, n_modes, n_eve, q1, q2),
        f_matrix=idft_matrix(n_modes),
        codebook=codebook,
        state=state,
        ris=ris,
        budget=budget,
    )


def finite_difference_grad(objective, egrad, theta: np.ndarray, step: float = 1e-6) -> float:
    """Relative error between `egrad` and central differences over Re/Im parts.

    The gradient convention is 2 d/d(conj(theta)): the derivative with respect
    to the real (imaginary) part of an entry is the real (imaginary) part of
    the gradient entry.
    """
    analytic = egrad(theta)
    fd = np.zeros_like(analytic)
    for q in range(theta.size):
        bump = np.zeros(theta.size, dtype=complex)
        bump[q] = step
        real_part = (objective(theta + bump) - objective(theta - bump)) / (2 * step)
        bump[q] = 1j * step
        imag_part = (objective(theta + bump) - objective(theta - bump)) / (2 * step)
        fd[q] = real_part + 1j * imag_part
    denom = max(float(np.linalg.norm(analytic)), 1e-300)
    return float(np.linalg.norm(fd - analytic)) / denom
