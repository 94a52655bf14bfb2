"""Line-of-sight near-field channels with free-space magnitude and spherical phase."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SingularDistanceError(ValueError):
    """A transmit and receive element coincide, so the path loss diverges."""


@dataclass(frozen=True)
class LinkParams:
    """Carrier wavelength and per-link attenuation factors."""

    wavelength: float
    beta_ar1: float = 1.0
    beta_r1r2: float = 1.0
    beta_r2b: float = 1.0
    beta_ae: float = 1.0
    beta_r1e: float = 1.0

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        for name in ("beta_ar1", "beta_r1r2", "beta_r2b", "beta_ae", "beta_r1e"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class ChannelSet:
    """The five LoS matrices of the double-RIS link.

    Shapes: h_ar1 (Q1, N), h_r1r2 (Q2, Q1), h_r2b (N, Q2), h_ae (N_E, N),
    h_r1e (N_E, Q1). A blocked link carries None instead of a zero matrix.
    """

    h_ar1: np.ndarray
    h_r1r2: np.ndarray
    h_r2b: np.ndarray
    h_ae: np.ndarray
    h_r1e: np.ndarray | None


def los_channel(
    tx_positions: np.ndarray,
    rx_positions: np.ndarray,
    beta: float,
    wavelength: float,
) -> np.ndarray:
    """(rx, tx) matrix with entries (lambda*beta / 4 pi d) exp(-j 2 pi d / lambda)."""
    tx = np.atleast_2d(np.asarray(tx_positions, dtype=float))
    rx = np.atleast_2d(np.asarray(rx_positions, dtype=float))
    d = np.linalg.norm(rx[:, None, :] - tx[None, :, :], axis=-1)
    if np.any(d <= 0):
        r, t = np.argwhere(d <= 0)[0]
        raise SingularDistanceError(
            f"rx element {r} and tx element {t} coincide (distance 0)"
        )
    return (wavelength * beta / (4.0 * np.pi * d)) * np.exp(-2j * np.pi * d / wavelength)


def build_channel_set(scenario) -> ChannelSet:
    """Assemble all five link matrices from a scenario's element positions.

    The RIS2 -> Eve path is absent by construction: Eve only sees the direct
    link and the RIS1 reflection.
    """
    link = scenario.link
    lam = link.wavelength
    u_a = scenario.alice_positions()
    u_b = scenario.bob_positions()
    u_e = scenario.eve_positions()
    u_r1 = scenario.ris1_positions()
    u_r2 = scenario.ris2_positions()
    return ChannelSet(
        h_ar1=los_channel(u_a, u_r1, link.beta_ar1, lam),
        h_r1r2=los_channel(u_r1, u_r2, link.beta_r1r2, lam),
        h_r2b=los_channel(u_r2, u_b, link.beta_r2b, lam),
        h_ae=los_channel(u_a, u_e, link.beta_ae, lam),
        h_r1e=los_channel(u_r1, u_e, link.beta_r1e, lam),
    )
