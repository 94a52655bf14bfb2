"""Scheme wiring: the proposed optimizer plus the comparison baselines."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .channel import ChannelSet, build_channel_set, los_channel
from .geometry import RisSpec, ris_element_positions
from .oam import (
    OamCodebook,
    RateReport,
    TransmitState,
    composite_bob_matrix,
    composite_eve_matrix,
    enumerate_sn_pairs,
    rate_report,
    ris2_radiated_power,
    zc_weights,
)
from .optimizer import AoConfig, AoTrace, DesignPoint, LinkBudget, optimize_design
from .scenario import Scenario

SCHEME_IDS = (
    "proposed",
    "pa-ris-oam-no-an",
    "pa-ris-oam-random-phase",
    "dp-ris-oam",
    "sa-ris-oam",
    "sp-ris-oam",
    "pa-ris-oam-zc",
    "pa-ris-mimo",
)


class UnknownSchemeError(ValueError):
    pass


@dataclass(frozen=True)
class System:
    """Everything a scheme's optimization and simulation runs on."""

    channels: ChannelSet
    f_matrix: np.ndarray
    codebook: OamCodebook
    budget: LinkBudget
    mimo: bool


@dataclass(frozen=True)
class ResultRecord:
    scheme: str
    parameter: str
    value: float
    seed: int
    r_oam: float
    r_b: float
    r_e: float
    c_b: float
    iterations: int
    wall_time: float


def _single_ris_spec(scenario: Scenario) -> RisSpec:
    total = scenario.ris1.count + scenario.ris2.count
    base = scenario.ris2
    cy = base.count_y if total % base.count_y == 0 else (2 if total % 2 == 0 else 1)
    return replace(base, count_y=cy, count_z=total // cy)


def _single_ris_channels(scenario: Scenario) -> ChannelSet:
    """Collapse to one surface at the RIS2 site; Eve keeps only the direct link."""
    spec = _single_ris_spec(scenario)
    positions = ris_element_positions(spec)
    lam = scenario.link.wavelength
    h_ar = los_channel(scenario.alice_positions(), positions, scenario.link.beta_ar1, lam)
    h_rb = los_channel(positions, scenario.bob_positions(), scenario.link.beta_r2b, lam)
    h_ae = los_channel(scenario.alice_positions(), scenario.eve_positions(),
                       scenario.link.beta_ae, lam)
    q = positions.shape[0]
    return ChannelSet(
        h_ar1=h_ar,
        h_r1r2=np.eye(q, dtype=complex),
        h_r2b=h_rb,
        h_ae=h_ae,
        h_r1e=None,
    )


def _passive_budget(scenario: Scenario) -> LinkBudget:
    """Passive surfaces: no radiated-power budget, full total power transmitted."""
    budget = scenario.link_budget()
    return replace(budget, p_transmit=scenario.p_total, p_ris_limit=math.inf)


def prepare_system(scenario: Scenario, scheme: str, zc_u: int = 1) -> System:
    if scheme not in SCHEME_IDS:
        raise UnknownSchemeError(f"unknown scheme '{scheme}'; expected one of {SCHEME_IDS}")
    n = scenario.n_modes
    codebook = scenario.codebook()
    f_matrix = scenario.f_matrix()
    channels = None
    budget = scenario.link_budget()
    mimo = False

    if scheme == "pa-ris-oam-no-an":
        codebook = enumerate_sn_pairs(n, scenario.n_low, scenario.n_low, 0)
        budget = replace(budget, rho=1.0)
    elif scheme in ("dp-ris-oam", "sp-ris-oam"):
        budget = _passive_budget(scenario)
    if scheme in ("sa-ris-oam", "sp-ris-oam"):
        channels = _single_ris_channels(scenario)
    if scheme == "pa-ris-oam-zc":
        weights = zc_weights(n, zc_u)
        base = build_channel_set(scenario)
        channels = ChannelSet(
            h_ar1=base.h_ar1 * weights[None, :],
            h_r1r2=base.h_r1r2,
            h_r2b=base.h_r2b,
            h_ae=base.h_ae * weights[None, :],
            h_r1e=base.h_r1e,
        )
    if scheme == "pa-ris-mimo":
        f_matrix = np.eye(n, dtype=complex)
        codebook = enumerate_sn_pairs(n, scenario.n_low, scenario.n_low, n - scenario.n_low)
        mimo = True
    if channels is None:
        channels = build_channel_set(scenario)
    return System(channels=channels, f_matrix=f_matrix, codebook=codebook,
                  budget=budget, mimo=mimo)


def scheme_config(scheme: str, seed: int, base: AoConfig | None = None) -> AoConfig:
    cfg = base or AoConfig()
    cfg = replace(cfg, seed=seed)
    if scheme == "pa-ris-oam-random-phase":
        cfg = replace(cfg, optimize_theta1=False, optimize_theta2=False)
    if scheme in ("dp-ris-oam", "sp-ris-oam"):
        cfg = replace(cfg, optimize_amplifier=False, fixed_gain=1.0)
    if scheme in ("sa-ris-oam", "sp-ris-oam"):
        cfg = replace(cfg, optimize_theta2=False, theta2_identity=True)
    return cfg


def mmse_rate_report(
    system: System,
    design: DesignPoint,
    state: TransmitState,
    pair_index: int = 0,
) -> RateReport:
    """Rates with MMSE detection of the antenna-domain streams at both ends."""
    channels = system.channels
    budget = system.budget
    pair = system.codebook.pairs[pair_index]
    sig = list(pair.signal_modes)
    an = list(pair.an_modes)
    ris = design.ris_state()

    t = composite_bob_matrix(channels, ris) @ system.f_matrix
    amp = channels.h_r2b * (np.conj(ris.theta2) * ris.a)[None, :]
    cov_b = budget.sigma_r2_sq * (amp @ np.conj(amp).T)
    cov_b += budget.sigma_b_sq * np.eye(t.shape[0])
    cov_b += (t[:, sig] * state.p_s[None, :]) @ np.conj(t[:, sig]).T
    if an:
        cov_b += state.sigma_an_sq * (t[:, an] @ np.conj(t[:, an]).T)
    gamma_b = _mmse_sinrs(t[:, sig], state.p_s, cov_b)

    h_e = composite_eve_matrix(channels, ris) @ system.f_matrix
    cov_e = budget.sigma_e_sq * np.eye(h_e.shape[0])
    cov_e = cov_e + (h_e[:, sig] * state.p_s[None, :]) @ np.conj(h_e[:, sig]).T
    if an:
        cov_e += state.sigma_an_sq * (h_e[:, an] @ np.conj(h_e[:, an]).T)
    gamma_e = _mmse_sinrs(h_e[:, sig], state.p_s, cov_e)

    r_b = float(np.log2(1.0 + gamma_b).sum())
    r_e = float(np.log2(1.0 + gamma_e).sum())
    c_b = r_b + system.codebook.index_bits
    return RateReport(
        gamma_b=gamma_b, gamma_e=gamma_e, r_b=r_b, r_e=r_e, c_b=c_b,
        r_oam=c_b - r_e,
        ris2_power=ris2_radiated_power(
            channels, ris, state, system.codebook, pair_index, system.f_matrix,
            budget.sigma_r2_sq,
        ),
    )


def _mmse_sinrs(columns: np.ndarray, powers: np.ndarray, cov_full: np.ndarray) -> np.ndarray:
    """Per-stream MMSE SINR via gamma = c / (1 - c), c = p h^H Cov^-1 h."""
    inv = np.linalg.inv(cov_full)
    c = np.real(np.einsum("nk,nm,mk->k", np.conj(columns), inv, columns)) * powers
    c = np.clip(c, 0.0, 1.0 - 1e-15)
    return c / (1.0 - c)


def run_scheme(
    scheme: str,
    scenario: Scenario,
    seed: int,
    config: AoConfig | None = None,
    pair_index: int = 0,
    parameter: str = "",
    value: float = float("nan"),
) -> ResultRecord:
    """Optimize one scheme on one seed and report its rates."""
    start = time.perf_counter()
    record, _, _ = run_scheme_detailed(scheme, scenario, seed, config, pair_index)
    return replace(record, parameter=parameter, value=value,
                   wall_time=time.perf_counter() - start)


def run_scheme_detailed(
    scheme: str,
    scenario: Scenario,
    seed: int,
    config: AoConfig | None = None,
    pair_index: int = 0,
) -> tuple[ResultRecord, DesignPoint, AoTrace]:
    """run_scheme variant that also returns the design point and trace."""
    start = time.perf_counter()
    system = prepare_system(scenario, scheme)
    cfg = scheme_config(scheme, seed, config)
    design, trace = optimize_design(
        system.channels, system.f_matrix, system.budget, system.codebook,
        pair_index, cfg,
    )
    state = TransmitState(design.p_s, system.budget.rho, system.budget.p_transmit,
                          system.codebook.n_an)
    if system.mimo:
        report = mmse_rate_report(system, design, state, pair_index)
    else:
        report = rate_report(
            system.channels, design.ris_state(), state, system.codebook, pair_index,
            system.f_matrix, system.budget.sigma_b_sq, system.budget.sigma_e_sq,
            system.budget.sigma_r2_sq,
        )
    record = ResultRecord(
        scheme=scheme, parameter="", value=float("nan"), seed=seed,
        r_oam=report.r_oam, r_b=report.r_b, r_e=report.r_e, c_b=report.c_b,
        iterations=len(trace.rows), wall_time=time.perf_counter() - start,
    )
    return record, design, trace
