"""Alternating secrecy-rate maximizer: closed-form auxiliary updates, the two
convex subproblems, and Riemannian CG on each surface's phase vector.

Gradients follow the Wirtinger convention grad = 2 d/d(conj(theta)), so the
finite-difference derivative with respect to the real (imaginary) part of an
entry equals the real (imaginary) part of the returned vector.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from ._kernels import (
    theta1_grad,
    theta1_value,
    theta2_grad,
    theta2_value,
)
from .channel import build_channel_set
from .manifold import RcgConfig, rcg_minimize
from .oam import (
    OamCodebook,
    RisState,
    TransmitState,
    effective_channel_bob,
    effective_channel_eve,
    idft_matrix,
    rate_report,
    ris2_incident_matrix,
    ris2_radiated_power,
)
from .solvers import AmplifierProblem, PowerProblem, solve_amplifier, solve_power


@dataclass(frozen=True)
class LinkBudget:
    """Power and noise operating point of one optimization run."""

    p_transmit: float
    rho: float
    p_ris_limit: float
    a_max: float
    p_floor: float
    sigma_b_sq: float
    sigma_e_sq: float
    sigma_r2_sq: float


@dataclass(frozen=True)
class AoConfig:
    outer_tolerance: float = 1e-4
    max_outer_iters: int = 200
    rcg: RcgConfig = field(default_factory=RcgConfig)
    convex_tolerance: float = 1e-8
    power_rounds: int = 5
    seed: int = 0
    optimize_theta1: bool = True
    optimize_theta2: bool = True
    optimize_amplifier: bool = True
    theta2_identity: bool = False
    fixed_gain: float | None = None


@dataclass(frozen=True)
class DesignPoint:
    p_s: np.ndarray
    a: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray

    def ris_state(self) -> RisState:
        return RisState(self.theta1, self.theta2, self.a)


@dataclass(frozen=True)
class AoTraceRow:
    iteration: int
    r_b: float
    r_e: float
    c_b: float
    r_oam: float
    ris2_power: float
    l1: int
    l2: int
    repaired: bool


TRACE_COLUMNS = ("iter", "R_B", "R_E", "C_B", "R_OAM", "ris2_power", "L1", "L2", "repaired")


@dataclass
class AoTrace:
    rows: list[AoTraceRow]

    def r_oam_series(self) -> np.ndarray:
        return np.array([r.r_oam for r in self.rows])

    def repaired_flags(self) -> np.ndarray:
        return np.array([r.repaired for r in self.rows])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for r in self.rows:
                writer.writerow(
                    [r.iteration, repr(r.r_b), repr(r.r_e), repr(r.c_b), repr(r.r_oam),
                     repr(r.ris2_power), r.l1, r.l2, int(r.repaired)]
                )


# --------------------------------------------------------------------------
# closed-form auxiliary updates
# --------------------------------------------------------------------------


def update_t(
    gains_bob: np.ndarray,
    gains_eve: np.ndarray,
    p: np.ndarray,
    c1: np.ndarray,
    c2: np.ndarray,
    sigma_b_sq: float,
    sigma_e_sq: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Optimal auxiliary t for Bob (interference-only) and Eve (full sum)."""
    interf = gains_bob @ p - np.diag(gains_bob) * p
    t_bob = 1.0 / (1.0 + (interf + c1) / sigma_b_sq)
    t_eve = 1.0 / (1.0 + (gains_eve @ p + c2) / sigma_e_sq)
    return t_bob, t_eve


def update_tau_omega(
    h_b: np.ndarray,
    noise_quad: np.ndarray,
    p: np.ndarray,
    sigma_b_sq: float,
) -> tuple[np.ndarray, np.ndarray]:
    """MMSE-style tau and the reciprocal-MSE weight omega = 1 + SINR."""
    gains = np.abs(h_b) ** 2
    den = gains @ p + noise_quad + sigma_b_sq
    tau = np.sqrt(p) * np.diag(h_b) / den
    signal = p * np.diag(gains)
    omega = 1.0 + signal / (den - signal)
    return tau, omega


# --------------------------------------------------------------------------
# phase-subproblem workspaces
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Theta1Workspace:
    mu: np.ndarray
    eta: np.ndarray
    zeta: np.ndarray
    const_b: np.ndarray
    p: np.ndarray
    sigma_an_sq: float
    sigma_e_sq: float


@dataclass(frozen=True)
class Theta2Workspace:
    mu: np.ndarray
    iota2: np.ndarray
    p: np.ndarray
    sigma_r2_sq: float
    sigma_b_sq: float


def theta1_workspace(
    channels,
    theta2: np.ndarray,
    a: np.ndarray,
    state: TransmitState,
    codebook: OamCodebook,
    pair_index: int,
    f_matrix: np.ndarray,
    budget: LinkBudget,
) -> Theta1Workspace:
    pair = codebook.pairs[pair_index]
    sig = list(pair.signal_modes)
    both = sig + list(pair.an_modes)
    rows = np.conj(f_matrix[:, sig]).T @ channels.h_r2b
    bob_rows = rows * np.conj(theta2)[None, :]
    front = (bob_rows * a[None, :]) @ channels.h_r1r2
    through = channels.h_ar1 @ f_matrix[:, both]
    mu = front[:, None, :] * through[:, : len(sig)].T[None, :, :]
    if channels.h_r1e is None:
        eta = np.zeros((len(sig), len(both), channels.h_ar1.shape[0]), dtype=complex)
    else:
        eta = channels.h_r1e[sig][:, None, :] * through.T[None, :, :]
    zeta = channels.h_ae[sig] @ f_matrix[:, both]
    const_b = budget.sigma_r2_sq * (np.abs(bob_rows) ** 2 * a[None, :] ** 2).sum(axis=1)
    const_b = const_b + budget.sigma_b_sq
    return Theta1Workspace(
        mu=np.ascontiguousarray(mu),
        eta=np.ascontiguousarray(eta),
        zeta=np.ascontiguousarray(zeta),
        const_b=np.ascontiguousarray(const_b),
        p=np.ascontiguousarray(state.p_s),
        sigma_an_sq=float(state.sigma_an_sq),
        sigma_e_sq=float(budget.sigma_e_sq),
    )


def theta2_workspace(
    channels,
    theta1: np.ndarray,
    a: np.ndarray,
    state: TransmitState,
    codebook: OamCodebook,
    pair_index: int,
    f_matrix: np.ndarray,
    budget: LinkBudget,
) -> Theta2Workspace:
    pair = codebook.pairs[pair_index]
    sig = list(pair.signal_modes)
    rows = np.conj(f_matrix[:, sig]).T @ channels.h_r2b
    incident = a[:, None] * (ris2_incident_matrix(channels, theta1) @ f_matrix[:, sig])
    mu = rows[:, None, :] * incident.T[None, :, :]
    iota2 = np.abs(rows) ** 2 * (a**2)[None, :]
    return Theta2Workspace(
        mu=np.ascontiguousarray(mu),
        iota2=np.ascontiguousarray(iota2),
        p=np.ascontiguousarray(state.p_s),
        sigma_r2_sq=float(budget.sigma_r2_sq),
        sigma_b_sq=float(budget.sigma_b_sq),
    )


def objective_theta1(theta1: np.ndarray, ws: Theta1Workspace) -> float:
    """Phi_1 = -(R_B - R_E) as a function of the first surface's phases."""
    return theta1_value(
        np.ascontiguousarray(theta1), ws.mu, ws.eta, ws.zeta, ws.p,
        ws.const_b, ws.sigma_an_sq, ws.sigma_e_sq,
    )


def egrad_theta1(theta1: np.ndarray, ws: Theta1Workspace) -> np.ndarray:
    """Euclidean (Wirtinger) gradient of Phi_1."""
    return theta1_grad(
        np.ascontiguousarray(theta1), ws.mu, ws.eta, ws.zeta, ws.p,
        ws.const_b, ws.sigma_an_sq, ws.sigma_e_sq,
    )


def objective_theta2(theta2: np.ndarray, ws: Theta2Workspace) -> float:
    """Phi_2 = -R_B as a function of the second surface's phases."""
    return theta2_value(
        np.ascontiguousarray(theta2), ws.mu, ws.iota2, ws.p, ws.sigma_r2_sq, ws.sigma_b_sq
    )


def egrad_theta2(theta2: np.ndarray, ws: Theta2Workspace) -> np.ndarray:
    """Euclidean (Wirtinger) gradient of Phi_2."""
    return theta2_grad(
        np.ascontiguousarray(theta2), ws.mu, ws.iota2, ws.p, ws.sigma_r2_sq, ws.sigma_b_sq
    )


# --------------------------------------------------------------------------
# subproblem assembly
# --------------------------------------------------------------------------


def build_power_problem(
    channels,
    ris: RisState,
    state: TransmitState,
    codebook: OamCodebook,
    pair_index: int,
    f_matrix: np.ndarray,
    budget: LinkBudget,
) -> PowerProblem:
    pair = codebook.pairs[pair_index]
    h_b, bob_rows = effective_channel_bob(channels, ris, f_matrix, pair.signal_modes)
    h_e = effective_channel_eve(channels, ris, f_matrix, pair.signal_modes, pair.an_modes)
    n_sig = len(pair.signal_modes)
    c1 = budget.sigma_r2_sq * (np.abs(bob_rows) ** 2 * ris.a[None, :] ** 2).sum(axis=1)
    c2 = state.sigma_an_sq * (np.abs(h_e[:, n_sig:]) ** 2).sum(axis=1)
    h_r2 = ris2_incident_matrix(channels, ris.theta1)
    a_sq = ris.a**2
    x_sig = h_r2 @ f_matrix[:, list(pair.signal_modes)]
    coeffs = (a_sq[:, None] * np.abs(x_sig) ** 2).sum(axis=0)
    offset = budget.sigma_r2_sq * float(a_sq.sum())
    if pair.an_modes:
        x_an = h_r2 @ f_matrix[:, list(pair.an_modes)]
        offset += state.sigma_an_sq * float((a_sq[:, None] * np.abs(x_an) ** 2).sum())
    ones = np.ones(n_sig)
    return PowerProblem(
        gains_bob=np.abs(h_b) ** 2,
        gains_eve=np.abs(h_e[:, :n_sig]) ** 2,
        c1=c1,
        c2=c2,
        t_bob=ones,
        t_eve=ones,
        budget=budget.rho * budget.p_transmit,
        p_floor=budget.p_floor,
        ris2_coeffs=coeffs,
        ris2_offset=offset,
        ris2_limit=budget.p_ris_limit,
        sigma_b_sq=budget.sigma_b_sq,
        sigma_e_sq=budget.sigma_e_sq,
    )


def build_amplifier_problem(
    channels,
    ris: RisState,
    state: TransmitState,
    codebook: OamCodebook,
    pair_index: int,
    f_matrix: np.ndarray,
    tau: np.ndarray,
    omega: np.ndarray,
    budget: LinkBudget,
) -> AmplifierProblem:
    pair = codebook.pairs[pair_index]
    sig = list(pair.signal_modes)
    rows = np.conj(f_matrix[:, sig]).T @ channels.h_r2b
    bob_rows = rows * np.conj(ris.theta2)[None, :]
    h_r2 = ris2_incident_matrix(channels, ris.theta1)
    inc_sig = h_r2 @ f_matrix[:, sig]
    chi = bob_rows[:, None, :] * inc_sig.T[None, :, :]
    weight = omega * np.abs(tau) ** 2
    omega_mat = np.einsum("l,k,lkq,lkr->qr", weight, state.p_s, chi, np.conj(chi))
    omega_mat += np.diag(
        budget.sigma_r2_sq * (weight[:, None] * np.abs(bob_rows) ** 2).sum(axis=0)
    )
    idx = np.arange(len(sig))
    g = ((omega * np.conj(tau) * np.sqrt(state.p_s))[:, None] * chi[idx, idx, :]).sum(axis=0)
    power_diag = (state.p_s[None, :] * np.abs(inc_sig) ** 2).sum(axis=1)
    if pair.an_modes:
        inc_an = h_r2 @ f_matrix[:, list(pair.an_modes)]
        power_diag = power_diag + state.sigma_an_sq * (np.abs(inc_an) ** 2).sum(axis=1)
    power_diag = power_diag + budget.sigma_r2_sq
    return AmplifierProblem(
        omega=omega_mat,
        g=g,
        power_matrix=np.diag(power_diag),
        power_limit=budget.p_ris_limit,
        a_max=budget.a_max,
    )


# --------------------------------------------------------------------------
# the alternating loop
# --------------------------------------------------------------------------


def optimize_design(
    channels,
    f_matrix: np.ndarray,
    budget: LinkBudget,
    codebook: OamCodebook,
    pair_index: int,
    config: AoConfig | None = None,
) -> tuple[DesignPoint, AoTrace]:
    """Run the alternating optimizer on prebuilt channels; returns the best iterate."""
    cfg = config or AoConfig()
    rng = np.random.default_rng(cfg.seed)
    q1 = channels.h_ar1.shape[0]
    q2 = channels.h_r1r2.shape[0]
    n_sig = codebook.n_signal

    theta1 = np.exp(2j * np.pi * rng.random(q1))
    theta2 = (
        np.ones(q2, dtype=complex)
        if cfg.theta2_identity
        else np.exp(2j * np.pi * rng.random(q2))
    )
    p = np.maximum(np.full(n_sig, budget.rho * budget.p_transmit / n_sig), budget.p_floor)
    state = TransmitState(p, budget.rho, budget.p_transmit, codebook.n_an)

    if cfg.fixed_gain is not None:
        a = np.full(q2, float(cfg.fixed_gain))
    else:
        unit = RisState(theta1, theta2, np.ones(q2))
        unit_power = ris2_radiated_power(
            channels, unit, state, codebook, pair_index, f_matrix, budget.sigma_r2_sq
        )
        if np.isfinite(budget.p_ris_limit) and unit_power > 0:
            scale = min(budget.a_max, float(np.sqrt(budget.p_ris_limit / unit_power)))
        else:
            scale = budget.a_max
        a = np.full(q2, scale)

    rows: list[AoTraceRow] = []
    best: DesignPoint | None = None
    best_val = -np.inf
    prev = None

    for it in range(cfg.max_outer_iters):
        ris = RisState(theta1, theta2, a)

        prob = build_power_problem(channels, ris, state, codebook, pair_index, f_matrix, budget)
        for _ in range(cfg.power_rounds):
            t_bob, t_eve = update_t(
                prob.gains_bob, prob.gains_eve, p, prob.c1, prob.c2,
                budget.sigma_b_sq, budget.sigma_e_sq,
            )
            prob = replace(prob, t_bob=t_bob, t_eve=t_eve)
            p = solve_power(prob, cfg.convex_tolerance, initial=p)
        state = TransmitState(p, budget.rho, budget.p_transmit, codebook.n_an)

        l1 = l2 = 0
        if cfg.optimize_amplifier:
            h_b, bob_rows_ = effective_channel_bob(
                channels, ris, f_matrix, codebook.pairs[pair_index].signal_modes
            )
            noise_quad = budget.sigma_r2_sq * (
                np.abs(bob_rows_) ** 2 * ris.a[None, :] ** 2
            ).sum(axis=1)
            tau, omega = update_tau_omega(h_b, noise_quad, p, budget.sigma_b_sq)
            aprob = build_amplifier_problem(
                channels, ris, state, codebook, pair_index, f_matrix, tau, omega, budget
            )
            a = solve_amplifier(aprob, cfg.convex_tolerance, initial=a)

        repaired = False
        if cfg.optimize_theta1:
            ws1 = theta1_workspace(
                channels, theta2, a, state, codebook, pair_index, f_matrix, budget
            )
            res1 = rcg_minimize(
                lambda th: objective_theta1(th, ws1),
                lambda th: egrad_theta1(th, ws1),
                theta1,
                cfg.rcg,
            )
            theta1 = res1.point
            l1 = res1.iterations
            power_now = ris2_radiated_power(
                channels, RisState(theta1, theta2, a), state, codebook, pair_index,
                f_matrix, budget.sigma_r2_sq,
            )
            if np.isfinite(budget.p_ris_limit) and power_now > budget.p_ris_limit * (1 + 1e-9):
                a = a * np.sqrt(budget.p_ris_limit / power_now)
                repaired = True

        if cfg.optimize_theta2:
            ws2 = theta2_workspace(
                channels, theta1, a, state, codebook, pair_index, f_matrix, budget
            )
            res2 = rcg_minimize(
                lambda th: objective_theta2(th, ws2),
                lambda th: egrad_theta2(th, ws2),
                theta2,
                cfg.rcg,
            )
            theta2 = res2.point
            l2 = res2.iterations

        report = rate_report(
            channels, RisState(theta1, theta2, a), state, codebook, pair_index,
            f_matrix, budget.sigma_b_sq, budget.sigma_e_sq, budget.sigma_r2_sq,
        )
        rows.append(
            AoTraceRow(
                iteration=it, r_b=report.r_b, r_e=report.r_e, c_b=report.c_b,
                r_oam=report.r_oam, ris2_power=report.ris2_power,
                l1=l1, l2=l2, repaired=repaired,
            )
        )
        if report.r_oam > best_val:
            best_val = report.r_oam
            best = DesignPoint(p.copy(), a.copy(), theta1.copy(), theta2.copy())
        if prev is not None and abs(report.r_oam - prev) < cfg.outer_tolerance:
            break
        prev = report.r_oam

    assert best is not None
    return best, AoTrace(rows)


def alternating_optimize(
    scenario,
    codebook: OamCodebook | None = None,
    pair_index: int = 0,
    config: AoConfig | None = None,
) -> tuple[DesignPoint, AoTrace]:
    """Full optimizer on a scenario: builds channels and the IDFT, then alternates."""
    codebook = codebook or scenario.codebook()
    channels = build_channel_set(scenario)
    f_matrix = idft_matrix(scenario.n_modes, scenario.alice.initial_azimuth)
    return optimize_design(
        channels, f_matrix, scenario.link_budget(), codebook, pair_index, config
    )
