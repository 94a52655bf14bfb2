"""OAM mode machinery: IDFT, SN-pair codebook, signal chain, SINRs and rates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np


class ConfigurationError(ValueError):
    """Mode-partition parameters describe an empty or inconsistent codebook."""


def idft_matrix(n_modes: int, initial_azimuth: float = 0.0) -> np.ndarray:
    """Unitary N x N matrix whose column l is (1/sqrt(N)) [e^{j l phi_1}, ...]."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    phi = 2.0 * np.pi * np.arange(n_modes) / n_modes + initial_azimuth
    orders = np.arange(n_modes)
    return np.exp(1j * np.outer(phi, orders)) / np.sqrt(n_modes)


@dataclass(frozen=True)
class SnPair:
    """One signal-mode / AN-mode combination."""

    signal_modes: tuple[int, ...]
    an_modes: tuple[int, ...]


@dataclass(frozen=True)
class OamCodebook:
    """Mode partition plus the index-modulation codebook of SN pairs."""

    n_modes: int
    n_low: int
    n_signal: int
    n_an: int
    pairs: tuple[SnPair, ...]

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def index_bits(self) -> float:
        return math.log2(self.size)


def enumerate_sn_pairs(n_modes: int, n_low: int, n_signal: int, n_an: int) -> OamCodebook:
    """Enumerate SN pairs in lexicographic rank order, truncated to the first G.

    Signal sets draw n_signal modes from the low-order pool {0..n_low-1} and
    always contain mode 0; AN sets draw n_an modes from {n_low..n_modes-1}.
    G = 2^floor(log2(C(n_low-1, n_signal-1) * C(n_modes-n_low, n_an))).
    """
    if not (1 <= n_signal <= n_low <= n_modes):
        raise ConfigurationError(
            f"need 1 <= n_signal <= n_low <= n_modes, got {n_signal}, {n_low}, {n_modes}"
        )
    if not (0 <= n_an <= n_modes - n_low):
        raise ConfigurationError(
            f"need 0 <= n_an <= n_modes - n_low, got n_an={n_an}, pool={n_modes - n_low}"
        )
    count = math.comb(n_low - 1, n_signal - 1) * math.comb(n_modes - n_low, n_an)
    if count < 1:
        raise ConfigurationError("no SN pair exists for the requested partition")
    size = 2 ** int(math.floor(math.log2(count)))
    signal_sets = [(0, *rest) for rest in combinations(range(1, n_low), n_signal - 1)]
    an_sets = list(combinations(range(n_low, n_modes), n_an))
    pairs = tuple(
        SnPair(sig, an)
        for sig, an in list(product(signal_sets, an_sets))[:size]
    )
    return OamCodebook(n_modes, n_low, n_signal, n_an, pairs)


@dataclass(frozen=True)
class TransmitState:
    """Per-mode signal powers and the signal/AN power split."""

    p_s: np.ndarray
    rho: float
    p_transmit: float
    n_an: int

    def __post_init__(self):
        object.__setattr__(self, "p_s", np.asarray(self.p_s, dtype=float))
        if np.any(self.p_s < 0):
            raise ValueError("signal powers must be nonnegative")
        if not (0 < self.rho <= 1):
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")
        if self.p_s.sum() > self.rho * self.p_transmit + 1e-9:
            raise ValueError("signal powers exceed the rho * P_T budget")

    @property
    def sigma_an_sq(self) -> float:
        """AN power per mode, (1 - rho) P_T / N_an (0 when no AN modes)."""
        if self.n_an == 0:
            return 0.0
        return (1.0 - self.rho) * self.p_transmit / self.n_an


@dataclass(frozen=True)
class RisState:
    """Phase vectors of both surfaces and the active surface's gains."""

    theta1: np.ndarray
    theta2: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        for name in ("theta1", "theta2"):
            v = np.asarray(getattr(self, name), dtype=complex)
            object.__setattr__(self, name, v)
            if np.max(np.abs(np.abs(v) - 1.0)) > 1e-10:
                raise ValueError(f"{name} must be unit modulus")
        a = np.asarray(self.a, dtype=float)
        object.__setattr__(self, "a", a)
        if np.any(a < 0):
            raise ValueError("amplifier gains must be nonnegative")


@dataclass(frozen=True)
class RateReport:
    """Per-mode SINRs and the rate/secrecy-rate summary."""

    gamma_b: np.ndarray
    gamma_e: np.ndarray
    r_b: float
    r_e: float
    c_b: float
    r_oam: float
    ris2_power: float


def ris2_incident_matrix(channels, theta1: np.ndarray) -> np.ndarray:
    """H_R2 = H_R1R2 Theta1 H_AR1, the chain from Alice to the active surface."""
    return channels.h_r1r2 @ (np.conj(theta1)[:, None] * channels.h_ar1)


def composite_bob_matrix(channels, ris: RisState) -> np.ndarray:
    """Full Alice -> Bob chain through both surfaces (N x N)."""
    h_r2 = ris2_incident_matrix(channels, ris.theta1)
    return channels.h_r2b @ ((np.conj(ris.theta2) * ris.a)[:, None] * h_r2)


def composite_eve_matrix(channels, ris: RisState) -> np.ndarray:
    """Alice -> Eve chain: direct link plus the RIS1 reflection (N_E x N)."""
    h = channels.h_ae
    if channels.h_r1e is not None:
        h = h + channels.h_r1e @ (np.conj(ris.theta1)[:, None] * channels.h_ar1)
    return h


def assemble_transmit(
    codebook: OamCodebook,
    pair_index: int,
    symbols: np.ndarray,
    an_samples: np.ndarray,
    state: TransmitState,
    f_matrix: np.ndarray,
) -> np.ndarray:
    """Transmit vector x = F (s + z) for the selected SN pair.

    `symbols` are unit-power constellation points (scaled by sqrt(p) here);
    `an_samples` are drawn by the caller with variance sigma_an_sq.
    """
    if not 0 <= pair_index < codebook.size:
        raise IndexError(f"pair_index {pair_index} out of range for G={codebook.size}")
    pair = codebook.pairs[pair_index]
    n = codebook.n_modes
    s = np.zeros(n, dtype=complex)
    s[list(pair.signal_modes)] = np.sqrt(state.p_s) * np.asarray(symbols, dtype=complex)
    z = np.zeros(n, dtype=complex)
    if pair.an_modes:
        z[list(pair.an_modes)] = np.asarray(an_samples, dtype=complex)
    return f_matrix @ (s + z)


def ris2_radiated_power(
    channels,
    ris: RisState,
    state: TransmitState,
    codebook: OamCodebook,
    pair_index: int,
    f_matrix: np.ndarray,
    sigma_r2_sq: float,
) -> float:
    """Expected radiated power of the active surface for the selected pair."""
    pair = codebook.pairs[pair_index]
    h_r2 = ris2_incident_matrix(channels, ris.theta1)
    a_sq = ris.a**2
    x_sig = h_r2 @ f_matrix[:, list(pair.signal_modes)]
    total = float(np.sum(state.p_s * (a_sq[:, None] * np.abs(x_sig) ** 2).sum(axis=0)))
    if pair.an_modes:
        x_an = h_r2 @ f_matrix[:, list(pair.an_modes)]
        total += state.sigma_an_sq * float((a_sq[:, None] * np.abs(x_an) ** 2).sum())
    total += sigma_r2_sq * float(a_sq.sum())
    return total


def effective_channel_bob(
    channels,
    ris: RisState,
    f_matrix: np.ndarray,
    signal_modes,
) -> tuple[np.ndarray, np.ndarray]:
    """Mode-pair gains h^B_{l,k} and the rows f_l^H H_R2B Theta2.

    Returns (h_b, bob_rows): h_b[l, k] = f_l^H H_R2B Theta2 A H_R2 f_k over
    the signal set, bob_rows[l] the row used by the amplified-noise term.
    """
    modes = list(signal_modes)
    rows = np.conj(f_matrix[:, modes]).T @ channels.h_r2b
    bob_rows = rows * np.conj(ris.theta2)[None, :]
    h_r2 = ris2_incident_matrix(channels, ris.theta1)
    incident = h_r2 @ f_matrix[:, modes]
    h_b = bob_rows @ (ris.a[:, None] * incident)
    return h_b, bob_rows


def effective_channel_eve(
    channels,
    ris: RisState,
    f_matrix: np.ndarray,
    signal_modes,
    an_modes,
) -> np.ndarray:
    """h^E_{l, k}: composite Eve rows at the signal-mode indices times F columns.

    Rows of the composite matrix are indexed literally by the OAM mode order,
    so the eavesdropper needs at least max(signal_modes)+1 elements.
    """
    sig = list(signal_modes)
    h_comp = composite_eve_matrix(channels, ris)
    if max(sig) >= h_comp.shape[0]:
        raise ConfigurationError(
            f"Eve has {h_comp.shape[0]} elements but mode {max(sig)} indexes its rows"
        )
    cols = f_matrix[:, sig + list(an_modes)]
    return h_comp[sig, :] @ cols


def sinr_bob(
    h_b: np.ndarray,
    bob_rows: np.ndarray,
    a: np.ndarray,
    p: np.ndarray,
    sigma_r2_sq: float,
    sigma_b_sq: float,
) -> np.ndarray:
    """Per-signal-mode SINR at Bob."""
    gains = np.abs(h_b) ** 2
    signal = p * np.diag(gains)
    interference = gains @ p - signal
    noise_gain = (np.abs(bob_rows) ** 2 * a[None, :] ** 2).sum(axis=1)
    return signal / (interference + sigma_r2_sq * noise_gain + sigma_b_sq)


def sinr_eve(
    channels,
    ris: RisState,
    state: TransmitState,
    codebook: OamCodebook,
    pair_index: int,
    f_matrix: np.ndarray,
    sigma_e_sq: float,
) -> np.ndarray:
    """Per-signal-mode SINR at Eve, AN landing in her denominator."""
    pair = codebook.pairs[pair_index]
    h_e = effective_channel_eve(channels, ris, f_matrix, pair.signal_modes, pair.an_modes)
    n_sig = len(pair.signal_modes)
    gains = np.abs(h_e) ** 2
    signal = state.p_s * np.diag(gains[:, :n_sig])
    interference = gains[:, :n_sig] @ state.p_s - signal
    an_term = state.sigma_an_sq * gains[:, n_sig:].sum(axis=1)
    return signal / (interference + an_term + sigma_e_sq)


def rate_report(
    channels,
    ris: RisState,
    state: TransmitState,
    codebook: OamCodebook,
    pair_index: int,
    f_matrix: np.ndarray,
    sigma_b_sq: float,
    sigma_e_sq: float,
    sigma_r2_sq: float,
) -> RateReport:
    """Rates for the selected pair: R_B, the index-bound C_B, R_E, R_OAM."""
    pair = codebook.pairs[pair_index]
    h_b, bob_rows = effective_channel_bob(channels, ris, f_matrix, pair.signal_modes)
    gamma_b = sinr_bob(h_b, bob_rows, ris.a, state.p_s, sigma_r2_sq, sigma_b_sq)
    gamma_e = sinr_eve(channels, ris, state, codebook, pair_index, f_matrix, sigma_e_sq)
    r_b = float(np.log2(1.0 + gamma_b).sum())
    r_e = float(np.log2(1.0 + gamma_e).sum())
    c_b = r_b + codebook.index_bits
    return RateReport(
        gamma_b=gamma_b,
        gamma_e=gamma_e,
        r_b=r_b,
        r_e=r_e,
        c_b=c_b,
        r_oam=c_b - r_e,
        ris2_power=ris2_radiated_power(
            channels, ris, state, codebook, pair_index, f_matrix, sigma_r2_sq
        ),
    )


def simulate_reception(
    channels,
    ris: RisState,
    x: np.ndarray,
    noise_r2: np.ndarray,
    noise_b: np.ndarray,
    noise_e: np.ndarray,
    f_matrix: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One shot through the chain: returns (y_B, y_E, F^H y_B)."""
    t = composite_bob_matrix(channels, ris)
    amp = channels.h_r2b * (np.conj(ris.theta2) * ris.a)[None, :]
    y_b = t @ x + amp @ noise_r2 + noise_b
    y_e = composite_eve_matrix(channels, ris) @ x + noise_e
    return y_b, y_e, np.conj(f_matrix).T @ y_b


def zc_weights(n_modes: int, u: int) -> np.ndarray:
    """Even-length Zadoff-Chu diagonal weights w_n = e^{j pi U (n-1)^2 / N}."""
    if n_modes % 2 != 0:
        raise ValueError(f"ZC weighting is defined for even N only, got {n_modes}")
    if not 1 <= u < n_modes:
        raise ValueError(f"U must satisfy 1 <= U < N, got {u}")
    n = np.arange(n_modes)
    return np.exp(1j * np.pi * u * n**2 / n_modes)


def index_mutual_info_mc(
    channels,
    ris: RisState,
    state: TransmitState,
    codebook: OamCodebook,
    f_matrix: np.ndarray,
    sigma_b_sq: float,
    sigma_r2_sq: float,
    samples: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate (bits) of the index information at Bob.

    Models each SN pair's decomposed receive vector as a zero-mean complex
    Gaussian (Gaussian signaling) and estimates the mean KL divergence of the
    components from their mixture. Returns (estimate, standard error).
    """
    g = codebook.size
    if g == 1:
        return 0.0, 0.0
    n = codebook.n_modes
    t = composite_bob_matrix(channels, ris)
    w = np.conj(f_matrix).T @ t @ f_matrix
    b = np.conj(f_matrix).T @ channels.h_r2b * (np.conj(ris.theta2) * ris.a)[None, :]
    cov_noise = sigma_r2_sq * (b @ np.conj(b).T) + sigma_b_sq * np.eye(n)

    chols, invs, logdets = [], [], []
    for pair in codebook.pairs:
        d = np.zeros(n)
        d[list(pair.signal_modes)] = state.p_s
        if pair.an_modes:
            d[list(pair.an_modes)] = state.sigma_an_sq
        cov = w @ (d[:, None] * np.conj(w).T) + cov_noise
        cov = 0.5 * (cov + np.conj(cov).T)
        try:
            chols.append(np.linalg.cholesky(cov))
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(
                "receive covariance is singular; regularize the noise floor "
                f"(sigma_b_sq={sigma_b_sq})"
            ) from exc
        invs.append(np.linalg.inv(cov))
        logdets.append(np.linalg.slogdet(cov)[1])

    rng = np.random.default_rng(seed)
    per_pair = np.full(g, samples // g)
    per_pair[: samples % g] += 1
    means = np.zeros(g)
    variances = np.zeros(g)
    for gi in range(g):
        m = int(per_pair[gi])
        xi = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)
        y = chols[gi] @ xi
        # log density of every component at each draw, up to the shared pi^N term
        quad = np.stack([np.real(np.einsum("nm,nk,km->m", np.conj(y), invs[j], y)) for j in range(g)])
        log_f = -quad - np.asarray(logdets)[:, None]
        log_mix = np.logaddexp.reduce(log_f, axis=0) - np.log(g)
        vals = (log_f[gi] - log_mix) / np.log(2.0)
        means[gi] = vals.mean()
        variances[gi] = vals.var(ddof=1) / m
    estimate = float(means.mean())
    stderr = float(np.sqrt(variances.sum()) / g)
    return estimate, stderr
