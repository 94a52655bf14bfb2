import numpy as np
from dataclasses import replace

from risoam.channel import LinkParams
from risoam.geometry import eve_center
from risoam.scenario import Scenario, paper_default, with_ris_counts


def desk_scenario(q: int = 12, beta: float = 150.0) -> Scenario:
    """Baseline geometry at desk scale with attenuations giving workable SINRs."""
    base = with_ris_counts(paper_default(), q)
    link = LinkParams(
        wavelength=base.link.wavelength,
        beta_ar1=beta, beta_r1r2=beta, beta_r2b=beta, beta_ae=beta, beta_r1e=beta,
    )
    return replace(base, link=link)


def normalized_scenario(q: int = 12) -> Scenario:
    """Per-hop attenuation cancels the center-to-center free-space loss.

    Every channel entry then has magnitude near one, which puts the BER
    experiment's received SNRs on the same scale as the swept transmit SNR.
    """
    base = with_ris_counts(paper_default(), q)
    lam = base.link.wavelength
    u_a = np.zeros(3)
    u_b = np.asarray(base.bob.center, dtype=float)
    u_r1 = np.asarray(base.ris1.center, dtype=float)
    u_r2 = np.asarray(base.ris2.center, dtype=float)
    u_e = eve_center(base.eve_distance, base.eve_theta, base.eve_varphi)

    def beta_for(a, b):
        return 4.0 * np.pi * np.linalg.norm(a - b) / lam

    link = LinkParams(
        wavelength=lam,
        beta_ar1=beta_for(u_a, u_r1),
        beta_r1r2=beta_for(u_r1, u_r2),
        beta_r2b=beta_for(u_r2, u_b),
        beta_ae=beta_for(u_a, u_e),
        beta_r1e=beta_for(u_r1, u_e),
    )
    return replace(base, link=link)
