"""Scenario description and YAML loading, with the baseline preset built in."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
import yaml

from .channel import LinkParams
from .geometry import (
    Attitude,
    RisSpec,
    UcaSpec,
    eve_center,
    ris_element_positions,
    uca_element_positions,
)
from .oam import OamCodebook, enumerate_sn_pairs, idft_matrix
from .optimizer import LinkBudget

logger = logging.getLogger("risoam")

SPEED_OF_LIGHT = 299_792_458.0


class ScenarioError(ValueError):
    """A scenario file violates the schema; the message names the field."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class Scenario:
    """Full physical description of one run: geometry, link, noise, budgets."""

    n_modes: int
    n_eve: int
    n_low: int
    n_signal: int
    n_an: int
    alice: UcaSpec
    bob: UcaSpec
    eve_distance: float
    eve_theta: float
    eve_varphi: float
    eve_radius: float
    eve_initial_azimuth: float
    eve_attitude: Attitude
    ris1: RisSpec
    ris2: RisSpec
    link: LinkParams
    sigma_b_sq: float
    sigma_e_sq: float
    sigma_r2_sq: float
    p_total: float
    transmit_share: float = 0.9
    rho: float = 0.9
    a_max: float = 10.0
    p_floor: float | None = None

    def __post_init__(self):
        for name in ("sigma_b_sq", "sigma_e_sq", "sigma_r2_sq", "p_total"):
            if getattr(self, name) <= 0:
                raise ScenarioError(f"{name} must be positive")
        if not 0 < self.rho <= 1:
            raise ScenarioError(f"rho must lie in (0, 1], got {self.rho}")
        if not 0 < self.transmit_share <= 1:
            raise ScenarioError("transmit_share must lie in (0, 1]")

    @property
    def p_transmit(self) -> float:
        return self.transmit_share * self.p_total

    @property
    def p_ris_limit(self) -> float:
        if self.transmit_share >= 1.0:
            return math.inf
        return (1.0 - self.transmit_share) * self.p_total

    @property
    def p_floor_value(self) -> float:
        if self.p_floor is not None:
            return self.p_floor
        return 1e-3 * self.rho * self.p_transmit / self.n_signal

    def eve_spec(self) -> UcaSpec:
        center = eve_center(self.eve_distance, self.eve_theta, self.eve_varphi)
        return UcaSpec(
            center=tuple(center),
            radius=self.eve_radius,
            count=self.n_eve,
            initial_azimuth=self.eve_initial_azimuth,
            attitude=self.eve_attitude,
        )

    def alice_positions(self) -> np.ndarray:
        return uca_element_positions(self.alice)

    def bob_positions(self) -> np.ndarray:
        return uca_element_positions(self.bob)

    def eve_positions(self) -> np.ndarray:
        return uca_element_positions(self.eve_spec())

    def ris1_positions(self) -> np.ndarray:
        return ris_element_positions(self.ris1)

    def ris2_positions(self) -> np.ndarray:
        return ris_element_positions(self.ris2)

    def codebook(self) -> OamCodebook:
        return enumerate_sn_pairs(self.n_modes, self.n_low, self.n_signal, self.n_an)

    def f_matrix(self) -> np.ndarray:
        return idft_matrix(self.n_modes, self.alice.initial_azimuth)

    def link_budget(self) -> LinkBudget:
        return LinkBudget(
            p_transmit=self.p_transmit,
            rho=self.rho,
            p_ris_limit=self.p_ris_limit,
            a_max=self.a_max,
            p_floor=self.p_floor_value,
            sigma_b_sq=self.sigma_b_sq,
            sigma_e_sq=self.sigma_e_sq,
            sigma_r2_sq=self.sigma_r2_sq,
        )


def paper_default() -> Scenario:
    """Baseline scenario: published geometry plus the declared defaults.

    Values the source setup leaves open (wavelength, array radii, attenuation
    factors, Eve's range, the power floor) use documented defaults and are
    overridable per scenario file.
    """
    wavelength = SPEED_OF_LIGHT / 28e9
    return Scenario(
        n_modes=8,
        n_eve=8,
        n_low=4,
        n_signal=3,
        n_an=3,
        alice=UcaSpec(
            center=(0.0, 0.0, 0.0), radius=0.5, count=8,
            attitude=Attitude(rot_x=0.0, rot_y=math.pi / 10),
        ),
        bob=UcaSpec(
            center=(0.0, 0.0, 40.0), radius=0.5, count=8,
            attitude=Attitude(rot_x=0.0, rot_y=-math.pi / 10),
        ),
        eve_distance=20.0,
        eve_theta=0.0,
        eve_varphi=-math.pi / 20,
        eve_radius=0.5,
        eve_initial_azimuth=0.0,
        eve_attitude=Attitude(rot_x=-math.pi / 4, rot_y=-math.pi / 4),
        ris1=RisSpec(
            center=(2.0, 0.0, 0.3), count_y=8, count_z=5,
            spacing_y=0.05, spacing_z=0.05,
            attitude=Attitude(rot_x=0.0, rot_y=math.pi / 10),
        ),
        ris2=RisSpec(
            center=(1.0, 0.0, 39.7), count_y=8, count_z=5,
            spacing_y=0.05, spacing_z=0.05,
            attitude=Attitude(rot_x=0.0, rot_y=-math.pi / 10),
        ),
        link=LinkParams(wavelength=wavelength),
        sigma_b_sq=dbm_to_watts(-20.0),
        sigma_e_sq=dbm_to_watts(-20.0),
        sigma_r2_sq=dbm_to_watts(-60.0),
        p_total=dbm_to_watts(30.0),
        transmit_share=0.9,
        rho=0.9,
        a_max=10.0,
    )


_DBM_KEYS = {
    "sigma_b_dbm": "sigma_b_sq",
    "sigma_e_dbm": "sigma_e_sq",
    "sigma_r2_dbm": "sigma_r2_sq",
    "p_total_dbm": "p_total",
    "p_floor_dbm": "p_floor",
}

_UCA_KEYS = {"center", "radius", "count", "initial_azimuth", "rot_x", "rot_y"}
_RIS_KEYS = {"center", "count_y", "count_z", "spacing_y", "spacing_z", "rot_x", "rot_y"}
_EVE_KEYS = {"distance", "theta", "varphi", "radius", "initial_azimuth", "rot_x", "rot_y"}
_SECTIONS = {
    "modes": {"n_modes", "n_eve", "n_low", "n_signal", "n_an"},
    "link": {"wavelength", "carrier_hz", "beta", "beta_ar1", "beta_r1r2",
             "beta_r2b", "beta_ae", "beta_r1e"},
    "noise": {"sigma_b_sq", "sigma_e_sq", "sigma_r2_sq"} | set(_DBM_KEYS) - {"p_total_dbm", "p_floor_dbm"},
    "power": {"p_total", "p_total_dbm", "transmit_share", "rho", "a_max",
              "p_floor", "p_floor_dbm"},
    "alice": _UCA_KEYS,
    "bob": _UCA_KEYS,
    "eve": _EVE_KEYS,
    "ris1": _RIS_KEYS,
    "ris2": _RIS_KEYS,
}


def _check_schema(data: dict) -> None:
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must contain a mapping of sections")
    for section, content in data.items():
        if section not in _SECTIONS:
            raise ScenarioError(f"unknown scenario section '{section}'")
        if not isinstance(content, dict):
            raise ScenarioError(f"scenario section '{section}' must be a mapping")
        for key in content:
            if key not in _SECTIONS[section]:
                raise ScenarioError(f"unknown scenario field '{section}.{key}'")


def _convert_dbm(section: dict) -> dict:
    out = dict(section)
    for key, target in _DBM_KEYS.items():
        if key in out:
            out[target] = dbm_to_watts(float(out.pop(key)))
    return out


def _uca_from(section: dict, base: UcaSpec, count: int, who: str) -> UcaSpec:
    if section and "radius" not in section:
        logger.warning("scenario %s.radius not set; using default %.2f m (not a published value)",
                       who, base.radius)
    att = Attitude(
        rot_x=float(section.get("rot_x", base.attitude.rot_x)),
        rot_y=float(section.get("rot_y", base.attitude.rot_y)),
    )
    return UcaSpec(
        center=tuple(section.get("center", base.center)),
        radius=float(section.get("radius", base.radius)),
        count=count,
        initial_azimuth=float(section.get("initial_azimuth", base.initial_azimuth)),
        attitude=att,
    )


def _ris_from(section: dict, base: RisSpec) -> RisSpec:
    att = Attitude(
        rot_x=float(section.get("rot_x", base.attitude.rot_x)),
        rot_y=float(section.get("rot_y", base.attitude.rot_y)),
    )
    return RisSpec(
        center=tuple(section.get("center", base.center)),
        count_y=int(section.get("count_y", base.count_y)),
        count_z=int(section.get("count_z", base.count_z)),
        spacing_y=float(section.get("spacing_y", base.spacing_y)),
        spacing_z=float(section.get("spacing_z", base.spacing_z)),
        attitude=att,
    )


def scenario_from_dict(data: dict) -> Scenario:
    """Build a scenario from a nested mapping, filling gaps from the preset."""
    _check_schema(data)
    base = paper_default()

    modes = data.get("modes", {})
    n_modes = int(modes.get("n_modes", base.n_modes))
    n_eve = int(modes.get("n_eve", base.n_eve))

    link_sec = dict(data.get("link", {}))
    if "carrier_hz" in link_sec and "wavelength" not in link_sec:
        link_sec["wavelength"] = SPEED_OF_LIGHT / float(link_sec.pop("carrier_hz"))
    link_sec.pop("carrier_hz", None)
    beta_all = link_sec.pop("beta", None)
    link_kwargs = {"wavelength": float(link_sec.pop("wavelength", base.link.wavelength))}
    for name in ("beta_ar1", "beta_r1r2", "beta_r2b", "beta_ae", "beta_r1e"):
        default = float(beta_all) if beta_all is not None else getattr(base.link, name)
        link_kwargs[name] = float(link_sec.pop(name, default))

    noise = _convert_dbm(data.get("noise", {}))
    power = _convert_dbm(data.get("power", {}))
    eve_sec = data.get("eve", {})
    if "radius" not in eve_sec and "eve" in data:
        logger.warning("scenario eve.radius not set; using default %.2f m (not a published value)",
                       base.eve_radius)

    return Scenario(
        n_modes=n_modes,
        n_eve=n_eve,
        n_low=int(modes.get("n_low", base.n_low)),
        n_signal=int(modes.get("n_signal", base.n_signal)),
        n_an=int(modes.get("n_an", base.n_an)),
        alice=_uca_from(data.get("alice", {}), base.alice, n_modes, "alice"),
        bob=_uca_from(data.get("bob", {}), base.bob, n_modes, "bob"),
        eve_distance=float(eve_sec.get("distance", base.eve_distance)),
        eve_theta=float(eve_sec.get("theta", base.eve_theta)),
        eve_varphi=float(eve_sec.get("varphi", base.eve_varphi)),
        eve_radius=float(eve_sec.get("radius", base.eve_radius)),
        eve_initial_azimuth=float(eve_sec.get("initial_azimuth", base.eve_initial_azimuth)),
        eve_attitude=Attitude(
            rot_x=float(eve_sec.get("rot_x", base.eve_attitude.rot_x)),
            rot_y=float(eve_sec.get("rot_y", base.eve_attitude.rot_y)),
        ),
        ris1=_ris_from(data.get("ris1", {}), base.ris1),
        ris2=_ris_from(data.get("ris2", {}), base.ris2),
        link=LinkParams(**link_kwargs),
        sigma_b_sq=float(noise.get("sigma_b_sq", base.sigma_b_sq)),
        sigma_e_sq=float(noise.get("sigma_e_sq", base.sigma_e_sq)),
        sigma_r2_sq=float(noise.get("sigma_r2_sq", base.sigma_r2_sq)),
        p_total=float(power.get("p_total", base.p_total)),
        transmit_share=float(power.get("transmit_share", base.transmit_share)),
        rho=float(power.get("rho", base.rho)),
        a_max=float(power.get("a_max", base.a_max)),
        p_floor=float(power["p_floor"]) if "p_floor" in power else None,
    )


def load_scenario(path_or_name: str) -> Scenario:
    """Load a scenario from a YAML file, or return a named preset."""
    if path_or_name == "paper_default":
        return paper_default()
    try:
        with open(path_or_name) as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ScenarioError(
            f"scenario '{path_or_name}' is neither a preset name nor a readable file"
        ) from None
    return scenario_from_dict(data or {})


def with_ris_counts(scenario: Scenario, total_per_surface: int) -> Scenario:
    """Scenario with both RIS grids resized to `total_per_surface` elements."""
    cy = 4 if total_per_surface % 4 == 0 else (2 if total_per_surface % 2 == 0 else 1)
    cz = total_per_surface // cy
    return replace(
        scenario,
        ris1=replace(scenario.ris1, count_y=cy, count_z=cz),
        ris2=replace(scenario.ris2, count_y=cy, count_z=cz),
    )
