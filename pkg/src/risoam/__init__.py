"""Secrecy-rate workbench for double-RIS assisted OAM near-field links."""

from .channel import ChannelSet, LinkParams, SingularDistanceError, build_channel_set, los_channel
from .geometry import (
    Attitude,
    EmptyGeometryError,
    RisSpec,
    UcaSpec,
    eve_center,
    ris_element_positions,
    rotation_matrix_x,
    rotation_matrix_y,
    uca_element_positions,
)
from .manifold import RcgConfig, RcgResult, rcg_minimize
from .oam import (
    OamCodebook,
    RateReport,
    RisState,
    SnPair,
    TransmitState,
    enumerate_sn_pairs,
    idft_matrix,
    index_mutual_info_mc,
    rate_report,
    zc_weights,
)
from .optimizer import AoConfig, AoTrace, DesignPoint, LinkBudget, alternating_optimize, optimize_design
from .scenario import Scenario, load_scenario, paper_default
from .schemes import SCHEME_IDS, ResultRecord, run_scheme, run_scheme_detailed
from .solvers import AmplifierProblem, InfeasibleError, PowerProblem, solve_amplifier, solve_power
from .sweep import SweepSpec, run_sweep

__version__ = "0.1.0"

__all__ = [
    "AmplifierProblem",
    "AoConfig",
    "AoTrace",
    "Attitude",
    "ChannelSet",
    "DesignPoint",
    "EmptyGeometryError",
    "InfeasibleError",
    "LinkBudget",
    "LinkParams",
    "OamCodebook",
    "PowerProblem",
    "RateReport",
    "RcgConfig",
    "RcgResult",
    "ResultRecord",
    "RisSpec",
    "RisState",
    "SCHEME_IDS",
    "Scenario",
    "SingularDistanceError",
    "SnPair",
    "SweepSpec",
    "TransmitState",
    "UcaSpec",
    "alternating_optimize",
    "build_channel_set",
    "enumerate_sn_pairs",
    "eve_center",
    "idft_matrix",
    "index_mutual_info_mc",
    "load_scenario",
    "los_channel",
    "optimize_design",
    "paper_default",
    "rate_report",
    "rcg_minimize",
    "ris_element_positions",
    "rotation_matrix_x",
    "rotation_matrix_y",
    "run_scheme",
    "run_scheme_detailed",
    "run_sweep",
    "solve_amplifier",
    "solve_power",
    "uca_element_positions",
    "zc_weights",
]
