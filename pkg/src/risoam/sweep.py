"""Parameter sweeps over seeds and schemes with CSV (and JSON) persistence."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, replace

import yaml

from .geometry import Attitude
from .optimizer import AoConfig
from .scenario import Scenario, ScenarioError, load_scenario, scenario_from_dict, with_ris_counts
from .schemes import SCHEME_IDS, ResultRecord, UnknownSchemeError, run_scheme

RESULT_COLUMNS = (
    "scheme", "parameter", "value", "seed",
    "R_OAM", "R_B", "R_E", "C_B", "iterations", "wall_time",
)

SWEEP_PARAMETERS = ("P_total", "Q", "rho", "theta_Ay")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]
    seeds: tuple[int, ...]
    schemes: tuple[str, ...]
    scenario: Scenario

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ScenarioError(
                f"sweep parameter must be one of {SWEEP_PARAMETERS}, got '{self.parameter}'"
            )
        if not self.values or not self.seeds or not self.schemes:
            raise ScenarioError("sweep needs nonempty values, seeds and schemes")
        for scheme in self.schemes:
            if scheme not in SCHEME_IDS:
                raise UnknownSchemeError(f"unknown scheme '{scheme}' in sweep spec")


def apply_parameter(scenario: Scenario, parameter: str, value: float) -> Scenario:
    if parameter == "P_total":
        return replace(scenario, p_total=float(value))
    if parameter == "rho":
        return replace(scenario, rho=float(value))
    if parameter == "theta_Ay":
        alice = replace(
            scenario.alice,
            attitude=Attitude(scenario.alice.attitude.rot_x, float(value)),
        )
        return replace(scenario, alice=alice)
    if parameter == "Q":
        return with_ris_counts(scenario, int(value))
    raise ScenarioError(f"unsupported sweep parameter '{parameter}'")


def load_sweep_spec(path: str) -> SweepSpec:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ScenarioError("sweep spec must be a mapping")
    scen = data.get("scenario", "paper_default")
    if isinstance(scen, dict):
        scenario = scenario_from_dict(scen)
    else:
        scenario = load_scenario(str(scen))
    seeds = data.get("seeds", 1)
    if isinstance(seeds, int):
        seeds = list(range(seeds))
    return SweepSpec(
        parameter=str(data.get("parameter", "")),
        values=tuple(float(v) for v in data.get("values", ())),
        seeds=tuple(int(s) for s in seeds),
        schemes=tuple(str(s) for s in data.get("schemes", ("proposed",))),
        scenario=scenario,
    )


def _record_row(record: ResultRecord) -> list:
    return [
        record.scheme, record.parameter, repr(record.value), record.seed,
        repr(record.r_oam), repr(record.r_b), repr(record.r_e), repr(record.c_b),
        record.iterations, repr(record.wall_time),
    ]


def write_results_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(RESULT_COLUMNS)
        for record in records:
            writer.writerow(_record_row(record))


def run_sweep(
    spec: SweepSpec,
    out_path: str,
    json_mirror: str | None = None,
    config: AoConfig | None = None,
) -> list[ResultRecord]:
    """One record per (scheme, value, seed), flushed to CSV as each completes."""
    records: list[ResultRecord] = []
    try:
        with open(out_path, "w", newline="") as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
            writer.writerow(RESULT_COLUMNS)
            for value in spec.values:
                scenario = apply_parameter(spec.scenario, spec.parameter, value)
                for scheme in spec.schemes:
                    for seed in spec.seeds:
                        record = run_scheme(
                            scheme, scenario, seed, config=config,
                            parameter=spec.parameter, value=value,
                        )
                        records.append(record)
                        writer.writerow(_record_row(record))
                        fh.flush()
    except OSError as exc:
        raise RuntimeError(
            f"sweep output failed after {len(records)} completed rows: {exc}"
        ) from exc
    if json_mirror is not None:
        with open(json_mirror, "w") as fh:
            json.dump([asdict(r) for r in records], fh, indent=1)
    return records
