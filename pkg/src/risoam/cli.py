"""Command-line front end: optimize, sweep, ber, validate, codebook."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict

from . import validate as validation
from .ber import BER_COLUMNS, ber_monte_carlo
from .oam import enumerate_sn_pairs
from .scenario import load_scenario
from .schemes import SCHEME_IDS, run_scheme_detailed
from .sweep import load_sweep_spec, run_sweep


def _add_optimize(sub):
    p = sub.add_parser("optimize", help="run one optimization and export its trace")
    p.add_argument("--scenario", default="paper_default",
                   help="scenario YAML path or preset name")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="trace CSV output path")
    p.add_argument("--scheme", default="proposed", choices=SCHEME_IDS)
    p.add_argument("--pair", type=int, default=0, help="SN pair index to optimize for")
    p.add_argument("--design-out", default=None, help="optional design-point JSON path")


def _add_sweep(sub):
    p = sub.add_parser("sweep", help="run a parameter sweep from a spec file")
    p.add_argument("--spec", required=True, help="sweep spec YAML path")
    p.add_argument("--out", required=True, help="result CSV output path")
    p.add_argument("--json", default=None, help="optional JSON mirror path")


def _add_ber(sub):
    p = sub.add_parser("ber", help="optimize, then run the QPSK BER Monte Carlo")
    p.add_argument("--scenario", default="paper_default")
    p.add_argument("--snr", required=True, help="comma-separated transmit SNR list in dB")
    p.add_argument("--frames", type=int, default=10000)
    p.add_argument("--out", required=True, help="BER CSV output path")
    p.add_argument("--scheme", default="proposed", choices=SCHEME_IDS)
    p.add_argument("--seed", type=int, default=0)


def _add_validate(sub):
    sub.add_parser("validate", help="run the invariant suite and report pass/fail")


def _add_codebook(sub):
    p = sub.add_parser("codebook", help="print the SN pair codebook")
    p.add_argument("--N", type=int, required=True, dest="n_modes")
    p.add_argument("--NA", type=int, required=True, dest="n_low")
    p.add_argument("--Ns", type=int, required=True, dest="n_signal")
    p.add_argument("--Nz", type=int, required=True, dest="n_an")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="risoam",
        description="Double-RIS OAM secrecy-rate workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_optimize(sub)
    _add_sweep(sub)
    _add_ber(sub)
    _add_validate(sub)
    _add_codebook(sub)
    args = parser.parse_args(argv)

    if args.command == "optimize":
        scenario = load_scenario(args.scenario)
        record, design, trace = run_scheme_detailed(
            args.scheme, scenario, args.seed, pair_index=args.pair
        )
        trace.write_csv(args.out)
        if args.design_out:
            payload = {
                "p_s": design.p_s.tolist(),
                "a": design.a.tolist(),
                "theta1": [[z.real, z.imag] for z in design.theta1],
                "theta2": [[z.real, z.imag] for z in design.theta2],
            }
            with open(args.design_out, "w") as fh:
                json.dump(payload, fh)
        print(
            f"{args.scheme}: R_OAM={record.r_oam:.6g} R_B={record.r_b:.6g} "
            f"R_E={record.r_e:.6g} C_B={record.c_b:.6g} "
            f"iterations={record.iterations} ({record.wall_time:.2f}s)"
        )
        return 0

    if args.command == "sweep":
        spec = load_sweep_spec(args.spec)
        records = run_sweep(spec, args.out, json_mirror=args.json)
        print(f"wrote {len(records)} rows to {args.out}")
        return 0

    if args.command == "ber":
        scenario = load_scenario(args.scenario)
        snr_list = [float(v) for v in args.snr.split(",") if v.strip()]
        _, design, _ = run_scheme_detailed(args.scheme, scenario, args.seed)
        points = ber_monte_carlo(
            scenario, design, snr_list, args.frames, seed=args.seed, scheme=args.scheme
        )
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(BER_COLUMNS)
            for pt in points:
                row = asdict(pt)
                writer.writerow([row[c] if c in ("bits",) else repr(row[c]) for c in BER_COLUMNS])
        print(f"wrote {len(points)} BER points to {args.out}")
        return 0

    if args.command == "validate":
        return validation.run_all()

    if args.command == "codebook":
        codebook = enumerate_sn_pairs(args.n_modes, args.n_low, args.n_signal, args.n_an)
        for index, pair in enumerate(codebook.pairs):
            signal = " ".join(str(m) for m in pair.signal_modes)
            an = " ".join(str(m) for m in pair.an_modes)
            print(f"{index}, {signal}, {an}")
        return 0

    return 1  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
