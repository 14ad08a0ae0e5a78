"""Command-line front end: ``oamaoa {estimate,nmse-sweep,capacity-sweep,scaling}``."""

import argparse
import os
import sys

import numpy as np

from . import experiments as ex
from .config import ConfigError, ExperimentConfig, load_config, parse_snr_list
from .flags import format_flags

EXIT_OK, EXIT_CONFIG, EXIT_FLAGGED = 0, 2, 3


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file of key = value settings")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--trials", type=int)
    common.add_argument("--snr-list", help="comma-separated SNRs in dB, e.g. 0,10,inf")
    common.add_argument("--sign-mode", choices=("genie", "prior", "none"))
    common.add_argument("--channel", choices=("exact", "approx"))
    common.add_argument("--workers", type=int, help="worker processes for Monte-Carlo trials")

    parser = argparse.ArgumentParser(prog="oamaoa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("estimate", parents=[common], help="one frame, one estimate (first SNR of --snr-list)")
    sub.add_parser("nmse-sweep", parents=[common], help="NMSE of both angles versus SNR")
    sub.add_parser("capacity-sweep", parents=[common], help="capacity with and without steering")
    sub.add_parser("scaling", parents=[common], help="estimator op counts versus U and P")
    return parser


def resolve_config(args):
    config = load_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    for name in ("seed", "trials", "workers"):
        if getattr(args, name) is not None:
            changes[name] = getattr(args, name)
    if args.sign_mode:
        changes["sign_mode"] = args.sign_mode
    if args.channel:
        changes["channel"] = args.channel
    if args.snr_list:
        snrs = parse_snr_list(args.snr_list)
        changes["snr_db"] = snrs
        changes["estimate_snr_db"] = snrs[0]
    return config.replace(**changes) if changes else config


def _deg(x):
    return f"{np.rad2deg(x):.6f} deg" if np.isfinite(x) else "nan"


def estimate_summary(config, report, snr_db):
    lines = [
        f"estimate at {snr_db} dB, seed {config.seed}, channel {config.channel}, sign mode {config.sign_mode}",
        f"true (phi, theta)      = ({config.phi_deg:.6f} deg, {config.theta_deg:.6f} deg)",
        f"estimated (phi, theta) = ({_deg(report.phi)}, {_deg(report.theta)})",
        f"gamma_hat  = {_deg(report.gamma)}",
        f"r_wrapped  = {report.r_wrapped:.9f} rad (per-mode variance {report.r_variance:.3e})",
        f"xi_wrapped = {report.xi_wrapped:.9f} rad",
        f"xi - r     = {report.delta:.9f} m",
        f"policy: {report.policy.describe()}",
        f"flags: {format_flags(report.flags) or 'none'}",
    ]
    return "\n".join(lines) + "\n"


def _table(columns, rows):
    out = ["  ".join(f"{c:>16}" for c in columns)]
    for row in rows:
        out.append("  ".join(f"{v:>16.6g}" if isinstance(v, float) else f"{v!s:>16}" for v in row))
    return "\n".join(out) + "\n"


def _write(out, name, text):
    with open(os.path.join(out, name), "w", encoding="utf-8") as fh:
        fh.write(text)


def run(args):
    config = resolve_config(args)
    os.makedirs(args.out, exist_ok=True)
    header = config.header_lines()
    flagged = 0.0

    if args.command == "estimate":
        snr = config.estimate_snr_db
        report, record = ex.estimate_once(config, snr)
        text = estimate_summary(config, report, snr)
        ex.write_csv(os.path.join(args.out, "records.csv"), ex.TrialRecord.COLUMNS, [record.row()], header)
        flagged = float(record.failed)
    elif args.command in ("nmse-sweep", "capacity-sweep"):
        if args.command == "nmse-sweep":
            result, name = ex.nmse_sweep(config), "nmse.csv"
            notes = header
        else:
            result, name = ex.capacity_sweep(config), "capacity.csv"
            notes = header + [f"capacity: {ex.CAPACITY_NOTE}", f"steering: {ex.STEERING_NOTE}"]
        ex.write_csv(os.path.join(args.out, name), result.columns, result.table, notes)
        ex.write_csv(os.path.join(args.out, "records.csv"), ex.TrialRecord.COLUMNS,
                     ex.records_rows(result.records), header)
        flagged = result.flagged_fraction
        text = f"{args.command}: {config.trials} trials per SNR, seed {config.seed}\n"
        text += "".join(f"{n}\n" for n in notes[len(header):])
        text += _table(result.columns, result.table)
        text += f"worst flagged fraction: {flagged:.4f}\n"
    else:
        rows = ex.scaling(config)
        ex.write_csv(os.path.join(args.out, "scaling.csv"), ex.SCALING_COLUMNS, rows, header)
        su, sp = ex.scaling_slopes(rows)
        text = _table(ex.SCALING_COLUMNS, rows)
        text += f"log-log slope of r-stage MACs in U: {su:.4f}\n"
        text += f"log-log slope of gamma-stage MACs in P: {sp:.4f}\n"

    text = f"config fingerprint {config.fingerprint()}\n" + text
    if flagged > config.max_flagged_fraction:
        text += f"FAILED: flagged fraction {flagged:.4f} exceeds {config.max_flagged_fraction}\n"
    _write(args.out, "report.txt", text)
    sys.stdout.write(text)
    return EXIT_FLAGGED if flagged > config.max_flagged_fraction else EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
