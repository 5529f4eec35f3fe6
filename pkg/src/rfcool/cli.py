"""Command-line entry point: design, simulate, sweep and validate."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from rfcool.config import load_config
from rfcool.errors import ConfigError, RfcoolError
from rfcool.output import FORMATS, fmt, render_csv, render_design, render_summary, report_record, round6
from rfcool.runner import run_envelope, run_fullscale
from rfcool.sweep import SweepGrid, run_sweep

SWEEP_TEXT_COLUMNS = ("gamma_prime_s", "kappa", "phi_rad", "teff_ratio", "stable")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("usage-error", message)
        sys.exit(2)


def _emit_error(code: str, message: str, details: list[str] | None = None) -> None:
    payload = {"error": code, "message": message}
    if details:
        payload["details"] = details
    print(json.dumps(payload), file=sys.stderr)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _common(p: argparse.ArgumentParser, out_help: str = "write output here instead of stdout") -> None:
    p.add_argument("--config", required=True, help="config file path or shipped example name")
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", help=out_help)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rfcool", description="RF cold-damping design and simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("design", help="closed-form design report")
    _common(p)

    p = sub.add_parser("validate", help="check a config and print its warnings")
    p.add_argument("--config", required=True)

    p = sub.add_parser("simulate", help="time-domain simulation")
    sim = p.add_subparsers(dest="model", required=True, parser_class=_Parser)
    e = sim.add_parser("envelope", help="stochastic slow-timescale simulation")
    _common(e, "trajectory CSV path (a .json sidecar is written next to it)")
    e.add_argument("--seed", type=int)
    e.add_argument("--n-seeds", type=int)
    e.add_argument("--workers", type=int)
    e.add_argument("--allow-unstable", action="store_true")
    f = sim.add_parser("fullscale", help="RF-resolved circuit and beam co-simulation")
    _common(f, "trajectory CSV path (a .json sidecar is written next to it)")

    p = sub.add_parser("sweep", help="design report over a one-parameter grid")
    _common(p)
    p.set_defaults(format="csv")
    p.add_argument("--param", required=True, help="section.key, e.g. circuit.v_max_v")
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--scale", choices=("linear", "log"), default="linear")
    p.add_argument("--values", help="comma-separated explicit values instead of a range")
    p.add_argument("--workers", type=int)
    return parser


def _design(args) -> int:
    record = report_record(load_config(args.config))
    _write(render_design(record, args.format), args.out)
    return 0


def _validate(args) -> int:
    config = load_config(args.config)
    record = report_record(config)
    print(json.dumps({"valid": True, "sections": sorted(config.sections),
                      "warnings": record["warnings"], "assumption_flags": record["assumption_flags"]}))
    return 0


def _parse_values(text: str) -> tuple:
    values = []
    for item in text.split(","):
        item = item.strip()
        try:
            values.append(float(item))
        except ValueError:
            values.append(item)
    return tuple(values)


def _sweep(args) -> int:
    config = load_config(args.config)
    values = _parse_values(args.values) if args.values else None
    grid = SweepGrid(args.param, args.start, args.stop, args.steps, args.scale, values)
    result = run_sweep(config, grid, workers=args.workers)
    rows = result.rows()
    if args.format == "csv":
        text = render_csv(rows)
    elif args.format == "json":
        text = json.dumps(round6(rows), indent=2) + "\n"
    else:
        cols = (args.param,) + SWEEP_TEXT_COLUMNS
        lines = ["  ".join(f"{c:>14}" for c in cols)]
        lines += ["  ".join(f"{fmt(row[c]):>14}" for c in cols) for row in rows]
        text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return 0


def _simulate(args) -> int:
    config = load_config(args.config)
    if args.model == "envelope":
        summary = run_envelope(config, seed=args.seed, n_seeds=args.n_seeds, out=args.out,
                               allow_unstable=args.allow_unstable, workers=args.workers)
    else:
        summary = run_fullscale(config, out=args.out)
    sys.stdout.write(render_summary(summary, args.format))
    return 0


COMMANDS = {"design": _design, "validate": _validate, "sweep": _sweep, "simulate": _simulate}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        _emit_error(exc.code, str(exc), exc.errors)
        return exc.exit_code
    except RfcoolError as exc:
        _emit_error(exc.code, str(exc))
        return exc.exit_code
    except OSError as exc:
        _emit_error("io-error", str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
