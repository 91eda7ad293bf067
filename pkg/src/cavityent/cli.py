"""Command-line interface: ``cavityent <subcommand> [flags]``.

Exit codes: 0 success, 1 validation failure, 2 usage or configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from . import config as cfg
from .dynamics import solve_steady_state
from .entanglement import LOG_BASE, atom_measured_negativity, traced_negativity
from .errors import ConfigError, InvalidStateError, NumericalError
from .model import ModelParams, effective_to_physical, mode_populations
from .scans import (
    Axis,
    ScanResult,
    columns,
    jump_diagnostic,
    scan_steady,
    scan_time,
    steady_scan_spec,
    time_scan_spec,
    time_series,
)
from .validation import CHECKS, validate

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

log = logging.getLogger("cavityent")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(parser: argparse.ArgumentParser) -> None:
    # every flag defaults to None so config-file values can fill the gaps
    add = parser.add_argument
    add("--g-a", type=float, help="coupling of mode a (default 1)")
    add("--g-b", type=float, help="coupling of mode b (default 1)")
    add("--kappa", type=float, help="decay rate of both cavities")
    add("--gamma", type=float, help="atomic decay rate (default 0.2)")
    add("--n-t", type=float, help="mean thermal photon number of the noise (default 1)")
    add("--cutoff", type=int, help="photon-number cutoff (default 3)")
    add("--t-max", type=float, help="final time in units of 1/g_a (default 20)")
    add("--dt", type=float, help="RK4 step (default 0.01 / fastest rate)")
    add("--grid-nt", type=int, help="points on the n_t axis")
    add("--grid-kappa", type=int, help="points on the kappa axis")
    add("--grid-t", type=int, help="points on the time axis")
    add("--nt-min", type=float, help="lower end of the n_t axis (default 0.05)")
    add("--nt-max", type=float, help="upper end of the n_t axis (default 5)")
    add("--kappa-min", type=float, help="lower end of the kappa axis (default 0.05)")
    add("--kappa-max", type=float, help="upper end of the kappa axis (default 10)")
    add("--log-base", type=float, help="logarithm base of the negativity (default 2)")
    add("--jobs", type=int, help="worker processes for scans (default 1)")
    add("--out", help="output path (default: standard output)")
    add("--config", help="key = value configuration file")
    add("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cavityent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "scan-time": "negativity over noise intensity and time (CSV)",
        "scan-steady": "steady-state negativity over noise intensity and cavity decay (CSV)",
        "jump-diag": "negativity before and after a cavity photon jump (JSON)",
        "steady": "steady state at one parameter point (JSON)",
        "evolve": "time evolution at one parameter point (CSV)",
        "validate": "run the named acceptance checks (JSON report)",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        _common(p)
        if name == "validate":
            p.add_argument("--only", action="append", choices=list(CHECKS),
                           help="run only this check (repeatable)")
    return parser


def _settings(args) -> dict:
    flags = {k: v for k, v in vars(args).items() if k in cfg.KEYS}
    file_values = cfg.load_config(args.config) if args.config else {}
    return cfg.merge(file_values, flags)


def _params(s: dict, kappa_default: float = 1.0) -> ModelParams:
    base = {k: s[k] for k in ("g_a", "g_b", "gamma", "n_t", "cutoff") if k in s}
    return ModelParams(**base).with_kappa(s.get("kappa", kappa_default))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _n_axis(s: dict, default_num: int) -> Axis:
    return Axis("n_t", s.get("nt_min", 0.05), s.get("nt_max", 5.0), s.get("grid_nt", default_num))


def cmd_scan_time(s: dict) -> int:
    params = _params(s, kappa_default=2.0)
    spec = time_scan_spec(kappa=params.kappa, t_max=s.get("t_max", 20.0), g_a=params.g_a,
                          g_b=params.g_b, gamma=params.gamma, cutoff=params.cutoff)
    t_axis = Axis("t", 0.0, spec.axis("t").stop, s.get("grid_t", 81))
    spec = replace(spec, axes=(_n_axis(s, 21), t_axis), dt=s.get("dt"),
                   log_base=s.get("log_base", LOG_BASE), jobs=s.get("jobs", 1))
    _emit(scan_time(spec).to_csv(), s.get("out"))
    return EXIT_OK


def cmd_scan_steady(s: dict) -> int:
    params = _params(s)
    if "kappa" in s:
        log.warning("--kappa is ignored by scan-steady; use --kappa-min/--kappa-max")
    spec = steady_scan_spec(g_a=params.g_a, g_b=params.g_b, gamma=params.gamma,
                            cutoff=params.cutoff)
    k_axis = Axis("kappa", s.get("kappa_min", 0.05), s.get("kappa_max", 10.0),
                  s.get("grid_kappa", 25), "log")
    spec = replace(spec, axes=(_n_axis(s, 25), k_axis),
                   log_base=s.get("log_base", LOG_BASE), jobs=s.get("jobs", 1))
    _emit(scan_steady(spec).to_csv(), s.get("out"))
    return EXIT_OK


def cmd_jump_diag(s: dict) -> int:
    record = jump_diagnostic(_params(s), s.get("log_base", LOG_BASE))
    _emit(_json(record), s.get("out"))
    return EXIT_OK


def cmd_steady(s: dict) -> int:
    params = _params(s)
    sol = solve_steady_state(params, params.layout())
    phys = effective_to_physical(sol.state, params)
    base = s.get("log_base", LOG_BASE)
    pops = mode_populations(sol.state)
    record = {
        **{k: getattr(params, k) for k in ("g_a", "g_b", "gamma", "n_t", "cutoff")},
        "kappa": params.kappa,
        "neg_traced": traced_negativity(phys, base).value,
        "neg_measured": atom_measured_negativity(phys, base).expected_negativity,
        "populations": [float(p) for p in pops],
        "top_level_population": float(pops[-1]),
        "residual": sol.residual,
        "pivot_ratio": sol.pivot_ratio,
    }
    _emit(_json(record), s.get("out"))
    return EXIT_OK


def cmd_evolve(s: dict) -> int:
    params = _params(s)
    times = np.linspace(0.0, s.get("t_max", 20.0), s.get("grid_t", 81))
    rows = time_series(params, times, s.get("dt"), s.get("log_base", LOG_BASE))
    _emit(ScanResult(columns(params.cutoff), rows).to_csv(), s.get("out"))
    return EXIT_OK


def cmd_validate(s: dict, only) -> int:
    report = validate({"only": only, "log_base": s.get("log_base", LOG_BASE),
                       "jobs": s.get("jobs", 1)})
    _emit(_json(report), s.get("out"))
    for check in report["checks"]:
        print(f"{check['status'].upper():4s}  {check['criterion']:2d}  {check['name']}",
              file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


COMMANDS = {
    "scan-time": cmd_scan_time,
    "scan-steady": cmd_scan_steady,
    "jump-diag": cmd_jump_diag,
    "steady": cmd_steady,
    "evolve": cmd_evolve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        s = _settings(args)
        if args.command == "validate":
            return cmd_validate(s, args.only)
        return COMMANDS[args.command](s)
    except (NumericalError, InvalidStateError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
