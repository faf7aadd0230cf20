"""Command-line front end.

Subcommands: efficiency, simulate, sweep, match, memory-check,
convert-check, thresholds.  Exit codes: 0 success, 1 invalid input,
2 numeric failure, 3 infeasible matching or failed check.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .analytics import check_conditions, efficiency, solve_matching
from .applications import (
    CavityBranch,
    ConverterSetup,
    MemorySetup,
    WaveguideBranch,
    converter_check,
    memory_check,
)
from .dynamics import (
    TimeGrid,
    adiabatic_thresholds,
    default_grid,
    simulate_cavity,
    simulate_waveguide,
    waveguide_adiabatic_threshold,
)
from .errors import (
    InfeasibleMatchingError,
    NumericFailureError,
    QTransferError,
)
from .params import CavityParams, ScenarioParams, WaveguideParams
from .pulses import PulseEnvelope
from .sweep import load_sweep_config, plot_script_path, run_sweep

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2
EXIT_INFEASIBLE = 3


class _CliExit(Exception):
    def __init__(self, code: int):
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; this front end uses 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _CliExit(EXIT_INVALID)


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _add_scenario_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--scenario", choices=("cavity", "waveguide"), required=True)
    sp.add_argument("--g-es", type=float, default=None, help="cavity: e-s vacuum Rabi frequency")
    sp.add_argument("--g-ef", type=float, default=0.0)
    sp.add_argument("--kappa-es", type=float, default=None, help="cavity: e-s mode half-loss rate")
    sp.add_argument("--kappa-ef", type=float, default=0.0)
    sp.add_argument("--Gamma-es", type=float, default=None, help="waveguide: guided e-s emission rate")
    sp.add_argument("--Gamma-ef", type=float, default=0.0)
    sp.add_argument("--gamma-es", type=float, default=0.0)
    sp.add_argument("--gamma-ef", type=float, default=0.0)
    sp.add_argument("--gamma-eo", type=float, default=0.0)


def _scenario_params(args, parser: argparse.ArgumentParser) -> ScenarioParams:
    if args.scenario == "cavity":
        if args.g_es is None or args.kappa_es is None:
            parser.error("cavity scenario requires --g-es and --kappa-es")
        return CavityParams(
            g_es=args.g_es,
            kappa_es=args.kappa_es,
            g_ef=args.g_ef,
            kappa_ef=args.kappa_ef,
            gamma_es=args.gamma_es,
            gamma_ef=args.gamma_ef,
            gamma_eo=args.gamma_eo,
        )
    if args.Gamma_es is None:
        parser.error("waveguide scenario requires --Gamma-es")
    return WaveguideParams(
        Gamma_es=args.Gamma_es,
        Gamma_ef=args.Gamma_ef,
        gamma_es=args.gamma_es,
        gamma_ef=args.gamma_ef,
        gamma_eo=args.gamma_eo,
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="qtransfer", allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    sp = sub.add_parser("efficiency", parents=[], help="closed-form transfer efficiency report")
    _add_scenario_args(sp)
    sp.add_argument("--factor", type=float, default=10.0, help="threshold for 'much greater than 1'")
    sp.add_argument("--matching-tol", type=float, default=0.01)

    sp = sub.add_parser("simulate", help="single run; writes the trajectory CSV")
    _add_scenario_args(sp)
    sp.add_argument("--envelope", choices=("gaussian", "antisymmetric", "tabulated"), default="gaussian")
    sp.add_argument("--delta-omega", type=float, default=None, help="bandwidth of the analytic envelope")
    sp.add_argument("--envelope-csv", type=Path, default=None, help="samples for --envelope tabulated")
    sp.add_argument("--output", type=Path, required=True, help="trajectory CSV path")
    sp.add_argument("--t-start", type=float, default=None)
    sp.add_argument("--t-end", type=float, default=None)
    sp.add_argument("--step", type=float, default=None)
    sp.add_argument("--stop-norm", type=float, default=1e-12)
    sp.add_argument("--record-every", type=int, default=1)

    sp = sub.add_parser("sweep", help="bandwidth sweep from a config file")
    sp.add_argument("--config", type=Path, required=True)

    sp = sub.add_parser("match", help="solve the channel-balance condition for one parameter")
    _add_scenario_args(sp)
    sp.add_argument("--free", required=True, help="parameter to solve for, e.g. g-ef or Gamma-ef")

    sp = sub.add_parser("thresholds", help="adiabatic thresholds of the scenario")
    _add_scenario_args(sp)

    sp = sub.add_parser("memory-check", help="polarization-branch symmetry check")
    sp.add_argument("--scenario", choices=("cavity", "waveguide"), required=True)
    sp.add_argument("--g-plus", type=float, default=None)
    sp.add_argument("--g-minus", type=float, default=None)
    sp.add_argument("--kappa-plus", type=float, default=None)
    sp.add_argument("--kappa-minus", type=float, default=None)
    sp.add_argument("--Gamma-plus", type=float, default=None)
    sp.add_argument("--Gamma-minus", type=float, default=None)
    sp.add_argument("--rel-tol", type=float, default=1e-3)

    sp = sub.add_parser("convert-check", help="guided-vs-background check for the four converter branches")
    sp.add_argument("--scenario", choices=("cavity", "waveguide"), required=True)
    for branch in ("high-plus", "high-minus", "low-plus", "low-minus"):
        sp.add_argument(f"--g-{branch}", type=float, default=None)
        sp.add_argument(f"--kappa-{branch}", type=float, default=None)
        sp.add_argument(f"--Gamma-{branch}", type=float, default=None)
        sp.add_argument(f"--gamma-{branch}", type=float, default=0.0)
    sp.add_argument("--factor", type=float, default=10.0)

    return parser


def _cmd_efficiency(args, parser) -> int:
    p = _scenario_params(args, parser)
    report = efficiency(p)
    check = check_conditions(report, p, factor=args.factor, matching_tol=args.matching_tol)
    print(f"eta = {_fmt(report.eta)}")
    print(f"eta_sf = {_fmt(report.eta_sf)}")
    print(f"chi_es = {_fmt(report.chi_es)}")
    print(f"chi_ef = {_fmt(report.chi_ef)}")
    print(f"matching_ratio = {_fmt(report.matching_ratio)}")
    print(f"matching_deviation = {_fmt(check.matching_deviation)}")
    print(f"coupling_ratio = {_fmt(check.coupling_ratio)}")
    print(f"limiting_factor = {report.limiting_factor.value}")
    print(f"matching_ok = {str(check.matching_ok).lower()}")
    print(f"coupling_ok = {str(check.coupling_ok).lower()}")
    return EXIT_OK


def _cmd_simulate(args, parser) -> int:
    p = _scenario_params(args, parser)
    if args.envelope == "tabulated":
        if args.envelope_csv is None:
            parser.error("--envelope tabulated requires --envelope-csv")
        env = PulseEnvelope.from_csv(args.envelope_csv)
    else:
        if args.delta_omega is None:
            parser.error(f"--envelope {args.envelope} requires --delta-omega")
        env = (
            PulseEnvelope.gaussian(args.delta_omega)
            if args.envelope == "gaussian"
            else PulseEnvelope.antisymmetric(args.delta_omega)
        )
    base = default_grid(env, p, stop_norm=args.stop_norm)
    grid = TimeGrid(
        t_start=base.t_start if args.t_start is None else args.t_start,
        t_end=base.t_end if args.t_end is None else args.t_end,
        step=base.step if args.step is None else args.step,
        stop_norm=args.stop_norm,
    )
    simulate = simulate_cavity if args.scenario == "cavity" else simulate_waveguide
    trajectory, outcome = simulate(p, env, grid, record_every=args.record_every)
    trajectory.to_csv(args.output)
    print(f"wrote {args.output} ({trajectory.times.size} samples)")
    print(f"P_sf = {_fmt(outcome.P_sf)}")
    print(f"P_other = {_fmt(outcome.P_other)}")
    print(f"P_back_bg = {_fmt(outcome.P_back_bg)}")
    print(f"P_back = {_fmt(outcome.P_back)}")
    print(f"input_norm = {_fmt(outcome.input_norm)}")
    print(f"residual_norm = {_fmt(outcome.residual_norm)}")
    print("adiabaticity = " + ", ".join(_fmt(r) for r in outcome.adiabaticity))
    return EXIT_OK


def _cmd_sweep(args, parser) -> int:
    cfg = load_sweep_config(args.config)
    table = run_sweep(cfg)
    print(f"wrote {cfg.output_path} ({len(table.rows)} rows)")
    print(f"wrote {plot_script_path(cfg.output_path)}")
    return EXIT_OK


def _cmd_match(args, parser) -> int:
    p = _scenario_params(args, parser)
    free = args.free.replace("-", "_")
    value = solve_matching(p, free)
    print(f"{free} = {_fmt(value)}")
    return EXIT_OK


def _cmd_thresholds(args, parser) -> int:
    p = _scenario_params(args, parser)
    if args.scenario == "cavity":
        kappa, lam_plus, lam_minus = adiabatic_thresholds(p)
        print(f"kappa_es = {_fmt(kappa)}")
        print(f"lambda_plus = {_fmt(lam_plus)}")
        print(f"lambda_minus = {_fmt(lam_minus)}")
    else:
        print(f"half_total_decay = {_fmt(waveguide_adiabatic_threshold(p))}")
    return EXIT_OK


def _cmd_memory_check(args, parser) -> int:
    if args.scenario == "cavity":
        for name in ("g_plus", "g_minus", "kappa_plus", "kappa_minus"):
            if getattr(args, name) is None:
                parser.error(f"cavity memory-check requires --{name.replace('_', '-')}")
        setup = MemorySetup(
            sigma_plus=CavityParams(g_es=args.g_plus, kappa_es=args.kappa_plus),
            sigma_minus=CavityParams(g_es=args.g_minus, kappa_es=args.kappa_minus),
        )
    else:
        if args.Gamma_plus is None or args.Gamma_minus is None:
            parser.error("waveguide memory-check requires --Gamma-plus and --Gamma-minus")
        setup = MemorySetup(
            sigma_plus=WaveguideParams(Gamma_es=args.Gamma_plus),
            sigma_minus=WaveguideParams(Gamma_es=args.Gamma_minus),
        )
    report = memory_check(setup, rel_tol=args.rel_tol)
    for name, value in report.mismatches.items():
        print(f"mismatch_{name} = {_fmt(value)}")
    print("verdict = " + ("pass" if report.passed else "fail"))
    return EXIT_OK if report.passed else EXIT_INFEASIBLE


def _cmd_convert_check(args, parser) -> int:
    branches = {}
    for branch in ("high_plus", "high_minus", "low_plus", "low_minus"):
        gamma = getattr(args, f"gamma_{branch}")
        if args.scenario == "cavity":
            g = getattr(args, f"g_{branch}")
            kappa = getattr(args, f"kappa_{branch}")
            if g is None or kappa is None:
                parser.error(
                    f"cavity convert-check requires --g-{branch.replace('_', '-')} "
                    f"and --kappa-{branch.replace('_', '-')}"
                )
            branches[branch] = CavityBranch(g=g, kappa=kappa, gamma=gamma)
        else:
            big_gamma = getattr(args, f"Gamma_{branch}")
            if big_gamma is None:
                parser.error(f"waveguide convert-check requires --Gamma-{branch.replace('_', '-')}")
            branches[branch] = WaveguideBranch(Gamma=big_gamma, gamma=gamma)
    setup = ConverterSetup(**branches)
    report = converter_check(setup, factor=args.factor)
    for name, ratio in report.ratios.items():
        print(f"ratio_{name} = {_fmt(ratio)}")
    print("verdict = " + ("pass" if report.passed else "fail"))
    return EXIT_OK if report.passed else EXIT_INFEASIBLE


_COMMANDS = {
    "efficiency": _cmd_efficiency,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "match": _cmd_match,
    "thresholds": _cmd_thresholds,
    "memory-check": _cmd_memory_check,
    "convert-check": _cmd_convert_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_INVALID
        return _COMMANDS[args.command](args, parser)
    except _CliExit as exc:
        return exc.code
    except InfeasibleMatchingError as exc:
        print(f"qtransfer: infeasible matching: {exc} (deficit = {_fmt(exc.deficit)})", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericFailureError as exc:
        print(f"qtransfer: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except QTransferError as exc:
        print(f"qtransfer: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"qtransfer: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
