"""Command-line entry point for dynamap.

    python main.py basis --dim N [--out PATH]
    python main.py analyze --scenario PATH --time T [--out PATH] [--format json|csv]
    python main.py sweep --scenario PATH --t0 A --t1 B --steps K [--out PATH] [--format json|csv]
    python main.py demo [--zero-correlations] [--out DIR]
    python main.py selftest

Global options (before the command): --seed N, --tol KEY=VALUE, --verbose.

Exit status reports whether the command could run; CP verdicts are report content.
"""
import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, TextIO, Tuple

import config as cfg
import logger_setup as logger_module
from acceptance import run_acceptance
from analysis import analyze_decomposition, default_samples, summarize_sweep, time_sweep
from errors import DynamapError
from matrix_core import DensityMatrix
from operator_basis import basis_to_dict, build_hermitian_basis
from reduced_dynamics import assignment_is_physical
from scenario_io import TimeGrid, demo_scenario, load_scenario, write_reports, write_scenario

logger = logger_module.logger

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

COMMANDS = ('basis', 'analyze', 'sweep', 'demo', 'selftest')


@dataclass
class RunConfig:
    """Parsed command line."""
    command: str
    scenario_path: Optional[str] = None
    dim: Optional[int] = None
    time: Optional[float] = None
    time_grid: Optional[Tuple[float, float, int]] = None
    output_path: Optional[str] = None
    format: str = 'json'
    seed: int = 42
    zero_correlations: bool = False
    tolerance_overrides: Dict[str, float] = field(default_factory=dict)
    verbose: bool = False

    def validate(self):
        """
        Check that the fields the command needs are present.

        Raises:
            ValueError: On a missing or invalid field
        """
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command '{self.command}'")
        if self.command == 'basis' and (self.dim is None or self.dim < 1):
            raise ValueError(f"--dim must be a positive integer, got {self.dim}")
        if self.command in ('analyze', 'sweep') and not self.scenario_path:
            raise ValueError("--scenario is required")
        if self.command == 'analyze' and self.time is None:
            raise ValueError("--time is required")
        if self.command == 'analyze' and not math.isfinite(self.time):
            raise ValueError(f"--time must be finite, got {self.time}")
        if self.command == 'sweep':
            if self.time_grid is None:
                raise ValueError("--t0, --t1 and --steps are required")
            start, stop, steps = self.time_grid
            if not (math.isfinite(start) and math.isfinite(stop)):
                raise ValueError(f"--t0 and --t1 must be finite, got ({start}, {stop})")
            if steps < 1 or stop < start:
                raise ValueError(f"Invalid grid: need steps >= 1 and t1 >= t0, got ({start}, {stop}, {steps})")
        if self.format not in ('json', 'csv'):
            raise ValueError(f"Unknown format '{self.format}'")


def _emit(text: str, out: Optional[str]):
    if out:
        directory = os.path.dirname(out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(out, 'w') as f:
            f.write(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def cmd_basis(dim: int, out: Optional[str] = None) -> int:
    """Export the Hermitian basis and its Gram residual."""
    if dim < 1:
        logger.error(f"Invalid basis dimension {dim}")
        print(f"error: --dim must be >= 1, got {dim}", file=sys.stderr)
        return EXIT_USAGE

    data = basis_to_dict(build_hermitian_basis(dim))
    _emit(json.dumps(data, indent=cfg.config.output['json_indent']) + '\n', out)

    if data['gram_residual'] > cfg.config.tol_eq:
        logger.error(f"Gram residual {data['gram_residual']:.3e} exceeds tol_eq {cfg.config.tol_eq:.1e}")
        return EXIT_FAILED
    logger.info(f"Basis N={dim}: {len(data['elements'])} elements, Gram residual {data['gram_residual']:.3e}")
    return EXIT_OK


def cmd_analyze(scenario_path: str, t: float, out: Optional[str] = None, fmt: str = 'json',
                seed: Optional[int] = None) -> int:
    """Analyze one scenario at one time."""
    doc = load_scenario(scenario_path)
    samples = default_samples(doc.scenario.system_dim, seed=seed)
    report = analyze_decomposition(doc.scenario, doc.assignment, t, samples)
    write_reports([report], out or sys.stdout, fmt)
    logger.info(f"t={t:.6g}: is_cp_full={report.is_cp}, is_cp_cp_part={report.is_cp_cp_part}")
    return EXIT_OK


def cmd_sweep(scenario_path: str, grid: Tuple[float, float, int], out: Optional[str] = None,
              fmt: str = 'csv', seed: Optional[int] = None) -> int:
    """Sweep a scenario over an evenly spaced time grid."""
    doc = load_scenario(scenario_path)
    times = TimeGrid(*grid).times()
    samples = default_samples(doc.scenario.system_dim, seed=seed)
    reports = time_sweep(doc.scenario, doc.assignment, times, samples)
    write_reports(reports, out or sys.stdout, fmt)

    summary = summarize_sweep(reports)
    logger.info(f"Sweep done: {summary['non_cp_points']} of {summary['points']} points not CP "
                f"(min Choi eigenvalue {summary['min_choi_full']:.3e})")
    return EXIT_OK


def cmd_demo(out_dir: Optional[str] = None, zero_correlations: bool = False, seed: Optional[int] = None,
             stream: Optional[TextIO] = None) -> int:
    """
    Write the bundled scenario, sweep it and summarize the CP witness.

    Args:
        out_dir: Directory for the scenario, sweep CSV and summary (default: demo_output)
        zero_correlations: Zero b and c (product assignment)
        seed: Sample seed
        stream: Where the summary is printed

    Returns:
        Exit status; nonzero if the demo fails its own checks
    """
    stream = stream or sys.stdout
    out_dir = out_dir or 'demo_output'
    doc = demo_scenario(zero_correlations=zero_correlations)
    scenario_path = os.path.join(out_dir, 'scenario.json')
    write_scenario(doc, scenario_path)

    reloaded = load_scenario(scenario_path)
    problems: List[str] = []
    if not reloaded.same_as(doc):
        problems.append("scenario did not survive the write/read round trip")

    physical, lowest = assignment_is_physical(doc.assignment, doc.scenario,
                                              DensityMatrix.maximally_mixed(doc.scenario.system_dim))
    if not physical:
        problems.append(f"assignment is not a joint state at the maximally mixed state (min eigenvalue {lowest:.3e})")

    samples = default_samples(doc.scenario.system_dim, seed=seed)
    reports = time_sweep(reloaded.scenario, reloaded.assignment, reloaded.times.times(), samples)
    write_reports(reports, os.path.join(out_dir, 'sweep.csv'), 'csv')

    summary = summarize_sweep(reports)
    summary['assignment_min_eigenvalue'] = lowest
    with open(os.path.join(out_dir, 'summary.json'), 'w') as f:
        json.dump(summary, f, indent=cfg.config.output['json_indent'])
        f.write('\n')

    if not summary['all_cp_part']:
        problems.append("CP part failed the CP check")
    if zero_correlations:
        if summary['witness_time'] is not None or summary['max_abs_d'] > cfg.config.tol_eq:
            problems.append("product assignment produced a CP violation or nonzero d")
    elif summary['witness_time'] is None or summary['min_choi_full'] > -1e-3:
        problems.append("no CP violation of the full map found")

    print(f"scenario: {summary['label']} ({summary['points']} time points)", file=stream)
    if summary['witness_time'] is None:
        print("full linear map: completely positive at every time point", file=stream)
    else:
        print(f"full linear map: not CP at {summary['non_cp_points']} point(s); "
              f"witness t = {summary['witness_time']:.6g}, min Choi eigenvalue {summary['min_choi_full']:.6g}",
              file=stream)
    print(f"CP part: max Choi deficit {summary['max_cp_part_deficit']:.3e}", file=stream)
    print(f"max |d|: {summary['max_abs_d']:.6g}; max equivalence residual {summary['max_equivalence_residual']:.3e}",
          file=stream)

    for problem in problems:
        logger.error(f"Demo check failed: {problem}")
    return EXIT_FAILED if problems else EXIT_OK


def cmd_selftest(seed: Optional[int] = None, stream: Optional[TextIO] = None) -> int:
    """Run the acceptance suite; exit 0 iff every criterion passes."""
    stream = stream or sys.stdout
    results = run_acceptance(seed)
    for result in results:
        print(result.line(), file=stream)
    failed = sum(1 for r in results if not r.passed)
    print(f"{len(results) - failed}/{len(results)} criteria passed", file=stream)
    return EXIT_FAILED if failed else EXIT_OK


def _tolerance_override(text: str) -> Tuple[str, float]:
    key, sep, value = text.partition('=')
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got '{text}'")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance value must be a number, got '{value}'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='dynamap',
                                     description="Linear and affine maps of density matrices.")
    parser.add_argument('--seed', type=int, default=cfg.config.sampling['seed'], help="Sample seed")
    parser.add_argument('--verbose', action='store_true', help="Log at DEBUG level")
    parser.add_argument('--tol', type=_tolerance_override, action='append', default=[], metavar='KEY=VALUE',
                        help="Override a tolerance (herm, eq, psd)")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('basis', help="Export the Hermitian basis")
    p.add_argument('--dim', type=int, required=True)
    p.add_argument('--out')

    p = sub.add_parser('analyze', help="Analyze a scenario at one time")
    p.add_argument('--scenario', required=True)
    p.add_argument('--time', type=float, required=True)
    p.add_argument('--out')
    p.add_argument('--format', choices=('json', 'csv'), default='json')

    p = sub.add_parser('sweep', help="Analyze a scenario over a time grid")
    p.add_argument('--scenario', required=True)
    p.add_argument('--t0', type=float, required=True)
    p.add_argument('--t1', type=float, required=True)
    p.add_argument('--steps', type=int, required=True)
    p.add_argument('--out')
    p.add_argument('--format', choices=('json', 'csv'), default='csv')

    p = sub.add_parser('demo', help="Run the bundled correlated two-qubit demo")
    p.add_argument('--zero-correlations', action='store_true')
    p.add_argument('--out')

    sub.add_parser('selftest', help="Run the acceptance suite")
    return parser


def parse_run_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    run = RunConfig(
        command=args.command,
        scenario_path=getattr(args, 'scenario', None),
        dim=getattr(args, 'dim', None),
        time=getattr(args, 'time', None),
        output_path=getattr(args, 'out', None),
        format=getattr(args, 'format', 'json'),
        seed=args.seed,
        zero_correlations=getattr(args, 'zero_correlations', False),
        tolerance_overrides=dict(args.tol),
        verbose=args.verbose,
    )
    if args.command == 'sweep':
        run.time_grid = (args.t0, args.t1, args.steps)
    return run


def main(argv: Optional[List[str]] = None) -> int:
    try:
        run = parse_run_config(argv)
        run.validate()
        cfg.config.override_tolerances(run.tolerance_overrides)
        if run.verbose:
            logger_module.configure(level='DEBUG')
    except (ValueError, KeyError) as e:
        logger.error(f"Invalid arguments: {str(e)}")
        print(f"error: {str(e)}", file=sys.stderr)
        return EXIT_USAGE

    logger.info(f"Running '{run.command}'")
    try:
        if run.command == 'basis':
            return cmd_basis(run.dim, run.output_path)
        if run.command == 'analyze':
            return cmd_analyze(run.scenario_path, run.time, run.output_path, run.format, run.seed)
        if run.command == 'sweep':
            return cmd_sweep(run.scenario_path, run.time_grid, run.output_path, run.format, run.seed)
        if run.command == 'demo':
            return cmd_demo(run.output_path, run.zero_correlations, run.seed)
        return cmd_selftest(run.seed)
    except DynamapError as e:
        logger.error(f"{run.command} failed: {str(e)}")
        print(f"error: {type(e).__name__}: {str(e)}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
