import argparse
import logging
import json
import sys

from .keys import SweepParameters, namespace_values
from .config import read_config, channel_model
from .simulate import run_simulation
from .sweep import sweep, run_noniid
from .boundary import trace_region
from .bounds import BoundParams, alpha_bound, pk_sequence, success_probability
from .write import write_metrics_json, write_metrics_csv, write_sweep_csv, boundary_record, \
                   write_boundary_csv, write_bound_csv, write_trace_csv, write_json, print_text

logger = logging.getLogger(__name__)

def _float_list(text: str) -> list:
    try: return [float(value) for value in text.split(',') if value.strip()]
    except ValueError: raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, but got '{text}'")

def _range(text: str) -> tuple:
    values = _float_list(text)
    if len(values) != 2: raise argparse.ArgumentTypeError(f"expected 'low,high', but got '{text}'")
    return tuple(values)

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None, help="flat JSON configuration file")
    common.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE', help="override a configuration key (repeatable)")
    common.add_argument('--out', type=str, default=None, help="output file (default: stdout)")
    common.add_argument('--format', choices=('csv', 'json'), default=None, help="output format")
    common.add_argument('--seed', type=int, default=None, help="random seed, overrides the configuration")
    common.add_argument('--jobs', type=int, default=1, help="worker processes for independent runs")
    common.add_argument('-v', '--verbose', action='store_true', help="debug logging and progress bars")
    common.add_argument('-q', '--quiet', action='store_true', help="only log warnings and errors")

    parser = argparse.ArgumentParser(prog='d2dsched', description="Interference-aware D2D scheduling simulator")
    subparsers = parser.add_subparsers(dest='command', required=True)

    simulate = subparsers.add_parser('simulate', parents=[common], help="run one simulation and emit its Metrics")
    simulate.add_argument('--trace', type=str, default=None, metavar='PATH', help="write the per-slot trace CSV to PATH")

    sweeping = subparsers.add_parser('sweep', parents=[common], help="one run per parameter value")
    sweeping.add_argument('--parameter', choices=namespace_values(SweepParameters), required=True)
    sweeping.add_argument('--values', type=_float_list, required=True, help="comma-separated values")

    boundary = subparsers.add_parser('boundary', parents=[common], help="trace stability region boundary curves")
    boundary.add_argument('--gammas', type=_float_list, default=[float('inf')], help="comma-separated interference limits, 'inf' allowed")
    boundary.add_argument('--alphas', type=_float_list, required=True, help="comma-separated rate targets of the other pairs")
    boundary.add_argument('--pair', type=int, default=1, help="pair whose rate is maximised, numbered from 1")
    boundary.add_argument('--mc-samples', type=int, default=100000, help="channel draws per expectation")
    boundary.add_argument('--tol', type=float, default=1e-3, help="relative tolerance of the dual iteration")

    bound = subparsers.add_parser('bound', parents=[common], help="alpha and P_k table of CADS with uniform mapping")
    bound.add_argument('--N', type=int, default=None)
    bound.add_argument('--M', type=int, default=None)
    bound.add_argument('--tau', type=float, default=None)
    bound.add_argument('--beta', type=float, default=0.0)
    bound.add_argument('--form', choices=('derivation', 'statement'), default='derivation')

    noniid = subparsers.add_parser('noniid', parents=[common], help="average runs with per-pair channel means drawn at random")
    noniid.add_argument('--runs', type=int, default=10)
    noniid.add_argument('--direct-range', type=_range, default=(1.2, 2.8))
    noniid.add_argument('--interference-range', type=_range, default=(0.2, 1.8))
    return parser

def _configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s', stream=sys.stderr, force=True)

def _load_config(args):
    config = read_config(args.config, args.overrides)
    if args.seed is not None: config = config.with_values(seed=args.seed)
    return config

def _output(text: str, path: str):
    if path is None: print_text(text)

def _simulate(args):
    config = _load_config(args)
    if args.trace is not None: config = config.with_values(trace=True)
    metrics = run_simulation(config, verbose=args.verbose)
    if args.trace is not None: write_trace_csv(metrics.trace, args.trace)
    text = write_metrics_csv(metrics, args.out) if args.format == 'csv' else write_metrics_json(metrics, args.out)
    _output(text, args.out)

def _sweep(args):
    rows = sweep(_load_config(args), args.parameter, args.values, jobs=args.jobs, verbose=args.verbose)
    if args.format == 'json':
        records = [{'parameter': row.parameter, 'value': row.value, 'valid': row.valid, 'error': row.error,
                    'metrics': row.metrics.to_dict() if row.valid else None} for row in rows]
        text = write_json(records, args.out)
    else: text = write_sweep_csv(rows, args.out)
    _output(text, args.out)

def _boundary(args):
    config = _load_config(args)
    points = trace_region(channel_model(config), args.alphas, args.gammas, i=args.pair-1, jobs=args.jobs, verbose=args.verbose,
                          nu=config.nu, P=config.P, N0=config.N0, mc_samples=args.mc_samples, tol=args.tol, seed=config.seed)
    text = write_json([boundary_record(point) for point in points], args.out) if args.format == 'json' else write_boundary_csv(points, args.out)
    _output(text, args.out)

def _bound(args):
    config = read_config(args.config, args.overrides)
    N = args.N if args.N is not None else config.N
    M = args.M if args.M is not None else config.M
    tau = args.tau if args.tau is not None else config.tau
    params = BoundParams(N, M, tau, args.beta)
    record = {'N': N, 'M': M, 'tau': tau, 'beta': args.beta, 'form': args.form, 'alpha': alpha_bound(params, args.form),
              'success_probability': float(success_probability(N, M))}
    record.update({f"P_{k}": float(P_k) for k, P_k in enumerate(pk_sequence(N, M), start=1)})
    text = write_json([record], args.out) if args.format == 'json' else write_bound_csv([record], args.out)
    _output(text, args.out)

def _noniid(args):
    metrics = run_noniid(_load_config(args), args.runs, args.direct_range, args.interference_range, jobs=args.jobs, verbose=args.verbose)
    text = write_metrics_csv(metrics, args.out) if args.format == 'csv' else write_metrics_json(metrics, args.out)
    _output(text, args.out)

_commands = {
    'simulate': _simulate,
    'sweep': _sweep,
    'boundary': _boundary,
    'bound': _bound,
    'noniid': _noniid
}

def main(argv: list=None) -> int:
    """
    Run the command line: d2dsched {simulate, sweep, boundary, bound, noniid}

    Inputs:
    - argv: the arguments, sys.argv[1:] when None

    Outputs:
    - exit status: 0 on success, 1 with a JSON error record on stderr otherwise (argparse exits with 2 on usage errors)
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        _commands[args.command](args)
    except (AssertionError, ValueError, KeyError, OSError) as error:
        logger.debug("command failed", exc_info=True)
        sys.stderr.write(json.dumps({'error': type(error).__name__, 'message': str(error), 'subcommand': args.command}) + '\n')
        return 1
    return 0

if __name__ == '__main__':
    sys.exit(main())
