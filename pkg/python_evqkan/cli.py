"""Command line interface.

    evqkan fit --method evqkan --target eq7 --attempts 10 --out results
    evqkan classify --method qnn --paper-mode --out results
    evqkan sweep --layers 1..5 --kind fit --out results
    evqkan report results/20240101120000_evqkan_fit_eq7

Every run writes into a fresh timestamped directory below --out.
"""

import argparse
from dataclasses import replace
import logging
import sys

from python_evqkan import harness, tasks
from python_evqkan.errors import EvqkanError, HarnessError

logger = logging.getLogger(__name__)

CHAINING_FLAGS = {'state': 'state_passing', 'reencode': 're_encode'}


def parse_layer_range(text):
    """'1..5' -> [1, 2, 3, 4, 5]; '3' -> [3]; '1,3,5' -> [1, 3, 5]"""
    try:
        if '..' in text:
            first, last = (int(part) for part in text.split('..'))
            layers = list(range(first, last + 1))
        else:
            layers = [int(part) for part in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid layer range: {text}")
    if not layers or min(layers) < 1:
        raise argparse.ArgumentTypeError(f"invalid layer range: {text}")
    return layers


def _add_run_arguments(parser):
    parser.add_argument('--method', choices=sorted(harness.METHODS))
    parser.add_argument('--attempts', type=int, help="training attempts; --paper-mode resets this to 10")
    parser.add_argument('--seed', type=int, help="master seed; attempt i uses seed + i")
    parser.add_argument('--qubits', type=int, help="EVQKAN working qubits")
    parser.add_argument('--grid', type=int, help="B-spline basis functions per angle")
    parser.add_argument('--transposed', action='store_true', default=None)
    parser.add_argument('--chaining', choices=sorted(CHAINING_FLAGS))
    parser.add_argument('--budget', type=int,
                        help="objective evaluations per attempt; applied after --paper-mode")
    parser.add_argument('--n-train', type=int)
    parser.add_argument('--n-test', type=int)
    parser.add_argument('--workers', type=int, help="worker processes running attempts")
    parser.add_argument('--out', default='results', help="base directory of run directories")
    parser.add_argument('--config', help="JSON configuration (or summary.json) to start from")
    parser.add_argument('--paper-mode', action='store_true',
                        help="published defaults and boundary coefficients; keeps --layers and --budget, "
                             "overrides --qubits, --grid and --attempts")
    parser.add_argument('--no-table', action='store_true', help="do not print the summary table")


def build_parser():
    parser = argparse.ArgumentParser(prog='evqkan', description="EVQKAN statevector training toolkit")
    parser.add_argument('-v', '--verbose', action='store_true', help="log progress at INFO level")
    subparsers = parser.add_subparsers(dest='command', required=True)

    fit = subparsers.add_parser('fit', help="train on a fitting target")
    _add_run_arguments(fit)
    fit.add_argument('--layers', type=int)
    fit.add_argument('--target', choices=tasks.FIT_TARGETS)

    classify = subparsers.add_parser('classify', help="train on the boundary classification task")
    _add_run_arguments(classify)
    classify.add_argument('--layers', type=int)

    sweep = subparsers.add_parser('sweep', help="repeat a run for several layer counts")
    _add_run_arguments(sweep)
    sweep.add_argument('--layers', type=parse_layer_range, default=[1, 2, 3, 4, 5],
                       help="layer counts, e.g. 1..5")
    sweep.add_argument('--kind', choices=('fit', 'classify'), default='fit')
    sweep.add_argument('--target', choices=tasks.FIT_TARGETS)

    report = subparsers.add_parser('report', help="regenerate the reports of a run directory")
    report.add_argument('directory')

    return parser


def config_from_args(args, kind):
    """ExperimentConfig from a --config file (or defaults) overridden by flags."""

    config = harness.load_config(args.config) if args.config else harness.ExperimentConfig()

    task = config.task
    target = getattr(args, 'target', None)
    if kind == 'classify':
        if task.kind != 'classify':
            task = tasks.TaskSpec(kind='classify', target_id='boundary')
    elif task.kind != 'fit' or target is not None:
        task = tasks.TaskSpec(kind='fit', target_id=target or 'eq7')

    overrides = {'task': task}
    for option, field_name in (('method', 'method'), ('attempts', 'attempts'), ('seed', 'master_seed'),
                               ('qubits', 'num_qubits'), ('grid', 'grid_size'), ('transposed', 'transposed'),
                               ('n_train', 'n_train'), ('n_test', 'n_test'), ('workers', 'workers')):
        value = getattr(args, option, None)
        if value is not None:
            overrides[field_name] = value
    if isinstance(getattr(args, 'layers', None), int):
        overrides['num_layers'] = args.layers
    if args.chaining is not None:
        overrides['layer_chaining'] = CHAINING_FLAGS[args.chaining]

    config = replace(config, **overrides)
    if args.paper_mode:
        config = harness.apply_paper_mode(config)
    if args.budget is not None:
        config = replace(config, optimizer=replace(config.optimizer, max_evaluations=args.budget))
    return config


def run_command(args):
    if args.command == 'report':
        _, stats = harness.regenerate_reports(args.directory)
        harness.print_summary_table(stats, title=args.directory)
        return

    kind = args.kind if args.command == 'sweep' else args.command
    config = config_from_args(args, kind)
    output_dir = harness.make_run_directory(args.out, config)
    config = replace(config, output_dir=output_dir)

    if args.command == 'sweep':
        sweep_df = harness.layer_sweep(config, args.layers)
        if not args.no_table:
            print(sweep_df.to_string(index=False))
    else:
        records = harness.run_experiment(config)
        stats = harness.summarize(records, kind == 'classify')
        harness.emit_reports(records, stats, config, output_dir)
        if not args.no_table:
            harness.print_summary_table(stats, title=f"{config.method} {kind} {config.task.target_id}")

    print(output_dir)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    try:
        run_command(args)
    except HarnessError as e:
        logger.error("%s (%s)", e.message, e.id)
        return 2
    except EvqkanError as e:
        logger.error("%s (%s)", e.message, e.id)
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
