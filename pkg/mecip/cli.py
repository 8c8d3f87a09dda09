import argparse
import logging
import sys

from argparse import Namespace
from pathlib import Path
from typing import Optional

import mecip
from mecip.benchmark import (
    GROUPINGS,
    grouped_table,
    parse_benchmark_spec,
    read_records,
    run_benchmark,
)
from mecip.commons import comment_header
from mecip.data import load_csv, write_csv
from mecip.graph import cpdag_of, format_edge_list, parse_edge_list
from mecip.konfig import konfig_from_toml
from mecip.log import init_console_logging, install_excepthook
from mecip.network import (
    MAX_BENCHMARK_STRENGTH,
    SyntheticSpec,
    forward_sample,
    gen_random_net,
    read_bif,
    write_bif,
)
from mecip.pipeline import ALGORITHMS, LEARN_PROFILES, LearnConfig, learn_config, structural_metrics
from mecip.report import render_aggregate, render_frame, render_learn_report, render_metrics
from mecip.solver import dump_model


logger = logging.getLogger(__name__)

INPUT_ERROR_EXIT_CODE = 2


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}")
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}")
    return number


def _non_negative_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value!r}")
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value!r}")
    return number


def _strength(value: str) -> int:
    number = _positive_int(value)
    if number > MAX_BENCHMARK_STRENGTH:
        raise argparse.ArgumentTypeError(f"strength must be in 1..{MAX_BENCHMARK_STRENGTH}, got {value!r}")
    return number


def _alpha(value: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {value!r}")
    if not 0 < number < 1:
        raise argparse.ArgumentTypeError(f"alpha must be in (0, 1), got {value!r}")
    return number


def _parse_args(args) -> Namespace:
    parser = argparse.ArgumentParser(
        prog='mecip',
        description='Learn Markov equivalence classes of discrete Bayesian networks.'
                    '\nType: mecip {command} -h to print detailed help for a selected command.')
    parser.add_argument(
        "-v",
        "--verbose",
        action='store_true',
        default=False,
        help="Print verbose output for debugging",
    )
    parser.add_argument("--version", action="version", version=f"mecip {mecip.__version__}")

    subparsers = parser.add_subparsers(dest='operation',
                                       required=True,
                                       help='Command to execute')

    _create_learn_parser(subparsers)
    _create_sample_parser(subparsers)
    _create_gen_parser(subparsers)
    _create_benchmark_parser(subparsers)
    _create_eval_parser(subparsers)

    return parser.parse_args(args)


def _add_learning_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--alpha', type=_alpha, help='Significance level of the independence tests (default 0.05)')
    parser.add_argument('--threads', type=_positive_int, help='Threads used for tests and scoring')
    parser.add_argument('--max-parents', type=_non_negative_int,
                        help='Cap on parent set size; unlimited by default')
    parser.add_argument('--max-rounds', type=_positive_int, help='Cap on triangulation rounds (default 50)')
    parser.add_argument('--candidate-budget', type=_positive_int,
                        help='Largest number of parent sets scored per node (default 2^20)')
    parser.add_argument('--profile', choices=sorted(LEARN_PROFILES),
                        help='Named config profile; falls back to the mecip_profile env variable')
    parser.add_argument('--config', help='TOML file with a [mecip] table of learning options')


def _create_learn_parser(subparsers):
    parser = subparsers.add_parser('learn', description='Learns a CPDAG from a categorical CSV dataset.')
    parser.add_argument('data', help='CSV file, one column per variable')
    parser.add_argument('--no-header', action='store_true', help='The first CSV row is data, not names')
    parser.add_argument('--algo', choices=sorted(ALGORITHMS), default='mecip', help='Learning algorithm')
    parser.add_argument('--seed', type=int, default=0, help='Seed (hill-climbing tie-breaks)')
    parser.add_argument('-o', '--out', required=True, help='Output edge list of the learned CPDAG')
    parser.add_argument('--report', help='Output report file (default: <out>.report.txt)')
    parser.add_argument('--dump-model', help='Write the final score table and cycle cuts to this file')
    _add_learning_arguments(parser)


def _create_sample_parser(subparsers):
    parser = subparsers.add_parser('sample', description='Samples a dataset from a BIF network.')
    parser.add_argument('bif', help='Network in BIF format')
    parser.add_argument('-n', type=_positive_int, required=True, help='Number of rows')
    parser.add_argument('--seed', type=int, default=0, help='Sampling seed')
    parser.add_argument('-o', '--out', required=True, help='Output CSV file')


def _create_gen_parser(subparsers):
    parser = subparsers.add_parser('gen', description='Generates a random network.')
    parser.add_argument('--nodes', type=_positive_int, required=True)
    parser.add_argument('--max-indeg', type=_non_negative_int, required=True)
    parser.add_argument('--max-states', type=int, required=True)
    parser.add_argument('--strength', type=_strength, required=True,
                        help=f'1 (strong dependence) .. {MAX_BENCHMARK_STRENGTH} (weak)')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('-o', '--out', required=True, help='Output BIF file')


def _create_benchmark_parser(subparsers):
    parser = subparsers.add_parser('benchmark', description='Runs replicated benchmark cells.')
    parser.add_argument('--spec', required=True, help='Benchmark spec, one "<bif|n,d,s,w> <n> <algo[,algo]>" per line')
    parser.add_argument('--replicates', type=_positive_int, default=10)
    parser.add_argument('--seed', type=int, default=0, help='Base seed; replicate r uses seed + r')
    parser.add_argument('-o', '--out', required=True, help='CSV file records are appended to')
    parser.add_argument('--aggregate', help='Output aggregate table (default: <out>.summary.txt)')
    parser.add_argument('--group-by', choices=GROUPINGS, default='cell',
                        help='Aggregate by cell, by synthetic max in-degree or by sample size')
    parser.add_argument('--workers', type=_positive_int, default=1, help='Parallel worker processes')
    _add_learning_arguments(parser)


def _create_eval_parser(subparsers):
    parser = subparsers.add_parser('eval', description='Compares a learned structure with the true network.')
    parser.add_argument('--truth', required=True, help='True network in BIF format')
    parser.add_argument('--learned', required=True, help='Learned structure: edge list or BIF')


def _learn_config_from_args(args) -> LearnConfig:
    overrides = dict(
        alpha=args.alpha,
        threads=args.threads,
        max_parents=args.max_parents,
        max_rounds=args.max_rounds,
        candidate_budget=args.candidate_budget,
        seed=getattr(args, 'seed', None),
    )
    overrides = {k: v for k, v in overrides.items() if v is not None}
    cfg = learn_config(args.profile)
    if args.config:
        cfg = konfig_from_toml(type(cfg), args.config, **overrides)
    elif overrides:
        cfg = cfg.replace(**overrides)
    logger.debug("Learn config: %r", cfg)
    return cfg


def _header(command: str, **items) -> str:
    return comment_header({"mecip": f"{mecip.__version__} {command}", **items})


def _cli_learn(args):
    cfg = _learn_config_from_args(args)
    ds = load_csv(args.data, header=not args.no_header)
    result = ALGORITHMS[args.algo](ds, cfg)

    header = _header("learn", data=args.data, algorithm=args.algo, seed=cfg.seed, config=repr(cfg))
    out = Path(args.out)
    out.write_text(format_edge_list(result.cpdag, header=header), encoding="utf-8")
    report = Path(args.report or f"{out}.report.txt")
    report.write_text(render_learn_report(result, header=header), encoding="utf-8")
    logger.info("Wrote CPDAG with %d edges into %s, report into %s", result.cpdag.n_edges, out, report)

    if args.dump_model:
        if result.table is None:
            raise ValueError(f"Algorithm {args.algo!r} does not build a score table, nothing to dump")
        Path(args.dump_model).write_text(header + dump_model(result.table, result.solution.cuts), encoding="utf-8")


def _cli_sample(args):
    net = read_bif(args.bif)
    ds = forward_sample(net, args.n, args.seed)
    write_csv(ds, args.out, comments=_header("sample", network=args.bif, n=args.n, seed=args.seed))


def _cli_gen(args):
    spec = SyntheticSpec(args.nodes, args.max_indeg, args.max_states, args.strength, args.seed)
    net = gen_random_net(spec)
    header = _header(
        "gen", tuple=spec.label, seed=spec.seed, strength=spec.strength,
        dirichlet_alpha=spec.alpha,
    ).replace("#", "//")
    write_bif(net, args.out, comments=header)


def _cli_benchmark(args):
    cfg = _learn_config_from_args(args)
    spec_path = Path(args.spec)
    cells = parse_benchmark_spec(spec_path.read_text(encoding="utf-8"), base_dir=spec_path.parent)
    header = _header("benchmark", spec=args.spec, base_seed=args.seed, replicates=args.replicates, config=repr(cfg))
    run_benchmark(cells, args.replicates, args.seed, args.out, cfg, workers=args.workers, comments=header)

    table = grouped_table(read_records(args.out), args.group_by)
    text = render_aggregate(table, header) if args.group_by == 'cell' else render_frame(table, header)
    summary = Path(args.aggregate or f"{args.out}.summary.txt")
    summary.write_text(text, encoding="utf-8")
    print(text, end="")


def _cli_eval(args):
    truth = read_bif(args.truth)
    learned_path = Path(args.learned)
    if learned_path.suffix.lower() == ".bif":
        learned_net = read_bif(learned_path)
        if learned_net.names != truth.names:
            raise ValueError(f"Learned network has nodes {list(learned_net.names)}, expected {list(truth.names)}")
        learned = cpdag_of(learned_net.dag)
    else:
        learned = parse_edge_list(learned_path.read_text(encoding="utf-8"), names=truth.names)
    print(render_metrics(structural_metrics(truth, learned)), end="")


def cli(raw_args) -> Optional[int]:
    parsed_args = _parse_args(raw_args)
    init_console_logging(parsed_args.verbose)
    install_excepthook()

    operation: str = parsed_args.operation
    handlers = {
        'learn': _cli_learn,
        'sample': _cli_sample,
        'gen': _cli_gen,
        'benchmark': _cli_benchmark,
        'eval': _cli_eval,
    }
    try:
        handlers[operation](parsed_args)
    except (OSError, ValueError) as e:
        print(f"mecip {operation}: error: {e}", file=sys.stderr)
        sys.exit(INPUT_ERROR_EXIT_CODE)
    return 0


def main():
    cli(sys.argv[1:])
