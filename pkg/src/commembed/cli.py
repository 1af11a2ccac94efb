"""Command-line entry point: ``commembed {run,gen-lfr,stats,partition}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .combinatorial import PARTITIONERS, make_partitioner
from .datasets import load_files
from .graph import GraphFormatError, graph_stats, serialize_communities, serialize_edge_list
from .harness import ConfigError, RunConfig, emit_report, report_csv, report_json, run_method
from .lfr import LfrError, LfrParams, generate_lfr

log = logging.getLogger("commembed")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors (argparse would exit with 2)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _cmd_run(args) -> int:
    config = RunConfig.from_yaml(args.config)
    if args.output:
        config.output = args.output
    if args.format:
        config.format = args.format
    report = run_method(config)
    if config.output:
        emit_report(report, config.output, config.format)
        log.info("wrote %d records to %s", len(report.records), config.output)
    else:
        sys.stdout.write(report_csv(report) if config.format == "csv" else report_json(report))
    failed = sum(r.error is not None for r in report.records)
    if failed:
        log.warning("%d of %d cells failed", failed, len(report.records))
    return EXIT_OK


def _cmd_gen_lfr(args) -> int:
    try:
        params = LfrParams(n=args.n, mu=args.mu, seed=args.seed, tau1=args.tau1, tau2=args.tau2,
                           k_avg=args.k_avg, k_max=args.k_max, c_min=args.c_min, c_max=args.c_max)
    except LfrError as exc:
        raise ConfigError(str(exc)) from None
    graph, cover = generate_lfr(params)
    prefix = Path(args.out_prefix)
    prefix.with_name(prefix.name + ".edges").write_text(serialize_edge_list(graph, preserve_order=False),
                                                        encoding="utf-8")
    prefix.with_name(prefix.name + ".cmty").write_text(serialize_communities(cover.communities, graph),
                                                       encoding="utf-8")
    print(json.dumps(graph_stats(graph, cover).as_dict()))
    return EXIT_OK


def _cmd_stats(args) -> int:
    graph, cover = load_files(args.edges, args.communities)
    print(json.dumps(graph_stats(graph, cover).as_dict()))
    return EXIT_OK


def _cmd_partition(args) -> int:
    graph, _ = load_files(args.edges)
    est = make_partitioner(args.method, args.seed).fit(graph)
    text = serialize_communities(est.partition_.communities, graph)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    log.info("%s: K=%d Q=%.6f", args.method, est.n_communities_, est.modularity_)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="commembed", description="Community-aware node embedding toolkit.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment config (YAML)")
    run.add_argument("--config", required=True)
    run.add_argument("--output", help="override the config's output path")
    run.add_argument("--format", choices=("csv", "json"))
    run.set_defaults(func=_cmd_run)

    gen = sub.add_parser("gen-lfr", help="write an LFR benchmark as <prefix>.edges / <prefix>.cmty")
    gen.add_argument("--n", type=int, default=1000)
    gen.add_argument("--mu", type=float, default=0.3)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out-prefix", required=True)
    gen.add_argument("--tau1", type=float, default=2.0)
    gen.add_argument("--tau2", type=float, default=1.0)
    gen.add_argument("--k-avg", type=float, default=8.0)
    gen.add_argument("--k-max", type=int, default=50)
    gen.add_argument("--c-min", type=int, default=5)
    gen.add_argument("--c-max", type=int, default=100)
    gen.set_defaults(func=_cmd_gen_lfr)

    stats = sub.add_parser("stats", help="summary statistics of an edge list")
    stats.add_argument("--edges", required=True)
    stats.add_argument("--communities")
    stats.set_defaults(func=_cmd_stats)

    part = sub.add_parser("partition", help="combinatorial partition of an edge list")
    part.add_argument("--method", choices=sorted(PARTITIONERS), required=True)
    part.add_argument("--edges", required=True)
    part.add_argument("--seed", type=int, default=0)
    part.add_argument("--out")
    part.set_defaults(func=_cmd_partition)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except GraphFormatError as exc:
        log.error("bad input file: %s", exc)
        return EXIT_RUNTIME
    except Exception as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
