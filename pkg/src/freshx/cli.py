"""Command-line interface: ``freshx extract|select|run|bench``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time

from freshx import ingest, parallel
from freshx.features.registry import load_grid, registry
from freshx.model import DataError, SelectionConfig
from freshx.pipeline import extract_all, run, select
from freshx.synth import noise_matrix, synthetic_dataset

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("freshx")

BY_MODE_HELP = "threshold constant: 'global' uses H(n) for every rank, 'paper' the partial sum H(i) at rank i"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fdr_level(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid FDR level {text!r}") from None
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"FDR level must lie in (0, 1], got {value}")
    return value


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid variance fraction {text!r}") from None
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"variance fraction must lie in (0, 1], got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freshx", description="Time-series feature extraction with hypothesis-test filtering.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_args(p):
        p.add_argument("--data", required=True, help="time series CSV")
        p.add_argument("--meta", help="per-entity static attributes CSV")
        p.add_argument("--format", choices=["long", "wide"], default="long")
        p.add_argument("--config", help="JSON feature grid (mapping name -> parameter lists)")
        p.add_argument("--jobs", type=_positive_int, help="worker processes (default: $FRESHX_JOBS or 1)")

    p = sub.add_parser("extract", help="compute the feature matrix")
    data_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("select", help="filter an existing feature matrix")
    p.add_argument("--features", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--fdr-level", type=_fdr_level, default=0.10)
    p.add_argument("--by-mode", choices=["global", "paper"], default="global", help=BY_MODE_HELP)
    p.add_argument("--jobs", type=_positive_int)
    p.add_argument("--out", required=True)
    p.add_argument("--report", required=True)

    p = sub.add_parser("run", help="extract, test and select in one go")
    data_args(p)
    p.add_argument("--targets", required=True)
    p.add_argument("--pca", choices=["none", "before", "after"], default="none")
    p.add_argument("--variance", type=_fraction, default=0.95)
    p.add_argument("--fdr-level", type=_fdr_level, default=0.10)
    p.add_argument("--by-mode", choices=["global", "paper"], default="global", help=BY_MODE_HELP)
    p.add_argument("--out", required=True)
    p.add_argument("--report", required=True)

    p = sub.add_parser("bench", help="time extraction and selection on synthetic data")
    p.add_argument("--samples", type=_positive_int, required=True)
    p.add_argument("--length", type=_positive_int, required=True)
    p.add_argument("--kinds", type=_positive_int, default=1)
    p.add_argument("--jobs", type=_positive_int)
    p.add_argument("--repeat", type=_positive_int, default=1)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _jobs(args) -> int:
    try:
        return parallel.resolve_workers(args.jobs)
    except ValueError as exc:
        raise UsageError(f"invalid worker count (--jobs or FRESHX_JOBS): {exc}") from None


def _load_dataset(args):
    dataset = ingest.read_dataset(args.data, args.format)
    if args.meta:
        dataset = ingest.attach_meta(dataset, ingest.read_meta(args.meta, dataset.entity_order))
    return dataset


def _grid(args):
    if not args.config:
        return None
    try:
        return load_grid(args.config)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def cmd_extract(args) -> int:
    dataset = _load_dataset(args)
    specs = registry(_grid(args))
    matrix = extract_all(dataset, specs, _jobs(args))
    ingest.write_feature_matrix(matrix, args.out)
    log.info("wrote %d x %d feature matrix to %s", matrix.n_entities, matrix.n_features, args.out)
    return EXIT_OK


def cmd_select(args) -> int:
    matrix = ingest.read_feature_matrix(args.features)
    target = ingest.read_targets(args.targets, matrix.entity_order)
    config = SelectionConfig(q=args.fdr_level, by_mode=args.by_mode, worker_count=_jobs(args))
    selected, table = select(matrix, target, config)
    ingest.write_feature_matrix(selected, args.out)
    ingest.write_relevance_table(table, args.report)
    log.info("kept %d of %d features", selected.n_features, matrix.n_features)
    return EXIT_OK


def cmd_run(args) -> int:
    dataset = _load_dataset(args)
    target = ingest.read_targets(args.targets, dataset.entity_order)
    config = SelectionConfig(
        q=args.fdr_level,
        pca_placement=args.pca,
        variance_fraction=args.variance,
        by_mode=args.by_mode,
        registry_params=_grid(args),
        worker_count=_jobs(args),
    )
    out, table = run(dataset, target, config)
    ingest.write_feature_matrix(out, args.out)
    ingest.write_relevance_table(table, args.report)
    log.info("output has %d columns; %d features tested", out.n_features, len(table))
    return EXIT_OK


def cmd_bench(args) -> int:
    jobs = _jobs(args)
    specs = registry()
    param = f"samples={args.samples};length={args.length};kinds={args.kinds};jobs={jobs}"
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["phase", "parameter", "wall_seconds"])
    dataset = synthetic_dataset(args.samples, args.length, args.kinds, args.seed)
    matrix, target = noise_matrix(args.samples, len(specs) * args.kinds, args.seed)
    config = SelectionConfig(worker_count=jobs)
    for _ in range(args.repeat):
        start = time.perf_counter()
        extract_all(dataset, specs, jobs)
        writer.writerow(["extract", param, "%.6f" % (time.perf_counter() - start)])
        start = time.perf_counter()
        select(matrix, target, config)
        writer.writerow(["select", param, "%.6f" % (time.perf_counter() - start)])
    return EXIT_OK


COMMANDS = {"extract": cmd_extract, "select": cmd_select, "run": cmd_run, "bench": cmd_bench}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
