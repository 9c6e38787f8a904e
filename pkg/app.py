"""Command-line front end: analyze surface documents, enumerate classes, inspect del Pezzo lines.

    python app.py analyze data/examples/unigonal_cusp_b40.json --format json
    python app.py enumerate doc.json --square 0 --degree-min 1 --degree-max 4
    python app.py delpezzo --degree 5
    python app.py batch
    python app.py rules
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import List, Optional, Tuple

from config import cli_config
from delpezzo import DelPezzoLattice, describe, dual_graph, is_petersen, minus_one_curves
from enumeration import EnumerationQuery, enumerate_classes
from errors import BottEngineError, DelPezzoError
from lattice import pairing, self_intersection
from report import EXIT_INPUT_ERROR, Report, analyze_surface, load_surface_spec, render_report
from verdict import rule_registry

logger = logging.getLogger(__name__)


def cmd_analyze(path: Path, fmt: str) -> int:
    report = analyze_surface(load_surface_spec(path))
    print(render_report(report, fmt))
    return report.exit_code


def cmd_enumerate(path: Path, square: int, degree_min: int, degree_max: int) -> int:
    spec = load_surface_spec(path)
    reference = spec.line_bundle
    query = EnumerationQuery(square, degree_min, degree_max, reference)
    classes = enumerate_classes(spec.lattice, query)
    for v in classes:
        print(f"{v}  square={self_intersection(spec.lattice, v)}  degree={pairing(spec.lattice, v, reference)}")
    print(f"{len(classes)} classes with square {square} and degree in [{degree_min}, {degree_max}]")
    return 0


def cmd_delpezzo(degree: int) -> int:
    if not 5 <= degree <= 7:
        raise DelPezzoError(f"degree must be 5, 6 or 7, got {degree}")
    dp = DelPezzoLattice(degree)
    curves = minus_one_curves(dp)
    graph = dual_graph(curves)
    print(f"Del Pezzo surface of degree {degree}: {len(curves)} (-1)-curves")
    for i, curve in enumerate(curves):
        neighbours = ", ".join(curves[j].label for j in sorted(graph.neighbors(i)))
        print(f"  {curve.label:<16} {str(curve.divisor):<24} meets: {neighbours or '-'}")
    print(f"Dual graph: {describe(graph)} ({graph.number_of_nodes()} vertices, {graph.number_of_edges()} edges)")
    if degree == 5:
        print(f"Petersen: {'yes' if is_petersen(graph) else 'no'}")
    return 0


def cmd_rules(fmt: str) -> int:
    rules = rule_registry()
    if fmt == "json":
        print(json.dumps([{"rule_id": rule_id, "citation": citation} for rule_id, citation in rules], indent=2))
        return 0
    for rule_id, citation in rules:
        print(f"{rule_id:<22} {citation}")
    return 0


def _analyze_for_batch(path: Path) -> Tuple[Path, Optional[Report], Optional[str], Optional[str]]:
    try:
        spec = load_surface_spec(path)
        expected = spec.expected_status.value if spec.expected_status else None
        return path, analyze_surface(spec), expected, None
    except BottEngineError as e:
        return path, None, None, str(e)


def cmd_batch(directory: Path) -> int:
    paths = sorted(Path(directory).glob("*.json"))
    if not paths:
        logger.error("no JSON documents in %s", directory)
        print(f"error: no JSON documents in {directory}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    results = []
    with ThreadPoolExecutor(max_workers=max(1, cli_config.max_workers)) as executor:
        futures = [executor.submit(_analyze_for_batch, path) for path in paths]
        for future in as_completed(futures):
            results.append(future.result())
    results.sort(key=lambda item: item[0].name)

    mismatches = 0
    print(f"{'document':<40} {'status':<16} {'expected':<16} result")
    for path, report, expected, error in results:
        if report is None:
            mismatches += 1
            print(f"{path.name:<40} {'error':<16} {'-':<16} {error}")
            continue
        ok = expected is None or expected == report.status
        mismatches += 0 if ok else 1
        print(f"{path.name:<40} {report.status:<16} {expected or '-':<16} {'ok' if ok else 'MISMATCH'}")
    print(f"{len(results) - mismatches}/{len(results)} documents match")
    return 0 if mismatches == 0 else 1


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with EXIT_INPUT_ERROR"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bott", description="Bott vanishing decisions for polarized K3 lattices")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="decide H^1(X, Omega^1 (x) B) for one surface document")
    analyze.add_argument("file", type=Path)
    analyze.add_argument("--format", choices=["text", "json"], default=cli_config.default_format)

    enum = sub.add_parser("enumerate", help="list classes of given square and degree window")
    enum.add_argument("file", type=Path)
    enum.add_argument("--square", type=int, required=True)
    enum.add_argument("--degree-min", type=int, required=True)
    enum.add_argument("--degree-max", type=int, required=True)

    dp = sub.add_parser("delpezzo", help="(-1)-curves and dual graph of a del Pezzo surface")
    dp.add_argument("--degree", type=int, required=True)

    batch = sub.add_parser("batch", help="analyze every document in a directory against its expected status")
    batch.add_argument("directory", type=Path, nargs="?", default=None)

    rules = sub.add_parser("rules", help="list every rule id a verdict can cite")
    rules.add_argument("--format", choices=["text", "json"], default=cli_config.default_format)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, cli_config.log_level, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR
    try:
        if args.command == "analyze":
            return cmd_analyze(args.file, args.format)
        if args.command == "enumerate":
            return cmd_enumerate(args.file, args.square, args.degree_min, args.degree_max)
        if args.command == "delpezzo":
            return cmd_delpezzo(args.degree)
        if args.command == "rules":
            return cmd_rules(args.format)
        return cmd_batch(args.directory or cli_config.examples_dir)
    except BottEngineError as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
