"""Command-line driver: ``ecosysna sample|detect|collapse|pipeline``.

Exit codes: 0 success, 1 validation or configuration error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

from .collapse import (
    DEFAULT_STRONG_THRESHOLD,
    classify_links,
    quotient_graph,
    quotient_mean_weights,
    read_labels,
    write_classification_json,
    write_matrix_csv,
)
from .community import (
    DetectionConfig,
    detect_louvain,
    partition_from_mapping,
    read_partition_csv,
    write_partition_csv,
    write_partition_summary,
)
from .errors import ConfigError, EcosysnaError, ValidationError
from .graph import EcosystemGraph
from .ingest import (
    apply_filter,
    build_graph,
    graph_to_rows,
    load_filter,
    load_fixture,
    parse_transitions,
    write_transitions,
)
from .metrics import centrality, community_shares, network_summary, write_metrics_json
from .report import ReportArtifacts, export_dot, export_gexf, render_report
from .sampler import SamplingConfig, build_dataset, read_seeds

log = logging.getLogger("ecosysna")

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class StageError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage problems are configuration errors, not I/O errors
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _style(text: str) -> str:
    if os.environ.get("ECOSYSNA_NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\033[1m{text}\033[0m"


def _atomic_write(path: Path, render) -> None:
    """Render into a temp file beside ``path`` then rename over it."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        # mkstemp creates 0600; give the result ordinary umask-based permissions
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            render(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _open_input(path: str):
    try:
        return open(path, "rb")
    except OSError as exc:
        raise StageError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from None


def _run(fn, *args):
    try:
        return fn(*args)
    except StageError:
        raise
    except (ValidationError, EcosysnaError) as exc:
        raise StageError(EXIT_INVALID, str(exc)) from None
    except OSError as exc:
        where = f" {exc.filename}" if exc.filename else ""
        raise StageError(EXIT_IO, f"I/O error{where}: {exc.strerror or exc}") from None


# stages -----------------------------------------------------------------

def stage_sample(seeds_path: str, fixture_path: str, config: SamplingConfig, out: Path,
                 trace_path: Optional[Path] = None):
    with _open_input(seeds_path) as fh:
        seeds = read_seeds(fh)
    with _open_input(fixture_path) as fh:
        fixture = load_fixture(fh)
    graph, trace = build_dataset(seeds, fixture, config)
    trace_path = trace_path or out.with_suffix(".trace.json")
    _atomic_write(out, lambda fh: write_transitions(graph_to_rows(graph), fh))
    _atomic_write(trace_path, trace.dump)
    for w in trace.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return graph, trace, trace_path


def _load_graph(path: str) -> EcosystemGraph:
    with _open_input(path) as fh:
        fmt = "json" if path.endswith(".json") else "csv"
        parsed = parse_transitions(fh, fmt)
    for d in parsed.diagnostics:
        print(f"warning: {path}: {d}", file=sys.stderr)
    graph, report = build_graph(parsed.records)
    if report.self_loops:
        print(f"warning: {path}: dropped {report.self_loops} self-transitions", file=sys.stderr)
    for d in report.rejected:
        print(f"warning: {path}: record {d.line}: {d.message}", file=sys.stderr)
    return graph


def stage_filter(graph: EcosystemGraph, filter_path: str, mode: str, out_dir: Path):
    with _open_input(filter_path) as fh:
        filt = load_filter(fh, mode)
    graph, removal = apply_filter(graph, filt)
    _atomic_write(out_dir / "removal.json", lambda fh: fh.write(json.dumps(removal.to_dict(), indent=2) + "\n"))
    return graph, removal


def stage_detect(graph: EcosystemGraph, config: DetectionConfig, out_dir: Path, filtered: bool = False):
    if graph.edge_count == 0:
        where = f"; removal report: {out_dir / 'removal.json'}" if filtered else ""
        raise StageError(EXIT_INVALID, f"no edges left to analyse{where}")
    partition = detect_louvain(graph, config)
    summary = network_summary(graph, partition, config)
    cent = {
        kind: centrality(graph, kind)
        for kind in ("degree_in", "degree_out", "degree_total")
    }
    cent["betweenness"] = centrality(graph, "betweenness", weighted=True)
    _atomic_write(out_dir / "filtered.csv", lambda fh: write_transitions(graph_to_rows(graph), fh))
    _atomic_write(out_dir / "partition.csv", lambda fh: write_partition_csv(graph, partition, fh))
    _atomic_write(out_dir / "partition.json", lambda fh: write_partition_summary(partition, fh))
    _atomic_write(out_dir / "metrics.json", lambda fh: write_metrics_json(summary, fh, {"centrality": cent}))
    shares = [p.share for p in sorted(community_shares(graph, partition), key=lambda p: p.community)]
    _atomic_write(out_dir / "graph.gexf", lambda fh: export_gexf(graph, fh, partition, shares))
    print(_style(f"k={partition.community_count} Q={partition.modularity:.6f}"))
    return graph, partition, summary


def stage_collapse(graph: EcosystemGraph, mapping: dict[str, int], labels: dict[int, str],
                   threshold: float, out_dir: Path, config: DetectionConfig = DetectionConfig()):
    partition = partition_from_mapping(graph, mapping, config)
    domains = graph.domains()
    # labels are keyed by the ids used in the partition file
    file_ids = [mapping[domains[members[0]]] for members in partition.members()]
    names = [labels.get(fid, f"Community {fid}") for fid in file_ids]
    profiles = community_shares(graph, partition, labels=dict(enumerate(names)))
    shares = [p.share for p in sorted(profiles, key=lambda p: p.community)]
    matrix = quotient_mean_weights(graph, partition, names, shares)
    if matrix.k == 1:
        print("warning: single community; inter-community matrix is empty", file=sys.stderr)
    classification = classify_links(matrix, threshold)
    qgraph = quotient_graph(matrix)
    _atomic_write(out_dir / "matrix.csv", lambda fh: write_matrix_csv(matrix, fh))
    _atomic_write(out_dir / "classification.json", lambda fh: write_classification_json(classification, fh, matrix))
    _atomic_write(out_dir / "quotient.dot", lambda fh: export_dot(qgraph, fh))
    return partition, profiles, matrix, classification


# commands ---------------------------------------------------------------

def _detection_config(args) -> DetectionConfig:
    return DetectionConfig(resolution=args.resolution, directed_modularity=not args.undirected)


def _read_labels(path: Optional[str]) -> dict[int, str]:
    if not path:
        return {}
    with _open_input(path) as fh:
        return read_labels(fh)


def cmd_sample(args) -> int:
    config = SamplingConfig(similarity_threshold=args.threshold, max_waves=args.max_waves)
    out = Path(args.out)
    graph, trace, trace_path = stage_sample(args.seeds, args.fixture, config, out,
                                            Path(args.trace) if args.trace else None)
    order, size, _ = graph.size()
    print(f"sampled {order} sites, {size} transitions; {trace.termination} at wave {trace.stopped_at}")
    return EXIT_OK


def cmd_detect(args) -> int:
    config = _detection_config(args)
    out = Path(args.out)
    graph = _load_graph(args.graph)
    if args.filter:
        graph, _ = stage_filter(graph, args.filter, args.mode, out)
    stage_detect(graph, config, out, filtered=bool(args.filter))
    return EXIT_OK


def cmd_collapse(args) -> int:
    if not args.strong_threshold > 0:
        raise ConfigError("--strong-threshold must be positive")
    graph = _load_graph(args.graph)
    with _open_input(args.partition) as fh:
        mapping = read_partition_csv(fh)
    stage_collapse(graph, mapping, _read_labels(args.labels), args.strong_threshold, Path(args.out))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    out_dir = Path(args.out)
    report_path = Path(args.report) if args.report else out_dir / "report.json"
    manifest = {"completed": [], "failed": None, "exit_code": EXIT_OK, "artifacts": []}

    def done(stage, *files):
        manifest["completed"].append(stage)
        manifest["artifacts"].extend(str(f) for f in files)

    code = EXIT_OK
    stage = "setup"
    try:
        det_config = _detection_config(args)
        samp_config = SamplingConfig(similarity_threshold=args.threshold, max_waves=args.max_waves)
        trace = None
        stage = "sample"
        if args.graph:
            graph = _load_graph(args.graph)
        else:
            if not (args.seeds and args.fixture):
                raise ConfigError("pipeline needs --graph or both --seeds and --fixture")
            graph, trace, _ = stage_sample(args.seeds, args.fixture, samp_config, out_dir / "raw.csv",
                                           out_dir / "trace.json")
            done(stage, "raw.csv", "trace.json")
        if args.filter:
            stage = "filter"
            graph, _ = stage_filter(graph, args.filter, args.mode, out_dir)
            done(stage, "removal.json")
        stage = "detect"
        graph, partition, _ = stage_detect(graph, det_config, out_dir, filtered=bool(args.filter))
        done(stage, "filtered.csv", "partition.csv", "partition.json", "graph.gexf")
        done("metrics", "metrics.json")
        stage = "collapse"
        mapping = {n.domain: partition.assignment[n.id] for n in graph.nodes}
        _, profiles, matrix, classification = stage_collapse(
            graph, mapping, _read_labels(args.labels), args.strong_threshold, out_dir, det_config)
        done(stage, "matrix.csv", "classification.json", "quotient.dot")
        stage = "report"
        art = ReportArtifacts(
            graph=graph,
            summary=network_summary(graph, partition, det_config, {p.community: p.label for p in profiles}),
            partition=partition,
            profiles=profiles,
            matrix=matrix,
            classification=classification,
            trace=trace,
        )
        _atomic_write(report_path, lambda fh: render_report(art, fh, "json"))
        done(stage, report_path.name if report_path.parent == out_dir else report_path)
        print(f"report written to {report_path}")
    except StageError as exc:
        manifest["failed"] = stage
        code = exc.code
        print(f"error: {stage}: {exc}", file=sys.stderr)
    except (ValidationError, EcosysnaError) as exc:
        manifest["failed"] = stage
        code = EXIT_INVALID
        print(f"error: {stage}: {exc}", file=sys.stderr)
    except OSError as exc:
        manifest["failed"] = stage
        code = EXIT_IO
        print(f"error: {stage}: {exc}", file=sys.stderr)
    manifest["exit_code"] = code
    try:
        _atomic_write(out_dir / "manifest.json", lambda fh: fh.write(json.dumps(manifest, indent=2) + "\n"))
    except OSError as exc:
        print(f"error: cannot write manifest: {exc}", file=sys.stderr)
        code = code or EXIT_IO
    return code


# parser -----------------------------------------------------------------

def _add_sampling_flags(p):
    p.add_argument("--seeds", help="seed domains, one per line")
    p.add_argument("--fixture", help="sampling fixture JSON")
    p.add_argument("--threshold", type=float, default=50.0, help="minimum similarity score kept (default 50)")
    p.add_argument("--max-waves", type=int, default=6, help="expansion wave cap (default 6)")


def _add_detect_flags(p):
    p.add_argument("--filter", help="relevance filter file, one domain per line")
    p.add_argument("--mode", choices=("allow", "block"), default="block", help="filter mode (default block)")
    p.add_argument("--resolution", type=float, default=1.0, help="modularity resolution (default 1.0)")
    p.add_argument("--undirected", action="store_true", help="use undirected modularity")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ecosysna", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="snowball-sample a raw transition graph from a fixture")
    _add_sampling_flags(p)
    p.add_argument("--out", required=True, help="raw transition CSV to write")
    p.add_argument("--trace", help="sampling trace JSON (default: <out>.trace.json)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("detect", help="filter a graph and detect communities")
    p.add_argument("--graph", required=True, help="transition CSV or JSON")
    _add_detect_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("collapse", help="inter-community matrix and link classification")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition", required=True, help="domain,community_id CSV")
    p.add_argument("--labels", help="community_id,label CSV")
    p.add_argument("--strong-threshold", type=float, default=DEFAULT_STRONG_THRESHOLD)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("pipeline", help="sample, filter, detect, collapse and report in one run")
    _add_sampling_flags(p)
    p.add_argument("--graph", help="start from an existing transition file instead of sampling")
    _add_detect_flags(p)
    p.add_argument("--labels", help="community_id,label CSV")
    p.add_argument("--strong-threshold", type=float, default=DEFAULT_STRONG_THRESHOLD)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--report", help="report JSON path (default: <out>/report.json)")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        return _run(args.func, args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
