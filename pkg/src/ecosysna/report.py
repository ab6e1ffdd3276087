"""Interchange exports: GEXF for Gephi, Graphviz DOT, and the JSON/text report."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Optional, Sequence
from xml.sax.saxutils import quoteattr

from .collapse import InterCommunityMatrix, LinkClassification, QuotientGraph
from .community import Partition
from .graph import EcosystemGraph
from .ingest import format_number
from .metrics import CommunityProfile, NetworkSummary, format_summary, network_summary
from .sampler import SamplingTrace

SCHEMA = "ecosysna/1"
GEXF_NS = "http://www.gexf.net/1.2draft"

_NODE_ATTRS = [
    ("0", "domain", "string"),
    ("1", "community", "integer"),
    ("2", "share", "double"),
    ("3", "node_weight", "double"),
    ("4", "is_seed", "boolean"),
    ("5", "wave", "integer"),
]


def _emit(sink: IO[str], text: str) -> int:
    sink.write(text)
    return len(text.encode("utf-8"))


def export_gexf(graph: EcosystemGraph, sink: IO[str], partition: Optional[Partition] = None,
                shares: Optional[Sequence[float]] = None) -> int:
    """Write a GEXF 1.2 document with directed weighted edges.

    ``shares`` is indexed by community id when a partition is given,
    otherwise by node id (as for quotient graphs).
    """
    labels = getattr(graph, "labels", None) or [n.domain for n in graph.nodes]
    if shares is None and isinstance(graph, QuotientGraph):
        shares = graph.shares
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<gexf xmlns="{GEXF_NS}" version="1.2">',
        '  <graph defaultedgetype="directed" mode="static">',
        '    <attributes class="node" mode="static">',
    ]
    out += [f'      <attribute id="{i}" title="{t}" type="{ty}"/>' for i, t, ty in _NODE_ATTRS]
    out += ['    </attributes>', '    <nodes>']
    for node in graph.nodes:
        values = [("0", node.domain), ("3", format_number(node.node_weight)),
                  ("4", "true" if node.is_seed else "false")]
        community = partition.assignment[node.id] if partition is not None else None
        if community is not None:
            values.append(("1", str(community)))
        share_idx = community if partition is not None else node.id
        if shares is not None and share_idx is not None and shares[share_idx] is not None:
            values.append(("2", repr(float(shares[share_idx]))))
        if node.wave is not None:
            values.append(("5", str(node.wave)))
        values.sort()
        out.append(f'      <node id="{node.id}" label={quoteattr(labels[node.id])}>')
        out.append('        <attvalues>')
        out += [f'          <attvalue for="{k}" value={quoteattr(v)}/>' for k, v in values]
        out.append('        </attvalues>')
        out.append('      </node>')
    out += ['    </nodes>', '    <edges>']
    for eid, e in enumerate(graph.edges()):
        out.append(f'      <edge id="{eid}" source="{e.src}" target="{e.dst}" weight="{repr(float(e.weight))}"/>')
    out += ['    </edges>', '  </graph>', '</gexf>']
    return _emit(sink, "\n".join(out) + "\n")


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: EcosystemGraph, sink: IO[str], labels: Optional[Sequence[str]] = None,
               shares: Optional[Sequence[Optional[float]]] = None, name: str = "") -> int:
    """Write a DOT digraph; edge labels show weights to one decimal.

    Node width grows with share when shares are available.
    """
    if isinstance(graph, QuotientGraph):
        labels = labels or graph.labels
        if shares is None:
            shares = graph.shares
    names = list(labels) if labels else graph.domains()
    lines = [f"digraph {_dot_id(name) + ' ' if name else ''}{{"]
    for node in graph.nodes:
        attrs = []
        share = shares[node.id] if shares else None
        if share is not None:
            attrs.append(f"width={0.5 + 2.5 * share / 100:.3f}")
            attrs.append(f'tooltip="{share:.2f}%"')
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_dot_id(names[node.id])}{suffix};")
    for e in graph.edges():
        lines.append(
            f'  {_dot_id(names[e.src])} -> {_dot_id(names[e.dst])} '
            f'[label="{e.weight:.1f}", weight={format_number(e.weight)}];'
        )
    lines.append("}")
    return _emit(sink, "\n".join(lines) + "\n")


@dataclass
class ReportArtifacts:
    graph: EcosystemGraph
    summary: Optional[NetworkSummary] = None
    partition: Optional[Partition] = None
    profiles: Optional[list[CommunityProfile]] = None
    matrix: Optional[InterCommunityMatrix] = None
    classification: Optional[LinkClassification] = None
    trace: Optional[SamplingTrace] = None


def _matrix_doc(matrix: InterCommunityMatrix) -> dict:
    return {
        "k": matrix.k,
        "labels": [matrix.label(c) for c in range(matrix.k)],
        "sizes": matrix.sizes,
        "weights": matrix.to_rows(),
    }


def report_document(art: ReportArtifacts) -> dict:
    summary = art.summary or network_summary(art.graph)
    doc = {
        "schema": SCHEMA,
        "summary": summary.to_dict(),
        "communities": None,
        "matrix": None,
        "classification": None,
        "sampling": None,
    }
    if art.partition is not None:
        doc["communities"] = {
            "k": art.partition.community_count,
            "modularity": art.partition.modularity,
            "profiles": [
                {"community": p.community, "label": p.label, "share": p.share, "members": p.members}
                for p in (art.profiles or [])
            ],
        }
    if art.matrix is not None:
        doc["matrix"] = _matrix_doc(art.matrix)
    if art.classification is not None:
        doc["classification"] = art.classification.to_dict(art.matrix)
    if art.trace is not None:
        doc["sampling"] = art.trace.to_dict()
    return doc


def _text_report(art: ReportArtifacts, doc: dict) -> str:
    parts = ["Network summary", "---------------", format_summary(NetworkSummary(**doc["summary"]))]
    if art.profiles:
        parts += ["Communities", "-----------"]
        width = max(len(p.display_name()) for p in art.profiles)
        for p in art.profiles:
            parts.append(f"{p.display_name().ljust(width)}  {p.share:6.2f}%  ({len(p.members)} sites)")
        parts.append("")
    if art.classification is not None:
        cls = art.classification
        parts += [f"Inter-community links (threshold {cls.threshold:g})", "-" * 40]
        name = art.matrix.label if art.matrix is not None else str
        for title, items in (("strong", cls.strong), ("weak", cls.weak)):
            for i, j, w in items:
                parts.append(f"{title:6}  {name(i)} -> {name(j)}  {w:.1f}")
        for c in cls.no_connections:
            parts.append(f"none    {name(c)}: No Connections")
        parts.append("")
    if art.trace is not None:
        parts += ["Sampling", "--------"]
        for w in art.trace.waves:
            parts.append(f"wave {w.index}: {len(w.domains)} sites")
        parts.append(f"termination: {art.trace.termination} at wave {art.trace.stopped_at}")
        parts.append("")
    return "\n".join(parts).rstrip("\n") + "\n"


def render_report(art: ReportArtifacts, sink: IO[str], format: str = "json") -> int:
    doc = report_document(art)
    if format == "json":
        return _emit(sink, json.dumps(doc, indent=2) + "\n")
    if format == "text":
        return _emit(sink, _text_report(art, doc))
    raise ValueError(f"unknown report format {format!r}")
