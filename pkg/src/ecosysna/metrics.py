"""Network indices and community profiles."""

from __future__ import annotations

import heapq
import json
from dataclasses import asdict, dataclass
from typing import IO, Mapping, Optional

from .community import DetectionConfig, Partition, modularity
from .graph import EcosystemGraph

DEGREE_KINDS = {"degree_in": "in", "degree_out": "out", "degree_total": "total"}


@dataclass
class CommunityProfile:
    community: int
    members: list[str]
    share: float
    label: Optional[str] = None

    def display_name(self) -> str:
        return self.label or f"Community {self.community}"


def community_shares(graph: EcosystemGraph, partition: Partition, basis: str = "nodes",
                     labels: Optional[Mapping[int, str]] = None) -> list[CommunityProfile]:
    """Percentage of the network held by each community, largest first.

    ``basis="node_weight"`` weighs members by their interaction volume. If
    every node weight is zero it falls back to node counts.
    """
    if basis not in ("nodes", "node_weight"):
        raise ValueError(f"unknown share basis {basis!r}")
    groups = partition.members()
    if basis == "node_weight" and any(n.node_weight > 0 for n in graph.nodes):
        mass = [sum(graph.nodes[i].node_weight for i in g) for g in groups]
    else:
        mass = [float(len(g)) for g in groups]
    total = sum(mass)
    labels = labels or {}
    profiles = [
        CommunityProfile(c, [graph.nodes[i].domain for i in g], 100.0 * mass[c] / total, labels.get(c))
        for c, g in enumerate(groups)
    ]
    profiles.sort(key=lambda p: (-p.share, p.community))
    return profiles


def _betweenness(graph: EcosystemGraph, weighted: bool) -> list[float]:
    # Brandes accumulation; weighted lengths are 1/weight
    n = len(graph)
    bc = [0.0] * n
    succ = [graph.successors(i) for i in range(n)]
    for s in range(n):
        order = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0.0] * n
        sigma[s] = 1.0
        dist: list[Optional[float]] = [None] * n
        dist[s] = 0.0
        if weighted:
            settled = [False] * n
            heap = [(0.0, s, s)]
            while heap:
                d, pred, v = heapq.heappop(heap)
                if settled[v]:
                    continue
                settled[v] = True
                order.append(v)
                for w, wt in succ[v].items():
                    nd = d + 1.0 / wt
                    if dist[w] is None or nd < dist[w] * (1 - 1e-12):
                        dist[w] = nd
                        sigma[w] = sigma[v]
                        preds[w] = [v]
                        heapq.heappush(heap, (nd, v, w))
                    elif not settled[w] and abs(nd - dist[w]) <= 1e-12 * max(nd, dist[w]):
                        sigma[w] += sigma[v]
                        preds[w].append(v)
        else:
            queue = [s]
            head = 0
            while head < len(queue):
                v = queue[head]
                head += 1
                order.append(v)
                for w in succ[v]:
                    if dist[w] is None:
                        dist[w] = dist[v] + 1
                        queue.append(w)
                    if dist[w] == dist[v] + 1:
                        sigma[w] += sigma[v]
                        preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return bc


def centrality(graph: EcosystemGraph, kind: str = "degree_total", weighted: bool = False) -> dict[str, float]:
    """Centrality scores keyed by domain.

    Degree kinds are divided by n - 1 (when n > 1). Betweenness is the raw
    sum of pair dependencies over directed shortest paths.
    """
    n = len(graph)
    if kind in DEGREE_KINDS:
        norm = n - 1 if n > 1 else 1
        mode = DEGREE_KINDS[kind]
        return {node.domain: graph.degree(node.id, mode, weighted) / norm for node in graph.nodes}
    if kind != "betweenness":
        raise ValueError(f"unknown centrality kind {kind!r}")
    if n < 3:
        return {node.domain: 0.0 for node in graph.nodes}
    scores = _betweenness(graph, weighted)
    return {node.domain: scores[node.id] for node in graph.nodes}


@dataclass
class NetworkSummary:
    order: int
    size: int
    total_weight: float
    density: float
    degree_min: float
    degree_max: float
    degree_mean: float
    weighted_degree_min: float
    weighted_degree_max: float
    weighted_degree_mean: float
    communities: Optional[int] = None
    modularity: Optional[float] = None
    shares: Optional[list[dict]] = None

    def to_dict(self) -> dict:
        return asdict(self)


def network_summary(graph: EcosystemGraph, partition: Optional[Partition] = None,
                    config: DetectionConfig = DetectionConfig(),
                    labels: Optional[Mapping[int, str]] = None) -> NetworkSummary:
    n, size, total = graph.size()
    degs = [graph.degree(i, "total") for i in range(n)] or [0]
    wdegs = [graph.degree(i, "total", weighted=True) for i in range(n)] or [0.0]
    summary = NetworkSummary(
        order=n,
        size=size,
        total_weight=total,
        density=size / (n * (n - 1)) if n > 1 else 0.0,
        degree_min=min(degs),
        degree_max=max(degs),
        degree_mean=sum(degs) / n if n else 0.0,
        weighted_degree_min=min(wdegs),
        weighted_degree_max=max(wdegs),
        weighted_degree_mean=sum(wdegs) / n if n else 0.0,
    )
    if partition is not None:
        summary.communities = partition.community_count
        summary.modularity = modularity(graph, partition, config) if total > 0 else None
        summary.shares = [
            {"community": p.community, "label": p.label, "share": p.share, "size": len(p.members)}
            for p in community_shares(graph, partition, labels=labels)
        ]
    return summary


def write_metrics_json(summary: NetworkSummary, sink: IO[str], extra: Optional[dict] = None) -> int:
    doc = summary.to_dict()
    if extra:
        doc.update(extra)
    text = json.dumps(doc, indent=2) + "\n"
    sink.write(text)
    return len(text.encode("utf-8"))


def format_summary(summary: NetworkSummary) -> str:
    """Aligned two-column plain-text rendering."""
    rows = [
        ("nodes", f"{summary.order}"),
        ("edges", f"{summary.size}"),
        ("total weight", f"{summary.total_weight:g}"),
        ("density", f"{summary.density:.4f}"),
        ("degree min/max/mean", f"{summary.degree_min:g} / {summary.degree_max:g} / {summary.degree_mean:.2f}"),
        ("weighted degree min/max/mean",
         f"{summary.weighted_degree_min:g} / {summary.weighted_degree_max:g} / {summary.weighted_degree_mean:.2f}"),
    ]
    if summary.communities is not None:
        rows.append(("communities", f"{summary.communities}"))
        if summary.modularity is not None:
            rows.append(("modularity", f"{summary.modularity:.4f}"))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n"
