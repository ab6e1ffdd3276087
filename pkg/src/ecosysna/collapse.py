"""Inter-community mean-weight matrix and strong/weak link classification."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import IO, Mapping, Optional, Sequence

from .community import Partition, canonicalize
from .errors import ConfigError, ValidationError
from .graph import EcosystemGraph
from .ingest import read_text, format_number

DEFAULT_STRONG_THRESHOLD = 10.0


@dataclass
class InterCommunityMatrix:
    """Directed mean cross-community weights.

    ``entries[(i, j)]`` exists only when at least one edge runs from
    community i to community j (i != j). ``cross_sums`` holds the raw summed
    weight behind each entry.
    """

    k: int
    sizes: list[int]
    entries: dict[tuple[int, int], float] = field(default_factory=dict)
    cross_sums: dict[tuple[int, int], float] = field(default_factory=dict)
    labels: Optional[list[str]] = None
    shares: Optional[list[float]] = None

    def get(self, i: int, j: int) -> Optional[float]:
        return self.entries.get((i, j))

    def present(self) -> list[tuple[int, int, float]]:
        return [(i, j, w) for (i, j), w in sorted(self.entries.items())]

    def label(self, c: int) -> str:
        if self.labels and c < len(self.labels) and self.labels[c]:
            return self.labels[c]
        return f"Community {c}"

    def to_rows(self) -> list[list[Optional[float]]]:
        return [[self.entries.get((i, j)) for j in range(self.k)] for i in range(self.k)]

    @classmethod
    def from_entries(cls, k: int, entries: Mapping[tuple[int, int], float],
                     sizes: Optional[Sequence[int]] = None,
                     labels: Optional[Sequence[str]] = None) -> "InterCommunityMatrix":
        """Build a matrix directly from mean weights (e.g. a published table)."""
        sizes = list(sizes) if sizes is not None else [1] * k
        clean = {}
        for (i, j), w in entries.items():
            if not (0 <= i < k and 0 <= j < k) or i == j:
                raise ValidationError(f"invalid matrix cell ({i}, {j}) for k={k}")
            if not w > 0:
                raise ValidationError(f"present entries need a positive mean weight, got {w!r} at ({i}, {j})")
            clean[(i, j)] = float(w)
        sums = {key: w * sizes[key[0]] * sizes[key[1]] for key, w in clean.items()}
        return cls(k, sizes, clean, sums, list(labels) if labels is not None else None)


def quotient_mean_weights(graph: EcosystemGraph, partition, labels: Optional[Sequence[str]] = None,
                          shares: Optional[Sequence[float]] = None) -> InterCommunityMatrix:
    """Mean weight per ordered community pair.

    W_ij = (sum of weights on edges from members of i to members of j)
           / (n_i * n_j)
    The denominator counts every ordered member pair, linked or not.
    """
    assignment = partition.assignment if isinstance(partition, Partition) else canonicalize(partition)
    if len(assignment) != len(graph):
        raise ValidationError(f"partition covers {len(assignment)} nodes, graph has {len(graph)}")
    k = max(assignment) + 1 if assignment else 0
    sizes = [0] * k
    for c in assignment:
        sizes[c] += 1
    sums: dict[tuple[int, int], float] = {}
    for e in graph.edges():
        ci, cj = assignment[e.src], assignment[e.dst]
        if ci != cj:
            sums[(ci, cj)] = sums.get((ci, cj), 0.0) + e.weight
    entries = {key: s / (sizes[key[0]] * sizes[key[1]]) for key, s in sums.items()}
    return InterCommunityMatrix(
        k, sizes, entries, sums,
        list(labels) if labels is not None else None,
        list(shares) if shares is not None else None,
    )


@dataclass
class LinkClassification:
    strong: list[tuple[int, int, float]]
    weak: list[tuple[int, int, float]]
    no_connections: list[int]
    threshold: float

    def to_dict(self, matrix: Optional[InterCommunityMatrix] = None) -> dict:
        def name(c):
            return matrix.label(c) if matrix is not None else c

        def links(items):
            return [{"source": name(i), "target": name(j), "weight": w} for i, j, w in items]

        return {
            "threshold": self.threshold,
            "strong": links(self.strong),
            "weak": links(self.weak),
            "no_connections": [name(c) for c in self.no_connections],
        }


def classify_links(matrix: InterCommunityMatrix,
                   threshold: float = DEFAULT_STRONG_THRESHOLD) -> LinkClassification:
    """Split present entries at ``threshold`` (strong if >=).

    Lists are grouped by source community and ordered by descending weight
    within each source. Communities without outgoing entries are listed in
    ``no_connections``.
    """
    if not threshold > 0:
        raise ConfigError(f"strong-link threshold must be positive, got {threshold!r}")
    strong, weak = [], []
    for i in range(matrix.k):
        row = sorted(((j, w) for (src, j), w in matrix.entries.items() if src == i),
                     key=lambda t: (-t[1], t[0]))
        for j, w in row:
            (strong if w >= threshold else weak).append((i, j, w))
    sources = {i for i, _ in matrix.entries}
    no_conn = [c for c in range(matrix.k) if c not in sources]
    return LinkClassification(strong, weak, no_conn, threshold)


class QuotientGraph(EcosystemGraph):
    """Community-level graph; node ``c`` is named ``community-<c>``."""

    def __init__(self):
        super().__init__()
        self.labels: list[str] = []
        self.shares: list[Optional[float]] = []


def quotient_graph(matrix: InterCommunityMatrix) -> QuotientGraph:
    g = QuotientGraph()
    for c in range(matrix.k):
        g.add_node(f"community-{c}")
        g.labels.append(matrix.label(c))
        g.shares.append(matrix.shares[c] if matrix.shares else None)
    for i, j, w in matrix.present():
        g.add_edge(i, j, w)
    return g.finalize()


def write_matrix_csv(matrix: InterCommunityMatrix, sink: IO[str]) -> int:
    """Table-shaped CSV: labels along the header and first column, blanks for absent cells."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = [matrix.label(c) for c in range(matrix.k)]
    writer.writerow(["From - To", *names])
    for i, row in enumerate(matrix.to_rows()):
        writer.writerow([names[i], *("" if w is None else format_number(w) for w in row)])
    text = buf.getvalue()
    sink.write(text)
    return len(text.encode("utf-8"))


def write_classification_json(classification: LinkClassification, sink: IO[str],
                              matrix: Optional[InterCommunityMatrix] = None) -> int:
    text = json.dumps(classification.to_dict(matrix), indent=2) + "\n"
    sink.write(text)
    return len(text.encode("utf-8"))


def read_labels(source) -> dict[int, str]:
    """``community_id,label`` lines; ``#`` comments and an optional header skipped."""
    labels = {}
    first = True
    for lineno, line in enumerate(read_text(source).splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        row = next(csv.reader([stripped]))
        if len(row) < 2:
            raise ValidationError(f"labels line {lineno}: expected 'community_id,label'")
        cid, label = row[0].strip(), ",".join(row[1:]).strip()
        if first:
            first = False
            if not cid.lstrip("-").isdigit():
                continue
        try:
            labels[int(cid)] = label
        except ValueError:
            raise ValidationError(f"labels line {lineno}: bad community id {cid!r}") from None
    return labels
