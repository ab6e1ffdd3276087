"""Directed weighted graph of websites linked by user transitions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple, Optional, Union

from .errors import DomainError, GraphFrozenError, NodeNotFoundError

NodeRef = Union[int, str]


def normalize_domain(raw: str) -> str:
    """Reduce a URL or hostname to a bare lowercase domain.

    Strips scheme, userinfo, path/query/fragment, port, trailing dots and a
    leading ``www.``. Raises :class:`DomainError` if nothing is left.
    """
    s = raw.strip().lower()
    if "://" in s:
        s = s.split("://", 1)[1]
    elif s.startswith("//"):
        s = s[2:]
    for sep in "/?#":
        s = s.split(sep, 1)[0]
    s = s.rsplit("@", 1)[-1]
    s = s.split(":", 1)[0]
    s = s.strip().rstrip(".")
    if s.startswith("www."):
        s = s[4:]
    if not s:
        raise DomainError(raw)
    return s


@dataclass
class WebsiteNode:
    id: int
    domain: str
    node_weight: float = 0.0
    is_seed: bool = False
    # 0 for seeds, sampling wave otherwise; None when the graph was not sampled
    wave: Optional[int] = None


@dataclass(frozen=True)
class TransitionEdge:
    src: int
    dst: int
    weight: float


class GraphSize(NamedTuple):
    order: int
    size: int
    total_weight: float


class EcosystemGraph:
    """Simple directed graph with summed parallel edges.

    Nodes get dense integer ids in first-mention order. Self-transitions are
    dropped and counted in ``dropped_self_loops`` unless the graph was built
    with ``allow_self_loops=True`` (used for community super-node graphs).
    """

    def __init__(self, allow_self_loops: bool = False):
        self.nodes: list[WebsiteNode] = []
        self._index: dict[str, int] = {}
        self._succ: list[dict[int, float]] = []
        self._pred: list[dict[int, float]] = []
        self.total_weight = 0.0
        self.allow_self_loops = allow_self_loops
        self.dropped_self_loops = 0
        self.finalized = False

    # construction

    def _check_mutable(self):
        if self.finalized:
            raise GraphFrozenError("graph is finalized")

    def add_node(self, domain: str, is_seed: bool = False, wave: Optional[int] = None) -> int:
        """Return the id for ``domain``, creating the node if needed.

        Seed status and wave are only set when the node is created.
        """
        self._check_mutable()
        domain = normalize_domain(domain)
        nid = self._index.get(domain)
        if nid is not None:
            return nid
        if is_seed:
            wave = 0
        elif wave == 0:
            raise ValueError("wave 0 is reserved for seeds")
        nid = len(self.nodes)
        self.nodes.append(WebsiteNode(nid, domain, 0.0, is_seed, wave))
        self._index[domain] = nid
        self._succ.append({})
        self._pred.append({})
        return nid

    def add_edge(self, src: int, dst: int, weight: float) -> Optional[TransitionEdge]:
        """Add ``weight`` to the edge ``src -> dst`` between existing node ids."""
        self._check_mutable()
        if not weight > 0:
            raise ValueError(f"edge weight must be positive, got {weight!r}")
        for nid in (src, dst):
            if not 0 <= nid < len(self.nodes):
                raise NodeNotFoundError(nid)
        if src == dst and not self.allow_self_loops:
            self.dropped_self_loops += 1
            return None
        w = self._succ[src].get(dst, 0.0) + weight
        self._succ[src][dst] = w
        self._pred[dst][src] = w
        self.nodes[src].node_weight += weight
        self.nodes[dst].node_weight += weight
        self.total_weight += weight
        return TransitionEdge(src, dst, w)

    def add_transition(self, src_domain: str, dst_domain: str, weight: float) -> Optional[TransitionEdge]:
        """Record a user transition between two sites.

        Returns the merged edge, or None when the transition was a self-loop
        after normalization (counted in ``dropped_self_loops``).
        """
        if not weight > 0:
            raise ValueError(f"transition weight must be positive, got {weight!r}")
        src_norm = normalize_domain(src_domain)
        dst_norm = normalize_domain(dst_domain)
        if src_norm == dst_norm and not self.allow_self_loops:
            self._check_mutable()
            self.dropped_self_loops += 1
            return None
        return self.add_edge(self.add_node(src_norm), self.add_node(dst_norm), weight)

    def finalize(self) -> "EcosystemGraph":
        self.finalized = True
        return self

    # queries

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, domain):
        try:
            return normalize_domain(domain) in self._index
        except (DomainError, AttributeError):
            return False

    def node_id(self, node: NodeRef) -> int:
        if isinstance(node, str):
            try:
                nid = self._index.get(normalize_domain(node))
            except DomainError:
                nid = None
            if nid is None:
                raise NodeNotFoundError(node)
            return nid
        if isinstance(node, int) and 0 <= node < len(self.nodes):
            return node
        raise NodeNotFoundError(node)

    def node(self, node: NodeRef) -> WebsiteNode:
        return self.nodes[self.node_id(node)]

    def domains(self) -> list[str]:
        return [n.domain for n in self.nodes]

    def successors(self, node: NodeRef) -> dict[int, float]:
        """Read-only view ``{dst_id: weight}``; do not mutate."""
        return self._succ[self.node_id(node)]

    def predecessors(self, node: NodeRef) -> dict[int, float]:
        return self._pred[self.node_id(node)]

    def edges(self) -> Iterator[TransitionEdge]:
        """Edges ordered by source id, then by insertion order of the target."""
        for src, nbrs in enumerate(self._succ):
            for dst, w in nbrs.items():
                yield TransitionEdge(src, dst, w)

    def edge_weight(self, src: NodeRef, dst: NodeRef) -> float:
        return self._succ[self.node_id(src)].get(self.node_id(dst), 0.0)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self._succ)

    def degree(self, node: NodeRef, mode: str = "total", weighted: bool = False) -> float:
        nid = self.node_id(node)
        if mode == "total":
            return self.degree(nid, "in", weighted) + self.degree(nid, "out", weighted)
        if mode == "in":
            adj = self._pred[nid]
        elif mode == "out":
            adj = self._succ[nid]
        else:
            raise ValueError(f"unknown degree mode {mode!r}")
        return sum(adj.values()) if weighted else len(adj)

    def size(self) -> GraphSize:
        return GraphSize(len(self.nodes), self.edge_count, self.total_weight)

    def canonical(self) -> tuple:
        """Id-independent form used for equality checks between graphs."""
        nodes = tuple(sorted((n.domain, n.is_seed, n.wave) for n in self.nodes))
        edges = tuple(sorted(
            (self.nodes[e.src].domain, self.nodes[e.dst].domain, e.weight) for e in self.edges()
        ))
        return nodes, edges

    def __repr__(self):
        order, size, total = self.size()
        return f"<EcosystemGraph order={order} size={size} total_weight={total:g}>"


def degree(graph: EcosystemGraph, node: NodeRef, mode: str = "total", weighted: bool = False) -> float:
    return graph.degree(node, mode, weighted)


def graph_size(graph: EcosystemGraph) -> GraphSize:
    return graph.size()


def induced_subgraph(graph: EcosystemGraph, keep: Callable[[WebsiteNode], bool]) -> EcosystemGraph:
    """Subgraph on the nodes satisfying ``keep``.

    Surviving nodes keep their relative order, seed flag and wave; ids are
    reassigned densely and node weights reflect only the surviving edges.
    """
    sub = EcosystemGraph(allow_self_loops=graph.allow_self_loops)
    remap = {}
    for n in graph.nodes:
        if keep(n):
            remap[n.id] = sub.add_node(n.domain, n.is_seed, n.wave)
    for e in graph.edges():
        if e.src in remap and e.dst in remap:
            sub.add_edge(remap[e.src], remap[e.dst], e.weight)
    return sub.finalize()
