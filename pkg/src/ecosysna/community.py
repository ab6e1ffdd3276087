"""Modularity and two-phase (Louvain-style) community detection.

Both modularity variants share one formulation::

    Q = 1/M * sum_ij [B_ij - gamma * a_i * b_j / M] * delta(c_i, c_j)

Directed (Leicht-Newman): B = A, a = out-strength, b = in-strength, M = m.
Undirected (Newman): B = A + A^T, a = b = total strength, M = 2m.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence

from .errors import ConfigError, PartitionMismatchError, SizeLimitError, UndefinedModularityError, ValidationError
from .graph import EcosystemGraph, normalize_domain
from .ingest import read_text

BRUTE_FORCE_LIMIT = 10
_EPS = 1e-12


@dataclass(frozen=True)
class DetectionConfig:
    resolution: float = 1.0
    max_passes: int = 100
    directed_modularity: bool = True
    seed: int = 0
    shuffle_order: bool = False
    restarts: int = 8

    def __post_init__(self):
        if not self.resolution > 0:
            raise ConfigError(f"resolution must be positive, got {self.resolution!r}")
        if self.max_passes < 1:
            raise ConfigError("max_passes must be at least 1")
        if self.restarts < 0:
            raise ConfigError("restarts must be non-negative")


@dataclass
class Partition:
    assignment: tuple[int, ...]
    community_count: int
    modularity: float
    truncated: bool = False
    history: list[float] = field(default_factory=list)

    def members(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.community_count)]
        for node, c in enumerate(self.assignment):
            groups[c].append(node)
        return groups

    def sizes(self) -> list[int]:
        return [len(g) for g in self.members()]

    def __getitem__(self, node: int) -> int:
        return self.assignment[node]

    def __len__(self):
        return len(self.assignment)


def canonicalize(assignment: Sequence[int]) -> tuple[int, ...]:
    """Renumber communities 0..k-1 in order of their smallest member id."""
    remap: dict = {}
    return tuple(remap.setdefault(c, len(remap)) for c in assignment)


def _labels(partition) -> Sequence[int]:
    return partition.assignment if isinstance(partition, Partition) else partition


# --- internal weighted level representation -------------------------------

@dataclass
class _Level:
    # nbrs[i][j] = B_ij (self-loops included, j may equal i)
    nbrs: list[dict[int, float]]
    a: list[float]
    b: list[float]
    M: float


def _base_level(graph: EcosystemGraph, directed: bool) -> _Level:
    n = len(graph)
    nbrs: list[dict[int, float]] = [{} for _ in range(n)]
    out_s = [0.0] * n
    in_s = [0.0] * n
    for e in graph.edges():
        out_s[e.src] += e.weight
        in_s[e.dst] += e.weight
        nbrs[e.src][e.dst] = nbrs[e.src].get(e.dst, 0.0) + e.weight
        if not directed:
            nbrs[e.dst][e.src] = nbrs[e.dst].get(e.src, 0.0) + e.weight
    if directed:
        return _Level(nbrs, out_s, in_s, graph.total_weight)
    tot = [o + i for o, i in zip(out_s, in_s)]
    return _Level(nbrs, tot, list(tot), 2.0 * graph.total_weight)


def _level_modularity(level: _Level, comm: Sequence[int], gamma: float) -> float:
    k = max(comm) + 1 if comm else 0
    internal = [0.0] * k
    sa = [0.0] * k
    sb = [0.0] * k
    for i, row in enumerate(level.nbrs):
        ci = comm[i]
        sa[ci] += level.a[i]
        sb[ci] += level.b[i]
        for j, w in row.items():
            if comm[j] == ci:
                internal[ci] += w
    M = level.M
    return sum(internal[c] / M - gamma * sa[c] * sb[c] / (M * M) for c in range(k))


def _aggregate_level(level: _Level, comm: Sequence[int], k: int) -> _Level:
    nbrs: list[dict[int, float]] = [{} for _ in range(k)]
    a = [0.0] * k
    b = [0.0] * k
    for i, row in enumerate(level.nbrs):
        ci = comm[i]
        a[ci] += level.a[i]
        b[ci] += level.b[i]
        target = nbrs[ci]
        for j, w in row.items():
            cj = comm[j]
            target[cj] = target.get(cj, 0.0) + w
    return _Level(nbrs, a, b, level.M)


def _incoming(level: _Level) -> list[dict[int, float]]:
    inc: list[dict[int, float]] = [{} for _ in level.nbrs]
    for i, row in enumerate(level.nbrs):
        for j, w in row.items():
            inc[j][i] = w
    return inc


def _local_moves(level: _Level, comm: list[int], gamma: float, rng: Optional[random.Random]) -> bool:
    """Greedy single-node moves until a sweep changes nothing.

    Gain of placing an isolated node i into community c (scaled by M):
        (B_ic + B_ci) - gamma * (a_i * Sb_c + b_i * Sa_c) / M
    A node moves only on strict improvement; ties go to the smallest id.
    Returns True if any node moved.
    """
    n = len(comm)
    M = level.M
    inc = _incoming(level)
    sa: dict[int, float] = {}
    sb: dict[int, float] = {}
    for i in range(n):
        sa[comm[i]] = sa.get(comm[i], 0.0) + level.a[i]
        sb[comm[i]] = sb.get(comm[i], 0.0) + level.b[i]
    order = list(range(n))
    moved_any = False
    while True:
        if rng is not None:
            rng.shuffle(order)
        moves = 0
        for i in order:
            ci = comm[i]
            ai, bi = level.a[i], level.b[i]
            links: dict[int, float] = {ci: 0.0}
            for j, w in level.nbrs[i].items():
                if j != i:
                    links[comm[j]] = links.get(comm[j], 0.0) + w
            for j, w in inc[i].items():
                if j != i:
                    links[comm[j]] = links.get(comm[j], 0.0) + w
            sa[ci] -= ai
            sb[ci] -= bi

            def gain(c):
                return (links[c] - gamma * (ai * sb.get(c, 0.0) + bi * sa.get(c, 0.0)) / M) / M

            stay = gain(ci)
            best_c, best_g = ci, stay
            for c in sorted(links):
                if c == ci:
                    continue
                g = gain(c)
                if g > best_g + _EPS:
                    best_c, best_g = c, g
            if best_c != ci and best_g > stay + _EPS:
                comm[i] = best_c
                moves += 1
            sa[comm[i]] = sa.get(comm[i], 0.0) + ai
            sb[comm[i]] = sb.get(comm[i], 0.0) + bi
        if moves == 0:
            return moved_any
        moved_any = True


def _renumber(comm: list[int]) -> tuple[list[int], int]:
    canon = canonicalize(comm)
    return list(canon), (max(canon) + 1 if canon else 0)


def _check_defined(graph: EcosystemGraph):
    if len(graph) == 0 or not graph.total_weight > 0:
        raise UndefinedModularityError("modularity is undefined on a graph with no edge weight")


def modularity(graph: EcosystemGraph, partition, config: DetectionConfig = DetectionConfig()) -> float:
    """Modularity of ``partition`` (a Partition or a per-node label sequence)."""
    _check_defined(graph)
    labels = _labels(partition)
    if len(labels) != len(graph):
        raise ValidationError(f"partition covers {len(labels)} nodes, graph has {len(graph)}")
    comm, _ = _renumber(list(labels))
    level = _base_level(graph, config.directed_modularity)
    return _level_modularity(level, comm, config.resolution)


def _louvain_run(base: _Level, gamma: float, max_passes: int,
                 rng: Optional[random.Random]) -> tuple[list[int], list[float], bool]:
    assignment = list(range(len(base.a)))
    history = [_level_modularity(base, assignment, gamma)]
    truncated = False

    def record():
        history.append(_level_modularity(base, assignment, gamma))

    while True:
        if len(history) > max_passes:
            truncated = True
            break
        _local_moves(base, assignment, gamma, rng)
        assignment, k = _renumber(assignment)
        record()
        moved_coarse = False
        while True:
            if len(history) > max_passes:
                truncated = True
                break
            level = _aggregate_level(base, assignment, k)
            comm = list(range(k))
            if not _local_moves(level, comm, gamma, rng):
                break
            moved_coarse = True
            assignment, k = _renumber([comm[c] for c in assignment])
            record()
        # stable once merging super-nodes no longer helps after a fine sweep
        if truncated or not moved_coarse:
            break
    return assignment, history, truncated


def detect_louvain(graph: EcosystemGraph, config: DetectionConfig = DetectionConfig()) -> Partition:
    """Two-phase agglomerative modularity maximisation.

    Phase 1 moves single nodes between neighbouring communities; phase 2
    collapses communities into super-nodes and repeats. After the coarse
    levels settle, the finest level is swept again from the merged result
    so that no single-node move can raise Q; the cycle repeats until a fine
    sweep followed by aggregation changes nothing. ``history`` holds Q after
    each pass of the winning run.

    The first run sweeps nodes in ascending id order (or a seeded shuffle
    when ``shuffle_order`` is set). ``config.restarts`` further runs use
    shuffles seeded ``seed + 1 ..``; the highest Q wins, earlier runs on ties.
    """
    _check_defined(graph)
    gamma = config.resolution
    base = _base_level(graph, config.directed_modularity)
    best = None
    for r in range(config.restarts + 1):
        if r == 0:
            rng = random.Random(config.seed) if config.shuffle_order else None
        else:
            rng = random.Random(config.seed + r)
        assignment, history, truncated = _louvain_run(base, gamma, config.max_passes, rng)
        q = _level_modularity(base, assignment, gamma)
        if best is None or q > best[0] + _EPS:
            best = (q, assignment, history, truncated)
    q, assignment, history, truncated = best
    canon = canonicalize(assignment)
    return Partition(canon, max(canon) + 1, q, truncated, history)


def make_partition(graph: EcosystemGraph, labels: Sequence[int],
                   config: DetectionConfig = DetectionConfig()) -> Partition:
    canon = canonicalize(labels)
    if len(canon) != len(graph):
        raise ValidationError(f"partition covers {len(canon)} nodes, graph has {len(graph)}")
    k = max(canon) + 1 if canon else 0
    return Partition(canon, k, modularity(graph, canon, config))


def aggregate_by_partition(graph: EcosystemGraph, partition) -> EcosystemGraph:
    """Collapse each community to a super-node named ``community-<id>``.

    Edge weights are summed; intra-community weight becomes a self-loop, so
    the total weight is unchanged.
    """
    labels = canonicalize(_labels(partition))
    if len(labels) != len(graph):
        raise ValidationError(f"partition covers {len(labels)} nodes, graph has {len(graph)}")
    k = max(labels) + 1 if labels else 0
    out = EcosystemGraph(allow_self_loops=True)
    for c in range(k):
        out.add_node(f"community-{c}")
    for e in graph.edges():
        out.add_edge(labels[e.src], labels[e.dst], e.weight)
    return out.finalize()


def _set_partitions(n: int):
    """Restricted growth strings of length n, in lexicographic order."""
    if n == 0:
        yield ()
        return
    rgs = [0] * n
    maxes = [0] * n  # maxes[i] = max(rgs[:i+1])
    while True:
        yield tuple(rgs)
        i = n - 1
        while i > 0 and rgs[i] > maxes[i - 1]:
            i -= 1
        if i == 0:
            return
        rgs[i] += 1
        maxes[i] = max(maxes[i - 1], rgs[i])
        for j in range(i + 1, n):
            rgs[j] = 0
            maxes[j] = maxes[i]


def brute_force_best_partition(graph: EcosystemGraph, config: DetectionConfig = DetectionConfig()) -> Partition:
    """Exhaustive search over all set partitions (order <= 10).

    Ties keep the lexicographically first canonical labelling.
    """
    if len(graph) > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"brute force limited to {BRUTE_FORCE_LIMIT} nodes, graph has {len(graph)}")
    _check_defined(graph)
    level = _base_level(graph, config.directed_modularity)
    best, best_q = None, float("-inf")
    for rgs in _set_partitions(len(graph)):
        q = _level_modularity(level, rgs, config.resolution)
        if q > best_q + _EPS:
            best, best_q = rgs, q
    return Partition(best, max(best) + 1, best_q)


# --- serialization --------------------------------------------------------

def write_partition_csv(graph: EcosystemGraph, partition: Partition, sink: IO[str]) -> int:
    lines = ["domain,community_id"]
    lines += [f"{n.domain},{partition.assignment[n.id]}" for n in graph.nodes]
    text = "\n".join(lines) + "\n"
    sink.write(text)
    return len(text.encode("utf-8"))


def partition_summary(partition: Partition) -> dict:
    return {
        "communities": partition.community_count,
        "modularity": partition.modularity,
        "sizes": partition.sizes(),
    }


def write_partition_summary(partition: Partition, sink: IO[str]) -> int:
    text = json.dumps(partition_summary(partition), indent=2) + "\n"
    sink.write(text)
    return len(text.encode("utf-8"))


def read_partition_csv(source: IO[str]) -> dict[str, int]:
    mapping = {}
    for lineno, line in enumerate(read_text(source).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#") or line.lower().replace(" ", "") == "domain,community_id":
            continue
        parts = line.rsplit(",", 1)
        if len(parts) != 2:
            raise ValidationError(f"partition line {lineno}: expected 'domain,community_id'")
        try:
            mapping[normalize_domain(parts[0])] = int(parts[1])
        except ValueError:
            raise ValidationError(f"partition line {lineno}: bad community id {parts[1]!r}") from None
    return mapping


def partition_from_mapping(graph: EcosystemGraph, mapping: dict[str, int],
                           config: DetectionConfig = DetectionConfig()) -> Partition:
    """Align a ``domain -> community`` mapping with the graph's node ids."""
    missing = [d for d in graph.domains() if d not in mapping]
    extra = [d for d in mapping if d not in graph]
    if missing or extra:
        raise PartitionMismatchError(missing, extra)
    labels = canonicalize([mapping[d] for d in graph.domains()])
    k = max(labels) + 1 if labels else 0
    q = modularity(graph, labels, config) if graph.total_weight > 0 else float("nan")
    return Partition(labels, k, q)
