"""Snowball expansion of a seed set over similarity and referral providers."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import IO, Iterable, Protocol

from .errors import ConfigError
from .graph import EcosystemGraph, normalize_domain
from .ingest import Referral, TransitionRecord, read_domain_list

log = logging.getLogger(__name__)

MAX_WAVES = "max_waves"
FRONTIER_EMPTY = "frontier_empty"
ALL_REPEATS = "all_repeats"


class Provider(Protocol):
    """Anything that can answer similarity and referral lookups by domain."""

    def __contains__(self, domain: str) -> bool: ...

    def similar(self, domain: str) -> list[tuple[str, float]]: ...

    def referrals_in(self, domain: str) -> list[Referral]: ...

    def referrals_out(self, domain: str) -> list[Referral]: ...


@dataclass(frozen=True)
class SamplingConfig:
    similarity_threshold: float = 50.0
    max_waves: int = 6
    top_k_similar: int = 5
    top_k_referral: int = 5

    def __post_init__(self):
        if not 0 <= self.similarity_threshold <= 100:
            raise ConfigError("similarity_threshold must lie in [0, 100]")
        if isinstance(self.max_waves, bool) or not isinstance(self.max_waves, int) or self.max_waves < 0:
            raise ConfigError("max_waves must be a non-negative integer")
        if self.top_k_similar < 1 or self.top_k_referral < 1:
            raise ConfigError("top-k limits must be positive")


@dataclass
class Wave:
    index: int
    domains: list[str]
    # every above-threshold candidate the previous frontier proposed, repeats included
    proposed: list[str] = field(default_factory=list)


@dataclass
class SamplingTrace:
    waves: list[Wave]
    termination: str
    stopped_at: int
    warnings: list[str] = field(default_factory=list)

    def discovered(self) -> dict[str, int]:
        return {d: w.index for w in self.waves for d in w.domains}

    def to_dict(self) -> dict:
        return {
            "waves": [
                {"wave": w.index, "domains": w.domains, "proposed": w.proposed}
                for w in self.waves
            ],
            "termination": self.termination,
            "stopped_at": self.stopped_at,
            "warnings": self.warnings,
        }

    def dump(self, sink: IO[str]) -> int:
        text = json.dumps(self.to_dict(), indent=2) + "\n"
        sink.write(text)
        return len(text.encode("utf-8"))


def _ordered_seeds(seeds: Iterable[str]) -> list[str]:
    out = []
    for s in seeds:
        d = normalize_domain(s)
        if d not in out:
            out.append(d)
    if not out:
        raise ConfigError("at least one seed is required")
    return out


def expand_similar(seeds: Iterable[str], provider: Provider,
                   config: SamplingConfig = SamplingConfig()) -> tuple[dict[str, int], SamplingTrace]:
    """Discover sites wave by wave through above-threshold similarity links.

    Returns ``{domain: wave}`` and the trace. Wave 0 holds the seeds. A wave
    keeps candidates scoring at least the threshold that were not found in an
    earlier wave. Expansion ends after ``config.max_waves`` waves, when the
    frontier proposes nothing, or when it proposes only known sites.
    """
    seed_list = _ordered_seeds(seeds)
    warnings = [f"seed {s!r} not found in provider" for s in seed_list if s not in provider]
    for w in warnings:
        log.warning(w)
    waves = [Wave(0, sorted(seed_list))]
    discovered = set(seed_list)
    frontier = waves[0].domains
    termination, stopped_at = MAX_WAVES, 0
    for t in range(1, config.max_waves + 1):
        proposed = set()
        for site in frontier:
            for dom, score in provider.similar(site)[:config.top_k_similar]:
                if score >= config.similarity_threshold:
                    proposed.add(dom)
        fresh = sorted(proposed - discovered)
        if not proposed:
            termination, stopped_at = FRONTIER_EMPTY, t
            break
        if not fresh:
            termination, stopped_at = ALL_REPEATS, t
            break
        waves.append(Wave(t, fresh, sorted(proposed)))
        discovered.update(fresh)
        frontier = fresh
        stopped_at = t
    trace = SamplingTrace(waves, termination, stopped_at, warnings)
    return trace.discovered(), trace


def attach_referrals(nodes: Iterable[str], provider: Provider,
                     config: SamplingConfig = SamplingConfig()) -> list[TransitionRecord]:
    """Turn referral lists into transition records.

    Incoming referrals become ``referrer -> node`` and outgoing ones
    ``node -> target``. Nodes are visited in the given order.
    """
    records = []
    for node in nodes:
        for ref in provider.referrals_in(node)[:config.top_k_referral]:
            records.append(TransitionRecord(ref.domain, node, ref.weight))
        for ref in provider.referrals_out(node)[:config.top_k_referral]:
            records.append(TransitionRecord(node, ref.domain, ref.weight))
    return records


def build_dataset(seeds: Iterable[str], provider: Provider,
                  config: SamplingConfig = SamplingConfig()) -> tuple[EcosystemGraph, SamplingTrace]:
    """Expand the seeds and attach referral edges into a raw graph.

    Node ids follow seed order, then waves in order. Sites that only appear
    through referrals are labelled one wave past the node that referenced them.
    """
    seed_list = _ordered_seeds(seeds)
    found, trace = expand_similar(seed_list, provider, config)
    ordered = list(seed_list)
    for wave in trace.waves[1:]:
        ordered.extend(wave.domains)

    graph = EcosystemGraph()
    for dom in ordered:
        graph.add_node(dom, is_seed=found[dom] == 0, wave=found[dom])
    for dom in ordered:
        for rec in attach_referrals([dom], provider, config):
            other = rec.src_raw if rec.dst_raw == dom else rec.dst_raw
            graph.add_node(other, wave=found[dom] + 1)
            graph.add_transition(rec.src_raw, rec.dst_raw, rec.weight)
    return graph.finalize(), trace


def read_seeds(source) -> list[str]:
    return _ordered_seeds(read_domain_list(source))
