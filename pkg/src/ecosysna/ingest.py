"""Reading transition datasets, filter lists and sampling fixtures."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Union

from .errors import ConfigError, DomainError, EmptyDatasetError, FixtureError, ValidationError
from .graph import EcosystemGraph, induced_subgraph, normalize_domain

CSV_HEADER = ("src", "dst", "weight")
FIXTURE_TOP_K = 5

Source = Union[IO[bytes], IO[str]]


@dataclass(frozen=True)
class TransitionRecord:
    src_raw: str
    dst_raw: str
    weight: float

    def __post_init__(self):
        if not self.src_raw or not self.dst_raw:
            raise ValidationError("transition endpoints must be non-empty")
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise ValidationError(f"weight must be a positive finite number, got {self.weight!r}")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    message: str
    raw: str = ""

    def __str__(self):
        return f"line {self.line}: {self.message}"


@dataclass
class ParseResult:
    records: list[TransitionRecord]
    diagnostics: list[Diagnostic]
    total_rows: int


def format_number(x: float) -> str:
    """Shortest round-trip decimal; integral values lose the trailing ``.0``."""
    if float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def read_text(source: Source) -> str:
    data = source.read()
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ValidationError(f"input is not valid UTF-8: {exc}") from exc
    return data


def _parse_weight(text) -> float:
    if isinstance(text, bool):
        raise ValueError("boolean weight")
    w = float(text)
    if not math.isfinite(w) or w <= 0:
        raise ValueError(f"weight must be positive, got {text!r}")
    return w


def _parse_csv(text: str) -> ParseResult:
    records, diags = [], []
    total = 0
    header_allowed = True
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        row = [c.strip() for c in next(csv.reader([line]))]
        if header_allowed and tuple(c.lower() for c in row) == CSV_HEADER:
            header_allowed = False
            continue
        header_allowed = False
        total += 1
        if len(row) != 3:
            diags.append(Diagnostic(lineno, f"expected 3 columns, found {len(row)}", line))
            continue
        src, dst, weight = row
        if not src or not dst:
            diags.append(Diagnostic(lineno, "empty domain field", line))
            continue
        try:
            w = _parse_weight(weight)
        except ValueError:
            diags.append(Diagnostic(lineno, f"invalid weight {weight!r}", line))
            continue
        records.append(TransitionRecord(src, dst, w))
    return ParseResult(records, diags, total)


def _parse_json(text: str) -> ParseResult:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc
    if isinstance(doc, dict):
        doc = doc.get("transitions")
    if not isinstance(doc, list):
        raise ValidationError("expected a list of transitions or {\"transitions\": [...]}")
    records, diags = [], []
    for i, item in enumerate(doc, start=1):
        # JSON "line" numbers are 1-based item positions
        if not isinstance(item, dict):
            diags.append(Diagnostic(i, "transition must be an object", json.dumps(item)))
            continue
        src, dst = item.get("src"), item.get("dst")
        if not isinstance(src, str) or not isinstance(dst, str) or not src.strip() or not dst.strip():
            diags.append(Diagnostic(i, "src/dst must be non-empty strings", json.dumps(item)))
            continue
        try:
            w = _parse_weight(item.get("weight"))
        except (TypeError, ValueError):
            diags.append(Diagnostic(i, f"invalid weight {item.get('weight')!r}", json.dumps(item)))
            continue
        records.append(TransitionRecord(src.strip(), dst.strip(), w))
    return ParseResult(records, diags, len(doc))


def parse_transitions(source: Source, format: str = "csv") -> ParseResult:
    """Parse a transition dataset, collecting malformed rows as diagnostics.

    Raises EmptyDatasetError when no row is usable.
    """
    text = read_text(source)
    if format == "csv":
        result = _parse_csv(text)
    elif format == "json":
        result = _parse_json(text)
    else:
        raise ConfigError(f"unknown transition format {format!r}")
    if not result.records:
        raise EmptyDatasetError(f"no valid transitions ({len(result.diagnostics)} malformed rows)")
    return result


def read_transitions(path, format: Optional[str] = None) -> ParseResult:
    if format is None:
        format = "json" if str(path).endswith(".json") else "csv"
    with open(path, "rb") as fh:
        return parse_transitions(fh, format)


def write_transitions(rows: Iterable, sink: IO[str], header: bool = True) -> int:
    """Write ``(src, dst, weight)`` rows or TransitionRecords as CSV."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(CSV_HEADER)
    for row in rows:
        if isinstance(row, TransitionRecord):
            row = (row.src_raw, row.dst_raw, row.weight)
        src, dst, w = row
        writer.writerow((src, dst, format_number(w)))
    text = buf.getvalue()
    sink.write(text)
    return len(text.encode("utf-8"))


def graph_to_rows(graph: EcosystemGraph) -> list[tuple[str, str, float]]:
    names = graph.domains()
    return [(names[e.src], names[e.dst], e.weight) for e in graph.edges()]


@dataclass
class BuildReport:
    self_loops: int = 0
    rejected: list[Diagnostic] = field(default_factory=list)


def build_graph(records: Iterable[TransitionRecord]) -> tuple[EcosystemGraph, BuildReport]:
    """Fold records into a finalized graph; bad domains are reported, not fatal."""
    graph = EcosystemGraph()
    report = BuildReport()
    for i, rec in enumerate(records, start=1):
        try:
            graph.add_transition(rec.src_raw, rec.dst_raw, rec.weight)
        except DomainError as exc:
            report.rejected.append(Diagnostic(i, str(exc), exc.raw))
    report.self_loops = graph.dropped_self_loops
    return graph.finalize(), report


# relevance filtering

@dataclass(frozen=True)
class RelevanceFilter:
    mode: str
    domains: frozenset
    drop_isolated: bool = True

    def __post_init__(self):
        if self.mode not in ("allowlist", "blocklist"):
            raise ConfigError(f"filter mode must be allowlist or blocklist, got {self.mode!r}")
        object.__setattr__(self, "domains", frozenset(normalize_domain(d) for d in self.domains))
        if self.mode == "allowlist" and not self.domains:
            raise ConfigError("allowlist filter needs at least one domain")


@dataclass
class RemovalReport:
    removed: list[tuple[str, str]] = field(default_factory=list)

    def domains(self) -> list[str]:
        return [d for d, _ in self.removed]

    def to_dict(self) -> dict:
        return {"removed": [{"domain": d, "reason": r} for d, r in self.removed]}


def read_domain_list(source: Source) -> list[str]:
    """One domain per line; blank lines and ``#`` comments ignored."""
    out = []
    for line in read_text(source).splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(normalize_domain(line))
    return out


def load_filter(source: Source, mode: str, drop_isolated: bool = True) -> RelevanceFilter:
    mode = {"allow": "allowlist", "block": "blocklist"}.get(mode, mode)
    return RelevanceFilter(mode, frozenset(read_domain_list(source)), drop_isolated)


def apply_filter(graph: EcosystemGraph, filt: RelevanceFilter) -> tuple[EcosystemGraph, RemovalReport]:
    report = RemovalReport()
    listed = set()
    for n in graph.nodes:
        if filt.mode == "allowlist" and n.domain not in filt.domains:
            report.removed.append((n.domain, "not_allowlisted"))
        elif filt.mode == "blocklist" and n.domain in filt.domains:
            report.removed.append((n.domain, "blocklisted"))
        else:
            continue
        listed.add(n.id)
    sub = induced_subgraph(graph, lambda n: n.id not in listed)
    if filt.drop_isolated:
        isolated = {n.id for n in sub.nodes if not sub.successors(n.id) and not sub.predecessors(n.id)}
        if isolated:
            report.removed.extend((sub.nodes[i].domain, "isolated") for i in sorted(isolated))
            sub = induced_subgraph(sub, lambda n: n.id not in isolated)
    return sub, report


# sampling fixtures

@dataclass(frozen=True)
class Referral:
    domain: str
    weight: float = 1.0


@dataclass
class SiteEntry:
    similar: list[tuple[str, float]] = field(default_factory=list)
    referrals_in: list[Referral] = field(default_factory=list)
    referrals_out: list[Referral] = field(default_factory=list)


@dataclass
class SamplingFixture:
    """Offline stand-in for a similarity/referral service, keyed by domain."""

    sites: dict[str, SiteEntry] = field(default_factory=dict)

    def __contains__(self, domain):
        return domain in self.sites

    def similar(self, domain: str) -> list[tuple[str, float]]:
        entry = self.sites.get(domain)
        return list(entry.similar) if entry else []

    def referrals_in(self, domain: str) -> list[Referral]:
        entry = self.sites.get(domain)
        return list(entry.referrals_in) if entry else []

    def referrals_out(self, domain: str) -> list[Referral]:
        entry = self.sites.get(domain)
        return list(entry.referrals_out) if entry else []

    def to_dict(self) -> dict:
        def ref(r):
            return r.domain if r.weight == 1.0 else {"domain": r.domain, "weight": r.weight}

        return {"sites": {
            d: {
                "similar": [{"domain": s, "score": sc} for s, sc in e.similar],
                "referrals_in": [ref(r) for r in e.referrals_in],
                "referrals_out": [ref(r) for r in e.referrals_out],
            }
            for d, e in self.sites.items()
        }}


def _fixture_domain(value, path) -> str:
    if not isinstance(value, str):
        raise FixtureError(path, "expected a domain string")
    try:
        return normalize_domain(value)
    except DomainError:
        raise FixtureError(path, f"cannot normalize domain {value!r}") from None


def _number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FixtureError(path, "expected a number")
    return float(value)


def _referrals(items, path, limit) -> list[Referral]:
    if not isinstance(items, list):
        raise FixtureError(path, "expected a list")
    out = []
    for i, item in enumerate(items):
        p = f"{path}[{i}]"
        if isinstance(item, dict):
            dom = _fixture_domain(item.get("domain"), f"{p}.domain")
            w = _number(item.get("weight", 1), f"{p}.weight")
            if not (w > 0 and math.isfinite(w)):
                raise FixtureError(f"{p}.weight", "referral weight must be positive")
            out.append(Referral(dom, w))
        else:
            out.append(Referral(_fixture_domain(item, p)))
    return out[:limit]


def parse_fixture(doc, limit: int = FIXTURE_TOP_K) -> SamplingFixture:
    """Validate a decoded fixture document.

    Similar lists are sorted by descending score (ties by domain) and cut to
    ``limit``; referral lists keep their order and are cut to ``limit`` each.
    """
    if not isinstance(doc, dict):
        raise FixtureError("$", "expected an object")
    sites = doc.get("sites")
    if not isinstance(sites, dict):
        raise FixtureError("$.sites", "expected an object keyed by domain")
    fixture = SamplingFixture()
    for raw_domain, body in sites.items():
        base = f"$.sites[{raw_domain!r}]"
        domain = _fixture_domain(raw_domain, base)
        if domain in fixture.sites:
            raise FixtureError(base, f"duplicate site {domain!r} after normalization")
        if not isinstance(body, dict):
            raise FixtureError(base, "expected an object")
        unknown = set(body) - {"similar", "referrals_in", "referrals_out"}
        if unknown:
            raise FixtureError(base, f"unknown keys {sorted(unknown)}")
        similar = body.get("similar", [])
        if not isinstance(similar, list):
            raise FixtureError(f"{base}.similar", "expected a list")
        scored = []
        for i, item in enumerate(similar):
            p = f"{base}.similar[{i}]"
            if not isinstance(item, dict):
                raise FixtureError(p, "expected {\"domain\", \"score\"}")
            dom = _fixture_domain(item.get("domain"), f"{p}.domain")
            score = _number(item.get("score"), f"{p}.score")
            if not 0 <= score <= 100:
                raise FixtureError(f"{p}.score", f"similarity score {score:g} outside [0, 100]")
            scored.append((dom, score))
        scored.sort(key=lambda t: (-t[1], t[0]))
        fixture.sites[domain] = SiteEntry(
            similar=scored[:limit],
            referrals_in=_referrals(body.get("referrals_in", []), f"{base}.referrals_in", limit),
            referrals_out=_referrals(body.get("referrals_out", []), f"{base}.referrals_out", limit),
        )
    return fixture


def load_fixture(source: Source, limit: int = FIXTURE_TOP_K) -> SamplingFixture:
    try:
        doc = json.loads(read_text(source))
    except json.JSONDecodeError as exc:
        raise FixtureError("$", f"invalid JSON: {exc}") from exc
    return parse_fixture(doc, limit)
