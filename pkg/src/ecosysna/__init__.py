"""Network analysis of website ecosystems built from user transitions."""

from .collapse import (
    InterCommunityMatrix,
    LinkClassification,
    classify_links,
    quotient_graph,
    quotient_mean_weights,
)
from .community import (
    DetectionConfig,
    Partition,
    aggregate_by_partition,
    brute_force_best_partition,
    detect_louvain,
    modularity,
)
from .graph import EcosystemGraph, TransitionEdge, WebsiteNode, degree, graph_size, induced_subgraph, normalize_domain
from .ingest import RelevanceFilter, SamplingFixture, TransitionRecord, apply_filter, load_fixture, parse_transitions
from .metrics import centrality, community_shares, network_summary
from .report import export_dot, export_gexf, render_report
from .sampler import SamplingConfig, SamplingTrace, attach_referrals, build_dataset, expand_similar

__version__ = "0.1.0"
