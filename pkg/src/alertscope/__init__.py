"""alertscope: policy-alert analytics for insider-threat triage.

Generation of a synthetic alert corpus, signature detection with bundling,
an indexed aggregation store (weekly histogram, seven grid views, facets,
exports), bipartite user-resource graph exploration, branched session
history, and an HTTP/JSON API plus CLI on top.
"""

from .engine import BundlingConfig, detect_stream, eval_clause, eval_policy
from .graph import RelationGraph, build_graph, edge_alerts, node_history
from .history import ExplorationState, HistoryTree, build_label
from .model import (
    Activity,
    Alert,
    ClauseAttribute,
    ClauseOperator,
    Event,
    ExclusionSet,
    Policy,
    PolicyClause,
    ResourceKind,
    ResourceRef,
    ResourceType,
    TimeRange,
    alert_constants,
    parse_resource,
    resources_match,
    validate_alert,
)
from .scenarios import ScenarioSpec, default_policies, inject_scenario, inject_standard
from .store import AlertStore, FacetSpec, GridSpec, GridView
from .synth import Corpus, CorpusStats, GeneratorConfig, corpus_stats, generate, write_corpus

__version__ = "0.1.0"

__all__ = [
    "Activity",
    "Alert",
    "AlertStore",
    "BundlingConfig",
    "ClauseAttribute",
    "ClauseOperator",
    "Corpus",
    "CorpusStats",
    "Event",
    "ExclusionSet",
    "ExplorationState",
    "FacetSpec",
    "GeneratorConfig",
    "GridSpec",
    "GridView",
    "HistoryTree",
    "Policy",
    "PolicyClause",
    "RelationGraph",
    "ResourceKind",
    "ResourceRef",
    "ResourceType",
    "ScenarioSpec",
    "TimeRange",
    "alert_constants",
    "build_graph",
    "build_label",
    "corpus_stats",
    "default_policies",
    "detect_stream",
    "edge_alerts",
    "eval_clause",
    "eval_policy",
    "generate",
    "inject_scenario",
    "inject_standard",
    "node_history",
    "parse_resource",
    "resources_match",
    "validate_alert",
    "write_corpus",
]
