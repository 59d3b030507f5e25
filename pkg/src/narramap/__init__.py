"""narramap: knowledge-graph exploration and narrative map building.

The pipeline in one breath: build SPARQL for relationship paths and
sub-event closures, execute them against an endpoint (live or replayed
from fixtures), materialize bindings into geo-features, ingest those
into a map-content graph, style them with a portrayal rule base, and
export a layered, legend- and timeline-bearing map document.
"""

__version__ = "0.1.0"

from .client import EndpointConfig, ResultTable, SparqlClient, canonical_query_key
from .contentkg import ContentGraph, LayerDescriptor
from .features import ColumnMapping, FeatureCollection, FeatureRecord, materialize
from .geo import Geometry, format_wkt, parse_wkt
from .portrayal import RuleBase, compile_to_sparql, evaluate, explain, load_rulebase
from .queries import (
    AreaSpec,
    ClosureSpec,
    EndpointProfile,
    Hop,
    PathSpec,
    build_area_query,
    build_closure_query,
    build_discovery_for_enrichment,
    build_enrichment_query,
    build_path_query,
    build_property_discovery,
)
from .session import WorkSession
from .store import GraphStore
from .temporal import Instant, TemporalValue, duration_days, parse_time

__all__ = [
    "AreaSpec",
    "ClosureSpec",
    "ColumnMapping",
    "ContentGraph",
    "EndpointConfig",
    "EndpointProfile",
    "FeatureCollection",
    "FeatureRecord",
    "Geometry",
    "GraphStore",
    "Hop",
    "Instant",
    "LayerDescriptor",
    "PathSpec",
    "ResultTable",
    "RuleBase",
    "SparqlClient",
    "TemporalValue",
    "WorkSession",
    "build_area_query",
    "build_closure_query",
    "build_discovery_for_enrichment",
    "build_enrichment_query",
    "build_path_query",
    "build_property_discovery",
    "canonical_query_key",
    "compile_to_sparql",
    "duration_days",
    "evaluate",
    "explain",
    "format_wkt",
    "load_rulebase",
    "materialize",
    "parse_time",
    "parse_wkt",
]
