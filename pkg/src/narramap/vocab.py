"""Vocabulary for the map-content and cartography graph modules.

Two namespaces of our own (content structure and portrayal), plus reused
terms from SOSA (observations), PROV (source tracking), GeoSPARQL
(geometry literals), and OWL (entity alignment).  The full vocabulary is
also shipped as a Turtle artifact; :func:`vocabulary_turtle` regenerates
it deterministically.
"""

from __future__ import annotations

from .terms import OWL, RDF, RDFS, Term, iri, literal
from .turtle import serialize_turtle

NMC = "https://narramap.dev/ns/content#"
NCA = "https://narramap.dev/ns/carto#"
SOSA = "http://www.w3.org/ns/sosa/"
PROV = "http://www.w3.org/ns/prov#"
GEO = "http://www.opengis.net/ont/geosparql#"

VOCABULARY_VERSION = "0.1.0"

# content module classes
MAP_CONTENT = NMC + "MapContent"
MAP_CONTENT_TYPE = NMC + "MapContentType"
MAP_CONTENT_ITEM = NMC + "MapContentItem"
SPATIOTEMPORAL_EXTENT = NMC + "SpatiotemporalExtent"
SPATIAL_EXTENT = NMC + "SpatialExtent"
TEMPORAL_EXTENT = NMC + "TemporalExtent"
OBJECT_CLASS = NMC + "Object"
EVENT_CLASS = NMC + "Event"

# content module relations
HAS_MAP_CONTENT_TYPE = NMC + "hasMapContentType"
HAS_MAP_ITEM = NMC + "hasMapItem"
HAS_SPATIOTEMPORAL_EXTENT = NMC + "hasSpatiotemporalExtent"
HAS_SPATIAL_EXTENT = NMC + "hasSpatialExtent"
HAS_TEMPORAL_EXTENT = NMC + "hasTemporalExtent"
REPRESENTS = NMC + "represents"
START_TIME = NMC + "startTime"
END_TIME = NMC + "endTime"
INSTANT_TIME = NMC + "instantTime"
START_PRECISION = NMC + "startPrecision"
END_PRECISION = NMC + "endPrecision"
INSTANT_PRECISION = NMC + "instantPrecision"
ITEM_KIND = NMC + "itemKind"
SOURCE_ENDPOINT = NMC + "sourceEndpoint"
SOURCE_QUERY_KEY = NMC + "sourceQueryKey"

# cartography module classes
FEATURE_TYPE_STYLE = NCA + "FeatureTypeStyle"
SYMBOL = NCA + "Symbol"
SYMBOLIZER = NCA + "Symbolizer"
STROKE = NCA + "Stroke"
FILL = NCA + "Fill"
LEGEND = NCA + "Legend"
LEGEND_ITEM = NCA + "LegendItem"
PORTRAYAL_RULE = NCA + "PortrayalRule"

# cartography module relations
HAS_STYLE = NCA + "hasStyle"
HAS_SYMBOL = NCA + "hasSymbol"
HAS_SYMBOLIZER = NCA + "hasSymbolizer"
HAS_LEGEND = NCA + "hasLegend"
HAS_LEGEND_ITEM = NCA + "hasLegendItem"
IS_SYMBOLIZED_BY = NCA + "isSymbolizedBy"
HAS_PRIMARY_SYMBOLIZER = NCA + "hasPrimarySymbolizer"
HAS_STROKE = NCA + "hasStroke"
HAS_FILL = NCA + "hasFill"
GEOMETRY_KIND = NCA + "geometryKind"
MARKER_SHAPE = NCA + "markerShape"
MARKER_SIZE = NCA + "markerSize"
COLOR = NCA + "color"
OPACITY = NCA + "opacity"
WIDTH = NCA + "width"
DASH_PATTERN = NCA + "dashPattern"
LEGEND_LABEL = NCA + "legendLabel"
RULE_PRIORITY = NCA + "rulePriority"
RULE_LABEL = NCA + "ruleLabel"
RULE_CONDITION = NCA + "ruleCondition"
FOR_LAYER = NCA + "forLayer"

# reused terms
SOSA_OBSERVATION = SOSA + "Observation"
SOSA_OBSERVATION_COLLECTION = SOSA + "ObservationCollection"
SOSA_OBSERVED_PROPERTY = SOSA + "observedProperty"
SOSA_HAS_SIMPLE_RESULT = SOSA + "hasSimpleResult"
SOSA_HAS_MEMBER = SOSA + "hasMember"
SOSA_IS_FEATURE_OF_INTEREST_OF = SOSA + "isFeatureOfInterestOf"
PROV_WAS_DERIVED_FROM = PROV + "wasDerivedFrom"
PROV_ENTITY = PROV + "Entity"
GEO_AS_WKT = GEO + "asWKT"
GEO_WKT_LITERAL = GEO + "wktLiteral"

CONTENT_CLASSES = {
    MAP_CONTENT: "Everything a narrative map renders.",
    MAP_CONTENT_TYPE: "One thematic group of items; interpreted as a map layer.",
    MAP_CONTENT_ITEM: "One individual item displayed on the map.",
    SPATIOTEMPORAL_EXTENT: "The spatial and temporal scope of an item.",
    SPATIAL_EXTENT: "The spatial footprint of an item.",
    TEMPORAL_EXTENT: "The temporal scope of an item.",
    OBJECT_CLASS: "A geographic object, such as a mountain, city, or park.",
    EVENT_CLASS: "An event, such as a natural disaster, expedition, or war.",
}

CONTENT_RELATIONS = {
    HAS_MAP_CONTENT_TYPE: "Links map content to one of its layers.",
    HAS_MAP_ITEM: "Links a layer to one of its items.",
    HAS_SPATIOTEMPORAL_EXTENT: "Links an item to its spatiotemporal scope.",
    HAS_SPATIAL_EXTENT: "Links a spatiotemporal extent to its spatial part.",
    HAS_TEMPORAL_EXTENT: "Links a spatiotemporal extent to its temporal part.",
    REPRESENTS: "Links an item to the object or event individual it depicts.",
    START_TIME: "Start of a temporal extent as xsd:dateTime.",
    END_TIME: "End of a temporal extent as xsd:dateTime.",
    INSTANT_TIME: "A single point in time as xsd:dateTime.",
    START_PRECISION: "Calendar precision of the start (9 year, 10 month, 11 day).",
    END_PRECISION: "Calendar precision of the end.",
    INSTANT_PRECISION: "Calendar precision of the instant.",
    ITEM_KIND: "Whether the item depicts an object or an event.",
    SOURCE_ENDPOINT: "Query endpoint a layer was retrieved from.",
    SOURCE_QUERY_KEY: "Canonical hash of the query that produced a layer.",
}

CARTO_CLASSES = {
    FEATURE_TYPE_STYLE: "The style converting one layer to graphics.",
    SYMBOL: "A legend-bearing group of symbolizers.",
    SYMBOLIZER: "A concrete graphic primitive for one geometry kind.",
    STROKE: "Line rendering parameters.",
    FILL: "Area rendering parameters.",
    LEGEND: "The map legend.",
    LEGEND_ITEM: "One legend entry.",
    PORTRAYAL_RULE: "A condition that assigns a symbolizer to items.",
}

CARTO_RELATIONS = {
    HAS_STYLE: "Links a layer to its style.",
    HAS_SYMBOL: "Links a style to one of its symbols.",
    HAS_SYMBOLIZER: "Links a symbol to one of its symbolizers.",
    HAS_LEGEND: "Links a style to its legend.",
    HAS_LEGEND_ITEM: "Links a legend to one of its entries.",
    IS_SYMBOLIZED_BY: "Assigns a symbolizer to a map item.",
    HAS_PRIMARY_SYMBOLIZER: "The single highest-priority assignment for a map item.",
    HAS_STROKE: "Links a symbolizer to its stroke.",
    HAS_FILL: "Links a symbolizer to its fill.",
    GEOMETRY_KIND: "Which geometry kind a symbolizer draws.",
    MARKER_SHAPE: "Point marker shape.",
    MARKER_SIZE: "Point marker size in pixels.",
    COLOR: "Color as #RRGGBB.",
    OPACITY: "Opacity in [0, 1].",
    WIDTH: "Stroke width in pixels.",
    DASH_PATTERN: "Stroke dash lengths in pixels.",
    LEGEND_LABEL: "Human-readable legend text.",
    RULE_PRIORITY: "Evaluation priority; unique within a rule base.",
    RULE_LABEL: "Human-readable rule description.",
    RULE_CONDITION: "Serialized condition of a rule.",
    FOR_LAYER: "Layer a style targets.",
}


def vocabulary_triples() -> list[tuple[Term, Term, Term]]:
    triples: list[tuple[Term, Term, Term]] = []
    rdf_type = iri(RDF + "type")
    rdfs_class = iri(RDFS + "Class")
    rdf_property = iri(RDF + "Property")
    rdfs_label = iri(RDFS + "label")
    rdfs_comment = iri(RDFS + "comment")
    owl_version = iri(OWL + "versionInfo")

    for ns_iri in (NMC.rstrip("#"), NCA.rstrip("#")):
        triples.append((iri(ns_iri), iri(OWL + "versionIRI"), iri(ns_iri + "/" + VOCABULARY_VERSION)))
        triples.append((iri(ns_iri), rdf_type, iri(OWL + "Ontology")))
        triples.append((iri(ns_iri), owl_version, literal(VOCABULARY_VERSION)))

    for classes in (CONTENT_CLASSES, CARTO_CLASSES):
        for class_iri, comment in classes.items():
            subject = iri(class_iri)
            triples.append((subject, rdf_type, rdfs_class))
            triples.append((subject, rdfs_label, literal(class_iri.rsplit("#", 1)[1], language="en")))
            triples.append((subject, rdfs_comment, literal(comment, language="en")))
    for relations in (CONTENT_RELATIONS, CARTO_RELATIONS):
        for prop_iri, comment in relations.items():
            subject = iri(prop_iri)
            triples.append((subject, rdf_type, rdf_property))
            triples.append((subject, rdfs_label, literal(prop_iri.rsplit("#", 1)[1], language="en")))
            triples.append((subject, rdfs_comment, literal(comment, language="en")))
    return triples


def vocabulary_turtle() -> bytes:
    return serialize_turtle(vocabulary_triples())
