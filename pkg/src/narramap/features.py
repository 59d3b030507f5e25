"""Materializing query bindings into geo-feature datasets.

A ResultTable plus a column-role mapping becomes a FeatureCollection:
one record per distinct entity IRI, multi-valued columns aggregated into
lists, rows without geometry kept (they can still sit on a timeline).
Collections serialize to GeoJSON (RFC 7946) and CSV (RFC 4180).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .geo import Geometry, format_wkt, parse_wkt
from .temporal import Instant, TemporalValue, instant_value, interval_value, parse_time
from .terms import Term


class MissingEntityColumn(ValueError):
    pass


@dataclass
class ColumnMapping:
    """Which table columns play which structural role.

    Columns not named by any role become attributes, unless an explicit
    attribute list is given.
    """

    entity: str
    label: str | None = None
    geometry: str | None = None
    start: str | None = None
    end: str | None = None
    instant: str | None = None
    attributes: list[str] | None = None

    def roles(self) -> set[str]:
        named = {self.entity, self.label, self.geometry, self.start, self.end, self.instant}
        named.discard(None)
        return named  # type: ignore[return-value]


@dataclass
class FeatureRecord:
    entity: str
    label: str = ""
    geometry: Geometry | None = None
    attributes: dict[str, list[Term]] = field(default_factory=dict)
    temporal: TemporalValue | None = None

    def add_attribute(self, name: str, term: Term) -> None:
        values = self.attributes.setdefault(name, [])
        if term not in values:
            values.append(term)


@dataclass
class FeatureCollection:
    features: list[FeatureRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    def entities(self) -> list[str]:
        return [f.entity for f in self.features]


def materialize(table, mapping: ColumnMapping) -> FeatureCollection:
    """Aggregate table rows into one feature per distinct entity.

    Interval (start+end) wins over a point-in-time column; either end of
    the interval may be absent.  Output order is by entity IRI.
    """
    if mapping.entity not in table.variables:
        raise MissingEntityColumn(f"no column {mapping.entity!r} in table")
    attr_columns = mapping.attributes
    if attr_columns is None:
        attr_columns = [v for v in table.variables if v not in mapping.roles()]

    records: dict[str, FeatureRecord] = {}
    starts: dict[str, Instant] = {}
    ends: dict[str, Instant] = {}
    instants: dict[str, Instant] = {}

    for row in table.rows:
        entity_term = row.get(mapping.entity)
        if entity_term is None:
            continue
        entity = entity_term.value
        record = records.get(entity)
        if record is None:
            record = records[entity] = FeatureRecord(entity=entity)
        if mapping.label and not record.label:
            label_term = row.get(mapping.label)
            if label_term is not None:
                record.label = label_term.value
        if mapping.geometry and record.geometry is None:
            geom_term = row.get(mapping.geometry)
            if geom_term is not None:
                record.geometry = parse_wkt(geom_term.value)
        for role, sink in ((mapping.start, starts), (mapping.end, ends), (mapping.instant, instants)):
            if role and entity not in sink:
                term = row.get(role)
                if term is not None:
                    sink[entity] = parse_time(term.value)
        for name in attr_columns:
            term = row.get(name)
            if term is not None:
                record.add_attribute(name, term)

    for entity, record in records.items():
        start = starts.get(entity)
        end = ends.get(entity)
        if start is not None or end is not None:
            record.temporal = interval_value(start, end)
        elif entity in instants:
            record.temporal = instant_value(instants[entity])

    ordered = [records[key] for key in sorted(records)]
    return FeatureCollection(ordered)


# ---------------------------------------------------------------------------
# GeoJSON


def geometry_json(geom: Geometry | None):
    if geom is None:
        return None
    if geom.kind == "point":
        return {"type": "Point", "coordinates": list(geom.coordinates)}
    if geom.kind == "linestring":
        return {"type": "LineString", "coordinates": [list(c) for c in geom.coordinates]}
    return {
        "type": "Polygon",
        "coordinates": [[list(c) for c in ring] for ring in geom.coordinates],
    }


def _geometry_from_json(data) -> Geometry | None:
    if data is None:
        return None
    kind = data["type"]
    coords = data["coordinates"]
    if kind == "Point":
        return Geometry("point", tuple(coords))
    if kind == "LineString":
        return Geometry("linestring", tuple(tuple(c) for c in coords))
    if kind == "Polygon":
        return Geometry("polygon", tuple(tuple(tuple(c) for c in ring) for ring in coords))
    raise ValueError(f"unsupported GeoJSON geometry type {kind!r}")


def _term_json(term: Term):
    out: dict = {"kind": term.kind, "value": term.value}
    if term.datatype:
        out["datatype"] = term.datatype
    if term.language:
        out["language"] = term.language
    return out


def _term_from_json(data) -> Term:
    return Term(data["kind"], data["value"], data.get("datatype"), data.get("language"))


def _instant_json(instant: Instant):
    return {
        "iso": instant.iso(),
        "year": instant.year,
        "month": instant.month,
        "day": instant.day,
        "precision": instant.precision,
    }


def _instant_from_json(data) -> Instant:
    return Instant(data["year"], data.get("month"), data.get("day"), data["precision"])


def temporal_json(value: TemporalValue | None):
    if value is None:
        return None
    if value.kind == "instant":
        return {"kind": "instant", "instant": _instant_json(value.instant)}
    return {
        "kind": "interval",
        "start": _instant_json(value.start) if value.start else None,
        "end": _instant_json(value.end) if value.end else None,
    }


def temporal_from_json(data) -> TemporalValue | None:
    if data is None:
        return None
    if data["kind"] == "instant":
        return instant_value(_instant_from_json(data["instant"]))
    start = _instant_from_json(data["start"]) if data.get("start") else None
    end = _instant_from_json(data["end"]) if data.get("end") else None
    return interval_value(start, end)


def feature_json(record: FeatureRecord) -> dict:
    return {
        "type": "Feature",
        "id": record.entity,
        "geometry": geometry_json(record.geometry),
        "properties": {
            "label": record.label,
            "temporal": temporal_json(record.temporal),
            "attributes": {
                name: [_term_json(t) for t in values]
                for name, values in sorted(record.attributes.items())
            },
        },
    }


def write_geojson(collection: FeatureCollection) -> bytes:
    doc = {
        "type": "FeatureCollection",
        "features": [feature_json(record) for record in collection],
    }
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def read_geojson(data: bytes | str) -> FeatureCollection:
    doc = json.loads(data)
    if doc.get("type") != "FeatureCollection":
        raise ValueError("not a FeatureCollection document")
    features = []
    for item in doc.get("features", []):
        props = item.get("properties") or {}
        features.append(
            FeatureRecord(
                entity=item["id"],
                label=props.get("label", ""),
                geometry=_geometry_from_json(item.get("geometry")),
                attributes={
                    name: [_term_from_json(t) for t in values]
                    for name, values in (props.get("attributes") or {}).items()
                },
                temporal=temporal_from_json(props.get("temporal")),
            )
        )
    return FeatureCollection(features)


# ---------------------------------------------------------------------------
# CSV


def write_csv(collection: FeatureCollection) -> bytes:
    """Header row + one row per feature; list attributes joined by '|'."""
    attr_names = sorted({name for f in collection for name in f.attributes})
    header = ["entity", "label", "geometry", "start", "end"] + attr_names
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    for record in collection:
        start = end = ""
        if record.temporal is not None:
            s = record.temporal.effective_start()
            e = record.temporal.effective_end()
            start = s.iso() if s else ""
            end = e.iso() if e else ""
        row = [
            record.entity,
            record.label,
            format_wkt(record.geometry) if record.geometry else "",
            start,
            end,
        ]
        for name in attr_names:
            row.append("|".join(t.value for t in record.attributes.get(name, [])))
        writer.writerow(row)
    return buffer.getvalue().encode("utf-8")


def collection_from_records(records: list[FeatureRecord]) -> FeatureCollection:
    return FeatureCollection(sorted(records, key=lambda r: r.entity))


__all__ = [
    "ColumnMapping",
    "FeatureCollection",
    "FeatureRecord",
    "MissingEntityColumn",
    "collection_from_records",
    "feature_json",
    "materialize",
    "read_geojson",
    "temporal_from_json",
    "temporal_json",
    "write_csv",
    "write_geojson",
]
