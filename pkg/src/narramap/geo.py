"""WKT geometry literals.

Accepts the geo-literal convention of an optional leading CRS IRI in
angle brackets, a case-insensitive geometry keyword, and arbitrary
internal whitespace.  Only point, linestring, and polygon are modeled;
coordinates are WGS84 lon/lat degrees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

CRS84 = "http://www.opengis.net/def/crs/OGC/1.3/CRS84"

Coord = tuple[float, float]


class MalformedWkt(ValueError):
    """WKT that does not parse; offset is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class CoordinateRangeError(ValueError):
    pass


@dataclass(frozen=True)
class Geometry:
    """A point, linestring, or polygon in lon/lat order.

    Polygon coordinates are a tuple of rings; every ring is closed
    (first vertex equals last) with at least four vertices.
    """

    kind: str
    coordinates: tuple
    source_crs: str = field(default=CRS84)

    def __post_init__(self) -> None:
        if self.kind not in ("point", "linestring", "polygon"):
            raise ValueError(f"unsupported geometry kind: {self.kind!r}")
        for lon, lat in self.all_coords():
            if not (-180.0 <= lon <= 180.0) or not (-90.0 <= lat <= 90.0):
                raise CoordinateRangeError(f"coordinate out of range: ({lon}, {lat})")
        if self.kind == "polygon":
            for ring in self.coordinates:
                if len(ring) < 4:
                    raise ValueError("polygon ring needs at least 4 vertices")
                if ring[0] != ring[-1]:
                    raise ValueError("polygon ring is not closed")

    def all_coords(self):
        if self.kind == "point":
            yield self.coordinates
        elif self.kind == "linestring":
            yield from self.coordinates
        else:
            for ring in self.coordinates:
                yield from ring

    def bbox(self) -> tuple[float, float, float, float]:
        """(min_lon, min_lat, max_lon, max_lat)."""
        coords = list(self.all_coords())
        lons = [c[0] for c in coords]
        lats = [c[1] for c in coords]
        return (min(lons), min(lats), max(lons), max(lats))


def point(lon: float, lat: float) -> Geometry:
    return Geometry("point", (lon, lat))


_CRS_PREFIX = re.compile(r"^\s*<([^<>\s]+)>\s*")
_KEYWORD = re.compile(r"\s*([A-Za-z]+)\s*")
_NUMBER = re.compile(r"\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)")


class _WktScanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str):
        raise MalformedWkt(message, self.pos)

    def take(self, pattern: re.Pattern, what: str) -> str:
        m = pattern.match(self.text, self.pos)
        if not m:
            self.fail(f"expected {what}")
        self.pos = m.end()
        return m.group(1)

    def punct(self, ch: str) -> None:
        m = re.compile(r"\s*(" + re.escape(ch) + r")").match(self.text, self.pos)
        if not m:
            self.fail(f"expected {ch!r}")
        self.pos = m.end()

    def peek_punct(self, ch: str) -> bool:
        return bool(re.compile(r"\s*" + re.escape(ch)).match(self.text, self.pos))

    def at_end(self) -> bool:
        return not self.text[self.pos :].strip()


def parse_wkt(text: str) -> Geometry:
    """Parse a WKT literal, tolerant of case and whitespace."""
    crs = CRS84
    m = _CRS_PREFIX.match(text)
    if m:
        crs = m.group(1)
        text = text[m.end() :]
        offset_base = m.end()
    else:
        offset_base = 0

    scanner = _WktScanner(text)
    try:
        keyword = scanner.take(_KEYWORD, "a geometry keyword").upper()
        if keyword == "POINT":
            scanner.punct("(")
            coords = _coord(scanner)
            scanner.punct(")")
            geom = Geometry("point", coords, source_crs=crs)
        elif keyword == "LINESTRING":
            geom = Geometry("linestring", _coord_list(scanner), source_crs=crs)
        elif keyword == "POLYGON":
            scanner.punct("(")
            rings = [_coord_list(scanner)]
            while scanner.peek_punct(","):
                scanner.punct(",")
                rings.append(_coord_list(scanner))
            scanner.punct(")")
            geom = Geometry("polygon", tuple(rings), source_crs=crs)
        else:
            scanner.pos = 0
            scanner.fail(f"unsupported geometry keyword {keyword!r}")
        if not scanner.at_end():
            scanner.fail("trailing characters after geometry")
        return geom
    except MalformedWkt as exc:
        if offset_base:
            raise MalformedWkt(str(exc).rsplit(" (at offset", 1)[0], exc.offset + offset_base) from None
        raise
    except ValueError as exc:
        # range / ring violations keep their own exception types
        raise exc


def _coord(scanner: _WktScanner) -> Coord:
    lon = float(scanner.take(_NUMBER, "a number"))
    lat = float(scanner.take(_NUMBER, "a number"))
    return (lon, lat)


def _coord_list(scanner: _WktScanner) -> tuple[Coord, ...]:
    scanner.punct("(")
    coords = [_coord(scanner)]
    while scanner.peek_punct(","):
        scanner.punct(",")
        coords.append(_coord(scanner))
    scanner.punct(")")
    return tuple(coords)


def _fmt(value: float) -> str:
    # shortest decimal that round-trips; integral values drop the '.0'
    out = repr(float(value))
    if out.endswith(".0"):
        out = out[:-2]
    return out


def format_wkt(geom: Geometry) -> str:
    """Canonical WKT: uppercase keyword, shortest round-trip decimals."""
    if geom.kind == "point":
        lon, lat = geom.coordinates
        return f"POINT({_fmt(lon)} {_fmt(lat)})"
    if geom.kind == "linestring":
        inner = ", ".join(f"{_fmt(lon)} {_fmt(lat)}" for lon, lat in geom.coordinates)
        return f"LINESTRING({inner})"
    rings = ", ".join(
        "(" + ", ".join(f"{_fmt(lon)} {_fmt(lat)}" for lon, lat in ring) + ")"
        for ring in geom.coordinates
    )
    return f"POLYGON({rings})"


def point_in_bbox(lon: float, lat: float, bbox: tuple[float, float, float, float]) -> bool:
    """Closed-region containment: boundary points are inside."""
    min_lon, min_lat, max_lon, max_lat = bbox
    return min_lon <= lon <= max_lon and min_lat <= lat <= max_lat


def point_in_polygon(lon: float, lat: float, ring: tuple[Coord, ...]) -> bool:
    """Ray casting over the outer ring; points on an edge count as inside."""
    inside = False
    for i in range(len(ring) - 1):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        if _on_segment(lon, lat, x1, y1, x2, y2):
            return True
        if (y1 > lat) != (y2 > lat):
            x_cross = x1 + (lat - y1) * (x2 - x1) / (y2 - y1)
            if lon < x_cross:
                inside = not inside
    return inside


def _on_segment(px, py, x1, y1, x2, y2, eps=1e-12) -> bool:
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    if abs(cross) > eps:
        return False
    return min(x1, x2) - eps <= px <= max(x1, x2) + eps and min(y1, y2) - eps <= py <= max(y1, y2) + eps
