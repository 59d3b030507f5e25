import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from narramap.geo import (
    CRS84,
    CoordinateRangeError,
    Geometry,
    MalformedWkt,
    format_wkt,
    parse_wkt,
    point,
    point_in_bbox,
    point_in_polygon,
)

coordinate = st.tuples(
    st.floats(min_value=-180, max_value=180, allow_nan=False),
    st.floats(min_value=-90, max_value=90, allow_nan=False),
)


def test_parse_simple_point():
    geom = parse_wkt("POINT(-88.23 14.92)")
    assert geom.kind == "point"
    assert geom.coordinates == (-88.23, 14.92)


def test_parse_is_case_and_whitespace_tolerant():
    geom = parse_wkt("  Point (  0   0 ) ")
    assert geom.coordinates == (0.0, 0.0)


def test_parse_crs_prefix():
    geom = parse_wkt(f"<{CRS84}> Point(-5.9866 37.3886)")
    assert geom.source_crs == CRS84
    assert geom.coordinates == (-5.9866, 37.3886)


def test_parse_linestring_and_polygon():
    line = parse_wkt("LINESTRING(0 0, 1 1, 2 0)")
    assert line.kind == "linestring" and len(line.coordinates) == 3
    poly = parse_wkt("POLYGON((0 0, 4 0, 4 4, 0 4, 0 0))")
    assert poly.kind == "polygon" and len(poly.coordinates[0]) == 5


def test_malformed_wkt_reports_offset():
    with pytest.raises(MalformedWkt) as err:
        parse_wkt("POINT(12)")
    assert err.value.offset > 0
    with pytest.raises(MalformedWkt):
        parse_wkt("CIRCLE(0 0, 5)")
    with pytest.raises(MalformedWkt):
        parse_wkt("POINT(0 0) junk")


def test_out_of_range_coordinates():
    with pytest.raises(CoordinateRangeError):
        parse_wkt("POINT(190 0)")
    with pytest.raises(CoordinateRangeError):
        parse_wkt("POINT(0 -95)")


def test_polygon_ring_validation():
    with pytest.raises(ValueError):
        Geometry("polygon", (((0, 0), (1, 1), (0, 0)),))
    with pytest.raises(ValueError):
        Geometry("polygon", (((0, 0), (1, 1), (2, 2), (3, 3)),))  # not closed


def test_format_wkt_canonical():
    assert format_wkt(point(-88.23, 14.92)) == "POINT(-88.23 14.92)"
    assert format_wkt(point(14.0, -3.0)) == "POINT(14 -3)"


@given(coordinate)
@settings(max_examples=200)
def test_point_round_trip(coords):
    geom = point(*coords)
    assert parse_wkt(format_wkt(geom)) == geom


@given(st.lists(coordinate, min_size=2, max_size=8))
@settings(max_examples=100)
def test_linestring_round_trip(coords):
    geom = Geometry("linestring", tuple(coords))
    assert parse_wkt(format_wkt(geom)) == geom


def test_bbox_containment_is_closed():
    assert point_in_bbox(0, 0, (0, 0, 0, 0))
    assert point_in_bbox(1, 2, (1, 1, 2, 2))
    assert not point_in_bbox(0.9999, 2, (1, 1, 2, 2))


def test_point_in_polygon_basics():
    ring = ((0, 0), (4, 0), (4, 4), (0, 4), (0, 0))
    assert point_in_polygon(2, 2, ring)
    assert not point_in_polygon(5, 2, ring)
    assert point_in_polygon(0, 2, ring)  # boundary counts as inside
    assert point_in_polygon(4, 4, ring)


def test_geometry_bbox():
    geom = Geometry("linestring", ((0, -1), (2, 3)))
    assert geom.bbox() == (0, -1, 2, 3)
