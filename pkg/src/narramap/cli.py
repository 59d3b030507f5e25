"""Command-line front door: every service capability over local files.

Machine-readable JSON goes to stdout, diagnostics to stderr.  Exit
codes: 0 success, 2 usage, 3 network/endpoint, 4 parse, 5 rule errors.

Exploration state persists in a session directory (Turtle snapshots plus
a manifest), so a pipeline like closure -> enrich -> style -> map export
is reproducible and yields byte-identical artifacts across runs.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .client import (
    ClientError,
    EndpointConfig,
    FixtureStore,
    MalformedResults,
    ResultTable,
    SparqlClient,
)
from .contentkg import LayerDescriptor
from .features import ColumnMapping, materialize, read_geojson, write_geojson
from .geo import MalformedWkt
from .portrayal import (
    RuleValidationError,
    evaluate,
    explain as explain_rules,
    load_rulebase,
)
from .queries import QueryValidationError, expand_curie, profile_by_name
from .session import SessionError, WorkSession, load_bundled_rulebase
from .sparqleval import SparqlSyntaxError
from .store import GraphStore
from .temporal import MalformedTime, parse_time
from .turtle import TurtleParseError

EXIT_USAGE = 2
EXIT_NETWORK = 3
EXIT_PARSE = 4
EXIT_RULE = 5

PARSE_ERRORS = (
    TurtleParseError,
    MalformedResults,
    MalformedWkt,
    MalformedTime,
    SparqlSyntaxError,
    json.JSONDecodeError,
)


def _emit(data) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _note(message: str) -> None:
    click.echo(message, err=True)


def _die(code: int, message: str):
    _note(f"error: {message}")
    sys.exit(code)


def _guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ClientError as exc:
        _die(EXIT_NETWORK, str(exc))
    except PARSE_ERRORS as exc:
        _die(EXIT_PARSE, str(exc))
    except RuleValidationError as exc:
        _die(EXIT_RULE, str(exc))
    except (QueryValidationError, SessionError, ValueError) as exc:
        _die(EXIT_USAGE, str(exc))


def endpoint_options(fn):
    fn = click.option("--live", "live_url", default=None, help="Live SPARQL endpoint URL.")(fn)
    fn = click.option(
        "--replay", "replay_dir", default=None, type=click.Path(), help="Replay fixture directory."
    )(fn)
    fn = click.option(
        "--record", "record_dir", default=None, type=click.Path(), help="Record fixtures here."
    )(fn)
    fn = click.option("--endpoint", "endpoint_url", default=None, help="Endpoint URL for --record.")(fn)
    fn = click.option("--profile", default="wikidata", show_default=True)(fn)
    fn = click.option("--language", default="en", show_default=True)(fn)
    fn = click.option("--page-size", default=1000, show_default=True, type=int)(fn)
    return fn


def _build_session(
    live_url, replay_dir, record_dir, endpoint_url, profile, language, page_size, session_dir=None
) -> WorkSession:
    if session_dir and Path(session_dir, "session.json").exists():
        session = WorkSession.load(Path(session_dir))
        return session
    if live_url and replay_dir:
        raise click.UsageError("--live and --replay are mutually exclusive")
    if replay_dir:
        manifest = FixtureStore(Path(replay_dir)).manifest()
        config = EndpointConfig(
            base_url=manifest.get("endpoint", "https://query.wikidata.org/sparql"),
            mode="replay",
            fixture_dir=Path(replay_dir),
            page_size=manifest.get("page_size", page_size),
            default_language=manifest.get("language", language),
        )
        profile = manifest.get("profile", profile)
    elif record_dir:
        if not (endpoint_url or live_url):
            raise click.UsageError("--record needs --endpoint (or --live) for the source URL")
        config = EndpointConfig(
            base_url=endpoint_url or live_url,
            mode="record",
            fixture_dir=Path(record_dir),
            page_size=page_size,
            default_language=language,
        )
    elif live_url:
        config = EndpointConfig(
            base_url=live_url, mode="live", page_size=page_size, default_language=language
        )
    else:
        raise click.UsageError("choose one of --live URL, --replay DIR, or --record DIR")
    return WorkSession(config, profile_by_name(profile), language)


def _resolve_property(session: WorkSession, text: str, direction: str) -> str:
    """A hop property may be an IRI, a CURIE, or a human label.

    Labels resolve through the replay manifest when present, else
    through a discovery query against the endpoint.
    """
    expanded = expand_curie(text)
    if expanded.startswith(("http://", "https://", "urn:")):
        return expanded
    if session.config.fixture_dir:
        manifest = FixtureStore(session.config.fixture_dir).manifest()
        pinned = manifest.get("properties", {})
        if text in pinned:
            return pinned[text]
    for row in session.discover_properties(None, direction):
        if row["label"].lower() == text.lower():
            return row["property"]
    raise click.UsageError(f"cannot resolve property {text!r} by label")


def _maybe_snapshot(session: WorkSession, session_dir) -> None:
    if session_dir:
        session.snapshot(Path(session_dir))


@click.group()
def main() -> None:
    """Knowledge-graph exploration and narrative map building."""


# ---------------------------------------------------------------------------
# explore


@main.group()
def explore() -> None:
    """Relationship discovery, path retrieval, and sub-event closure."""


@explore.command("discover")
@click.option("--node", "nodes", multiple=True, required=True, help="Start node IRI/CURIE.")
@click.option("--direction", default="forward", show_default=True)
@endpoint_options
def explore_discover(nodes, direction, **endpoint_kwargs):
    """Ranked properties incident to the given nodes."""
    session = _guarded(_build_session, **endpoint_kwargs)
    rows = _guarded(session.discover_properties, [expand_curie(n) for n in nodes], direction)
    _note(f"{len(rows)} properties")
    _emit({"properties": rows})


@explore.command("path")
@click.option("--start", "starts", multiple=True, required=True)
@click.option("--hop", "hops", multiple=True, required=True, help="direction:property (label or IRI).")
@click.option("--session", "session_dir", type=click.Path(), default=None)
@click.option("--out", type=click.Path(), default=None, help="Write the layer as GeoJSON.")
@endpoint_options
def explore_path(starts, hops, session_dir, out, **endpoint_kwargs):
    """Run an N-degree relationship path and materialize the result."""
    session = _guarded(_build_session, session_dir=session_dir, **endpoint_kwargs)
    session.set_start_nodes([expand_curie(s) for s in starts])
    session.reset_path()
    for hop in hops:
        direction, _, prop = hop.partition(":")
        if direction not in ("forward", "backward"):
            raise click.UsageError(f"hop must be direction:property, got {hop!r}")
        resolved = _guarded(_resolve_property, session, prop.strip(), direction)
        session.add_hop(direction, resolved)
    state = _guarded(session.retrieve)
    _maybe_snapshot(session, session_dir)
    if out:
        payload, _ = session.export("geojson")
        Path(out).write_bytes(payload)
        _note(f"wrote {out}")
    _note(f"{state.feature_count} features in layer {state.iri}")
    _emit({"layer": state.iri, "label": state.label, "feature_count": state.feature_count})


@explore.command("closure")
@click.option("--root", required=True)
@click.option("--down", required=True)
@click.option("--up", default=None)
@click.option("--max-depth", type=int, default=None)
@click.option("--session", "session_dir", type=click.Path(), default=None)
@click.option("--out", type=click.Path(), default=None)
@endpoint_options
def explore_closure(root, down, up, max_depth, session_dir, out, **endpoint_kwargs):
    """All events transitively connected to the root."""
    session = _guarded(_build_session, session_dir=session_dir, **endpoint_kwargs)
    state = _guarded(
        session.closure,
        expand_curie(root),
        expand_curie(down),
        expand_curie(up) if up else None,
        max_depth,
    )
    _maybe_snapshot(session, session_dir)
    if out:
        payload, _ = session.export("geojson")
        Path(out).write_bytes(payload)
        _note(f"wrote {out}")
    _note(f"{state.feature_count} events")
    _emit({"layer": state.iri, "feature_count": state.feature_count})


# ---------------------------------------------------------------------------
# enrich / materialize / ingest


@main.command()
@click.option("--session", "session_dir", type=click.Path(), required=True)
@click.option("--layer", required=True)
@click.option("--properties", required=True, help="Comma-separated property IRIs/CURIEs.")
def enrich(session_dir, layer, properties):
    """Fetch more properties for every entity of a layer."""
    session = _guarded(WorkSession.load, Path(session_dir))
    props = [expand_curie(p.strip()) for p in properties.split(",") if p.strip()]
    report = _guarded(session.enrich, layer, props)
    _maybe_snapshot(session, session_dir)
    _note(f"enriched {report['items_updated']} items")
    _emit(report)


@main.command("materialize")
@click.option("--results", type=click.Path(exists=True), required=True, help="SPARQL results JSON.")
@click.option("--entity-col", required=True)
@click.option("--label-col", default=None)
@click.option("--geometry-col", default=None)
@click.option("--start-col", default=None)
@click.option("--end-col", default=None)
@click.option("--instant-col", default=None)
@click.option("--out", type=click.Path(), default=None)
def materialize_cmd(results, entity_col, label_col, geometry_col, start_col, end_col, instant_col, out):
    """Convert SPARQL bindings into a GeoJSON feature collection."""
    table = _guarded(ResultTable.from_json, Path(results).read_bytes())
    mapping = ColumnMapping(
        entity=entity_col,
        label=label_col,
        geometry=geometry_col,
        start=start_col,
        end=end_col,
        instant=instant_col,
    )
    collection = _guarded(materialize, table, mapping)
    payload = write_geojson(collection)
    if out:
        Path(out).write_bytes(payload)
        _note(f"wrote {len(collection)} features to {out}")
    else:
        click.echo(payload.decode("utf-8"), nl=False)


@main.command()
@click.option("--session", "session_dir", type=click.Path(), required=True)
@click.option("--collection", type=click.Path(exists=True), required=True)
@click.option("--layer", "layer_iri", default=None, help="Layer IRI (derived from label when absent).")
@click.option("--label", required=True)
@click.option("--kind", default="event", type=click.Choice(["event", "object"]), show_default=True)
def ingest(session_dir, collection, layer_iri, label, kind):
    """Ingest a GeoJSON collection into a session as one layer."""
    session = _guarded(WorkSession.load, Path(session_dir))
    features = _guarded(read_geojson, Path(collection).read_bytes())
    if layer_iri is None:
        import hashlib

        digest = hashlib.sha256(label.encode("utf-8")).hexdigest()[:16]
        layer_iri = f"https://narramap.dev/layer/{digest}"
    descriptor = LayerDescriptor(expand_curie(layer_iri), label, kind)
    report = _guarded(session.content.ingest, features, descriptor)
    from .session import LayerState

    session.layers[descriptor.iri] = LayerState(
        descriptor.iri, label, kind, len(report.items)
    )
    _maybe_snapshot(session, session_dir)
    _note(f"ingested {len(report.items)} items into {descriptor.iri}")
    _emit({"layer": descriptor.iri, "items": len(report.items), "merged": len(report.merged)})


# ---------------------------------------------------------------------------
# style


@main.group()
def style() -> None:
    """Portrayal rule evaluation and explanation."""


def _load_rules(rules_path: str | None):
    if rules_path is None:
        return load_bundled_rulebase()
    return load_rulebase(Path(rules_path).read_bytes())


@style.command("apply")
@click.option("--rules", "rules_path", type=click.Path(exists=True), default=None)
@click.option("--graph", "graph_path", type=click.Path(exists=True), default=None,
              help="Raw Turtle graph for local evaluation.")
@click.option("--session", "session_dir", type=click.Path(), default=None,
              help="Session directory for remote evaluation via the endpoint.")
@click.option("--profile", default="wikidata", show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write the styled graph as Turtle.")
def style_apply(rules_path, graph_path, session_dir, profile, out):
    """Evaluate a rule base and report per-rule match counts."""
    rulebase = _guarded(_load_rules, rules_path)
    if (graph_path is None) == (session_dir is None):
        raise click.UsageError("choose exactly one of --graph or --session")
    if graph_path:
        store = GraphStore()
        _guarded(store.import_turtle, Path(graph_path).read_bytes())
        result = _guarded(evaluate, rulebase, store, profile=profile_by_name(profile))
        if out:
            Path(out).write_bytes(store.export_turtle())
            _note(f"wrote {out}")
        counts = result.per_rule
        diagnostics = len(result.diagnostics)
    else:
        session = _guarded(WorkSession.load, Path(session_dir))
        report = _guarded(session.apply_style, rulebase)
        _maybe_snapshot(session, session_dir)
        counts = report["rules"]
        diagnostics = 0
    for rule_iri, count in sorted(counts.items()):
        _note(f"{rule_iri}: {count} matches")
    _emit({"rules": counts, "diagnostics": diagnostics})


@style.command("explain")
@click.option("--rules", "rules_path", type=click.Path(exists=True), default=None)
@click.option("--graph", "graph_path", type=click.Path(exists=True), default=None)
@click.option("--session", "session_dir", type=click.Path(), default=None)
@click.option("--item", required=True)
@click.option("--profile", default="wikidata", show_default=True)
def style_explain(rules_path, graph_path, session_dir, item, profile):
    """Per-rule evaluation trace for one subject."""
    rulebase = _guarded(_load_rules, rules_path)
    subject = expand_curie(item)
    if (graph_path is None) == (session_dir is None):
        raise click.UsageError("choose exactly one of --graph or --session")
    if graph_path:
        store = GraphStore()
        _guarded(store.import_turtle, Path(graph_path).read_bytes())
        traces = _guarded(explain_rules, subject, rulebase, store, profile=profile_by_name(profile))
        payload = [
            {
                "rule": t.rule,
                "satisfied": t.satisfied,
                "skipped": t.skipped,
                "conditions": [
                    {"condition": c.condition, "satisfied": c.satisfied, "detail": c.detail}
                    for c in t.conditions
                ],
            }
            for t in traces
        ]
    else:
        session = _guarded(WorkSession.load, Path(session_dir))
        session.rulebase = rulebase
        payload = _guarded(session.explain_item, subject)
    _emit({"item": subject, "traces": payload})


# ---------------------------------------------------------------------------
# map / export


@main.group("map")
def map_group() -> None:
    """Map document assembly."""


@map_group.command("export")
@click.option("--session", "session_dir", type=click.Path(), required=True)
@click.option("--format", "fmt", default="map", show_default=True,
              type=click.Choice(["map", "geojson", "csv", "turtle", "ruleset", "shacl"]))
@click.option("--from", "frm", default=None, help="Window start (ISO date).")
@click.option("--to", default=None, help="Window end (ISO date).")
@click.option("--out", type=click.Path(), default=None)
def map_export(session_dir, fmt, frm, to, out):
    """Export the session as a map document or data artifact."""
    session = _guarded(WorkSession.load, Path(session_dir))
    if fmt == "map" and (frm or to):
        window = (
            _guarded(parse_time, frm) if frm else None,
            _guarded(parse_time, to) if to else None,
        )
        from .mapdoc import map_document_bytes

        payload = map_document_bytes(session.map_document(window))
    else:
        payload, _ = _guarded(session.export, fmt)
    if out:
        Path(out).write_bytes(payload)
        _note(f"wrote {out}")
    else:
        sys.stdout.buffer.write(payload)


# ---------------------------------------------------------------------------
# fixtures


def _execute_by_form(client: SparqlClient, query: str):
    """Dispatch on the first query-form keyword in the text."""
    import re

    m = re.search(r"\b(SELECT|ASK|CONSTRUCT)\b", query, re.IGNORECASE)
    form = m.group(1).upper() if m else "SELECT"
    if form == "ASK":
        return _guarded(client.execute_ask, query)
    if form == "CONSTRUCT":
        return _guarded(client.execute_construct, query)
    return _guarded(client.execute_select, query)


@main.group()
def fixture() -> None:
    """Record, verify, and serve replay fixtures."""


@fixture.command("record")
@click.option("--endpoint", required=True)
@click.option("--queries", "queries_path", type=click.Path(exists=True), required=True,
              help="JSON file: list of query strings, or {\"queries\": [...]}.")
@click.option("--dir", "fixture_dir", type=click.Path(), required=True)
@click.option("--page-size", default=1000, show_default=True, type=int)
def fixture_record(endpoint, queries_path, fixture_dir, page_size):
    """Execute queries against an endpoint and store raw responses."""
    data = json.loads(Path(queries_path).read_text("utf-8"))
    queries = data["queries"] if isinstance(data, dict) else data
    config = EndpointConfig(
        base_url=endpoint, mode="record", fixture_dir=Path(fixture_dir), page_size=page_size
    )
    client = SparqlClient(config)
    recorded = 0
    for query in queries:
        _execute_by_form(client, query)
        recorded += 1
    _note(f"recorded {recorded} queries into {fixture_dir}")
    _emit({"recorded": recorded})


@fixture.command("verify")
@click.option("--dir", "fixture_dir", type=click.Path(exists=True), required=True)
def fixture_verify(fixture_dir):
    """Replay every recorded query and check keys and payloads."""
    store = FixtureStore(Path(fixture_dir))
    problems = store.verify()
    for problem in problems:
        _note(problem)
    _emit({"fixtures": len(store.keys()), "problems": len(problems)})
    if problems:
        sys.exit(EXIT_PARSE)


@fixture.command("serve")
@click.option("--graph", "graph_path", type=click.Path(exists=True), required=True)
@click.option("--listen", default="127.0.0.1:8890", show_default=True)
def fixture_serve(graph_path, listen):
    """Serve a Turtle graph as a loopback SPARQL endpoint."""
    from .localendpoint import serve_store

    store = GraphStore()
    _guarded(store.import_turtle, Path(graph_path).read_bytes())
    host, _, port = listen.partition(":")
    server, url = serve_store(store, host or "127.0.0.1", int(port or "8890"))
    _note(f"serving {len(store)} triples at {url} (Ctrl-C to stop)")
    try:
        import time

        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.shutdown()


# ---------------------------------------------------------------------------
# service


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
def serve(config_path):
    """Run the HTTP exploration service."""
    import uvicorn

    from .service import create_app, load_service_config

    config = load_service_config(config_path)
    host, _, port = config.listen.partition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port or "8000"))


if __name__ == "__main__":  # pragma: no cover
    main()
