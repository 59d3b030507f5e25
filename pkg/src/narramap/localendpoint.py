"""A loopback SPARQL endpoint backed by a GraphStore.

Used to record the bundled fixtures from a known graph without any
external network, and to exercise the client's live/record transport in
tests against a real HTTP server.
"""

from __future__ import annotations

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .client import (
    NTRIPLES,
    RESULTS_JSON,
    ResultTable,
    SparqlClient,
    ask_to_json,
    triples_to_ntriples,
)
from .queries import AskQuery, ConstructQuery, SelectQuery
from .sparqleval import Evaluator, parse_query
from .store import GraphStore


class LocalEndpoint:
    def __init__(self, store: GraphStore):
        self.store = store

    def answer(self, query_text: str) -> tuple[bytes, str]:
        """(payload bytes, content type) for one query."""
        query = parse_query(query_text)
        evaluator = Evaluator(self.store)
        if isinstance(query, SelectQuery):
            variables, rows = evaluator.select(query)
            return ResultTable(variables, rows).to_json(), RESULTS_JSON
        if isinstance(query, AskQuery):
            return ask_to_json(evaluator.ask(query)), RESULTS_JSON
        if isinstance(query, ConstructQuery):
            return triples_to_ntriples(evaluator.construct(query)), NTRIPLES
        raise TypeError(f"unsupported query {type(query).__name__}")


class _Handler(BaseHTTPRequestHandler):
    endpoint: LocalEndpoint  # injected via subclassing in serve_store

    def log_message(self, *args):  # keep test output quiet
        pass

    def _respond(self, query: str | None):
        if not query:
            self.send_response(400)
            self.end_headers()
            self.wfile.write(b"missing query parameter")
            return
        try:
            payload, content_type = self.endpoint.answer(query)
        except Exception as exc:
            body = f"query failed: {exc}".encode("utf-8")
            self.send_response(400)
            self.send_header("Content-Type", "text/plain")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def do_GET(self):
        params = parse_qs(urlparse(self.path).query)
        values = params.get("query")
        self._respond(values[0] if values else None)

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length)
        content_type = (self.headers.get("Content-Type") or "").split(";")[0].strip()
        if content_type == "application/x-www-form-urlencoded":
            params = parse_qs(body.decode("utf-8"))
            values = params.get("query")
            self._respond(values[0] if values else None)
        else:
            self._respond(body.decode("utf-8"))


def serve_store(store: GraphStore, host: str = "127.0.0.1", port: int = 0):
    """Start a loopback endpoint; returns (server, base_url).

    Call ``server.shutdown()`` when done.
    """
    endpoint = LocalEndpoint(store)
    handler = type("_BoundHandler", (_Handler,), {"endpoint": endpoint})
    server = ThreadingHTTPServer((host, port), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, f"http://{host}:{server.server_address[1]}/sparql"


class InProcessClient(SparqlClient):
    """A protocol client whose transport is an in-process endpoint.

    Pagination, canonical keys, and record-mode fixture writing behave
    exactly as over HTTP; only the wire is skipped.  This is how the
    bundled fixtures are recorded from the demo graphs.
    """

    def __init__(self, config, store: GraphStore):
        super().__init__(config)
        self._endpoint = LocalEndpoint(store)

    def _http(self, query: str, accept: str):
        payload, content_type = self._endpoint.answer(query)
        return payload, content_type, 200
