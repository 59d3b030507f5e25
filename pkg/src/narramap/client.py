"""SPARQL 1.1 protocol client with deterministic record/replay.

Queries go out as HTTP GET (POST above 2 KB) asking for
``application/sparql-results+json``; SELECT results come back as
ResultTables.  Three modes:

- ``live``: plain remote execution, GETs retried with exponential
  backoff.
- ``record``: live execution, with every raw response written to a
  fixture directory keyed by the canonical query hash.
- ``replay``: responses served bit-exact from those fixtures, no
  network at all.

Unlimited SELECTs are transparently paginated: when a page comes back
full, LIMIT/OFFSET windows (with an ORDER BY over the first projected
variable, if the query has none) are appended until a short page
arrives.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import requests

from .terms import Term, is_absolute_iri
from .turtle import parse_turtle

logger = logging.getLogger(__name__)

RESULTS_JSON = "application/sparql-results+json"
NTRIPLES = "application/n-triples"

MAX_PAGES = 10_000
POST_THRESHOLD_BYTES = 2000
RETRY_STATUS = (429, 500, 502, 503, 504)
BACKOFF_INITIAL_SECONDS = 0.5


class ClientError(Exception):
    pass


class EndpointUnreachable(ClientError):
    pass


class EndpointRejected(ClientError):
    def __init__(self, status: int, body: str):
        super().__init__(f"endpoint rejected the request with HTTP {status}: {body[:200]}")
        self.status = status
        self.body = body


class MalformedResults(ClientError):
    pass


class FixtureMissing(ClientError):
    def __init__(self, key: str, query: str):
        preview = " ".join(query.split())[:120]
        super().__init__(f"no recorded response for key {key} ({preview})")
        self.key = key


def canonical_query_key(query: str) -> str:
    """SHA-256 over the whitespace-normalized query text.

    Indentation and line-break differences between serializations of the
    same logical query collapse to one key.
    """
    normalized = " ".join(query.split())
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Wire format


def term_to_wire(term: Term) -> dict:
    if term.is_iri:
        return {"type": "uri", "value": term.value}
    if term.is_blank:
        return {"type": "bnode", "value": term.value}
    out: dict = {"type": "literal", "value": term.value}
    if term.datatype:
        out["datatype"] = term.datatype
    if term.language:
        out["xml:lang"] = term.language
    return out


def term_from_wire(data: dict) -> Term:
    kind = data.get("type")
    value = data.get("value", "")
    if kind == "uri":
        return Term("iri", value)
    if kind == "bnode":
        return Term("blank", value)
    if kind in ("literal", "typed-literal"):
        return Term("literal", value, data.get("datatype"), data.get("xml:lang"))
    raise MalformedResults(f"unknown term type {kind!r}")


@dataclass
class ResultTable:
    """Ordered variables x rows of bindings; unbound stays absent."""

    variables: list[str]
    rows: list[dict[str, Term]]

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, variable: str) -> list[Term | None]:
        return [row.get(variable) for row in self.rows]

    def distinct_values(self, variable: str) -> set[str]:
        return {t.value for t in self.column(variable) if t is not None}

    @classmethod
    def from_json(cls, raw: bytes) -> "ResultTable":
        try:
            doc = json.loads(raw)
            variables = list(doc["head"]["vars"])
            rows = []
            for binding in doc["results"]["bindings"]:
                rows.append({var: term_from_wire(data) for var, data in binding.items()})
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResults(f"cannot parse SPARQL results JSON: {exc}") from exc
        return cls(variables, rows)

    def to_json(self) -> bytes:
        doc = {
            "head": {"vars": self.variables},
            "results": {
                "bindings": [
                    {var: term_to_wire(term) for var, term in row.items()} for row in self.rows
                ]
            },
        }
        return json.dumps(doc, indent=1, sort_keys=True).encode("utf-8")


def ask_from_json(raw: bytes) -> bool:
    try:
        doc = json.loads(raw)
        return bool(doc["boolean"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedResults(f"cannot parse ASK results JSON: {exc}") from exc


def ask_to_json(value: bool) -> bytes:
    return json.dumps({"head": {}, "boolean": bool(value)}).encode("utf-8")


def triples_to_ntriples(triples) -> bytes:
    lines = [f"{s.n3()} {p.n3()} {o.n3()} ." for s, p, o in triples]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


# ---------------------------------------------------------------------------
# Configuration and fixtures


@dataclass
class EndpointConfig:
    base_url: str
    default_language: str = "en"
    timeout_ms: int = 60_000
    page_size: int = 1000
    max_retries: int = 3
    user_agent: str = "narramap/0.1 (https://narramap.dev; narrative mapping toolkit)"
    mode: str = "live"  # live | replay | record
    fixture_dir: Path | None = None
    extra_headers: dict[str, str] = field(default_factory=dict)
    record_timestamp: str | None = None  # frozen timestamp for reproducible fixtures

    def __post_init__(self) -> None:
        if not self.base_url or not is_absolute_iri(self.base_url):
            raise ValueError(f"base_url must be a non-empty absolute IRI, got {self.base_url!r}")
        if self.page_size < 1:
            raise ValueError("page_size must be >= 1")
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        if self.mode not in ("live", "replay", "record"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode in ("replay", "record") and self.fixture_dir is None:
            raise ValueError(f"mode {self.mode!r} needs a fixture_dir")
        if self.fixture_dir is not None:
            self.fixture_dir = Path(self.fixture_dir)


class FixtureStore:
    """One file of raw response bytes per canonical key, plus a metadata
    sidecar carrying the query text, endpoint, and timestamp."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.queries_dir = self.root / "queries"
        self._lock = threading.Lock()

    def path_for(self, key: str) -> Path:
        return self.queries_dir / f"{key}.bin"

    def meta_path_for(self, key: str) -> Path:
        return self.queries_dir / f"{key}.meta.json"

    def has(self, key: str) -> bool:
        return self.path_for(key).exists()

    def read(self, key: str) -> bytes:
        return self.path_for(key).read_bytes()

    def read_meta(self, key: str) -> dict:
        return json.loads(self.meta_path_for(key).read_text("utf-8"))

    def write(self, key: str, payload: bytes, meta: dict) -> None:
        with self._lock:
            self.queries_dir.mkdir(parents=True, exist_ok=True)
            self.path_for(key).write_bytes(payload)
            self.meta_path_for(key).write_text(
                json.dumps(meta, indent=1, sort_keys=True) + "\n", "utf-8"
            )

    def keys(self) -> list[str]:
        if not self.queries_dir.is_dir():
            return []
        return sorted(p.stem for p in self.queries_dir.glob("*.bin"))

    def manifest(self) -> dict:
        path = self.root / "manifest.json"
        if path.exists():
            return json.loads(path.read_text("utf-8"))
        return {}

    def write_manifest(self, manifest: dict) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "manifest.json").write_text(
            json.dumps(manifest, indent=1, sort_keys=True) + "\n", "utf-8"
        )

    def verify(self) -> list[str]:
        """Re-derive every key from its stored query and parse the payload.

        Returns a list of human-readable problems; empty means clean.
        """
        problems = []
        for key in self.keys():
            try:
                meta = self.read_meta(key)
            except (OSError, ValueError):
                problems.append(f"{key}: missing or unreadable metadata sidecar")
                continue
            derived = canonical_query_key(meta.get("query", ""))
            if derived != key:
                problems.append(f"{key}: stored query hashes to {derived}")
            payload = self.read(key)
            content_type = meta.get("content_type", RESULTS_JSON)
            try:
                if content_type.startswith(RESULTS_JSON):
                    doc = json.loads(payload)
                    if "boolean" not in doc:
                        ResultTable.from_json(payload)
                else:
                    parse_turtle(payload)
            except Exception as exc:
                problems.append(f"{key}: payload does not parse ({exc})")
        return problems


# ---------------------------------------------------------------------------
# Client


_LIMIT_RE = re.compile(r"\bLIMIT\s+\d+", re.IGNORECASE)
_ORDER_RE = re.compile(r"\bORDER\s+BY\b", re.IGNORECASE)
_FIRST_VAR_RE = re.compile(r"\bSELECT\s+(?:DISTINCT\s+)?.*?\?(\w+)", re.IGNORECASE | re.DOTALL)


class SparqlClient:
    """Protocol client; shareable across threads, one session per client."""

    def __init__(self, config: EndpointConfig):
        self.config = config
        self._session = requests.Session()
        self._fixtures = FixtureStore(config.fixture_dir) if config.fixture_dir else None

    # -- public operations

    def execute_select(self, query: str) -> ResultTable:
        """Run a SELECT, paginating transparently when it has no LIMIT."""
        if _LIMIT_RE.search(query):
            return ResultTable.from_json(self._fetch(query, RESULTS_JSON))
        return self._paged_select(query)

    def execute_ask(self, query: str) -> bool:
        return ask_from_json(self._fetch(query, RESULTS_JSON))

    def execute_construct(self, query: str) -> list[tuple[Term, Term, Term]]:
        payload = self._fetch(query, NTRIPLES)
        try:
            return parse_turtle(payload)
        except ValueError as exc:
            raise MalformedResults(f"cannot parse CONSTRUCT response: {exc}") from exc

    # -- pagination

    def _paged_select(self, query: str) -> ResultTable:
        base = query.rstrip()
        if not _ORDER_RE.search(base):
            m = _FIRST_VAR_RE.search(base)
            if m:
                base = f"{base}\nORDER BY ?{m.group(1)}"
        page_size = self.config.page_size
        variables: list[str] | None = None
        rows: list[dict[str, Term]] = []
        for page in range(MAX_PAGES):
            paged = f"{base}\nLIMIT {page_size}\nOFFSET {page * page_size}"
            table = ResultTable.from_json(self._fetch(paged, RESULTS_JSON))
            if variables is None:
                variables = table.variables
            rows.extend(table.rows)
            if len(table.rows) < page_size:
                return ResultTable(variables, rows)
        raise ClientError(f"gave up after {MAX_PAGES} pages; endpoint keeps returning full pages")

    # -- transport

    def _fetch(self, query: str, accept: str) -> bytes:
        key = canonical_query_key(query)
        mode = self.config.mode
        if mode == "replay":
            if self._fixtures is None or not self._fixtures.has(key):
                raise FixtureMissing(key, query)
            return self._fixtures.read(key)
        payload, content_type, status = self._http(query, accept)
        if mode == "record" and self._fixtures is not None:
            self._fixtures.write(
                key,
                payload,
                {
                    "query": query,
                    "endpoint": self.config.base_url,
                    "content_type": content_type,
                    "status": status,
                    "recorded_at": self.config.record_timestamp
                    or datetime.now(timezone.utc).isoformat(timespec="seconds"),
                },
            )
        return payload

    def _headers(self, accept: str) -> dict[str, str]:
        headers = {"Accept": accept, "User-Agent": self.config.user_agent}
        headers.update(self.config.extra_headers)
        return headers

    def _http(self, query: str, accept: str) -> tuple[bytes, str, int]:
        timeout = self.config.timeout_ms / 1000.0
        use_post = len(query.encode("utf-8")) > POST_THRESHOLD_BYTES
        attempts = 1 if use_post else self.config.max_retries + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            if attempt:
                time.sleep(BACKOFF_INITIAL_SECONDS * (2 ** (attempt - 1)))
            try:
                if use_post:
                    response = self._session.post(
                        self.config.base_url,
                        data=query.encode("utf-8"),
                        headers={**self._headers(accept), "Content-Type": "application/sparql-query"},
                        timeout=timeout,
                    )
                else:
                    response = self._session.get(
                        self.config.base_url,
                        params={"query": query},
                        headers=self._headers(accept),
                        timeout=timeout,
                    )
            except requests.RequestException as exc:
                last_error = EndpointUnreachable(f"cannot reach {self.config.base_url}: {exc}")
                logger.warning("request failed (attempt %d/%d): %s", attempt + 1, attempts, exc)
                continue
            if response.status_code == 200:
                content_type = response.headers.get("Content-Type", accept).split(";")[0].strip()
                return response.content, content_type, response.status_code
            body = response.text
            if response.status_code in RETRY_STATUS and attempt + 1 < attempts:
                logger.warning(
                    "endpoint returned %d (attempt %d/%d)", response.status_code, attempt + 1, attempts
                )
                last_error = EndpointRejected(response.status_code, body)
                continue
            raise EndpointRejected(response.status_code, body)
        assert last_error is not None
        raise last_error
