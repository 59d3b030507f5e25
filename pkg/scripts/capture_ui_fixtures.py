#!/usr/bin/env python3
"""Capture service responses for the front end's scripted walkthroughs.

Drives the real HTTP service (replay profiles, no network) through the
exact request sequences the explorer UI makes and saves every exchange
as an ordered list. The front-end tests replay these through a mock
fetch, so the UI is tested against genuine service payloads.

Run from the repository root:  python scripts/capture_ui_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fastapi.testclient import TestClient

from narramap.service import ProfileConfig, ServiceConfig, create_app

WD = "http://www.wikidata.org/entity/"
WDT = "http://www.wikidata.org/prop/direct/"
OUT_DIR = ROOT / "frontend" / "test" / "fixtures"

ENRICH_PROPERTIES = [
    WDT + "P580", WDT + "P582", WDT + "P585", WDT + "P625", WDT + "P31", WDT + "P710",
]


class Recorder:
    def __init__(self, client: TestClient):
        self.client = client
        self.session_id: str | None = None
        self.exchanges: list[dict] = []

    def _mask(self, text: str) -> str:
        if self.session_id:
            return text.replace(self.session_id, "SESSION")
        return text

    def request(self, method: str, path: str, body: dict | None = None):
        real_path = path.replace("SESSION", self.session_id or "SESSION")
        response = self.client.request(method, real_path, json=body)
        assert response.status_code < 400, (method, path, response.status_code, response.text)
        payload = response.json()
        if method == "POST" and path == "/sessions":
            self.session_id = payload["session"]
        self.exchanges.append(
            {
                "method": method,
                "path": self._mask(path),
                "body": body,
                "status": response.status_code,
                "response": json.loads(self._mask(json.dumps(payload))),
            }
        )
        return payload

    def save(self, name: str) -> None:
        OUT_DIR.mkdir(parents=True, exist_ok=True)
        (OUT_DIR / name).write_text(
            json.dumps(self.exchanges, indent=2, sort_keys=True) + "\n", "utf-8"
        )
        print(f"{name}: {len(self.exchanges)} exchanges")


def service_client() -> TestClient:
    from narramap.session import bundled_fixture_dir

    config = ServiceConfig(
        profiles={
            "ww2-replay": ProfileConfig(
                endpoint="https://query.wikidata.org/sparql",
                profile="wikidata",
                mode="replay",
                fixture_dir=str(bundled_fixture_dir("ww2")),
            ),
            "magellan-replay": ProfileConfig(
                endpoint="https://query.wikidata.org/sparql",
                profile="wikidata",
                mode="replay",
                fixture_dir=str(bundled_fixture_dir("magellan")),
            ),
        }
    )
    return TestClient(create_app(config))


def capture_magellan() -> None:
    recorder = Recorder(service_client())
    recorder.request("POST", "/sessions", {"profile": "magellan-replay"})
    recorder.request("GET", "/sessions/SESSION/search?q=Magellan")
    recorder.request("POST", "/sessions/SESSION/path/start", {"nodes": [WD + "Q1496"]})
    recorder.request("GET", "/sessions/SESSION/properties?direction=forward")
    recorder.request(
        "POST", "/sessions/SESSION/path/hops",
        {"direction": "forward", "property": WDT + "P1344"},
    )
    recorder.request("GET", "/sessions/SESSION/properties?direction=forward")
    recorder.request(
        "POST", "/sessions/SESSION/path/hops",
        {"direction": "forward", "property": WDT + "P1427"},
    )
    recorder.request("GET", "/sessions/SESSION/properties?direction=forward")
    recorder.request("POST", "/sessions/SESSION/retrieve")
    recorder.request("GET", "/sessions/SESSION/map")
    recorder.save("magellan.json")


def capture_ww2() -> None:
    recorder = Recorder(service_client())
    recorder.request("POST", "/sessions", {"profile": "ww2-replay"})
    closure = recorder.request(
        "POST", "/sessions/SESSION/closure",
        {"root": WD + "Q362", "down": WDT + "P527", "up": None, "max_depth": 4},
    )
    layer = closure["layer"]
    recorder.request("GET", "/sessions/SESSION/map")
    from urllib.parse import quote

    recorder.request(
        "GET", f"/sessions/SESSION/properties?mode=enrichment&layer={quote(layer, safe='')}"
    )
    recorder.request(
        "POST", "/sessions/SESSION/enrich",
        {"layer": layer, "properties": ENRICH_PROPERTIES},
    )
    recorder.request("GET", "/sessions/SESSION/map")
    recorder.request("POST", "/sessions/SESSION/style", {"rulebase": None})
    document = recorder.request("GET", "/sessions/SESSION/map")

    styled_item = next(
        feature["id"]
        for layer_doc in document["layers"]
        for feature in layer_doc["features"]
        if feature["properties"]["symbolizers"]
    )
    recorder.request("GET", f"/sessions/SESSION/explain?item={quote(styled_item, safe='')}")
    recorder.save("ww2.json")


if __name__ == "__main__":
    capture_magellan()
    capture_ww2()
