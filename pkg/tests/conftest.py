import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
sys.path.insert(0, str(TESTS_DIR))

from narramap.session import bundled_fixture_dir
from narramap.store import GraphStore

WW2_FIXTURES = bundled_fixture_dir("ww2")
MAGELLAN_FIXTURES = bundled_fixture_dir("magellan")

WD = "http://www.wikidata.org/entity/"
WDT = "http://www.wikidata.org/prop/direct/"
WIKIDATA_URL = "https://query.wikidata.org/sparql"


@pytest.fixture(scope="session")
def ww2_turtle() -> bytes:
    return (WW2_FIXTURES / "graph.ttl").read_bytes()


@pytest.fixture(scope="session")
def ww2_store(ww2_turtle) -> GraphStore:
    store = GraphStore()
    store.import_turtle(ww2_turtle)
    return store


@pytest.fixture(scope="session")
def ww2_oracle(ww2_turtle):
    from oracles import RuleOracle, minimal_parse

    return RuleOracle(minimal_parse(ww2_turtle.decode("utf-8")))


@pytest.fixture(scope="session")
def magellan_turtle() -> bytes:
    return (MAGELLAN_FIXTURES / "graph.ttl").read_bytes()


@pytest.fixture(scope="session")
def magellan_store(magellan_turtle) -> GraphStore:
    store = GraphStore()
    store.import_turtle(magellan_turtle)
    return store


def replay_config(fixture_dir, **overrides):
    from narramap.client import EndpointConfig

    defaults = dict(
        base_url=WIKIDATA_URL,
        mode="replay",
        fixture_dir=fixture_dir,
        page_size=1000,
    )
    defaults.update(overrides)
    return EndpointConfig(**defaults)


@pytest.fixture()
def ww2_replay_client():
    from narramap.client import SparqlClient

    return SparqlClient(replay_config(WW2_FIXTURES))


@pytest.fixture()
def magellan_replay_client():
    from narramap.client import SparqlClient

    return SparqlClient(replay_config(MAGELLAN_FIXTURES))


@pytest.fixture()
def ww2_session():
    from narramap.queries import profile_by_name
    from narramap.session import WorkSession

    return WorkSession(replay_config(WW2_FIXTURES), profile_by_name("wikidata"))


@pytest.fixture()
def magellan_session():
    from narramap.queries import profile_by_name
    from narramap.session import WorkSession

    return WorkSession(replay_config(MAGELLAN_FIXTURES), profile_by_name("wikidata"))
