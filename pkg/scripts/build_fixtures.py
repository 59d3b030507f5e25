#!/usr/bin/env python3
"""Regenerate the bundled replay fixtures.

Builds the two demo graphs (WWII sub-events and Magellan's expedition),
writes them as Turtle, and records every query the toolkit issues for
the demo workflows by running real sessions against an in-process
endpoint backed by those graphs.  Everything is seeded and timestamped
with a constant, so regeneration is byte-stable.

Run from the repository root:  python scripts/build_fixtures.py
"""

from __future__ import annotations

import random
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from narramap.client import EndpointConfig
from narramap.queries import (
    WIKIDATA_PROFILE,
    AreaSpec,
    build_area_query,
    build_closure_query,
    ClosureSpec,
)
from narramap.session import WorkSession, load_bundled_rulebase
from narramap.store import GraphStore
from narramap.terms import XSD_DATETIME, XSD_DECIMAL, XSD_INTEGER, iri, literal
from narramap.vocab import vocabulary_turtle

WD = "http://www.wikidata.org/entity/"
WDT = "http://www.wikidata.org/prop/direct/"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
WKT = "http://www.opengis.net/ont/geosparql#wktLiteral"

FIXTURES = ROOT / "src" / "narramap" / "fixtures"
RECORD_STAMP = "2026-08-01T00:00:00+00:00"

# pinned diagnostics for the WWII graph
DOWN_WITHIN_4 = 48     # root + events within 4 has-part hops
DOWN_TOTAL = 122       # root + all has-part-reachable events
CLOSURE_TOTAL = 2087   # two-way (has part / part of) closure
ENRICHABLE_PROPERTIES = 76

BATTLE = WD + "Q178561"
WAR = WD + "Q198"
CAMPAIGN = WD + "Q891854"
OPERATION = WD + "Q645883"

COUNTRIES = [
    (WD + "Q30", "United States of America"),
    (WD + "Q145", "United Kingdom"),
    (WD + "Q183", "Germany"),
    (WD + "Q38", "Italy"),
    (WD + "Q17", "Japan"),
    (WD + "Q15180", "Soviet Union"),
    (WD + "Q142", "France"),
    (WD + "Q148", "China"),
    (WD + "Q36", "Poland"),
    (WD + "Q408", "Australia"),
    (WD + "Q16", "Canada"),
    (WD + "Q55", "Netherlands"),
    (WD + "Q31", "Belgium"),
    (WD + "Q20", "Norway"),
]

CORE_PROPERTIES = [
    ("P31", "instance of"),
    ("P527", "has part"),
    ("P361", "part of"),
    ("P580", "start time"),
    ("P582", "end time"),
    ("P585", "point in time"),
    ("P625", "coordinate location"),
    ("P710", "participant"),
    ("P276", "location"),
    ("P17", "country"),
    ("P1120", "number of deaths"),
    ("P1339", "number of injured"),
    ("P793", "significant event"),
    ("P828", "has cause"),
    ("P155", "follows"),
    ("P156", "followed by"),
]

FILLER_PROPERTIES = [
    ("P18", "image"), ("P373", "Commons category"), ("P910", "topic's main category"),
    ("P1343", "described by source"), ("P646", "Freebase ID"), ("P2184", "history of topic"),
    ("P571", "inception"), ("P1448", "official name"), ("P1705", "native label"),
    ("P2561", "name"), ("P138", "named after"), ("P1542", "has effect"),
    ("P2348", "time period"), ("P1478", "has immediate cause"), ("P1536", "immediate cause of"),
    ("P241", "military branch"), ("P2632", "place of detention"), ("P457", "foundational text"),
    ("P1889", "different from"), ("P460", "said to be the same as"), ("P361x", None),
]


def _filler_list() -> list[tuple[str, str]]:
    base = [(p, label) for p, label in FILLER_PROPERTIES if label]
    needed = ENRICHABLE_PROPERTIES - len(CORE_PROPERTIES)
    extra_labels = [
        "operation code", "military order", "signatory", "commanded by", "target",
        "objective", "opposing force", "theater", "strategic goal", "aftermath",
        "memorial", "commemorated by", "depicted by", "documented in", "award received",
        "destroyed", "damaged", "casualty estimate source", "prisoner count", "equipment lost",
        "air support", "naval support", "supply route", "weather conditions", "terrain",
        "codename origin", "planning document", "intelligence source", "propaganda film",
        "war correspondent", "archival collection", "commander (attacker)", "commander (defender)",
        "strength (attacker)", "strength (defender)", "reinforcements", "withdrawal route",
        "occupation zone", "liberated place", "treaty concluded",
    ]
    out = list(base)
    next_p = 3000
    for label in extra_labels:
        if len(out) >= needed:
            break
        out.append((f"P{next_p}", label))
        next_p += 7
    assert len(out) >= needed, f"need {needed} fillers, have {len(out)}"
    return out[:needed]


def _date_literal(date: str):
    return literal(f"+{date}T00:00:00Z", datatype=XSD_DATETIME)


def _point(lon: float, lat: float):
    return literal(f"Point({round(lon, 4)} {round(lat, 4)})", datatype=WKT)


class Event:
    __slots__ = ("qid", "label", "type_iri", "start", "end", "instant",
                 "participants", "coords", "extras")

    def __init__(self, qid, label, type_iri=OPERATION, start=None, end=None,
                 instant=None, participants=(), coords=None):
        self.qid = qid
        self.label = label
        self.type_iri = type_iri
        self.start = start
        self.end = end
        self.instant = instant
        self.participants = list(participants)
        self.coords = coords
        self.extras = []  # (property IRI, Term)

    @property
    def iri(self) -> str:
        return WD + self.qid


def build_ww2() -> tuple[GraphStore, dict]:
    rng = random.Random(20250810)
    events: dict[str, Event] = {}
    down_edges: list[tuple[str, str]] = []   # P527 parent -> child
    up_edges: list[tuple[str, str]] = []     # P361 child -> parent

    def add_event(event: Event) -> Event:
        assert event.qid not in events, event.qid
        events[event.qid] = event
        return event

    def rand_coords():
        return (round(rng.uniform(-10.0, 140.0), 4), round(rng.uniform(-8.0, 62.0), 4))

    def rand_dates(year_lo=1939, year_hi=1945, max_days=200):
        year = rng.randint(year_lo, year_hi)
        month = rng.randint(1, 12)
        day = rng.randint(1, 28)
        if year == 1945 and month > 8:
            month -= 4  # keep starts before the war's end date
        start = f"{year:04d}-{month:02d}-{day:02d}"
        duration = rng.randint(0, max_days)
        end_year, end_month, end_day = year, month, day
        budget = duration
        while budget > 0:
            step = min(budget, 28 - end_day) or 1
            end_day += step
            budget -= step
            if end_day > 28:
                end_day = 1
                end_month += 1
                if end_month > 12:
                    end_month = 1
                    end_year += 1
        if end_year > 1945 or (end_year == 1945 and (end_month, end_day) > (9, 2)):
            end_year, end_month, end_day = 1945, 9, 2
        end = f"{end_year:04d}-{end_month:02d}-{end_day:02d}"
        return start, end

    # -- the root
    root = add_event(
        Event("Q362", "World War II", WAR, start="1939-09-01", end="1945-09-02",
              participants=[c for c, _ in COUNTRIES[:10]])
    )

    # -- named events with pinned attributes
    named_specs = [
        # (qid, label, type, start, end, participants, depth slot)
        ("Q170314", "Second Sino-Japanese War", WAR, "1937-01-07", "1945-09-02",
         ["Q148", "Q17"], "d1"),
        ("Q153836", "European theatre of World War II", CAMPAIGN, "1939-09-01", "1945-05-08",
         [], "d1"),
        ("Q127920", "Pacific War", WAR, "1941-12-07", "1945-09-02", ["Q30", "Q17", "Q145"], "d1"),
        ("Q189266", "Eastern Front", CAMPAIGN, "1941-06-22", "1945-05-08",
         ["Q183", "Q15180"], "d1"),
        ("Q744535", "Western Front", CAMPAIGN, "1939-09-03", "1945-05-08", [], "d1"),
        ("Q256004", "North African campaign", CAMPAIGN, "1940-06-10", "1943-05-13",
         ["Q145", "Q183", "Q38"], "d1"),
        ("Q184425", "Battle of the Atlantic", BATTLE, "1939-09-03", "1945-05-08",
         ["Q30", "Q145", "Q183", "Q16", "Q20", "Q55", "Q31", "Q142"], "d1"),
        ("Q150812", "Invasion of Poland", BATTLE, "1939-09-01", "1939-10-06",
         ["Q183", "Q36", "Q15180"], "d1"),
        ("Q132576", "Winter War", BATTLE, "1939-11-30", "1940-03-13", ["Q15180", "Q20"], "d1"),
        ("Q83152", "Battle of France", BATTLE, "1940-05-10", "1940-06-25",
         ["Q142", "Q145", "Q183", "Q38", "Q31", "Q55"], "d1"),
        ("Q208141", "Battle of Britain", BATTLE, "1940-07-10", "1940-10-31",
         ["Q145", "Q183", "Q16"], "d1"),
        ("Q83003", "Attack on Pearl Harbor", BATTLE, "1941-12-07", "1941-12-07",
         ["Q30", "Q17"], "d1"),

        ("Q131421", "Battle of Midway", BATTLE, "1942-06-04", "1942-06-07", ["Q30", "Q17"], "d2"),
        ("Q205447", "Guadalcanal campaign", BATTLE, "1942-08-07", "1943-02-09",
         ["Q30", "Q17", "Q408"], "d2"),
        ("Q171813", "Battle of the Coral Sea", BATTLE, "1942-05-04", "1942-05-08",
         ["Q30", "Q17", "Q408"], "d2"),
        ("Q2787", "Battle of Stalingrad", BATTLE, "1942-08-23", "1943-02-02",
         ["Q183", "Q15180", "Q38", "Q36", "Q142", "Q17"], "d2"),
        ("Q190134", "Battle of Moscow", BATTLE, "1941-10-02", "1942-01-07",
         ["Q183", "Q15180"], "d2"),
        ("Q134661", "Siege of Leningrad", BATTLE, "1941-09-08", "1944-01-27",
         ["Q183", "Q15180", "Q38"], "d2"),
        ("Q130861", "Battle of Kursk", BATTLE, "1943-07-05", "1943-08-23",
         ["Q183", "Q15180"], "d2"),
        ("Q16471", "Operation Overlord", BATTLE, "1944-06-06", "1944-08-30",
         ["Q30", "Q145", "Q16", "Q183", "Q142", "Q36"], "d2"),
        ("Q152123", "Battle of the Bulge", BATTLE, "1944-12-16", "1945-01-25",
         ["Q30", "Q145", "Q183", "Q31"], "d2"),
        ("Q152989", "Battle of Berlin", BATTLE, "1945-04-16", "1945-05-02",
         ["Q183", "Q15180", "Q36", "Q142", "Q145", "Q30"], "d2"),
        ("Q466162", "Battle of Westerplatte", BATTLE, "1939-09-01", "1939-09-07",
         ["Q183", "Q36"], "d2"),
        ("Q925513", "Battle of Wizna", BATTLE, "1939-09-07", "1939-09-10", ["Q183", "Q36"], "d2"),
        ("Q698847", "Battle of the Heligoland Bight", BATTLE, "1939-12-03", "1939-12-03",
         ["Q145", "Q183"], "d2"),
        ("Q202325", "Battle of Iwo Jima", BATTLE, "1945-02-19", "1945-03-26", ["Q30", "Q17"], "d2"),

        ("Q200672", "Battle of Okinawa", BATTLE, "1945-04-01", "1945-06-22",
         ["Q30", "Q17", "Q145"], "d3"),
        ("Q200244", "Battle of Leyte Gulf", BATTLE, "1944-10-23", "1944-10-26",
         ["Q30", "Q17", "Q408"], "d3"),
        ("Q1519294", "Battle of Kasserine Pass", BATTLE, "1943-02-19", "1943-02-24",
         ["Q30", "Q183", "Q38"], "d3"),
        ("Q223973", "Battle of Anzio", BATTLE, "1944-01-22", "1944-06-05",
         ["Q30", "Q145", "Q183"], "d3"),
        ("Q704027", "Battle of Hürtgen Forest", BATTLE, "1944-09-19", "1944-12-16",
         ["Q30", "Q183"], "d3"),
        ("Q309242", "Battle of Attu", BATTLE, "1943-05-11", "1943-05-30", ["Q30", "Q17"], "d3"),
        ("Q711961", "Battle of Tarawa", BATTLE, "1943-11-20", "1943-11-23", ["Q30", "Q17"], "d3"),
        ("Q344248", "Operation Market Garden", BATTLE, "1944-09-17", "1944-09-25",
         ["Q30", "Q145", "Q183", "Q36", "Q55", "Q31"], "d3"),
        ("Q188544", "Battle of Greece", BATTLE, "1941-04-06", "1941-04-30",
         ["Q183", "Q38", "Q145", "Q408", "Q142", "Q36", "Q31"], "d3"),

        ("Q13403439", "Battle of Mount Song", BATTLE, "1944-06-04", "1944-09-07",
         ["Q148", "Q17"], "d5"),
    ]
    depth_slots: dict[str, list[Event]] = {"d1": [], "d2": [], "d3": [], "d4": [], "d5": [], "d6": []}
    for qid, label, type_iri, start, end, participants, slot in named_specs:
        event = add_event(
            Event(qid, label, type_iri, start=start, end=end,
                  participants=[WD + p for p in participants], coords=rand_coords())
        )
        depth_slots[slot].append(event)

    # boundary battles for the rule families
    boundary_specs = [
        ("Q90100001", "Battle of the Vardar Line", "1939-01-01", "1939-01-15",
         ["Q183", "Q145"], "d3"),          # starts exactly on the window edge: excluded
        ("Q90100002", "Battle of Lake Ilmen Road", "1939-12-31", "1940-01-20",
         ["Q15180", "Q20"], "d3"),         # inside the window
        ("Q90100003", "Siege of Calanthe Ridge", "1941-05-01", "1941-05-31",
         ["Q183", "Q145"], "d4"),          # exactly 30 days: excluded by strict >
        ("Q90100004", "Siege of Veldren Marsh", "1941-05-01", "1941-06-01",
         ["Q183", "Q15180"], "d4"),        # 31 days: included
        ("Q90100005", "Battle of Five Banners", "1942-03-01", "1942-04-11",
         ["Q30", "Q145", "Q183", "Q38", "Q17"], "d4"),   # exactly 5 participants
        ("Q90100006", "Battle of the Silver Strait", "1943-06-10", "1943-06-18",
         ["Q145", "Q183", "Q38", "Q17", "Q36"], "d4"),   # exactly 5 participants
        ("Q90100007", "Battle of the Amber Coast", "1940-04-09", "1940-06-10",
         ["Q183", "Q20", "Q145", "Q142", "Q36"], "d4"),  # exactly 5 participants
    ]
    for qid, label, start, end, participants, slot in boundary_specs:
        event = add_event(
            Event(qid, label, BATTLE, start=start, end=end,
                  participants=[WD + p for p in participants], coords=rand_coords())
        )
        depth_slots[slot].append(event)

    # -- fill the down-tree to the pinned shape: 12 / 15 / 12 / 8, then 40 / 34
    targets = {"d1": 12, "d2": 15, "d3": 12, "d4": 8, "d5": 40, "d6": 34}
    synth = 90200000
    operation_names = [
        "Operation", "Raid on", "Advance to", "Defense of", "Landing at", "Counterattack at",
    ]
    place_names = [
        "Karelia", "Tobruk", "Narvik", "Smolensk", "Palermo", "Rostov", "Luzon", "Timor",
        "Aleppo", "Crete", "Rhodes", "Odessa", "Kharkov", "Bastogne", "Remagen", "Arnhem",
        "Saipan", "Peleliu", "Rabaul", "Kokoda", "Imphal", "Kohima", "Mandalay", "Myitkyina",
        "Bizerte", "Benghazi", "El Agheila", "Gazala", "Taranto", "Salerno", "Cassino",
        "Falaise", "Aachen", "Colmar", "Torgau", "Breslau", "Danzig", "Memel", "Tallinn",
        "Vyborg", "Petsamo", "Murmansk", "Belgrade", "Budapest", "Vienna", "Prague",
    ]
    for slot, want in targets.items():
        while len(depth_slots[slot]) < want:
            qid = f"Q{synth}"
            synth += 1
            name = f"{operation_names[synth % len(operation_names)]} {place_names[synth % len(place_names)]}"
            start, end = rand_dates()
            is_battle = rng.random() < 0.35
            participants = [
                WD + c for c, _ in rng.sample(COUNTRIES, rng.randint(1, 4))
            ]
            event = add_event(
                Event(qid, f"{name} ({qid})", BATTLE if is_battle else OPERATION,
                      start=start, end=end, participants=participants,
                      coords=rand_coords() if rng.random() < 0.85 else None)
            )
            depth_slots[slot].append(event)

    for slot, want in targets.items():
        assert len(depth_slots[slot]) == want, (slot, len(depth_slots[slot]))

    # wire the down edges parent -> child
    def wire(parents: list[Event], children: list[Event]):
        for i, child in enumerate(children):
            parent = parents[i % len(parents)]
            down_edges.append((parent.iri, child.iri))

    wire([root], depth_slots["d1"])
    wire(depth_slots["d1"], depth_slots["d2"])
    wire(depth_slots["d2"], depth_slots["d3"])
    wire(depth_slots["d3"], depth_slots["d4"])
    wire(depth_slots["d4"], depth_slots["d5"])
    wire(depth_slots["d5"], depth_slots["d6"])

    # link incompleteness story: the Sino-Japanese war also part-of the root
    up_edges.append((events["Q170314"].iri, root.iri))

    # -- the part-of side: campaigns and their events, reachable only upward
    campaigns: list[Event] = []
    campaign_names = [
        "Tunisian campaign", "Italian campaign", "Burma campaign", "Balkans campaign",
        "Norwegian campaign", "Syria-Lebanon campaign", "East African campaign",
        "Philippines campaign", "New Guinea campaign", "Solomon Islands campaign",
        "Dutch East Indies campaign", "Caucasus campaign", "Crimea campaign",
        "Baltic offensive", "Vistula-Oder offensive", "Manchurian campaign",
        "Western Desert campaign", "Gothic Line offensive", "Siegfried Line campaign",
        "Channel Islands occupation", "Arctic convoys", "Mediterranean convoys",
        "Strategic bombing campaign", "U-boat campaign", "Resistance operations",
    ]
    for index, name in enumerate(campaign_names):
        qid = f"Q{90300000 + index}"
        start, end = rand_dates(1939, 1944, 400)
        event = add_event(
            Event(qid, name, CAMPAIGN, start=start, end=end,
                  participants=[WD + c for c, _ in rng.sample(COUNTRIES, rng.randint(2, 5))],
                  coords=rand_coords())
        )
        campaigns.append(event)
        up_edges.append((event.iri, root.iri))

    # named part-of-only events
    sedjenane = add_event(
        Event("Q4872340", "Battle of Sedjenane", BATTLE, start="1943-02-26", end="1943-03-04",
              participants=[WD + "Q145", WD + "Q183", WD + "Q38"],
              coords=(9.2439, 37.0564))
    )
    up_edges.append((sedjenane.iri, campaigns[0].iri))  # Tunisian campaign
    changshan = add_event(
        Event("Q709333", "First Battle of Changshan", BATTLE, start="1938-03-10", end="1938-03-12",
              participants=[WD + "Q148", WD + "Q17"], coords=(120.83, 36.82))
    )
    up_edges.append((changshan.iri, events["Q170314"].iri))

    up_total_target = CLOSURE_TOTAL - DOWN_TOTAL          # events reachable only via part-of
    remaining = up_total_target - len(campaigns) - 2      # minus the named two
    synth = 90400000
    up_leaves: list[Event] = []
    while remaining > 0:
        qid = f"Q{synth}"
        synth += 1
        name = f"{operation_names[synth % len(operation_names)]} {place_names[synth % len(place_names)]}"
        is_battle = rng.random() < 0.3
        event = Event(qid, f"{name} ({qid})",
                      BATTLE if is_battle else OPERATION,
                      participants=[WD + c for c, _ in rng.sample(COUNTRIES, rng.randint(1, 4))],
                      coords=rand_coords() if rng.random() < 0.85 else None)
        # every event carries time data so the timeline can place all of them
        if rng.random() < 0.6:
            event.start, event.end = rand_dates()
        else:
            year, month, day = rng.randint(1939, 1945), rng.randint(1, 12), rng.randint(1, 28)
            if (year, month, day) > (1945, 9, 2):
                year = 1944
            event.instant = f"{year:04d}-{month:02d}-{day:02d}"
        add_event(event)
        up_leaves.append(event)
        # chain: 80% directly under a campaign, else under another leaf
        if up_leaves[:-1] and rng.random() > 0.8:
            parent = up_leaves[rng.randrange(len(up_leaves) - 1)]
        else:
            parent = campaigns[rng.randrange(len(campaigns))]
        up_edges.append((event.iri, parent.iri))
        remaining -= 1

    # a disconnected battle: US-participated, battle-typed, but not part of anything
    jinan = add_event(
        Event("Q709855", "Jinan incident", BATTLE, start="1928-05-03", end="1928-05-11",
              participants=[WD + "Q30", WD + "Q148", WD + "Q17"], coords=(116.99, 36.67))
    )

    # -- independent shape checks before any serialization
    children: dict[str, list[str]] = {}
    for parent, child in down_edges:
        children.setdefault(parent, []).append(child)
    parents_of: dict[str, list[str]] = {}
    for child, parent in up_edges:
        parents_of.setdefault(parent, []).append(child)

    def bfs(start: str, edges: dict[str, list[str]], limit: int | None = None) -> set[str]:
        seen = {start}
        queue = [(start, 0)]
        while queue:
            node, depth = queue.pop(0)
            if limit is not None and depth >= limit:
                continue
            for nxt in edges.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append((nxt, depth + 1))
        return seen

    down4 = bfs(root.iri, children, 4)
    down_all = bfs(root.iri, children)
    up_all = bfs(root.iri, parents_of)
    union = down_all | up_all
    assert len(down4) == DOWN_WITHIN_4, len(down4)
    assert len(down_all) == DOWN_TOTAL, len(down_all)
    assert len(union) == CLOSURE_TOTAL, len(union)
    assert jinan.iri not in union

    # -- distribute the enrichable property set
    fillers = _filler_list()
    all_props = CORE_PROPERTIES + fillers
    assert len({p for p, _ in all_props}) == ENRICHABLE_PROPERTIES

    closure_events = sorted(union)
    rng_extra = random.Random(777)
    event_list = [events[e[len(WD):]] for e in closure_events]
    for index, (prop, _label) in enumerate(fillers):
        count = 1 + (index % 4)
        for target in rng_extra.sample(event_list, count):
            target.extras.append((WDT + prop, literal(f"{_label} of {target.label}")))
    # sprinkle the numeric/context core properties
    for event in event_list:
        if rng_extra.random() < 0.3:
            event.extras.append((WDT + "P1120", literal(str(rng_extra.randint(10, 2_000_000)), datatype=XSD_INTEGER)))
        if rng_extra.random() < 0.2:
            event.extras.append((WDT + "P1339", literal(str(rng_extra.randint(10, 500_000)), datatype=XSD_INTEGER)))
        if rng_extra.random() < 0.25:
            event.extras.append((WDT + "P17", iri(rng_extra.choice(COUNTRIES)[0])))
        if rng_extra.random() < 0.1:
            other = rng_extra.choice(event_list)
            event.extras.append((WDT + "P793", iri(other.iri)))
        if rng_extra.random() < 0.1:
            other = rng_extra.choice(event_list)
            event.extras.append((WDT + "P828", iri(other.iri)))
        if rng_extra.random() < 0.08:
            other = rng_extra.choice(event_list)
            event.extras.append((WDT + "P155", iri(other.iri)))
        if rng_extra.random() < 0.08:
            other = rng_extra.choice(event_list)
            event.extras.append((WDT + "P156", iri(other.iri)))
        if rng_extra.random() < 0.15:
            event.extras.append((WDT + "P276", iri(rng_extra.choice(COUNTRIES)[0])))

    # -- emit triples
    store = GraphStore()

    def add(s, p, o):
        store.add(iri(s), iri(p), o if not isinstance(o, str) else iri(o))

    for prop, label in all_props:
        add(WDT + prop, RDFS_LABEL, literal(label, language="en"))
    for class_iri, label in [
        (BATTLE, "battle"), (WAR, "war"), (CAMPAIGN, "military campaign"),
        (OPERATION, "military operation"),
    ]:
        add(class_iri, RDFS_LABEL, literal(label, language="en"))
    for country, label in COUNTRIES:
        add(country, RDFS_LABEL, literal(label, language="en"))
        add(country, WDT + "P31", iri(WD + "Q6256"))
    add(WD + "Q6256", RDFS_LABEL, literal("country", language="en"))

    for event in events.values():
        subject = event.iri
        add(subject, RDFS_LABEL, literal(event.label, language="en"))
        add(subject, WDT + "P31", iri(event.type_iri))
        if event.start:
            store.add(iri(subject), iri(WDT + "P580"), _date_literal(event.start))
        if event.end:
            store.add(iri(subject), iri(WDT + "P582"), _date_literal(event.end))
        if event.instant:
            store.add(iri(subject), iri(WDT + "P585"), _date_literal(event.instant))
        if event.coords:
            store.add(iri(subject), iri(WDT + "P625"), _point(*event.coords))
        for participant in event.participants:
            add(subject, WDT + "P710", participant)
        for prop, term in event.extras:
            store.add(iri(subject), iri(prop), term)
    for parent, child in down_edges:
        add(parent, WDT + "P527", child)
    for child, parent in up_edges:
        add(child, WDT + "P361", parent)

    # discovery over the closure set must see exactly the pinned property count
    seen_props = set()
    for member in closure_events:
        for quad in store.match(iri(member), None, None, None):
            if quad.predicate.value.startswith(WDT):
                seen_props.add(quad.predicate.value)
    assert len(seen_props) == ENRICHABLE_PROPERTIES, len(seen_props)

    meta = {
        "closure": closure_events,
        "down4": sorted(down4),
        "down_all": sorted(down_all),
    }
    return store, meta


# ---------------------------------------------------------------------------
# Magellan


def build_magellan() -> GraphStore:
    store = GraphStore()

    def add(s, p, o):
        store.add(iri(s), iri(p), o if not isinstance(o, str) else iri(o))

    labels = {
        "P31": "instance of", "P1344": "participant in", "P710": "participant",
        "P580": "start time", "P582": "end time", "P585": "point in time",
        "P625": "coordinate location", "P1427": "start point", "P2825": "via",
        "P1444": "intended destination", "P17": "country", "P2044": "elevation above sea level",
        "P569": "date of birth", "P570": "date of death", "P19": "place of birth",
        "P20": "place of death", "P27": "country of citizenship",
    }
    for p, label in labels.items():
        add(WDT + p, RDFS_LABEL, literal(label, language="en"))

    magellan = WD + "Q1496"
    expedition = WD + "Q1225170"
    add(magellan, RDFS_LABEL, literal("Ferdinand Magellan", language="en"))
    add(magellan, WDT + "P31", WD + "Q5")
    add(WD + "Q5", RDFS_LABEL, literal("human", language="en"))
    add(magellan, WDT + "P1344", expedition)
    add(magellan, WDT + "P19", WD + "Q273229")
    add(magellan, WDT + "P20", WD + "Q960572")
    store.add(iri(magellan), iri(WDT + "P569"), _date_literal("1480-02-03"))
    store.add(iri(magellan), iri(WDT + "P570"), _date_literal("1521-04-27"))
    add(magellan, WDT + "P27", WD + "Q45")
    add(WD + "Q45", RDFS_LABEL, literal("Portugal", language="en"))

    add(expedition, RDFS_LABEL, literal("Magellan–Elcano expedition", language="en"))
    add(expedition, WDT + "P31", WD + "Q2401485")
    add(WD + "Q2401485", RDFS_LABEL, literal("expedition", language="en"))
    store.add(iri(expedition), iri(WDT + "P580"), _date_literal("1519-08-10"))
    store.add(iri(expedition), iri(WDT + "P582"), _date_literal("1522-09-06"))
    add(expedition, WDT + "P710", magellan)
    add(expedition, WDT + "P710", WD + "Q207947")
    add(WD + "Q207947", RDFS_LABEL, literal("Juan Sebastián Elcano", language="en"))
    add(expedition, WDT + "P17", WD + "Q29")
    add(WD + "Q29", RDFS_LABEL, literal("Spain", language="en"))

    city = WD + "Q515"
    island = WD + "Q23442"
    strait = WD + "Q37901"
    add(city, RDFS_LABEL, literal("city", language="en"))
    add(island, RDFS_LABEL, literal("island", language="en"))
    add(strait, RDFS_LABEL, literal("strait", language="en"))

    places = [
        ("Q8717", "Seville", city, (-5.9866, 37.3886), None),
        ("Q15681", "Sanlúcar de Barrameda", city, (-6.3534, 36.778), None),
        ("Q5813", "Canary Islands", island, (-15.6, 28.3), None),
        ("Q8678", "Rio de Janeiro", city, (-43.2056, -22.9111), 2),
        ("Q1024095", "Puerto San Julián", city, (-67.7167, -49.3), None),
        ("Q48294", "Strait of Magellan", strait, (-71.0, -53.4667), None),
        ("Q16635", "Guam", island, (144.7447, 13.4443), None),
        ("Q1474", "Cebu City", city, (123.9, 10.3), None),
        ("Q960572", "Mactan", island, (124.0117, 10.2889), None),
        ("Q3827", "Maluku Islands", island, (127.4, -1.0), None),
        ("Q181475", "Cape of Good Hope", strait, (18.4771, -34.3568), None),
        ("Q273229", "Sabrosa", city, (-7.5744, 41.2661), None),
    ]
    for qid, label, type_iri, coords, elevation in places:
        subject = WD + qid
        add(subject, RDFS_LABEL, literal(label, language="en"))
        add(subject, WDT + "P31", type_iri)
        store.add(iri(subject), iri(WDT + "P625"), _point(*coords))
        if elevation is not None:
            store.add(
                iri(subject), iri(WDT + "P2044"),
                literal(str(elevation), datatype=XSD_DECIMAL),
            )

    add(expedition, WDT + "P1427", WD + "Q8717")
    add(expedition, WDT + "P1444", WD + "Q15681")
    for qid in ["Q15681", "Q5813", "Q8678", "Q1024095", "Q48294", "Q16635", "Q1474",
                "Q960572", "Q3827", "Q181475"]:
        add(expedition, WDT + "P2825", WD + qid)
    return store


# ---------------------------------------------------------------------------
# Recording


def recording_session(store: GraphStore, fixture_dir: Path) -> WorkSession:
    from narramap.localendpoint import InProcessClient
    from narramap.queries import profile_by_name

    config = EndpointConfig(
        base_url="https://query.wikidata.org/sparql",
        mode="record",
        fixture_dir=fixture_dir,
        page_size=1000,
        record_timestamp=RECORD_STAMP,
    )
    session = WorkSession(config, profile_by_name("wikidata"))
    session.client = InProcessClient(config, store)
    return session


ASK_HASPART = (
    "ASK { <http://www.wikidata.org/entity/Q362> "
    "<http://www.wikidata.org/prop/direct/P527> ?x }"
)
ASK_NONEXISTENT = "ASK { <urn:nonexistent> ?p ?o }"


def record_ww2(store: GraphStore, meta: dict) -> None:
    fixture_dir = FIXTURES / "ww2"
    if fixture_dir.exists():
        shutil.rmtree(fixture_dir)
    fixture_dir.mkdir(parents=True)
    (fixture_dir / "graph.ttl").write_bytes(store.export_turtle())

    session = recording_session(store, fixture_dir)
    client = session.client

    # the two-way closure with labels, enrichment of times and coordinates
    layer = session.closure(WD + "Q362", WDT + "P527", WDT + "P361")
    assert layer.feature_count == CLOSURE_TOTAL, layer.feature_count
    session.enrich(layer.iri, [WDT + "P580", WDT + "P582", WDT + "P585", WDT + "P625",
                               WDT + "P31", WDT + "P710"])
    discovered = session.discover_enrichment_properties(layer.iri)
    assert len(discovered) == ENRICHABLE_PROPERTIES, len(discovered)

    # the bounded has-part variant, enriched the same way (the UI demo
    # walks this smaller layer)
    bounded = session.closure(WD + "Q362", WDT + "P527", None, 4)
    assert bounded.feature_count == DOWN_WITHIN_4, bounded.feature_count
    session.enrich(bounded.iri, [WDT + "P580", WDT + "P582", WDT + "P585", WDT + "P625",
                                 WDT + "P31", WDT + "P710"])
    session.discover_enrichment_properties(bounded.iri)

    # the unbounded has-part-only diagnostic
    down_only = client.execute_select(
        build_closure_query(ClosureSpec(WD + "Q362", WDT + "P527"))
    )
    assert len(down_only.rows) == DOWN_TOTAL, len(down_only.rows)

    # style the full closure layer with the bundled rules
    report = session.apply_style(load_bundled_rulebase())
    assert sum(report["rules"].values()) > 0

    # search, discovery, and protocol examples used by tests and demos
    session.search_entities("World War II")
    session.search_entities("Sedjenane")
    session.discover_properties([WD + "Q362"], "forward")
    session.discover_properties([WD + "Q362"], "backward")
    client.execute_ask(ASK_HASPART)
    client.execute_ask(ASK_NONEXISTENT)

    fixtures = client._fixtures
    fixtures.write_manifest(
        {
            "name": "ww2",
            "endpoint": "https://query.wikidata.org/sparql",
            "profile": "wikidata",
            "page_size": 1000,
            "language": "en",
            "recorded_at": RECORD_STAMP,
            "root": WD + "Q362",
            "properties": {
                "has part": WDT + "P527",
                "part of": WDT + "P361",
                "start time": WDT + "P580",
                "end time": WDT + "P582",
                "point in time": WDT + "P585",
                "coordinate location": WDT + "P625",
                "participant": WDT + "P710",
                "instance of": WDT + "P31",
            },
            "diagnostics": {
                "closure_two_way": CLOSURE_TOTAL,
                "has_part_within_4": DOWN_WITHIN_4,
                "has_part_unbounded": DOWN_TOTAL,
                "enrichable_properties": ENRICHABLE_PROPERTIES,
            },
        }
    )
    print(f"ww2: {len(fixtures.keys())} recorded responses")


def record_magellan(store: GraphStore) -> None:
    fixture_dir = FIXTURES / "magellan"
    if fixture_dir.exists():
        shutil.rmtree(fixture_dir)
    fixture_dir.mkdir(parents=True)
    (fixture_dir / "graph.ttl").write_bytes(store.export_turtle())

    session = recording_session(store, fixture_dir)
    client = session.client

    session.search_entities("Magellan")
    session.search_entities("Ferdinand Magellan")
    session.discover_properties([WD + "Q1496"], "forward")

    # one-hop frontier, then discovery from the expedition
    session.set_start_nodes([WD + "Q1496"])
    session.add_hop("forward", WDT + "P1344")
    frontier = session.frontier_nodes()
    assert frontier == [WD + "Q1225170"], frontier
    session.discover_properties(frontier, "forward")

    # the two demo paths: start points and stopover points
    session.add_hop("forward", WDT + "P1427")
    start_layer = session.retrieve()
    assert start_layer.feature_count == 1, start_layer.feature_count
    # the interactive flow re-ranks properties at every new frontier
    assert session.frontier_nodes() == [WD + "Q8717"]
    session.discover_properties([WD + "Q8717"], "forward")

    session.reset_path()
    session.add_hop("forward", WDT + "P1344")
    session.add_hop("forward", WDT + "P2825")
    via_layer = session.retrieve()
    assert via_layer.feature_count == 10, via_layer.feature_count

    session.discover_enrichment_properties(via_layer.iri)
    session.enrich(via_layer.iri, [WDT + "P2044", WDT + "P31"])

    # area retrieval around Seville
    area_query = build_area_query(
        AreaSpec(bbox=(-6.2, 37.2, -5.7, 37.6), type_filter=WD + "Q515"),
        "en",
        WIKIDATA_PROFILE,
    )
    table = client.execute_select(area_query)
    assert table.distinct_values("entity") == {WD + "Q8717"}

    fixtures = client._fixtures
    fixtures.write_manifest(
        {
            "name": "magellan",
            "endpoint": "https://query.wikidata.org/sparql",
            "profile": "wikidata",
            "page_size": 1000,
            "language": "en",
            "recorded_at": RECORD_STAMP,
            "start": WD + "Q1496",
            "properties": {
                "participant in": WDT + "P1344",
                "start point": WDT + "P1427",
                "via": WDT + "P2825",
                "participant": WDT + "P710",
                "instance of": WDT + "P31",
                "coordinate location": WDT + "P625",
                "elevation above sea level": WDT + "P2044",
            },
        }
    )
    print(f"magellan: {len(fixtures.keys())} recorded responses")


def main() -> None:
    ww2_store, meta = build_ww2()
    print(f"ww2 graph: {len(ww2_store)} triples")
    record_ww2(ww2_store, meta)

    magellan_store = build_magellan()
    print(f"magellan graph: {len(magellan_store)} triples")
    record_magellan(magellan_store)

    vocab_dir = ROOT / "src" / "narramap" / "vocab"
    vocab_dir.mkdir(exist_ok=True)
    (vocab_dir / "ontology.ttl").write_bytes(vocabulary_turtle())
    print("vocabulary artifact written")


if __name__ == "__main__":
    main()
