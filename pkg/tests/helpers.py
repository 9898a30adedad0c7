"""Shared builders and independent oracles for the test suite.

The oracles deliberately avoid the library's rule tables and query
helpers: they restate each rule over plain name triples.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from hdtkg.hdtn import load_files
from hdtkg.kb import KnowledgeBase, Mode
from hdtkg.schema import Direction, builtin_schema

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

VASARI = FIXTURES / "vasari_ultima_cena.hdtn"
PAFOS = FIXTURES / "pafos_gate.hdtn"
PAFOS_BLOCKS = FIXTURES / "pafos_gate.hdti"
PISA = FIXTURES / "pisa_example.hdtn"


def manifest(name: str) -> dict:
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


def load(path, blocks=None, mode=Mode.LENIENT, story_shortcut=True):
    kb = KnowledgeBase(builtin_schema(story_shortcut), mode)
    diags = load_files(kb, path, blocks)
    return kb, diags


def fixture_kbs():
    """(label, kb) for every loadable fixture."""
    return [
        ("vasari", load(VASARI)[0]),
        ("pafos", load(PAFOS)[0]),
        ("pafos+blocks", load(PAFOS, PAFOS_BLOCKS)[0]),
        ("pisa", load(PISA)[0]),
    ]


# entailment oracle ------------------------------------------------------------

_SUPER = {"HP5": "HP11", "HP7": "HP11", "HP24": "HP11", "HP25": "HP11"}
_SHORTCUTS = {"HP2": "HP5", "HP17": "HP24", "HP18": "HP25"}


def brute_force_closure(triples, story_shortcut=True):
    """Apply every rule to every combination until nothing changes."""
    shortcuts = dict(_SHORTCUTS)
    if story_shortcut:
        shortcuts["HP6"] = "HP7"
    closed = set(triples)
    while True:
        new = set()
        for (a, p, b) in closed:
            if p == "HP3":
                new.add((b, "HP3", a))
            if p in _SUPER:
                new.add((a, _SUPER[p], b))
            if p in shortcuts:
                for (x, q, twin) in closed:
                    if q == "HP1" and x == a:
                        new.add((twin, shortcuts[p], b))
            if p == "HP4":
                for (x, q, ta) in closed:
                    if q != "HP1" or x != a:
                        continue
                    for (y, r, tb) in closed:
                        if r == "HP1" and y == b:
                            new.add((ta, "HP27", tb))
        if new <= closed:
            return closed
        closed |= new


def name_triples(kb, include_inferred=True):
    return {(kb.instances[s.subject].name, s.property, kb.instances[s.object].name)
            for s in kb.statements.values() if include_inferred or not s.inferred}


# random knowledge bases -----------------------------------------------------------

_RANDOM_CLASSES = ["HC16", "HC16", "HC17", "HC2", "HC3", "HC3", "HC4", "HC6", "HC7", "HC14", "HC13"]
_RANDOM_PROPS = ["HP1", "HP1", "HP2", "HP3", "HP4", "HP5", "HP6", "HP7", "HP12", "HP17",
                 "HP18", "HP24", "HP25", "HP11", "HP27", "HP30", "HP21"]


def random_kb(rng: random.Random, max_statements=30, mode=Mode.LENIENT, literals=True):
    """Small lenient KB with rule-triggering shapes, plus a few literal nodes."""
    kb = KnowledgeBase(builtin_schema(), mode)
    n = rng.randint(2, 12)
    ids = []
    for i in range(n):
        iid, _ = kb.assert_instance(f"n{i}", rng.choice(_RANDOM_CLASSES))
        if rng.random() < 0.2:
            kb.set_description(iid, rng.choice(["a", "b \"quoted\"", "multi\nline", "tab\there"]))
        ids.append(iid)
    if literals:
        for value in rng.sample(["Porta", "High Gate", "1234", "painting"], rng.randint(0, 2)):
            cls = rng.choice(["HC12", "HC11", "crm:E55"])
            lid, _ = kb.assert_instance(value, cls)
            ids.append(lid)
    for _ in range(rng.randint(0, max_statements)):
        kb.assert_statement(rng.choice(ids), rng.choice(_RANDOM_PROPS), Direction.FORWARD, rng.choice(ids))
    return kb


# flood oracle ------------------------------------------------------------------

def in_region(geo_data: dict, location: str, region: str) -> bool:
    seen = set()
    cur = location
    while cur is not None and cur not in seen:
        if cur == region:
            return True
        seen.add(cur)
        cur = (geo_data.get(cur) or {}).get("parent")
    return False


def brute_force_at_risk(placements, geo_data: dict, region: str, level: float):
    """placements: iterable of (asset name, location name)."""
    out = set()
    for asset, location in placements:
        entry = geo_data.get(location)
        if entry is None or entry.get("elevation_m") is None:
            continue
        if in_region(geo_data, location, region) and entry["elevation_m"] < level:
            out.add(asset)
    return out


def synthetic_flood_kb(n_assets=20, seed=7, mode=Mode.LENIENT):
    """Assets spread over locations in region R and outside it.

    Returns ``(kb, geo_data, placements)``; geo_data is the raw sidecar dict.
    """
    rng = random.Random(seed)
    kb = KnowledgeBase(builtin_schema(), mode)
    geo = {"R": {"lat": 43.7, "lon": 11.2, "elevation_m": 40.0, "parent": None},
           "Elsewhere": {"lat": 35.1, "lon": 33.3, "elevation_m": 100.0, "parent": None}}
    placements = []
    for i in range(n_assets):
        asset = f"Asset {i:02d}"
        loc = f"Site {i:02d}"
        parent = "R" if i % 4 else "Elsewhere"
        elevation = None if i == 5 else round(rng.uniform(0.0, 20.0), 2)
        geo[loc] = {"lat": None, "lon": None, "elevation_m": elevation, "parent": parent}
        aid, _ = kb.assert_instance(asset, "HC16 Tangible Asset")
        lid, _ = kb.assert_instance(loc, "HC13 Heritage Location")
        kb.assert_statement(aid, "HP12", Direction.FORWARD, lid)
        placements.append((asset, loc))
    # located somewhere the sidecar does not know
    aid, _ = kb.assert_instance("Asset unmapped", "HC16 Tangible Asset")
    lid, _ = kb.assert_instance("Unmapped Site", "HC13 Heritage Location")
    kb.assert_statement(aid, "HP12", Direction.FORWARD, lid)
    placements.append(("Asset unmapped", "Unmapped Site"))
    return kb, geo, placements
