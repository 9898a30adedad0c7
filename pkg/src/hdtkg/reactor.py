"""Automated reaction to flood alerts: risk assessment, action planning, recording."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Optional

from .errors import WARNING, Diagnostic, GeoDataError, UnknownProcedure, UnknownRegion
from .kb import KnowledgeBase
from .schema import Direction

TANGIBLE = "HC16"
LOCATION = "HC13"
EVENT = "HC8"
CONDITION_STATE = "HC9"
LOCATED_IN = "HP12"
AFFECTED_BY = "HP32"
HAS_CONDITION = "HP22"
HAPPENED_AT = "HP31"
HAS_TYPE = ("HP21", "crm:P2")
AT_FLOOD_RISK = "at flood risk"

MOVABLE_TYPES = frozenset({"painting", "statue", "manuscript", "icon"})


class Reason(enum.Enum):
    BELOW_LEVEL = "BelowLevel"
    ABOVE_LEVEL = "AboveLevel"
    NO_ELEVATION_DATA = "NoElevationData"
    OUTSIDE_REGION = "OutsideRegion"


class Action(enum.Enum):
    RELOCATE = "Relocate"
    DEPLOY_BARRIER = "DeployBarrier"
    ACTIVATE_ACTUATOR = "ActivateActuator"
    NOTIFY_CUSTODIAN = "NotifyCustodian"


@dataclass(frozen=True)
class GeoLocation:
    name: str
    latitude: Optional[float] = None
    longitude: Optional[float] = None
    elevation: Optional[float] = None
    parent: Optional[str] = None

    def __post_init__(self):
        if self.elevation is not None and not math.isfinite(self.elevation):
            raise GeoDataError(f"{self.name}: elevation must be finite")
        if self.latitude is not None and not -90 <= self.latitude <= 90:
            raise GeoDataError(f"{self.name}: latitude {self.latitude} outside [-90, 90]")
        if self.longitude is not None and not -180 <= self.longitude <= 180:
            raise GeoDataError(f"{self.name}: longitude {self.longitude} outside [-180, 180]")


def geo_index_from_dict(data: dict) -> dict:
    """Build a location index from the sidecar mapping; rejects parent cycles."""
    index = {}
    for name, entry in sorted(data.items()):
        index[name] = GeoLocation(
            name,
            latitude=entry.get("lat"),
            longitude=entry.get("lon"),
            elevation=entry.get("elevation_m"),
            parent=entry.get("parent"),
        )
    for name in index:
        seen = set()
        cur = name
        while cur is not None and cur in index:
            if cur in seen:
                raise GeoDataError(f"parent chain of {name!r} loops back to {cur!r}")
            seen.add(cur)
            cur = index[cur].parent
    return index


def load_geo_index(path) -> dict:
    return geo_index_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def containment_chain(geo_index: dict, location: str):
    chain = []
    cur = location
    while cur is not None and cur not in chain:
        chain.append(cur)
        entry = geo_index.get(cur)
        cur = entry.parent if entry else None
    return chain


@dataclass(frozen=True)
class FloodAlert:
    alert_id: str
    region: str
    expected_water_level: float
    issued_at: Optional[datetime] = None

    def __post_init__(self):
        if not math.isfinite(self.expected_water_level):
            raise ValueError("expected_water_level must be finite")

    @classmethod
    def from_dict(cls, data: dict) -> "FloodAlert":
        issued = data.get("issued_at")
        if isinstance(issued, str):
            issued = datetime.fromisoformat(issued.replace("Z", "+00:00"))
        return cls(data["alert_id"], data["region"], float(data["expected_water_level"]), issued)

    @classmethod
    def load(cls, path) -> "FloodAlert":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class AssetRisk:
    asset: str
    location: str
    elevation: Optional[float]
    at_risk: bool
    reason: Reason

    def to_dict(self) -> dict:
        return {"asset": self.asset, "location": self.location, "elevation_m": self.elevation,
                "at_risk": self.at_risk, "reason": self.reason.value}


@dataclass
class RiskReport:
    alert_id: str
    expected_water_level: float
    region: str
    assessed: list = field(default_factory=list)

    def at_risk_assets(self):
        return sorted({a.asset for a in self.assessed if a.at_risk})

    def to_dict(self) -> dict:
        return {"alert_id": self.alert_id, "region": self.region,
                "expected_water_level": self.expected_water_level,
                "assessed": [a.to_dict() for a in self.assessed]}


@dataclass(frozen=True)
class PlannedAction:
    asset: str
    action: Action
    rationale: str
    actuator: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"asset": self.asset, "action": self.action.value, "rationale": self.rationale}
        if self.actuator is not None:
            out["actuator"] = self.actuator
        return out


@dataclass
class ActionPlan:
    alert_id: str
    actions: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"alert_id": self.alert_id, "actions": [a.to_dict() for a in self.actions]}


def plan_to_json(plan: ActionPlan, report: Optional[RiskReport] = None) -> str:
    data = {"plan": plan.to_dict()}
    if report is not None:
        data["report"] = report.to_dict()
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def assess_flood(kb: KnowledgeBase, geo_index: dict, alert: FloodAlert) -> RiskReport:
    """Compare every located tangible asset with the expected water level.

    An asset is at risk only when its location lies inside the alert region
    and its elevation is strictly below the level; assets without elevation
    data are reported, never dropped.
    """
    if alert.region not in geo_index:
        raise UnknownRegion(f"region {alert.region!r} is not in the geo index", ref=alert.region)
    report = RiskReport(alert.alert_id, alert.expected_water_level, alert.region)
    rows = []
    for asset_id in kb.instances_of(TANGIBLE):
        asset = kb.instances[asset_id].name
        for s in kb.query(subject=asset_id, property=LOCATED_IN, with_inference=True):
            location = kb.instances[s.object].name
            entry = geo_index.get(location)
            if entry is None:
                rows.append(AssetRisk(asset, location, None, False, Reason.NO_ELEVATION_DATA))
                continue
            if alert.region not in containment_chain(geo_index, location):
                rows.append(AssetRisk(asset, location, entry.elevation, False, Reason.OUTSIDE_REGION))
            elif entry.elevation is None:
                rows.append(AssetRisk(asset, location, None, False, Reason.NO_ELEVATION_DATA))
            elif entry.elevation < alert.expected_water_level:
                rows.append(AssetRisk(asset, location, entry.elevation, True, Reason.BELOW_LEVEL))
            else:
                rows.append(AssetRisk(asset, location, entry.elevation, False, Reason.ABOVE_LEVEL))
    report.assessed = sorted(rows, key=lambda r: (r.asset, r.location))
    return report


def asset_types(kb: KnowledgeBase, asset_id: int):
    out = set()
    for prop in HAS_TYPE:
        for s in kb.query(subject=asset_id, property=prop, with_inference=True):
            out.add(kb.instances[s.object].name.strip().lower())
    return out


def plan_actions(kb: KnowledgeBase, report: RiskReport, actuators: Optional[dict] = None,
                 movable_override: Optional[dict] = None) -> ActionPlan:
    """One protective action plus a custodian notice per at-risk asset."""
    actuators = actuators or {}
    movable_override = movable_override or {}
    plan = ActionPlan(report.alert_id)
    for asset in report.at_risk_assets():
        if asset in actuators:
            plan.actions.append(PlannedAction(
                asset, Action.ACTIVATE_ACTUATOR,
                f"registered actuator {actuators[asset]!r} protects the asset in place",
                actuator=actuators[asset]))
        else:
            iid = kb.find(asset)
            types = asset_types(kb, iid) if iid is not None else set()
            movable = movable_override.get(asset, bool(types & MOVABLE_TYPES))
            if movable:
                kinds = ", ".join(sorted(types & MOVABLE_TYPES)) or "override"
                plan.actions.append(PlannedAction(asset, Action.RELOCATE,
                                                  f"movable asset ({kinds}); move above the expected water level"))
            else:
                plan.actions.append(PlannedAction(asset, Action.DEPLOY_BARRIER,
                                                  "immovable asset; deploy flood barriers around it"))
        plan.actions.append(PlannedAction(asset, Action.NOTIFY_CUSTODIAN,
                                          f"asset below expected water level {report.expected_water_level:g} m"))
    return plan


def record_event(kb: KnowledgeBase, alert: FloodAlert, report: RiskReport, event_type: str = "flood"):
    """Write the alert and its effects into ``kb``; returns the new statement ids.

    Adds an event typed ``event_type`` that happened at the alert region, and
    for each at-risk asset an affected-by link plus a fresh condition state.
    All-or-nothing: a rejected statement leaves ``kb`` unchanged.
    """
    before = set(kb.statements)
    with kb.atomic():
        event, _ = kb.assert_instance(f"Flood alert {alert.alert_id}", f"{EVENT} Heritage Event")
        kb.set_description(event, f"expected water level {alert.expected_water_level:g} m above sea level")
        region, _ = kb.assert_instance(alert.region, f"{LOCATION} Heritage Location")
        kind, _ = kb.assert_instance(event_type, "crm:E55 Type")
        kb.assert_statement(event, HAPPENED_AT, Direction.FORWARD, region)
        kb.assert_statement(event, "HP21", Direction.FORWARD, kind)
        for asset in report.at_risk_assets():
            asset_id = kb.find(asset)
            if asset_id is None:
                raise KeyError(f"asset {asset!r} is not in the knowledge base")
            kb.assert_statement(asset_id, AFFECTED_BY, Direction.FORWARD, event)
            state, _ = kb.assert_instance(f"{asset} condition after {alert.alert_id}",
                                          f"{CONDITION_STATE} Heritage Condition State")
            kb.set_description(state, AT_FLOOD_RISK)
            kb.assert_statement(asset_id, HAS_CONDITION, Direction.FORWARD, state)
    return sorted(set(kb.statements) - before)


@dataclass(frozen=True)
class EventModelEntry:
    name: str
    event_type: str
    procedure: str


def _flood_v1(kb, geo_index, alert, actuators=None, movable_override=None):
    report = assess_flood(kb, geo_index, alert)
    return report, plan_actions(kb, report, actuators, movable_override)


BUILTIN_PROCEDURES: dict = {"flood_v1": _flood_v1}


class Reactor:
    """Registry of event models and the procedures that serve them."""

    def __init__(self, procedures: Optional[dict] = None):
        self.procedures: dict = dict(BUILTIN_PROCEDURES if procedures is None else procedures)
        self.models: dict = {}

    def register_event_model(self, entry: EventModelEntry) -> list:
        if entry.procedure not in self.procedures:
            raise UnknownProcedure(f"no procedure {entry.procedure!r}", ref=entry.procedure)
        diags = []
        if entry.name in self.models:
            diags.append(Diagnostic("ModelReplaced", WARNING,
                                    f"event model {entry.name!r} replaced", ref=entry.name))
        self.models[entry.name] = entry
        return diags

    def models_for(self, event_type: str):
        return [m for _, m in sorted(self.models.items()) if m.event_type == event_type]

    def procedure(self, name: str) -> Callable:
        try:
            return self.procedures[name]
        except KeyError:
            raise UnknownProcedure(f"no procedure {name!r}", ref=name) from None

    def handle_flood(self, kb: KnowledgeBase, geo_index: dict, alert: FloodAlert,
                     actuators: Optional[dict] = None, movable_override: Optional[dict] = None):
        """Run every flood model; the first registered model's result is returned."""
        models = self.models_for("flood") or [EventModelEntry("builtin", "flood", "flood_v1")]
        results = [self.procedure(m.procedure)(kb, geo_index, alert, actuators, movable_override)
                   for m in models]
        return results[0]
