"""Scenario documents, layer-band validation, time stepping and endurance.

A scenario is a JSON document with four sections::

    {"nodes": [...], "links": [...], "weather": {...}, "sim": {...}}

See ``docs/scenario-schema.md`` for the full schema.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .aero import NodeClass, payload_feasible
from .attenuation import WeatherProfile
from .errors import (DamuError, DegenerateGeometryError, OutOfValidityError,
                     ScenarioError, ValidationFailed)
from .geometry import (CircularCruise, Position3D, cruise_position, elevation_angle,
                       los_deviation, slant_distance)
from .linkbudget import LinkReport, RadioConfig, fspl, rf_link_between

# DAMU layer bands (m): strict lower/upper bounds per class
BALLOON_MIN_ALT_M = 20_000.0
FW_BAND_M = (1_000.0, 10_000.0)
RW_MAX_ALT_M = 1_000.0
# absolute class ceilings
FW_CEILING_M = 16_000.0
RW_CEILING_M = 6_000.0

CSV_HEADER = ("t_s", "link_id", "distance_m", "elevation_deg", "fspl_dB", "gaseous_dB",
              "rain_dB", "cloud_dB", "fog_dB", "rx_power_dBm", "margin_dB", "viable")

PRESETS = ("clear", "advection-fog", "cumulonimbus", "rain-medium", "rain-heavy", "rain-violent")


@dataclass(frozen=True)
class UavNode:
    id: str
    node_class: NodeClass
    position: Position3D | None = None
    cruise: CircularCruise | None = None
    radio: RadioConfig | None = None
    battery_Wh: float = 0.0
    avg_power_draw_W: float = 0.0
    harvest_W: float = 0.0
    payload_kg: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "node_class", NodeClass(self.node_class))
        if (self.position is None) == (self.cruise is None):
            raise ValueError(f"node {self.id}: exactly one of position or cruise is required")
        if self.cruise is not None and self.node_class is not NodeClass.FIXED_WING:
            raise ValueError(f"node {self.id}: only fixed-wing nodes may cruise")
        for name in ("battery_Wh", "avg_power_draw_W", "harvest_W", "payload_kg"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"node {self.id}: {name} must be >= 0")

    @property
    def altitude_m(self) -> float:
        return self.cruise.altitude_m if self.cruise is not None else self.position.z

    def position_at(self, t: float) -> Position3D:
        if self.cruise is not None:
            return cruise_position(self.cruise, t)
        return self.position


@dataclass(frozen=True)
class Link:
    id: str
    a: str
    b: str
    radio: RadioConfig | None = None


@dataclass(frozen=True)
class Scenario:
    nodes: tuple[UavNode, ...] = ()
    links: tuple[Link, ...] = ()
    weather: WeatherProfile = field(default_factory=WeatherProfile)
    duration_s: float = 0.0
    timestep_s: float = 1.0

    def __post_init__(self):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids")
        link_ids = [link.id for link in self.links]
        if len(set(link_ids)) != len(link_ids):
            raise ValueError("duplicate link ids")
        for link in self.links:
            for end in (link.a, link.b):
                if end not in ids:
                    raise ValueError(f"link {link.id} references unknown node {end!r}")
            if link.a == link.b:
                raise ValueError(f"link {link.id} joins a node to itself")
            if link.radio is None and self.node(link.a).radio is None:
                raise ValueError(f"link {link.id} has no radio and node {link.a} has none either")
        if not self.timestep_s > 0:
            raise ValueError("timestep_s must be positive")
        if not self.duration_s >= 0:
            raise ValueError("duration_s must be >= 0")

    def node(self, node_id: str) -> UavNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    @property
    def n_steps(self) -> int:
        # the epsilon keeps 60 / 0.1 from landing at 599
        return int(math.floor(self.duration_s / self.timestep_s + 1e-9))

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps) * self.timestep_s


# --- validation ------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    node_id: str
    rule: str
    observed: float

    def __str__(self):
        return f"{self.node_id}: {self.rule} (observed {self.observed:g})"


def validate(scenario: Scenario) -> list[Violation]:
    """Layer-band and payload violations, one entry per broken rule."""
    out = []
    for node in scenario.nodes:
        z = node.altitude_m
        cls = node.node_class
        if cls is NodeClass.BALLOON and not z > BALLOON_MIN_ALT_M:
            out.append(Violation(node.id, "balloon altitude band", z))
        elif cls is NodeClass.FIXED_WING:
            if not FW_BAND_M[0] < z < FW_BAND_M[1]:
                out.append(Violation(node.id, "FW altitude band", z))
            if z > FW_CEILING_M:
                out.append(Violation(node.id, "FW altitude ceiling", z))
        elif cls is NodeClass.ROTARY_WING:
            if not z < RW_MAX_ALT_M:
                out.append(Violation(node.id, "RW altitude band", z))
            if z > RW_CEILING_M:
                out.append(Violation(node.id, "RW altitude ceiling", z))
        if not payload_feasible(cls, node.payload_kg):
            out.append(Violation(node.id, "payload bound", node.payload_kg))
    return out


# --- simulation ------------------------------------------------------------

@dataclass(frozen=True)
class SimRecord:
    t_s: float
    link_id: str
    report: LinkReport


@dataclass
class SimulationResult:
    times: np.ndarray
    records: list[SimRecord]
    tracks: dict[str, np.ndarray]  # node id -> (n_steps, 3) positions
    links: tuple[Link, ...]

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def reports(self, link_id: str) -> list[LinkReport]:
        return [r.report for r in self.records if r.link_id == link_id]

    def los_deviation(self, link_id: str) -> float:
        """Largest angle (deg) between sight lines of a link over the run."""
        link = next(link for link in self.links if link.id == link_id)
        return los_deviation(self.tracks[link.a], self.tracks[link.b])


def _invalid_report(a: Position3D, b: Position3D, radio: RadioConfig, reason: str) -> LinkReport:
    distance = slant_distance(a, b)
    elevation = abs(elevation_angle(a, b)) if distance > 0 else float("nan")
    loss = fspl(distance, radio.frequency_GHz) if distance > 0 else float("nan")
    nan = float("nan")
    return LinkReport(distance, elevation, loss, nan, nan, nan, nan, nan, nan, False, reason)


def simulate(scenario: Scenario, force: bool = False) -> SimulationResult:
    """Evaluate every link at every timestep.

    Raises :class:`ValidationFailed` when the scenario breaks layer rules,
    unless ``force`` is set. Output is ordered by time, then link id.
    """
    if not force:
        violations = validate(scenario)
        if violations:
            raise ValidationFailed(violations)

    times = scenario.times()
    tracks = {}
    for node in scenario.nodes:
        if node.cruise is None:
            tracks[node.id] = np.tile(node.position.as_array(), (len(times), 1))
        else:
            tracks[node.id] = np.array([cruise_position(node.cruise, t).as_array()
                                        for t in times]).reshape(len(times), 3)

    links = tuple(sorted(scenario.links, key=lambda link: link.id))
    records = []
    for k, t in enumerate(times):
        for link in links:
            radio = link.radio or scenario.node(link.a).radio
            a = Position3D(*tracks[link.a][k])
            b = Position3D(*tracks[link.b][k])
            try:
                report = rf_link_between(a, b, radio, scenario.weather)
            except (OutOfValidityError, DegenerateGeometryError) as exc:
                report = _invalid_report(a, b, radio, str(exc))
            records.append(SimRecord(float(t), link.id, report))
    return SimulationResult(times, records, tracks, links)


def endurance(node: UavNode) -> float:
    """Flight time in seconds on the battery; ``math.inf`` when self-sustaining."""
    net = node.avg_power_draw_W - node.harvest_W
    if net > 0:
        return node.battery_Wh * 3600.0 / net
    if node.battery_Wh == 0 and node.avg_power_draw_W == 0 and node.harvest_W == 0:
        return 0.0
    return math.inf


# --- CSV -------------------------------------------------------------------

def _fmt(x: float, digits: int) -> str:
    return "nan" if math.isnan(x) else f"{x:.{digits}f}"


def csv_row(record: SimRecord) -> list[str]:
    r = record.report
    return [
        f"{record.t_s:.3f}", record.link_id, _fmt(r.distance_m, 3), _fmt(r.elevation_deg, 6),
        _fmt(r.fspl_dB, 4), _fmt(r.gaseous_dB, 4), _fmt(r.rain_dB, 4), _fmt(r.cloud_dB, 4),
        _fmt(r.fog_dB, 4), _fmt(r.rx_power_dBm, 4), _fmt(r.margin_dB, 4),
        "true" if r.viable else "false",
    ]


def write_csv(result: SimulationResult, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in result.records:
        writer.writerow(csv_row(record))


def to_csv(result: SimulationResult) -> str:
    buf = io.StringIO()
    write_csv(result, buf)
    return buf.getvalue()


# --- parsing ---------------------------------------------------------------

def _loads(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}: {exc.msg} (column {exc.colno})", line=exc.lineno) from exc


def _expect_keys(obj, where: str, allowed, required=()):
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ScenarioError(f"{where}: unknown field(s) {', '.join(sorted(unknown))}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ScenarioError(f"{where}: missing field(s) {', '.join(missing)}")


def _as_float(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: expected a number")
    return float(value)


def _number(obj, key, where, default=None):
    return _as_float(obj.get(key, default), f"{where}.{key}")


def load_preset(name: str) -> dict:
    if name not in PRESETS:
        raise ScenarioError(f"unknown weather preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("damu").joinpath("presets", f"{name}.json").read_text()
    return _loads(text, f"preset {name}")


_WEATHER_FIELDS = {f.name for f in fields(WeatherProfile)}


def weather_from_dict(obj, where: str = "weather") -> WeatherProfile:
    _expect_keys(obj, where, _WEATHER_FIELDS | {"preset", "description"})
    merged = {}
    if "preset" in obj:
        merged.update(weather_from_dict(load_preset(obj["preset"]), f"preset {obj['preset']}").__dict__)
    for key, value in obj.items():
        if key in ("preset", "description"):
            continue
        if key in ("visibility_class", "rain_polarization"):
            merged[key] = value
        else:
            merged[key] = _number(obj, key, where)
    try:
        return WeatherProfile(**merged)
    except (DamuError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def load_weather(source: str) -> WeatherProfile:
    """A preset name or the path of a weather JSON file."""
    if source in PRESETS:
        return weather_from_dict({"preset": source})
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read weather file {source}: {exc.strerror}") from exc
    return weather_from_dict(_loads(text, source), source)


def _radio(obj, where):
    keys = [f.name for f in fields(RadioConfig)]
    _expect_keys(obj, where, keys, keys)
    try:
        return RadioConfig(**{k: _number(obj, k, where) for k in keys})
    except (DamuError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def _vector(value, where, size):
    if not (isinstance(value, list) and len(value) == size):
        raise ScenarioError(f"{where}: expected a list of {size} numbers")
    return tuple(_as_float(v, f"{where}[{i}]") for i, v in enumerate(value))


def _node(obj, where):
    _expect_keys(obj, where,
                 ("id", "class", "position", "cruise", "radio", "battery_Wh",
                  "avg_power_draw_W", "harvest_W", "payload_kg"),
                 ("id", "class"))
    if obj["class"] not in [c.value for c in NodeClass]:
        raise ScenarioError(f"{where}.class: unknown node class {obj['class']!r}")
    position = cruise = None
    try:
        if "position" in obj:
            position = Position3D(*_vector(obj["position"], f"{where}.position", 3))
        if "cruise" in obj:
            c = obj["cruise"]
            cw = f"{where}.cruise"
            _expect_keys(c, cw, ("center", "altitude_m", "speed_mps", "bank_angle_deg"),
                         ("center", "altitude_m", "speed_mps", "bank_angle_deg"))
            center = _vector(c["center"], f"{cw}.center", 2)
            cruise = CircularCruise(center, _number(c, "altitude_m", cw),
                                    _number(c, "speed_mps", cw), _number(c, "bank_angle_deg", cw))
        return UavNode(
            id=str(obj["id"]),
            node_class=NodeClass(obj["class"]),
            position=position,
            cruise=cruise,
            radio=_radio(obj["radio"], f"{where}.radio") if "radio" in obj else None,
            battery_Wh=_number(obj, "battery_Wh", where, 0.0),
            avg_power_draw_W=_number(obj, "avg_power_draw_W", where, 0.0),
            harvest_W=_number(obj, "harvest_W", where, 0.0),
            payload_kg=_number(obj, "payload_kg", where, 0.0),
        )
    except ScenarioError:
        raise
    except (DamuError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def scenario_from_dict(doc) -> Scenario:
    _expect_keys(doc, "scenario", ("nodes", "links", "weather", "sim", "description"), ("nodes", "sim"))
    if not isinstance(doc["nodes"], list):
        raise ScenarioError("nodes: expected a list")
    nodes = tuple(_node(n, f"nodes[{i}]") for i, n in enumerate(doc["nodes"]))
    links = []
    for i, obj in enumerate(doc.get("links", [])):
        where = f"links[{i}]"
        _expect_keys(obj, where, ("id", "a", "b", "radio"), ("a", "b"))
        radio = _radio(obj["radio"], f"{where}.radio") if "radio" in obj else None
        links.append(Link(str(obj.get("id", f"{obj['a']}-{obj['b']}")), str(obj["a"]), str(obj["b"]), radio))
    weather = weather_from_dict(doc.get("weather", {}))
    sim = doc["sim"]
    _expect_keys(sim, "sim", ("duration_s", "timestep_s"), ("duration_s", "timestep_s"))
    try:
        return Scenario(nodes, tuple(links), weather,
                        _number(sim, "duration_s", "sim"), _number(sim, "timestep_s", "sim"))
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def loads_scenario(text: str, source: str = "<scenario>") -> Scenario:
    return scenario_from_dict(_loads(text, source))


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from exc
    return loads_scenario(text, str(path))
