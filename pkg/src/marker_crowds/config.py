"""Scenario configuration: JSON schema, validation, and built-in presets.

A scenario document is plain JSON (schema_version 1). The canonical
rendering produced by :func:`render_config` sorts keys and materializes
every default, so rendering the same config twice is byte-identical and
``parse_config(render_config(cfg)) == cfg``.

Built-in presets cover four figure-replication runs (a heterogeneous
extraversion crowd, an all-0.8 crowd, a normal-life crowd and a plain
BioCrowds crowd, each 50 agents converging on one goal for 1500 ticks)
and the three interactive scenarios (spectator avatar, avatar competing
under BioCrowds rules, avatar competing under comfort/extraversion rules).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Union

from .behaviors import BehaviorMode, Variant
from .geometry import (
    Rect,
    circle_polygon,
    contains_point,
    rect_polygon,
    region_clear_of_obstacles,
)

SCHEMA_VERSION = 1

DEFAULT_DT = 1.0 / 30.0
DEFAULT_DENSITY = 6.0
DEFAULT_CAPTURE_RADIUS = 2.0
DEFAULT_MAX_SPEED = 1.3
DEFAULT_N_TICKS = 1500


class ConfigError(ValueError):
    """Invalid scenario document; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class AvatarMode(str, Enum):
    NONE = "none"
    SPECTATOR = "spectator"
    COMPETING_AGENT = "competing_agent"


@dataclass(frozen=True)
class RectRegion:
    bounds: Rect

    kind = "rect"


@dataclass(frozen=True)
class CircleRegion:
    center: tuple[float, float]
    radius: float

    kind = "circle"


@dataclass(frozen=True)
class RingRegion:
    center: tuple[float, float]
    r_min: float
    r_max: float

    kind = "ring"


Region = Union[RectRegion, CircleRegion, RingRegion]


@dataclass(frozen=True)
class SpawnGroup:
    count: int
    region: Region
    extraversion: float = 1.0
    profile_label: str = "crowd"
    goal_index: int = 0


@dataclass(frozen=True)
class AvatarConfig:
    position: tuple[float, float]
    max_speed: float = DEFAULT_MAX_SPEED
    capture_radius: float = DEFAULT_CAPTURE_RADIUS
    extraversion: float = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    world: Rect
    spawn_groups: tuple[SpawnGroup, ...]
    goals: tuple[tuple[float, float], ...]
    obstacles: tuple[tuple[tuple[float, float], ...], ...] = ()
    marker_density: float = DEFAULT_DENSITY
    seed: int = 0
    dt: float = DEFAULT_DT
    mode: BehaviorMode = field(default_factory=BehaviorMode)
    avatar_mode: AvatarMode = AvatarMode.NONE
    avatar: AvatarConfig | None = None
    n_ticks: int = DEFAULT_N_TICKS
    capture_radius: float = DEFAULT_CAPTURE_RADIUS
    max_speed: float = DEFAULT_MAX_SPEED

    @property
    def n_agents(self) -> int:
        return sum(g.count for g in self.spawn_groups)


# --- parsing -----------------------------------------------------------------

def _require(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return obj[key]

def _check_known(obj: dict, known: set[str], path: str) -> None:
    for key in obj:
        if key not in known:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown field")

def _as_point(value: Any, path: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(path, f"expected [x, y], got {value!r}")
    try:
        return (float(value[0]), float(value[1]))
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected numeric pair, got {value!r}") from None

def _as_number(value: Any, path: str, lo: float | None = None, hi: float | None = None) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(path, f"expected a number, got {value!r}")
    v = float(value)
    if lo is not None and v < lo:
        raise ConfigError(path, f"must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(path, f"must be <= {hi}, got {v}")
    return v

def _as_int(value: Any, path: str, lo: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(path, f"must be >= {lo}, got {value}")
    return value


def _parse_region(obj: Any, path: str) -> Region:
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected a region object")
    kind = _require(obj, "kind", path)
    if kind == "rect":
        _check_known(obj, {"kind", "bounds"}, path)
        b = _require(obj, "bounds", path)
        if not isinstance(b, (list, tuple)) or len(b) != 4:
            raise ConfigError(f"{path}.bounds", "expected [xmin, ymin, xmax, ymax]")
        bounds = tuple(float(v) for v in b)
        if bounds[2] <= bounds[0] or bounds[3] <= bounds[1]:
            raise ConfigError(f"{path}.bounds", f"degenerate rectangle {bounds}")
        return RectRegion(bounds)  # type: ignore[arg-type]
    if kind == "circle":
        _check_known(obj, {"kind", "center", "radius"}, path)
        return CircleRegion(
            center=_as_point(_require(obj, "center", path), f"{path}.center"),
            radius=_as_number(_require(obj, "radius", path), f"{path}.radius", lo=0.0),
        )
    if kind == "ring":
        _check_known(obj, {"kind", "center", "r_min", "r_max"}, path)
        r_min = _as_number(_require(obj, "r_min", path), f"{path}.r_min", lo=0.0)
        r_max = _as_number(_require(obj, "r_max", path), f"{path}.r_max", lo=0.0)
        if r_max < r_min:
            raise ConfigError(f"{path}.r_max", f"must be >= r_min ({r_min}), got {r_max}")
        return RingRegion(
            center=_as_point(_require(obj, "center", path), f"{path}.center"),
            r_min=r_min,
            r_max=r_max,
        )
    raise ConfigError(f"{path}.kind", f"unknown region kind {kind!r}")


def _region_shape(region: Region):
    if isinstance(region, RectRegion):
        return rect_polygon(region.bounds)
    if isinstance(region, CircleRegion):
        return circle_polygon(region.center, region.radius)
    return circle_polygon(region.center, region.r_max)


def _parse_mode(obj: Any, path: str) -> BehaviorMode:
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected a mode object")
    _check_known(obj, {"variant", "marker_cap"}, path)
    variant_name = obj.get("variant", Variant.BIOCROWDS.value)
    try:
        variant = Variant(variant_name)
    except ValueError:
        valid = ", ".join(v.value for v in Variant)
        raise ConfigError(f"{path}.variant", f"expected one of {valid}, got {variant_name!r}") from None
    cap = _as_int(obj.get("marker_cap", BehaviorMode().marker_cap), f"{path}.marker_cap", lo=1)
    return BehaviorMode(variant=variant, marker_cap=cap)


_TOP_LEVEL_FIELDS = {
    "schema_version", "world", "obstacles", "marker_density", "seed", "dt",
    "mode", "spawn_groups", "goals", "avatar_mode", "avatar", "n_ticks",
    "capture_radius", "max_speed",
}


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate a scenario JSON document.

    Missing optional fields take their documented defaults; any violation
    raises :class:`ConfigError` naming the offending field path.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("$", f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError("$", "top level must be an object")
    _check_known(doc, _TOP_LEVEL_FIELDS, "")

    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {version!r}")

    w = _require(doc, "world", "")
    if not isinstance(w, (list, tuple)) or len(w) != 4:
        raise ConfigError("world", "expected [xmin, ymin, xmax, ymax]")
    world: Rect = tuple(float(v) for v in w)  # type: ignore[assignment]
    if world[2] <= world[0] or world[3] <= world[1]:
        raise ConfigError("world", f"degenerate bounds {world}")

    obstacles = []
    for i, poly in enumerate(doc.get("obstacles", [])):
        if not isinstance(poly, (list, tuple)) or len(poly) < 3:
            raise ConfigError(f"obstacles[{i}]", "expected a polygon of >= 3 points")
        obstacles.append(tuple(_as_point(p, f"obstacles[{i}][{j}]") for j, p in enumerate(poly)))

    goals_raw = _require(doc, "goals", "")
    if not isinstance(goals_raw, (list, tuple)) or not goals_raw:
        raise ConfigError("goals", "expected a non-empty list of points")
    goals = tuple(_as_point(g, f"goals[{i}]") for i, g in enumerate(goals_raw))
    for i, g in enumerate(goals):
        if not contains_point(world, g):
            raise ConfigError(f"goals[{i}]", f"goal {g} lies outside the world")

    groups_raw = _require(doc, "spawn_groups", "")
    if not isinstance(groups_raw, (list, tuple)) or not groups_raw:
        raise ConfigError("spawn_groups", "expected a non-empty list")
    groups = []
    world_shape = rect_polygon(world)
    obstacle_lists = [list(p) for p in obstacles]
    for i, g in enumerate(groups_raw):
        path = f"spawn_groups[{i}]"
        if not isinstance(g, dict):
            raise ConfigError(path, "expected an object")
        _check_known(g, {"count", "region", "extraversion", "profile_label", "goal_index"}, path)
        region = _parse_region(_require(g, "region", path), f"{path}.region")
        goal_index = _as_int(g.get("goal_index", 0), f"{path}.goal_index", lo=0)
        if goal_index >= len(goals):
            raise ConfigError(f"{path}.goal_index", f"no goal {goal_index} (have {len(goals)})")
        shape = _region_shape(region)
        if not world_shape.buffer(1e-9).contains(shape):
            raise ConfigError(f"{path}.region", "spawn region extends outside the world")
        if not region_clear_of_obstacles(shape, obstacle_lists):
            raise ConfigError(f"{path}.region", "spawn region overlaps an obstacle")
        groups.append(
            SpawnGroup(
                count=_as_int(_require(g, "count", path), f"{path}.count", lo=1),
                region=region,
                extraversion=_as_number(g.get("extraversion", 1.0), f"{path}.extraversion", 0.0, 1.0),
                profile_label=str(g.get("profile_label", "crowd")),
                goal_index=goal_index,
            )
        )

    avatar_mode_raw = doc.get("avatar_mode", AvatarMode.NONE.value)
    try:
        avatar_mode = AvatarMode(avatar_mode_raw)
    except ValueError:
        valid = ", ".join(m.value for m in AvatarMode)
        raise ConfigError("avatar_mode", f"expected one of {valid}, got {avatar_mode_raw!r}") from None

    avatar = None
    avatar_raw = doc.get("avatar")
    if avatar_raw is not None:
        if not isinstance(avatar_raw, dict):
            raise ConfigError("avatar", "expected an object or null")
        _check_known(avatar_raw, {"position", "max_speed", "capture_radius", "extraversion"}, "avatar")
        pos = _as_point(_require(avatar_raw, "position", "avatar"), "avatar.position")
        if not contains_point(world, pos):
            raise ConfigError("avatar.position", f"position {pos} lies outside the world")
        avatar = AvatarConfig(
            position=pos,
            max_speed=_as_number(avatar_raw.get("max_speed", DEFAULT_MAX_SPEED), "avatar.max_speed", lo=0.0),
            capture_radius=_as_number(
                avatar_raw.get("capture_radius", DEFAULT_CAPTURE_RADIUS), "avatar.capture_radius", lo=0.0
            ),
            extraversion=_as_number(avatar_raw.get("extraversion", 1.0), "avatar.extraversion", 0.0, 1.0),
        )
    if avatar_mode != AvatarMode.NONE and avatar is None:
        raise ConfigError("avatar", f"avatar_mode {avatar_mode.value!r} requires an avatar object")

    return ScenarioConfig(
        world=world,
        obstacles=tuple(obstacles),
        marker_density=_as_number(doc.get("marker_density", DEFAULT_DENSITY), "marker_density") ,
        seed=_as_int(doc.get("seed", 0), "seed"),
        dt=_as_number(doc.get("dt", DEFAULT_DT), "dt"),
        mode=_parse_mode(doc.get("mode", {}), "mode"),
        spawn_groups=tuple(groups),
        goals=goals,
        avatar_mode=avatar_mode,
        avatar=avatar,
        n_ticks=_as_int(doc.get("n_ticks", DEFAULT_N_TICKS), "n_ticks", lo=0),
        capture_radius=_as_number(doc.get("capture_radius", DEFAULT_CAPTURE_RADIUS), "capture_radius"),
        max_speed=_as_number(doc.get("max_speed", DEFAULT_MAX_SPEED), "max_speed"),
    )


def _validate_numbers(config: ScenarioConfig) -> None:
    if config.marker_density <= 0:
        raise ConfigError("marker_density", f"must be > 0, got {config.marker_density}")
    if config.dt <= 0:
        raise ConfigError("dt", f"must be > 0, got {config.dt}")
    if config.capture_radius <= 0:
        raise ConfigError("capture_radius", f"must be > 0, got {config.capture_radius}")
    if config.max_speed <= 0:
        raise ConfigError("max_speed", f"must be > 0, got {config.max_speed}")


# --- rendering ---------------------------------------------------------------

def _region_payload(region: Region) -> dict:
    if isinstance(region, RectRegion):
        return {"kind": "rect", "bounds": list(region.bounds)}
    if isinstance(region, CircleRegion):
        return {"kind": "circle", "center": list(region.center), "radius": region.radius}
    return {
        "kind": "ring",
        "center": list(region.center),
        "r_min": region.r_min,
        "r_max": region.r_max,
    }


def config_payload(config: ScenarioConfig) -> dict:
    """The fully-materialized JSON-ready form of a config (all defaults explicit)."""
    return {
        "schema_version": SCHEMA_VERSION,
        "world": list(config.world),
        "obstacles": [[list(p) for p in poly] for poly in config.obstacles],
        "marker_density": config.marker_density,
        "seed": config.seed,
        "dt": config.dt,
        "mode": {"variant": config.mode.variant.value, "marker_cap": config.mode.marker_cap},
        "spawn_groups": [
            {
                "count": g.count,
                "region": _region_payload(g.region),
                "extraversion": g.extraversion,
                "profile_label": g.profile_label,
                "goal_index": g.goal_index,
            }
            for g in config.spawn_groups
        ],
        "goals": [list(g) for g in config.goals],
        "avatar_mode": config.avatar_mode.value,
        "avatar": None
        if config.avatar is None
        else {
            "position": list(config.avatar.position),
            "max_speed": config.avatar.max_speed,
            "capture_radius": config.avatar.capture_radius,
            "extraversion": config.avatar.extraversion,
        },
        "n_ticks": config.n_ticks,
        "capture_radius": config.capture_radius,
        "max_speed": config.max_speed,
    }


def render_config(config: ScenarioConfig) -> str:
    """Canonical JSON rendering: sorted keys, no extra whitespace, all defaults written."""
    _validate_numbers(config)
    return json.dumps(config_payload(config), sort_keys=True, separators=(",", ":")) + "\n"


# --- presets -----------------------------------------------------------------

FIGURE_WORLD: Rect = (0.0, 0.0, 30.0, 30.0)
FIGURE_GOAL = (15.0, 15.0)
FIGURE_RING = RingRegion(center=FIGURE_GOAL, r_min=8.0, r_max=12.0)

LABEL_E10 = "E=1.0"
LABEL_E08 = "E=0.8"

# Corridor layout for the interactive scenarios: the crowd enters one end
# and walks to a goal near the other end; the avatar starts just behind it.
SCENARIO_WORLD: Rect = (0.0, 0.0, 30.0, 12.0)
SCENARIO_GOAL = (26.0, 6.0)
SCENARIO_SPAWN = RectRegion((2.0, 1.0, 10.0, 11.0))
SCENARIO_AVATAR = AvatarConfig(position=(3.0, 6.0))


def _figure_preset(mode: BehaviorMode, groups: tuple[SpawnGroup, ...]) -> ScenarioConfig:
    return ScenarioConfig(
        world=FIGURE_WORLD,
        spawn_groups=groups,
        goals=(FIGURE_GOAL,),
        mode=mode,
        n_ticks=1500,
    )


def _hetero_groups(region: Region = FIGURE_RING) -> tuple[SpawnGroup, ...]:
    return (
        SpawnGroup(count=25, region=region, extraversion=1.0, profile_label=LABEL_E10),
        SpawnGroup(count=25, region=region, extraversion=0.8, profile_label=LABEL_E08),
    )


def _scenario_preset(
    mode: BehaviorMode, avatar_mode: AvatarMode, groups: tuple[SpawnGroup, ...]
) -> ScenarioConfig:
    return ScenarioConfig(
        world=SCENARIO_WORLD,
        spawn_groups=groups,
        goals=(SCENARIO_GOAL,),
        mode=mode,
        avatar_mode=avatar_mode,
        avatar=SCENARIO_AVATAR,
        n_ticks=1500,
    )


def _build_presets() -> dict[str, ScenarioConfig]:
    extraversion = BehaviorMode(Variant.EXTRAVERSION)
    normal_life = BehaviorMode(Variant.NORMAL_LIFE)
    biocrowds = BehaviorMode(Variant.BIOCROWDS)
    scenario_groups = (
        SpawnGroup(count=25, region=SCENARIO_SPAWN, extraversion=1.0, profile_label=LABEL_E10),
        SpawnGroup(count=25, region=SCENARIO_SPAWN, extraversion=0.8, profile_label=LABEL_E08),
    )
    return {
        "fig2_hetero": _figure_preset(extraversion, _hetero_groups()),
        "fig3_homo_e08": _figure_preset(
            extraversion,
            (SpawnGroup(count=50, region=FIGURE_RING, extraversion=0.8, profile_label=LABEL_E08),),
        ),
        "fig4_normal_life": _figure_preset(
            normal_life,
            (SpawnGroup(count=50, region=FIGURE_RING, extraversion=1.0, profile_label="crowd"),),
        ),
        "fig5_biocrowds": _figure_preset(
            biocrowds,
            (SpawnGroup(count=50, region=FIGURE_RING, extraversion=1.0, profile_label="crowd"),),
        ),
        "scenario1": _scenario_preset(extraversion, AvatarMode.SPECTATOR, scenario_groups),
        "scenario2": _scenario_preset(biocrowds, AvatarMode.COMPETING_AGENT, scenario_groups),
        "scenario3": _scenario_preset(extraversion, AvatarMode.COMPETING_AGENT, scenario_groups),
    }


_PRESETS = _build_presets()

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset(name: str, seed: int | None = None, n_ticks: int | None = None) -> ScenarioConfig:
    """Return a built-in scenario by name, optionally overriding seed / tick count."""
    try:
        config = _PRESETS[name]
    except KeyError:
        raise ConfigError(
            "preset", f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}"
        ) from None
    if seed is not None:
        config = replace(config, seed=seed)
    if n_ticks is not None:
        config = replace(config, n_ticks=n_ticks)
    return config
