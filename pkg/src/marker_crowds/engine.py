"""Simulation core: marker auction, per-tick stepping, and headless runs.

Each tick every marker is auctioned to the nearest competitor within that
competitor's capture radius (ties go to the lowest competitor id, and the
avatar's id is -1 so it wins ties). Weights over the captured markers are
computed by the scenario's behavior rule, the weighted offsets are summed
into a motion vector, and the displacement is clamped to max_speed * dt.
All positions update simultaneously from the pre-step state, so the result
is independent of agent ordering. An agent holding no markers does not
move.

The hot path is fully vectorized over (competitor, marker) pairs; the
per-marker functions in :mod:`.behaviors` define the same arithmetic one
marker at a time and serve as the reference implementation in tests.

States are values: :func:`step` returns a new ``SimState`` and never
mutates its argument, so snapshots can be handed to recorders or a server
thread without copying.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Mapping

import numpy as np

from .behaviors import Variant
from .config import (
    AvatarMode,
    CircleRegion,
    RectRegion,
    RingRegion,
    ScenarioConfig,
)
from .markers import MarkerField, generate_markers

AVATAR_ID = -1

_RULE_OF_VARIANT = {
    Variant.BIOCROWDS: 0,
    Variant.NORMAL_LIFE: 1,
    Variant.EXTRAVERSION: 2,
}

_EMPTY_IDS = np.empty(0, dtype=np.int64)


class Participation(str, Enum):
    """How the avatar relates to the auction."""

    SPECTATOR = "spectator"
    BIOCROWDS_AGENT = "biocrowds_agent"
    NORMAL_LIFE_AGENT = "normal_life_agent"


@dataclass(frozen=True)
class Agent:
    """Read-only snapshot of one crowd agent at a given tick."""

    id: int
    position: tuple[float, float]
    goal: tuple[float, float]
    capture_radius: float
    max_speed: float
    extraversion: float
    comfort: float
    assigned_markers: tuple[int, ...]
    profile_label: str


@dataclass(frozen=True)
class Avatar:
    """Read-only snapshot of the human-steered entity."""

    position: tuple[float, float]
    input_dir: tuple[float, float]
    max_speed: float
    capture_radius: float
    extraversion: float
    comfort: float
    participation: Participation
    assigned_markers: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SimState:
    """Complete simulation state at one tick.

    Array fields are indexed by agent id (0..n-1). The winning
    (competitor id, marker id) pairs of the auction that produced this
    state are kept as two parallel arrays; ``assignments`` groups them
    into a mapping on demand. Both are None at tick 0, before any auction.
    Arrays are shared between successive states and must be treated as
    immutable.
    """

    config: ScenarioConfig
    field: MarkerField
    tick: int
    positions: np.ndarray        # (n, 2) float64
    goals: np.ndarray            # (n, 2) float64
    extraversion: np.ndarray     # (n,) float64
    comfort: np.ndarray          # (n,) float64
    n_assigned: np.ndarray       # (n,) int64
    labels: tuple[str, ...]
    holder_ids: np.ndarray | None = None   # competitor id per captured marker
    held_markers: np.ndarray | None = None  # marker ids, ascending
    avatar_position: np.ndarray | None = None   # (2,) float64
    avatar_input: tuple[float, float] = (0.0, 0.0)
    avatar_comfort: float = 0.0
    avatar_n_assigned: int = 0
    participation: Participation | None = None

    @property
    def n_agents(self) -> int:
        return len(self.positions)

    @property
    def avatar_competes(self) -> bool:
        return self.participation in (Participation.BIOCROWDS_AGENT, Participation.NORMAL_LIFE_AGENT)

    @property
    def assignments(self) -> dict[int, np.ndarray]:
        """Competitor id (avatar: -1) -> captured marker ids, ascending.

        Complete over all competitors of the producing auction; empty dict
        at tick 0.
        """
        if self.holder_ids is None or self.held_markers is None:
            return {}
        out = {i: _EMPTY_IDS for i in range(self.n_agents)}
        if self.avatar_competes:
            out[AVATAR_ID] = _EMPTY_IDS
        order = np.argsort(self.holder_ids, kind="stable")
        grouped = self.holder_ids[order]
        uniq, starts = np.unique(grouped, return_index=True)
        markers = self.held_markers[order]
        bounds = np.append(starts[1:], len(grouped))
        for cid, lo, hi in zip(uniq, starts, bounds):
            out[int(cid)] = markers[lo:hi]
        return out

    @property
    def agents(self) -> list[Agent]:
        config = self.config
        held = self.assignments
        out = []
        for i in range(self.n_agents):
            mine = held.get(i, _EMPTY_IDS)
            out.append(
                Agent(
                    id=i,
                    position=(float(self.positions[i, 0]), float(self.positions[i, 1])),
                    goal=(float(self.goals[i, 0]), float(self.goals[i, 1])),
                    capture_radius=config.capture_radius,
                    max_speed=config.max_speed,
                    extraversion=float(self.extraversion[i]),
                    comfort=float(self.comfort[i]),
                    assigned_markers=tuple(int(m) for m in mine),
                    profile_label=self.labels[i],
                )
            )
        return out

    @property
    def avatar(self) -> Avatar | None:
        if self.avatar_position is None:
            return None
        cfg = self.config.avatar
        assert cfg is not None and self.participation is not None
        mine = self.assignments.get(AVATAR_ID, _EMPTY_IDS)
        return Avatar(
            position=(float(self.avatar_position[0]), float(self.avatar_position[1])),
            input_dir=self.avatar_input,
            max_speed=cfg.max_speed,
            capture_radius=cfg.capture_radius,
            extraversion=cfg.extraversion,
            comfort=self.avatar_comfort,
            participation=self.participation,
            assigned_markers=tuple(int(m) for m in mine),
        )


# --- state construction ------------------------------------------------------

def _sample_region(region, count: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(region, RectRegion):
        xmin, ymin, xmax, ymax = region.bounds
        return rng.uniform((xmin, ymin), (xmax, ymax), size=(count, 2))
    if isinstance(region, CircleRegion):
        # sqrt keeps the sample uniform in area rather than in radius
        r = region.radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    elif isinstance(region, RingRegion):
        r = np.sqrt(rng.uniform(region.r_min**2, region.r_max**2, count))
    else:
        raise TypeError(f"unknown region type {type(region).__name__}")
    theta = rng.uniform(0.0, 2.0 * np.pi, count)
    cx, cy = region.center
    return np.column_stack((cx + r * np.cos(theta), cy + r * np.sin(theta)))


def _participation_for(config: ScenarioConfig) -> Participation | None:
    if config.avatar_mode == AvatarMode.NONE:
        return None
    if config.avatar_mode == AvatarMode.SPECTATOR:
        return Participation.SPECTATOR
    if config.mode.variant == Variant.BIOCROWDS:
        return Participation.BIOCROWDS_AGENT
    return Participation.NORMAL_LIFE_AGENT


def build_state(config: ScenarioConfig) -> SimState:
    """Generate the marker field, spawn all agents, and return the tick-0 state.

    Markers and spawn positions draw from independent streams of the
    scenario seed, so the same config always reproduces the same state.
    """
    field = generate_markers(config.world, config.obstacles, config.marker_density, config.seed)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(1,)))

    positions, goals, extraversion, labels = [], [], [], []
    for group in config.spawn_groups:
        positions.append(_sample_region(group.region, group.count, rng))
        goals.append(np.tile(config.goals[group.goal_index], (group.count, 1)))
        extraversion.append(np.full(group.count, group.extraversion))
        labels.extend([group.profile_label] * group.count)
    n = sum(g.count for g in config.spawn_groups)

    participation = _participation_for(config)
    avatar_position = None
    if participation is not None:
        assert config.avatar is not None
        avatar_position = np.asarray(config.avatar.position, dtype=float)

    return SimState(
        config=config,
        field=field,
        tick=0,
        positions=np.concatenate(positions),
        goals=np.concatenate(goals),
        extraversion=np.concatenate(extraversion),
        comfort=np.zeros(n),
        n_assigned=np.zeros(n, dtype=np.int64),
        labels=tuple(labels),
        avatar_position=avatar_position,
        participation=participation,
    )


# --- auction -----------------------------------------------------------------

def _competitors(state: SimState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positions, ids and capture radii of everyone bidding for markers.

    When the avatar competes it occupies row 0 (id -1, the lowest), so
    rows are always in ascending id order; crowd agent i is at row
    i + offset where offset is 1 with a competing avatar and 0 without.
    """
    config = state.config
    n = state.n_agents
    positions = state.positions
    ids = np.arange(n, dtype=np.int64)
    radii = np.full(n, config.capture_radius)
    if state.avatar_competes:
        assert state.avatar_position is not None and config.avatar is not None
        positions = np.vstack((state.avatar_position, positions))
        ids = np.append(AVATAR_ID, ids)
        radii = np.append(config.avatar.capture_radius, radii)
    return positions, ids, radii


def _winning_pairs(
    field: MarkerField, positions: np.ndarray, radii: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Resolve the auction against competitor rows.

    Returns ``(owner_rows, marker_ids, offsets, dists)`` for every captured
    marker, sorted by marker id. Rows must be in ascending competitor-id
    order: the winner is chosen by a stable sort on distance, so an exact
    distance tie falls to the earlier row, which is the lower id.
    """
    field.ensure_index(float(radii.max()))
    candidates = [field.candidates_near(p) for p in positions]
    counts = [len(c) for c in candidates]
    if sum(counts) == 0:
        return _EMPTY_IDS, _EMPTY_IDS, np.empty((0, 2)), np.empty(0)
    rows = np.repeat(np.arange(len(positions)), counts)
    markers = np.concatenate(candidates)

    offsets = field.positions[markers] - positions[rows]
    d2 = np.einsum("ij,ij->i", offsets, offsets)
    keep = d2 <= (radii**2)[rows]
    rows, markers, offsets, d2 = rows[keep], markers[keep], offsets[keep], d2[keep]
    if len(markers) == 0:
        return _EMPTY_IDS, _EMPTY_IDS, np.empty((0, 2)), np.empty(0)

    # scatter-min per marker, then equality picks the winning pairs
    best = np.full(len(field.positions), np.inf)
    np.minimum.at(best, markers, d2)
    win = np.flatnonzero(d2 == best[markers])
    won_markers = markers[win]
    if len(win) > np.count_nonzero(best < np.inf):
        # exact distance tie: keep only the lowest row (= lowest id) per marker
        lowest = np.full(len(field.positions), np.iinfo(np.int64).max)
        np.minimum.at(lowest, won_markers, rows[win])
        win = win[rows[win] == lowest[won_markers]]
        won_markers = markers[win]
    win = win[np.argsort(won_markers)]  # summation happens in marker-id order
    return rows[win], markers[win], offsets[win], np.sqrt(d2[win])


def auction_markers(state: SimState) -> dict[int, np.ndarray]:
    """Assign each marker to its nearest eligible competitor.

    Returns a complete mapping from competitor id (avatar: -1) to the
    captured marker ids, sorted ascending; competitors out of range of
    every marker map to an empty array.
    """
    positions, ids, radii = _competitors(state)
    owner_rows, marker_ids, _, _ = _winning_pairs(state.field, positions, radii)
    probe = replace(state, holder_ids=ids[owner_rows], held_markers=marker_ids)
    return probe.assignments


# --- stepping ----------------------------------------------------------------

def step(state: SimState) -> SimState:
    """Advance one tick: auction, weight, move, and return the new state."""
    config = state.config
    n = state.n_agents
    dt = config.dt
    positions, ids, radii = _competitors(state)
    m = len(positions)
    off = m - n  # 1 when a competing avatar occupies row 0

    owner_rows, marker_ids, offsets, dists = _winning_pairs(state.field, positions, radii)

    goal_dirs = state.goals - state.positions
    extraversion = state.extraversion
    rule = np.full(m, _RULE_OF_VARIANT[config.mode.variant], dtype=np.int8)
    max_step = np.full(m, config.max_speed * dt)
    if off:
        # the avatar's requested direction plays the role of its goal
        assert config.avatar is not None
        goal_dirs = np.vstack((np.asarray(state.avatar_input), goal_dirs))
        extraversion = np.append(config.avatar.extraversion, extraversion)
        rule[0] = 2 if state.participation == Participation.NORMAL_LIFE_AGENT else 0
        max_step[0] = config.avatar.max_speed * dt

    g_pair = goal_dirs[owner_rows]
    g_norm = np.linalg.norm(g_pair, axis=1)

    # alignment falloff (1 + cos) / (1 + dist); a zero goal direction
    # degrades to pure distance falloff, a zero offset counts as aligned
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = np.einsum("ij,ij->i", g_pair, offsets) / (g_norm * dists)
    cos = np.clip(cos, -1.0, 1.0)
    cos[dists == 0.0] = 1.0
    numer = np.where(g_norm > 0.0, 1.0 + cos, 1.0)
    f = numer / (1.0 + dists)

    count = np.bincount(owner_rows, minlength=m)
    sum_f = np.bincount(owner_rows, weights=f, minlength=m)
    sum_pair = sum_f[owner_rows]
    # a vanishing falloff sum falls back to uniform weights over the held markers
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(sum_pair > 0.0, f / sum_pair, 1.0 / count[owner_rows])

    comfort = np.minimum(count / config.mode.marker_cap, 1.0)
    bias = np.sin(comfort * (np.pi / 2.0))

    # per-competitor weighting rule (0 biocrowds, 1 comfort, 2 extraversion)
    b = bias[owner_rows]
    e = extraversion[owner_rows]
    r = rule[owner_rows]
    w_final = np.select(
        [r == 0, r == 1],
        [w, b * w + (1.0 - b)],
        default=b * w * e + (1.0 - b) * (1.0 - e),
    )

    motion = np.empty((m, 2))
    motion[:, 0] = np.bincount(owner_rows, weights=w_final * offsets[:, 0], minlength=m)
    motion[:, 1] = np.bincount(owner_rows, weights=w_final * offsets[:, 1], minlength=m)

    norm = np.linalg.norm(motion, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(norm > max_step, max_step / norm, 1.0)
    displacement = motion * scale[:, None]

    new_positions = state.positions + displacement[off:]

    avatar_position = state.avatar_position
    avatar_comfort = state.avatar_comfort
    avatar_n = state.avatar_n_assigned
    if state.participation == Participation.SPECTATOR:
        assert avatar_position is not None and config.avatar is not None
        move = np.asarray(state.avatar_input) * config.avatar.max_speed * dt
        avatar_position = np.clip(
            avatar_position + move,
            (config.world[0], config.world[1]),
            (config.world[2], config.world[3]),
        )
    elif off:
        # zero input means standing still while still occupying markers
        if state.avatar_input != (0.0, 0.0):
            avatar_position = avatar_position + displacement[0]
        avatar_comfort = float(comfort[0])
        avatar_n = int(count[0])

    return replace(
        state,
        tick=state.tick + 1,
        positions=new_positions,
        comfort=comfort[off:],
        n_assigned=count[off:],
        holder_ids=ids[owner_rows],
        held_markers=marker_ids,
        avatar_position=avatar_position,
        avatar_comfort=avatar_comfort,
        avatar_n_assigned=avatar_n,
    )


def apply_avatar_input(state: SimState, input_dir: tuple[float, float]) -> SimState:
    """Set the avatar's steering direction; it persists until changed.

    Nonzero vectors are normalized to unit length (speed is governed by the
    clamp, not by input magnitude); zero means stand still.
    """
    if state.avatar_position is None:
        raise ValueError("scenario has no avatar")
    dx, dy = float(input_dir[0]), float(input_dir[1])
    norm = math.hypot(dx, dy)
    if norm > 0.0:
        dx, dy = dx / norm, dy / norm
    return replace(state, avatar_input=(dx, dy))


# --- runs --------------------------------------------------------------------

def iter_states(
    config: ScenarioConfig,
    n_ticks: int | None = None,
    trace: Mapping[int, tuple[float, float]] | None = None,
) -> Iterator[SimState]:
    """Yield the tick-0 state and one state per tick.

    ``trace`` maps a tick number to an avatar input that takes effect from
    the step producing that tick onward (entries at or before tick 1 apply
    from the first step); later entries supersede earlier ones.
    """
    if n_ticks is None:
        n_ticks = config.n_ticks
    if n_ticks < 0:
        raise ValueError(f"n_ticks must be >= 0, got {n_ticks}")
    state = build_state(config)
    yield state
    pending = sorted(trace.items()) if trace else []
    cursor = 0
    for tick in range(1, n_ticks + 1):
        while cursor < len(pending) and pending[cursor][0] <= tick:
            state = apply_avatar_input(state, pending[cursor][1])
            cursor += 1
        state = step(state)
        yield state


def run(
    config: ScenarioConfig,
    n_ticks: int | None = None,
    trace: Mapping[int, tuple[float, float]] | None = None,
) -> list:
    """Run headless and return one FrameRecord per state (n_ticks + 1 total)."""
    from .recording import frame_from_state

    return [frame_from_state(s) for s in iter_states(config, n_ticks, trace)]
