"""Frame records, trajectory files, and determinism hashing.

A trajectory file is line-delimited JSON. The first line is always a
header:

    {"type": "trajectory-header", "schema_version": 1, "config": ... | null}

followed by one line per frame:

    {"type": "frame", "tick": T,
     "agents": [[id, x, y, comfort, n_markers, extraversion, label], ...],
     "avatar": [x, y, participation] | null}

Field order is fixed, so identical runs serialize byte-identically.
Comfort and marker counts in a frame are those of the auction that
produced it; the tick-0 frame predates any auction and reports zeros.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, NamedTuple

from .config import ScenarioConfig, config_payload, parse_config

POSITION_QUANTUM = 1e-6  # meters; positions are rounded to this before hashing


class AgentState(NamedTuple):
    id: int
    x: float
    y: float
    comfort: float
    n_markers: int
    extraversion: float
    label: str

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


class AvatarState(NamedTuple):
    x: float
    y: float
    participation: str

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


class FrameRecord(NamedTuple):
    tick: int
    agents: tuple[AgentState, ...]
    avatar: AvatarState | None


def frame_from_state(state) -> FrameRecord:
    """Snapshot an engine state (anything with its array fields) into a record."""
    agents = tuple(
        AgentState(
            id=i,
            x=float(state.positions[i, 0]),
            y=float(state.positions[i, 1]),
            comfort=float(state.comfort[i]),
            n_markers=int(state.n_assigned[i]),
            extraversion=float(state.extraversion[i]),
            label=state.labels[i],
        )
        for i in range(len(state.positions))
    )
    avatar = None
    if state.avatar_position is not None:
        avatar = AvatarState(
            x=float(state.avatar_position[0]),
            y=float(state.avatar_position[1]),
            participation=state.participation.value,
        )
    return FrameRecord(tick=state.tick, agents=agents, avatar=avatar)


# --- trajectory files --------------------------------------------------------

def _frame_line(frame: FrameRecord) -> str:
    payload = {
        "type": "frame",
        "tick": frame.tick,
        "agents": [list(a) for a in frame.agents],
        "avatar": None if frame.avatar is None else list(frame.avatar),
    }
    return json.dumps(payload, separators=(",", ":"))


def export_trajectories(
    frames: Iterable[FrameRecord], path: str | Path, config: ScenarioConfig | None = None
) -> None:
    """Write a header line plus one line per frame, in tick order."""
    header = {
        "type": "trajectory-header",
        "schema_version": 1,
        "config": None if config is None else config_payload(config),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for frame in frames:
            fh.write(_frame_line(frame) + "\n")


def import_trajectories(path: str | Path) -> tuple[ScenarioConfig | None, list[FrameRecord]]:
    """Parse a trajectory file back into its config (if recorded) and frames."""
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise ValueError(f"{path}: empty file, expected a trajectory header")
        header = json.loads(header_line)
        if header.get("type") != "trajectory-header":
            raise ValueError(f"{path}: first line is not a trajectory header")
        if header.get("schema_version") != 1:
            raise ValueError(f"{path}: unsupported schema_version {header.get('schema_version')!r}")
        config = None
        if header.get("config") is not None:
            config = parse_config(json.dumps(header["config"]))
        frames = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            doc = json.loads(line)
            if doc.get("type") != "frame":
                raise ValueError(f"{path}:{lineno}: expected a frame record")
            agents = tuple(
                AgentState(int(a[0]), float(a[1]), float(a[2]), float(a[3]), int(a[4]), float(a[5]), str(a[6]))
                for a in doc["agents"]
            )
            avatar = None
            if doc.get("avatar") is not None:
                ax, ay, mode = doc["avatar"]
                avatar = AvatarState(float(ax), float(ay), str(mode))
            frames.append(FrameRecord(tick=int(doc["tick"]), agents=agents, avatar=avatar))
    return config, frames


# --- determinism hash --------------------------------------------------------

def _quantize(value: float) -> int:
    return round(value / POSITION_QUANTUM)


def state_hash(frames: Iterable[FrameRecord]) -> str:
    """Order-sensitive SHA-256 over quantized positions.

    Positions are rounded to 1e-6 m first, so the digest is stable against
    sub-micrometer formatting noise while still distinguishing runs whose
    trajectories differ by 1e-5 m or more. An empty frame list hashes the
    empty string.
    """
    digest = hashlib.sha256()
    for frame in frames:
        parts = [str(frame.tick)]
        parts.extend(f"{a.id},{_quantize(a.x)},{_quantize(a.y)}" for a in frame.agents)
        if frame.avatar is not None:
            parts.append(f"avatar,{_quantize(frame.avatar.x)},{_quantize(frame.avatar.y)}")
        digest.update(";".join(parts).encode("ascii"))
        digest.update(b"\n")
    return digest.hexdigest()
