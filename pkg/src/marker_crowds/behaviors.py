"""Marker-weighting rules that turn an agent's claimed markers into motion.

Three rules are provided, each a pure function over (goal direction, marker
offsets):

* ``biocrowds_weights`` — classic BioCrowds: markers aligned with the goal
  and close to the agent dominate, weights normalized to sum to 1.
* ``normal_life_weights`` — comfort-biased weights: as an agent's claimed
  marker count drops below the saturation cap, its weights flatten toward
  uniform, pulling it toward open space instead of the goal.
* ``extraversion_weights`` — extraversion-scaled comfort weights: high
  extraversion keeps the goal term and suppresses the space-seeking term,
  low extraversion does the opposite.

All functions are stateless; the engine applies them per agent per tick and
clamps the resulting motion vector to the agent's speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

DEFAULT_MARKER_CAP = 70


class Variant(str, Enum):
    BIOCROWDS = "biocrowds"
    NORMAL_LIFE = "normal_life"
    EXTRAVERSION = "extraversion"


@dataclass(frozen=True)
class BehaviorMode:
    """Which weighting rule the crowd runs, plus the comfort saturation cap."""

    variant: Variant = Variant.BIOCROWDS
    marker_cap: int = DEFAULT_MARKER_CAP

    def __post_init__(self) -> None:
        if self.marker_cap < 1:
            raise ValueError(f"marker_cap must be >= 1, got {self.marker_cap}")


@dataclass(frozen=True)
class WeightedMarker:
    """A claimed marker seen from its owner: offset from the agent plus weight."""

    marker_id: int
    offset: tuple[float, float]
    weight: float = 0.0


def alignment_falloff(goal_dir: tuple[float, float], offset: tuple[float, float]) -> float:
    """Score a marker offset against the goal direction: (1 + cos theta) / (1 + |offset|).

    Maximal (2.0) for a marker on top of the agent in the goal direction,
    zero for a marker directly behind, decreasing in both angle and distance.
    A zero offset counts as perfectly aligned. A zero goal direction drops
    the angular term and leaves the pure distance falloff 1 / (1 + |offset|).
    """
    ox, oy = offset
    dist = math.hypot(ox, oy)
    gx, gy = goal_dir
    gnorm = math.hypot(gx, gy)
    if gnorm == 0.0:
        return 1.0 / (1.0 + dist)
    if dist == 0.0:
        cos_theta = 1.0
    else:
        cos_theta = (gx * ox + gy * oy) / (gnorm * dist)
        cos_theta = max(-1.0, min(1.0, cos_theta))
    return (1.0 + cos_theta) / (1.0 + dist)


def biocrowds_weights(
    goal_dir: tuple[float, float], markers: Sequence[WeightedMarker]
) -> list[WeightedMarker]:
    """Normalized goal-alignment weights; sum to 1 over any non-empty marker set.

    If every marker scores zero (all directly behind the agent) the weights
    fall back to uniform so the agent can still be steered by comfort rules.
    """
    if not markers:
        return []
    scores = [alignment_falloff(goal_dir, m.offset) for m in markers]
    total = sum(scores)
    if total == 0.0:
        uniform = 1.0 / len(markers)
        return [replace(m, weight=uniform) for m in markers]
    return [replace(m, weight=s / total) for m, s in zip(markers, scores)]


def comfort(n_markers: int, cap: int = DEFAULT_MARKER_CAP) -> float:
    """Comfort of an agent holding ``n_markers``: count over cap, clamped to [0, 1]."""
    if n_markers < 0:
        raise ValueError(f"n_markers must be >= 0, got {n_markers}")
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    return min(n_markers / cap, 1.0)


def comfort_bias(c: float) -> float:
    """Interpolation factor sin(c * pi/2): 0 at no comfort, 1 at full comfort."""
    return math.sin(c * (math.pi / 2.0))


def normal_life_weights(
    base_weights: Sequence[WeightedMarker], bias: float
) -> list[WeightedMarker]:
    """Blend normalized weights with a uniform pull: w' = bias * w + (1 - bias).

    At bias 1 this is pure goal-seeking; at bias 0 every marker pulls equally,
    which steers the agent toward whatever space is open. Weights are not
    renormalized; the engine's speed clamp absorbs the changed magnitude.
    """
    return [replace(m, weight=bias * m.weight + (1.0 - bias)) for m in base_weights]


def extraversion_weights(
    base_weights: Sequence[WeightedMarker], bias: float, extraversion: float
) -> list[WeightedMarker]:
    """Extraversion-scaled comfort blend: w'' = bias * w * E + (1 - bias) * (1 - E).

    E = 1 keeps only the (comfort-scaled) goal term; E = 0 keeps only the
    space-seeking term. Values outside [0.8, 1.0] are accepted, but low E
    trades goal progress for personal space aggressively.
    """
    goal_scale = extraversion
    space_scale = 1.0 - extraversion
    return [
        replace(m, weight=bias * m.weight * goal_scale + (1.0 - bias) * space_scale)
        for m in base_weights
    ]


def motion_vector(weighted: Sequence[WeightedMarker]) -> tuple[float, float]:
    """Weighted sum of marker offsets; the zero vector when no markers are held."""
    mx = 0.0
    my = 0.0
    for m in weighted:
        mx += m.weight * m.offset[0]
        my += m.weight * m.offset[1]
    return (mx, my)
