"""Group statistics over recorded frames.

These quantify how much space a labeled group occupies: mean distance to
its goal, mean pairwise spread, convex-hull area, and mean nearest-neighbor
distance. Comparisons between groups (for example high versus low
extraversion) use orderings of these values, never absolute magnitudes.

The metrics CSV has a fixed header row and one row per (tick, group):

    tick,profile_label,n_agents,mean_dist_to_goal,mean_intra_pairwise_dist,
    convex_hull_area,mean_nearest_neighbor_dist
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .recording import FrameRecord

CSV_COLUMNS = (
    "tick",
    "profile_label",
    "n_agents",
    "mean_dist_to_goal",
    "mean_intra_pairwise_dist",
    "convex_hull_area",
    "mean_nearest_neighbor_dist",
)


@dataclass(frozen=True)
class GroupMetrics:
    profile_label: str
    n_agents: int
    mean_dist_to_goal: float
    mean_intra_pairwise_dist: float
    convex_hull_area: float
    mean_nearest_neighbor_dist: float


def convex_hull_area(points: np.ndarray) -> float:
    """Area of the convex hull by the monotone-chain construction.

    Collinear boundary points are excluded from the hull; fewer than three
    distinct non-collinear points have area 0.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) < 3:
        return 0.0
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def cross(o, a, b) -> float:
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(chain: Sequence[np.ndarray]) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for p in chain:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= 0.0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return 0.0
    xs = np.array([p[0] for p in hull])
    ys = np.array([p[1] for p in hull])
    # shoelace formula over the hull vertices in counter-clockwise order
    return 0.5 * abs(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1)))


def _pairwise_distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def compute_group_metrics(
    frame: FrameRecord, profile_label: str, goal: tuple[float, float]
) -> GroupMetrics:
    """Euclidean statistics for one labeled group in one frame."""
    points = np.array([(a.x, a.y) for a in frame.agents if a.label == profile_label])
    if len(points) == 0:
        known = sorted({a.label for a in frame.agents})
        raise ValueError(f"no agents labeled {profile_label!r} in frame {frame.tick}; labels: {known}")

    dist_to_goal = np.linalg.norm(points - np.asarray(goal), axis=1)
    if len(points) > 1:
        d = _pairwise_distances(points)
        upper = d[np.triu_indices(len(points), k=1)]
        mean_pairwise = float(upper.mean())
        np.fill_diagonal(d, np.inf)
        mean_nn = float(d.min(axis=1).mean())
    else:
        mean_pairwise = 0.0
        mean_nn = 0.0

    return GroupMetrics(
        profile_label=profile_label,
        n_agents=len(points),
        mean_dist_to_goal=float(dist_to_goal.mean()),
        mean_intra_pairwise_dist=mean_pairwise,
        convex_hull_area=convex_hull_area(points),
        mean_nearest_neighbor_dist=mean_nn,
    )


def frame_labels(frame: FrameRecord) -> list[str]:
    """Distinct profile labels in spawn order."""
    seen: dict[str, None] = {}
    for a in frame.agents:
        seen.setdefault(a.label, None)
    return list(seen)


def metrics_rows(
    frames: Sequence[FrameRecord], ticks: Iterable[int], goal: tuple[float, float]
) -> list[tuple[int, GroupMetrics]]:
    """Metrics for every group at each requested tick (frame index = tick)."""
    by_tick = {f.tick: f for f in frames}
    out = []
    for tick in ticks:
        if tick not in by_tick:
            raise ValueError(f"no frame recorded for tick {tick}")
        frame = by_tick[tick]
        for label in frame_labels(frame):
            out.append((tick, compute_group_metrics(frame, label, goal)))
    return out


def write_metrics_csv(
    frames: Sequence[FrameRecord],
    ticks: Iterable[int],
    goal: tuple[float, float],
    path: str | Path,
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for tick, gm in metrics_rows(frames, ticks, goal):
            writer.writerow(
                [
                    tick,
                    gm.profile_label,
                    gm.n_agents,
                    repr(gm.mean_dist_to_goal),
                    repr(gm.mean_intra_pairwise_dist),
                    repr(gm.convex_hull_area),
                    repr(gm.mean_nearest_neighbor_dist),
                ]
            )
