"""Small geometry helpers shared by the marker field, config validation and spawning."""

from __future__ import annotations

import numpy as np
import shapely
from shapely.geometry import Point, Polygon, box
from shapely.ops import unary_union

# World bounds as (xmin, ymin, xmax, ymax) in meters.
Rect = tuple[float, float, float, float]


def rect_polygon(bounds: Rect) -> Polygon:
    return box(*bounds)


def obstacle_union(obstacles: list[list[tuple[float, float]]]) -> shapely.Geometry:
    polys = [Polygon(o) for o in obstacles]
    return unary_union(polys) if polys else Polygon()


def free_area(bounds: Rect, obstacles: list[list[tuple[float, float]]]) -> float:
    world = rect_polygon(bounds)
    if not obstacles:
        return world.area
    return world.difference(obstacle_union(obstacles)).area


def contains_point(bounds: Rect, point: tuple[float, float]) -> bool:
    x, y = point
    xmin, ymin, xmax, ymax = bounds
    return xmin <= x <= xmax and ymin <= y <= ymax


def in_free_space(
    bounds: Rect, obstacles: list[list[tuple[float, float]]], points: np.ndarray
) -> np.ndarray:
    """Boolean mask: inside the world bounds and outside every obstacle."""
    xmin, ymin, xmax, ymax = bounds
    inside = (
        (points[:, 0] >= xmin)
        & (points[:, 0] <= xmax)
        & (points[:, 1] >= ymin)
        & (points[:, 1] <= ymax)
    )
    if obstacles:
        blocked = shapely.contains_xy(obstacle_union(obstacles), points[:, 0], points[:, 1])
        inside &= ~blocked
    return inside


def region_clear_of_obstacles(
    region: shapely.Geometry, obstacles: list[list[tuple[float, float]]]
) -> bool:
    if not obstacles:
        return True
    return not region.intersects(obstacle_union(obstacles))


def circle_polygon(center: tuple[float, float], radius: float) -> shapely.Geometry:
    return Point(center).buffer(radius, quad_segs=32)
