"""Marker field generation and the grid index used by the per-tick auction.

Markers are fixed points scattered uniformly over the free space of the
world (inside the bounds, outside every obstacle). They never move; the
only mutable thing about them is which agent currently claims them, and
that lives in the engine, not here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import shapely

from .geometry import Rect, free_area, obstacle_union


class EmptyFieldError(RuntimeError):
    """Raised when a world has no free space to place markers in."""


@dataclass(frozen=True)
class Marker:
    id: int
    position: tuple[float, float]


@dataclass
class MarkerField:
    """Immutable marker set plus a uniform-grid index over marker positions.

    ``positions`` is an (n, 2) float array; marker ids are row indices.
    The grid maps a cell coordinate to the array of marker ids inside it.
    Cell size is at least the largest capture radius in play, so scanning
    the 3x3 neighborhood around a competitor covers everything in range.
    """

    positions: np.ndarray
    density: float
    seed: int
    cell_size: float = 0.0
    _cells: dict[tuple[int, int], np.ndarray] = field(default_factory=dict, repr=False)
    _neighborhoods: dict[tuple[int, int], np.ndarray] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def markers(self) -> list[Marker]:
        return [Marker(i, (float(x), float(y))) for i, (x, y) in enumerate(self.positions)]

    def ensure_index(self, cell_size: float) -> None:
        """(Re)build the grid if the current cells are smaller than ``cell_size``."""
        if self.cell_size >= cell_size and self._cells:
            return
        if cell_size <= 0:
            raise ValueError(f"cell_size must be > 0, got {cell_size}")
        self.cell_size = cell_size
        self._cells.clear()
        self._neighborhoods.clear()
        if len(self.positions) == 0:
            return
        coords = np.floor(self.positions / cell_size).astype(np.int64)
        order = np.lexsort((coords[:, 1], coords[:, 0]))
        sorted_coords = coords[order]
        change = np.nonzero(np.any(np.diff(sorted_coords, axis=0) != 0, axis=1))[0] + 1
        starts = np.concatenate(([0], change, [len(order)]))
        for a, b in zip(starts[:-1], starts[1:]):
            key = (int(sorted_coords[a, 0]), int(sorted_coords[a, 1]))
            self._cells[key] = np.sort(order[a:b])

    def cell_of(self, point: np.ndarray) -> tuple[int, int]:
        return (int(np.floor(point[0] / self.cell_size)), int(np.floor(point[1] / self.cell_size)))

    def candidates_near(self, point: np.ndarray) -> np.ndarray:
        """Marker ids in the 3x3 cell block around ``point`` (superset of any
        in-range set as long as the query radius is <= cell_size)."""
        if not self._cells:
            raise RuntimeError("marker index not built; call ensure_index() first")
        key = self.cell_of(point)
        cached = self._neighborhoods.get(key)
        if cached is not None:
            return cached
        cx, cy = key
        chunks = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                ids = self._cells.get((cx + dx, cy + dy))
                if ids is not None:
                    chunks.append(ids)
        block = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
        self._neighborhoods[key] = block
        return block


def generate_markers(
    bounds: Rect,
    obstacles: list[list[tuple[float, float]]],
    density: float,
    seed: int,
) -> MarkerField:
    """Scatter markers uniformly over the free space of ``bounds``.

    Samples round(density * bounds area) uniform points and rejects those
    inside obstacles, so the expected surviving count is density times the
    free area. Deterministic for a fixed seed.
    """
    xmin, ymin, xmax, ymax = bounds
    if xmax <= xmin or ymax <= ymin:
        raise ValueError(f"degenerate bounds {bounds}")
    if density <= 0:
        raise ValueError(f"density must be > 0, got {density}")
    if free_area(bounds, obstacles) <= 0.0:
        raise EmptyFieldError("world has no free space for markers")

    n = int(round(density * (xmax - xmin) * (ymax - ymin)))
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    pts = rng.uniform((xmin, ymin), (xmax, ymax), size=(n, 2))
    if obstacles:
        blocked = shapely.contains_xy(obstacle_union(obstacles), pts[:, 0], pts[:, 1])
        pts = pts[~blocked]
    return MarkerField(positions=np.ascontiguousarray(pts), density=density, seed=seed)
