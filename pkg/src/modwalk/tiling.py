"""Tiles h_M(D) of the upper half plane and the degree-9 graph they form.

D is the closed region |z| >= 1, |re z| <= 1/2. Each tile is labelled by its
canonical matrix, and two tiles touch exactly when M^-1 M' is one of E_0..E_8.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .errors import DomainError, ResourceLimitError
from .psl2z import (
    GENERATOR_TUPLES,
    IDENTITY,
    ProjectiveMatrix,
    UpperHalfPoint,
    _mul,
    inverse,
    is_unit_neighbor,
)

__all__ = [
    "Reduction",
    "TilingGraph",
    "ProjectedWalk",
    "BOUNDARY_GUARD",
    "reduce_to_fundamental",
    "in_fundamental_domain",
    "neighbors",
    "are_adjacent",
    "cayley_ball",
    "project_walk",
]

BOUNDARY_GUARD = 1e-9
_MAX_FLOAT_ROUNDS = 10_000
_INVERT = GENERATOR_TUPLES[0]


class Reduction(NamedTuple):
    tile: ProjectiveMatrix
    point: UpperHalfPoint
    ambiguous: bool  # the reduced point sits on (or, in float mode, within 1e-9 of) the boundary of D


def in_fundamental_domain(z: UpperHalfPoint, tol: float = 0.0) -> bool:
    half = Fraction(1, 2) if z.is_exact else 0.5
    return abs(z.re) <= half + tol and z.abs2() >= 1 - tol


def _on_boundary(x, y, exact: bool) -> bool:
    if exact:
        return abs(x) == Fraction(1, 2) or x * x + y * y == 1
    return 0.5 - abs(x) < BOUNDARY_GUARD or abs(math.hypot(x, y) - 1.0) < BOUNDARY_GUARD


def reduce_to_fundamental(z: UpperHalfPoint) -> Reduction:
    """Find M and z0 in D with z = h_M(z0).

    Alternate a translation bringing re z into [-1/2, 1/2) with the inversion
    z -> -1/z whenever |z| < 1. Each inversion strictly increases im z, so the
    loop ends. Rational coordinates are handled exactly.
    """
    exact = z.is_exact
    x, y = z.re, z.im
    if not exact:
        x, y = float(x), float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise DomainError("cannot reduce a non-finite point")
    m = (1, 0, 0, 1)
    for _ in range(_MAX_FLOAT_ROUNDS if not exact else 1 << 62):
        k = math.floor(x + Fraction(1, 2)) if exact else math.floor(x + 0.5)
        if k:
            x -= k
            m = _mul(m, (1, k, 0, 1))
        r2 = x * x + y * y
        if r2 >= 1:
            break
        x, y = -x / r2, y / r2
        m = _mul(m, _INVERT)
    else:
        raise ResourceLimitError("reduction did not settle; the point is too close to the real axis")
    return Reduction(ProjectiveMatrix._from_tuple(m), UpperHalfPoint(x, y), _on_boundary(x, y, exact))


def neighbors(m: ProjectiveMatrix) -> tuple:
    """The nine tiles M·E_i, i = 0..8."""
    t = m.entries
    return tuple(ProjectiveMatrix._from_tuple(_mul(t, e)) for e in GENERATOR_TUPLES)


def are_adjacent(m: ProjectiveMatrix, n: ProjectiveMatrix) -> bool:
    return is_unit_neighbor(inverse(m) @ n)


@dataclass
class TilingGraph:
    """Ball of the tiling graph around the identity tile, in BFS order."""

    radius: int
    vertices: list
    distance: list
    edges: list  # sorted (i, j) index pairs with i < j
    index: dict = field(repr=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.vertices)

    def degree(self, v: int) -> int:
        # the nine neighbours of a tile are distinct and never the tile itself
        return sum(1 for n in neighbors(self.vertices[v]) if n in self.index)

    def interior(self) -> list:
        return [v for v, d in enumerate(self.distance) if d < self.radius]

    def to_dot(self) -> str:
        lines = ["graph tiling {"]
        for v, m in enumerate(self.vertices):
            lines.append(f'  {v} [label="{m.label()}"];')
        for i, j in self.edges:
            lines.append(f"  {i} -- {j};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "radius": self.radius,
                "vertices": [m.label() for m in self.vertices],
                "distances": self.distance,
                "edges": [list(e) for e in self.edges],
            }
        )


def cayley_ball(radius: int, max_vertices: int = 1_000_000) -> TilingGraph:
    if radius < 0:
        raise DomainError("radius must be non-negative")
    vertices = [IDENTITY]
    distance = [0]
    index = {IDENTITY: 0}
    frontier = deque([0])
    while frontier:
        v = frontier.popleft()
        if distance[v] == radius:
            continue
        for n in neighbors(vertices[v]):
            if n not in index:
                if len(vertices) >= max_vertices:
                    raise ResourceLimitError(
                        f"ball of radius {radius} exceeds the budget of {max_vertices} vertices"
                    )
                index[n] = len(vertices)
                vertices.append(n)
                distance.append(distance[v] + 1)
                frontier.append(index[n])
    edges = set()
    for v, m in enumerate(vertices):
        for n in neighbors(m):
            u = index.get(n)
            if u is not None and u != v:
                edges.add((min(u, v), max(u, v)))
    return TilingGraph(radius, vertices, distance, sorted(edges), index)


@dataclass
class ProjectedWalk:
    tiles: list
    ambiguous: list  # indices of points flagged near a tile boundary

    def steps_are_local(self) -> bool:
        """True when consecutive tiles are equal or adjacent."""
        return all(a == b or are_adjacent(a, b) for a, b in zip(self.tiles, self.tiles[1:]))


def project_walk(points: Iterable[UpperHalfPoint]) -> ProjectedWalk:
    tiles, flagged = [], []
    for k, z in enumerate(points):
        r = reduce_to_fundamental(z)
        tiles.append(r.tile)
        if r.ambiguous:
            flagged.append(k)
    return ProjectedWalk(tiles, flagged)
