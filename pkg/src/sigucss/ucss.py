"""Skeleton pixel graphs and their decomposition into unambiguous segments.

A skeleton is read as an undirected graph over its foreground pixels with
8-neighbour edges. Vertices of degree 1 (stroke ends) and degree > 2
(junctions) delimit segments; every maximal chain of degree-2 vertices
between two delimiters, delimiters included, is one segment. Closed loops
made only of degree-2 vertices are emitted whole as ``cycle`` segments.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .imaging import BinaryImage, NormalizedPointSet, normalize_points

INTERNAL = "internal"
EXTREMITY = "extremity"
ISOLATED = "isolated"
CYCLE = "cycle"
KINDS = (INTERNAL, EXTREMITY, ISOLATED, CYCLE)

# clockwise from north; image rows grow southwards
CLOCKWISE = ((0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1))


@dataclass(frozen=True)
class SkeletonGraph:
    vertices: np.ndarray                      # (n, 2) int (x, y), sorted by (y, x)
    neighbors: tuple[tuple[int, ...], ...]    # clockwise from north
    degree: np.ndarray

    def __len__(self):
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return int(self.degree.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nb in enumerate(self.neighbors) for v in nb if u < v]


def build_graph(skel) -> SkeletonGraph:
    """8-neighbour graph of a skeleton image (or of an iterable of (x, y) pixels)."""
    if isinstance(skel, BinaryImage):
        coords = skel.coords()
    else:
        coords = np.asarray(sorted({(int(x), int(y)) for x, y in skel}, key=lambda p: (p[1], p[0])),
                            dtype=np.int64).reshape(-1, 2)
    index = {(int(x), int(y)): i for i, (x, y) in enumerate(coords)}
    neighbors = []
    for x, y in coords.tolist():
        neighbors.append(tuple(index[(x + dx, y + dy)] for dx, dy in CLOCKWISE
                               if (x + dx, y + dy) in index))
    degree = np.array([len(nb) for nb in neighbors], dtype=np.int64)
    return SkeletonGraph(coords, tuple(neighbors), degree)


@dataclass(frozen=True, eq=False)
class Ucss:
    """One unambiguously ordered run of skeleton points."""

    points: np.ndarray
    kind: str = ISOLATED
    pixels: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        if len(pts) < 2:
            raise ValueError(f"a segment needs at least 2 points, got {len(pts)}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown segment kind {self.kind!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.pixels is not None:
            px = np.array(self.pixels, dtype=np.int64).reshape(-1, 2)
            px.setflags(write=False)
            object.__setattr__(self, "pixels", px)

    @property
    def length(self) -> int:
        return len(self.points)

    @cached_property
    def code(self):
        """The 9-scalar subsampled code of this segment."""
        from .encoding import subsample4
        return subsample4(self)

    @cached_property
    def content_bytes(self) -> bytes:
        """Big-endian point bytes; a platform-independent sort key."""
        return self.points.astype(">f8").tobytes()

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, Ucss):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.points, other.points)

    __hash__ = None


def reverse(s: Ucss) -> Ucss:
    px = None if s.pixels is None else s.pixels[::-1]
    return Ucss(s.points[::-1], s.kind, px)


def _kind(deg_a: int, deg_b: int) -> str:
    ends = sorted((deg_a, deg_b))
    if ends == [1, 1]:
        return ISOLATED
    if ends[0] == 1:
        return EXTREMITY
    return INTERNAL


def segment_vertex_paths(g: SkeletonGraph) -> list[tuple[str, list[int]]]:
    """Segments as (kind, vertex-id path) pairs, in deterministic order."""
    deg = g.degree
    used: set[tuple[int, int]] = set()
    visited = np.zeros(len(g), dtype=bool)
    out = []
    for d in range(len(g)):
        if deg[d] == 0:
            x, y = g.vertices[d]
            warnings.warn(f"dropping isolated skeleton pixel ({x}, {y})", stacklevel=3)
            visited[d] = True
            continue
        if deg[d] == 2:
            continue
        for nb in g.neighbors[d]:
            edge = (min(d, nb), max(d, nb))
            if edge in used:
                continue
            used.add(edge)
            path = [d]
            prev, cur = d, nb
            while deg[cur] == 2:
                path.append(cur)
                a, b = g.neighbors[cur]
                nxt = b if a == prev else a
                used.add((min(cur, nxt), max(cur, nxt)))
                prev, cur = cur, nxt
            path.append(cur)
            visited[path] = True
            out.append((_kind(int(deg[d]), int(deg[cur])), path))
    # closed loops with no delimiter on them
    for start in range(len(g)):
        if visited[start]:
            continue
        path = [start]
        visited[start] = True
        prev, cur = start, min(g.neighbors[start])
        while cur != start:
            path.append(cur)
            visited[cur] = True
            a, b = g.neighbors[cur]
            prev, cur = cur, (b if a == prev else a)
        out.append((CYCLE, path))
    return out


def extract_segments(g: SkeletonGraph, transform: NormalizedPointSet | None = None) -> list[Ucss]:
    """Decompose ``g`` into segments; coordinates pass through ``transform`` if given."""
    segs = []
    for kind, path in segment_vertex_paths(g):
        px = g.vertices[path]
        pts = transform.apply(px) if transform is not None else px.astype(float)
        segs.append(Ucss(pts, kind, px))
    return segs


def skeleton_segments(skel: BinaryImage) -> list[Ucss]:
    """Segments of a skeleton image in coordinates normalized over all its pixels."""
    g = build_graph(skel)
    if len(g) < 2:
        return []
    norm = normalize_points(g.vertices)
    return extract_segments(g, norm)


def format_segments(segs) -> str:
    lines = []
    for i, s in enumerate(segs):
        lines.append(f"# {i} {s.kind} {s.length}")
        lines.extend(f"{x!r} {y!r}" for x, y in s.points.tolist())
    return "\n".join(lines) + ("\n" if lines else "")


def parse_segments(text: str) -> list[Ucss]:
    segs = []
    kind, rows = None, []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if kind is not None:
                segs.append(Ucss(rows, kind))
            _, _, kind, _ = line.split()
            rows = []
        else:
            x, y = line.split()[:2]
            rows.append((float(x), float(y)))
    if kind is not None:
        segs.append(Ucss(rows, kind))
    return segs


def write_segments(path, segs) -> None:
    Path(path).write_text(format_segments(segs), encoding="utf-8")
