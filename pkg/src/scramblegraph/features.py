"""Invariant feature vectors of segment graphs and the assembled point cloud.

A graph maps to the integer vector

    < n_vertices, n_edges, max_clique,  valencies...,  clique counts... >

where the valency of a vertex is its directed degree (antiparallel edges
count twice) and its clique count is the number of vertex subsets
containing it that induce a complete subgraph of the undirected
reduction, at every size k >= 1: singletons and edges included.  The two
local segments are listed in one fixed vertex order (valency descending,
then clique count descending, then vertex id) and padded with zeros to a
common length ``d``, so every vector lives in R^(2d+3).  Identical
vectors collapse into one point-cloud entry carrying a multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import CliqueCapError, DimensionError, InputError
from .graphs import SegmentGraph, UndirectedGraph, to_undirected

__all__ = [
    "DEFAULT_CLIQUE_CAP",
    "GlobalVector",
    "VertexStats",
    "CliqueStats",
    "FeatureVector",
    "CloudPoint",
    "PointCloud",
    "clique_counts",
    "vertex_stats",
    "vertex_order",
    "graph_vector",
    "build_point_cloud",
    "point_cloud_csv",
    "point_cloud_to_json",
    "point_cloud_from_json",
]

DEFAULT_CLIQUE_CAP = 10_000_000


class GlobalVector(NamedTuple):
    n_vertices: int
    n_edges: int
    max_clique: int


class VertexStats(NamedTuple):
    vertex: str
    valency: int
    clique_count: int


@dataclass(frozen=True)
class CliqueStats:
    per_vertex: dict
    max_clique: int
    total: int


def clique_counts(u: UndirectedGraph, cap: int = DEFAULT_CLIQUE_CAP) -> CliqueStats:
    """Count, per vertex, the complete-subgraph subsets containing it.

    Cliques are enumerated once each by extending along neighbors that come
    later in a fixed vertex order.  Enumeration aborts once the total number
    of cliques exceeds ``cap``.
    """
    vertices = sorted(u.vertices)
    adj = u.adjacency()
    position = {v: i for i, v in enumerate(vertices)}
    forward = {v: sorted(w for w in adj[v] if position[w] > position[v]) for v in vertices}

    per_vertex = {v: 0 for v in vertices}
    state = {"total": 0, "max": 0}

    def visit(clique: tuple, candidates: list):
        state["total"] += 1
        if state["total"] > cap:
            raise CliqueCapError(
                f"clique enumeration exceeded cap {cap} on a graph with "
                f"{len(vertices)} vertices"
            )
        if len(clique) > state["max"]:
            state["max"] = len(clique)
        for v in clique:
            per_vertex[v] += 1
        for i, w in enumerate(candidates):
            visit(clique + (w,), [x for x in candidates[i + 1 :] if x in adj[w]])

    for v in vertices:
        visit((v,), forward[v])

    return CliqueStats(per_vertex=per_vertex, max_clique=state["max"], total=state["total"])


def _graph_cliques(g: SegmentGraph, cap: int) -> CliqueStats:
    try:
        return clique_counts(to_undirected(g), cap=cap)
    except CliqueCapError as exc:
        raise CliqueCapError(f"graph of MIC contig {g.mic_contig_id}: {exc}") from None


def vertex_stats(g: SegmentGraph, cap: int = DEFAULT_CLIQUE_CAP) -> list[VertexStats]:
    """Valency and clique count for every non-isolated vertex."""
    valency = {v: 0 for v in g.vertices}
    for e in g.edges:
        valency[e.src] += 1
        valency[e.dst] += 1
    cliques = _graph_cliques(g, cap)
    return [VertexStats(v, valency[v], cliques.per_vertex[v]) for v in g.vertices]


def vertex_order(stats: Iterable[VertexStats]) -> list[VertexStats]:
    """Fixed graph order: valency desc, clique count desc, vertex id asc."""
    return sorted(stats, key=lambda s: (-s.valency, -s.clique_count, s.vertex))


@dataclass(frozen=True)
class FeatureVector:
    entries: tuple[int, ...]
    source: str
    d: int

    @property
    def global_part(self) -> tuple[int, int, int]:
        return self.entries[:3]

    @property
    def valency_part(self) -> tuple[int, ...]:
        return self.entries[3 : 3 + self.d]

    @property
    def clique_part(self) -> tuple[int, ...]:
        return self.entries[3 + self.d :]


def graph_vector(g: SegmentGraph, d: int, cap: int = DEFAULT_CLIQUE_CAP) -> FeatureVector:
    """Concatenate global, valency and clique segments, zero-padded to d."""
    if len(g.vertices) > d:
        raise DimensionError(
            f"graph of MIC contig {g.mic_contig_id} has {len(g.vertices)} vertices, "
            f"exceeding padding dimension {d}"
        )
    stats = vertex_order(vertex_stats(g, cap=cap))
    cliques = _graph_cliques(g, cap)
    overall = GlobalVector(len(g.vertices), len(g.edges), cliques.max_clique)
    pad = d - len(stats)
    entries = (
        tuple(overall)
        + tuple(s.valency for s in stats)
        + (0,) * pad
        + tuple(s.clique_count for s in stats)
        + (0,) * pad
    )
    return FeatureVector(entries=entries, source=g.mic_contig_id, d=d)


class CloudPoint(NamedTuple):
    entries: tuple
    multiplicity: int
    sources: tuple[str, ...]


@dataclass(frozen=True)
class PointCloud:
    dimension: int
    points: tuple[CloudPoint, ...]

    @property
    def size(self) -> int:
        return len(self.points)

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence], sources: Sequence[str] | None = None) -> "PointCloud":
        """Deduplicate raw coordinate rows into a cloud (test and ad-hoc use)."""
        if not vectors:
            raise InputError("point cloud needs at least one vector")
        grouped: dict[tuple, list[str]] = {}
        for i, vec in enumerate(vectors):
            key = tuple(vec)
            grouped.setdefault(key, []).append(sources[i] if sources else f"p{i}")
        points = tuple(
            CloudPoint(entries=key, multiplicity=len(names), sources=tuple(sorted(names)))
            for key, names in sorted(grouped.items())
        )
        return cls(dimension=len(points[0].entries), points=points)


def build_point_cloud(
    graphs: Sequence[SegmentGraph],
    mode: str = "full",
    cap: int = DEFAULT_CLIQUE_CAP,
) -> PointCloud:
    """Embed every graph and collapse duplicate vectors with multiplicities.

    The padding dimension is the largest vertex count over the input, so the
    full cloud sits in R^(2d+3); ``mode="global_only"`` keeps only the three
    global entries.
    """
    if mode not in ("full", "global_only"):
        raise InputError(f"unknown point cloud mode: {mode!r}")
    if not graphs:
        raise InputError("cannot build a point cloud from zero graphs")
    d = max(len(g.vertices) for g in graphs)
    grouped: dict[tuple, list[str]] = {}
    for g in graphs:
        vector = graph_vector(g, d, cap=cap)
        key = vector.entries[:3] if mode == "global_only" else vector.entries
        grouped.setdefault(key, []).append(g.mic_contig_id)
    points = tuple(
        CloudPoint(entries=key, multiplicity=len(names), sources=tuple(sorted(names)))
        for key, names in sorted(grouped.items())
    )
    dimension = 3 if mode == "global_only" else 2 * d + 3
    return PointCloud(dimension=dimension, points=points)


def point_cloud_csv(cloud: PointCloud) -> str:
    header = ["point_index", "multiplicity", "sources"]
    header += [f"e{i}" for i in range(cloud.dimension)]
    rows = [",".join(header)]
    for i, p in enumerate(cloud.points):
        rows.append(
            ",".join([str(i), str(p.multiplicity), ";".join(p.sources)] + [str(x) for x in p.entries])
        )
    return "\n".join(rows) + "\n"


def point_cloud_to_json(cloud: PointCloud) -> dict:
    return {
        "dimension": cloud.dimension,
        "points": [
            {"entries": list(p.entries), "multiplicity": p.multiplicity, "sources": list(p.sources)}
            for p in cloud.points
        ],
    }


def point_cloud_from_json(data: dict) -> PointCloud:
    points = tuple(
        CloudPoint(tuple(p["entries"]), p["multiplicity"], tuple(p["sources"]))
        for p in data["points"]
    )
    return PointCloud(dimension=data["dimension"], points=points)
