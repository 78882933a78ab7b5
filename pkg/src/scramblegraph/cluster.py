"""Hierarchical clustering of the point cloud via connected components.

Clusters at scale eps are the connected components of the neighborhood
graph joining points at Euclidean distance <= eps.  The exact merge
structure over all scales is computed once from a minimum spanning tree
(single linkage); barcodes, dendrograms and flat clusterings are read
off that trace, optionally snapped upward onto a regular eps grid.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import IncompleteScheduleError, InputError
from .features import PointCloud
from .graphs import UndirectedGraph

__all__ = [
    "DistanceMatrix",
    "Filtration",
    "Merge",
    "MergeTrace",
    "Bar",
    "Barcode",
    "Dendrogram",
    "neighborhood_graph",
    "clusters_at",
    "single_linkage",
    "barcode",
    "dendrogram",
    "barcode_csv",
    "barcode_svg",
    "merge_trace_csv",
    "cluster_report",
    "cluster_report_text",
    "dendrogram_to_json",
    "dendrogram_dot",
]


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray

    @classmethod
    def from_values(cls, values: np.ndarray) -> "DistanceMatrix":
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise InputError("distance matrix must be square")
        if not np.array_equal(values, values.T):
            raise InputError("distance matrix must be symmetric")
        if np.any(values < 0):
            raise InputError("distance matrix entries must be non-negative")
        if np.any(np.diag(values) != 0):
            raise InputError("distance matrix diagonal must be zero")
        return cls(values)

    @classmethod
    def from_points(cls, points: np.ndarray) -> "DistanceMatrix":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        diff = pts[:, None, :] - pts[None, :, :]
        return cls(np.sqrt((diff * diff).sum(axis=-1)))

    @classmethod
    def from_cloud(cls, cloud: PointCloud) -> "DistanceMatrix":
        return cls.from_points(np.array([p.entries for p in cloud.points], dtype=float))

    @property
    def size(self) -> int:
        return self.values.shape[0]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        # the representative of a set is always its smallest member
        self.smallest = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        keep, drop = (ra, rb) if self.smallest[ra] <= self.smallest[rb] else (rb, ra)
        self.parent[drop] = keep
        return True

    def representative(self, i: int) -> int:
        return self.smallest[self.find(i)]


def _cloud_points(cloud: PointCloud) -> np.ndarray:
    return np.array([p.entries for p in cloud.points], dtype=float)


def neighborhood_graph(cloud: PointCloud, eps: float) -> UndirectedGraph:
    """Graph on point indices joining pairs at distance <= eps."""
    if eps < 0:
        raise InputError("eps must be >= 0")
    dist = DistanceMatrix.from_cloud(cloud).values
    n = dist.shape[0]
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n) if dist[i, j] <= eps)
    return UndirectedGraph(vertices=tuple(range(n)), edges=edges)


def clusters_at(cloud: PointCloud, eps: float) -> list[tuple[int, ...]]:
    """Connected components at scale eps, sorted by smallest member index."""
    graph = neighborhood_graph(cloud, eps)
    return _components(len(graph.vertices), graph.edges)


def _components(n: int, edges) -> list[tuple[int, ...]]:
    uf = _UnionFind(n)
    for i, j in edges:
        uf.union(i, j)
    members: dict[int, list[int]] = {}
    for i in range(n):
        members.setdefault(uf.representative(i), []).append(i)
    return [tuple(members[rep]) for rep in sorted(members)]


class Merge(NamedTuple):
    height: float
    component_a: int  # smaller representative; survives the merge
    component_b: int


@dataclass(frozen=True)
class MergeTrace:
    n_points: int
    merges: tuple[Merge, ...]

    @property
    def max_height(self) -> float:
        return self.merges[-1].height if self.merges else 0.0


def single_linkage(cloud: PointCloud) -> MergeTrace:
    """Exact merge sequence from a minimum spanning tree of the cloud."""
    dist = DistanceMatrix.from_cloud(cloud).values
    n = dist.shape[0]
    if n == 1:
        return MergeTrace(n_points=1, merges=())

    # Prim's algorithm; ties resolve to the lowest point index.
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    attach = np.zeros(n, dtype=int)
    in_tree[0] = True
    best[1:] = dist[0, 1:]
    mst_edges = []
    for _ in range(n - 1):
        masked = np.where(in_tree, np.inf, best)
        nxt = int(np.argmin(masked))
        mst_edges.append((float(best[nxt]), min(attach[nxt], nxt), max(attach[nxt], nxt)))
        in_tree[nxt] = True
        closer = ~in_tree & (dist[nxt] < best)
        best[closer] = dist[nxt][closer]
        attach[closer] = nxt

    # equal heights are processed in ascending (height, index pair) order
    mst_edges.sort()
    uf = _UnionFind(n)
    merges = []
    for height, u, v in mst_edges:
        ra, rb = uf.representative(u), uf.representative(v)
        uf.union(u, v)
        merges.append(Merge(height, min(ra, rb), max(ra, rb)))
    return MergeTrace(n_points=n, merges=tuple(merges))


@dataclass(frozen=True)
class Filtration:
    """Strictly increasing eps grid starting at 0 whose last value joins all."""

    eps_values: tuple[float, ...]
    step: float = 0.5

    def __post_init__(self):
        if not self.eps_values or self.eps_values[0] != 0:
            raise InputError("filtration must start at eps = 0")
        if any(b <= a for a, b in zip(self.eps_values, self.eps_values[1:])):
            raise InputError("filtration values must be strictly increasing")
        if self.step <= 0:
            raise InputError("filtration step must be > 0")

    @classmethod
    def regular(cls, max_value: float, step: float = 0.5) -> "Filtration":
        count = max(0, math.ceil(max_value / step - 1e-12))
        while count * step < max_value:
            count += 1
        return cls(tuple(i * step for i in range(count + 1)), step)

    @classmethod
    def for_trace(cls, trace: MergeTrace, step: float = 0.5) -> "Filtration":
        return cls.regular(trace.max_height, step)

    def snap_up(self, value: float) -> float:
        """Smallest grid value >= value; never snaps downward."""
        i = bisect.bisect_left(self.eps_values, value)
        if i == len(self.eps_values):
            raise IncompleteScheduleError(
                f"filtration ends at {self.eps_values[-1]} before merge height {value}"
            )
        return self.eps_values[i]


class Bar(NamedTuple):
    birth: float
    death: float | None  # None marks the single unbounded bar
    representative: int


@dataclass(frozen=True)
class Barcode:
    bars: tuple[Bar, ...]


def barcode(trace: MergeTrace, schedule: Filtration | None = None) -> Barcode:
    """One bar per point, born at 0; each merge ends the larger-index bar.

    With a schedule the death values snap up onto the grid.
    """
    deaths: dict[int, float] = {}
    for merge in trace.merges:
        height = schedule.snap_up(merge.height) if schedule else merge.height
        deaths[merge.component_b] = height
    bars = [Bar(0.0, deaths[i], i) for i in range(trace.n_points) if i in deaths]
    bars.sort(key=lambda b: (b.death, b.representative))
    survivor = 0  # smallest index survives every merge it joins
    bars.append(Bar(0.0, None, survivor))
    return Barcode(bars=tuple(bars))


@dataclass(frozen=True)
class Dendrogram:
    """Clusters per grid level; node (i, eps) is the i-th cluster at eps."""

    eps_values: tuple[float, ...]
    levels: tuple[tuple[tuple[int, ...], ...], ...]

    def children(self, level: int, index: int) -> list[int]:
        """Indices of the previous level's clusters merged into this node."""
        if level == 0:
            return []
        members = set(self.levels[level][index])
        return [i for i, c in enumerate(self.levels[level - 1]) if members.issuperset(c)]

    @property
    def root(self) -> tuple[int, int]:
        return (len(self.levels) - 1, 0)


def dendrogram(trace: MergeTrace, schedule: Filtration) -> Dendrogram:
    """Cluster hierarchy over the schedule's levels down to a single root."""
    if trace.merges and trace.max_height > schedule.eps_values[-1]:
        raise IncompleteScheduleError(
            f"filtration ends at {schedule.eps_values[-1]} before merge height "
            f"{trace.max_height}; all points must join"
        )
    uf = _UnionFind(trace.n_points)
    merges = list(trace.merges)
    position = 0
    levels = []
    for eps in schedule.eps_values:
        while position < len(merges) and merges[position].height <= eps:
            # merge heights are realized distances, so <= eps joins the pair
            a, b = merges[position].component_a, merges[position].component_b
            uf.union(a, b)
            position += 1
        members: dict[int, list[int]] = {}
        for i in range(trace.n_points):
            members.setdefault(uf.representative(i), []).append(i)
        levels.append(tuple(tuple(members[rep]) for rep in sorted(members)))
    if len(levels[-1]) != 1:
        raise IncompleteScheduleError("filtration never reaches a single cluster")
    return Dendrogram(eps_values=schedule.eps_values, levels=tuple(levels))


# --- exports ----------------------------------------------------------------


def merge_trace_csv(trace: MergeTrace) -> str:
    rows = ["height,component_a,component_b"]
    rows += [f"{repr(m.height)},{m.component_a},{m.component_b}" for m in trace.merges]
    return "\n".join(rows) + "\n"


def barcode_csv(code: Barcode) -> str:
    rows = ["birth,death,representative"]
    for bar in code.bars:
        death = "inf" if bar.death is None else repr(bar.death)
        rows.append(f"{repr(bar.birth)},{death},{bar.representative}")
    return "\n".join(rows) + "\n"


def barcode_svg(code: Barcode, width: int = 800, bar_height: int = 8, gap: int = 4) -> str:
    """Horizontal bars, shortest at the bottom, unbounded bar on top."""
    n = len(code.bars)
    margin = 40
    height = 2 * margin + n * (bar_height + gap)
    finite = [b.death for b in code.bars if b.death is not None]
    scale_max = max(finite) * 1.05 if finite else 1.0
    if scale_max == 0:
        scale_max = 1.0
    span = width - 2 * margin

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'  <line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
    ]
    for row, bar in enumerate(code.bars):
        y = height - margin - (row + 1) * (bar_height + gap)
        if bar.death is None:
            x2 = width - margin
            color = "firebrick"
        else:
            x2 = margin + span * (bar.death / scale_max)
            color = "steelblue"
        lines.append(
            f'  <rect x="{margin}" y="{y}" width="{x2 - margin:.4f}" '
            f'height="{bar_height}" fill="{color}">'
            f"<title>point {bar.representative}</title></rect>"
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def cluster_report(cloud: PointCloud, eps: float) -> dict:
    """Clusters at eps ordered by size, with member points and contig ids."""
    parts = clusters_at(cloud, eps)
    parts = sorted(parts, key=lambda c: (-len(c), c[0]))
    clusters = []
    for rank, members in enumerate(parts, start=1):
        sources: list[str] = []
        for i in members:
            sources.extend(cloud.points[i].sources)
        clusters.append(
            {
                "index": rank,
                "size": len(members),
                "points": list(members),
                "sources": sorted(sources),
            }
        )
    return {"eps": eps, "n_points": len(cloud.points), "clusters": clusters}


def cluster_report_text(report: dict) -> str:
    lines = [f"clusters at eps={report['eps']} ({report['n_points']} points)"]
    for c in report["clusters"]:
        lines.append(f"cluster {c['index']} (size {c['size']}): {', '.join(c['sources'])}")
    return "\n".join(lines) + "\n"


def dendrogram_to_json(tree: Dendrogram) -> dict:
    levels = []
    for li, (eps, clusters) in enumerate(zip(tree.eps_values, tree.levels)):
        levels.append(
            {
                "eps": eps,
                "clusters": [
                    {
                        "index": ci + 1,
                        "points": list(members),
                        "children": [c + 1 for c in tree.children(li, ci)],
                    }
                    for ci, members in enumerate(clusters)
                ],
            }
        )
    return {"eps_values": list(tree.eps_values), "levels": levels, "root": [tree.root[0], 1]}


def dendrogram_dot(tree: Dendrogram) -> str:
    lines = ["digraph dendrogram {", "  rankdir=BT;"]
    for li, (eps, clusters) in enumerate(zip(tree.eps_values, tree.levels)):
        for ci in range(len(clusters)):
            label = f"({ci + 1}, {eps})"
            lines.append(f'  "L{li}C{ci + 1}" [label="{label}"];')
    for li in range(1, len(tree.levels)):
        for ci in range(len(tree.levels[li])):
            for child in tree.children(li, ci):
                lines.append(f'  "L{li - 1}C{child + 1}" -> "L{li}C{ci + 1}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
