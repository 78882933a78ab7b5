"""Labeled directed graphs of MAC contig relations, one per MIC contig.

Vertices are MAC contig ids; an edge (g1, label, g2) exists when the
relation triple of the ordered pair is nonzero.  Contigs without any
incident edge are kept aside as isolated vertices and are excluded from
vertex counts, the undirected reduction and all derived features.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import InputError
from .relations import MacContigView, RelationConfig, RelationTriple, relation_triple

__all__ = [
    "EDGE_COLORS",
    "NONZERO_TRIPLES",
    "Edge",
    "SegmentGraph",
    "UndirectedGraph",
    "build_graph",
    "to_undirected",
    "connected_components",
    "export_dot",
    "canonical_code",
    "graph_to_json",
    "graph_from_json",
]

# Color convention for the seven nonzero relation triples.
EDGE_COLORS: dict[RelationTriple, str] = {
    RelationTriple(1, 1, 1): "red",
    RelationTriple(1, 1, 0): "green",
    RelationTriple(1, 0, 1): "blue",
    RelationTriple(0, 1, 1): "orange",
    RelationTriple(1, 0, 0): "purple",
    RelationTriple(0, 1, 0): "cyan",
    RelationTriple(0, 0, 1): "black",
}

NONZERO_TRIPLES: tuple[RelationTriple, ...] = tuple(sorted(EDGE_COLORS))


class Edge(NamedTuple):
    src: str
    label: RelationTriple
    dst: str


@dataclass(frozen=True)
class SegmentGraph:
    """Immutable labeled directed graph of one MIC contig."""

    mic_contig_id: str
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    isolated_vertices: tuple[str, ...]

    @classmethod
    def from_edges(
        cls,
        mic_contig_id: str,
        edges: Iterable[tuple[str, RelationTriple | tuple[int, int, int], str]],
        isolated: Iterable[str] = (),
    ) -> "SegmentGraph":
        normalized: list[Edge] = []
        seen_pairs: set[tuple[str, str]] = set()
        for src, label, dst in edges:
            label = RelationTriple(*label)
            if src == dst:
                raise ValueError(f"self-loop on vertex {src!r}")
            if label.is_zero:
                raise ValueError(f"zero label on edge {src!r} -> {dst!r}")
            if (src, dst) in seen_pairs:
                raise ValueError(f"duplicate edge {src!r} -> {dst!r}")
            seen_pairs.add((src, dst))
            normalized.append(Edge(src, label, dst))
        normalized.sort()
        vertices = tuple(sorted({v for e in normalized for v in (e.src, e.dst)}))
        extra = tuple(sorted(set(isolated) - set(vertices)))
        return cls(mic_contig_id, vertices, tuple(normalized), extra)

    def out_edges(self, vertex: str) -> list[Edge]:
        return [e for e in self.edges if e.src == vertex]


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple graph: sorted vertices, edges as sorted (u, v) pairs with u < v."""

    vertices: tuple
    edges: tuple

    def adjacency(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def build_graph(
    mic_contig_id: str, views: Sequence[MacContigView], cfg: RelationConfig
) -> SegmentGraph:
    """Relate every ordered pair of contig views and assemble the graph."""
    ids = [v.mac_contig_id for v in views]
    if len(set(ids)) != len(ids):
        raise InputError(f"duplicate MAC contig ids on MIC contig {mic_contig_id}")
    ordered = sorted(views, key=lambda v: v.mac_contig_id)
    edges = []
    for g1, g2 in itertools.permutations(ordered, 2):
        label = relation_triple(g1, g2, cfg)
        if not label.is_zero:
            edges.append((g1.mac_contig_id, label, g2.mac_contig_id))
    incident = {v for src, _, dst in edges for v in (src, dst)}
    isolated = [v.mac_contig_id for v in ordered if v.mac_contig_id not in incident]
    return SegmentGraph.from_edges(mic_contig_id, edges, isolated)


def to_undirected(g: SegmentGraph) -> UndirectedGraph:
    """Forget direction and labels; antiparallel pairs collapse to one edge."""
    pairs = {tuple(sorted((e.src, e.dst))) for e in g.edges}
    return UndirectedGraph(vertices=g.vertices, edges=tuple(sorted(pairs)))


def connected_components(g: SegmentGraph) -> list[SegmentGraph]:
    """Split the graph into its connected components (isolated vertices drop)."""
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.edges:
        ra, rb = find(e.src), find(e.dst)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    members: dict[str, list[str]] = {}
    for v in g.vertices:
        members.setdefault(find(v), []).append(v)

    components = []
    for root in sorted(members):
        vset = set(members[root])
        comp_edges = [e for e in g.edges if e.src in vset]
        components.append(SegmentGraph.from_edges(g.mic_contig_id, comp_edges))
    return components


def export_dot(g: SegmentGraph) -> str:
    """Graphviz digraph with the package color convention; byte-deterministic."""
    lines = [f'digraph "{g.mic_contig_id}" {{']
    for v in g.vertices:
        lines.append(f'  "{v}";')
    for v in g.isolated_vertices:
        lines.append(f'  "{v}" [style=dotted];')
    for e in g.edges:
        color = EDGE_COLORS[e.label]
        label = f"({e.label.overlap},{e.label.containment},{e.label.interleave})"
        lines.append(f'  "{e.src}" -> "{e.dst}" [color={color}, label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_json(g: SegmentGraph) -> dict:
    return {
        "mic": g.mic_contig_id,
        "vertices": list(g.vertices),
        "edges": [{"src": e.src, "dst": e.dst, "label": list(e.label)} for e in g.edges],
        "isolated": list(g.isolated_vertices),
    }


def graph_from_json(data: dict) -> SegmentGraph:
    edges = [(e["src"], RelationTriple(*e["label"]), e["dst"]) for e in data["edges"]]
    return SegmentGraph.from_edges(data["mic"], edges, data.get("isolated", ()))


# --- canonical codes -------------------------------------------------------
#
# For small graphs the code is exact: equal codes if and only if the graphs
# are isomorphic preserving edge directions and labels.  The search assigns
# vertices position by position inside refinement classes seeded with
# (valency, clique count) and sharpened by iterated neighborhood refinement,
# taking the lexicographically smallest adjacency encoding over all
# class-respecting orders.  Above ``max_exact`` vertices an invariant digest
# is emitted instead; equal digests are then necessary but not sufficient.

def canonical_code(g: SegmentGraph, max_exact: int = 12) -> str:
    from .features import vertex_stats  # late import, features depends on graphs

    n = len(g.vertices)
    stats = {s.vertex: (s.valency, s.clique_count) for s in vertex_stats(g)}
    label_of: dict[tuple[str, str], RelationTriple] = {(e.src, e.dst): e.label for e in g.edges}

    if n > max_exact:
        summary = sorted(
            (
                stats[v],
                sorted(e.label for e in g.edges if e.src == v),
                sorted(e.label for e in g.edges if e.dst == v),
            )
            for v in g.vertices
        )
        payload = f"{n}|{len(g.edges)}|{summary}"
        return "hash:" + hashlib.sha256(payload.encode()).hexdigest()

    colors = _refine_colors(g.vertices, label_of, stats)
    order = _canonical_order(g.vertices, label_of, colors)
    blocks = _encode_order(order, label_of)
    sizes: dict[int, int] = {}
    for v in g.vertices:
        sizes[colors[v]] = sizes.get(colors[v], 0) + 1
    payload = f"{n}|{sorted(sizes.items())}|{blocks}"
    return "exact:" + hashlib.sha256(payload.encode()).hexdigest()


def _refine_colors(vertices, label_of, seed) -> dict:
    """Iterated refinement by labeled in/out neighborhoods; ranks are invariant."""
    colors = dict(seed)
    ranks = _rank(colors)
    while True:
        new = {}
        for v in vertices:
            outs = sorted((label_of[(v, u)], ranks[u]) for u in vertices if (v, u) in label_of)
            ins = sorted((label_of[(u, v)], ranks[u]) for u in vertices if (u, v) in label_of)
            new[v] = (ranks[v], tuple(outs), tuple(ins))
        new_ranks = _rank(new)
        if len(set(new_ranks.values())) == len(set(ranks.values())):
            return new_ranks
        ranks = new_ranks


def _rank(colors: dict) -> dict:
    ordered = sorted(set(colors.values()))
    index = {c: i for i, c in enumerate(ordered)}
    return {v: index[c] for v, c in colors.items()}


def _encode_vertex(w, assigned, label_of) -> tuple:
    none = (9, 9, 9)  # sorts after every real triple
    block = []
    for u in assigned:
        block.append(tuple(label_of.get((u, w), none)))
        block.append(tuple(label_of.get((w, u), none)))
    return tuple(block)


def _encode_order(order, label_of) -> list[tuple]:
    return [_encode_vertex(w, order[:k], label_of) for k, w in enumerate(order)]


def _interchangeable(cands: list, others: Iterable, label_of) -> bool:
    """All candidates relate identically to each other and to everything else."""
    if len(cands) <= 1:
        return True
    internal = {
        (label_of.get((a, b)), label_of.get((b, a)))
        for a in cands
        for b in cands
        if a != b
    }
    if len(internal) > 1:
        return False
    fwd, bwd = next(iter(internal))
    if fwd != bwd:
        return False
    for u in others:
        rel = {(label_of.get((c, u)), label_of.get((u, c))) for c in cands}
        if len(rel) > 1:
            return False
    return True


def _canonical_order(vertices, label_of, colors) -> list:
    n = len(vertices)
    by_class: dict[int, list] = {}
    for v in vertices:
        by_class.setdefault(colors[v], []).append(v)
    class_order = sorted(by_class)
    position_class = [c for c in class_order for _ in by_class[c]]
    remaining = {c: set(members) for c, members in by_class.items()}

    best: list[tuple] | None = None
    best_order: list | None = None

    def search(assigned: list, blocks: list[tuple]):
        nonlocal best, best_order
        k = len(assigned)
        if k == n:
            if best is None or blocks < best:
                best = list(blocks)
                best_order = list(assigned)
            return
        cls = position_class[k]
        cands = sorted(remaining[cls])
        others = [v for v in vertices if v not in cands]
        if _interchangeable(cands, others, label_of):
            cands = cands[:1]
        for w in cands:
            blocks.append(_encode_vertex(w, assigned, label_of))
            if best is not None and blocks > best[: k + 1]:
                blocks.pop()
                continue
            remaining[cls].remove(w)
            assigned.append(w)
            search(assigned, blocks)
            assigned.pop()
            remaining[cls].add(w)
            blocks.pop()

    search([], [])
    assert best_order is not None
    return best_order
