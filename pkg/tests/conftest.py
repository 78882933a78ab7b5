"""Shared fixtures: toy data loading, fixture graphs, random generators, oracles."""

from __future__ import annotations

import itertools
import random
from pathlib import Path

import pytest

from scramblegraph.graphs import NONZERO_TRIPLES, SegmentGraph, UndirectedGraph
from scramblegraph.ingest import IngestConfig, parse_annotation, preprocess
from scramblegraph.relations import RelationConfig
from scramblegraph.graphs import build_graph
from scramblegraph.relations import contig_views

TOY_PATH = Path(__file__).resolve().parents[1] / "data" / "toy_annotation.tsv"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def toy_path() -> Path:
    return TOY_PATH


@pytest.fixture(scope="session")
def toy_graphs() -> list[SegmentGraph]:
    annotation = parse_annotation(TOY_PATH.read_text(), provenance=TOY_PATH.name)
    annotation = preprocess(annotation, IngestConfig())
    views = contig_views(annotation.records)
    return [build_graph(mic, views[mic], RelationConfig()) for mic in sorted(views)]


@pytest.fixture(scope="session")
def triangle_graph(toy_graphs) -> SegmentGraph:
    """The three-contig locus whose graph is a directed triangle with 4 edges."""
    return toy_graphs[0]


def seven_vertex_graph() -> SegmentGraph:
    """Seven-vertex fixture: a K4, a pendant triangle, and a bridging vertex.

    Undirected shape: K4 on {a,b,c,e}, triangle {a,f,g}, and d joined to
    b, c, f, g; the a<->b pair is antiparallel, every other edge single.
    """
    edges = [
        ("a", (1, 0, 0), "b"),
        ("b", (1, 0, 0), "a"),
        ("a", (0, 0, 1), "c"),
        ("a", (0, 0, 1), "e"),
        ("b", (0, 0, 1), "c"),
        ("b", (0, 0, 1), "e"),
        ("c", (0, 0, 1), "e"),
        ("a", (0, 0, 1), "f"),
        ("a", (0, 0, 1), "g"),
        ("f", (0, 0, 1), "g"),
        ("b", (0, 0, 1), "d"),
        ("c", (0, 0, 1), "d"),
        ("d", (0, 0, 1), "f"),
        ("d", (0, 0, 1), "g"),
    ]
    return SegmentGraph.from_edges("fixture7", edges)


def random_graph(
    rng: random.Random,
    max_vertices: int = 15,
    edge_prob: float = 0.25,
    mic: str = "micR",
) -> SegmentGraph:
    n = rng.randint(1, max_vertices)
    names = [f"v{i:02d}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < edge_prob:
                edges.append((names[i], NONZERO_TRIPLES[rng.randrange(7)], names[j]))
    touched = {v for src, _, dst in edges for v in (src, dst)}
    isolated = [v for v in names if v not in touched]
    return SegmentGraph.from_edges(mic, edges, isolated)


def relabel_graph(g: SegmentGraph, rng: random.Random) -> SegmentGraph:
    old = list(g.vertices) + list(g.isolated_vertices)
    new = [f"w{i:02d}" for i in range(len(old))]
    rng.shuffle(new)
    mapping = dict(zip(old, new))
    edges = [(mapping[e.src], e.label, mapping[e.dst]) for e in g.edges]
    return SegmentGraph.from_edges(
        g.mic_contig_id, edges, [mapping[v] for v in g.isolated_vertices]
    )


def brute_force_cliques(u: UndirectedGraph):
    """Independent oracle: test all 2^|V| subsets for completeness."""
    vertices = sorted(u.vertices)
    adjacency = u.adjacency()
    per_vertex = {v: 0 for v in vertices}
    max_clique = 0
    total = 0
    for size in range(1, len(vertices) + 1):
        for subset in itertools.combinations(vertices, size):
            if all(b in adjacency[a] for a, b in itertools.combinations(subset, 2)):
                total += 1
                max_clique = max(max_clique, size)
                for v in subset:
                    per_vertex[v] += 1
    return per_vertex, max_clique, total


def closure_clusters(dist, eps: float) -> list[tuple[int, ...]]:
    """Independent oracle: transitive closure of the thresholded adjacency."""
    n = len(dist)
    reach = [[dist[i][j] <= eps or i == j for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                reach[i] = [a or b for a, b in zip(reach[i], reach[k])]
    seen: set[int] = set()
    clusters = []
    for i in range(n):
        if i in seen:
            continue
        members = tuple(j for j in range(n) if reach[i][j])
        seen.update(members)
        clusters.append(members)
    return clusters


def graphs_isomorphic(g1: SegmentGraph, g2: SegmentGraph) -> bool:
    """Exhaustive permutation check preserving edge direction and label."""
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return False
    labels1 = {(e.src, e.dst): e.label for e in g1.edges}
    labels2 = {(e.src, e.dst): e.label for e in g2.edges}
    for perm in itertools.permutations(g2.vertices):
        mapping = dict(zip(g1.vertices, perm))
        if all(labels2.get((mapping[s], mapping[d])) == lab for (s, d), lab in labels1.items()):
            return True
    return False


def squared_distance(a, b) -> int:
    assert len(a) == len(b)
    return sum((x - y) ** 2 for x, y in zip(a, b))
