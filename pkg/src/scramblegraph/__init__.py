"""Scrambled gene-segment annotations to graph clustering.

Pipeline stages: parse MIC-MAC segment annotations, relate MAC contigs
pairwise, build one labeled directed graph per MIC contig, embed each
graph as an integer invariant vector, cluster the resulting point cloud
through its connected-component hierarchy, and project it to the plane.
"""

from .cluster import (
    Barcode,
    DistanceMatrix,
    Filtration,
    MergeTrace,
    barcode,
    clusters_at,
    dendrogram,
    neighborhood_graph,
    single_linkage,
)
from .features import PointCloud, build_point_cloud, clique_counts, graph_vector, vertex_order
from .graphs import (
    EDGE_COLORS,
    SegmentGraph,
    UndirectedGraph,
    build_graph,
    canonical_code,
    connected_components,
    export_dot,
    to_undirected,
)
from .ingest import (
    AnnotationSet,
    IngestConfig,
    MdsRecord,
    exclude_distant_overlap_contigs,
    merge_consecutive_mds,
    parse_annotation,
    preprocess,
    serialize_annotation,
)
from .projection import Projection2D, classical_mds, export_scatter
from .relations import (
    Interval,
    MacContigView,
    RelationConfig,
    RelationTriple,
    contig_views,
    detect_containment,
    detect_interleave,
    detect_overlap,
    ies_intervals,
    relation_triple,
)

__version__ = "0.1.0"
