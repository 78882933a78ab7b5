"""Stage orchestration with deterministic file artifacts.

Every stage reads the previous stage's artifact from the output directory
and writes its own, so a full pipeline run is exactly the composition of
the individual stages.  All output is byte-deterministic: containers are
sorted explicitly before serialization and no timestamps are recorded.
The pipeline run finishes by writing ``manifest.json`` mapping every
artifact path to its SHA-256 digest.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import cluster as tda
from . import features as feat
from .errors import InputError
from .graphs import SegmentGraph, build_graph, export_dot, graph_from_json, graph_to_json
from .ingest import AnnotationSet, IngestConfig, MdsRecord, parse_annotation, preprocess
from .projection import classical_mds, export_scatter, projection_csv
from .relations import RelationConfig, contig_views, relation_counts, relation_triple

__all__ = ["PipelineConfig", "STAGES", "run_stage", "run_pipeline", "write_manifest"]

ALL_FORMATS = frozenset({"dot", "json", "csv", "svg"})


@dataclass
class PipelineConfig:
    input_path: Path | None
    out_dir: Path
    relation: RelationConfig = field(default_factory=RelationConfig)
    ingest: IngestConfig = field(default_factory=IngestConfig)
    eps_step: float = 0.5
    eps_report: tuple[float, ...] = ()
    global_only: bool = False
    formats: frozenset[str] = ALL_FORMATS
    gff3: bool = False
    clique_cap: int = feat.DEFAULT_CLIQUE_CAP

    def __post_init__(self):
        if self.eps_step <= 0:
            raise InputError("eps step must be > 0")
        if any(e < 0 for e in self.eps_report):
            raise InputError("eps report values must be >= 0")


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _write_json(path: Path, data) -> Path:
    return _write(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def _read_json(path: Path, stage: str):
    if not path.exists():
        raise InputError(f"stage '{stage}' requires missing artifact: {path}")
    return json.loads(path.read_text(encoding="utf-8"))


def _safe_name(name: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9._-]", "_", name)
    if cleaned != name:
        cleaned += "-" + hashlib.sha256(name.encode()).hexdigest()[:8]
    return cleaned


# --- stages -----------------------------------------------------------------


def stage_ingest(cfg: PipelineConfig) -> list[Path]:
    if cfg.input_path is None:
        raise InputError("ingest stage requires an input file")
    if not cfg.input_path.exists():
        raise InputError(f"input file not found: {cfg.input_path}")
    text = cfg.input_path.read_text(encoding="utf-8")
    annotation = parse_annotation(text, cfg.ingest, provenance=cfg.input_path.name, gff3=cfg.gff3)
    annotation = preprocess(annotation, cfg.ingest)
    payload = {
        "provenance": annotation.provenance,
        "preprocessing_log": annotation.preprocessing_log,
        "records": [
            {
                "mic": r.mic_contig_id,
                "mac": r.mac_contig_id,
                "index": r.mds_index,
                "start": r.mic_start,
                "end": r.mic_end,
                "orientation": r.orientation,
            }
            for r in annotation.records
        ],
    }
    return [_write_json(cfg.out_dir / "records.json", payload)]


def _load_records(cfg: PipelineConfig, stage: str) -> AnnotationSet:
    data = _read_json(cfg.out_dir / "records.json", stage)
    records = [
        MdsRecord(r["mic"], r["mac"], r["index"], r["start"], r["end"], r["orientation"])
        for r in data["records"]
    ]
    return AnnotationSet(records, data["provenance"], data["preprocessing_log"])


def stage_relations(cfg: PipelineConfig) -> list[Path]:
    annotation = _load_records(cfg, "relations")
    views = contig_views(annotation.records)
    rows = ["mic_contig\tg1\tg2\tb1\tb2\tb3\toverlap_pairs\tcontainment_pairs\tinterleave_pairs"]
    for mic in sorted(views):
        group = views[mic]
        for g1 in group:
            for g2 in group:
                if g1.mac_contig_id == g2.mac_contig_id:
                    continue
                triple = relation_triple(g1, g2, cfg.relation)
                if triple.is_zero:
                    continue
                c1, c2, c3 = relation_counts(g1, g2, cfg.relation)
                rows.append(
                    f"{mic}\t{g1.mac_contig_id}\t{g2.mac_contig_id}\t"
                    f"{triple.overlap}\t{triple.containment}\t{triple.interleave}\t{c1}\t{c2}\t{c3}"
                )
    return [_write(cfg.out_dir / "relations.tsv", "\n".join(rows) + "\n")]


def stage_graphs(cfg: PipelineConfig) -> list[Path]:
    annotation = _load_records(cfg, "graphs")
    views = contig_views(annotation.records)
    written = []
    for mic in sorted(views):
        graph = build_graph(mic, views[mic], cfg.relation)
        base = cfg.out_dir / "graphs" / _safe_name(mic)
        written.append(_write_json(base.parent / (base.name + ".json"), graph_to_json(graph)))
        if "dot" in cfg.formats:
            written.append(_write(base.parent / (base.name + ".dot"), export_dot(graph)))
    return written


def _load_graphs(cfg: PipelineConfig, stage: str) -> list[SegmentGraph]:
    graphs_dir = cfg.out_dir / "graphs"
    paths = sorted(graphs_dir.glob("*.json"))
    if not paths:
        raise InputError(f"stage '{stage}' requires missing artifact: {graphs_dir}/*.json")
    return [graph_from_json(json.loads(p.read_text(encoding="utf-8"))) for p in paths]


def stage_vectors(cfg: PipelineConfig) -> list[Path]:
    graphs = _load_graphs(cfg, "vectors")
    mode = "global_only" if cfg.global_only else "full"
    cloud = feat.build_point_cloud(graphs, mode=mode, cap=cfg.clique_cap)
    written = [_write_json(cfg.out_dir / "point_cloud.json", feat.point_cloud_to_json(cloud))]
    if "csv" in cfg.formats:
        written.append(_write(cfg.out_dir / "point_cloud.csv", feat.point_cloud_csv(cloud)))
    return written


def _load_cloud(cfg: PipelineConfig, stage: str) -> feat.PointCloud:
    return feat.point_cloud_from_json(_read_json(cfg.out_dir / "point_cloud.json", stage))


def stage_cluster(cfg: PipelineConfig) -> list[Path]:
    cloud = _load_cloud(cfg, "cluster")
    trace = tda.single_linkage(cloud)
    written = [_write(cfg.out_dir / "merges.csv", tda.merge_trace_csv(trace))]
    for eps in cfg.eps_report:
        report = tda.cluster_report(cloud, eps)
        stem = f"clusters_eps_{eps}"
        written.append(_write_json(cfg.out_dir / f"{stem}.json", report))
        written.append(_write(cfg.out_dir / f"{stem}.txt", tda.cluster_report_text(report)))
    return written


def stage_barcode(cfg: PipelineConfig) -> list[Path]:
    cloud = _load_cloud(cfg, "barcode")
    trace = tda.single_linkage(cloud)
    exact = tda.barcode(trace)
    grid = tda.barcode(trace, tda.Filtration.for_trace(trace, cfg.eps_step))
    written = [
        _write(cfg.out_dir / "barcode.csv", tda.barcode_csv(exact)),
        _write(cfg.out_dir / "barcode_grid.csv", tda.barcode_csv(grid)),
    ]
    if "svg" in cfg.formats:
        written.append(_write(cfg.out_dir / "barcode.svg", tda.barcode_svg(exact)))
    return written


def stage_dendrogram(cfg: PipelineConfig) -> list[Path]:
    cloud = _load_cloud(cfg, "dendrogram")
    trace = tda.single_linkage(cloud)
    tree = tda.dendrogram(trace, tda.Filtration.for_trace(trace, cfg.eps_step))
    written = [_write_json(cfg.out_dir / "dendrogram.json", tda.dendrogram_to_json(tree))]
    if "dot" in cfg.formats:
        written.append(_write(cfg.out_dir / "dendrogram.dot", tda.dendrogram_dot(tree)))
    return written


def stage_mds(cfg: PipelineConfig) -> list[Path]:
    cloud = _load_cloud(cfg, "mds")
    proj = classical_mds(tda.DistanceMatrix.from_cloud(cloud))
    if cfg.eps_report:
        clusters = tda.clusters_at(cloud, cfg.eps_report[0])
    else:
        clusters = [tuple(range(len(cloud.points)))]
    multiplicities = [p.multiplicity for p in cloud.points]
    sources = [p.sources for p in cloud.points]
    titles = [f"point {i}: {';'.join(p.sources)} (x{p.multiplicity})" for i, p in enumerate(cloud.points)]
    written = [
        _write(
            cfg.out_dir / "mds.csv",
            projection_csv(proj, clusters, multiplicities, sources),
        )
    ]
    if "svg" in cfg.formats:
        written.append(_write(cfg.out_dir / "mds.svg", export_scatter(proj, clusters, point_titles=titles)))
    return written


STAGES = {
    "ingest": stage_ingest,
    "relations": stage_relations,
    "graphs": stage_graphs,
    "vectors": stage_vectors,
    "cluster": stage_cluster,
    "barcode": stage_barcode,
    "dendrogram": stage_dendrogram,
    "mds": stage_mds,
}


def run_stage(name: str, cfg: PipelineConfig) -> list[Path]:
    if name not in STAGES:
        raise InputError(f"unknown stage: {name!r}")
    return STAGES[name](cfg)


def write_manifest(out_dir: Path, paths: list[Path]) -> Path:
    artifacts = {}
    for path in paths:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        artifacts[path.relative_to(out_dir).as_posix()] = digest
    return _write_json(out_dir / "manifest.json", {"artifacts": artifacts})


def run_pipeline(cfg: PipelineConfig) -> list[Path]:
    """Run every stage in order and record the artifact manifest."""
    if cfg.input_path is None:
        raise InputError("pipeline requires an input file")
    if not cfg.input_path.exists():
        # checked before any directory is created: no partial outputs
        raise InputError(f"input file not found: {cfg.input_path}")
    written: list[Path] = []
    for name in STAGES:
        written.extend(STAGES[name](cfg))
    written.append(write_manifest(cfg.out_dir, written))
    return written
