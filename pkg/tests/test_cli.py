import json
from pathlib import Path

from scramblegraph.cli import main

STAGE_ORDER = ["ingest", "relations", "graphs", "vectors", "cluster", "barcode", "dendrogram", "mds"]


def run_pipeline(toy_path, out, extra=()):
    return main(["pipeline", "--input", str(toy_path), "--out", str(out), *extra])


def artifact_bytes(root: Path) -> dict[str, bytes]:
    return {
        p.relative_to(root).as_posix(): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestPipeline:
    def test_missing_input_exits_1_without_outputs(self, tmp_path):
        out = tmp_path / "out"
        rc = main(["pipeline", "--input", str(tmp_path / "nope.tsv"), "--out", str(out)])
        assert rc == 1
        assert not out.exists()

    def test_toy_pipeline_writes_manifest_and_artifacts(self, toy_path, tmp_path):
        out = tmp_path / "out"
        assert run_pipeline(toy_path, out, ["--eps-report", "9.5"]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        for name, digest in manifest["artifacts"].items():
            assert (out / name).is_file()
            assert len(digest) == 64
        assert "records.json" in manifest["artifacts"]
        assert "graphs/mic_1.dot" in manifest["artifacts"]
        assert "clusters_eps_9.5.json" in manifest["artifacts"]

    def test_deterministic_across_runs(self, toy_path, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run_pipeline(toy_path, out1, ["--eps-report", "2.5"]) == 0
        assert run_pipeline(toy_path, out2, ["--eps-report", "2.5"]) == 0
        m1 = json.loads((out1 / "manifest.json").read_text())
        m2 = json.loads((out2 / "manifest.json").read_text())
        assert m1 == m2
        assert artifact_bytes(out1) == artifact_bytes(out2)

    def test_eps_report_cluster_listing(self, toy_path, tmp_path):
        out = tmp_path / "out"
        assert run_pipeline(toy_path, out, ["--eps-report", "9.5"]) == 0
        report = json.loads((out / "clusters_eps_9.5.json").read_text())
        assert report["eps"] == 9.5
        assert sum(c["size"] for c in report["clusters"]) == report["n_points"]

    def test_stagewise_equals_pipeline(self, toy_path, tmp_path):
        whole, stagewise = tmp_path / "whole", tmp_path / "stages"
        assert run_pipeline(toy_path, whole, ["--eps-report", "9.5"]) == 0
        for stage in STAGE_ORDER:
            rc = main(
                [stage, "--input", str(toy_path), "--out", str(stagewise), "--eps-report", "9.5"]
            )
            assert rc == 0
        whole_bytes = artifact_bytes(whole)
        whole_bytes.pop("manifest.json")  # stages do not write the manifest
        assert whole_bytes == artifact_bytes(stagewise)

    def test_clique_cap_env_exits_2_naming_the_graph(self, toy_path, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SCRAMBLEGRAPH_CLIQUE_CAP", "2")
        rc = run_pipeline(toy_path, tmp_path / "out")
        assert rc == 2
        assert "mic_1" in capsys.readouterr().err

    def test_invalid_cap_env_rejected(self, toy_path, tmp_path, monkeypatch):
        monkeypatch.setenv("SCRAMBLEGRAPH_CLIQUE_CAP", "lots")
        assert run_pipeline(toy_path, tmp_path / "out") == 1

    def test_touching_segments_of_distant_indices_exit_2(self, tmp_path, capsys):
        # preprocessing keeps this trio, leaving two adjacent intervals in one
        # contig view, which the IES computation must reject
        poison = tmp_path / "poison.tsv"
        poison.write_text(
            "m\tMDS\t100\t200\t+\tmac=gX;idx=1\n"
            "m\tMDS\t5000\t5100\t+\tmac=gX;idx=2\n"
            "m\tMDS\t201\t300\t+\tmac=gX;idx=3\n"
        )
        rc = main(["pipeline", "--input", str(poison), "--out", str(tmp_path / "out")])
        assert rc == 2
        assert "gX" in capsys.readouterr().err


class TestStages:
    def test_graphs_stage_produces_dot_and_json_per_mic(self, toy_path, tmp_path):
        out = tmp_path / "out"
        assert main(["ingest", "--input", str(toy_path), "--out", str(out)]) == 0
        assert main(["graphs", "--out", str(out)]) == 0
        produced = sorted(p.name for p in (out / "graphs").iterdir())
        mics = [f"mic_{i}" for i in range(1, 7)]
        assert produced == sorted([f"{m}.dot" for m in mics] + [f"{m}.json" for m in mics])

    def test_missing_upstream_artifact_exits_1(self, tmp_path, capsys):
        rc = main(["graphs", "--out", str(tmp_path / "empty")])
        assert rc == 1
        assert "records.json" in capsys.readouterr().err

    def test_vectors_global_only(self, toy_path, tmp_path):
        out = tmp_path / "out"
        assert main(["ingest", "--input", str(toy_path), "--out", str(out)]) == 0
        assert main(["graphs", "--out", str(out)]) == 0
        assert main(["vectors", "--global-only", "--out", str(out)]) == 0
        cloud = json.loads((out / "point_cloud.json").read_text())
        assert cloud["dimension"] == 3
        assert all(len(p["entries"]) == 3 for p in cloud["points"])
        header = (out / "point_cloud.csv").read_text().splitlines()[0]
        assert header.endswith("e0,e1,e2")

    def test_stage_rerun_identical_bytes(self, toy_path, tmp_path):
        out = tmp_path / "out"
        assert main(["ingest", "--input", str(toy_path), "--out", str(out)]) == 0
        first = (out / "records.json").read_bytes()
        assert main(["ingest", "--input", str(toy_path), "--out", str(out)]) == 0
        assert (out / "records.json").read_bytes() == first

    def test_format_filter(self, toy_path, tmp_path):
        out = tmp_path / "out"
        assert run_pipeline(toy_path, out, ["--format", "json"]) == 0
        assert not list(out.rglob("*.dot"))
        assert not list(out.rglob("*.svg"))
        assert (out / "graphs" / "mic_1.json").exists()

    def test_gff3_input(self, tmp_path):
        gff = tmp_path / "toy.gff3"
        gff.write_text(
            "##gff-version 3\n"
            "micA\tsrc\tMDS\t100\t600\t.\t+\t.\tID=MDS_gx_1;Parent=gx\n"
            "micA\tsrc\tMDS\t550\t1100\t.\t+\t.\tID=MDS_gy_1;Parent=gy\n"
        )
        out = tmp_path / "out"
        assert main(["pipeline", "--gff3", "--input", str(gff), "--out", str(out)]) == 0
        graph = json.loads((out / "graphs" / "micA.json").read_text())
        assert {(e["src"], e["dst"]) for e in graph["edges"]} == {("gx", "gy"), ("gy", "gx")}

    def test_relation_threshold_flags(self, toy_path, tmp_path):
        out = tmp_path / "out"
        assert run_pipeline(toy_path, out, ["--overlap-min", "100"]) == 0
        relations = (out / "relations.tsv").read_text().splitlines()[1:]
        # the 21 bp and 51 bp overlaps no longer qualify as overlap relations
        for line in relations:
            assert line.split("\t")[3] == "0"
