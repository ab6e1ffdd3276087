import json
import os
import subprocess
import sys

import pytest

from conftest import DATA, GOLDEN, ROOT
from published_tables import COMMUNITIES, NO_CONNECTIONS, STRONG, PUBLISHED_MATRIX, WEAK
from ecosysna.cli import main

SEEDS = str(DATA / "seeds.txt")
FIXTURE = str(DATA / "fixture.json")


def run(*argv):
    return main([str(a) for a in argv])


def write(path, text):
    path.write_text(text)
    return path


@pytest.fixture
def clique_csv(tmp_path):
    rows = ["src,dst,weight"]
    for group in (["a", "b", "c", "d"], ["p", "q", "r", "s"]):
        rows += [f"{u}.ir,{v}.ir,1" for u in group for v in group if u != v]
    rows.append("d.ir,p.ir,1")
    return write(tmp_path / "cliques.csv", "\n".join(rows) + "\n")


@pytest.fixture
def published_inputs(tmp_path):
    """Two-site communities whose mean cross weights are the published table cells.

    Each community has an internal edge so none is isolated; cross sums are
    4 * W (n_i * n_j = 4), exact in binary floating point.
    """
    rows = ["src,dst,weight"] + [f"c{i}a.ir,c{i}b.ir,1" for i in range(8)]
    rows += [f"c{i}a.ir,c{j}b.ir,{4 * w!r}" for (i, j), w in PUBLISHED_MATRIX.items()]
    graph = write(tmp_path / "pm.csv", "\n".join(rows) + "\n")
    part = write(tmp_path / "pm_part.csv", "domain,community_id\n" + "".join(
        f"c{i}{s}.ir,{i}\n" for i in range(8) for s in "ab"))
    labels = write(tmp_path / "pm_labels.csv", "community_id,label\n" + "".join(
        f'{i},"{name}"\n' for i, name in enumerate(COMMUNITIES)))
    return graph, part, labels


def test_sample_reproduces_golden_csv_and_trace(tmp_path, capsys):
    out = tmp_path / "raw.csv"
    assert run("sample", "--seeds", SEEDS, "--fixture", FIXTURE, "--out", out) == 0
    assert out.read_bytes() == (GOLDEN / "sample.csv").read_bytes()
    assert (tmp_path / "raw.trace.json").read_bytes() == (GOLDEN / "trace.json").read_bytes()
    assert "all_repeats at wave" in capsys.readouterr().out


def test_sample_missing_fixture_is_io_error(tmp_path, capsys):
    missing = tmp_path / "nowhere" / "fixture.json"
    assert run("sample", "--seeds", SEEDS, "--fixture", missing, "--out", tmp_path / "raw.csv") == 2
    assert str(missing) in capsys.readouterr().err


def test_sample_invalid_fixture_is_validation_error(tmp_path, capsys):
    bad = write(tmp_path / "bad.json", '{"sites": {"a.ir": {"similar": [{"domain": "b.ir", "score": 140}]}}}')
    assert run("sample", "--seeds", SEEDS, "--fixture", bad, "--out", tmp_path / "raw.csv") == 1
    assert "score" in capsys.readouterr().err
    assert not (tmp_path / "raw.csv").exists()


def test_sample_max_waves_zero(tmp_path):
    out = tmp_path / "raw.csv"
    assert run("sample", "--seeds", SEEDS, "--fixture", FIXTURE, "--max-waves", 0, "--out", out) == 0
    fixture = json.loads((DATA / "fixture.json").read_text())["sites"]
    seeds = [ln.strip().lower() for ln in (DATA / "seeds.txt").read_text().splitlines()
             if ln.strip() and not ln.startswith("#")]
    allowed = set(seeds)
    for s in seeds:
        for key in ("referrals_in", "referrals_out"):
            allowed.update(r if isinstance(r, str) else r["domain"] for r in fixture.get(s, {}).get(key, [])[:5])
    sites = set()
    for line in out.read_text().splitlines()[1:]:
        src, dst, _ = line.split(",")
        assert src in seeds or dst in seeds
        sites.update((src, dst))
    assert sites <= allowed and set(seeds) <= sites


def test_sample_bad_flags_are_config_errors(tmp_path):
    assert run("sample", "--seeds", SEEDS, "--fixture", FIXTURE, "--threshold", 120, "--out", tmp_path / "x") == 1
    with pytest.raises(SystemExit) as info:
        main(["sample", "--seeds", SEEDS])
    assert info.value.code == 1


def test_detect_two_cliques(clique_csv, tmp_path, capsys):
    out = tmp_path / "det"
    assert run("detect", "--graph", clique_csv, "--out", out) == 0
    assert capsys.readouterr().out.startswith("k=2 ")
    for name in ("partition.csv", "partition.json", "metrics.json", "graph.gexf", "filtered.csv"):
        assert (out / name).is_file()
    assert json.loads((out / "partition.json").read_text())["sizes"] == [4, 4]
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["centrality"]["betweenness"]["d.ir"] > 0


def test_detect_undirected_flag(clique_csv, tmp_path, capsys):
    assert run("detect", "--graph", clique_csv, "--undirected", "--out", tmp_path / "u") == 0
    assert capsys.readouterr().out.startswith("k=2 ")


def test_detect_zero_resolution(clique_csv, tmp_path):
    assert run("detect", "--graph", clique_csv, "--resolution", 0, "--out", tmp_path / "d") == 1


def test_detect_is_repeatable(clique_csv, tmp_path):
    outs = [tmp_path / "one", tmp_path / "two"]
    for out in outs:
        assert run("detect", "--graph", clique_csv, "--out", out) == 0
    for name in sorted(os.listdir(outs[0])):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_detect_empty_after_filter_names_removal_report(clique_csv, tmp_path, capsys):
    allow = write(tmp_path / "allow.txt", "a.ir\n")
    out = tmp_path / "det"
    assert run("detect", "--graph", clique_csv, "--filter", allow, "--mode", "allow", "--out", out) == 1
    assert str(out / "removal.json") in capsys.readouterr().err
    removed = json.loads((out / "removal.json").read_text())["removed"]
    assert {r["reason"] for r in removed} == {"not_allowlisted", "isolated"}


def test_detect_missing_graph(tmp_path):
    assert run("detect", "--graph", tmp_path / "none.csv", "--out", tmp_path / "d") == 2


def test_collapse_published_matrix(published_inputs, tmp_path):
    graph, part, labels = published_inputs
    out = tmp_path / "col"
    assert run("collapse", "--graph", graph, "--partition", part, "--labels", labels, "--out", out) == 0
    doc = json.loads((out / "classification.json").read_text())
    pair = lambda e: (COMMUNITIES.index(e["source"]), COMMUNITIES.index(e["target"]))  # noqa: E731
    assert {pair(e) for e in doc["strong"]} == STRONG
    assert {pair(e) for e in doc["weak"]} == WEAK
    assert {COMMUNITIES.index(c) for c in doc["no_connections"]} == NO_CONNECTIONS
    header = (out / "matrix.csv").read_text().splitlines()[0]
    assert header == "From - To," + ",".join(f'"{c}"' if "," in c else c for c in COMMUNITIES)
    values = sorted(e["weight"] for e in doc["strong"] + doc["weak"])
    assert values == sorted(PUBLISHED_MATRIX.values())
    dot = (out / "quotient.dot").read_text()
    assert dot.count("->") == 12


def test_collapse_high_threshold_makes_everything_weak(published_inputs, tmp_path):
    graph, part, labels = published_inputs
    out = tmp_path / "col"
    assert run("collapse", "--graph", graph, "--partition", part, "--strong-threshold", 1000, "--out", out) == 0
    doc = json.loads((out / "classification.json").read_text())
    assert doc["strong"] == [] and len(doc["weak"]) == 12
    assert doc["no_connections"] == ["Community 3", "Community 6"]


def test_collapse_single_community_warns(published_inputs, tmp_path, capsys):
    graph, _, _ = published_inputs
    part = write(tmp_path / "one.csv", "".join(f"c{i}{s}.ir,0\n" for i in range(8) for s in "ab"))
    out = tmp_path / "col"
    assert run("collapse", "--graph", graph, "--partition", part, "--out", out) == 0
    assert "single community" in capsys.readouterr().err
    assert (out / "matrix.csv").read_text() == "From - To,Community 0\nCommunity 0,\n"


def test_collapse_mismatch_lists_uncovered_domains(published_inputs, tmp_path, capsys):
    graph, _, _ = published_inputs
    part = write(tmp_path / "short.csv", "".join(f"c{i}{s}.ir,{i}\n" for i in range(6) for s in "ab")
                 + "stray.ir,6\n")
    assert run("collapse", "--graph", graph, "--partition", part, "--out", tmp_path / "c") == 1
    err = capsys.readouterr().err
    assert all(d in err for d in ("c6a.ir", "c6b.ir", "c7a.ir", "c7b.ir", "stray.ir"))


def test_collapse_rejects_non_positive_threshold(published_inputs, tmp_path):
    graph, part, _ = published_inputs
    assert run("collapse", "--graph", graph, "--partition", part, "--strong-threshold", 0, "--out", tmp_path) == 1


def _pipeline(out, *extra):
    return run("pipeline", "--seeds", SEEDS, "--fixture", FIXTURE, "--filter", DATA / "blocklist.txt",
               "--labels", DATA / "labels.csv", "--out", out, *extra)


def test_pipeline_golden_report(tmp_path):
    out = tmp_path / "run"
    assert _pipeline(out) == 0
    assert (out / "report.json").read_bytes() == (GOLDEN / "report.json").read_bytes()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["completed"] == ["sample", "filter", "detect", "metrics", "collapse", "report"]
    assert manifest["failed"] is None and manifest["exit_code"] == 0
    for name in manifest["artifacts"]:
        assert (out / name).is_file()


def test_pipeline_everything_filtered(tmp_path, capsys):
    allow = write(tmp_path / "allow.txt", "not-in-the-crawl.ir\n")
    out = tmp_path / "run"
    code = run("pipeline", "--seeds", SEEDS, "--fixture", FIXTURE, "--filter", allow, "--mode", "allow", "--out", out)
    assert code == 1
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["completed"] == ["sample", "filter"]
    assert manifest["failed"] == "detect" and manifest["exit_code"] == 1
    assert (out / "raw.csv").is_file() and not (out / "report.json").exists()
    assert "detect" in capsys.readouterr().err


def test_pipeline_rerun_replaces_artifacts(tmp_path):
    out = tmp_path / "run"
    out.mkdir()
    write(out / "report.json", "stale")
    assert _pipeline(out) == 0
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    assert _pipeline(out) == 0
    second = {p.name: p.read_bytes() for p in out.iterdir()}
    assert first == second
    assert not [n for n in second if n.endswith(".tmp")]
    assert second["report.json"] == (GOLDEN / "report.json").read_bytes()


def test_pipeline_from_existing_graph(clique_csv, tmp_path):
    out = tmp_path / "run"
    assert run("pipeline", "--graph", clique_csv, "--out", out, "--report", tmp_path / "r.json") == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["communities"]["k"] == 2 and doc["sampling"] is None


def test_pipeline_needs_an_input(tmp_path):
    assert run("pipeline", "--out", tmp_path / "run") == 1
    assert json.loads((tmp_path / "run" / "manifest.json").read_text())["failed"] == "sample"


def test_module_entry_point_and_no_color(clique_csv, tmp_path):
    env = dict(os.environ, ECOSYSNA_NO_COLOR="1")
    proc = subprocess.run([sys.executable, "-m", "ecosysna", "detect", "--graph", str(clique_csv),
                           "--out", str(tmp_path / "d")], capture_output=True, text=True, env=env, cwd=ROOT)
    assert proc.returncode == 0
    assert proc.stdout.startswith("k=2 ") and "\033[" not in proc.stdout
