import json
import math
import os
import subprocess
import sys

import pytest

RUN = [sys.executable, "-m", "treezeta"]


def run_cli(args, **kw):
    return subprocess.run(RUN + list(args), capture_output=True, text=True, **kw)


def test_euler_split_value_and_exit_zero():
    res = run_cli(["euler", "--mode", "split", "--q", "2", "--g", "1",
                   "--l", "1", "--s", "2"])
    assert res.returncode == 0
    doc = json.loads(res.stdout)
    assert doc["all_pass"] is True
    row = doc["rows"][0]
    assert abs(complex(row["det"]) - 0.75) < 1e-8
    assert row["tolerance"] == 1e-8


def test_euler_unknown_flag_exits_64():
    res = run_cli(["euler", "--definitely-not-a-flag"])
    assert res.returncode == 64


def test_validation_error_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [0], "edges": [{"id": 0, "src": 0, "dst": 7}]}')
    res = run_cli(["sft", "--graph", str(bad), "--q", "2"])
    assert res.returncode == 2


def test_extend_matrix_paper_example(tmp_path):
    csv = tmp_path / "aplus.csv"
    csv.write_text("0,1,0\n1,0,1\n0,1,0\n")
    res = run_cli(["extend", "--e", "2", "--matrix", str(csv)])
    assert res.returncode == 0
    doc = json.loads(res.stdout)
    assert doc["matrix"] == [[0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0],
                             [0, 0, 0, 1, 0, 0], [1, 0, 0, 0, 1, 0],
                             [0, 0, 0, 0, 0, 1], [0, 0, 1, 0, 0, 0]]


def test_tree_then_sft_and_measure(tmp_path):
    out = tmp_path / "t"
    res = run_cli(["tree", "--p", "2", "--radius", "3", "--out", str(out)])
    assert res.returncode == 0
    tree_doc = out / "tree.json"
    assert tree_doc.exists()
    assert (out / "tree.png").exists()
    assert (out / "tree.dot").exists()

    res2 = run_cli(["sft", "--graph", str(tree_doc), "--q", "2", "--nmax", "4",
                    "--tail-depth", "5", "--out", str(out)])
    assert res2.returncode == 0
    doc = json.loads((out / "sft.json").read_text())
    theta = doc["theta"]
    assert doc["rank_F"] == {str(n): theta[n] - theta[n - 1] + 1
                             for n in range(1, 5)}
    assert (out / "theta.csv").exists()
    assert (out / "theta.png").exists()

    doc = json.loads(tree_doc.read_text())
    base = doc["base"]
    first = next(e for e in doc["edges"] if e["src"] == base)
    # positive oriented id of the k-th positive edge is 2k, ids sorted
    ids = sorted(e["id"] for e in doc["edges"])
    w = 2 * ids.index(first["id"])
    res3 = run_cli(["measure", "--graph", str(tree_doc), "--word", str(w)])
    assert res3.returncode == 0
    assert res3.stdout.strip() == "1/8"   # fwd 1/4 times backward 1/2


def test_measure_marking_invariance(tmp_path):
    out = tmp_path / "t"
    run_cli(["tree", "--p", "2", "--radius", "3", "--out", str(out), "--no-figures"])
    tree_doc = out / "tree.json"
    doc = json.loads(tree_doc.read_text())
    base = doc["base"]
    ids = sorted(e["id"] for e in doc["edges"])
    first = next(e for e in doc["edges"] if e["src"] == base)
    w = 2 * ids.index(first["id"])
    vals = set()
    for marking in ("0", "-1", "3"):
        res = run_cli(["measure", "--graph", str(tree_doc), "--word", str(w),
                       "--marking", marking])
        vals.add(res.stdout.strip())
    assert len(vals) == 1


def test_output_is_deterministic(tmp_path):
    a = run_cli(["euler", "--mode", "split", "--q", "3", "--g", "2",
                 "--s-grid", "0.5,2,1+1j"])
    b = run_cli(["euler", "--mode", "split", "--q", "3", "--g", "2",
                 "--s-grid", "0.5,2,1+1j"])
    assert a.stdout == b.stdout


def test_euler_foam_mode(tmp_path):
    lam = tmp_path / "lambdas.json"
    alpha = math.pi / math.log(2)
    lam.write_text(json.dumps([{"alpha": f"0+{alpha}j", "d": 2},
                               {"alpha": "0+0j", "d": 1}]))
    res = run_cli(["euler", "--mode", "foam", "--q", "2", "--lambdas", str(lam),
                   "--s-grid", "0.5,2"])
    assert res.returncode == 0
    assert json.loads(res.stdout)["all_pass"] is True


def test_euler_csv_and_figure(tmp_path):
    out = tmp_path / "e"
    res = run_cli(["euler", "--mode", "split", "--q", "2", "--g", "1",
                   "--s-grid", "0.5,2", "--out", str(out)])
    assert res.returncode == 0
    csv = (out / "euler.csv").read_text().splitlines()
    assert csv[0].startswith("s,det,inverse_factor,relative_error")
    assert len(csv) == 3
    assert (out / "euler.png").exists()
    # figures can be disabled
    out2 = tmp_path / "e2"
    run_cli(["euler", "--mode", "split", "--q", "2", "--g", "1",
             "--s-grid", "0.5", "--out", str(out2), "--no-figures"])
    assert not (out2 / "euler.png").exists()


def test_ck_report(tmp_path):
    gdoc = tmp_path / "g.json"
    gdoc.write_text(json.dumps({
        "vertices": [0, 1],
        "edges": [{"id": 1, "src": 0, "dst": 1}, {"id": 2, "src": 1, "dst": 0},
                  {"id": 3, "src": 0, "dst": 1}]}))
    res = run_cli(["ck", "--graph", str(gdoc), "--q", "2", "--n", "4"])
    assert res.returncode == 0
    doc = json.loads(res.stdout)
    assert doc["paths"]["range_relation_vertex"]["pass"] is True
    assert doc["paths"]["vertex_sum_relation"]["pass"] is True
    assert doc["walks"]["range_relation_vertex"]["pass"] is False
    assert doc["walks"]["range_relation_vertex"]["witness"] is not None


def test_dirac_subcommand(tmp_path):
    res = run_cli(["dirac", "--variant", "scaled", "--l", "2", "--q", "3",
                   "--nmax", "3"])
    doc = json.loads(res.stdout)
    assert doc["spacing_constant"] is True
    lam1 = 2 * math.pi / (2 * math.log(3))
    assert abs(doc["lambda_n"][1] - lam1) < 1e-12


def test_schottky_pipeline_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "prime": 2,
        "generators": [[["4", "0"], ["0", "1"]]],
        "wordBound": 4,
        "radius": 4,
        "n": 0,
        "sGrid": ["2", "1+1j"],
    }))
    res = run_cli(["schottky", "--config", str(cfg), "--no-figures"])
    assert res.returncode == 0
    doc = json.loads(res.stdout)
    assert doc["dual_graph"]["betti"] == 1
    assert doc["dual_graph"]["lengths"] == [2]

    res2 = run_cli(["schottky", "--config", str(cfg), "--all", "--no-figures"])
    assert res2.returncode == 0
    doc2 = json.loads(res2.stdout)
    assert doc2["euler"]["all_pass"] is True
    assert doc2["ck"]["range_relation_vertex"] is True
    theta = doc2["theta"]
    assert doc2["rank_F"] == {str(n): theta[n] - theta[n - 1] + 1
                              for n in range(1, 6)}
