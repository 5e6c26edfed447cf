from __future__ import annotations

import json
import subprocess
import sys

import pytest

from approxdeco.cli import main
from approxdeco.graph import load_graph


@pytest.fixture
def torus_file(tmp_path):
    path = tmp_path / "torus.txt"
    assert main(["gen", "--family", "torus", "--params", "dims=5x5", "--out", str(path)]) == 0
    return path


def last_json(capsys) -> dict:
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


def test_gen_writes_text_format(torus_file):
    g, _ = load_graph(torus_file)
    assert torus_file.read_text().splitlines()[0] == "25 50 4"
    assert g.is_regular()


def test_gen_respects_global_seed(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    args = ["gen", "--family", "random_regular", "--params", "n=50,d=4", "--out"]
    main(["--seed", "3"] + args + [str(a)])
    main(args + [str(b), "--seed", "3"])
    assert a.read_text() == b.read_text()


def test_koenig_and_verify(tmp_path, capsys):
    g = tmp_path / "b.txt"
    main(["gen", "--family", "bipartite_regular", "--params", "n_side=100,d=3", "--out", str(g)])
    out = tmp_path / "k.json"
    rc = main(["--format", "json", "koenig", "--graph", str(g), "--epsilon", "0.1", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["palette"] == 3 and doc["a_counts"][-1] <= doc["a_counts"][0]
    assert main(["verify", "--graph", str(g), "--result", str(out), "--format", "json"]) == 0
    assert last_json(capsys)["check_corr_matches"] is True


def test_koenig_odd_cycle_fails(tmp_path, capsys):
    g = tmp_path / "k3.txt"
    main(["gen", "--family", "torus", "--params", "dims=3", "--out", str(g)])
    assert main(["koenig", "--graph", str(g), "--epsilon", "0.5", "--format", "json"]) == 1
    assert last_json(capsys)["check_odd_cycle_free"] is False


def test_orient_stages(tmp_path, capsys):
    g = tmp_path / "tree.txt"
    main(["gen", "--family", "tree", "--params", "branching=4,depth=4", "--out", str(g)])
    out = tmp_path / "o.json"
    assert main(["orient", "--graph", str(g), "--epsilon", "0.1", "--out", str(out)]) == 1
    rc = main(["orient", "--graph", str(g), "--epsilon", "0.95", "--truncation", "--stages", "4",
               "--out", str(out)])
    doc = json.loads(out.read_text())
    assert rc == 0 and doc["stages"] and "endpoints" in doc["stages"][0]
    assert main(["verify", "--graph", str(g), "--result", str(out)]) == 0


def test_decorate_and_verify(torus_file, tmp_path, capsys):
    out = tmp_path / "d.json"
    rc = main(["decorate", "--graph", str(torus_file), "--epsilon", "0.1", "--measure", "random:3",
               "--out", str(out), "--format", "json"])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert len(doc["labels"]) == 50 and doc["free_action"]["injective_on_corr"]
    assert main(["verify", "--graph", str(torus_file), "--result", str(out), "--format", "json"]) == 0
    assert last_json(capsys)["all_permutations"] is True


def test_exp_measure_uses_dims(tmp_path, capsys):
    g = tmp_path / "t.txt"
    main(["gen", "--family", "torus", "--params", "dims=4x6", "--out", str(g)])
    out = tmp_path / "k.json"
    args = ["koenig", "--graph", str(g), "--epsilon", "0.2", "--measure", "exp:1,0.5", "--out", str(out)]
    assert main(args + ["--dims", "4x6"]) == 0
    assert json.loads(out.read_text())["dims"] == "4x6"
    assert main(["verify", "--graph", str(g), "--result", str(out), "--format", "json"]) == 0
    assert last_json(capsys)["check_corr_matches"] is True


def test_bench_exit_codes(tmp_path, capsys):
    plan = {
        "instances": [{"family": "torus", "params": {"dims": "4x4"}}],
        "epsilons": [0.1],
        "algorithms": ["koenig", "decorate"],
    }
    p = tmp_path / "plan.json"
    p.write_text(json.dumps(plan))
    assert main(["--threads", "2", "bench", "--plan", str(p), "--out", str(tmp_path / "r"),
                 "--no-timing"]) == 0
    assert (tmp_path / "r.csv").exists() and (tmp_path / "r.json").exists()
    plan["instances"].append({"family": "bipartite_regular", "params": {"n_side": 10, "d": 3}})
    p.write_text(json.dumps(plan))
    assert main(["bench", "--plan", str(p)]) == 1


def test_module_entry_point(tmp_path):
    out = tmp_path / "g.txt"
    res = subprocess.run(
        [sys.executable, "-m", "approxdeco", "gen", "--family", "rotation",
         "--params", "n=20,steps=1/3", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr
    assert out.read_text().splitlines()[0] == "20 40 4"
