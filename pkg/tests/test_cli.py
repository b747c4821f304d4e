import json

import pytest

from conftest import disjoint_lists, same_lists
from listcolor.cli import main
from listcolor.graph_core import build_graph, gen_regular_bipartite, write_graph
from listcolor.list_model import write_lists
from listcolor.oracle import complete_bipartite


@pytest.fixture
def files(tmp_path):
    g = gen_regular_bipartite(6, 2, 0)
    write_graph(g, tmp_path / "g.txt")
    write_lists(disjoint_lists(12, 2), tmp_path / "ok.txt")
    write_lists(same_lists(12, [1]), tmp_path / "bad.txt")
    write_graph(complete_bipartite(2, 4), tmp_path / "k24.txt")
    return tmp_path


def test_color_success(files, capsys):
    rc = main(["color", "--graph", str(files / "g.txt"), "--lists", str(files / "ok.txt"),
               "--stats", str(files / "s.csv")])
    out, err = capsys.readouterr()
    assert rc == 0
    assert len(out.splitlines()) == 12
    assert json.loads(err)["status"] == "ok"
    assert (files / "s.csv").read_text().startswith("w,Z,z,y,alpha,ell_bar")


def test_color_exhausted(files, capsys):
    rc = main(["color", "--graph", str(files / "g.txt"), "--lists", str(files / "bad.txt"),
               "--max-rounds", "3", "--report", str(files / "r.json")])
    assert rc == 2
    assert json.loads((files / "r.json").read_text())["status"] == "rounds_exhausted"


def test_color_bad_input(files, capsys):
    (files / "junk.txt").write_text("bipartite 1 1 1\n0 7\n")
    assert main(["color", "--graph", str(files / "junk.txt"), "--lists", str(files / "ok.txt")]) == 1
    assert main(["color", "--graph", str(files / "missing"), "--lists", str(files / "ok.txt")]) == 1
    assert main(["color", "--graph", str(files / "k24.txt"), "--lists", str(files / "ok.txt")]) == 1


def test_coupon(capsys):
    assert main(["coupon", "--delta", "3", "--k", "2", "--trials", "500", "--seed", "4"]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header == "trial_count,empirical,exact_or_na,product_bound,analytic_bound"
    assert row.startswith("500,")


def test_oracle(files, capsys):
    assert main(["oracle", "choosability", "--graph", str(files / "k24.txt")]) == 0
    assert capsys.readouterr().out.startswith("choosability 3\n# counterexample for k=2\n")
    write_graph(build_graph(1, 1, [(0, 0)]), files / "k11.txt")
    write_lists(same_lists(2, [1]), files / "one.txt")
    assert main(["oracle", "lcolor", "--graph", str(files / "k11.txt"), "--lists", str(files / "one.txt")]) == 2
    assert main(["oracle", "lcolor", "--graph", str(files / "k11.txt")]) == 1


def test_optimize(capsys, tmp_path):
    assert main(["optimize", "certify", "--grid-step", "0.01", "--json", "--out", str(tmp_path / "c.json")]) == 0
    assert json.loads((tmp_path / "c.json").read_text())["passed"] is True


def test_experiment_and_compare(tmp_path, capsys):
    (tmp_path / "e.ini").write_text(
        "[graph]\nn = 10\ndelta = 3\n[lists]\nk = 3\npool = 5\n[run]\nmode = sweep\ntrials = 3\n")
    assert main(["experiment", "--config", str(tmp_path / "e.ini"), "--seed", "2"]) == 0
    out, err = capsys.readouterr()
    assert out.startswith("profile,trial,seed,bad_count,bad_rate")
    assert "uniform" in json.loads(err)
    assert main(["compare", "--config", str(tmp_path / "e.ini"), "--profiles", "uniform,linear"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("profile,baseline") and len(lines) == 3
    (tmp_path / "bad.ini").write_text("[run]\nmode = nope\n")
    assert main(["experiment", "--config", str(tmp_path / "bad.ini")]) == 1


def test_ksize(capsys):
    assert main(["ksize", "--delta", "10000", "--profile", "piecewise"]) == 0
    k = int(capsys.readouterr().out)
    assert k % 10 == 0 and k > 10000
    assert main(["ksize", "--delta", "50"]) == 1
