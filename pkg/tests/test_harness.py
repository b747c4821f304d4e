import pytest

from conftest import disjoint_lists, same_lists
from listcolor.bias import BiasProfile
from listcolor.errors import ConfigInvalid, SchemaMismatch
from listcolor.graph_core import gen_regular_bipartite, write_graph
from listcolor.harness import (
    ExperimentConfig,
    bias_advantage_sweep,
    compare_profiles,
    emit_plot_data,
    load_config,
    parse_config,
    read_plot_data,
    read_table_csv,
    rho_table,
    run_experiment,
    sign_test_pvalue,
    summarize,
)
from listcolor.list_model import write_lists

SWEEP_CFG = """
[graph]
n = 20
delta = 4
[lists]
k = 3
pool = 5
[run]
mode = sweep
trials = 4
seed = 11
profiles = uniform, piecewise
"""


def test_parse_config_fields():
    cfg = parse_config(SWEEP_CFG)
    assert cfg.mode == "sweep" and cfg.trials == 4 and cfg.n == 20
    assert [p.kind for p in cfg.profiles] == ["uniform", "piecewise"]


@pytest.mark.parametrize("text", [
    "[run]\nmode = teleport\n",
    "[run]\ntrials = 0\n[graph]\nn=4\ndelta=2\n[lists]\nk=2\npool=3\n",
    "[run]\ntrials = many\n",
    "[graph]\nn = 4\n",
    "[bogus]\nx = 1\n",
    "[graph]\nfile = /nonexistent/g.txt\n[lists]\nk=2\npool=3\n",
    "[graph]\nn=4\ndelta=2\n[lists]\nk=2\npool=3\nmode=planted-overlap\n",
    "[profile]\nprofile = wobbly\n",
    "not an ini file",
])
def test_parse_config_errors(text):
    with pytest.raises(ConfigInvalid):
        parse_config(text)


def test_load_config_missing(tmp_path):
    with pytest.raises(ConfigInvalid):
        load_config(tmp_path / "nope.ini")


def test_sweep_deterministic_and_row_count(tmp_path):
    cfg = parse_config(SWEEP_CFG)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a.csv_text == b.csv_text
    assert len(a.rows) == cfg.trials * 2
    seeds = {r["seed"] for r in a.rows}
    assert len(seeds) == cfg.trials


def test_single_trial_bytes_identical(tmp_path):
    text = SWEEP_CFG.replace("trials = 4", "trials = 1") + f"out = {tmp_path / 'o.csv'}\n"
    run_experiment(parse_config(text))
    first = (tmp_path / "o.csv").read_bytes()
    run_experiment(parse_config(text))
    assert (tmp_path / "o.csv").read_bytes() == first


def test_color_mode_disjoint_lists(tmp_path):
    g = gen_regular_bipartite(8, 3, 0)
    write_graph(g, tmp_path / "g.txt")
    write_lists(disjoint_lists(16, 2), tmp_path / "l.txt")
    (tmp_path / "c.ini").write_text(
        "[graph]\nfile = g.txt\n[lists]\nfile = l.txt\n[run]\nmode = color\ntrials = 5\n")
    res = run_experiment(load_config(tmp_path / "c.ini"))
    assert res.summary["success_rate"] == 1.0
    assert all(r["rounds"] == 1 for r in res.rows)


def test_list_file_size_mismatch(tmp_path):
    write_graph(gen_regular_bipartite(4, 2, 0), tmp_path / "g.txt")
    write_lists(disjoint_lists(3, 2), tmp_path / "l.txt")
    cfg = ExperimentConfig(graph_file=str(tmp_path / "g.txt"), lists_file=str(tmp_path / "l.txt"))
    with pytest.raises(ConfigInvalid):
        run_experiment(cfg)


@pytest.mark.parametrize("mode", ["color", "coupon", "sweep"])
def test_summary_recomputed_from_csv(mode):
    cfg = ExperimentConfig(mode=mode, trials=3, seed=2, n=10, delta=3, k=3, pool=5, draws=200)
    res = run_experiment(cfg)
    assert summarize(mode, read_table_csv(res.csv_text)) == res.summary


def test_compare_identical_profiles():
    cfg = parse_config(SWEEP_CFG)
    cmp = compare_profiles(cfg, [BiasProfile.linear(), BiasProfile.linear()])
    assert cmp.profiles == ["linear", "linear#2"]
    assert all(row[0] == row[1] for row in cmp.counts)
    assert cmp.paired[0]["mean_diff"] == 0.0
    assert cmp.paired[0]["wins"] == cmp.paired[0]["losses"] == 0
    assert cmp.paired[0]["p_value"] == 1.0


def test_compare_mismatched_trials():
    cfg = parse_config(SWEEP_CFG)
    with pytest.raises(ConfigInvalid):
        compare_profiles(cfg, [BiasProfile.uniform(), BiasProfile.piecewise()], trials=[10, 12])
    with pytest.raises(ConfigInvalid):
        compare_profiles(cfg, [BiasProfile.uniform()])


def test_sign_test():
    assert sign_test_pvalue(0, 0) == 1.0
    assert sign_test_pvalue(10, 0) == pytest.approx(2 / 1024)
    assert sign_test_pvalue(3, 3) == 1.0


def test_advantage_sweep_shape():
    pts = bias_advantage_sweep(20, 4, [4, 8], trials=5, seed=0)
    assert [p.k for p in pts] == [4, 8]
    assert all(p.comparison.trials == 5 for p in pts)
    assert isinstance(pts[0].advantage, bool)


def test_plot_empty_table():
    text = emit_plot_data([], "success-vs-k")
    assert text == "# kind: success-vs-k\n# columns: k success_rate\n"
    assert read_plot_data(text) == ("success-vs-k", [])


def test_rho_histogram(k22):
    table = rho_table(BiasProfile.linear(), same_lists(4, [1, 2]), k22)
    assert sorted(r["rho"] for r in table) == pytest.approx([4 / 7, 4 / 7, 10 / 7, 10 / 7])
    kind, rows = read_plot_data(emit_plot_data(table, "rho-histogram", bins=2))
    assert kind == "rho-histogram"
    assert [r["count"] for r in rows] == [2, 2]


def test_plot_round_trip(tmp_path):
    table = [{"k": 4, "success": 1}, {"k": 4, "success": 0}, {"k": 8, "success": 1}]
    emit_plot_data(table, "success-vs-k", tmp_path / "p.dat")
    kind, rows = read_plot_data((tmp_path / "p.dat").read_text())
    assert rows == [{"k": 4, "success_rate": 0.5}, {"k": 8, "success_rate": 1.0}]


def test_plot_schema_errors():
    with pytest.raises(SchemaMismatch):
        emit_plot_data([{"k": 1}], "success-vs-k")
    with pytest.raises(SchemaMismatch):
        emit_plot_data([], "pie-chart")
    with pytest.raises(SchemaMismatch):
        read_plot_data("1 2 3\n")


def test_workers_match_serial():
    cfg = ExperimentConfig(mode="sweep", trials=3, seed=5, n=10, delta=3, k=3, pool=5)
    from dataclasses import replace
    assert run_experiment(cfg).csv_text == run_experiment(replace(cfg, workers=2)).csv_text
