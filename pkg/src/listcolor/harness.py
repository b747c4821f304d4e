"""Configured, reproducible experiment runs.

Every trial ``t`` gets ``seed_t = child_seed(base, t)``; inside a trial the
graph, the lists and the coloring draw from ``child_seed(seed_t, 0/1/2)``.
Rows are always emitted in trial order, so outputs are byte-identical for a
given configuration regardless of ``workers``.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .bias import BiasProfile, rho_vector
from .colorer import count_bad_batch, draw_side_a_batch, moser_tardos_color, neighbor_table
from .coupon_lab import coupon_row, random_instance
from .errors import ConfigInvalid, IoFailure, ListColorError, SchemaMismatch
from .graph_core import BipartiteGraph, gen_regular_bipartite, read_graph
from .list_model import ListAssignment, gen_lists, read_lists
from .seeding import child_seed, make_rng

MODES = ("color", "coupon", "sweep")


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "color"
    trials: int = 1
    seed: int = 0
    out: str | None = None
    workers: int = 1
    graph_file: str | None = None
    n: int | None = None
    delta: int | None = None
    lists_file: str | None = None
    k: int | None = None
    pool: int | None = None
    list_mode: str = "independent-uniform"
    theta: float | None = None
    profile: BiasProfile = field(default_factory=BiasProfile.uniform)
    profiles: tuple[BiasProfile, ...] = ()
    max_rounds: int | None = None
    coupon_delta: int = 4
    coupon_k: int = 3
    coupon_pool: int = 6
    draws: int = 10_000

    def validate(self) -> "ExperimentConfig":
        if self.mode not in MODES:
            raise ConfigInvalid(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.trials < 1:
            raise ConfigInvalid("trials must be >= 1")
        if self.workers < 1:
            raise ConfigInvalid("workers must be >= 1")
        if self.mode in ("color", "sweep"):
            if self.graph_file is None and (self.n is None or self.delta is None):
                raise ConfigInvalid("graph needs 'file' or both 'n' and 'delta'")
            if self.lists_file is None and (self.k is None or self.pool is None):
                raise ConfigInvalid("lists need 'file' or both 'k' and 'pool'")
            if self.list_mode == "planted-overlap" and self.theta is None:
                raise ConfigInvalid("planted-overlap lists need 'theta'")
        for path in (self.graph_file, self.lists_file):
            if path is not None and not os.path.isfile(path):
                raise ConfigInvalid(f"file not found: {path}")
        if self.mode == "sweep" and len(self.sweep_profiles) < 1:
            raise ConfigInvalid("sweep needs at least one profile")
        return self

    @property
    def sweep_profiles(self) -> tuple[BiasProfile, ...]:
        if self.profiles:
            return self.profiles
        return tuple(BiasProfile.from_name(k) for k in ("uniform", "linear", "piecewise"))


def _get(section, key, conv, default=None):
    if section is None or key not in section:
        return default
    raw = section[key].strip()
    try:
        return conv(raw)
    except ValueError:
        raise ConfigInvalid(f"bad value for {key!r}: {raw!r}") from None


def parse_profile_list(text: str) -> tuple[BiasProfile, ...]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return tuple(BiasProfile.from_name(nm) for nm in names)
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from None


def parse_config(text: str, base_dir: str | None = None) -> ExperimentConfig:
    """Parse the sectioned ``key = value`` experiment format."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigInvalid(str(exc)) from None
    sec = {name: cp[name] for name in cp.sections()}
    known = {"graph", "lists", "profile", "coupon", "run"}
    unknown = set(sec) - known
    if unknown:
        raise ConfigInvalid(f"unknown sections: {sorted(unknown)}")

    def path(section, key):
        p = _get(section, key, str)
        if p is not None and base_dir and not os.path.isabs(p):
            p = os.path.join(base_dir, p)
        return p

    g, lst, prof, cpn, run = (sec.get(s) for s in ("graph", "lists", "profile", "coupon", "run"))
    try:
        profile = BiasProfile.from_name(
            _get(prof, "profile", str, "uniform"),
            a=_get(prof, "a", float), gamma=_get(prof, "gamma", float), p=_get(prof, "p", float))
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from None
    profiles = parse_profile_list(_get(run, "profiles", str, ""))
    cfg = ExperimentConfig(
        mode=_get(run, "mode", str, "color"),
        trials=_get(run, "trials", int, 1),
        seed=_get(run, "seed", int, 0),
        out=path(run, "out"),
        workers=_get(run, "workers", int, 1),
        graph_file=path(g, "file"),
        n=_get(g, "n", int),
        delta=_get(g, "delta", int),
        lists_file=path(lst, "file"),
        k=_get(lst, "k", int),
        pool=_get(lst, "pool", int),
        list_mode=_get(lst, "mode", str, "independent-uniform"),
        theta=_get(lst, "theta", float),
        profile=profile,
        profiles=profiles,
        max_rounds=_get(run, "max_rounds", int),
        coupon_delta=_get(cpn, "delta", int, 4),
        coupon_k=_get(cpn, "k", int, 3),
        coupon_pool=_get(cpn, "pool", int, 6),
        draws=_get(cpn, "draws", int, 10_000),
    )
    return cfg.validate()


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from None
    return parse_config(text, base_dir=os.path.dirname(os.path.abspath(path)))


# -- instances ---------------------------------------------------------------------------


def build_instance(cfg: ExperimentConfig, trial_seed: int,
                   k: int | None = None) -> tuple[BipartiteGraph, ListAssignment]:
    if cfg.graph_file is not None:
        g = read_graph(cfg.graph_file)
    else:
        g = gen_regular_bipartite(cfg.n, cfg.delta, child_seed(trial_seed, 0))
    if cfg.lists_file is not None:
        lists = read_lists(cfg.lists_file)
        if len(lists) != g.n_vertices:
            raise ConfigInvalid(f"list file has {len(lists)} vertices, graph has {g.n_vertices}")
    else:
        lists = gen_lists(g, k or cfg.k, cfg.pool, cfg.list_mode, child_seed(trial_seed, 1), cfg.theta)
    return g, lists


def paired_bad_counts(g: BipartiteGraph, lists: ListAssignment, profiles: Sequence[BiasProfile],
                      seed: int, table: np.ndarray | None = None) -> list[int]:
    """Bad-vertex counts after one random coloring of A, one per profile.

    All profiles consume the same uniforms (common random numbers).
    """
    u = make_rng(seed).random((1, g.a_size))
    colors = np.concatenate([draw_side_a_batch(lists, p, g.a_size, u) for p in profiles])
    return [int(x) for x in count_bad_batch(g, lists, colors, table)]


# -- trial workers (module level so they pickle) --------------------------------------------


def _color_trial(args) -> dict:
    cfg, t = args
    s = child_seed(cfg.seed, t)
    g, lists = build_instance(cfg, s)
    _, report = moser_tardos_color(g, lists, cfg.profile, cfg.max_rounds, child_seed(s, 2))
    return {
        "trial": t,
        "seed": s,
        "success": int(report.success),
        "rounds": report.rounds,
        "resampled_events": report.resampled_events,
        "initial_bad": report.bad_history[0],
    }


def _coupon_trial(args) -> dict:
    cfg, t = args
    s = child_seed(cfg.seed, t)
    inst = random_instance(cfg.coupon_delta, cfg.coupon_k, cfg.coupon_pool, cfg.profile,
                           child_seed(s, 1))
    row = {"trial": t, "seed": s}
    row.update(coupon_row(inst, cfg.draws, child_seed(s, 2)))
    return row


def _sweep_trial(args) -> list[dict]:
    cfg, t, profiles = args
    s = child_seed(cfg.seed, t)
    g, lists = build_instance(cfg, s)
    counts = paired_bad_counts(g, lists, profiles, child_seed(s, 2))
    nb = max(g.b_size, 1)
    return [{"profile": p.kind, "trial": t, "seed": s, "bad_count": c, "bad_rate": c / nb}
            for p, c in zip(profiles, counts)]


def _map(fn, items: list, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# -- tables and summaries --------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def table_csv(rows: Sequence[dict], columns: Sequence[str] | None = None) -> str:
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def read_table_csv(text: str) -> list[dict]:
    """Reparse a CSV table, converting numeric cells back to numbers."""
    def conv(x: str):
        for f in (int, float):
            try:
                return f(x)
            except ValueError:
                pass
        return x
    return [{k: conv(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None


def proportion_radius(p: float, n: int, z: float = 1.96) -> float:
    return z * math.sqrt(max(p * (1 - p), 0.0) / n) if n else float("nan")


def summarize(mode: str, rows: Sequence[dict]) -> dict:
    """Summary statistics recomputable from the raw rows."""
    if mode == "color":
        n = len(rows)
        rate = sum(r["success"] for r in rows) / n
        return {
            "trials": n,
            "success_rate": rate,
            "mean_rounds": sum(r["rounds"] for r in rows) / n,
            "mean_bad": sum(r["initial_bad"] for r in rows) / n,
            "ci_radius": proportion_radius(rate, n),
        }
    if mode == "coupon":
        n = len(rows)
        exact = [r for r in rows if r["exact_or_na"] != "na"]
        return {
            "trials": n,
            "mean_empirical": sum(r["empirical"] for r in rows) / n,
            "mean_product_bound": sum(r["product_bound"] for r in rows) / n,
            "sandwich_violations": sum(1 for r in exact if r["exact_or_na"] > r["product_bound"] + 1e-12),
        }
    if mode == "sweep":
        out: dict = {}
        for r in rows:
            out.setdefault(r["profile"], []).append(r["bad_count"])
        return {name: {"trials": len(v), "mean_bad": sum(v) / len(v)} for name, v in out.items()}
    raise ConfigInvalid(f"unknown mode {mode!r}")


@dataclass
class ExperimentResult:
    mode: str
    rows: list[dict]
    summary: dict
    csv_text: str


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    trials = list(range(cfg.trials))
    try:
        if cfg.mode == "color":
            rows = _map(_color_trial, [(cfg, t) for t in trials], cfg.workers)
        elif cfg.mode == "coupon":
            rows = _map(_coupon_trial, [(cfg, t) for t in trials], cfg.workers)
        else:
            nested = _map(_sweep_trial, [(cfg, t, cfg.sweep_profiles) for t in trials], cfg.workers)
            rows = [r for block in nested for r in block]
    except ListColorError as exc:
        if isinstance(exc, (ConfigInvalid, IoFailure)):
            raise
        raise ConfigInvalid(f"experiment setup failed: {exc}") from exc
    text = table_csv(rows)
    _write(cfg.out, text)
    return ExperimentResult(cfg.mode, rows, summarize(cfg.mode, rows), text)


# -- paired profile comparison --------------------------------------------------------------


def sign_test_pvalue(wins: int, losses: int) -> float:
    """Two-sided exact sign test, ties dropped."""
    n = wins + losses
    if n == 0:
        return 1.0
    m = min(wins, losses)
    tail = sum(math.comb(n, i) for i in range(m + 1)) / 2 ** n
    return min(1.0, 2 * tail)


@dataclass
class Comparison:
    profiles: list[str]
    trials: int
    counts: list[list[int]]              # counts[trial][profile]
    mean_bad: dict[str, float]
    bad_rate: dict[str, float]
    paired: list[dict]                   # each profile against the first one

    def rows(self) -> list[dict]:
        return [{"trial": t, **{p: c for p, c in zip(self.profiles, row)}}
                for t, row in enumerate(self.counts)]


def _compare_trial(args) -> list[int]:
    cfg, t, profiles, k = args
    s = child_seed(cfg.seed, t)
    g, lists = build_instance(cfg, s, k)
    return paired_bad_counts(g, lists, profiles, child_seed(s, 2))


def _comparison(labels: list[str], counts: list[list[int]], b_size: int) -> Comparison:
    arr = np.array(counts, dtype=float).reshape(len(counts), len(labels))
    mean = {p: float(arr[:, i].mean()) for i, p in enumerate(labels)}
    rate = {p: mean[p] / max(b_size, 1) for p in labels}
    paired = []
    for i in range(1, len(labels)):
        d = arr[:, i] - arr[:, 0]
        wins, losses = int((d < 0).sum()), int((d > 0).sum())
        paired.append({
            "profile": labels[i], "baseline": labels[0],
            "mean_diff": float(d.mean()), "wins": wins, "losses": losses,
            "ties": int((d == 0).sum()), "p_value": sign_test_pvalue(wins, losses),
        })
    return Comparison(labels, len(counts), [list(map(int, r)) for r in counts], mean, rate, paired)


def compare_profiles(cfg: ExperimentConfig, profiles: Sequence[BiasProfile],
                     trials: Sequence[int] | None = None) -> Comparison:
    """Paired-seed bad-vertex comparison; differences are taken against ``profiles[0]``.

    ``trials`` optionally states a trial count per profile; they must agree.
    """
    if len(profiles) < 2:
        raise ConfigInvalid("compare needs at least two profiles")
    if trials is not None:
        if len(trials) != len(profiles) or len(set(trials)) != 1:
            raise ConfigInvalid(f"mismatched trial counts {list(trials)}")
        cfg = replace(cfg, trials=int(trials[0]))
    cfg = replace(cfg, mode="sweep").validate()
    profiles = tuple(profiles)
    labels = [p.kind for p in profiles]
    seen: dict[str, int] = {}
    for i, lab in enumerate(labels):
        seen[lab] = seen.get(lab, 0) + 1
        if seen[lab] > 1:
            labels[i] = f"{lab}#{seen[lab]}"
    counts = _map(_compare_trial, [(cfg, t, profiles, None) for t in range(cfg.trials)], cfg.workers)
    b_size = cfg.n if cfg.graph_file is None else read_graph(cfg.graph_file).b_size
    return _comparison(labels, counts, b_size)


@dataclass
class SweepPoint:
    k: int
    comparison: Comparison

    @property
    def advantage(self) -> bool:
        """The last profile's mean bad count is at most the first's."""
        c = self.comparison
        return c.mean_bad[c.profiles[-1]] <= c.mean_bad[c.profiles[0]]


def bias_advantage_sweep(n: int, delta: int, k_values: Iterable[int], trials: int, seed: int,
                         theta: float = 2 / 3,
                         profiles: Sequence[BiasProfile] = (BiasProfile.uniform(), BiasProfile.piecewise()),
                         ) -> list[SweepPoint]:
    """Paired comparison across list sizes on planted-overlap regular instances.

    One graph per trial is shared by every ``k``; lists and uniforms are
    derived from the trial seed so all profiles see identical randomness.
    """
    ks = list(k_values)
    labels = [p.kind for p in profiles]
    per_k: dict[int, list[list[int]]] = {k: [] for k in ks}
    for t in range(trials):
        s = child_seed(seed, t)
        g = gen_regular_bipartite(n, delta, child_seed(s, 0))
        table = neighbor_table(g)
        for k in ks:
            pool = max(k, round(k / theta))
            lists = gen_lists(g, k, pool, "planted-overlap", child_seed(s, 1), theta)
            per_k[k].append(paired_bad_counts(g, lists, profiles, child_seed(s, 2), table))
    return [SweepPoint(k, _comparison(labels, per_k[k], n)) for k in ks]


# -- plot data --------------------------------------------------------------------------------

PLOT_KINDS = {
    "success-vs-k": (("k", "success"), ("k", "success_rate")),
    "rho-histogram": (("rho",), ("bin_lo", "bin_hi", "count")),
    "bound-vs-empirical": (("analytic_bound", "empirical"), ("analytic_bound", "empirical")),
}


def rho_table(profile: BiasProfile, lists: ListAssignment, g: BipartiteGraph) -> list[dict]:
    """One row per ``(w, c)`` with ``c`` in ``L(w)``."""
    rows = []
    for w in g.b_vertices:
        for c, r in zip(lists.lists[w], rho_vector(profile, lists, g, w)):
            rows.append({"w": w, "c": c, "rho": r})
    return rows


def _plot_rows(table: Sequence[dict], kind: str, bins: int) -> list[dict]:
    if kind == "success-vs-k":
        agg: dict = {}
        for r in table:
            agg.setdefault(r["k"], []).append(float(r["success"]))
        return [{"k": k, "success_rate": sum(v) / len(v)} for k, v in sorted(agg.items())]
    if kind == "rho-histogram":
        vals = np.array([float(r["rho"]) for r in table])
        lo, hi = float(vals.min()), float(vals.max())
        if hi == lo:
            hi = lo + 1.0
        counts, edges = np.histogram(vals, bins=bins, range=(lo, hi))
        return [{"bin_lo": float(edges[i]), "bin_hi": float(edges[i + 1]), "count": int(counts[i])}
                for i in range(bins)]
    rows = []
    for r in table:
        if r["analytic_bound"] == "na" or r["empirical"] == "na":
            continue
        rows.append({"analytic_bound": float(r["analytic_bound"]), "empirical": float(r["empirical"])})
    return rows


def emit_plot_data(table: Sequence[dict], kind: str, path: str | os.PathLike | None = None,
                   bins: int = 10) -> str:
    """Whitespace-separated plot data with a ``#`` header naming kind and columns."""
    if kind not in PLOT_KINDS:
        raise SchemaMismatch(f"unknown plot kind {kind!r}")
    needs, columns = PLOT_KINDS[kind]
    if table:
        missing = [c for c in needs if c not in table[0]]
        if missing:
            raise SchemaMismatch(f"{kind} needs columns {missing}")
        rows = _plot_rows(table, kind, bins)
    else:
        rows = []
    lines = [f"# kind: {kind}", f"# columns: {' '.join(columns)}"]
    lines += [" ".join(_fmt(r[c]) for c in columns) for r in rows]
    text = "\n".join(lines) + "\n"
    if path is not None:
        _write(os.fspath(path), text)
    return text


def read_plot_data(text: str) -> tuple[str, list[dict]]:
    kind, columns, rows = None, None, []
    for ln in text.splitlines():
        if ln.startswith("# kind:"):
            kind = ln.split(":", 1)[1].strip()
        elif ln.startswith("# columns:"):
            columns = ln.split(":", 1)[1].split()
        elif ln.strip() and not ln.startswith("#"):
            if columns is None:
                raise SchemaMismatch("data before column header")
            vals = ln.split()
            rows.append({c: (int(v) if c in ("k", "count") else float(v)) for c, v in zip(columns, vals)})
    if kind is None or columns is None:
        raise SchemaMismatch("missing plot header")
    return kind, rows
