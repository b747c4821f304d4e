"""Command line entry point: ``listcolor <subcommand> ...``.

Exit codes: 0 ok, 1 configuration or input error, 2 run failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace

from .bias import BiasProfile, list_size_k
from .colorer import format_coloring, moser_tardos_color
from .coupon_lab import COUPON_COLUMNS, coupon_row, random_instance
from .errors import CertificateFailed, ConfigInvalid, FormatError, IoFailure, ListColorError
from .graph_core import read_graph
from .harness import compare_profiles, load_config, parse_profile_list, run_experiment, table_csv
from .list_model import format_lists, read_lists, stats_csv
from .optimizer import coefficient_certificate
from .oracle import choosability, choosable, l_colorable

EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None


def _profile(args) -> BiasProfile:
    return BiasProfile.from_name(args.profile, a=args.a, gamma=args.gamma)


def cmd_color(args) -> int:
    g = read_graph(args.graph)
    lists = read_lists(args.lists)
    if len(lists) != g.n_vertices:
        raise ConfigInvalid(f"list file covers {len(lists)} vertices, graph has {g.n_vertices}")
    coloring, report = moser_tardos_color(g, lists, _profile(args), args.max_rounds, args.seed)
    if coloring is not None:
        _emit(format_coloring(coloring), args.out)
    payload = json.dumps(report.to_dict(), sort_keys=True) + "\n"
    if args.report:
        _emit(payload, args.report)
    else:
        sys.stderr.write(payload)
    if args.stats:
        _emit(stats_csv(lists, g), args.stats)
    return EXIT_OK if report.success else EXIT_FAIL


def cmd_coupon(args) -> int:
    pool = args.pool if args.pool is not None else max(args.k, round(1.5 * args.k))
    inst = random_instance(args.delta, args.k, pool, _profile(args), args.seed, args.p_cap)
    row = coupon_row(inst, args.trials, args.seed)
    _emit(table_csv([row], COUPON_COLUMNS), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = read_graph(args.graph)
    if args.action == "choosability":
        ch = choosability(g, args.pool)
        lines = [f"choosability {ch}\n"]
        if ch > 1:
            _, cx = choosable(g, ch - 1, args.pool)
            lines.append(f"# counterexample for k={ch - 1}\n")
            lines.append(format_lists(cx))
        _emit("".join(lines), args.out)
        return EXIT_OK
    if args.lists is None:
        raise ConfigInvalid("oracle lcolor needs --lists")
    lists = read_lists(args.lists)
    ok, witness = l_colorable(g, lists)
    _emit(f"colorable {str(ok).lower()}\n" + (format_coloring(witness) if ok else ""), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_optimize(args) -> int:
    try:
        cert = coefficient_certificate(args.grid_step)
    except CertificateFailed as exc:
        sys.stderr.write(str(exc))
        return EXIT_FAIL
    _emit(cert.to_json() if args.json else cert.to_text(), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["out"] = args.out
    if overrides:
        cfg = replace(cfg, **overrides).validate()
    result = run_experiment(cfg)
    if cfg.out is None:
        sys.stdout.write(result.csv_text)
    sys.stderr.write(json.dumps(result.summary, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.workers is not None:
        cfg = replace(cfg, workers=args.workers)
    profiles = parse_profile_list(args.profiles)
    cmp = compare_profiles(cfg, profiles)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["profile", "baseline", "mean_bad", "bad_rate", "mean_diff", "wins", "losses", "ties", "p_value"])
    base = cmp.profiles[0]
    w.writerow([base, base, repr(cmp.mean_bad[base]), repr(cmp.bad_rate[base]), "", "", "", "", ""])
    for row in cmp.paired:
        p = row["profile"]
        w.writerow([p, base, repr(cmp.mean_bad[p]), repr(cmp.bad_rate[p]), repr(row["mean_diff"]),
                    row["wins"], row["losses"], row["ties"], repr(row["p_value"])])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_ksize(args) -> int:
    k = list_size_k(args.delta, _profile(args))
    _emit(f"{k}\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--workers", type=int, default=None)

    prof = argparse.ArgumentParser(add_help=False)
    prof.add_argument("--profile", choices=("uniform", "linear", "piecewise"), default="uniform")
    prof.add_argument("--a", type=float, default=None)
    prof.add_argument("--gamma", type=float, default=None)

    parser = argparse.ArgumentParser(prog="listcolor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("color", parents=[common, prof], help="color a graph from list file")
    p.add_argument("--graph", required=True)
    p.add_argument("--lists", required=True)
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--report", default=None, help="JSON report path (default stderr)")
    p.add_argument("--stats", default=None, help="also write per-vertex overlap CSV")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("coupon", parents=[common, prof], help="coupon collection probabilities")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pool", type=int, default=None)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--p-cap", type=float, default=None)
    p.set_defaults(func=cmd_coupon)

    p = sub.add_parser("oracle", parents=[common], help="exact small-instance answers")
    p.add_argument("action", choices=("choosability", "lcolor"))
    p.add_argument("--graph", required=True)
    p.add_argument("--lists", default=None)
    p.add_argument("--pool", type=int, default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("optimize", parents=[common], help="coefficient certificate")
    p.add_argument("action", choices=("certify",))
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("experiment", parents=[common], help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("compare", parents=[common], help="paired profile comparison")
    p.add_argument("--config", required=True)
    p.add_argument("--profiles", default="uniform,piecewise")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ksize", parents=[common, prof], help="list size rule for a max degree")
    p.add_argument("--delta", type=int, required=True)
    p.set_defaults(func=cmd_ksize)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in ("color", "coupon") and args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except (ConfigInvalid, FormatError, IoFailure, FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except ListColorError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
