"""Command line entry point: ``diglab <subcommand> ...``."""
import argparse
import json
import logging
import sys
from dataclasses import asdict

from .components import (BOWTIE_PARTS, bowtie, condition_counters, giant_stats,
                         weak_components)
from .core import ClosureLimitError, read_edgelist, scc_decompose, write_edgelist
from .experiment import ExperimentConfig, run_sweep, verify
from .generators import DegreeLaw, GeneratorSpec, generate
from .local import census, census_split, census_to_json, simulate_limit_census
from .theory import solve_limits, zeta_geq_k_proxy


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _param(text):
    key, _, value = text.partition("=")
    return key.replace("-", "_"), int(value)


def cmd_generate(args):
    if args.model == "er":
        spec = GeneratorSpec("er", args.n, args.seed, {"lam": args.lam})
    elif args.model == "cm":
        spec = GeneratorSpec("cm", args.n, args.seed, {"law": args.law, "simple": args.simple})
    else:
        params = dict(_param(p) for p in args.param)
        params["name"] = args.name
        spec = GeneratorSpec("fixture", args.n or 1, args.seed, params)
    g, info = generate(spec)
    write_edgelist(g, args.out)
    for key, value in info.items():
        print(f"{key}: {value}", file=sys.stderr)


def analyze_report(g, k_list, pairs="auto", seed=0):
    """Structured single-graph report, as written by ``diglab analyze``."""
    scc = scc_decompose(g)
    gs = giant_stats(g, scc)
    report = {"n": g.n, "m": g.m}
    giant = asdict(gs)
    giant["degree_census_in_giant"] = [[l, m, c] for (l, m), c in gs.degree_census_in_giant.items()]
    report["giant_stats"] = giant
    report["condition_counters"] = [asdict(condition_counters(g, scc, k, pairs, seed))
                                    for k in k_list]
    report["bowtie"] = bowtie(g, scc).sizes()
    try:
        wc = weak_components(g, scc)
        report["weak_components"] = {
            "i_max": wc.i_max, "o_max": wc.o_max,
            "undirected_count": int(wc.undirected.max()) + 1 if g.n else 0,
            "undirected": wc.undirected.tolist(),
            "gkm_count": int(wc.gkm.max()) + 1 if g.n else 0,
            "gkm": wc.gkm.tolist()}
    except ClosureLimitError as exc:
        wc = exc.partial
        report["weak_components"] = {
            "i_max": None, "o_max": None,
            "undirected_count": int(wc.undirected.max()) + 1,
            "undirected": wc.undirected.tolist(),
            "gkm_count": None, "gkm": None, "refused": str(exc)}
    return report


def _pairs(text):
    if text in ("exact", "auto"):
        return text
    kind, _, budget = text.partition(":")
    if kind != "montecarlo" or not budget:
        raise argparse.ArgumentTypeError("--pairs takes exact, auto or montecarlo:S")
    return int(budget)


def cmd_analyze(args):
    g = read_edgelist(args.input)
    report = analyze_report(g, args.k, args.pairs, args.seed)
    _emit(report, args.out)


def _emit(obj, path):
    text = json.dumps(obj, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_census(args):
    if args.bp:
        c = simulate_limit_census(DegreeLaw.parse(args.bp), args.r, args.reps, args.seed)
        _emit(census_to_json(c), args.out)
        return
    if not args.input:
        raise SystemExit("census needs --in FILE or --bp LAW")
    g = read_edgelist(args.input)
    sample = args.sample if args.sample == "all" else int(args.sample)
    if args.split_giant:
        giant, rest = census_split(g, scc_decompose(g), args.r, sample, args.seed)
        _emit({"giant": census_to_json(giant), "complement": census_to_json(rest)}, args.out)
    else:
        _emit(census_to_json(census(g, args.r, sample, args.seed)), args.out)


def cmd_limits(args):
    lim = solve_limits(DegreeLaw.parse(args.law))
    out = lim.as_dict()
    if args.k_list:
        estimates = zeta_geq_k_proxy(lim.law, args.k_list, args.reps, args.seed)
        out["zeta_geq_k"] = {str(k): {"estimate": est, "se": se}
                             for k, (est, se) in zip(args.k_list, estimates)}
    _emit(out, args.out)


def cmd_sweep(args):
    rows = run_sweep(ExperimentConfig.load(args.config), resume=args.resume)
    print(f"{len(rows)} rows written", file=sys.stderr)


def cmd_verify(args):
    report = verify(ExperimentConfig.load(args.config))
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def build_parser():
    p = argparse.ArgumentParser(prog="diglab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("generate", help="write a generated digraph as an edge list")
    s.add_argument("--model", choices=["er", "cm", "fixture"], required=True)
    s.add_argument("--n", type=int, default=0, help="number of vertices")
    s.add_argument("--lambda", dest="lam", type=float, default=1.0, help="ER mean degree")
    s.add_argument("--law", default="regular:2", help="poisson:L | regular:D | file:LAW.json")
    s.add_argument("--simple", action="store_true", help="erase self-loops and multi-edges")
    s.add_argument("--name", help="fixture name")
    s.add_argument("--param", action="append", default=[], help="fixture argument KEY=INT")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("analyze", help="component statistics report")
    s.add_argument("--in", dest="input", required=True, help="edge-list file")
    s.add_argument("--k", type=_int_list, default=[1], help="comma-separated thresholds")
    s.add_argument("--pairs", type=_pairs, default="auto",
                   help="exact | montecarlo:S | auto (exact below the closure limit)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("census", help="neighbourhood census of a graph or a limit law")
    s.add_argument("--in", dest="input", help="edge-list file")
    s.add_argument("--bp", help="simulate the limit of LAW instead of reading a graph")
    s.add_argument("--r", type=int, default=2, help="ball radius")
    s.add_argument("--sample", default="all", help="all or a number of sampled roots")
    s.add_argument("--split-giant", action="store_true",
                   help="separate roots in the largest SCC from the rest")
    s.add_argument("--reps", type=int, default=100_000, help="limit samples with --bp")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("limits", help="limit values of a degree law")
    s.add_argument("--law", required=True, help="poisson:L | regular:D | file:LAW.json")
    s.add_argument("--k-list", type=_int_list, default=[],
                   help="thresholds for the two-tree proxy of P(both reaches >= k)")
    s.add_argument("--reps", type=int, default=100_000, help="proxy replicates")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_limits)

    s = sub.add_parser("sweep", help="run a configured sweep")
    s.add_argument("--config", required=True, help="JSON sweep config")
    s.add_argument("--resume", action="store_true", help="skip rows already in sweep.csv")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("verify", help="check a sweep against its tolerance table")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())
