"""``netforge`` command line: sample, generate, batch, measure."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .errors import FitError, NetforgeError
from .experiment import bundled_config_path, load_config, run_batch
from .fitting import LEAST_SQUARES, MAX_LIKELIHOOD, fit_gamma, histogram
from .graph import (
    average_shortest_path,
    clustering_coefficient,
    is_connected,
    read_edgelist,
    write_edgelist,
)
from .objective import MATCHING_MODES, ObjectiveSpec, default_apl_target
from .optimizer import MOVE_KINDS, OptimizerConfig, run
from .sampler import PowerLawSpec, build_degree_sequence


def _power_law(args) -> PowerLawSpec:
    return PowerLawSpec(
        gamma=args.gamma,
        kmin=args.kmin,
        n_nodes=args.nodes,
        occurrence_threshold=args.threshold,
        kmax_override=args.kmax,
    )


def cmd_sample(args) -> int:
    seq = build_degree_sequence(_power_law(args))
    for k, count in sorted(seq.counts().items(), reverse=True):
        print(f"{k} {count}")
    print(f"kmax={seq.kmax}")
    print(f"E={seq.edge_budget}")
    return 0


def cmd_generate(args) -> int:
    seq = build_degree_sequence(_power_law(args))
    if args.edges is not None:
        seq = dataclasses.replace(seq, edge_budget=args.edges)
    apl = args.apl
    if apl == "ln":
        apl = default_apl_target(args.nodes)
    elif apl is not None:
        apl = float(apl)
    obj = ObjectiveSpec(
        targets=seq,
        cc_target=args.cc,
        apl_target=apl,
        theta=args.theta,
        phi=args.phi,
        matching=args.matching,
    )
    cfg = OptimizerConfig(
        iterations=args.iters,
        rng_seed=args.seed,
        incremental_cc=not args.full_cc,
        move=args.move,
    )
    result = run(seq, obj, cfg)
    write_edgelist(result.final_graph, args.out)
    if args.trace:
        lines = ["iter total degree_term cc_term apl_term"]
        lines += [p.format() for p in result.trace]
        Path(args.trace).write_text("\n".join(lines) + "\n")

    ev = result.final_eval
    g = result.final_graph
    print(f"nodes={g.n_nodes}")
    print(f"edges={g.n_edges}")
    print(f"total={ev.total!r}")
    print(f"degree_term={ev.degree_term!r}")
    print(f"cc={clustering_coefficient(g)!r}")
    print(f"apl={average_shortest_path(g)!r}")
    print(f"accepted={result.accepted_count}")
    print(f"rejected_disconnected={result.rejected_disconnected_count}")
    print(f"iterations={result.iterations_done}")
    if result.budget_exhausted:
        print("budget_exhausted=true")
    return 0


def cmd_batch(args) -> int:
    path = bundled_config_path() if args.config == "bundled" else Path(args.config)
    groups = load_config(path)
    if args.groups:
        wanted = set(args.groups.split(","))
        groups = [g for g in groups if g.label in wanted]
    overrides = {}
    if args.repetitions is not None:
        overrides["repetitions"] = args.repetitions
    if args.iters is not None:
        overrides["iterations"] = args.iters
    if args.move is not None:
        overrides["move"] = args.move
    if overrides:
        groups = [dataclasses.replace(g, **overrides) for g in groups]
    stats = run_batch(groups, args.out, parallel=args.parallel, trace=args.trace)
    for st in stats:
        print(
            f"{st.config.label} runs={len(st.records)} "
            f"gamma_ls={st.avg('gamma_ls'):.5f}+-{st.std('gamma_ls'):.5f} "
            f"apl={st.avg('apl'):.5f}+-{st.std('apl'):.5f} "
            f"cc={st.avg('cc'):.5f}+-{st.std('cc'):.5f}"
        )
    print(f"report={Path(args.out) / 'report.csv'}")
    return 0


def cmd_measure(args) -> int:
    g = read_edgelist(args.file)
    h = histogram(g)
    kmin = args.kmin if args.kmin is not None else max(1, h.pairs[0][0])
    print(f"nodes={g.n_nodes}")
    print(f"edges={g.n_edges}")
    print(f"cc={clustering_coefficient(g)!r}")
    if is_connected(g):
        print(f"apl={average_shortest_path(g)!r}")
    else:
        print("apl=disconnected")
    for method, kmax in ((LEAST_SQUARES, None), (MAX_LIKELIHOOD, h.max_degree)):
        try:
            fit = fit_gamma(h, kmin, method, kmax=max(kmax, kmin) if kmax else None)
            print(f"gamma_{method}={fit.gamma_hat!r}")
        except FitError as exc:
            print(f"gamma_{method}=nan  # {exc}")
    print("# degree count")
    for k, c in h.pairs:
        print(f"{k} {c}")
    return 0


def _add_power_law_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=float, required=True, help="power-law exponent (> 1)")
    p.add_argument("--kmin", type=int, required=True, help="minimum degree")
    p.add_argument("--nodes", type=int, required=True, help="number of nodes N")
    p.add_argument("--kmax", type=int, default=None, help="pin the maximum degree")
    p.add_argument("--threshold", type=float, default=0.3,
                   help="expected-count cutoff used to pick kmax (default 0.3)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netforge", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="print the target degree sequence")
    _add_power_law_args(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("generate", help="optimize one network")
    _add_power_law_args(p)
    p.add_argument("--edges", type=int, default=None, help="override the edge budget E")
    p.add_argument("--cc", type=float, default=None, help="clustering target")
    p.add_argument("--apl", nargs="?", const="ln", default=None,
                   help="average shortest path target; bare flag means ln(N)")
    p.add_argument("--theta", type=float, default=1.0, help="weight of the APL penalty")
    p.add_argument("--phi", type=float, default=1.0, help="weight of the clustering penalty")
    p.add_argument("--iters", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--matching", choices=MATCHING_MODES, default="sorted")
    p.add_argument("--move", choices=tuple(MOVE_KINDS), default="endpoint",
                   help="rewire proposal: endpoint shift (default) or uniform edge + non-edge pair")
    p.add_argument("--full-cc", action="store_true",
                   help="recompute clustering from scratch every step")
    p.add_argument("--trace", default=None, help="write accepted steps to this file")
    p.add_argument("--out", required=True, help="edge-list output file")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("batch", help="run every group of a config file")
    p.add_argument("--config", required=True, help="config file, or 'bundled' for the shipped nine groups")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--groups", default=None, help="comma-separated subset of group labels")
    p.add_argument("--repetitions", type=int, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--move", choices=tuple(MOVE_KINDS), default=None,
                   help="override every group's rewire proposal")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("measure", help="report traits of an edge-list file")
    p.add_argument("file")
    p.add_argument("--kmin", type=int, default=None, help="lower cutoff for the exponent fits")
    p.set_defaults(func=cmd_measure)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except NetforgeError as exc:
        print(f"netforge: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
