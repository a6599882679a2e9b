"""Acceptance criteria, each printing a single PASS/FAIL verdict line.

The group runs use the bundled nine-group configuration at its full scale
(N = 300, 100000 iterations). They take several minutes in total on one core.
"""

import dataclasses
import itertools
import math
import statistics

import numpy as np
import pytest

from netforge.experiment import bundled_config_path, load_config, run_group
from netforge.fitting import DegreeHistogram, fit_gamma, histogram_from_degrees
from netforge.graph import (
    Graph,
    average_shortest_path,
    clustering_coefficient,
    is_connected,
    random_connected_graph,
)
from netforge.optimizer import run
from netforge.sampler import PowerLawSpec, build_degree_sequence, truncated_pmf

from .acceptance_log import record
from .cases import random_case
from .oracles import cc_triples, floyd_warshall_apl, pmf_direct, random_graph_edges, union_find_connected

pytestmark = pytest.mark.slow


def group(label, **changes):
    cfg = next(g for g in load_config(bundled_config_path()) if g.label == label)
    return dataclasses.replace(cfg, **changes)


def test_criterion_1_group_a_clustering_and_exponent():
    st = run_group(group("A"))
    cc, gamma = st.avg("cc"), st.avg("gamma_ls")
    ok = abs(cc - 0.06) <= 0.005 and abs(gamma - 2.05692) <= 0.25
    record(1, ok, f"group A, {len(st.records)} runs: Avg(cc)={cc:.6f} (0.06 +- 0.005), "
                  f"Avg(gamma' LS)={gamma:.5f} (2.05692 +- 0.25)")
    assert len(st.records) == 30
    assert ok


def test_criterion_2_group_d_path_length():
    st = run_group(group("D", repetitions=10))
    y = st.avg("apl")
    ok = abs(y - 5.6999) <= 0.05
    record(2, ok, f"group D, {len(st.records)} runs at full scale: Avg(y)={y:.5f} (5.6999 +- 0.05)")
    assert ok


def test_criterion_3_group_h_both_constraints():
    st = run_group(group("H", repetitions=5))
    ccs, ys = st.values("cc"), st.values("apl")
    per_run = [abs(c - 0.6) <= 0.02 and abs(y - 5.7) <= 0.1 for c, y in zip(ccs, ys)]
    ok = all(per_run)
    record(3, ok, f"group H, {len(ccs)} runs: cc={[round(c, 4) for c in ccs]} (0.6 +- 0.02), "
                  f"y={[round(y, 4) for y in ys]} (5.7 +- 0.1); "
                  f"{sum(per_run)}/{len(per_run)} runs inside; Avg(cc)={statistics.fmean(ccs):.4f}")
    assert ok


def test_criterion_4_oracle_equivalence():
    rng = np.random.default_rng(4)
    cc_err = apl_err = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        edges = random_graph_edges(rng, n, rng.uniform(0.05, 0.9))
        cc_err = max(cc_err, abs(clustering_coefficient(Graph(n, edges)) - cc_triples(n, edges)))
    for _ in range(1000):
        n = int(rng.integers(2, 13))
        g = random_connected_graph(n, int(rng.integers(n - 1, n * (n - 1) // 2 + 1)), rng)
        apl_err = max(apl_err, abs(average_shortest_path(g) - floyd_warshall_apl(n, g.edges())))
    mismatches = checked = 0
    for n in range(1, 7):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            edges = [p for i, p in enumerate(pairs) if mask >> i & 1]
            checked += 1
            mismatches += is_connected(Graph(n, edges)) != union_find_connected(n, edges)
    ok = cc_err < 1e-12 and apl_err < 1e-12 and mismatches == 0
    record(4, ok, f"max |cc err|={cc_err:.1e}, max |apl err|={apl_err:.1e} over 1000 graphs each; "
                  f"connectivity mismatches {mismatches}/{checked} graphs with N<=6")
    assert ok


def test_criterion_5_optimizer_invariants():
    rng = np.random.default_rng(5)
    failures = []
    for case in range(100):
        seq, obj, cfg = random_case(rng)
        totals = []

        def check(it, g, ev):
            if g.n_edges != seq.edge_budget:
                failures.append(f"case {case}: edge count {g.n_edges} at iteration {it}")
            if not union_find_connected(g.n_nodes, g.edges()):
                failures.append(f"case {case}: disconnected at iteration {it}")
            totals.append(ev.total)

        first = run(seq, obj, cfg, on_accept=check)
        if any(b >= a for a, b in zip([first.initial_eval.total] + totals, totals)):
            failures.append(f"case {case}: accepted objective not strictly decreasing")
        again = run(seq, obj, cfg)
        if again.trace != first.trace or again.final_graph != first.final_graph:
            failures.append(f"case {case}: rerun differs")
    ok = not failures
    record(5, ok, f"100 random configurations (N<=50): {len(failures)} violations"
                  + (f", first: {failures[0]}" if failures else ""))
    assert ok, failures[:5]


def test_criterion_6_sampler():
    worst = 0.0
    for gamma, kmin, width in itertools.product((1.5, 2.0, 2.4, 3.0, 3.5), (1, 2, 3, 5), (0, 5, 40, 200)):
        kmax = kmin + width
        p = truncated_pmf(PowerLawSpec(gamma, kmin, kmax + 2), kmax)
        worst = max(worst, abs(math.fsum(p.values()) - 1.0))
        ref = pmf_direct(gamma, kmin, kmax)
        worst = max(worst, max(abs(p[k] - ref[k]) for k in ref))
    lengths_ok = all(
        len(build_degree_sequence(PowerLawSpec(g, k, n)).targets) == n
        for g, k, n in [(2.0, 1, 300), (2.0, 2, 300), (2.4, 2, 300), (2.2, 2, 1000), (2.0, 2, 57)]
    )
    budgets = {}
    for gamma, kmin, kmax, published in [(2, 1, 27, 347), (2, 2, 43, 761), (2.4, 2, 30, 559)]:
        seq = build_degree_sequence(PowerLawSpec(gamma, kmin, 300, kmax_override=kmax))
        budgets[published] = seq.edge_budget
    budgets_ok = all(abs(e - pub) <= 0.1 * pub for pub, e in budgets.items())
    ok = worst < 1e-12 and lengths_ok and budgets_ok
    record(6, ok, f"pmf error {worst:.1e}; lengths exact: {lengths_ok}; "
                  f"E derived {budgets} (published -> derived, +-10%)")
    assert ok


def test_criterion_7_fitting():
    rng = np.random.default_rng(7)
    lines, ok = [], True
    for gamma, kmin, kmax in [(2.0, 1, 27), (2.0, 2, 43), (2.4, 1, 30), (2.4, 2, 30)]:
        pairs = tuple((k, round(1e9 * k ** -gamma)) for k in range(kmin, kmax + 1))
        ls = fit_gamma(DegreeHistogram(pairs, sum(c for _, c in pairs)), kmin).gamma_hat
        pmf = pmf_direct(gamma, kmin, kmax)
        sample = rng.choice(list(pmf), size=10_000, p=list(pmf.values()))
        mle = fit_gamma(histogram_from_degrees(sample), kmin, "mle", kmax=kmax).gamma_hat
        ok &= abs(ls - gamma) <= 0.01 and abs(mle - gamma) <= 0.05
        lines.append(f"({gamma},{kmin},{kmax}) LS={ls:.4f} MLE={mle:.4f}")
    record(7, ok, "; ".join(lines))
    assert ok
