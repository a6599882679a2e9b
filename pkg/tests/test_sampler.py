import json
import math
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netforge.errors import InfeasibleSequenceError, ParameterError
from netforge.sampler import (
    DegreeSequence,
    PowerLawSpec,
    build_degree_sequence,
    resolve_kmax,
    round_half_up,
    truncated_pmf,
)

from .oracles import pmf_direct

GOLDEN = Path(__file__).parent / "golden"


def test_pmf_two_atoms():
    p = truncated_pmf(PowerLawSpec(2, 1, 10), 2)
    assert p[1] == pytest.approx(0.8, abs=1e-15)
    assert p[2] == pytest.approx(0.2, abs=1e-15)


def test_pmf_single_atom():
    p = truncated_pmf(PowerLawSpec(1.5, 3, 10), 3)
    assert p == {3: 1.0}


def test_pmf_matches_direct_sum():
    p = truncated_pmf(PowerLawSpec(2, 1, 300), 27)
    ref = pmf_direct(2, 1, 27)
    assert p[1] == pytest.approx(0.6217, abs=5e-5)
    for k in ref:
        assert p[k] == pytest.approx(ref[k], rel=1e-12)


@pytest.mark.parametrize("kmax", [0, 300, 1000])
def test_pmf_rejects_bad_range(kmax):
    with pytest.raises(ParameterError):
        truncated_pmf(PowerLawSpec(2, 1, 300), kmax)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(gamma=1.0, kmin=1, n_nodes=10),
        dict(gamma=2, kmin=0, n_nodes=10),
        dict(gamma=2, kmin=10, n_nodes=10),
        dict(gamma=2, kmin=1, n_nodes=1),
        dict(gamma=2, kmin=1, n_nodes=10, occurrence_threshold=0),
        dict(gamma=2, kmin=3, n_nodes=10, kmax_override=2),
        dict(gamma=2, kmin=1, n_nodes=10, kmax_override=10),
    ],
)
def test_spec_validation(kwargs):
    with pytest.raises(ParameterError):
        PowerLawSpec(**kwargs)


def test_resolve_kmax_override_is_returned_unchanged():
    assert resolve_kmax(PowerLawSpec(2, 1, 300, kmax_override=27)) == 27


def test_resolve_kmax_two_nodes():
    assert resolve_kmax(PowerLawSpec(2, 1, 2)) == 1


@pytest.mark.parametrize("case", json.loads((GOLDEN / "resolve_kmax.json").read_text()))
def test_resolve_kmax_golden(case):
    spec = PowerLawSpec(case["gamma"], case["kmin"], case["n_nodes"], case["threshold"])
    assert resolve_kmax(spec) == case["kmax"]


def test_sequence_two_nodes_forced():
    seq = build_degree_sequence(PowerLawSpec(2, 1, 2, kmax_override=1))
    assert seq.targets == (1, 1)
    assert seq.edge_budget == 1


@pytest.mark.parametrize(
    "gamma,kmin,kmax,published",
    [(2, 1, 27, 347), (2, 2, 43, 761), (2.4, 2, 30, 559)],
)
def test_pinned_edge_budget_near_published(gamma, kmin, kmax, published):
    seq = build_degree_sequence(PowerLawSpec(gamma, kmin, 300, kmax_override=kmax))
    assert abs(seq.edge_budget - published) <= 0.1 * published
    assert seq.n_nodes == 300


def test_group_a_sequence_exact():
    seq = build_degree_sequence(PowerLawSpec(2, 1, 300, kmax_override=27))
    assert seq.degree_sum == 693
    assert seq.edge_budget == 347
    assert seq.counts()[1] == 187
    assert seq.kmax == 19
    assert seq.support_kmax == 27


def test_sequence_is_descending():
    seq = build_degree_sequence(PowerLawSpec(2.4, 2, 300, kmax_override=30))
    assert list(seq.targets) == sorted(seq.targets, reverse=True)


def test_infeasible_sequence():
    # a steep law puts almost every node at degree 1: too few edges for a tree
    with pytest.raises(InfeasibleSequenceError):
        build_degree_sequence(PowerLawSpec(6, 1, 50))


def test_round_half_up():
    assert round_half_up(346.5) == 347
    assert round_half_up(2.5) == 3
    assert round_half_up(0.49) == 0


def test_from_targets():
    seq = DegreeSequence.from_targets([1, 2, 1])
    assert seq.targets == (2, 1, 1)
    assert seq.edge_budget == 2
    assert seq.kmin == 1


gammas = st.floats(min_value=1.05, max_value=4.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(gamma=gammas, kmin=st.integers(1, 10), width=st.integers(0, 80))
def test_pmf_normalized(gamma, kmin, width):
    spec = PowerLawSpec(gamma, kmin, kmin + width + 2)
    p = truncated_pmf(spec, kmin + width)
    assert abs(math.fsum(p.values()) - 1.0) < 1e-12


@settings(max_examples=100, deadline=None)
@given(gamma=gammas, kmin=st.integers(1, 4), n=st.integers(20, 600))
def test_sequence_length_and_range(gamma, kmin, n):
    spec = PowerLawSpec(gamma, kmin, n)
    try:
        seq = build_degree_sequence(spec)
    except InfeasibleSequenceError:
        return
    assert len(seq.targets) == n
    lo, hi = min(seq.targets), max(seq.targets)
    assert lo >= kmin
    assert hi <= resolve_kmax(spec)
    assert build_degree_sequence(spec) == seq


@settings(max_examples=100, deadline=None)
@given(
    gamma=gammas,
    kmin=st.integers(1, 4),
    n=st.integers(10, 600),
    t1=st.floats(0.01, 3.0),
    t2=st.floats(0.01, 3.0),
)
def test_threshold_monotone(gamma, kmin, n, t1, t2):
    lo, hi = sorted((t1, t2))
    k_lo = resolve_kmax(PowerLawSpec(gamma, kmin, n, occurrence_threshold=lo))
    k_hi = resolve_kmax(PowerLawSpec(gamma, kmin, n, occurrence_threshold=hi))
    assert k_hi <= k_lo
