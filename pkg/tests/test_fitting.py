import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netforge.errors import FitError, ParameterError
from netforge.fitting import DegreeHistogram, fit_gamma, histogram, histogram_from_degrees
from netforge.graph import Graph

from .oracles import pmf_direct


def exact_histogram(gamma, kmin, kmax, scale=10**9):
    pairs = tuple((k, round(scale * k ** -gamma)) for k in range(kmin, kmax + 1))
    return DegreeHistogram(pairs, sum(c for _, c in pairs))


def test_histogram_k4():
    g = Graph(4, list(itertools.combinations(range(4), 2)))
    assert histogram(g).pairs == ((3, 4),)


def test_histogram_star():
    g = Graph(5, [(0, i) for i in range(1, 5)])
    h = histogram(g)
    assert h.as_dict() == {1: 4, 4: 1}
    assert h.max_degree == 4


@pytest.mark.parametrize(
    "pairs,n",
    [(((2, 1), (1, 1)), 2), (((1, 0),), 0), (((1, 2),), 3)],
)
def test_histogram_validation(pairs, n):
    with pytest.raises(ParameterError):
        DegreeHistogram(pairs, n)


@pytest.mark.parametrize("gamma,kmin,kmax", [(2.0, 1, 27), (2.0, 2, 43), (2.4, 2, 30), (2.4, 1, 30)])
def test_least_squares_on_exact_counts(gamma, kmin, kmax):
    fit = fit_gamma(exact_histogram(gamma, kmin, kmax), kmin)
    assert fit.gamma_hat == pytest.approx(gamma, abs=0.01)
    assert fit.points_used == kmax - kmin + 1


def test_least_squares_needs_two_degrees():
    h = histogram_from_degrees([3] * 10)
    with pytest.raises(FitError):
        fit_gamma(h, 1)


def test_kmin_cutoff_drops_low_degrees():
    h = histogram_from_degrees([1] * 50 + [2] * 8 + [4] * 2)
    fit = fit_gamma(h, 2)
    assert fit.points_used == 2
    # log(2/60) - log(8/60) over log 4 - log 2 -> slope -2
    assert fit.gamma_hat == pytest.approx(2.0, abs=1e-12)


def test_bad_arguments():
    h = histogram_from_degrees([1, 2, 2])
    with pytest.raises(ParameterError):
        fit_gamma(h, 0)
    with pytest.raises(ParameterError):
        fit_gamma(h, 1, method="moments")
    with pytest.raises(ParameterError):
        fit_gamma(h, 3, kmax=2)


def test_mle_empty_window():
    with pytest.raises(FitError):
        fit_gamma(histogram_from_degrees([1, 1, 2]), 5, method="mle")


def sample_degrees(rng, gamma, kmin, kmax, n):
    pmf = pmf_direct(gamma, kmin, kmax)
    ks = np.array(list(pmf))
    return rng.choice(ks, size=n, p=np.array(list(pmf.values())))


@pytest.mark.parametrize("gamma,kmin,kmax", [(2.0, 1, 27), (2.0, 2, 43), (2.4, 2, 30)])
def test_mle_recovers_gamma_on_sampled_sequences(gamma, kmin, kmax):
    rng = np.random.default_rng(int(gamma * 10) + kmin)
    h = histogram_from_degrees(sample_degrees(rng, gamma, kmin, kmax, 10_000))
    fit = fit_gamma(h, kmin, method="mle", kmax=kmax)
    assert fit.gamma_hat == pytest.approx(gamma, abs=0.05)
    assert fit.kmax_used == kmax


def test_unbounded_mle_is_biased_up_on_truncated_data():
    rng = np.random.default_rng(3)
    h = histogram_from_degrees(sample_degrees(rng, 2.0, 1, 27, 10_000))
    open_fit = fit_gamma(h, 1, method="mle").gamma_hat
    capped_fit = fit_gamma(h, 1, method="mle", kmax=27).gamma_hat
    assert open_fit > capped_fit


def test_methods_agree_on_small_network_sample():
    rng = np.random.default_rng(300)
    h = histogram_from_degrees(sample_degrees(rng, 2.0, 1, 27, 300))
    ls = fit_gamma(h, 1).gamma_hat
    mle = fit_gamma(h, 1, method="mle", kmax=h.max_degree).gamma_hat
    assert abs(ls - mle) < 0.5


@settings(max_examples=50, deadline=None)
@given(
    counts=st.lists(st.integers(1, 500), min_size=2, max_size=12),
    factor=st.integers(2, 50),
)
def test_least_squares_scale_invariant(counts, factor):
    pairs = tuple(zip(range(1, len(counts) + 1), counts))
    h1 = DegreeHistogram(pairs, sum(counts))
    h2 = DegreeHistogram(tuple((k, c * factor) for k, c in pairs), sum(counts) * factor)
    assert fit_gamma(h1, 1).gamma_hat == pytest.approx(fit_gamma(h2, 1).gamma_hat, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(gamma=st.floats(1.5, 3.5), kmax=st.integers(5, 60))
def test_mle_exact_on_expected_counts(gamma, kmax):
    # with counts proportional to the pmf the likelihood peaks at gamma itself
    h = exact_histogram(gamma, 1, kmax)
    assert fit_gamma(h, 1, method="mle", kmax=kmax).gamma_hat == pytest.approx(gamma, abs=1e-3)
