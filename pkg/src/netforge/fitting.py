"""Power-law exponent estimates for a realized degree distribution."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .errors import FitError, ParameterError
from .graph import Graph

__all__ = [
    "DegreeHistogram",
    "FitResult",
    "histogram",
    "histogram_from_degrees",
    "fit_gamma",
    "LEAST_SQUARES",
    "MAX_LIKELIHOOD",
]

LEAST_SQUARES = "least_squares"
MAX_LIKELIHOOD = "mle"

_GAMMA_LO = 1.0 + 1e-9
_GAMMA_HI = 10.0


@dataclass(frozen=True)
class DegreeHistogram:
    pairs: Tuple[Tuple[int, int], ...]
    n_nodes: int

    def __post_init__(self):
        ks = [k for k, _ in self.pairs]
        if ks != sorted(set(ks)):
            raise ParameterError("histogram degrees must be distinct and ascending")
        if any(c < 1 for _, c in self.pairs):
            raise ParameterError("histogram counts must be >= 1")
        if sum(c for _, c in self.pairs) != self.n_nodes:
            raise ParameterError("histogram counts must sum to n_nodes")

    @property
    def max_degree(self) -> int:
        return self.pairs[-1][0]

    def as_dict(self):
        return dict(self.pairs)


@dataclass(frozen=True)
class FitResult:
    gamma_hat: float
    method: str
    kmin_used: int
    points_used: int
    kmax_used: Optional[int] = None


def histogram_from_degrees(degrees: Sequence[int]) -> DegreeHistogram:
    counts = Counter(int(d) for d in degrees)
    return DegreeHistogram(tuple(sorted(counts.items())), sum(counts.values()))


def histogram(g: Graph) -> DegreeHistogram:
    return histogram_from_degrees(g.deg.tolist())


def _window(h: DegreeHistogram, kmin: int, kmax: Optional[int]):
    ks, cs = [], []
    for k, c in h.pairs:
        if k >= kmin and (kmax is None or k <= kmax):
            ks.append(k)
            cs.append(c)
    return np.asarray(ks, dtype=float), np.asarray(cs, dtype=float)


def _fit_least_squares(h, kmin, kmax):
    k, c = _window(h, kmin, kmax)
    if k.size < 2:
        raise FitError(
            f"least squares needs >= 2 distinct degrees >= {kmin}, found {k.size}"
        )
    slope, _ = np.polyfit(np.log(k), np.log(c / h.n_nodes), 1)
    return FitResult(-float(slope), LEAST_SQUARES, kmin, int(k.size), kmax)


def _fit_mle(h, kmin, kmax):
    k, c = _window(h, kmin, kmax)
    if k.size == 0:
        raise FitError(f"no node has degree >= {kmin}")
    n = c.sum()
    log_sum = float(c @ np.log(k))
    if kmax is None:
        def nll(gamma):
            return gamma * log_sum + n * np.log(zeta(gamma, kmin))
    else:
        support = np.arange(kmin, kmax + 1, dtype=float)

        def nll(gamma):
            return gamma * log_sum + n * np.log(np.sum(support ** -gamma))

    res = minimize_scalar(
        nll, bounds=(_GAMMA_LO, _GAMMA_HI), method="bounded", options={"xatol": 1e-6}
    )
    return FitResult(float(res.x), MAX_LIKELIHOOD, kmin, int(k.size), kmax)


def fit_gamma(
    h: DegreeHistogram, kmin: int, method: str = LEAST_SQUARES, kmax: Optional[int] = None
) -> FitResult:
    """Estimate the exponent of ``p(k) ~ k**-gamma`` over degrees ``>= kmin``.

    ``least_squares`` regresses ``log(count / N)`` on ``log k`` over the
    degrees present (zero counts are skipped). ``mle`` maximizes the discrete
    power-law likelihood on ``[kmin, kmax]``; with ``kmax=None`` the support
    is unbounded above and normalized by the Hurwitz zeta function. The
    unbounded form overestimates gamma on data that is itself truncated, so
    pass ``kmax`` when the degrees come from a capped distribution.
    """
    if kmin < 1:
        raise ParameterError(f"kmin must be >= 1, got {kmin}")
    if kmax is not None and kmax < kmin:
        raise ParameterError(f"kmax {kmax} below kmin {kmin}")
    if method == LEAST_SQUARES:
        return _fit_least_squares(h, kmin, kmax)
    if method == MAX_LIKELIHOOD:
        return _fit_mle(h, kmin, kmax)
    raise ParameterError(f"unknown fit method {method!r}")
