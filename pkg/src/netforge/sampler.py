"""Deterministic degree targets from a truncated discrete power law.

The targets are rounded expected counts, not random draws: for every degree
``k`` in ``[kmin, kmax]`` the sequence holds ``round(N * p(k))`` copies of
``k``, where ``p(k)`` is proportional to ``k ** -gamma``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .errors import InfeasibleSequenceError, ParameterError

__all__ = [
    "PowerLawSpec",
    "DegreeSequence",
    "truncated_pmf",
    "resolve_kmax",
    "build_degree_sequence",
    "round_half_up",
]


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class PowerLawSpec:
    gamma: float
    kmin: int
    n_nodes: int
    occurrence_threshold: float = 0.3
    kmax_override: Optional[int] = None

    def __post_init__(self):
        if not (self.gamma > 1):
            raise ParameterError(f"gamma must be > 1, got {self.gamma}")
        if self.n_nodes < 2:
            raise ParameterError(f"n_nodes must be >= 2, got {self.n_nodes}")
        if not (1 <= self.kmin <= self.n_nodes - 1):
            raise ParameterError(
                f"kmin must lie in [1, {self.n_nodes - 1}], got {self.kmin}"
            )
        if not (self.occurrence_threshold > 0):
            raise ParameterError("occurrence_threshold must be > 0")
        if self.kmax_override is not None and not (
            self.kmin <= self.kmax_override <= self.n_nodes - 1
        ):
            raise ParameterError(
                f"kmax_override must lie in [{self.kmin}, {self.n_nodes - 1}], "
                f"got {self.kmax_override}"
            )


@dataclass(frozen=True)
class DegreeSequence:
    """Per-node degree targets, largest first (node 0 gets ``targets[0]``).

    ``kmax`` is the largest target actually present, which can be below the
    support bound used for the pmf when the tail counts round to zero.
    """

    targets: Tuple[int, ...]
    kmax: int
    edge_budget: int
    support_kmax: Optional[int] = None

    @property
    def n_nodes(self) -> int:
        return len(self.targets)

    @property
    def kmin(self) -> int:
        return min(self.targets)

    @property
    def degree_sum(self) -> int:
        return sum(self.targets)

    def counts(self) -> Dict[int, int]:
        """Map degree value -> number of nodes targeting it, ascending by degree."""
        return dict(sorted(Counter(self.targets).items()))

    @classmethod
    def from_targets(cls, targets, edge_budget: Optional[int] = None) -> "DegreeSequence":
        ordered = tuple(sorted((int(t) for t in targets), reverse=True))
        if not ordered:
            raise ParameterError("empty degree sequence")
        if edge_budget is None:
            edge_budget = round_half_up(sum(ordered) / 2)
        return cls(ordered, ordered[0], int(edge_budget))


def truncated_pmf(spec: PowerLawSpec, kmax: int) -> Dict[int, float]:
    """Normalized ``k ** -gamma`` over ``kmin..kmax``."""
    if not (spec.kmin <= kmax <= spec.n_nodes - 1):
        raise ParameterError(
            f"kmax must lie in [{spec.kmin}, {spec.n_nodes - 1}], got {kmax}"
        )
    weights = [k ** -spec.gamma for k in range(spec.kmin, kmax + 1)]
    z = math.fsum(weights)
    return {k: w / z for k, w in zip(range(spec.kmin, kmax + 1), weights)}


def resolve_kmax(spec: PowerLawSpec) -> int:
    """Fixed point of "drop every degree whose expected count is below threshold".

    Starts at ``N - 1`` and re-normalizes after each truncation until the
    cutoff stops moving. ``kmax_override`` short-circuits the search.
    """
    if spec.kmax_override is not None:
        return spec.kmax_override
    kmax = spec.n_nodes - 1
    while True:
        pmf = truncated_pmf(spec, kmax)
        new = spec.kmin
        for k in range(kmax, spec.kmin - 1, -1):
            if spec.n_nodes * pmf[k] >= spec.occurrence_threshold:
                new = k
                break
        if new == kmax:
            return kmax
        kmax = new


def build_degree_sequence(spec: PowerLawSpec) -> DegreeSequence:
    kmax = resolve_kmax(spec)
    pmf = truncated_pmf(spec, kmax)
    n = spec.n_nodes
    counts = {k: round_half_up(n * p) for k, p in pmf.items()}

    total = sum(counts.values())
    if total < n:
        counts[spec.kmin] += n - total
    while total > n:
        # trim the modal degree; ties go to the smaller degree
        modal = max(counts, key=lambda k: (counts[k], -k))
        take = min(counts[modal], total - n)
        counts[modal] -= take
        total -= take

    targets = []
    for k in sorted(counts, reverse=True):
        targets.extend([k] * counts[k])
    seq = DegreeSequence(
        targets=tuple(targets),
        kmax=targets[0],
        edge_budget=round_half_up(sum(targets) / 2),
        support_kmax=kmax,
    )
    if seq.edge_budget < n - 1:
        raise InfeasibleSequenceError(
            f"edge budget {seq.edge_budget} is below n_nodes - 1 = {n - 1}; "
            "no connected graph has that few edges"
        )
    return seq
