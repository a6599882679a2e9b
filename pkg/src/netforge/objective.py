"""Penalty objective: squared degree mismatch plus weighted trait residuals.

``total = sum_i (d_i - s_i)^2 + theta * (apl - apl_target)^2 + phi * (cc - cc_target)^2``

``theta`` always weighs the average-shortest-path residual and ``phi`` the
clustering residual; a term is active only when its target is set.

Degrees are compared with targets in one of two ways:

* ``"sorted"`` (default): both degree lists are sorted before pairing, so the
  term measures how far the degree *multiset* is from the targets and any
  node may end up as a hub.
* ``"fixed"``: node ``i`` is compared with ``targets[i]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .graph import Graph, average_shortest_path, clustering_coefficient
from .sampler import DegreeSequence

__all__ = [
    "ObjectiveSpec",
    "Evaluation",
    "degree_mismatch",
    "evaluate",
    "combine",
    "default_apl_target",
    "MATCHING_MODES",
]

MATCHING_MODES = ("sorted", "fixed")


def default_apl_target(n_nodes: int) -> float:
    return math.log(n_nodes)


@dataclass(frozen=True)
class ObjectiveSpec:
    targets: DegreeSequence
    cc_target: Optional[float] = None
    apl_target: Optional[float] = None
    theta: float = 1.0
    phi: float = 1.0
    matching: str = "sorted"

    def __post_init__(self):
        if self.matching not in MATCHING_MODES:
            raise ParameterError(f"matching must be one of {MATCHING_MODES}, got {self.matching!r}")
        if self.cc_target is not None and not (0.0 <= self.cc_target <= 1.0):
            raise ParameterError(f"cc_target must lie in [0, 1], got {self.cc_target}")
        if self.apl_target is not None and not (self.apl_target > 0):
            raise ParameterError(f"apl_target must be > 0, got {self.apl_target}")
        if self.theta < 0 or self.phi < 0:
            raise ParameterError("penalty weights must be >= 0")

    @property
    def cc_active(self) -> bool:
        return self.cc_target is not None

    @property
    def apl_active(self) -> bool:
        return self.apl_target is not None


@dataclass(frozen=True)
class Evaluation:
    """One objective evaluation; ``cc_term``/``apl_term`` are unweighted squared residuals."""

    degree_term: float
    cc_term: float
    apl_term: float
    total: float
    measured_cc: Optional[float] = None
    measured_apl: Optional[float] = None


def degree_mismatch(g: Graph, targets: DegreeSequence, matching: str = "sorted") -> int:
    if g.n_nodes != targets.n_nodes:
        raise ParameterError(
            f"graph has {g.n_nodes} nodes but {targets.n_nodes} targets were given"
        )
    s = np.asarray(targets.targets, dtype=np.int64)
    if matching == "sorted":
        diff = np.sort(g.deg) - np.sort(s)
    elif matching == "fixed":
        diff = g.deg - s
    else:
        raise ParameterError(f"unknown matching {matching!r}")
    return int(diff @ diff)


def combine(spec: ObjectiveSpec, degree_term: int, cc=None, apl=None) -> Evaluation:
    """Assemble an :class:`Evaluation` from already-measured quantities.

    The optimizer calls this with incrementally maintained values; keeping a
    single assembly path makes its totals bit-identical to :func:`evaluate`.
    """
    total = float(degree_term)
    cc_term = apl_term = 0.0
    if spec.apl_active:
        apl_term = (apl - spec.apl_target) ** 2
        total += spec.theta * apl_term
    if spec.cc_active:
        cc_term = (cc - spec.cc_target) ** 2
        total += spec.phi * cc_term
    return Evaluation(
        degree_term=float(degree_term),
        cc_term=cc_term,
        apl_term=apl_term,
        total=total,
        measured_cc=cc if spec.cc_active else None,
        measured_apl=apl if spec.apl_active else None,
    )


def evaluate(g: Graph, spec: ObjectiveSpec) -> Evaluation:
    """Raises :class:`~netforge.errors.DisconnectedError` if APL is active and ``g`` is disconnected."""
    deg = degree_mismatch(g, spec.targets, spec.matching)
    cc = clustering_coefficient(g) if spec.cc_active else None
    apl = average_shortest_path(g) if spec.apl_active else None
    return combine(spec, deg, cc, apl)
