"""Hill climbing over single-edge rewires.

Each step proposes a rewire, throws it away if it disconnects the graph
(without spending an iteration), and keeps it only when the objective drops
strictly. Rejected moves are undone in place, so a step never copies the
graph.

Two proposal kinds are available. ``"endpoint"`` (the default) keeps one end
of a uniformly chosen edge and moves the other to a uniform non-neighbor, so
only two degrees change per step. ``"pair"`` deletes a uniform edge and
inserts a uniform non-edge anywhere in the graph; it explores the same move
space but touches up to four degrees and converges several times slower.

The running clustering sum is kept as exact floating-point partials
(Shewchuk's algorithm, the one behind ``math.fsum``), which makes the
incremental path return the same bits as a full recompute and rules out
drift over long runs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional

import numpy as np

from . import _kernels
from .errors import ParameterError
from .graph import (
    Graph,
    affected_nodes,
    local_clustering,
    propose_endpoint_shift,
    propose_rewire,
    random_connected_graph,
)
from .objective import Evaluation, ObjectiveSpec, combine, evaluate
from .sampler import DegreeSequence

__all__ = ["OptimizerConfig", "TracePoint", "RunResult", "run", "DISCONNECTED_POLICY", "MOVE_KINDS"]

log = logging.getLogger(__name__)

# Disconnecting proposals are discarded without consuming an iteration.
DISCONNECTED_POLICY = "skip"

MOVE_KINDS = {"pair": propose_rewire, "endpoint": propose_endpoint_shift}


@dataclass(frozen=True)
class OptimizerConfig:
    iterations: int = 100_000
    rng_seed: int = 0
    max_proposals: Optional[int] = None
    incremental_cc: bool = True
    move: str = "endpoint"

    def __post_init__(self):
        if self.iterations < 1:
            raise ParameterError("iterations must be >= 1")
        if self.max_proposals is not None and self.max_proposals < self.iterations:
            raise ParameterError("max_proposals must be >= iterations")
        if self.move not in MOVE_KINDS:
            raise ParameterError(f"move must be one of {tuple(MOVE_KINDS)}, got {self.move!r}")

    @property
    def proposal_cap(self) -> int:
        return self.max_proposals if self.max_proposals is not None else 10 * self.iterations


class TracePoint(NamedTuple):
    iteration: int
    total: float
    degree_term: float
    cc_term: float
    apl_term: float

    def format(self) -> str:
        return f"{self.iteration} {self.total!r} {self.degree_term!r} {self.cc_term!r} {self.apl_term!r}"


@dataclass
class RunResult:
    final_graph: Graph
    final_eval: Evaluation
    initial_eval: Evaluation
    accepted_count: int
    rejected_disconnected_count: int
    proposals: int
    iterations_done: int
    budget_exhausted: bool
    seed: int
    trace: List[TracePoint] = field(default_factory=list)
    disconnected_policy: str = DISCONNECTED_POLICY


def _add_partials(partials: List[float], values) -> List[float]:
    """Fold ``values`` into a list of non-overlapping partial sums, exactly."""
    for x in values:
        i = 0
        for y in partials:
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo:
                partials[i] = lo
                i += 1
            x = hi
        partials[i:] = [x]
    return partials


def _seed_streams(seed: int):
    init_ss, move_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_ss), np.random.default_rng(move_ss)


def run(
    targets: DegreeSequence,
    obj: ObjectiveSpec,
    cfg: OptimizerConfig,
    on_accept: Optional[Callable[[int, Graph, Evaluation], None]] = None,
) -> RunResult:
    """Hill-climb from a random connected graph with ``targets.edge_budget`` edges.

    ``on_accept(iteration, graph, evaluation)`` is called after every accepted
    move; it must not mutate the graph.
    """
    n = targets.n_nodes
    budget = targets.edge_budget
    if budget < n - 1 or budget > n * (n - 1) // 2:
        raise ParameterError(
            f"edge budget {budget} cannot form a connected simple graph on {n} nodes"
        )
    if obj.targets.targets != targets.targets:
        raise ParameterError("objective targets differ from the run's degree sequence")

    init_rng, rng = _seed_streams(cfg.rng_seed)
    g = random_connected_graph(n, budget, init_rng)
    start = evaluate(g, obj)
    target_arr = np.asarray(targets.targets, dtype=np.int64)
    s = target_arr.tolist()
    sorted_targets = np.sort(target_arr)
    fixed = obj.matching == "fixed"
    deg = g.deg

    n_pairs = n * (n - 1) // 2
    cc_on = obj.cc_active
    apl_on = obj.apl_active
    incremental = cc_on and cfg.incremental_cc

    cur = start
    deg_term = int(start.degree_term)
    cc_partials = _add_partials([], local_clustering(g).tolist()) if incremental else []

    accepted = rejected_disc = proposals = count = 0
    trace: List[TracePoint] = []
    cap = cfg.proposal_cap
    propose = MOVE_KINDS[cfg.move]
    exhausted = False

    if n_pairs == budget or budget == 0:
        # no rewire exists; the initial graph is the answer
        count = cfg.iterations

    while count < cfg.iterations:
        if proposals >= cap:
            exhausted = True
            log.warning("proposal cap %d hit after %d iterations", cap, count)
            break
        proposals += 1
        move = propose(g, rng)
        u, v = move.removed
        a, b = move.added
        if fixed:
            ends = {u, v, a, b}
            deg_before = sum((int(deg[x]) - s[x]) ** 2 for x in ends)
        if incremental:
            nodes = affected_nodes(g, move)
            cc_before = local_clustering(g, nodes).tolist()

        g.apply(move)
        if not _kernels.reaches(g.nbr, g.deg, u, v):
            g.revert(move)
            rejected_disc += 1
            continue
        count += 1

        if fixed:
            new_deg_term = deg_term - deg_before + sum((int(deg[x]) - s[x]) ** 2 for x in ends)
        else:
            diff = np.sort(deg) - sorted_targets
            new_deg_term = int(diff @ diff)
        cc = apl = None
        cc_deltas = None
        if cc_on:
            if incremental:
                cc_deltas = local_clustering(g, nodes).tolist() + [-x for x in cc_before]
                cc = math.fsum(cc_partials + cc_deltas) / n
            else:
                cc = math.fsum(local_clustering(g).tolist()) / n
        if apl_on:
            apl = int(_kernels.distance_sum(g.nbr, g.deg)) / n_pairs
        cand = combine(obj, new_deg_term, cc, apl)

        if cand.total < cur.total:
            cur = cand
            deg_term = new_deg_term
            accepted += 1
            if incremental:
                _add_partials(cc_partials, cc_deltas)
            trace.append(TracePoint(count, cand.total, cand.degree_term, cand.cc_term, cand.apl_term))
            if on_accept is not None:
                on_accept(count, g, cand)
        else:
            g.revert(move)

    final = evaluate(g, obj)
    return RunResult(
        final_graph=g,
        final_eval=final,
        initial_eval=start,
        accepted_count=accepted,
        rejected_disconnected_count=rejected_disc,
        proposals=proposals,
        iterations_done=count,
        budget_exhausted=exhausted,
        seed=cfg.rng_seed,
        trace=trace,
    )
