"""Batch protocol: parameter groups, repeated seeded runs, summary statistics.

A config file is a sequence of ``[label]`` sections holding ``key = value``
lines whose keys are :class:`GroupConfig` fields. ``#`` starts a comment.
``apl_target = ln(N)`` resolves to the natural log of the group's node count.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
import statistics
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .errors import ConfigError, FitError, NetforgeError
from .fitting import LEAST_SQUARES, MAX_LIKELIHOOD, fit_gamma, histogram
from .graph import average_shortest_path, clustering_coefficient, format_edgelist
from .objective import MATCHING_MODES, ObjectiveSpec
from .optimizer import DISCONNECTED_POLICY, MOVE_KINDS, OptimizerConfig, RunResult, run
from .sampler import DegreeSequence, PowerLawSpec, build_degree_sequence

__all__ = [
    "GroupConfig",
    "RunRecord",
    "GroupStats",
    "load_config",
    "parse_config",
    "bundled_config_path",
    "build_group_inputs",
    "run_group",
    "run_batch",
    "emit_report",
    "read_report",
    "REPORT_COLUMNS",
    "RUN_COLUMNS",
    "METRICS",
]

log = logging.getLogger(__name__)

METRICS = ("gamma_ls", "gamma_mle", "apl", "cc")
CC_DEFINITION = "average_local"


@dataclass(frozen=True)
class GroupConfig:
    label: str
    gamma: float
    kmin: int
    kmax_override: Optional[int] = None
    edge_override: Optional[int] = None
    theta: float = 1.0
    phi: float = 1.0
    apl_target: Optional[float] = None
    cc_target: Optional[float] = None
    n_nodes: int = 300
    repetitions: int = 30
    iterations: int = 100_000
    base_seed: int = 0
    matching: str = "sorted"
    occurrence_threshold: float = 0.3
    move: str = "endpoint"

    def power_law(self) -> PowerLawSpec:
        return PowerLawSpec(
            gamma=self.gamma,
            kmin=self.kmin,
            n_nodes=self.n_nodes,
            occurrence_threshold=self.occurrence_threshold,
            kmax_override=self.kmax_override,
        )

    def validate(self) -> None:
        """Raise a :class:`NetforgeError` subclass if any field is out of range."""
        self.power_law()
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.matching not in MATCHING_MODES:
            raise ConfigError(f"matching must be one of {MATCHING_MODES}")
        if self.move not in MOVE_KINDS:
            raise ConfigError(f"move must be one of {tuple(MOVE_KINDS)}")
        if self.edge_override is not None:
            n = self.n_nodes
            if not (n - 1 <= self.edge_override <= n * (n - 1) // 2):
                raise ConfigError(f"edge_override {self.edge_override} infeasible for {n} nodes")
        if self.theta < 0 or self.phi < 0:
            raise ConfigError("theta and phi must be >= 0")
        if self.cc_target is not None and not (0 <= self.cc_target <= 1):
            raise ConfigError("cc_target must lie in [0, 1]")
        if self.apl_target is not None and not (self.apl_target > 0):
            raise ConfigError("apl_target must be > 0")


_FIELD_TYPES = {
    "gamma": float,
    "kmin": int,
    "kmax_override": int,
    "edge_override": int,
    "theta": float,
    "phi": float,
    "apl_target": float,
    "cc_target": float,
    "n_nodes": int,
    "repetitions": int,
    "iterations": int,
    "base_seed": int,
    "matching": str,
    "occurrence_threshold": float,
    "move": str,
}
_REQUIRED = ("gamma", "kmin")
_LN_N = {"ln(n)", "ln n", "ln"}


def bundled_config_path() -> Path:
    """Path of the shipped nine-group configuration."""
    return Path(str(resources.files("netforge") / "data" / "groups.cfg"))


def parse_config(text: str, path=None) -> List[GroupConfig]:
    sections: List[Tuple[str, int, Dict[str, Tuple[str, int]]]] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno, path)
            label = line[1:-1].strip()
            if any(label == s[0] for s in sections):
                raise ConfigError(f"duplicate group {label!r}", lineno, path)
            current = {}
            sections.append((label, lineno, current))
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, path)
        if current is None:
            raise ConfigError("key outside of any [group] section", lineno, path)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown key {key!r}", lineno, path)
        if key in current:
            raise ConfigError(f"duplicate key {key!r}", lineno, path)
        current[key] = (value, lineno)

    groups = []
    for label, header_line, entries in sections:
        for key in _REQUIRED:
            if key not in entries:
                raise ConfigError(f"group {label!r} is missing {key!r}", header_line, path)
        kwargs = {}
        deferred_ln = None
        for key, (value, lineno) in entries.items():
            if key == "apl_target" and value.lower() in _LN_N:
                deferred_ln = lineno
                continue
            try:
                kwargs[key] = _FIELD_TYPES[key](value)
            except ValueError:
                raise ConfigError(f"{key} = {value!r} is not a valid {_FIELD_TYPES[key].__name__}",
                                  lineno, path) from None
        if deferred_ln is not None:
            kwargs["apl_target"] = math.log(kwargs.get("n_nodes", GroupConfig.n_nodes))
        cfg = GroupConfig(label=label, **kwargs)
        try:
            cfg.validate()
        except NetforgeError as exc:
            bad = _blame_line(str(exc), entries, header_line)
            raise ConfigError(f"group {label!r}: {exc}", bad, path) from None
        groups.append(cfg)
    return groups


def _blame_line(message: str, entries, default: int) -> int:
    for key, (_, lineno) in entries.items():
        if key in message:
            return lineno
    return default


def load_config(path) -> List[GroupConfig]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", path=path) from None
    return parse_config(text, path)


# -- running ----------------------------------------------------------------


@dataclass
class RunRecord:
    group: str
    run_index: int
    seed: int
    edge_budget: int
    gamma_ls: float
    gamma_mle: float
    apl: float
    cc: float
    degree_term: float
    total: float
    accepted: int
    rejected_disconnected: int
    proposals: int
    budget_exhausted: bool
    degree_histogram: Tuple[Tuple[int, int], ...] = field(default=(), repr=False)


@dataclass
class GroupStats:
    config: GroupConfig
    records: List[RunRecord]
    edge_budget: int
    target_counts: Dict[int, int]

    @property
    def single_run(self) -> bool:
        return len(self.records) == 1

    def values(self, metric: str) -> List[float]:
        return [getattr(r, metric) for r in self.records]

    def avg(self, metric: str) -> float:
        return statistics.fmean(self.values(metric))

    def std(self, metric: str) -> float:
        """Sample standard deviation; 0 for a single run."""
        vals = self.values(metric)
        if len(vals) < 2:
            return 0.0
        return statistics.stdev(vals)

    def pooled_degree_counts(self) -> Dict[int, int]:
        pooled: Counter = Counter()
        for r in self.records:
            pooled.update(dict(r.degree_histogram))
        return dict(sorted(pooled.items()))


def build_group_inputs(cfg: GroupConfig) -> Tuple[DegreeSequence, ObjectiveSpec]:
    seq = build_degree_sequence(cfg.power_law())
    if cfg.edge_override is not None and cfg.edge_override != seq.edge_budget:
        if abs(cfg.edge_override - seq.edge_budget) > 0.1 * seq.edge_budget:
            log.warning(
                "group %s: edge_override %d is far from the sequence-derived %d",
                cfg.label, cfg.edge_override, seq.edge_budget,
            )
        seq = dataclasses.replace(seq, edge_budget=cfg.edge_override)
    obj = ObjectiveSpec(
        targets=seq,
        cc_target=cfg.cc_target,
        apl_target=cfg.apl_target,
        theta=cfg.theta,
        phi=cfg.phi,
        matching=cfg.matching,
    )
    return seq, obj


def _fit_or_nan(h, kmin, method, kmax=None) -> float:
    try:
        return fit_gamma(h, kmin, method, kmax=kmax).gamma_hat
    except FitError:
        return math.nan


def measure_result(cfg: GroupConfig, run_index: int, result: RunResult) -> RunRecord:
    g = result.final_graph
    h = histogram(g)
    return RunRecord(
        group=cfg.label,
        run_index=run_index,
        seed=result.seed,
        edge_budget=g.n_edges,
        gamma_ls=_fit_or_nan(h, cfg.kmin, LEAST_SQUARES),
        gamma_mle=_fit_or_nan(h, cfg.kmin, MAX_LIKELIHOOD, kmax=max(h.max_degree, cfg.kmin)),
        apl=average_shortest_path(g),
        cc=clustering_coefficient(g),
        degree_term=result.final_eval.degree_term,
        total=result.final_eval.total,
        accepted=result.accepted_count,
        rejected_disconnected=result.rejected_disconnected_count,
        proposals=result.proposals,
        budget_exhausted=result.budget_exhausted,
        degree_histogram=h.pairs,
    )


def _one_run(cfg: GroupConfig, run_index: int):
    seq, obj = build_group_inputs(cfg)
    seed = cfg.base_seed + run_index
    result = run(seq, obj, OptimizerConfig(iterations=cfg.iterations, rng_seed=seed, move=cfg.move))
    record = measure_result(cfg, run_index, result)
    trace = [p.format() for p in result.trace]
    return record, format_edgelist(result.final_graph), trace


def run_group(cfg: GroupConfig, out_dir=None, parallel: int = 1, trace: bool = False) -> GroupStats:
    """Run ``cfg.repetitions`` seeded optimizations and aggregate their traits.

    Seeds are ``base_seed .. base_seed + repetitions - 1``; results do not
    depend on ``parallel``. With ``out_dir`` set, each final graph is written
    to ``<out_dir>/<label>/run_<i>.edges`` and, if ``trace``, the accepted
    steps to ``<out_dir>/trace_<label>_<i>.txt``.
    """
    cfg.validate()
    seq, _ = build_group_inputs(cfg)
    indices = range(cfg.repetitions)
    try:
        if parallel > 1:
            with ProcessPoolExecutor(max_workers=parallel) as pool:
                outputs = list(pool.map(_one_run, [cfg] * cfg.repetitions, indices))
        else:
            outputs = [_one_run(cfg, i) for i in indices]
    except NetforgeError as exc:
        raise type(exc)(f"group {cfg.label}: {exc}") from exc

    records = []
    for record, edges_text, trace_lines in outputs:
        records.append(record)
        if out_dir is not None:
            out = Path(out_dir)
            gdir = out / cfg.label
            gdir.mkdir(parents=True, exist_ok=True)
            (gdir / f"run_{record.run_index:03d}.edges").write_text(edges_text)
            if trace:
                header = "iter total degree_term cc_term apl_term\n"
                body = "".join(line + "\n" for line in trace_lines)
                (out / f"trace_{cfg.label}_{record.run_index:03d}.txt").write_text(header + body)
    log.info("group %s: %d runs done", cfg.label, len(records))
    return GroupStats(cfg, records, seq.edge_budget, seq.counts())


def run_batch(configs, out_dir, parallel: int = 1, trace: bool = False) -> List[GroupStats]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stats = [run_group(cfg, out_dir, parallel=parallel, trace=trace) for cfg in configs]
    emit_report(stats, out_dir)
    return stats


# -- reports ----------------------------------------------------------------

REPORT_COLUMNS = (
    "group",
    "runs",
    "avg_gamma_ls",
    "std_gamma_ls",
    "avg_gamma_mle",
    "std_gamma_mle",
    "avg_apl",
    "std_apl",
    "avg_cc",
    "std_cc",
    "gamma",
    "kmin",
    "kmax",
    "edges",
    "theta",
    "phi",
    "apl_target",
    "cc_target",
    "matching",
    "move",
    "cc_definition",
    "disconnected_policy",
    "seeds",
    "note",
)

RUN_COLUMNS = (
    "group",
    "run",
    "seed",
    "edges",
    "gamma_ls",
    "gamma_mle",
    "apl",
    "cc",
    "degree_term",
    "total",
    "accepted",
    "rejected_disconnected",
    "proposals",
    "budget_exhausted",
)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _report_row(st: GroupStats) -> Dict[str, str]:
    c = st.config
    row = {"group": c.label, "runs": len(st.records)}
    for m in METRICS:
        row[f"avg_{m}"] = st.avg(m)
        row[f"std_{m}"] = st.std(m)
    seeds = [r.seed for r in st.records]
    row.update(
        gamma=c.gamma,
        kmin=c.kmin,
        kmax=c.kmax_override if c.kmax_override is not None else "",
        edges=st.edge_budget,
        theta=c.theta if c.apl_target is not None else "",
        phi=c.phi if c.cc_target is not None else "",
        apl_target=c.apl_target,
        cc_target=c.cc_target,
        matching=c.matching,
        move=c.move,
        cc_definition=CC_DEFINITION,
        disconnected_policy=DISCONNECTED_POLICY,
        seeds=f"{min(seeds)}-{max(seeds)}",
        note="single run" if st.single_run else "",
    )
    return {k: _fmt(v) for k, v in row.items()}


def emit_report(stats: List[GroupStats], out_dir) -> Path:
    """Write ``report.csv``, ``runs.csv`` and one ``degdist_<group>.csv`` per group."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = out / "report.csv"
    with report.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        w.writeheader()
        for st in stats:
            w.writerow(_report_row(st))

    with (out / "runs.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUN_COLUMNS)
        for st in stats:
            for r in st.records:
                w.writerow([_fmt(x) for x in (
                    r.group, r.run_index, r.seed, r.edge_budget, r.gamma_ls, r.gamma_mle,
                    r.apl, r.cc, r.degree_term, r.total, r.accepted,
                    r.rejected_disconnected, r.proposals, r.budget_exhausted,
                )])

    for st in stats:
        pooled = st.pooled_degree_counts()
        n_total = sum(pooled.values())
        n_nodes = st.config.n_nodes
        with (out / f"degdist_{st.config.label}.csv").open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "p_empirical", "p_target"])
            for k in sorted(set(pooled) | set(st.target_counts)):
                w.writerow([
                    k,
                    repr(pooled.get(k, 0) / n_total),
                    repr(st.target_counts.get(k, 0) / n_nodes),
                ])
    return report


def read_report(path) -> List[Dict[str, str]]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))
