"""Scale-free network synthesis by penalty-method hill climbing."""

from .errors import (
    ConfigError,
    ConsistencyError,
    DisconnectedError,
    FitError,
    InfeasibleSequenceError,
    NetforgeError,
    NoMoveError,
    ParameterError,
)
from .graph import (
    Graph,
    RewireMove,
    average_shortest_path,
    cc_delta,
    clustering_coefficient,
    is_connected,
    propose_endpoint_shift,
    propose_rewire,
    random_connected_graph,
    read_edgelist,
    write_edgelist,
)
from .objective import Evaluation, ObjectiveSpec, degree_mismatch, evaluate
from .optimizer import OptimizerConfig, RunResult, run
from .sampler import DegreeSequence, PowerLawSpec, build_degree_sequence, resolve_kmax, truncated_pmf

__version__ = "0.1.0"
