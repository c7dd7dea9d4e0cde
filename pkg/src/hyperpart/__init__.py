"""n-level k-way hypergraph partitioning."""

__version__ = "0.1.0"

from .coarsening import Coarsener, CoarseningConfig, coarsen
from .driver import PRESETS, Preset, RunResult, partition, vcycle
from .hypergraph import ContractionMemento, Hypergraph, HypergraphError, fingerprint
from .initial import InitialConfig, InitialPartitionError, epsilon_prime, initial_partition
from .io import FormatError, read_hypergraph, read_partition, write_hmetis, write_partition
from .partition import Partition, PartitionError

__all__ = [
    "Coarsener",
    "CoarseningConfig",
    "ContractionMemento",
    "FormatError",
    "Hypergraph",
    "HypergraphError",
    "InitialConfig",
    "InitialPartitionError",
    "PRESETS",
    "Partition",
    "PartitionError",
    "Preset",
    "RunResult",
    "coarsen",
    "epsilon_prime",
    "fingerprint",
    "initial_partition",
    "partition",
    "read_hypergraph",
    "read_partition",
    "vcycle",
    "write_hmetis",
    "write_partition",
]
