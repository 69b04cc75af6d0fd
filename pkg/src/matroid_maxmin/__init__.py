"""Matroid max-min allocation by augmenting trees, with a Santa Claus front end."""
from .errors import (
    AugmentationFailed,
    InternalError,
    InvalidInputError,
    InvalidInstanceError,
    InvalidStateError,
    MaxMinError,
    ParameterError,
    UnsupportedScaleError,
)
from .matroids import (
    DualMatroid,
    FreeMatroid,
    Matroid,
    PartitionMatroid,
    TabulatedMatroid,
    TransversalMatroid,
    UniformMatroid,
    find_swap_out,
)
from .model import AllocationInstance, HyperEdge, SolverParams, build_minimal_edge, derive_params
from .santa import GiftPartition, SantaInstance, SantaSolution, evaluate_solution, partition_gifts
from .santa import solve as solve_santa
from .solver import Solution, SolveStats, Stuck, TraceEvent, run

__version__ = "0.1.0"

__all__ = [
    "AllocationInstance",
    "AugmentationFailed",
    "DualMatroid",
    "FreeMatroid",
    "GiftPartition",
    "HyperEdge",
    "InternalError",
    "InvalidInputError",
    "InvalidInstanceError",
    "InvalidStateError",
    "Matroid",
    "MaxMinError",
    "ParameterError",
    "PartitionMatroid",
    "SantaInstance",
    "SantaSolution",
    "Solution",
    "SolveStats",
    "SolverParams",
    "Stuck",
    "TabulatedMatroid",
    "TraceEvent",
    "TransversalMatroid",
    "UniformMatroid",
    "UnsupportedScaleError",
    "build_minimal_edge",
    "derive_params",
    "evaluate_solution",
    "find_swap_out",
    "partition_gifts",
    "run",
    "solve_santa",
]
