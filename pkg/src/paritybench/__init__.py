"""Parity-architecture compiler and gate-count benchmarks against a routed gate model."""

from .hamiltonian import LogicalHamiltonian, SpinTerm, parse_hamiltonian
from .parity import MappingReport, map_to_parity, parity_gate_count
from .router import SquareLattice, gm_gate_count, route

__all__ = [
    "LogicalHamiltonian",
    "MappingReport",
    "SpinTerm",
    "SquareLattice",
    "gm_gate_count",
    "map_to_parity",
    "parity_gate_count",
    "parse_hamiltonian",
    "route",
]
__version__ = "0.1.0"
