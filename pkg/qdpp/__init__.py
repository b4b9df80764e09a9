"""Statevector simulation of the quantum determinantal sampling circuit."""

from qdpp.circuit import (
    CircuitSpec,
    Gate,
    GateKind,
    LoaderTopology,
    build_loader_circuit,
    build_qdpp_circuit,
    lower_fbs,
    resources,
    run_circuit,
)
from qdpp.sampling import measure, most_frequent_outcome, simulate_qdpp
from qdpp.statevector import StateVector, apply_cz, apply_fbs, apply_rbs, apply_x, apply_z, clifford_apply

__all__ = [
    "CircuitSpec",
    "Gate",
    "GateKind",
    "LoaderTopology",
    "StateVector",
    "apply_cz",
    "apply_fbs",
    "apply_rbs",
    "apply_x",
    "apply_z",
    "build_loader_circuit",
    "build_qdpp_circuit",
    "clifford_apply",
    "lower_fbs",
    "measure",
    "most_frequent_outcome",
    "resources",
    "run_circuit",
    "simulate_qdpp",
]
