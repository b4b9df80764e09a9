"""
Gate-level Clifford loader circuits.

A loader for the unit vector x is built by Givens elimination on the
coefficients of C(x) = sum_i x_i g_i, where g_i = Z_0 ... Z_{i-1} X_i.
Conjugating by a beam splitter on (a, b), a < b, rotates the pair (g_a, g_b)
like a plane rotation, so a sequence of beam splitters U reduces C(x) to the
single term g_s:

    U C(x) U^dagger = g_s    =>    C(x) = U^dagger g_s U

The circuit therefore applies the unload rotations, then Z on qubits
0..s-1 and X on qubit s, then the unload rotations in reverse with negated
angles. The topology fixes which pairs are combined and in what order:

    diagonal       neighbour chain collapsing onto qubit 0
    semi_diagonal  two neighbour chains collapsing onto the middle qubit
    parallel       binary tree over strides 1, 2, 4, ... collapsing onto qubit 0

The parallel tree combines qubits that are not neighbours; those rotations
use the fermionic beam splitter (FBS), which lower_fbs rewrites into RBS and
CZ gates.
"""

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from common import settings
from common.errors import InvalidInputError
from qdpp.statevector import StateVector, apply_cz, apply_fbs, apply_rbs, apply_x, apply_z

logger = logging.getLogger(__name__)


class GateKind(str, Enum):
    RBS = "RBS"
    FBS = "FBS"
    X = "X"
    Z = "Z"
    CZ = "CZ"


class LoaderTopology(str, Enum):
    DIAGONAL = "diagonal"
    SEMI_DIAGONAL = "semi_diagonal"
    PARALLEL = "parallel"


_ARITY = {GateKind.RBS: 2, GateKind.FBS: 2, GateKind.X: 1, GateKind.Z: 1, GateKind.CZ: 2}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: Tuple[int, ...]
    theta: Optional[float] = None

    def __post_init__(self):
        if len(self.qubits) != _ARITY[self.kind]:
            raise InvalidInputError(f"{self.kind.value} acts on {_ARITY[self.kind]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidInputError(f"{self.kind.value} needs distinct qubits, got {self.qubits}")
        if (self.theta is None) != (self.kind not in (GateKind.RBS, GateKind.FBS)):
            raise InvalidInputError(f"{self.kind.value} angle mismatch: theta={self.theta}")

    @property
    def span(self) -> Tuple[int, ...]:
        """Qubits the gate occupies in a layer; an FBS occupies its whole range."""
        if self.kind == GateKind.FBS:
            lo, hi = min(self.qubits), max(self.qubits)
            return tuple(range(lo, hi + 1))
        return self.qubits

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "qubits": list(self.qubits), "theta": self.theta}


@dataclass
class CircuitSpec:
    """
    Ordered gate list with an as-soon-as-possible layering.

    Layers hold indices into gates; gates in one layer occupy disjoint qubits.
    """

    n_qubits: int
    gates: List[Gate] = field(default_factory=list)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidInputError(f"circuit needs at least one qubit, got {self.n_qubits}")
        for gate in self.gates:
            self._check(gate)

    def _check(self, gate: Gate) -> None:
        for q in gate.qubits:
            if not 0 <= q < self.n_qubits:
                raise InvalidInputError(f"gate {gate} uses qubit {q} outside 0..{self.n_qubits - 1}")

    def append(self, gate: Gate) -> None:
        self._check(gate)
        self.gates.append(gate)

    def extend(self, gates) -> None:
        for gate in gates:
            self.append(gate)

    @property
    def layers(self) -> List[List[int]]:
        frontier = [0] * self.n_qubits
        layers: List[List[int]] = []
        for i, gate in enumerate(self.gates):
            level = max(frontier[q] for q in gate.span)
            if level == len(layers):
                layers.append([])
            layers[level].append(i)
            for q in gate.span:
                frontier[q] = level + 1
        return layers

    @property
    def depth(self) -> int:
        return len(self.layers)

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "gates": [gate.to_dict() for gate in self.gates]}

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "CircuitSpec":
        gates = [
            Gate(GateKind(g["kind"]), tuple(g["qubits"]), g.get("theta"))
            for g in data["gates"]
        ]
        return cls(int(data["n_qubits"]), gates)

    def __repr__(self) -> str:
        return f"<CircuitSpec(n_qubits={self.n_qubits}, gates={len(self.gates)})>"


# Elimination step: combine coefficients a < b and zero out `drop` (a or b)
Step = Tuple[int, int, int]


def _diagonal_steps(n: int) -> Tuple[List[Step], int]:
    return [(b - 1, b, b) for b in range(n - 1, 0, -1)], 0


def _semi_diagonal_steps(n: int) -> Tuple[List[Step], int]:
    middle = n // 2
    left = [(t, t + 1, t) for t in range(middle)]
    right = [(b - 1, b, b) for b in range(n - 1, middle, -1)]
    steps: List[Step] = []
    for t in range(max(len(left), len(right))):
        if t < len(left):
            steps.append(left[t])
        if t < len(right):
            steps.append(right[t])
    return steps, middle


def _parallel_steps(n: int) -> Tuple[List[Step], int]:
    steps: List[Step] = []
    stride = 1
    while stride < n:
        for a in range(0, n - stride, 2 * stride):
            steps.append((a, a + stride, a + stride))
        stride *= 2
    return steps, 0


_SCHEDULES = {
    LoaderTopology.DIAGONAL: _diagonal_steps,
    LoaderTopology.SEMI_DIAGONAL: _semi_diagonal_steps,
    LoaderTopology.PARALLEL: _parallel_steps,
}


def _unit_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidInputError(f"loader vector must be 1-D, got shape {x.shape}")
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > settings.UNIT_NORM_TOL:
        raise InvalidInputError(f"loader vector must have unit norm, got {norm}")
    return x


def loader_gates(x, topology: LoaderTopology) -> List[Gate]:
    """Gate sequence whose product equals C(x) (first gate applied first)."""
    x = _unit_vector(x)
    n = x.size
    if n < 2:
        raise InvalidInputError(f"loader circuits need n >= 2, got {n}")
    steps, center = _SCHEDULES[LoaderTopology(topology)](n)

    v = x.copy()
    unload: List[Gate] = []
    for a, b, drop in steps:
        va, vb = v[a], v[b]
        # conjugation by the rotation maps (va, vb) -> (c va - s vb, s va + c vb)
        theta = -math.atan2(vb, va) if drop == b else math.atan2(va, vb)
        c, s = math.cos(theta), math.sin(theta)
        v[a], v[b] = c * va - s * vb, s * va + c * vb
        v[drop] = 0.0
        kind = GateKind.RBS if b == a + 1 else GateKind.FBS
        unload.append(Gate(kind, (a, b), theta))

    center_gates = [Gate(GateKind.Z, (q,)) for q in range(center)] + [Gate(GateKind.X, (center,))]
    reload = [Gate(g.kind, g.qubits, -g.theta) for g in reversed(unload)]
    return unload + center_gates + reload


def build_loader_circuit(x, topology: LoaderTopology) -> CircuitSpec:
    """
    Beam-splitter network implementing the Clifford loader C(x).

    Args:
        x: Unit vector of length n >= 2
        topology: Which pairs the elimination combines

    Returns:
        CircuitSpec on n qubits whose operator equals C(x)
    """
    x = _unit_vector(x)
    return CircuitSpec(x.size, loader_gates(x, topology))


def build_qdpp_circuit(A, topology: LoaderTopology) -> CircuitSpec:
    """
    Full determinantal sampling circuit for an orthonormal n x d matrix A.

    Loaders run from the last column to the first, so the amplitude of the
    basis state for S is det(A_S) with its sign.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < A.shape[1]:
        raise InvalidInputError(f"A must be n x d with n >= d, got shape {A.shape}")
    gram_error = float(np.max(np.abs(A.T @ A - np.eye(A.shape[1]))))
    if gram_error > settings.ORTHONORMAL_TOL:
        raise InvalidInputError(f"A must have orthonormal columns (max |A^T A - I| = {gram_error:.3e})")

    circuit = CircuitSpec(A.shape[0])
    for j in reversed(range(A.shape[1])):
        circuit.extend(loader_gates(A[:, j], topology))
    logger.debug(f"Built {topology} qDPP circuit: n={A.shape[0]}, d={A.shape[1]}, gates={len(circuit.gates)}")
    return circuit


def lower_fbs(circuit: CircuitSpec) -> CircuitSpec:
    """
    Rewrite every FBS as RBS conjugated by CZ gates.

    The sign flip from the parity of intermediate qubits is produced by CZ
    gates from each intermediate qubit to one end of the pair; the lower half
    of the range attaches to the low end, the upper half to the high end.
    """
    lowered = CircuitSpec(circuit.n_qubits)
    for gate in circuit.gates:
        if gate.kind != GateKind.FBS:
            lowered.append(gate)
            continue
        q1, q2 = gate.qubits
        lo, hi = min(q1, q2), max(q1, q2)
        between = list(range(lo + 1, hi))
        half = len(between) // 2
        fixups = [Gate(GateKind.CZ, (q, lo)) for q in between[:half]]
        fixups += [Gate(GateKind.CZ, (q, hi)) for q in between[half:]]
        lowered.extend(fixups)
        lowered.append(Gate(GateKind.RBS, gate.qubits, gate.theta))
        lowered.extend(fixups)
    return lowered


def run_circuit(circuit: CircuitSpec, state: Optional[StateVector] = None) -> StateVector:
    """Apply the gates in order, starting from |0...0> unless a state is given."""
    if state is None:
        state = StateVector.zeros(circuit.n_qubits)
    if state.n_qubits != circuit.n_qubits:
        raise InvalidInputError(f"state has {state.n_qubits} qubits, circuit has {circuit.n_qubits}")
    for gate in circuit.gates:
        if gate.kind == GateKind.RBS:
            state = apply_rbs(state, gate.qubits[0], gate.qubits[1], gate.theta)
        elif gate.kind == GateKind.FBS:
            state = apply_fbs(state, gate.qubits[0], gate.qubits[1], gate.theta)
        elif gate.kind == GateKind.X:
            state = apply_x(state, gate.qubits[0])
        elif gate.kind == GateKind.Z:
            state = apply_z(state, gate.qubits[0])
        else:
            state = apply_cz(state, gate.qubits[0], gate.qubits[1])
    return state


def resources(circuit: CircuitSpec) -> Dict[str, object]:
    """
    Depth and gate counts.

    rbs_count includes FBS gates (beam splitters in either form).

    Returns:
        dict with depth, rbs_count, total_gates and per-kind counts under by_kind
    """
    by_kind = Counter(gate.kind.value for gate in circuit.gates)
    return {
        "depth": circuit.depth,
        "rbs_count": by_kind.get(GateKind.RBS.value, 0) + by_kind.get(GateKind.FBS.value, 0),
        "total_gates": len(circuit.gates),
        "by_kind": {kind.value: by_kind.get(kind.value, 0) for kind in GateKind},
    }
