"""Gate lists over indexed qubits.

Conventions: ``RZ(t) = exp(-i t Z / 2)``, ``RX(t) = exp(-i t X / 2)`` and
``ZZZZ(t) = exp(-i t Z...Z / 2)`` over all of its qubits (a native parity
coupler; three or four qubits). ``BRIDGE`` stores ``(control, middle,
target)`` and performs CNOT(control, target) through the middle qubit using
four CNOTs, leaving the middle qubit unchanged.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

GATES = {"H": 1, "RX": 1, "RZ": 1, "CNOT": 2, "SWAP": 2, "BRIDGE": 3, "ZZZZ": None}
PARAMETRIC = {"RX", "RZ", "ZZZZ"}
CNOT_COST = {"CNOT": 1, "SWAP": 3, "BRIDGE": 4}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    angle: float | None = None
    # index of the Hamiltonian term whose angle an unbound RZ carries
    term: int | None = None

    def to_dict(self) -> dict:
        d: dict = {"gate": self.name, "q": list(self.qubits)}
        if self.angle is not None:
            d["angle"] = self.angle
        if self.term is not None:
            d["term"] = self.term
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Gate":
        return cls(d["gate"], tuple(d["q"]), d.get("angle"), d.get("term"))


def gate_summary(gates: Iterable[Gate]) -> dict[str, int]:
    c = Counter(g.name for g in gates)
    return {
        "n_cnot": c["CNOT"],
        "n_swap": c["SWAP"],
        "n_bridge": c["BRIDGE"],
        "n_zzzz": c["ZZZZ"],
        "cnot_equivalent": sum(CNOT_COST[k] * c[k] for k in CNOT_COST),
    }


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)
    embedding: str = ""
    # logical qubit -> circuit qubit holding it at the end of the circuit
    layout: list[int] | None = None

    def append(self, name: str, qubits, angle: float | None = None, term: int | None = None) -> None:
        qubits = tuple(int(q) for q in qubits)
        arity = GATES.get(name, 0)
        if name not in GATES:
            raise ValueError(f"unknown gate {name!r}")
        if arity is not None and len(qubits) != arity:
            raise ValueError(f"{name} takes {arity} qubits, got {len(qubits)}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{name} on repeated qubits {qubits}")
        if any(q < 0 or q >= self.num_qubits for q in qubits):
            raise ValueError(f"{name} qubits {qubits} out of range for {self.num_qubits}")
        if angle is not None and not math.isfinite(angle):
            raise ValueError(f"non-finite angle on {name}")
        self.gates.append(Gate(name, qubits, angle, term))

    def extend(self, other: "Circuit") -> None:
        if other.num_qubits != self.num_qubits:
            raise ValueError("qubit count mismatch")
        self.gates.extend(other.gates)

    def count(self, name: str) -> int:
        return sum(1 for g in self.gates if g.name == name)

    def summary(self) -> dict[str, int]:
        return gate_summary(self.gates)

    def to_dict(self) -> dict:
        d = {
            "num_qubits": self.num_qubits,
            "embedding": self.embedding,
            "gates": [g.to_dict() for g in self.gates],
            "summary": self.summary(),
        }
        if self.layout is not None:
            d["layout"] = list(self.layout)
        return d

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        c = cls(d["num_qubits"], [Gate.from_dict(g) for g in d["gates"]], d.get("embedding", ""))
        c.layout = d.get("layout")
        return c
