"""QAOA circuits for the gate-model and parity embeddings.

Paper unitaries map onto the gate alphabet by angle doubling:
``exp(-i b X) = RX(2b)``, ``exp(-i g c Z..Z)`` = phase gadget with ``RZ(2 g c)``
and ``exp(-i W Z..Z)`` on a constraint = ``ZZZZ(2 W)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .circuit import Circuit, Gate
from .hamiltonian import LogicalHamiltonian
from .parity import MappingReport, UnresolvedConstraintsError
from .router import RoutedCircuit

EMBEDDINGS = ("gm", "parity", "parity_coupler")


class BindingError(ValueError):
    pass


@dataclass(frozen=True)
class QaoaParams:
    p: int
    betas: tuple[float, ...] = ()
    gammas: tuple[float, ...] = ()
    omegas: tuple[float, ...] = ()
    check_ranges: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.p < 0:
            raise ValueError("QAOA depth must be non-negative")
        if len(self.betas) != self.p or len(self.gammas) != self.p:
            raise ValueError(f"need {self.p} betas and gammas")
        if self.omegas and len(self.omegas) != self.p:
            raise ValueError(f"need {self.p} omegas")
        for v in (*self.betas, *self.gammas, *self.omegas):
            if not math.isfinite(v):
                raise ValueError("QAOA angles must be finite")
        if self.check_ranges:
            if any(not 0 <= b < math.pi for b in self.betas):
                raise ValueError("betas must lie in [0, pi)")
            if any(not 0 <= g < 2 * math.pi for g in (*self.gammas, *self.omegas)):
                raise ValueError("gammas and omegas must lie in [0, 2 pi)")

    def omega(self, i: int) -> float:
        return self.omegas[i] if self.omegas else 0.0


def build_initial_state_prep(n: int, qubits: Sequence[int] | None = None, num_qubits: int | None = None) -> Circuit:
    if n < 1:
        raise ValueError("need at least one qubit")
    qubits = list(range(n)) if qubits is None else list(qubits)
    c = Circuit(num_qubits or n, embedding="prep")
    for q in qubits:
        c.append("H", (q,))
    return c


def build_driver(n: int, beta: float, qubits: Sequence[int] | None = None, num_qubits: int | None = None) -> Circuit:
    """``prod_j exp(-i beta X_j)`` as RX(2 beta) on every qubit."""
    if not math.isfinite(beta):
        raise ValueError("beta must be finite")
    qubits = list(range(n)) if qubits is None else list(qubits)
    c = Circuit(num_qubits or n, embedding="driver")
    for q in qubits:
        c.append("RX", (q,), 2 * beta)
    return c


def _bind(gates: Sequence[Gate], h: LogicalHamiltonian, gamma: float) -> list[Gate]:
    out = []
    for g in gates:
        if g.name == "RZ" and g.term is not None:
            g = Gate("RZ", g.qubits, 2 * gamma * h.terms[g.term].coeff, g.term)
        out.append(g)
    return out


def build_gm_problem_unitary(
    h: LogicalHamiltonian, gamma: float, routed: RoutedCircuit, reverse: bool = False
) -> Circuit:
    """Bind the routed phase-separation layer to ``exp(-i gamma H)`` (constant dropped).

    ``reverse`` plays the gate list backwards, which implements the same
    diagonal unitary while carrying qubits from the final placement back to
    the initial one.
    """
    rz_terms = sorted(g.term for g in routed.gates if g.name == "RZ")
    if rz_terms != list(range(h.K)):
        raise BindingError(
            f"routed circuit has {len(rz_terms)} term rotations, Hamiltonian has {h.K} terms"
        )
    c = Circuit(routed.lattice.num_sites, embedding="gm")
    gates = _bind(routed.gates, h, gamma)
    c.gates = gates[::-1] if reverse else gates
    c.layout = list(routed.initial_placement if reverse else routed.final_placement)
    return c


def _ladder(c: Circuit, qubits: Sequence[int], angle: float) -> None:
    ladder = list(zip(qubits, qubits[1:]))
    for a, b in ladder:
        c.append("CNOT", (a, b))
    c.append("RZ", (qubits[-1],), angle)
    for a, b in reversed(ladder):
        c.append("CNOT", (a, b))


def build_parity_cycle(
    report: MappingReport,
    coeffs: Sequence[float],
    gamma: float,
    omega: float,
    mode: str = "cnot",
) -> Circuit:
    """U_c(omega) U_z(gamma) on the K physical qubits.

    ``mode="cnot"`` implements each constraint as a CNOT ladder around
    RZ(2 omega c_l); ``mode="coupler"`` uses one native ZZZZ(2 omega c_l).
    """
    if mode not in ("cnot", "coupler"):
        raise ValueError(f"unknown parity mode {mode!r}")
    if len(coeffs) != report.K:
        raise BindingError(f"{len(coeffs)} coefficients for {report.K} physical qubits")
    if report.n_constraints and (not report.basis_searched or report.unresolved):
        raise UnresolvedConstraintsError(
            f"{report.unresolved} constraints without a weight<=4 representative; "
            "cannot emit the constraint layer"
        )
    c = Circuit(report.K, embedding="parity" if mode == "cnot" else "parity_coupler")
    for k, j in enumerate(coeffs):
        c.append("RZ", (k,), 2 * gamma * j)
    for con in report.constraints:
        angle = 2 * omega * con.strength
        if mode == "coupler":
            c.append("ZZZZ", con.terms, angle)
        else:
            _ladder(c, con.terms, angle)
    return c


def assemble_gm_qaoa(h: LogicalHamiltonian, params: QaoaParams, routed: RoutedCircuit) -> Circuit:
    """Prep then p x (U_p(gamma_i), U_x(beta_i)) on the lattice.

    Odd cycles play the routed layer forwards, even cycles backwards, so the
    placement shuttles between the initial and final layouts.
    """
    sites = routed.lattice.num_sites
    c = Circuit(sites, embedding="gm")
    layout = list(routed.initial_placement)
    if h.num_spins:
        c.extend(build_initial_state_prep(h.num_spins, layout, sites))
    for i in range(params.p):
        layer = build_gm_problem_unitary(h, params.gammas[i], routed, reverse=bool(i % 2))
        c.extend(layer)
        layout = layer.layout
        c.extend(build_driver(h.num_spins, params.betas[i], layout, sites))
    c.layout = layout
    return c


def assemble_parity_qaoa(
    h: LogicalHamiltonian, report: MappingReport, params: QaoaParams, mode: str = "cnot"
) -> Circuit:
    """Prep then p x (U_z(gamma_i), U_c(omega_i), U_x(beta_i)) on K physical qubits."""
    K = report.K
    c = Circuit(K, embedding="parity" if mode == "cnot" else "parity_coupler")
    if K:
        c.extend(build_initial_state_prep(K))
    coeffs = [t.coeff for t in h.terms]
    for i in range(params.p):
        layer = build_parity_cycle(report, coeffs, params.gammas[i], params.omega(i), mode)
        c.gates.extend(layer.gates)
        c.extend(build_driver(K, params.betas[i]))
    return c


def assemble_qaoa(
    h: LogicalHamiltonian,
    params: QaoaParams,
    embedding: str,
    routed: RoutedCircuit | None = None,
    report: MappingReport | None = None,
) -> Circuit:
    if embedding == "gm":
        if routed is None:
            raise ValueError("gate-model assembly needs a routed circuit")
        return assemble_gm_qaoa(h, params, routed)
    if embedding in ("parity", "parity_coupler"):
        if report is None:
            raise ValueError("parity assembly needs a mapping report")
        return assemble_parity_qaoa(h, report, params, "cnot" if embedding == "parity" else "coupler")
    raise ValueError(f"unknown embedding {embedding!r}; expected one of {EMBEDDINGS}")
