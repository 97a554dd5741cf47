"""Parity transformation: one physical qubit per Hamiltonian term.

Physical qubit k carries the product of the logical spins of term k. Valid
physical configurations are exactly those whose parity over every GF(2)
dependency of the term-membership rows is even; each such dependency is a
constraint. With bit convention ``s = 1 - 2b`` every constraint fixes the
product of its qubits' spins to +1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from . import gf2
from .hamiltonian import LogicalHamiltonian

log = logging.getLogger(__name__)

ENUMERATION_CAP = 10**7
RANDOM_TRIALS = 10**5

# worst case: every constraint is 4-body, i.e. a 6-CNOT ladder
WORST_CASE_CNOTS = 6


class UnresolvedConstraintsError(RuntimeError):
    pass


@dataclass(frozen=True)
class ParityMatrix:
    num_spins: int
    rows: tuple[int, ...]

    @property
    def K(self) -> int:
        return len(self.rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.K, self.num_spins), dtype=np.uint8)
        for k, row in enumerate(self.rows):
            out[k, gf2.bits_of(row)] = 1
        return out


@dataclass(frozen=True)
class Constraint:
    terms: tuple[int, ...]
    sign: int = 1
    strength: float = 1.0

    @property
    def weight(self) -> int:
        return len(self.terms)


@dataclass
class MappingReport:
    N: int
    K: int
    rank: int
    n_constraints: int
    D: int = 0
    constraints: list[Constraint] = field(default_factory=list)
    unresolved: int = 0
    # completion of the nullspace basis for dimensions without a low-weight
    # representative; each entry is a set of physical qubits
    unresolved_terms: list[tuple[int, ...]] = field(default_factory=list)
    basis_searched: bool = True

    @property
    def unresolved_weights(self) -> list[int]:
        return [len(t) for t in self.unresolved_terms]

    def all_dependencies(self) -> list[tuple[int, ...]]:
        return [c.terms for c in self.constraints] + list(self.unresolved_terms)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "K": self.K,
            "rank": self.rank,
            "n_constraints": self.n_constraints,
            "D": self.D,
            "constraints": [
                {"terms": list(c.terms), "weight": c.weight} for c in self.constraints
            ],
            "unresolved": self.unresolved,
            "unresolved_weights": self.unresolved_weights,
        }


@dataclass(frozen=True)
class GateCount:
    mode: str
    n_cnot: int
    n_coupler: int
    n_rz: int


def build_parity_matrix(h: LogicalHamiltonian) -> ParityMatrix:
    return ParityMatrix(h.num_spins, tuple(gf2.mask_of(t.spins) for t in h.terms))


def count_constraints(m: ParityMatrix) -> tuple[int, int]:
    r = gf2.rank(m.rows)
    return r, m.K - r


def _xor_rows(rows: Sequence[int], idx: Sequence[int]) -> int:
    acc = 0
    for i in idx:
        acc ^= rows[i]
    return acc


def _enumerate_low_weight(rows: Sequence[int], max_weight: int):
    """Yield nullspace vectors of weight 2..max_weight in lexicographic order.

    The last index of each candidate is found by hash lookup, so weight w
    costs O(K**(w-1)) rather than O(K**w).
    """
    where: dict[int, list[int]] = {}
    for k, row in enumerate(rows):
        where.setdefault(row, []).append(k)
    K = len(rows)
    for w in range(2, max_weight + 1):
        for head in combinations(range(K), w - 1):
            need = _xor_rows(rows, head)
            for last in where.get(need, ()):
                if last > head[-1]:
                    yield head + (last,)


def _reduce_weights(
    pool: list[int],
    rng: np.random.Generator,
    trials: int,
    max_weight: int,
    first_mutable: int = 0,
) -> None:
    """In-place pairwise XOR reduction of ``pool[first_mutable:]``.

    Only elementary row operations are applied, so ``pool`` stays a basis of
    the same space and entries before ``first_mutable`` are left untouched.
    """
    n = len(pool)
    if n < 2 or first_mutable >= n:
        return
    # deterministic sweep first, then random pairs
    improved = True
    sweeps = 0
    while improved and sweeps < 3:
        improved = False
        sweeps += 1
        order = sorted(range(n), key=lambda i: gf2.popcount(pool[i]))
        for i in order:
            if i < first_mutable:
                continue
            for j in order:
                if i == j:
                    continue
                v = pool[i] ^ pool[j]
                if gf2.popcount(v) < gf2.popcount(pool[i]):
                    pool[i] = v
                    improved = True
    heavy = [i for i in range(first_mutable, n) if gf2.popcount(pool[i]) > max_weight]
    if not heavy or not trials:
        return
    picks_i = rng.integers(len(heavy), size=trials)
    picks_j = rng.integers(n, size=trials)
    for a, j in zip(picks_i, picks_j):
        i = heavy[a]
        if i == j:
            continue
        v = pool[i] ^ pool[j]
        if gf2.popcount(v) < gf2.popcount(pool[i]):
            pool[i] = v


def find_constraint_basis(
    m: ParityMatrix,
    max_weight: int = 4,
    rng: np.random.Generator | None = None,
    trials: int = RANDOM_TRIALS,
    enumeration_cap: int = ENUMERATION_CAP,
) -> tuple[list[Constraint], list[tuple[int, ...]]]:
    """Greedy independent set of low-weight constraints.

    Returns the constraints and, for every nullspace dimension left without a
    representative of weight <= ``max_weight``, one completion vector.
    """
    rows = m.rows
    _, n_c = count_constraints(m)
    if n_c == 0:
        return [], []
    chosen = gf2.IncrementalBasis()
    found: list[int] = []
    K = m.K
    n_enum = sum(comb(K, w) for w in range(3, max_weight + 1))
    if n_enum <= enumeration_cap:
        for combo in _enumerate_low_weight(rows, max_weight):
            v = gf2.mask_of(combo)
            if chosen.add(v):
                found.append(v)
                if len(found) == n_c:
                    break
        completion = [v for v in gf2.nullspace(rows) if chosen.add(v)]
        if completion:
            pool = found + completion
            _reduce_weights(pool, rng or np.random.default_rng(0), 0, max_weight, len(found))
            completion = pool[len(found):]
    else:
        log.info("constraint search: K=%d exceeds enumeration cap, using random reduction", K)
        pool = gf2.nullspace(rows)
        _reduce_weights(pool, rng or np.random.default_rng(0), trials, max_weight)
        found = [v for v in pool if gf2.popcount(v) <= max_weight]
        completion = [v for v in pool if gf2.popcount(v) > max_weight]
    found.sort(key=lambda v: (gf2.popcount(v), gf2.bits_of(v)))
    constraints = [Constraint(tuple(gf2.bits_of(v))) for v in found]
    return constraints, [tuple(gf2.bits_of(v)) for v in completion]


def map_to_parity(
    h: LogicalHamiltonian,
    find_basis: bool = True,
    max_weight: int = 4,
    rng: np.random.Generator | None = None,
) -> MappingReport:
    m = build_parity_matrix(h)
    r, n_c = count_constraints(m)
    report = MappingReport(N=h.num_spins, K=h.K, rank=r, n_constraints=n_c, D=h.merges)
    if not find_basis:
        report.basis_searched = False
        report.unresolved = n_c
        return report
    constraints, completion = find_constraint_basis(m, max_weight, rng)
    report.constraints = constraints
    report.unresolved_terms = completion
    report.unresolved = len(completion)
    return report


def _mode_name(mode: str) -> str:
    aliases = {"worst": "worst_case", "worst_case": "worst_case", "basis": "basis", "coupler": "coupler"}
    try:
        return aliases[mode]
    except KeyError:
        raise ValueError(f"unknown parity gate-count mode {mode!r}") from None


def constraint_cnots(weight: int) -> int:
    """CNOTs of a ladder-implemented constraint: 2(w-1), i.e. 4 for w=3, 6 for w=4."""
    return 2 * (weight - 1)


def parity_gate_count(report: MappingReport, mode: str = "worst_case") -> GateCount:
    mode = _mode_name(mode)
    n_c = report.n_constraints
    if mode == "worst_case":
        return GateCount(mode, WORST_CASE_CNOTS * n_c, 0, report.K)
    if mode == "coupler":
        return GateCount(mode, 0, n_c, report.K)
    if not report.basis_searched or report.unresolved:
        raise UnresolvedConstraintsError(
            f"basis mode needs a complete constraint basis; {report.unresolved} of "
            f"{n_c} dimensions unresolved (weights {report.unresolved_weights})"
        )
    return GateCount(mode, sum(constraint_cnots(c.weight) for c in report.constraints), 0, report.K)


def physical_configuration(h: LogicalHamiltonian, config: Sequence[int]) -> list[int]:
    """Physical bits induced by a logical bit assignment (XOR over each term)."""
    out = []
    for t in h.terms:
        b = 0
        for s in t.spins:
            b ^= int(config[s])
        out.append(b)
    return out
