"""Higher-order sigma-z Hamiltonians.

A :class:`LogicalHamiltonian` is a sum of products of Pauli-z operators with
real coefficients over ``num_spins`` logical spins, plus a constant offset.
Computational basis bits map to spin eigenvalues as ``s = 1 - 2*b``
(bit 0 -> +1, bit 1 -> -1).

Problem files are JSON::

    {"num_spins": 3, "constant": 0.0,
     "terms": [{"spins": [0, 1], "coeff": 1.0}, ...]}
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ZERO_TOL = 1e-15


class HamiltonianError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SpinTerm:
    spins: tuple[int, ...]
    coeff: float

    @property
    def order(self) -> int:
        return len(self.spins)


@dataclass(frozen=True)
class LogicalHamiltonian:
    """Canonical sigma-z polynomial.

    ``merges`` counts input terms that were folded into an existing spin set
    during canonicalization (the degeneracy count D).
    """

    num_spins: int
    terms: tuple[SpinTerm, ...]
    constant: float = 0.0
    merges: int = field(default=0, compare=False)

    @property
    def K(self) -> int:
        return len(self.terms)

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([t.coeff for t in self.terms], dtype=float)

    @classmethod
    def from_terms(
        cls,
        num_spins: int,
        terms: Iterable[tuple[Sequence[int], float]],
        constant: float = 0.0,
    ) -> "LogicalHamiltonian":
        """Build a canonical Hamiltonian from raw ``(spins, coeff)`` pairs.

        Repeated indices inside a term cancel pairwise (z*z = 1); terms with
        identical spin sets are summed; exact zeros are dropped.
        """
        if num_spins < 0:
            raise HamiltonianError("num_spins must be non-negative")
        if not math.isfinite(constant):
            raise HamiltonianError("non-finite constant")
        acc: dict[tuple[int, ...], float] = {}
        merges = 0
        const = float(constant)
        for spins, coeff in terms:
            coeff = float(coeff)
            if not math.isfinite(coeff):
                raise HamiltonianError(f"non-finite coefficient for term {list(spins)}")
            parity: Counter[int] = Counter()
            for s in spins:
                s = int(s)
                if s < 0 or s >= num_spins:
                    raise HamiltonianError(
                        f"spin index {s} out of range for num_spins={num_spins}"
                    )
                parity[s] += 1
            key = tuple(sorted(s for s, c in parity.items() if c % 2))
            if not key:
                const += coeff
                continue
            if key in acc:
                merges += 1
                acc[key] += coeff
            else:
                acc[key] = coeff
        kept = tuple(
            SpinTerm(k, c) for k, c in sorted(acc.items()) if abs(c) >= ZERO_TOL
        )
        return cls(num_spins, kept, const, merges)

    def to_dict(self) -> dict:
        return {
            "num_spins": self.num_spins,
            "constant": self.constant,
            "terms": [{"spins": list(t.spins), "coeff": t.coeff} for t in self.terms],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def with_terms(self, terms: Iterable[SpinTerm]) -> "LogicalHamiltonian":
        """Same spins and constant, different term subset (re-canonicalized)."""
        return LogicalHamiltonian.from_terms(
            self.num_spins, ((t.spins, t.coeff) for t in terms), self.constant
        )


def parse_hamiltonian(text: str) -> LogicalHamiltonian:
    """Parse a JSON problem file into a canonical Hamiltonian."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HamiltonianError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict) or "num_spins" not in data:
        raise HamiltonianError("problem file needs a 'num_spins' field")
    try:
        n = int(data["num_spins"])
        raw = [(t["spins"], t["coeff"]) for t in data.get("terms", [])]
        constant = float(data.get("constant", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise HamiltonianError(f"malformed term entry: {exc}") from exc
    return LogicalHamiltonian.from_terms(n, raw, constant)


def interaction_histogram(h: LogicalHamiltonian) -> dict[int, int]:
    return dict(sorted(Counter(t.order for t in h.terms).items()))


def mean_interaction_order(h: LogicalHamiltonian) -> float:
    if h.K == 0:
        raise HamiltonianError("mean interaction order of an empty Hamiltonian")
    return sum(t.order for t in h.terms) / h.K


def _spins_from_config(config: str | Sequence[int], n: int) -> np.ndarray:
    bits = [int(c) for c in config]
    if len(bits) != n:
        raise HamiltonianError(f"config has length {len(bits)}, expected {n}")
    if any(b not in (0, 1) for b in bits):
        raise HamiltonianError("config must contain only bits 0/1")
    return 1 - 2 * np.asarray(bits, dtype=int)


def diagonal_energy(h: LogicalHamiltonian, config: str | Sequence[int]) -> float:
    """Energy of a computational basis state; ``config[i]`` is the bit of spin i."""
    s = _spins_from_config(config, h.num_spins)
    total = h.constant
    for t in h.terms:
        total += t.coeff * int(np.prod(s[list(t.spins)]))
    return float(total)


def spin_table(n: int) -> np.ndarray:
    """(2**n, n) array of spin values; row index bit i is spin i."""
    idx = np.arange(2**n, dtype=np.int64)
    return 1 - 2 * ((idx[:, None] >> np.arange(n)) & 1).astype(np.int8)


def energies(h: LogicalHamiltonian, include_constant: bool = True) -> np.ndarray:
    """Energies of all 2**N basis states, indexed little-endian."""
    n = h.num_spins
    if n > 26:
        raise HamiltonianError("energy table limited to 26 spins")
    table = spin_table(n)
    out = np.full(2**n, h.constant if include_constant else 0.0)
    for t in h.terms:
        out += t.coeff * np.prod(table[:, list(t.spins)], axis=1)
    return out
