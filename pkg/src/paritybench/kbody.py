"""Random k-body hypergraph instances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .hamiltonian import LogicalHamiltonian

GRID_N = (9, 10, 11, 12)
GRID_N1 = (0, 2, 4, 6, 8)
GRID_N2 = (11, 13, 15, 17, 19)
GRID_NHIGH = (0, 2, 4)


class InfeasibleSpecError(ValueError):
    pass


@dataclass(frozen=True)
class KBodySpec:
    N: int
    counts: tuple[tuple[int, int], ...]
    seed: int = 0
    coefficient_mode: str = "unit"

    def __post_init__(self) -> None:
        if self.coefficient_mode not in ("unit", "gaussian"):
            raise ValueError(f"unknown coefficient mode {self.coefficient_mode!r}")
        for k, n_k in self.counts:
            if k < 1 or n_k < 0:
                raise InfeasibleSpecError(f"bad count entry {k}:{n_k}")
            if n_k > comb(self.N, k):
                raise InfeasibleSpecError(
                    f"n_{k}={n_k} exceeds C({self.N},{k})={comb(self.N, k)}"
                )

    @classmethod
    def make(cls, N: int, counts: dict[int, int], seed: int = 0, coefficient_mode: str = "unit") -> "KBodySpec":
        return cls(N, tuple(sorted((k, v) for k, v in counts.items() if v)), seed, coefficient_mode)

    @property
    def K(self) -> int:
        return sum(n for _, n in self.counts)

    @property
    def kbar(self) -> float:
        return sum(k * n for k, n in self.counts) / self.K


def parse_counts(text: str) -> dict[int, int]:
    """``"1:2,2:11,3:2"`` -> {1: 2, 2: 11, 3: 2}."""
    out: dict[int, int] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        k, _, v = part.partition(":")
        try:
            out[int(k)] = out.get(int(k), 0) + int(v)
        except ValueError:
            raise ValueError(f"bad count entry {part!r}; expected k:n") from None
    return out


def floyd_sample(rng: np.random.Generator, population: int, m: int) -> list[int]:
    """Robert Floyd's algorithm: m distinct integers from range(population)."""
    chosen: set[int] = set()
    for j in range(population - m, population):
        t = int(rng.integers(0, j + 1))
        chosen.add(j if t in chosen else t)
    return sorted(chosen)


def unrank_combination(rank: int, n: int, k: int) -> tuple[int, ...]:
    """Lexicographic unranking of k-subsets of range(n)."""
    out = []
    x = 0
    for i in range(k, 0, -1):
        while comb(n - x - 1, i - 1) <= rank:
            rank -= comb(n - x - 1, i - 1)
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def generate(spec: KBodySpec) -> LogicalHamiltonian:
    rng = np.random.default_rng(spec.seed)
    terms = []
    for k, n_k in spec.counts:
        for r in floyd_sample(rng, comb(spec.N, k), n_k):
            coeff = 1.0 if spec.coefficient_mode == "unit" else float(rng.normal())
            terms.append((unrank_combination(r, spec.N, k), coeff))
    return LogicalHamiltonian.from_terms(spec.N, terms)


def paper_grid(
    n_seeds: int = 10,
    Ns: Sequence[int] = GRID_N,
    seed0: int = 0,
) -> list[KBodySpec]:
    """Cross product of the mixed-order benchmark grid, ``n_seeds`` each."""
    specs = []
    for N, n1, n2, n3, n4, n5 in itertools.product(Ns, GRID_N1, GRID_N2, GRID_NHIGH, GRID_NHIGH, GRID_NHIGH):
        counts = {1: n1, 2: n2, 3: n3, 4: n4, 5: n5}
        for s in range(n_seeds):
            specs.append(KBodySpec.make(N, counts, seed0 + s))
    return specs


def default_k_range(N: int) -> range:
    return range(5, 11) if N == 5 else range(10, 71)


def slope_family(
    N: int,
    k: int,
    K_range: Iterable[int] | None = None,
    instances_per_K: int = 5,
    seed0: int = 0,
) -> list[KBodySpec]:
    K_range = default_k_range(N) if K_range is None else K_range
    specs = []
    for K in K_range:
        if K > comb(N, k):
            raise InfeasibleSpecError(f"K={K} exceeds C({N},{k})={comb(N, k)}")
        for i in range(instances_per_K):
            specs.append(KBodySpec.make(N, {k: K}, seed0 + 1000 * K + i))
    return specs
