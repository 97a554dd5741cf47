"""Replica mapping of a general Pauli sum onto a sigma-z-only Hamiltonian.

Each qubit ``i`` is copied into replicas ``i_1 .. i_r``. For every replica pair
``j < k`` a Pauli string is rewritten factor by factor::

    X -> (1 - z_j z_k) / 2      Y -> (z_k - z_j) / 2
    Z -> (z_j + z_k) / 2        I -> (1 + z_j z_k) / 2

and multiplied by the sign spins of both replicas. Strings with an even number
of Y factors pick up ``(-1)**(nY/2)`` from ``i**nY``; strings with an odd count
have imaginary pair elements and are dropped with a warning.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from . import gf2
from .hamiltonian import LogicalHamiltonian

log = logging.getLogger(__name__)

AXES = ("X", "Y", "Z")
SIGN_MODES = ("sign_qubits", "fixed_plus")
_SIGN_ALIASES = {"qubits": "sign_qubits", "plus": "fixed_plus"}


class PauliParseError(ValueError):
    pass


@dataclass(frozen=True)
class PauliTerm:
    coeff: float
    factors: tuple[tuple[int, str], ...]  # sorted by qubit

    @property
    def label(self) -> str:
        return " ".join(f"{a}{q}" for q, a in self.factors) or "I"

    def axis(self, q: int) -> str:
        for qq, a in self.factors:
            if qq == q:
                return a
        return "I"

    @property
    def n_y(self) -> int:
        return sum(a == "Y" for _, a in self.factors)


@dataclass(frozen=True)
class PauliHamiltonian:
    num_qubits: int
    terms: tuple[PauliTerm, ...]
    constant: float = 0.0

    @classmethod
    def from_terms(
        cls,
        terms: Iterable[tuple[float, Sequence[tuple[int, str]]]],
        num_qubits: int | None = None,
        constant: float = 0.0,
    ) -> "PauliHamiltonian":
        acc: dict[tuple, float] = defaultdict(float)
        top = -1
        for coeff, factors in terms:
            seen: set[int] = set()
            clean = []
            for q, a in factors:
                a = a.upper()
                if a not in AXES:
                    raise PauliParseError(f"unknown Pauli axis {a!r}")
                if q < 0:
                    raise PauliParseError(f"negative qubit index {q}")
                if q in seen:
                    raise PauliParseError(f"qubit {q} repeated within one term")
                seen.add(q)
                clean.append((int(q), a))
                top = max(top, q)
            key = tuple(sorted(clean))
            if key:
                acc[key] += float(coeff)
            else:
                constant += float(coeff)
        n = top + 1 if num_qubits is None else num_qubits
        if top >= n:
            raise PauliParseError(f"qubit {top} out of range for {n} qubits")
        kept = tuple(PauliTerm(c, k) for k, c in sorted(acc.items()) if abs(c) > 1e-15)
        return cls(n, kept, constant)

    def diagonal(self, bits: Sequence[int]) -> float:
        """<b|H|b>: only all-Z strings contribute."""
        e = self.constant
        for t in self.terms:
            if all(a == "Z" for _, a in t.factors):
                e += t.coeff * (-1) ** sum(bits[q] for q, _ in t.factors)
        return e


def parse_pauli_sum(text: str, num_qubits: int | None = None) -> PauliHamiltonian:
    """Lines ``coeff P q [P q ...]``; a bare coefficient is an identity term; ``#`` starts a comment."""
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.replace("−", "-").split()
        try:
            coeff = float(tok[0])
        except ValueError:
            raise PauliParseError(f"line {lineno}: bad coefficient {tok[0]!r}") from None
        rest = tok[1:]
        if len(rest) % 2:
            raise PauliParseError(f"line {lineno}: expected axis/qubit pairs")
        factors = []
        for a, q in zip(rest[::2], rest[1::2]):
            try:
                factors.append((int(q), a))
            except ValueError:
                raise PauliParseError(f"line {lineno}: bad qubit index {q!r}") from None
        try:
            PauliHamiltonian.from_terms([(coeff, factors)])
            terms.append((coeff, factors))
        except PauliParseError as exc:
            raise PauliParseError(f"line {lineno}: {exc}") from None
    return PauliHamiltonian.from_terms(terms, num_qubits)


@dataclass(frozen=True)
class ReplicationSpec:
    r: int = 2
    sign_mode: str = "sign_qubits"

    def __post_init__(self) -> None:
        mode = _SIGN_ALIASES.get(self.sign_mode, self.sign_mode)
        object.__setattr__(self, "sign_mode", mode)
        if mode not in SIGN_MODES:
            raise ValueError(f"sign_mode must be one of {SIGN_MODES}")
        if self.r < 2:
            raise ValueError("replication factor r must be >= 2")

    def num_qubits(self, n: int) -> int:
        return n * self.r + (self.r if self.sign_mode == "sign_qubits" else 0)


@dataclass(frozen=True)
class ReplicaLayout:
    n: int
    r: int
    sign_qubits: bool

    def index(self, i: int, j: int) -> int:
        """Physical index of replica ``j`` (1-based) of qubit ``i``."""
        if not (0 <= i < self.n and 1 <= j <= self.r):
            raise IndexError(f"no replica ({i}, {j})")
        return (j - 1) * self.n + i

    def sign(self, j: int) -> int:
        if not self.sign_qubits:
            raise IndexError("layout has no sign qubits")
        return self.n * self.r + (j - 1)

    def unmap(self, idx: int) -> tuple[str, int, int]:
        """Inverse of index/sign: ("replica", i, j) or ("sign", -1, j)."""
        if 0 <= idx < self.n * self.r:
            return ("replica", idx % self.n, idx // self.n + 1)
        if self.sign_qubits and idx < self.n * self.r + self.r:
            return ("sign", -1, idx - self.n * self.r + 1)
        raise IndexError(f"index {idx} outside the layout")

    def as_dict(self) -> dict:
        return {
            "replicas": {(i, j): self.index(i, j) for j in range(1, self.r + 1) for i in range(self.n)},
            "signs": [self.sign(j) for j in range(1, self.r + 1)] if self.sign_qubits else [],
        }


def replica_qubit_layout(n: int, spec: ReplicationSpec) -> ReplicaLayout:
    return ReplicaLayout(n, spec.r, spec.sign_mode == "sign_qubits")


def _factor_poly(axis: str, a: int, b: int) -> dict[int, float]:
    """Relation for one qubit on replica sites a (=j) and b (=k), as spin-mask polynomial."""
    ma, mb = 1 << a, 1 << b
    if axis == "X":
        return {0: 0.5, ma | mb: -0.5}
    if axis == "Y":
        return {mb: 0.5, ma: -0.5}
    if axis == "Z":
        return {ma: 0.5, mb: 0.5}
    return {0: 0.5, ma | mb: 0.5}


def _spin_mul(p: dict[int, float], q: dict[int, float]) -> dict[int, float]:
    out: dict[int, float] = defaultdict(float)
    for ma in sorted(p):
        for mb in sorted(q):
            out[ma ^ mb] += p[ma] * q[mb]
    return out


def replicate(h: PauliHamiltonian, spec: ReplicationSpec) -> LogicalHamiltonian:
    layout = replica_qubit_layout(h.num_qubits, spec)
    total: dict[int, float] = defaultdict(float)
    dropped = [t for t in h.terms if t.n_y % 2]
    if dropped:
        log.warning(
            "dropping %d Pauli strings with an odd number of Y factors: %s",
            len(dropped), ", ".join(t.label for t in dropped[:5]),
        )
    # the identity string contributes the constant times the all-identity product
    strings = [(h.constant, ())] if h.constant else []
    strings += [(t.coeff, t.factors) for t in h.terms if t.n_y % 2 == 0]
    for j, k in combinations(range(1, spec.r + 1), 2):
        sign_mask = (1 << layout.sign(j) | 1 << layout.sign(k)) if layout.sign_qubits else 0
        for coeff, factors in strings:
            axes = dict(factors)
            n_y = sum(a == "Y" for a in axes.values())
            poly: dict[int, float] = {0: coeff * (-1) ** (n_y // 2)}
            for i in range(h.num_qubits):
                poly = _spin_mul(poly, _factor_poly(axes.get(i, "I"), layout.index(i, j), layout.index(i, k)))
            for m in sorted(poly):
                total[m ^ sign_mask] += poly[m]
    constant = total.pop(0, 0.0)
    return LogicalHamiltonian.from_terms(
        spec.num_qubits(h.num_qubits),
        ((gf2.bits_of(m), c) for m, c in sorted(total.items())),
        constant,
    )


def agreeing_configuration(bits: Sequence[int], spec: ReplicationSpec) -> list[int]:
    """Replica-agreeing extension of a basis state with all signs +1 (bit 0)."""
    out = list(bits) * spec.r
    if spec.sign_mode == "sign_qubits":
        out += [0] * spec.r
    return out


def n_pairs(r: int) -> int:
    return math.comb(r, 2)


def load_sample(name: str) -> PauliHamiltonian:
    """Bundled sample Pauli sums: ``h2`` (4 qubits) or ``lih`` (6 qubits)."""
    from importlib.resources import files

    fname = {"h2": "h2_sample.txt", "lih": "lih_sample.txt"}.get(name)
    if fname is None:
        raise KeyError(f"unknown sample {name!r}; expected 'h2' or 'lih'")
    return parse_pauli_sum(files("paritybench.data").joinpath(fname).read_text())
