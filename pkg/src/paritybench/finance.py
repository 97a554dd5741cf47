"""Financial-network crash model and its sigma-z encoding.

Market values solve ``v = Cs (1 - C)^-1 (D p - b(v))`` with failure terms
``b_i = beta_i (1 - step(v_i - vc_i))``. The squared residual of that
equation is the cost function; it is encoded by writing every ``v_i`` with
``q`` bits, replacing the step by a truncated Legendre series in
``(v_i - vc_i) / v_max`` and expanding into multilinear monomials.

Bit ``x_{i,k}`` (weight ``2**k`` in ``v_i``) lives on qubit ``i*q + k`` and is
read through the package-wide convention ``x = (1 - s) / 2``, so a basis
bitstring is directly the bit assignment.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import legendre as npleg
from scipy.special import eval_legendre

from . import gf2
from .hamiltonian import LogicalHamiltonian, diagonal_energy

log = logging.getLogger(__name__)

MONOMIAL_CAP = 10**7
HEAVISIDE_MODES = ("orthogonal", "paper_verbatim")


class EncodingOverflow(RuntimeError):
    pass


class SingularNetworkError(np.linalg.LinAlgError):
    pass


@dataclass
class FinancialNetwork:
    D: np.ndarray  # (n, m) ownership fractions
    C: np.ndarray  # (n, n) cross-holdings, zero diagonal
    self_holdings: np.ndarray  # (n,) diagonal of the self-holding matrix
    prices: np.ndarray  # (m,)
    critical: np.ndarray  # (n,) critical market values
    drops: np.ndarray  # (n,) equity drop on failure

    @property
    def n(self) -> int:
        return self.D.shape[0]

    @property
    def m(self) -> int:
        return self.D.shape[1]

    def check(self) -> list[str]:
        problems = []
        if np.any(self.D < 0) or np.any(self.D > 1):
            problems.append("ownership entries outside [0, 1]")
        if np.any(self.D.sum(axis=0) > 1 + 1e-12):
            problems.append("asset ownership column sum exceeds 1")
        if np.any(np.diag(self.C) != 0):
            problems.append("cross-holding matrix has a non-zero diagonal")
        if np.any(self.C.sum(axis=0) + self.self_holdings > 1 + 1e-12):
            problems.append("holding column sum plus self-holding exceeds 1")
        return problems

    def to_dict(self) -> dict:
        return {
            "D": self.D.tolist(),
            "C": self.C.tolist(),
            "self_holdings": self.self_holdings.tolist(),
            "prices": self.prices.tolist(),
            "critical": self.critical.tolist(),
            "drops": self.drops.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FinancialNetwork":
        return cls(*(np.asarray(d[k], dtype=float) for k in
                     ("D", "C", "self_holdings", "prices", "critical", "drops")))


@dataclass(frozen=True)
class EncodingSpec:
    q: int = 5
    r: int = 3
    heaviside_mode: str = "orthogonal"
    top_terms: int | None = None
    chop: float | None = None

    def __post_init__(self) -> None:
        if self.q < 1 or self.r < 1:
            raise ValueError("need q >= 1 and r >= 1")
        if self.heaviside_mode not in HEAVISIDE_MODES:
            raise ValueError(f"heaviside_mode must be one of {HEAVISIDE_MODES}")
        if self.top_terms is not None and self.chop is not None:
            raise ValueError("choose either top_terms or chop, not both")

    @property
    def v_max(self) -> int:
        return 2**self.q - 1

    def untruncated(self) -> "EncodingSpec":
        return EncodingSpec(self.q, self.r, self.heaviside_mode)


def _propagator(net: FinancialNetwork) -> np.ndarray:
    """Cs (1 - C)^-1."""
    A = np.eye(net.n) - net.C
    try:
        inv = np.linalg.solve(A, np.eye(net.n))
    except np.linalg.LinAlgError as exc:
        raise SingularNetworkError("(1 - C) is singular") from exc
    return np.diag(net.self_holdings) @ inv


def equity_values(net: FinancialNetwork) -> np.ndarray:
    A = np.eye(net.n) - net.C
    try:
        return np.linalg.solve(A, net.D @ net.prices)
    except np.linalg.LinAlgError as exc:
        raise SingularNetworkError("(1 - C) is singular") from exc


def market_values(net: FinancialNetwork) -> np.ndarray:
    return net.self_holdings * equity_values(net)


def crash_cost(net: FinancialNetwork, v: Sequence[float]) -> float:
    """Squared equilibrium residual with the exact step (failure iff v_i < vc_i)."""
    v = np.asarray(v, dtype=float)
    failed = np.heaviside(v - net.critical, 1.0)
    b = net.drops * (1.0 - failed)
    resid = v - _propagator(net) @ (net.D @ net.prices - b)
    return float(resid @ resid)


def heaviside_coefficients(r: int, mode: str = "orthogonal") -> np.ndarray:
    """Legendre coefficients c_0..c_r of the step function on [-1, 1].

    ``orthogonal`` is the L2 projection, ``c_l = (P_{l-1}(0) - P_{l+1}(0)) / 2``;
    ``paper_verbatim`` uses ``c_l = P_{l-1}(0) + P_{l+1}(0)``.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if mode not in HEAVISIDE_MODES:
        raise ValueError(f"mode must be one of {HEAVISIDE_MODES}")
    out = np.empty(r + 1)
    out[0] = 0.5
    for l in range(1, r + 1):
        lo, hi = eval_legendre(l - 1, 0.0), eval_legendre(l + 1, 0.0)
        out[l] = (lo - hi) / 2 if mode == "orthogonal" else lo + hi
    return out


def step_series(x, r: int, mode: str = "orthogonal"):
    return npleg.legval(x, heaviside_coefficients(r, mode))


def _step_polynomial_in_v(coeffs: np.ndarray, vc: float, v_max: float) -> Polynomial:
    """Truncated step series composed with x = (v - vc) / v_max, as a power series in v."""
    in_x = Polynomial(npleg.leg2poly(coeffs))
    return in_x(Polynomial([-vc / v_max, 1.0 / v_max]))


Poly = dict  # bitmask over bit variables -> coefficient


def _mul(a: Poly, b: Poly, cap: int = MONOMIAL_CAP) -> Poly:
    out: dict[int, float] = defaultdict(float)
    for ma in sorted(a):
        ca = a[ma]
        for mb in sorted(b):
            out[ma | mb] += ca * b[mb]
        if len(out) > cap:
            raise EncodingOverflow(f"more than {cap} intermediate monomials")
    return dict(out)


def _add_into(acc: dict, p: Poly, scale: float = 1.0) -> None:
    for m in sorted(p):
        acc[m] = acc.get(m, 0.0) + scale * p[m]


def _univariate_to_bits(poly: Polynomial, offset: int, q: int, cap: int) -> Poly:
    """Multilinear form of poly(v) with v = sum_k 2**k x_{offset+k}."""
    v = {1 << (offset + k): float(2**k) for k in range(q)}
    power: Poly = {0: 1.0}
    out: dict[int, float] = {}
    for d, a in enumerate(poly.coef):
        if d:
            power = _mul(power, v, cap)
        if a != 0.0:
            _add_into(out, power, float(a))
    return out


def _bits_to_spins(p: Poly, cap: int) -> dict[int, float]:
    """Substitute x_k = (1 - s_k)/2 and collect sigma-z monomials."""
    out: dict[int, float] = defaultdict(float)
    for mask in sorted(p):
        c = p[mask]
        bits = gf2.bits_of(mask)
        scale = c / 2 ** len(bits)
        for r in range(len(bits) + 1):
            sign = -1.0 if r % 2 else 1.0
            for sub in _subsets_of_size(bits, r):
                out[sub] += sign * scale
        if len(out) > cap:
            raise EncodingOverflow(f"more than {cap} sigma-z monomials")
    return dict(out)


def _subsets_of_size(bits: list[int], r: int):
    from itertools import combinations

    for combo in combinations(bits, r):
        yield gf2.mask_of(combo)


def cost_polynomial(net: FinancialNetwork, spec: EncodingSpec, cap: int = MONOMIAL_CAP) -> Poly:
    """Cost function as a multilinear polynomial over the n*q bit variables."""
    n, q = net.n, spec.q
    M = _propagator(net)
    base = M @ (net.D @ net.prices)
    coeffs = heaviside_coefficients(spec.r, spec.heaviside_mode)
    # failure polynomial per institution: beta_i (1 - step_r(v_i))
    fail = [
        _univariate_to_bits(
            net.drops[i] * (1 - _step_polynomial_in_v(coeffs, net.critical[i], spec.v_max)),
            i * q, q, cap,
        )
        for i in range(n)
    ]
    total: dict[int, float] = {}
    for j in range(n):
        resid: dict[int, float] = {0: -base[j]}
        for k in range(q):
            resid[1 << (j * q + k)] = resid.get(1 << (j * q + k), 0.0) + float(2**k)
        for i in range(n):
            if M[j, i] != 0.0:
                _add_into(resid, fail[i], M[j, i])
        _add_into(total, _mul(resid, resid, cap))
    return total


def truncate(h: LogicalHamiltonian, top_terms: int | None = None, chop: float | None = None) -> LogicalHamiltonian:
    terms = list(h.terms)
    if top_terms is not None:
        terms = sorted(terms, key=lambda t: (-abs(t.coeff), t.spins))[:top_terms]
    if chop is not None:
        terms = [t for t in terms if abs(t.coeff) >= chop]
    return h.with_terms(terms)


def encode(net: FinancialNetwork, spec: EncodingSpec, cap: int = MONOMIAL_CAP) -> LogicalHamiltonian:
    bits_poly = cost_polynomial(net, spec, cap)
    spins = _bits_to_spins(bits_poly, cap)
    constant = spins.pop(0, 0.0)
    h = LogicalHamiltonian.from_terms(
        net.n * spec.q, ((gf2.bits_of(m), c) for m, c in spins.items()), constant
    )
    if spec.top_terms is not None or spec.chop is not None:
        h = truncate(h, spec.top_terms, spec.chop)
    return h


def generic_term_count(n: int, q: int, degree: int) -> int:
    """Terms of a generic encoding whose step series has the given polynomial degree.

    Squares of one institution's failure polynomial reach every subset of its
    bits up to size min(2*degree, q); cross products pair subsets of size
    <= min(degree, q) from two institutions.
    """
    from math import comb

    degree = max(degree, 1)
    single = sum(comb(q, j) for j in range(1, min(2 * degree, q) + 1))
    pair = sum(comb(q, j) for j in range(1, min(degree, q) + 1))
    return n * single + comb(n, 2) * pair**2


def series_degree(r: int, mode: str) -> int:
    c = heaviside_coefficients(r, mode)
    nz = np.flatnonzero(np.abs(c) > 1e-15)
    return int(nz.max()) if len(nz) else 0


def generate_instance(n: int, m: int, seed: int = 0) -> FinancialNetwork:
    """Random network: self-holdings >= 0.5, prices in [5, 20],
    drops 15% of equity values, critical values 80% of market values."""
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 institutions and m >= 1 assets")
    rng = np.random.default_rng(seed)
    D = rng.random((n, m))
    D *= rng.uniform(0.5, 1.0, size=m) / D.sum(axis=0)
    C = rng.random((n, n))
    np.fill_diagonal(C, 0.0)
    col = C.sum(axis=0)
    cross_total = rng.uniform(0.0, 0.5, size=n)
    C = np.divide(C * cross_total, col, out=np.zeros_like(C), where=col > 0)
    self_holdings = 1.0 - C.sum(axis=0)
    prices = rng.uniform(5.0, 20.0, size=m)
    net = FinancialNetwork(D, C, self_holdings, prices, np.zeros(n), np.zeros(n))
    V = equity_values(net)
    net.drops = 0.15 * V
    net.critical = 0.8 * market_values(net)
    return net


def polynomial_cost(net: FinancialNetwork, spec: EncodingSpec, v: Sequence[float]) -> float:
    """Cost with the truncated step series, evaluated numerically."""
    v = np.asarray(v, dtype=float)
    x = (v - net.critical) / spec.v_max
    b = net.drops * (1.0 - step_series(x, spec.r, spec.heaviside_mode))
    resid = v - _propagator(net) @ (net.D @ net.prices - b)
    return float(resid @ resid)


def values_from_bits(assignment: Sequence[int] | str, n: int, q: int) -> np.ndarray:
    bits = [int(c) for c in assignment]
    if len(bits) != n * q:
        raise ValueError(f"assignment has {len(bits)} bits, expected {n * q}")
    return np.array([sum(bits[i * q + k] << k for k in range(q)) for i in range(n)], dtype=float)


def encoded_energy_consistency(
    net: FinancialNetwork,
    spec: EncodingSpec,
    assignment: Sequence[int] | str,
    encoded: LogicalHamiltonian | None = None,
) -> tuple[float, float]:
    """(Hamiltonian energy, numeric polynomial cost) for one bit assignment.

    Pass ``encoded`` to reuse an untruncated encoding across calls.
    """
    h = encoded if encoded is not None else encode(net, spec.untruncated())
    e_ham = diagonal_energy(h, assignment)
    e_poly = polynomial_cost(net, spec, values_from_bits(assignment, net.n, spec.q))
    return e_ham, e_poly
