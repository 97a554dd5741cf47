import itertools
from math import comb

import numpy as np
import pytest

from paritybench.hamiltonian import LogicalHamiltonian


def random_hamiltonian(rng, N, K, max_order=4, min_order=1, coeffs="gaussian"):
    """K distinct random terms with orders in [min_order, max_order]; K is capped at the number available."""
    hi = min(max_order, N)
    K = min(K, sum(comb(N, k) for k in range(min_order, hi + 1)))
    seen = set()
    terms = []
    while len(terms) < K:
        k = int(rng.integers(min_order, hi + 1))
        spins = tuple(sorted(rng.choice(N, size=k, replace=False).tolist()))
        if spins in seen:
            continue
        seen.add(spins)
        c = float(rng.normal()) if coeffs == "gaussian" else 1.0
        terms.append((spins, c))
    return LogicalHamiltonian.from_terms(N, terms)


def brute_energies(h):
    """Per-configuration loop, independent of the vectorized table."""
    out = []
    for bits in itertools.product((0, 1), repeat=h.num_spins):
        bits = bits[::-1]  # little-endian index
        e = h.constant
        for t in h.terms:
            p = 1
            for s in t.spins:
                p *= -1 if bits[s] else 1
            e += t.coeff * p
        out.append(e)
    return np.array(out)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def triangle():
    return LogicalHamiltonian.from_terms(3, [((0, 1), 1.0), ((1, 2), 1.0), ((0, 2), 1.0)])


_ACCEPTANCE: list[str] = []


@pytest.fixture
def report(capsys):
    """Print one PASS/FAIL line per acceptance criterion and keep it for the summary."""

    def _report(number, ok, detail):
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}: {detail}"
        _ACCEPTANCE.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
