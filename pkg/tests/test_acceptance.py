"""Acceptance criteria 1-10, one test each, with a PASS/FAIL line per criterion."""

import itertools
import time
from math import comb

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import eval_legendre

from paritybench import bench, finance as fin, xia
from paritybench.hamiltonian import LogicalHamiltonian, diagonal_energy, energies
from paritybench.kbody import KBodySpec, generate
from paritybench.parity import build_parity_matrix, count_constraints, map_to_parity, parity_gate_count
from paritybench.qaoa import build_parity_cycle
from paritybench.parity import Constraint, MappingReport
from paritybench.router import SquareLattice, choose_lattice, gm_gate_count, phase_gadget, replay_check, route
from paritybench.sim import _satisfied, physical_index, verify_routed_equivalence

from conftest import random_hamiltonian


def image_rank(h):
    """GF(2) rank as log2 of the number of distinct physical images of logical states."""
    images = {physical_index(h, x) for x in range(2**h.num_spins)}
    return int(np.log2(len(images)))


def connected(h):
    adj = {i: set() for i in range(h.num_spins)}
    for t in h.terms:
        for a, b in itertools.combinations(t.spins, 2):
            adj[a].add(b)
            adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        for v in adj[stack.pop()] - seen:
            seen.add(v)
            stack.append(v)
    return len(seen) == h.num_spins


def test_1_financial_term_count(report):
    counts, times = [], []
    for seed in range(5):
        t0 = time.perf_counter()
        h = fin.encode(fin.generate_instance(3, 7, seed), fin.EncodingSpec(q=5, r=3))
        times.append(time.perf_counter() - t0)
        counts.append(h.K)
    ok = all(c == 1968 for c in counts) and max(times) < 30
    report(1, ok, f"term counts {counts} (target 1968), slowest encode {max(times):.2f}s (< 30s)")
    assert ok


def test_2_constraint_counting(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    checked = skipped = bad = 0
    while checked < 200:
        N = int(rng.integers(4, 13))
        counts = {k: int(rng.integers(0, min(comb(N, k), 6) + 1)) for k in range(1, 5)}
        counts[3] = max(counts[3], 1)  # at least one odd-order term
        h = generate(KBodySpec.make(N, counts, seed=int(rng.integers(1 << 30))))
        covered = {s for t in h.terms for s in t.spins} == set(range(N))
        if not covered or image_rank(h) != N:
            skipped += 1
            continue
        checked += 1
        rank, n_c = count_constraints(build_parity_matrix(h))
        bad += n_c != h.K - N
    two_checked = two_bad = 0
    while two_checked < 100:
        N = int(rng.integers(3, 11))
        K = int(rng.integers(N - 1, comb(N, 2) + 1))
        h = generate(KBodySpec.make(N, {2: K}, seed=int(rng.integers(1 << 30))))
        if not connected(h):
            continue
        two_checked += 1
        two_bad += count_constraints(build_parity_matrix(h))[1] != h.K - N + 1
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and two_bad == 0 and elapsed < 5
    report(2, ok, f"N_C=K-N on {checked} full-rank mixed instances ({bad} mismatches, {skipped} rank-deficient "
                  f"draws skipped); N_C=K-N+1 on {two_checked} connected 2-body ({two_bad} mismatches); {elapsed:.2f}s")
    assert ok


def test_3_gate_count_identities(report):
    rng = np.random.default_rng(3)
    worst_ok = basis_ok = True
    basis_checked = 0
    for _ in range(60):
        N = int(rng.integers(4, 11))
        h = random_hamiltonian(rng, N, int(rng.integers(N, 3 * N)), max_order=4)
        rep = map_to_parity(h, rng=np.random.default_rng(0))
        worst_ok &= parity_gate_count(rep, "worst").n_cnot == 6 * rep.n_constraints
        if rep.unresolved == 0 and all(c.weight in (3, 4) for c in rep.constraints):
            basis_checked += 1
            b = parity_gate_count(rep, "basis").n_cnot
            basis_ok &= 4 * rep.n_constraints <= b <= 6 * rep.n_constraints
    three = MappingReport(3, 3, 2, 1, constraints=[Constraint((0, 1, 2))])
    four = MappingReport(4, 4, 3, 1, constraints=[Constraint((0, 1, 2, 3))])
    c3 = build_parity_cycle(three, [0.0] * 3, 0.1, 0.2).count("CNOT")
    c4 = build_parity_cycle(four, [0.0] * 4, 0.1, 0.2).count("CNOT")
    ok = worst_ok and basis_ok and basis_checked > 0 and (c3, c4) == (4, 6)
    report(3, ok, f"worst=6*N_C on 60 records: {worst_ok}; basis in [4N_C,6N_C] on {basis_checked}: {basis_ok}; "
                  f"3-body {c3} CNOTs, 4-body {c4} CNOTs")
    assert ok


def test_4_phase_gadget_cost(report):
    lat = SquareLattice(5, 1)
    gadget_ok = all(
        sum(g.name == "CNOT" for g in phase_gadget(tuple(range(n)), list(range(n)), lat))
        == 2 * (n - 1) and sum(g.name == "RZ" for g in phase_gadget(tuple(range(n)), list(range(n)), lat)) == 1
        for n in range(1, 6)
    )
    rng = np.random.default_rng(4)
    lower_ok = True
    for _ in range(100):
        N = int(rng.integers(3, 13))
        h = random_hamiltonian(rng, N, int(rng.integers(1, 3 * N)), max_order=min(5, N))
        lower_ok &= route(h, seed=0).cnot_cost >= sum(2 * (t.order - 1) for t in h.terms)
    bound_ok, checked = True, 0
    for _ in range(100):
        N = int(rng.integers(3, 13))
        h = random_hamiltonian(rng, N, int(rng.integers(N, 4 * N)), max_order=min(5, N), min_order=2)
        checked += 1
        bound_ok &= gm_gate_count(h, repeats=2).min >= 2 * (h.K - N)
    ok = gadget_ok and lower_ok and bound_ok
    report(4, ok, f"adjacent gadgets n=1..5: {gadget_ok}; routed >= sum 2(n_t-1) on 100: {lower_ok}; "
                  f"n_G >= 2(K-N) on {checked} order>=2 instances: {bound_ok}")
    assert ok


def test_5_router_correctness(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst, replay_fail, swaps = 0.0, 0, 0
    for i in range(50):
        N = int(rng.integers(2, 9))
        h = random_hamiltonian(rng, N, int(rng.integers(1, 2 * N + 2)), max_order=min(4, N))
        r = route(h, choose_lattice(N), seed=i)
        replay_fail += bool(replay_check(r))
        swaps += r.summary["n_swap"] + r.summary["n_bridge"]
        worst = max(worst, verify_routed_equivalence(h, r, float(rng.uniform(0, 2 * np.pi))))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and replay_fail == 0 and elapsed < 120
    report(5, ok, f"max deviation {worst:.2e} (< 1e-9) over 50 instances with {swaps} SWAP/BRIDGE gates; "
                  f"replay failures {replay_fail}; {elapsed:.2f}s")
    assert ok


def test_6_parity_spectrum(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    ground_bad = decode_bad = 0
    for _ in range(100):
        N = int(rng.integers(2, 7))
        K = int(rng.integers(1, min(12, 2**N - 1) + 1))
        h = random_hamiltonian(rng, N, K, max_order=N)
        # integer couplings make "exact" comparisons meaningful
        h = LogicalHamiltonian.from_terms(N, [(t.spins, float(rng.integers(1, 4) * rng.choice([-1, 1])))
                                              for t in h.terms])
        rep = map_to_parity(h, rng=np.random.default_rng(0))
        deps = rep.all_dependencies()
        sat = _satisfied(deps, h.K).all(axis=0) if deps else np.ones(2**h.K, dtype=bool)
        idx = np.arange(2**h.K)
        phys = sum(t.coeff * (1 - 2 * ((idx >> k) & 1)) for k, t in enumerate(h.terms))
        logical = energies(h, include_constant=False)
        ground_bad += float(phys[sat].min()) != float(logical.min())
        images = [physical_index(h, x) for x in range(2**N)]
        decode_bad += not all(sat[i] for i in images)
    elapsed = time.perf_counter() - t0
    ok = ground_bad == 0 and decode_bad == 0 and elapsed < 60
    report(6, ok, f"100 instances: ground mismatches {ground_bad}, decoded constraint violations {decode_bad}; "
                  f"{elapsed:.2f}s")
    assert ok


def test_7_scaling_trends(report):
    t0 = time.perf_counter()
    cfg = bench.BenchConfig()
    slopes = bench.run_scenario("kbody_slopes", cfg, Ns=(20,), ks=(2, 3, 4, 5),
                                K_values=range(10, 71, 10), instances_per_K=5)
    table = slopes.summary["slopes"]
    r2 = table["N=20,k=2"]["gm"]["r_squared"]
    ks = [table[f"N=20,k={k}"]["gm"]["slope"] for k in (2, 3, 4, 5)]
    increasing = all(a < b for a, b in zip(ks, ks[1:]))
    grid = bench.run_scenario("kbody_grid", cfg, Ns=(9, 10), n_seeds=3)
    quart = grid.summary["kbar_quartiles"]
    r_seq = [q["r_gates_mean"] for q in quart]
    decreasing = all(a > b for a, b in zip(r_seq, r_seq[1:]))
    elapsed = time.perf_counter() - t0
    ok = r2 >= 0.9 and increasing and decreasing and elapsed < 1800
    report(7, ok, f"(a) R^2={r2:.4f} (>= 0.9); (b) slopes k=2..5 {[round(s, 2) for s in ks]} increasing={increasing}; "
                  f"(c) r_gates by kbar quartile {[round(r, 3) for r in r_seq]} decreasing={decreasing}; {elapsed:.0f}s")
    assert ok


def test_8_legendre(report):
    c = fin.heaviside_coefficients(7, "orthogonal")
    proj = [(2 * l + 1) / 2 * quad(lambda x: eval_legendre(l, x), 0, 1)[0] for l in range(8)]
    proj_err = max(abs(a - b) for a, b in zip(c, proj))
    verbatim = fin.heaviside_coefficients(1, "paper_verbatim")[1]
    even = max(abs(c[l]) for l in range(2, 8, 2))
    ok = proj_err < 1e-6 and abs(verbatim - 0.5) < 1e-15 and even < 1e-12
    report(8, ok, f"max |c_l - projection| = {proj_err:.1e} for l<=7; verbatim c_1 = {verbatim}; "
                  f"max even-l coefficient {even:.1e}")
    assert ok


def test_9_encoding_exactness(report):
    worst = 0.0
    toys = [(1, 4, 3), (2, 3, 3), (2, 6, 3), (3, 4, 3), (4, 3, 5), (3, 2, 1)]
    n_states = 0
    for n, q, r in toys:
        net = fin.generate_instance(n, 4, 100 + n * q)
        spec = fin.EncodingSpec(q, r)
        h = fin.encode(net, spec)
        table = energies(h)
        for x in range(2**(n * q)):
            bits = [(x >> i) & 1 for i in range(n * q)]
            e_p = fin.polynomial_cost(net, spec, fin.values_from_bits(bits, n, q))
            worst = max(worst, abs(table[x] - e_p) / max(1.0, abs(e_p)))
            n_states += 1
    net = fin.generate_instance(3, 7, 0)
    spec = fin.EncodingSpec(5, 3)
    h = fin.encode(net, spec)
    rng = np.random.default_rng(9)
    worst_big = 0.0
    for _ in range(100):
        e_h, e_p = fin.encoded_energy_consistency(net, spec, rng.integers(0, 2, 15).tolist(), h)
        worst_big = max(worst_big, abs(e_h - e_p) / max(1.0, abs(e_p)))
    ok = worst < 1e-6 and worst_big < 1e-6
    report(9, ok, f"exhaustive toys ({n_states} assignments, n*q<=12): max rel dev {worst:.1e}; "
                  f"(3,5,3) 100 random: {worst_big:.1e}")
    assert ok


def test_10_xia_mapping(report):
    rng = np.random.default_rng(10)
    diag_worst, count_ok = 0.0, True
    for r in (2, 3, 4):
        for _ in range(5):
            terms = []
            for _ in range(8):
                qs = sorted(rng.choice(3, int(rng.integers(1, 4)), replace=False).tolist())
                terms.append((float(rng.normal()), [(q, str(rng.choice(list("XYZ")))) for q in qs]))
            ph = xia.PauliHamiltonian.from_terms(terms, 3, constant=float(rng.normal()))
            spec = xia.ReplicationSpec(r, "sign_qubits")
            m = xia.replicate(ph, spec)
            count_ok &= m.num_spins == 3 * r + r
            for b in range(8):
                bits = [(b >> i) & 1 for i in range(3)]
                got = diagonal_energy(m, xia.agreeing_configuration(bits, spec))
                diag_worst = max(diag_worst, abs(got - comb(r, 2) * ph.diagonal(bits)))
    res = bench.run_scenario("xia", bench.BenchConfig(parity_mode="coupler"))
    ratios = {r.scenario: round(r.r_gates, 4) for r in res.records}
    below = all(r.r_gates is not None and r.r_gates < 1 for r in res.records)
    ok = diag_worst < 1e-12 and count_ok and below
    report(10, ok, f"diagonal preservation max dev {diag_worst:.1e} (r=2,3,4); qubit count n*r+r: {count_ok}; "
                   f"coupler r_gates {ratios} all < 1: {below}")
    assert ok
