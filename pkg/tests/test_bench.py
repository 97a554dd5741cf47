import math

import numpy as np
import pytest

from paritybench import bench
from paritybench.bench import (
    BenchConfig,
    BenchRecord,
    CSV_COLUMNS,
    aggregate,
    delta_bound_check,
    gate_ratio,
    linear_fit,
    median3,
    run_instance,
    run_scenario,
)
from paritybench.hamiltonian import LogicalHamiltonian
from paritybench.kbody import KBodySpec, generate
from paritybench.router import SquareLattice


def rec(**kw):
    base = dict(scenario="s", N=4, K=6, kbar=2.0, seed=0, n_cnot_gm=20, n_cnot_pm=18,
                n_coupler_pm=3, r_gates=0.9, grid_w=2, grid_h=2)
    base.update(kw)
    return BenchRecord(**base)


class TestRunInstance:
    def test_triangle(self, triangle):
        r = run_instance(triangle, BenchConfig(lattice=SquareLattice(2, 2)))
        assert (r.n_coupler_pm, r.n_cnot_pm, r.n_cnot_gm) == (1, 6, 9)
        assert r.r_gates == pytest.approx(6 / 9)

    def test_one_body(self):
        r = run_instance(LogicalHamiltonian.from_terms(3, [((0,), 1.0), ((2,), 1.0)]))
        assert (r.n_coupler_pm, r.n_cnot_pm, r.n_cnot_gm, r.r_gates) == (0, 0, 0, None)

    def test_ratio(self):
        assert gate_ratio(300, 600) == 0.5
        assert gate_ratio(1, 0) is None

    def test_modes(self, rng):
        h = generate(KBodySpec.make(8, {2: 8, 3: 6}, seed=2))
        worst = run_instance(h, BenchConfig(parity_mode="worst"))
        basis = run_instance(h, BenchConfig(parity_mode="basis"))
        coupler = run_instance(h, BenchConfig(parity_mode="coupler"))
        n_c = worst.n_coupler_pm
        assert worst.n_cnot_pm == 6 * n_c
        assert 4 * n_c <= basis.n_cnot_pm <= 6 * n_c
        assert coupler.n_cnot_pm == 0 and coupler.r_gates == pytest.approx(n_c / coupler.n_cnot_gm)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            BenchConfig(parity_mode="best")
        with pytest.raises(ValueError):
            BenchConfig(router_repeats=0)


class TestStats:
    def test_aggregate_examples(self):
        a = aggregate([rec(n_cnot_gm=10)])
        assert a["s"]["n_cnot_gm"] == {"mean": 10.0, "sdom": 0.0}
        b = aggregate([rec(n_cnot_gm=10), rec(n_cnot_gm=14)])
        assert b["s"]["n_cnot_gm"]["mean"] == 12.0
        assert b["s"]["n_cnot_gm"]["sdom"] == pytest.approx(math.sqrt(2))

    def test_aggregate_permutation_invariant(self, rng):
        rows = [rec(n_cnot_gm=int(x), scenario=str(x % 3)) for x in rng.integers(0, 100, 12)]
        assert aggregate(rows) == aggregate(rows[::-1])

    def test_aggregate_skips_none(self):
        a = aggregate([rec(r_gates=None), rec(r_gates=0.5)])
        assert a["s"]["r_gates"]["mean"] == 0.5

    def test_fit_examples(self):
        f = linear_fit([(10, 20), (20, 40)])
        assert (f.slope, f.intercept, f.r_squared) == (pytest.approx(2), pytest.approx(0, abs=1e-12), 1.0)
        assert linear_fit([(1, 5), (2, 5), (3, 5)]).slope == pytest.approx(0, abs=1e-12)
        with pytest.raises(ValueError):
            linear_fit([(1, 2), (1, 3)])

    def test_fit_noisy(self):
        rng = np.random.default_rng(5)
        K = np.linspace(10, 70, 50)
        f = linear_fit(zip(K, 3 * K + rng.normal(0, 1, 50)))
        assert abs(f.slope - 3) < 0.1 and 0 <= f.r_squared <= 1 and f.n_points == 50

    def test_median3(self):
        assert median3([3, 1, 2, 0]) == [3, 2, 1, 0]
        assert median3([1, 2]) == [1, 2]


class TestDeltaBound:
    def test_routed_two_body_complete(self):
        for N in (4, 5, 6):
            h = generate(KBodySpec.make(N, {2: N * (N - 1) // 2}))
            assert delta_bound_check(run_instance(h, BenchConfig(router_repeats=2)))

    def test_no_constraints(self):
        assert delta_bound_check(rec(N=5, K=5, n_cnot_gm=0, n_coupler_pm=0))

    def test_violation(self):
        assert not delta_bound_check(rec(N=4, K=10, n_cnot_gm=5, n_coupler_pm=6))


class TestScenarios:
    def test_unknown(self):
        with pytest.raises(bench.UnknownScenarioError):
            run_scenario("annealing")

    def test_kbody_grid_reproducible(self, tmp_path):
        cfg = BenchConfig(router_repeats=1)
        a = run_scenario("kbody_grid", cfg, tmp_path / "a", Ns=(9,), n_seeds=1)
        b = run_scenario("kbody_grid", cfg, tmp_path / "b", Ns=(9,), n_seeds=1)
        assert (tmp_path / "a" / "kbody_grid.csv").read_bytes() == (tmp_path / "b" / "kbody_grid.csv").read_bytes()
        assert (tmp_path / "a" / "kbody_grid.json").read_bytes() == (tmp_path / "b" / "kbody_grid.json").read_bytes()
        assert len(a.records) == 675
        assert all(r.n_cnot_pm == 6 * r.n_coupler_pm for r in a.records)
        header = (tmp_path / "a" / "kbody_grid.csv").read_text().splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)

    def test_workers_do_not_change_output(self):
        cfg1 = BenchConfig(router_repeats=1)
        cfg2 = BenchConfig(router_repeats=1, workers=2)
        kw = dict(Ns=(10,), K_values=(10, 20, 30), instances_per_K=2, ks=(2, 3))
        a = run_scenario("kbody_slopes", cfg1, **kw)
        b = run_scenario("kbody_slopes", cfg2, **kw)
        assert a.csv_text() == b.csv_text()

    def test_slope_reference_lines(self):
        res = run_scenario("kbody_slopes", BenchConfig(router_repeats=1), Ns=(20,), ks=(3,),
                           K_values=(30, 40, 50), instances_per_K=2)
        row = res.summary["slopes"]["N=20,k=3"]
        assert row["parity_best_slope"] == pytest.approx(4.0)
        assert row["parity_worst_slope"] == pytest.approx(6.0)

    def test_finance_qubit_counts(self):
        for n, qubits in ((3, 15), (4, 20)):
            res = run_scenario("finance", BenchConfig(router_repeats=1), n_seeds=1, n=n, top_terms=(25,), chops=(10.0,))
            assert res.summary["logical_qubits"] == qubits
            assert all(r.N == qubits for r in res.records)

    def test_xia_coupler_counts(self):
        res = run_scenario("xia", BenchConfig(router_repeats=1, parity_mode="coupler"),
                           samples=("h2",), r_values={"h2": (2,)})
        (r,) = res.records
        from paritybench.parity import map_to_parity
        from paritybench.xia import ReplicationSpec, load_sample, replicate
        assert r.n_coupler_pm == map_to_parity(replicate(load_sample("h2"), ReplicationSpec(2)), find_basis=False).n_constraints
        assert res.summary["coupler_ratio_below_one"] is True
