"""Benchmark sweeps comparing gate-model and parity CNOT counts."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import finance, kbody, xia
from .hamiltonian import LogicalHamiltonian, mean_interaction_order
from .parity import WORST_CASE_CNOTS, map_to_parity, parity_gate_count
from .router import SquareLattice, choose_lattice, gm_gate_count

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "scenario", "N", "K", "kbar", "seed", "n_cnot_gm", "n_cnot_pm",
    "n_coupler_pm", "r_gates", "grid_w", "grid_h",
)
SCENARIOS = ("kbody_grid", "kbody_slopes", "finance", "xia")
PARITY_MODES = ("worst", "basis", "coupler")


class UnknownScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    seed: int = 0
    router_seed: int = 0
    router_repeats: int = 5
    parity_mode: str = "worst"
    lattice: SquareLattice | None = None
    full: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if self.parity_mode not in PARITY_MODES:
            raise ValueError(f"parity_mode must be one of {PARITY_MODES}")
        if self.router_repeats < 1:
            raise ValueError("router_repeats must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def metadata(self) -> dict:
        d = asdict(self)
        d["lattice"] = str(self.lattice) if self.lattice else "auto"
        d["gm_count"] = f"min over {self.router_repeats} router seeds"
        return d


@dataclass(frozen=True)
class BenchRecord:
    scenario: str
    N: int
    K: int
    kbar: float
    seed: int
    n_cnot_gm: int
    n_cnot_pm: int
    n_coupler_pm: int
    r_gates: float | None
    grid_w: int
    grid_h: int

    def row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]


def gate_ratio(n_pm: int, n_gm: int) -> float | None:
    return n_pm / n_gm if n_gm > 0 else None


def run_instance(
    h: LogicalHamiltonian,
    config: BenchConfig = BenchConfig(),
    scenario: str = "instance",
    seed: int = 0,
) -> BenchRecord:
    """Count both sides for one Hamiltonian.

    In ``coupler`` mode ``n_cnot_pm`` is 0 and the ratio uses the coupler count.
    In ``basis`` mode constraints without a weight<=4 representative are charged
    the worst-case 6 CNOTs.
    """
    lattice = config.lattice or choose_lattice(max(h.num_spins, 1))
    mode = config.parity_mode
    report = map_to_parity(h, find_basis=(mode == "basis"), rng=np.random.default_rng(seed))
    if mode == "basis" and report.unresolved:
        log.warning("%d constraints charged at worst case", report.unresolved)
        found = replace(report, unresolved=0, unresolved_terms=[])
        n_pm = parity_gate_count(found, "basis").n_cnot + WORST_CASE_CNOTS * report.unresolved
    else:
        n_pm = parity_gate_count(report, mode).n_cnot
    n_gm = gm_gate_count(h, lattice, config.router_seed, config.router_repeats).min if h.K else 0
    numerator = report.n_constraints if mode == "coupler" else n_pm
    kbar = mean_interaction_order(h) if h.K else 0.0
    return BenchRecord(
        scenario, h.num_spins, h.K, kbar, seed, n_gm, n_pm, report.n_constraints,
        gate_ratio(numerator, n_gm), lattice.width, lattice.height,
    )


def delta_bound_check(record: BenchRecord) -> bool:
    """n_G >= 2(K - N) and n_G - N_C >= N_C."""
    return (
        record.n_cnot_gm >= 2 * (record.K - record.N)
        and record.n_cnot_gm - record.n_coupler_pm >= record.n_coupler_pm
    )


# statistics

def _sdom(values: np.ndarray) -> float:
    return float(values.std(ddof=0) / math.sqrt(len(values)))


def aggregate(
    records: Iterable[BenchRecord | dict],
    key: Callable[[dict], object] = lambda r: r["scenario"],
    fields: Sequence[str] = ("K", "kbar", "n_cnot_gm", "n_cnot_pm", "n_coupler_pm", "r_gates"),
) -> dict:
    """Mean and standard deviation of the mean (population std / sqrt(n)) per group.

    ``None`` values (undefined ratios) are skipped per field.
    """
    groups: dict[object, list[dict]] = {}
    for r in records:
        d = asdict(r) if isinstance(r, BenchRecord) else dict(r)
        groups.setdefault(key(d), []).append(d)
    out = {}
    for g in sorted(groups, key=repr):
        rows = groups[g]
        stats = {"n": len(rows)}
        for f in fields:
            vals = np.array([r[f] for r in rows if r.get(f) is not None], dtype=float)
            stats[f] = (
                {"mean": float(vals.mean()), "sdom": _sdom(vals)} if len(vals)
                else {"mean": None, "sdom": None}
            )
        out[g] = stats
    return out


def mean_sdom(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if not len(arr):
        raise ValueError("need at least one value")
    return float(arr.mean()), _sdom(arr)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


def linear_fit(points: Iterable[tuple[float, float]]) -> FitResult:
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    if len(np.unique(x)) < 2:
        raise ValueError("linear fit needs at least two distinct abscissae")
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return FitResult(float(slope), float(intercept), r2, len(pts))


def median3(seq: Sequence[float]) -> list[float]:
    """3-point median filter with edge values kept."""
    s = list(seq)
    if len(s) < 3:
        return s
    return [s[0]] + [float(np.median(s[i - 1:i + 2])) for i in range(1, len(s) - 1)] + [s[-1]]


# scenario jobs (top-level so they pickle into worker processes)

def _kbody_job(args) -> list[BenchRecord]:
    scenario, spec, config = args
    return [run_instance(kbody.generate(spec), config, scenario, spec.seed)]


FINANCE_TOP_TERMS = (25, 50, 100, 200, 400)
FINANCE_TOP_TERMS_FULL = (25, 50, 100, 200, 400, 800, 1600)
FINANCE_CHOPS = (10.0, 3.0, 1.0, 0.3)
FINANCE_CHOPS_FULL = (30.0, 10.0, 3.0, 1.0, 0.3, 0.1)


def _finance_job(args) -> list[BenchRecord]:
    seed, n, m, q, r, top_terms, chops, config = args
    net = finance.generate_instance(n, m, seed)
    full = finance.encode(net, finance.EncodingSpec(q, r))
    out = []
    for t in top_terms:
        h = finance.truncate(full, top_terms=t)
        out.append(run_instance(h, config, f"finance/top_terms={t}", seed))
    for c in chops:
        h = finance.truncate(full, chop=c)
        out.append(run_instance(h, config, f"finance/chop={c:g}", seed))
    return out


def _xia_job(args) -> list[BenchRecord]:
    name, r, sign_mode, config = args
    h = xia.replicate(xia.load_sample(name), xia.ReplicationSpec(r, sign_mode))
    return [run_instance(h, config, f"xia/{name}/r={r}", r)]


def _run_jobs(fn, jobs: list, workers: int) -> list[BenchRecord]:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(fn, jobs))
    else:
        results = [fn(j) for j in jobs]
    return [rec for batch in results for rec in batch]


@dataclass
class ScenarioResult:
    name: str
    records: list[BenchRecord]
    summary: dict = field(default_factory=dict)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow(["" if v is None else v for v in r.row()])
        return buf.getvalue()

    def write(self, out_dir: str | Path) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / f"{self.name}.csv"
        json_path = out / f"{self.name}.json"
        csv_path.write_text(self.csv_text())
        json_path.write_text(json.dumps(self.summary, indent=2, sort_keys=True, default=str) + "\n")
        return csv_path, json_path


def _sorted(records: list[BenchRecord]) -> list[BenchRecord]:
    return sorted(records, key=lambda r: (r.scenario, r.N, r.K, r.seed))


def kbar_quartiles(records: Sequence[BenchRecord]) -> list[dict]:
    """Mean k-bar and mean r_gates in each k-bar quartile."""
    rows = sorted((r for r in records if r.r_gates is not None), key=lambda r: (r.kbar, r.N, r.seed))
    out = []
    for chunk in np.array_split(np.arange(len(rows)), 4):
        if not len(chunk):
            continue
        sel = [rows[i] for i in chunk]
        out.append({
            "kbar_mean": float(np.mean([r.kbar for r in sel])),
            "r_gates_mean": float(np.mean([r.r_gates for r in sel])),
            "n": len(sel),
        })
    return out


def run_kbody_grid(config: BenchConfig, Ns: Sequence[int] | None = None, n_seeds: int | None = None) -> ScenarioResult:
    Ns = Ns or (kbody.GRID_N if config.full else (9, 10))
    n_seeds = n_seeds or (10 if config.full else 3)
    specs = kbody.paper_grid(n_seeds, Ns, config.seed)
    records = _sorted(_run_jobs(_kbody_job, [("kbody_grid", s, config) for s in specs], config.workers))
    quart = kbar_quartiles(records)
    summary = {
        "scenario": "kbody_grid",
        "config": config.metadata(),
        "Ns": list(Ns),
        "seeds_per_combination": n_seeds,
        "kbar_quartiles": quart,
        "r_gates_decreasing_in_kbar": all(
            a["r_gates_mean"] > b["r_gates_mean"] for a, b in zip(quart, quart[1:])
        ),
        "by_N": {str(k): v for k, v in aggregate(records, key=lambda r: r["N"]).items()},
    }
    return ScenarioResult("kbody_grid", records, summary)


def slope_table(records: Sequence[BenchRecord]) -> dict:
    """Per (N, k): fits of mean GM count vs K and of the parity reference lines."""
    table = {}
    groups: dict[tuple[int, int], list[BenchRecord]] = {}
    for r in records:
        k = int(r.scenario.rsplit("k=", 1)[1])
        groups.setdefault((r.N, k), []).append(r)
    for (N, k), recs in sorted(groups.items()):
        byK: dict[int, list[BenchRecord]] = {}
        for r in recs:
            byK.setdefault(r.K, []).append(r)
        Ks = sorted(byK)
        gm = linear_fit((K, np.mean([r.n_cnot_gm for r in byK[K]])) for K in Ks)
        nc = [np.mean([r.n_coupler_pm for r in byK[K]]) for K in Ks]
        best = linear_fit(zip(Ks, (4 * c for c in nc)))
        worst = linear_fit(zip(Ks, (6 * c for c in nc)))
        table[f"N={N},k={k}"] = {
            "N": N, "k": k,
            "gm": asdict(gm),
            "parity_best_slope": best.slope,
            "parity_worst_slope": worst.slope,
        }
    return table


def run_kbody_slopes(
    config: BenchConfig,
    Ns: Sequence[int] | None = None,
    ks: Sequence[int] = (2, 3, 4, 5),
    K_values: Sequence[int] | None = None,
    instances_per_K: int = 5,
) -> ScenarioResult:
    Ns = Ns or ((5, 10, 15, 20) if config.full else (20,))
    specs = []
    for N in Ns:
        if K_values is not None:
            Ks = list(K_values)
        elif config.full:
            Ks = list(kbody.default_k_range(N))
        else:
            Ks = list(range(5, 11)) if N == 5 else list(range(10, 71, 10))
        for k in ks:
            feasible = [K for K in Ks if K <= math.comb(N, k)]
            if len(feasible) < len(Ks):
                log.info("N=%d k=%d: K capped at %d", N, k, max(feasible, default=0))
            if len(feasible) >= 2:
                specs += [(f"kbody_slopes/k={k}", s, config)
                          for s in kbody.slope_family(N, k, feasible, instances_per_K, config.seed)]
    records = _sorted(_run_jobs(_kbody_job, specs, config.workers))
    table = slope_table(records)
    summary = {"scenario": "kbody_slopes", "config": config.metadata(), "slopes": table}
    return ScenarioResult("kbody_slopes", records, summary)


def run_finance(
    config: BenchConfig,
    n_seeds: int | None = None,
    n: int = 3,
    m: int = 7,
    q: int = 5,
    r: int = 3,
    top_terms: Sequence[int] | None = None,
    chops: Sequence[float] | None = None,
) -> ScenarioResult:
    n_seeds = n_seeds or (10 if config.full else 3)
    top_terms = tuple(top_terms or (FINANCE_TOP_TERMS_FULL if config.full else FINANCE_TOP_TERMS))
    chops = tuple(chops or (FINANCE_CHOPS_FULL if config.full else FINANCE_CHOPS))
    jobs = [(config.seed + s, n, m, q, r, top_terms, chops, config) for s in range(n_seeds)]
    records = _sorted(_run_jobs(_finance_job, jobs, config.workers))
    by = aggregate(records)
    top_seq = [by[f"finance/top_terms={t}"]["r_gates"]["mean"] for t in top_terms]
    summary = {
        "scenario": "finance",
        "config": config.metadata(),
        "logical_qubits": n * q,
        "top_terms": list(top_terms),
        "r_gates_vs_top_terms": top_seq,
        "r_gates_vs_top_terms_median3": median3(top_seq),
        "chops": list(chops),
        "r_gates_vs_chop": [by[f"finance/chop={c:g}"]["r_gates"]["mean"] for c in chops],
        "groups": {str(k): v for k, v in by.items()},
    }
    return ScenarioResult("finance", records, summary)


def run_xia(
    config: BenchConfig,
    samples: Sequence[str] = ("h2", "lih"),
    r_values: dict[str, Sequence[int]] | None = None,
    sign_mode: str = "sign_qubits",
) -> ScenarioResult:
    if r_values is None:
        r_values = {"h2": range(2, 6 if config.full else 5), "lih": range(2, 5 if config.full else 4)}
    jobs = [(name, r, sign_mode, config) for name in samples for r in r_values[name]]
    records = _sorted(_run_jobs(_xia_job, jobs, config.workers))
    coupler = config.parity_mode == "coupler"
    summary = {
        "scenario": "xia",
        "config": config.metadata(),
        "records": [asdict(r) for r in records],
        "coupler_ratio_below_one": (
            all(r.r_gates is not None and r.r_gates < 1 for r in records) if coupler else None
        ),
    }
    return ScenarioResult("xia", records, summary)


_RUNNERS = {
    "kbody_grid": run_kbody_grid,
    "kbody_slopes": run_kbody_slopes,
    "finance": run_finance,
    "xia": run_xia,
}


def run_scenario(name: str, config: BenchConfig = BenchConfig(), out_dir: str | Path | None = None, **kwargs) -> ScenarioResult:
    try:
        runner = _RUNNERS[name]
    except KeyError:
        raise UnknownScenarioError(f"unknown scenario {name!r}; expected one of {SCENARIOS}") from None
    result = runner(config, **kwargs)
    if out_dir is not None:
        result.write(out_dir)
    return result
