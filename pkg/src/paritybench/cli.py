"""``parity-bench`` command line."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bench, finance, kbody, parity, router, sim, xia
from .hamiltonian import HamiltonianError, LogicalHamiltonian, parse_hamiltonian

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_INFEASIBLE = 0, 1, 2, 3

log = logging.getLogger("paritybench")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", metavar="DIR", help="write outputs into DIR instead of stdout")
    g.add_argument("--grid", metavar="WxH", type=router.SquareLattice.parse, help="lattice dimensions")
    g.add_argument("--parity-mode", choices=bench.PARITY_MODES, default="worst")
    g.add_argument("--router-repeats", type=int, default=5, metavar="R")
    g.add_argument("--full", action="store_true", help="use the complete benchmark grids")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def _emit(args, name: str, payload: dict | str) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True)
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
        print(out / name)
    else:
        sys.stdout.write(text)


def _load_problem(path: str) -> LogicalHamiltonian:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_hamiltonian(text)


def cmd_gen_kbody(args) -> int:
    spec = kbody.KBodySpec.make(args.n, kbody.parse_counts(args.counts), args.seed, args.coeff)
    _emit(args, "kbody_problem.json", kbody.generate(spec).to_json(indent=2))
    return EXIT_OK


def cmd_gen_finance(args) -> int:
    mode = "paper_verbatim" if args.mode == "verbatim" else "orthogonal"
    spec = finance.EncodingSpec(args.bits, args.legendre_order, mode, args.top_terms, args.chop_threshold)
    net = finance.generate_instance(args.institutions, args.assets, args.seed)
    h = finance.encode(net, spec)
    _emit(args, "finance_problem.json", h.to_json(indent=2))
    if args.out:
        _emit(args, "finance_instance.json", {"seed": args.seed, **net.to_dict()})
    return EXIT_OK


def cmd_map_xia(args) -> int:
    if args.input.startswith("sample:"):
        ph = xia.load_sample(args.input.split(":", 1)[1])
    else:
        ph = xia.parse_pauli_sum(Path(args.input).read_text())
    h = xia.replicate(ph, xia.ReplicationSpec(args.replicas, args.sign_mode))
    _emit(args, "xia_problem.json", h.to_json(indent=2))
    return EXIT_OK


def cmd_compile_parity(args) -> int:
    h = _load_problem(args.problem)
    report = parity.map_to_parity(h, find_basis=True, rng=np.random.default_rng(args.seed))
    out = report.to_dict()
    try:
        out["gate_count"] = asdict(parity.parity_gate_count(report, args.parity_mode))
    except parity.UnresolvedConstraintsError as exc:
        out["gate_count"] = {"error": str(exc)}
    _emit(args, "parity_report.json", out)
    return EXIT_OK


def cmd_route_gm(args) -> int:
    h = _load_problem(args.problem)
    routed = router.route(h, args.grid, args.seed)
    _emit(args, "routed_circuit.json", routed.to_dict())
    return EXIT_OK


def _config(args) -> bench.BenchConfig:
    return bench.BenchConfig(
        seed=args.seed, router_seed=args.seed, router_repeats=args.router_repeats,
        parity_mode=args.parity_mode, lattice=args.grid, full=args.full,
        workers=getattr(args, "workers", 1),
    )


def cmd_count(args) -> int:
    h = _load_problem(args.problem)
    rec = bench.run_instance(h, _config(args), "count", args.seed)
    out = asdict(rec) | {"delta_bound_ok": bench.delta_bound_check(rec)}
    _emit(args, "count.json", out)
    return EXIT_OK


def cmd_bench(args) -> int:
    res = bench.run_scenario(args.scenario, _config(args))
    if args.out:
        for p in res.write(args.out):
            print(p)
    else:
        sys.stdout.write(res.csv_text())
        print("---")
        print(json.dumps(res.summary, indent=2, sort_keys=True, default=str))
    return EXIT_OK


def cmd_verify(args) -> int:
    h = _load_problem(args.problem)
    verdicts = []
    lattice = args.grid or router.choose_lattice(max(h.num_spins, 1))
    routed = router.route(h, lattice, args.seed)
    problems = router.replay_check(routed)
    verdicts.append({"check": "router_replay", "ok": not problems, "problems": problems})
    if lattice.num_sites <= 8:
        dev = sim.verify_routed_equivalence(h, routed, args.gamma)
        verdicts.append({"check": "routed_equivalence", "ok": dev < 1e-9, "max_deviation": dev})
    else:
        verdicts.append({"check": "routed_equivalence", "ok": True, "skipped": "lattice above 8 sites"})
    if h.num_spins <= 10 and h.K <= 16:
        report = parity.map_to_parity(h, rng=np.random.default_rng(args.seed))
        chk = sim.verify_parity_spectrum(h, report)
        verdicts.append({"check": "parity_spectrum", "ok": bool(chk), **asdict(chk)})
    else:
        verdicts.append({"check": "parity_spectrum", "ok": True, "skipped": "instance above N=10 or K=16"})
    for v in verdicts:
        print(json.dumps(v, sort_keys=True, default=float))
    if args.out:
        _emit(args, "verify.json", {"verdicts": verdicts})
    return EXIT_OK if all(v["ok"] for v in verdicts) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = _Parser(prog="parity-bench", description="Parity-architecture vs gate-model CNOT benchmarks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen-kbody", parents=[common], help="random k-body problem")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--counts", required=True, help='e.g. "1:2,2:11,3:2"')
    s.add_argument("--coeff", choices=("unit", "gaussian"), default="unit")
    s.set_defaults(func=cmd_gen_kbody)

    s = sub.add_parser("gen-finance", parents=[common], help="encoded financial-crash problem")
    s.add_argument("--institutions", type=int, default=3)
    s.add_argument("--assets", type=int, default=7)
    s.add_argument("--bits", type=int, default=5)
    s.add_argument("--legendre-order", type=int, default=3)
    s.add_argument("--mode", choices=("verbatim", "orthogonal"), default="orthogonal")
    t = s.add_mutually_exclusive_group()
    t.add_argument("--top-terms", type=int)
    t.add_argument("--chop-threshold", type=float)
    s.set_defaults(func=cmd_gen_finance)

    s = sub.add_parser("map-xia", parents=[common], help="replicate a Pauli sum into sigma-z form")
    s.add_argument("input", help="Pauli-sum file, or sample:h2 / sample:lih")
    s.add_argument("--replicas", type=int, default=2)
    s.add_argument("--sign-mode", choices=("qubits", "plus"), default="qubits")
    s.set_defaults(func=cmd_map_xia)

    for name, func, help_ in (
        ("compile-parity", cmd_compile_parity, "parity mapping report"),
        ("route-gm", cmd_route_gm, "routed gate-model phase-separation layer"),
        ("count", cmd_count, "CNOT counts for both embeddings"),
    ):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("problem", help="problem JSON file or - for stdin")
        s.set_defaults(func=func)

    s = sub.add_parser("bench", parents=[common], help="run a benchmark scenario")
    s.add_argument("scenario", choices=bench.SCENARIOS)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("verify", parents=[common], help="simulator checks on a small problem")
    s.add_argument("problem", help="problem JSON file or - for stdin")
    s.add_argument("--gamma", type=float, default=0.37)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except kbody.InfeasibleSpecError as exc:
        print(f"infeasible spec: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (HamiltonianError, xia.PauliParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
