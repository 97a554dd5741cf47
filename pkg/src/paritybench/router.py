"""Gate-model embedding on a nearest-neighbour square lattice.

Every Hamiltonian term becomes a phase gadget: a CNOT ladder along a chain of
the term's qubits, an RZ on the chain end, and the mirrored ladder. CNOTs
between non-adjacent sites are fixed up with SWAPs (3 CNOTs each, placement
updated) or, at distance two, with a BRIDGE (4 CNOTs, placement unchanged).
SWAPs are never undone; the final logical-to-site placement is returned with
the circuit.

Gates in a :class:`RoutedCircuit` act on lattice sites. RZ gates are left
unbound and carry the index of their term; see
:func:`paritybench.qaoa.build_gm_problem_unitary`.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from .circuit import CNOT_COST, Gate, gate_summary
from .hamiltonian import LogicalHamiltonian

LOOKAHEAD_WINDOW = 10
LOOKAHEAD_WEIGHT = 0.5


@dataclass(frozen=True)
class SquareLattice:
    width: int
    height: int

    @property
    def num_sites(self) -> int:
        return self.width * self.height

    @classmethod
    def parse(cls, text: str) -> "SquareLattice":
        try:
            w, h = (int(x) for x in text.lower().split("x"))
        except ValueError:
            raise ValueError(f"grid must look like WxH, got {text!r}") from None
        if w < 1 or h < 1:
            raise ValueError("grid dimensions must be positive")
        return cls(w, h)

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"

    def coords(self, site: int) -> tuple[int, int]:
        return site % self.width, site // self.width

    def site(self, x: int, y: int) -> int:
        return y * self.width + x

    def distance(self, a: int, b: int) -> int:
        return self.dist[a][b]

    @cached_property
    def dist(self) -> list[list[int]]:
        xy = [self.coords(s) for s in range(self.num_sites)]
        return [[abs(ax - bx) + abs(ay - by) for bx, by in xy] for ax, ay in xy]

    @cached_property
    def adjacency(self) -> list[list[int]]:
        out = []
        for s in range(self.num_sites):
            x, y = self.coords(s)
            nb = []
            for dx, dy in ((0, -1), (-1, 0), (1, 0), (0, 1)):
                nx, ny = x + dx, y + dy
                if 0 <= nx < self.width and 0 <= ny < self.height:
                    nb.append(self.site(nx, ny))
            out.append(sorted(nb))
        return out

    @property
    def center(self) -> int:
        return self.site((self.width - 1) // 2, (self.height - 1) // 2)


def choose_lattice(n: int) -> SquareLattice:
    if n < 1:
        raise ValueError("need at least one qubit")
    w = math.isqrt(n)
    if w * w < n:
        w += 1
    return SquareLattice(w, -(-n // w))


def interaction_graph(h: LogicalHamiltonian) -> dict[tuple[int, int], float]:
    """Edge weight = number of terms shared by the two spins."""
    w: dict[tuple[int, int], float] = defaultdict(float)
    for t in h.terms:
        for a, b in combinations(t.spins, 2):
            w[a, b] += 1.0
    return dict(sorted(w.items()))


def initial_placement(
    h: LogicalHamiltonian, lattice: SquareLattice, seed: int | None = None
) -> list[int]:
    """Greedy placement, strongest-connected qubit first.

    With a seed, edge weights and degrees get a uniform jitter in [0, 0.5),
    which reorders ties without overriding integer weight differences.
    """
    n = h.num_spins
    if lattice.num_sites < n:
        raise ValueError(f"lattice {lattice} has {lattice.num_sites} sites, need {n}")
    if n == 0:
        return []
    rng = np.random.default_rng(seed) if seed is not None else None
    weights = interaction_graph(h)
    if rng is not None:
        weights = {e: w + rng.uniform(0.0, 0.5) for e, w in weights.items()}
    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for (a, b), w in weights.items():
        adj[a][b] = w
        adj[b][a] = w
    degree = [sum(adj[q].values()) for q in range(n)]
    if rng is not None:
        degree = [d + rng.uniform(0.0, 0.5) for d in degree]

    dist = lattice.dist
    pos = [-1] * n
    free = set(range(lattice.num_sites))
    first = max(range(n), key=lambda q: (degree[q], -q))
    pos[first] = lattice.center
    free.discard(lattice.center)
    placed = [first]
    conn = [0.0] * n
    for p, w in adj[first].items():
        conn[p] += w
    unplaced = set(range(n)) - {first}
    while unplaced:
        q = max(unplaced, key=lambda u: (conn[u], degree[u], -u))
        nbrs = [(pos[p], w) for p, w in adj[q].items() if pos[p] >= 0]

        def cost(s: int) -> tuple[float, int, int]:
            wd = sum(w * dist[s][ps] for ps, w in nbrs)
            spread = sum(dist[s][pos[p]] for p in placed)
            return wd, spread, s

        site = min(free, key=cost)
        pos[q] = site
        free.discard(site)
        placed.append(q)
        unplaced.discard(q)
        for p, w in adj[q].items():
            conn[p] += w
    return pos


def chain_order(qubits: Sequence[int], pos: Sequence[int], dist) -> list[int]:
    """Nearest-neighbour chain: closest pair first, then grow at either end."""
    qs = sorted(qubits)
    if len(qs) <= 2:
        return qs
    best = None
    for i, a in enumerate(qs):
        for b in qs[i + 1:]:
            d = dist[pos[a]][pos[b]]
            if best is None or d < best[0]:
                best = (d, a, b)
    _, a, b = best
    head, tail = a, b
    left: list[int] = []
    right = [a, b]
    rest = [q for q in qs if q != a and q != b]
    while rest:
        pick = None
        for q in rest:
            dt = dist[pos[q]][pos[tail]]
            dh = dist[pos[q]][pos[head]]
            key = (min(dt, dh), q, 0 if dt <= dh else 1)
            if pick is None or key < pick:
                pick = key
        _, q, end = pick
        rest.remove(q)
        if end == 0:
            right.append(q)
            tail = q
        else:
            left.append(q)
            head = q
    return left[::-1] + right


def _chain_excess(qubits: Sequence[int], pos: Sequence[int], dist) -> int:
    """Estimated routing overhead in CNOTs: one SWAP per missing step along the chain."""
    if len(qubits) < 2:
        return 0
    chain = chain_order(qubits, pos, dist)
    return 3 * sum(dist[pos[u]][pos[v]] - 1 for u, v in zip(chain, chain[1:]))


@dataclass
class RoutedCircuit:
    lattice: SquareLattice
    gates: list[Gate]
    initial_placement: list[int]
    final_placement: list[int]
    num_terms: int
    seed: int | None = None
    summary: dict = field(init=False)

    def __post_init__(self) -> None:
        self.summary = gate_summary(self.gates)

    @property
    def cnot_cost(self) -> int:
        return self.summary["cnot_equivalent"]

    @property
    def final_permutation(self) -> list[int]:
        return self.final_placement

    def to_dict(self) -> dict:
        return {
            "grid": [self.lattice.width, self.lattice.height],
            "seed": self.seed,
            "initial_placement": self.initial_placement,
            "final_placement": self.final_placement,
            "gates": [g.to_dict() for g in self.gates],
            "summary": self.summary,
        }


class _Router:
    def __init__(self, h: LogicalHamiltonian, lattice: SquareLattice, pos: list[int], window: int):
        self.h = h
        self.lattice = lattice
        self.dist = lattice.dist
        self.adj = lattice.adjacency
        self.pos = list(pos)
        self.occ = [-1] * lattice.num_sites
        for q, s in enumerate(self.pos):
            self.occ[s] = q
        self.window = window
        self.gates: list[Gate] = []
        self.spins = [t.spins for t in h.terms]

    # -- state updates -------------------------------------------------
    def _swap_sites(self, s1: int, s2: int) -> None:
        q1, q2 = self.occ[s1], self.occ[s2]
        self.occ[s1], self.occ[s2] = q2, q1
        if q1 >= 0:
            self.pos[q1] = s2
        if q2 >= 0:
            self.pos[q2] = s1

    def _emit_swap(self, s1: int, s2: int) -> None:
        self.gates.append(Gate("SWAP", (s1, s2)))
        self._swap_sites(s1, s2)

    # -- lookahead scoring ---------------------------------------------
    def _partial_cost(self, moved: set[int], pairs, lookahead) -> float:
        d, pos = self.dist, self.pos
        c = 0.0
        for u, v in pairs:
            if u in moved or v in moved:
                c += 3 * (d[pos[u]][pos[v]] - 1)
        for ti in lookahead:
            sp = self.spins[ti]
            if any(q in moved for q in sp):
                c += LOOKAHEAD_WEIGHT * _chain_excess(sp, pos, d)
        return c

    def _swap_delta(self, s1: int, s2: int, pairs, lookahead) -> float:
        moved = {q for q in (self.occ[s1], self.occ[s2]) if q >= 0}
        before = self._partial_cost(moved, pairs, lookahead)
        self._swap_sites(s1, s2)
        after = self._partial_cost(moved, pairs, lookahead)
        self._swap_sites(s1, s2)
        return after - before

    def _best_swap(self, a: int, b: int, pairs, lookahead) -> tuple[float, tuple[int, int]]:
        d = self.dist
        pa, pb = self.pos[a], self.pos[b]
        target = d[pa][pb] - 1
        best = None
        for here, there in ((pa, pb), (pb, pa)):
            for nb in self.adj[here]:
                if d[nb][there] != target:
                    continue
                key = (min(here, nb), max(here, nb))
                score = self._swap_delta(here, nb, pairs, lookahead)
                if best is None or (score, key) < best:
                    best = (score, key)
        return best

    # -- gadget emission -----------------------------------------------
    def _cnot(self, a: int, b: int, pairs, lookahead) -> None:
        d = self.dist
        while True:
            pa, pb = self.pos[a], self.pos[b]
            gap = d[pa][pb]
            if gap == 1:
                self.gates.append(Gate("CNOT", (pa, pb)))
                return
            delta, (s1, s2) = self._best_swap(a, b, pairs, lookahead)
            if gap == 2:
                swap_total = CNOT_COST["SWAP"] + CNOT_COST["CNOT"] + delta
                if CNOT_COST["BRIDGE"] < swap_total:
                    mid = min(s for s in self.adj[pa] if d[s][pb] == 1)
                    self.gates.append(Gate("BRIDGE", (pa, mid, pb)))
                    return
            self._emit_swap(s1, s2)

    def gadget(self, ti: int, lookahead: list[int]) -> None:
        spins = self.spins[ti]
        chain = chain_order(spins, self.pos, self.dist)
        ladder = list(zip(chain, chain[1:]))
        ops = ladder + [None] + ladder[::-1]
        for i, op in enumerate(ops):
            if op is None:
                self.gates.append(Gate("RZ", (self.pos[chain[-1]],), None, ti))
                continue
            # includes the mirror of the current CNOT
            upcoming = {p for p in ops[i + 1:] if p is not None}
            self._cnot(op[0], op[1], upcoming, lookahead)

    def run(self) -> None:
        remaining = list(range(len(self.spins)))
        while remaining:
            win = remaining[: self.window]
            ti = min(win, key=lambda t: (_chain_excess(self.spins[t], self.pos, self.dist), t))
            remaining.remove(ti)
            self.gadget(ti, remaining[: self.window])


def route(
    h: LogicalHamiltonian,
    lattice: SquareLattice | None = None,
    seed: int | None = None,
    placement: Sequence[int] | None = None,
    window: int = LOOKAHEAD_WINDOW,
) -> RoutedCircuit:
    """Route one phase-separation layer of ``h`` onto ``lattice``."""
    lattice = lattice or choose_lattice(max(h.num_spins, 1))
    if placement is None:
        placement = initial_placement(h, lattice, seed)
    placement = list(placement)
    if len(placement) != h.num_spins or len(set(placement)) != len(placement):
        raise ValueError("placement must be injective over all logical qubits")
    if any(s < 0 or s >= lattice.num_sites for s in placement):
        raise ValueError("placement site out of range")
    r = _Router(h, lattice, placement, window)
    r.run()
    return RoutedCircuit(lattice, r.gates, placement, list(r.pos), h.K, seed)


def phase_gadget(spins: Sequence[int], placement: Sequence[int], lattice: SquareLattice, term: int | None = None) -> list[Gate]:
    """Gadget for one term at a fixed placement, requiring an adjacent chain.

    Raises ValueError when consecutive chain qubits are not neighbours; use
    :func:`route` for the general case.
    """
    dist = lattice.dist
    chain = chain_order(spins, placement, dist)
    ladder = list(zip(chain, chain[1:]))
    for u, v in ladder:
        if dist[placement[u]][placement[v]] != 1:
            raise ValueError(f"qubits {u},{v} are not adjacent; route the term instead")
    out = [Gate("CNOT", (placement[u], placement[v])) for u, v in ladder]
    out.append(Gate("RZ", (placement[chain[-1]],), None, term))
    out += [Gate("CNOT", (placement[u], placement[v])) for u, v in reversed(ladder)]
    return out


@dataclass(frozen=True)
class GMCount:
    min: int
    mean: float
    std: float
    costs: tuple[int, ...]
    best_seed: int


def gm_gate_count(
    h: LogicalHamiltonian,
    lattice: SquareLattice | None = None,
    seed: int = 0,
    repeats: int = 5,
) -> GMCount:
    """Route with ``repeats`` consecutive seeds; ``min`` is the reported count."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    lattice = lattice or choose_lattice(max(h.num_spins, 1))
    seeds = [seed + i for i in range(repeats)]
    costs = [route(h, lattice, s).cnot_cost for s in seeds]
    arr = np.asarray(costs, dtype=float)
    best = int(np.argmin(arr))
    return GMCount(int(arr.min()), float(arr.mean()), float(arr.std()), tuple(costs), seeds[best])


def replay_check(routed: RoutedCircuit) -> list[str]:
    """Replay placement updates; return a list of adjacency/accounting violations."""
    lat = routed.lattice
    d = lat.dist
    occ = [-1] * lat.num_sites
    for q, s in enumerate(routed.initial_placement):
        occ[s] = q
    problems = []
    cost = 0
    for i, g in enumerate(routed.gates):
        if g.name in ("CNOT", "SWAP"):
            a, b = g.qubits
            if d[a][b] != 1:
                problems.append(f"gate {i}: {g.name} on non-adjacent sites {a},{b}")
            cost += CNOT_COST[g.name]
            if g.name == "SWAP":
                occ[a], occ[b] = occ[b], occ[a]
        elif g.name == "BRIDGE":
            a, m, b = g.qubits
            if d[a][b] != 2 or d[a][m] != 1 or d[m][b] != 1:
                problems.append(f"gate {i}: BRIDGE geometry {g.qubits}")
            cost += CNOT_COST["BRIDGE"]
    final = [-1] * len(routed.initial_placement)
    for s, q in enumerate(occ):
        if q >= 0:
            final[q] = s
    if final != list(routed.final_placement):
        problems.append("final placement does not match replay")
    if cost != routed.cnot_cost:
        problems.append(f"cost {routed.cnot_cost} != replayed {cost}")
    return problems
