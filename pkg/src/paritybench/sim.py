"""Dense statevector simulation and verification oracles.

Basis index bit ``q`` is the state of qubit ``q`` (little-endian). State
arrays may carry a trailing batch axis, ``(2**n, B)``, which lets a whole
unitary be pushed through a circuit column by column in one pass.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit
from .hamiltonian import LogicalHamiltonian, energies
from .parity import MappingReport
from .qaoa import QaoaParams, build_gm_problem_unitary
from .router import RoutedCircuit

MAX_QUBITS = 22
NORM_TOL = 1e-9

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


class SimulationError(ValueError):
    pass


def zero_state(n: int) -> np.ndarray:
    if n > MAX_QUBITS:
        raise SimulationError(f"{n} qubits exceeds the simulator cap of {MAX_QUBITS}")
    s = np.zeros(2**n, dtype=complex)
    s[0] = 1.0
    return s


def basis_state(n: int, index: int) -> np.ndarray:
    s = zero_state(n)
    s[0] = 0.0
    s[index] = 1.0
    return s


def _rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _apply_1q(state: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    view = state.reshape(2 ** (n - 1 - q), 2, -1)
    return np.einsum("ij,ajb->aib", u, view).reshape(state.shape)


def _tensor(state: np.ndarray, n: int) -> np.ndarray:
    return state.reshape((2,) * n + (-1,))


def _apply_cnot(state: np.ndarray, c: int, t: int, n: int) -> np.ndarray:
    out = _tensor(state, n).copy()
    ac, at = n - 1 - c, n - 1 - t
    sel = [slice(None)] * (n + 1)
    sel[ac] = 1
    sel = tuple(sel)
    sub = out[sel]
    out[sel] = np.flip(sub, axis=at if at < ac else at - 1).copy()
    return out.reshape(state.shape)


def _apply_swap(state: np.ndarray, a: int, b: int, n: int) -> np.ndarray:
    t = np.swapaxes(_tensor(state, n), n - 1 - a, n - 1 - b)
    return np.ascontiguousarray(t).reshape(state.shape)


def _parity_signs(idx: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    par = np.zeros_like(idx)
    for q in qubits:
        par ^= (idx >> q) & 1
    return 1 - 2 * par


def _apply_diag(state: np.ndarray, phases: np.ndarray) -> np.ndarray:
    if state.ndim == 1:
        return state * phases
    return state * phases[:, None]


def apply_circuit(c: Circuit, state: np.ndarray, check_norm: bool = False) -> np.ndarray:
    """Apply ``c`` to ``state``; SWAP and BRIDGE are expanded into CNOTs."""
    n = c.num_qubits
    if n > MAX_QUBITS:
        raise SimulationError(f"{n} qubits exceeds the simulator cap of {MAX_QUBITS}")
    if state.shape[0] != 2**n:
        raise SimulationError(f"state has {state.shape[0]} amplitudes, circuit needs {2**n}")
    idx = np.arange(2**n, dtype=np.int64)
    s = np.asarray(state, dtype=complex)
    for g in c.gates:
        name, qs = g.name, g.qubits
        if name == "H":
            s = _apply_1q(s, _H, qs[0], n)
        elif name == "RX":
            s = _apply_1q(s, _rx(g.angle), qs[0], n)
        elif name in ("RZ", "ZZZZ"):
            if g.angle is None:
                raise SimulationError("unbound rotation angle; bind the circuit first")
            s = _apply_diag(s, np.exp(-0.5j * g.angle * _parity_signs(idx, qs)))
        elif name == "CNOT":
            s = _apply_cnot(s, qs[0], qs[1], n)
        elif name == "SWAP":
            a, b = qs
            s = _apply_cnot(s, a, b, n)
            s = _apply_cnot(s, b, a, n)
            s = _apply_cnot(s, a, b, n)
        elif name == "BRIDGE":
            a, m, b = qs
            for u, v in ((a, m), (m, b), (a, m), (m, b)):
                s = _apply_cnot(s, u, v, n)
        else:
            raise SimulationError(f"unsupported gate {name}")
        if check_norm:
            norms = np.linalg.norm(s, axis=0)
            if np.any(np.abs(norms - 1.0) > NORM_TOL):
                raise SimulationError(f"norm drift after {name}")
    return s


def circuit_unitary(c: Circuit) -> np.ndarray:
    return apply_circuit(c, np.eye(2**c.num_qubits, dtype=complex))


def diagonal_values(
    h: LogicalHamiltonian,
    num_qubits: int | None = None,
    layout: Sequence[int] | None = None,
    include_constant: bool = True,
) -> np.ndarray:
    """Energy of every basis state of a register holding logical spin i on qubit layout[i]."""
    if layout is None and (num_qubits is None or num_qubits == h.num_spins):
        return energies(h, include_constant)
    n = num_qubits if num_qubits is not None else h.num_spins
    layout = list(layout) if layout is not None else list(range(h.num_spins))
    idx = np.arange(2**n, dtype=np.int64)
    out = np.full(2**n, h.constant if include_constant else 0.0)
    for t in h.terms:
        out += t.coeff * _parity_signs(idx, [layout[s] for s in t.spins])
    return out


def expectation_diagonal(h: LogicalHamiltonian | np.ndarray, state: np.ndarray) -> float:
    """``sum_z |amp_z|^2 E(z)`` for a sigma-z Hamiltonian or a precomputed diagonal."""
    diag = h if isinstance(h, np.ndarray) else diagonal_values(h, int(np.log2(state.shape[0])))
    return float(np.dot(np.abs(state) ** 2, diag))


def embed_index(bits_index: int, layout: Sequence[int]) -> int:
    out = 0
    for i, site in enumerate(layout):
        if (bits_index >> i) & 1:
            out |= 1 << site
    return out


def verify_routed_equivalence(h: LogicalHamiltonian, routed: RoutedCircuit, gamma: float) -> float:
    """Max deviation between the bound routed circuit and prod exp(-i gamma c Z..Z).

    Column x starts from logical basis state x on the initial placement and is
    compared against phase(x) times x on the final placement; amplitude on
    any other site configuration counts as deviation.
    """
    n = h.num_spins
    if n > 8:
        raise SimulationError("routed equivalence check limited to 8 logical qubits")
    circuit = build_gm_problem_unitary(h, gamma, routed)
    sites = circuit.num_qubits
    cols = 2**n
    start = np.zeros((2**sites, cols), dtype=complex)
    expect = np.zeros((2**sites, cols), dtype=complex)
    phase = np.exp(-1j * gamma * energies(h, include_constant=False))
    for x in range(cols):
        start[embed_index(x, routed.initial_placement), x] = 1.0
        expect[embed_index(x, routed.final_placement), x] = phase[x]
    out = apply_circuit(circuit, start)
    return float(np.max(np.abs(out - expect)))


def _physical_energies(h: LogicalHamiltonian) -> np.ndarray:
    """Sum_k J_k q_k over all 2**K physical configurations."""
    K = h.K
    idx = np.arange(2**K, dtype=np.int64)
    out = np.zeros(2**K)
    for k, t in enumerate(h.terms):
        out += t.coeff * (1 - 2 * ((idx >> k) & 1))
    return out


def _satisfied(deps: Sequence[Sequence[int]], K: int) -> np.ndarray:
    """(len(deps), 2**K) boolean table of even parity on each dependency."""
    idx = np.arange(2**K, dtype=np.int64)
    return np.array([_parity_signs(idx, d) == 1 for d in deps]).reshape(len(deps), 2**K)


def penalty_energies(h: LogicalHamiltonian, report: MappingReport, penalty: float | None = None) -> np.ndarray:
    """H_phys = sum_k J_k q_k - penalty * sum_l (+1 if satisfied else -1), all 2**K configs."""
    deps = report.all_dependencies()
    if penalty is None:
        penalty = default_penalty(h)
    sat = _satisfied(deps, h.K)
    return _physical_energies(h) - penalty * np.sum(np.where(sat, 1.0, -1.0), axis=0)


def default_penalty(h: LogicalHamiltonian) -> float:
    return 1.0 + float(np.sum(np.abs(h.coeffs)))


def physical_index(h: LogicalHamiltonian, logical_index: int) -> int:
    out = 0
    for k, t in enumerate(h.terms):
        b = 0
        for s in t.spins:
            b ^= (logical_index >> s) & 1
        out |= b << k
    return out


@dataclass
class SpectrumCheck:
    decoded_valid: bool
    energies_match: bool
    ground_match: bool
    penalty_ground_ok: bool
    logical_ground: float
    physical_ground: float

    def __bool__(self) -> bool:
        return self.decoded_valid and self.energies_match and self.ground_match and self.penalty_ground_ok


def verify_parity_spectrum(
    h: LogicalHamiltonian, report: MappingReport, penalty: float | None = None, tol: float = 1e-9
) -> SpectrumCheck:
    """Brute-force equivalence of the logical and constrained physical spectra.

    Unresolved dependencies (no low-weight representative) are enforced too,
    so the constrained set is always exactly the image of the logical map.
    """
    N, K = h.num_spins, h.K
    if N > 10 or K > 16:
        raise SimulationError("spectrum check limited to N <= 10, K <= 16")
    deps = report.all_dependencies()
    logical = energies(h, include_constant=False)
    phys = _physical_energies(h)
    sat = _satisfied(deps, K).all(axis=0) if deps else np.ones(2**K, dtype=bool)

    images = np.array([physical_index(h, x) for x in range(2**N)], dtype=np.int64)
    decoded_valid = bool(sat[images].all())
    energies_match = bool(np.allclose(phys[images], logical, atol=tol, rtol=0))
    logical_ground = float(logical.min())
    physical_ground = float(phys[sat].min()) if sat.any() else float("inf")
    ground_match = abs(logical_ground - physical_ground) <= tol

    pen = default_penalty(h) if penalty is None else penalty
    hp = penalty_energies(h, report, pen)
    ground_states = np.flatnonzero(np.abs(hp - hp.min()) <= tol)
    logical_ground_images = set(images[np.abs(logical - logical_ground) <= tol].tolist())
    if pen > float(np.sum(np.abs(h.coeffs))):
        penalty_ok = set(ground_states.tolist()) <= logical_ground_images
    else:
        penalty_ok = True
    return SpectrumCheck(decoded_valid, energies_match, ground_match, penalty_ok, logical_ground, physical_ground)


def qaoa_energy(build: Callable[[QaoaParams], Circuit], params: QaoaParams, diag: np.ndarray) -> float:
    """Energy of the state prepared by ``build(params)`` from |0...0>."""
    c = build(params)
    s = apply_circuit(c, zero_state(c.num_qubits))
    return float(np.dot(np.abs(s) ** 2, diag))


def _params_from_vector(x: Sequence[float], p: int, with_omega: bool) -> QaoaParams:
    betas = tuple(x[0:p])
    gammas = tuple(x[p:2 * p])
    omegas = tuple(x[2 * p:3 * p]) if with_omega else ()
    return QaoaParams(p, betas, gammas, omegas, check_ranges=False)


def scan_optimize(
    energy: Callable[[QaoaParams], float],
    p: int = 1,
    resolution: int = 32,
    with_omega: bool = False,
    refine: bool = True,
) -> tuple[QaoaParams, float]:
    """Uniform grid over (betas, gammas[, omegas]) then coordinate descent.

    Grid axes: beta in [0, pi), gamma and omega in [0, 2 pi), ``resolution``
    points each. Refinement runs three passes starting at one grid step and
    halving it after every pass. Ties resolve to the first grid point.
    """
    beta_axis = np.arange(resolution) * np.pi / resolution
    angle_axis = np.arange(resolution) * 2 * np.pi / resolution
    axes = [beta_axis] * p + [angle_axis] * p + ([angle_axis] * p if with_omega else [])
    best_x, best_e = None, np.inf
    for point in itertools.product(*axes):
        e = energy(_params_from_vector(point, p, with_omega))
        if e < best_e - 1e-15:
            best_x, best_e = list(point), e
    if refine:
        steps = [np.pi / resolution] * p + [2 * np.pi / resolution] * (len(axes) - p)
        for _ in range(3):
            for i in range(len(best_x)):
                for sign in (1.0, -1.0):
                    trial = list(best_x)
                    trial[i] += sign * steps[i]
                    e = energy(_params_from_vector(trial, p, with_omega))
                    if e < best_e - 1e-15:
                        best_x, best_e = trial, e
            steps = [s / 2 for s in steps]
    return _params_from_vector(best_x, p, with_omega), float(best_e)
