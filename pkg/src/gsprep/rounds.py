"""One round of the phase-search circuit, in both input modes.

A round attaches a single ancilla qubit to the system, interleaves Rz/Ry
rotations with controlled powers of the round unitary, and measures the
ancilla. Two computational backends are provided:

* circuit: dense simulation of the full (1 + system)-qubit register,
  controlled unitaries materialized as block matrices;
* spectral: the system is expanded in the unitary's eigenbasis and each
  eigencomponent is multiplied by the exact 2x2 ancilla transfer amplitude.

Both backends share the rotation/control schedule, so they agree to
machine precision; the circuit backend exists as a cross-check and is only
practical at small sizes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paulis import PauliString, PauliSum
from .signpoly import PhaseFactorSet, TrigPolynomial, ancilla_amplitudes, controlled_kind
from .spectral import EvolutionHandle, unitary_eigensystem, wrap_angle
from .states import QuantumState, as_rng


@dataclass
class RoundSpec:
    """Round unitary is e^{-i shift} U^power for the handle's U."""

    shift: float
    power: int
    factors: PhaseFactorSet
    backend: str = "spectral"

    def __post_init__(self):
        if self.power < 1:
            raise ValueError("power must be >= 1")
        if self.backend not in ("spectral", "circuit"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass
class RoundResult:
    outcome: int
    probability: float
    post_state: QuantumState
    p0: float
    p1: float


def round_phases(handle: EvolutionHandle, spec: RoundSpec) -> np.ndarray:
    return wrap_angle(spec.power * handle.phases - spec.shift)


def _branches_spectral(handle, spec, state):
    mu = round_phases(handle, spec)
    a0, a1 = ancilla_amplitudes(spec.factors, mu)
    if state.kind == "pure":
        coeffs = handle.to_eigenbasis(state.amplitudes)
        b0 = a0 * coeffs
        b1 = a1 * coeffs
        p0 = float(np.sum(np.abs(b0) ** 2))
        p1 = float(np.sum(np.abs(b1) ** 2))
        post0 = handle.from_eigenbasis(b0 / np.sqrt(p0)) if p0 > 1e-14 else None
        post1 = handle.from_eigenbasis(b1 / np.sqrt(p1)) if p1 > 1e-14 else None
        mk = lambda v: QuantumState(v, validate=False) if v is not None else None
        return p0, mk(post0), p1, mk(post1)
    V = handle.vectors
    R = V.conj().T @ state.amplitudes @ V
    R0 = (a0[:, None] * R) * np.conj(a0)[None, :]
    R1 = (a1[:, None] * R) * np.conj(a1)[None, :]
    p0 = float(np.trace(R0).real)
    p1 = float(np.trace(R1).real)
    post0 = V @ (R0 / p0) @ V.conj().T if p0 > 1e-14 else None
    post1 = V @ (R1 / p1) @ V.conj().T if p1 > 1e-14 else None
    mk = lambda m: QuantumState(m, kind="mixed", validate=False) if m is not None else None
    return p0, mk(post0), p1, mk(post1)


def _rotation_full(angle: float, axis: str, dim: int) -> np.ndarray:
    if axis == "z":
        R = np.diag([np.exp(-1j * angle / 2), np.exp(1j * angle / 2)])
    else:
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        R = np.array([[c, -s], [s, c]], dtype=complex)
    return np.kron(R, np.eye(dim, dtype=complex))


def _circuit_ops(handle, spec):
    """Full-register operation list, in application order."""
    dim = handle.dim
    mu = round_phases(handle, spec)
    W = (handle.vectors * np.exp(1j * mu)) @ handle.vectors.conj().T
    Wd = W.conj().T
    eye = np.eye(dim, dtype=complex)
    ctrl = np.block([[eye, np.zeros_like(eye)], [np.zeros_like(eye), W]])
    anti = np.block([[Wd, np.zeros_like(eye)], [np.zeros_like(eye), eye]])
    pf = spec.factors
    L = pf.L
    ops = []
    for layer in range(L, 0, -1):
        ops.append(_rotation_full(pf.phis[layer], "z", dim))
        ops.append(_rotation_full(pf.thetas[layer], "y", dim))
        ops.append(ctrl if controlled_kind(L, layer) == "U" else anti)
    ops.append(_rotation_full(pf.phis[0], "z", dim))
    ops.append(_rotation_full(pf.thetas[0], "y", dim))
    ops.append(_rotation_full(pf.omega, "z", dim))
    return ops


def _branches_circuit(handle, spec, state):
    dim = handle.dim
    ops = _circuit_ops(handle, spec)
    if state.kind == "pure":
        vec = np.concatenate([state.amplitudes, np.zeros(dim, dtype=complex)])
        for op in ops:
            vec = op @ vec
        top, bot = vec[:dim], vec[dim:]
        p0 = float(np.sum(np.abs(top) ** 2))
        p1 = float(np.sum(np.abs(bot) ** 2))
        post0 = QuantumState(top / np.sqrt(p0), validate=False) if p0 > 1e-14 else None
        post1 = QuantumState(bot / np.sqrt(p1), validate=False) if p1 > 1e-14 else None
        return p0, post0, p1, post1
    full = np.zeros((2 * dim, 2 * dim), dtype=complex)
    full[:dim, :dim] = state.amplitudes
    for op in ops:
        full = op @ full @ op.conj().T
    blk0, blk1 = full[:dim, :dim], full[dim:, dim:]
    p0 = float(np.trace(blk0).real)
    p1 = float(np.trace(blk1).real)
    post0 = QuantumState(blk0 / p0, kind="mixed", validate=False) if p0 > 1e-14 else None
    post1 = QuantumState(blk1 / p1, kind="mixed", validate=False) if p1 > 1e-14 else None
    return p0, post0, p1, post1


def round_branches(handle: EvolutionHandle, spec: RoundSpec, state: QuantumState):
    """Both measurement branches: (p0, post0, p1, post1), posts normalized."""
    if state.amplitudes.shape[0] != handle.dim:
        raise ValueError("state dimension does not match the round unitary")
    branches = _branches_spectral if spec.backend == "spectral" else _branches_circuit
    p0, post0, p1, post1 = branches(handle, spec, state)
    if abs(p0 + p1 - 1.0) > 1e-10:
        raise AssertionError(f"branch probabilities sum to {p0 + p1}")
    return p0, post0, p1, post1


def run_round(handle: EvolutionHandle, spec: RoundSpec, state: QuantumState, rng) -> RoundResult:
    """Run one round and sample the ancilla measurement."""
    rng = as_rng(rng)
    p0, post0, p1, post1 = round_branches(handle, spec, state)
    outcome = 0 if rng.random() < p0 else 1
    post = post0 if outcome == 0 else post1
    if post is None:  # sampled a (numerically) impossible branch
        outcome = 1 - outcome
        post = post1 if outcome == 1 else post0
    return RoundResult(outcome, p0 if outcome == 0 else p1, post, p0, p1)


run_round_he = run_round  # Hamiltonian-evolution mode: handle wraps e^{iH}


def run_round_be(handle: EvolutionHandle, spec: RoundSpec, state: QuantumState, rng) -> RoundResult:
    """Block-encoding mode: the handle wraps U_H and the state carries the
    encoding's ancilla register (qubits 0..m-1) in front of the system."""
    return run_round(handle, spec, state, rng)


# ---------------------------------------------------------------------------
# Ideal measurement maps (probability analysis)


def branch_weights(f: TrigPolynomial, mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    fv = np.clip(f.eval(mu), -1.0, 1.0)
    return np.sqrt((1.0 + fv) / 2.0), np.sqrt((1.0 - fv) / 2.0)


def measurement_maps(
    f: TrigPolynomial,
    handle: EvolutionHandle,
    state: QuantumState,
    shift: float = 0.0,
    power: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Un-normalized post-measurement density matrices for the two outcomes,
    with the ideal real amplitude weights sqrt((1 +- f(mu_j))/2).

    tr(branch0) + tr(branch1) = 1 up to the clipping of |f| at 1. This is
    the object behind the output-probability analysis; the simulation
    backends carry the full complex amplitudes instead.
    """
    mu = wrap_angle(power * handle.phases - shift)
    w0, w1 = branch_weights(f, mu)
    V = handle.vectors
    if state.kind == "pure":
        coeffs = handle.to_eigenbasis(state.amplitudes)
        b0 = V @ (w0 * coeffs)
        b1 = V @ (w1 * coeffs)
        return np.outer(b0, b0.conj()), np.outer(b1, b1.conj())
    R = V.conj().T @ state.amplitudes @ V
    out0 = V @ ((w0[:, None] * R) * w0[None, :]) @ V.conj().T
    out1 = V @ ((w1[:, None] * R) * w1[None, :]) @ V.conj().T
    return out0, out1


# ---------------------------------------------------------------------------
# LCU block encoding


class BlockEncodingError(ValueError):
    pass


@dataclass
class BlockEncoding:
    """Unitary with H/alpha in its |0^m> corner, built from a Pauli
    decomposition: prepare loads sqrt(|a_k|/alpha), select applies
    sign(a_k) P_k, and a reflection about the |0^m> sector turns the
    (Hermitian, involutory) select-prepare sandwich into a rotation on each
    invariant plane, so U_H eigenphases obey lambda_j/alpha = cos(tau_j).
    """

    m: int
    alpha: float
    prepare_amplitudes: np.ndarray
    select_terms: list[tuple[PauliString, float]]
    n: int

    @property
    def total_qubits(self) -> int:
        return self.m + self.n

    def prepare_unitary(self) -> np.ndarray:
        dim = 1 << self.m
        v = self.prepare_amplitudes
        e0 = np.zeros(dim)
        e0[0] = 1.0
        if np.allclose(v, e0):
            return np.eye(dim)
        u = e0 - v
        u /= np.linalg.norm(u)
        return np.eye(dim) - 2.0 * np.outer(u, u)

    def unitary(self) -> np.ndarray:
        dim_a, dim_s = 1 << self.m, 1 << self.n
        sel = np.zeros((dim_a * dim_s, dim_a * dim_s), dtype=complex)
        eye_s = np.eye(dim_s, dtype=complex)
        for k in range(dim_a):
            if k < len(self.select_terms):
                ps, sign = self.select_terms[k]
                blk = sign * ps.to_dense()
            else:
                blk = eye_s
            sel[k * dim_s : (k + 1) * dim_s, k * dim_s : (k + 1) * dim_s] = blk
        P = np.kron(self.prepare_unitary(), eye_s)
        U = P.conj().T @ sel @ P
        refl = -np.eye(dim_a * dim_s, dtype=complex)
        refl[:dim_s, :dim_s] += 2.0 * eye_s
        return refl @ U

    def corner(self) -> np.ndarray:
        dim_s = 1 << self.n
        return self.unitary()[:dim_s, :dim_s]

    def handle(self) -> EvolutionHandle:
        return unitary_eigensystem(self.unitary())

    def attach_ancilla(self, state: QuantumState) -> QuantumState:
        """|0^m> x state, the fresh input of a block-encoding round."""
        dim_a = 1 << self.m
        if state.kind == "pure":
            vec = np.zeros(dim_a * (1 << self.n), dtype=complex)
            vec[: 1 << self.n] = state.amplitudes
            return QuantumState(vec, validate=False)
        anc = np.zeros((dim_a, dim_a))
        anc[0, 0] = 1.0
        return QuantumState(np.kron(anc, state.amplitudes), kind="mixed", validate=False)


def build_block_encoding(H: PauliSum) -> BlockEncoding:
    terms = sorted(H.terms.items(), key=lambda kv: kv[0].letters)
    terms = [(ps, c) for ps, c in terms if c != 0.0]
    if not terms:
        raise BlockEncodingError("cannot block-encode the zero Hamiltonian")
    alpha = sum(abs(c) for _, c in terms)
    m = int(np.ceil(np.log2(len(terms)))) if len(terms) > 1 else 0
    amps = np.zeros(1 << m)
    amps[: len(terms)] = [np.sqrt(abs(c) / alpha) for _, c in terms]
    select = [(ps, float(np.sign(c))) for ps, c in terms]
    return BlockEncoding(m=m, alpha=alpha, prepare_amplitudes=amps, select_terms=select, n=H.n)


# ---------------------------------------------------------------------------
# Ancilla post-selection (block-encoding output)


class PostselectError(RuntimeError):
    pass


def _allzero_probability(state: QuantumState, m: int) -> float:
    dim_s = state.amplitudes.shape[0] >> m
    if state.kind == "pure":
        return float(np.sum(np.abs(state.amplitudes[:dim_s]) ** 2))
    return float(np.trace(state.amplitudes[:dim_s, :dim_s]).real)


def postselect_ancilla(
    state: QuantumState,
    m: int,
    rng,
    retry_round=None,
    max_attempts: int = 40,
) -> tuple[bool, QuantumState, int]:
    """Measure whether the encoding ancillas are all zero; on success return
    the system state. A failed attempt projects the ancillas out of the
    zero sector; `retry_round(state, rng) -> state` (one more search round)
    re-collapses onto an eigenvector pair before the next attempt.

    For an eigenvector-pair input (|0^m,psi> +- i|bot>)/sqrt(2) every
    attempt succeeds with probability 1/2.
    """
    rng = as_rng(rng)
    cur = state
    dim_s = state.amplitudes.shape[0] >> m
    for attempt in range(1, max_attempts + 1):
        p_zero = _allzero_probability(cur, m)
        if rng.random() < p_zero:
            if cur.kind == "pure":
                sys_vec = cur.amplitudes[:dim_s] / np.sqrt(p_zero)
                return True, QuantumState(sys_vec, validate=False), attempt
            blk = cur.amplitudes[:dim_s, :dim_s] / p_zero
            return True, QuantumState(blk, kind="mixed", validate=False), attempt
        if p_zero > 1.0 - 1e-14:
            raise AssertionError("sampled an impossible branch")
        if cur.kind == "pure":
            vec = cur.amplitudes.copy()
            vec[:dim_s] = 0.0
            cur = QuantumState(vec / np.sqrt(1.0 - p_zero), validate=False)
        else:
            rho = cur.amplitudes.copy()
            rho[:dim_s, :] = 0.0
            rho[:, :dim_s] = 0.0
            cur = QuantumState(rho / (1.0 - p_zero), kind="mixed", validate=False)
        if retry_round is not None:
            cur = retry_round(cur, rng)
    raise PostselectError(f"no all-zero outcome within {max_attempts} attempts")
