"""Quantum state container plus measurement and reduction primitives."""
from __future__ import annotations

import numpy as np

NORM_TOL = 1e-10


def as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


class QuantumState:
    """Pure statevector or density matrix on n qubits (big-endian indexing)."""

    def __init__(self, amplitudes: np.ndarray, kind: str = "pure", validate: bool = True):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if kind == "pure":
            if amplitudes.ndim != 1:
                raise ValueError("pure state needs a vector")
        elif kind == "mixed":
            if amplitudes.ndim != 2 or amplitudes.shape[0] != amplitudes.shape[1]:
                raise ValueError("mixed state needs a square matrix")
        else:
            raise ValueError(f"unknown kind {kind!r}")
        dim = amplitudes.shape[0]
        n = int(round(np.log2(dim)))
        if 1 << n != dim:
            raise ValueError(f"dimension {dim} is not a power of two")
        self.kind = kind
        self.n = n
        self.amplitudes = amplitudes
        if validate:
            self.check()

    def check(self):
        if self.kind == "pure":
            norm = np.linalg.norm(self.amplitudes)
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"statevector norm {norm} is not 1")
        else:
            rho = self.amplitudes
            if np.max(np.abs(rho - rho.conj().T)) > 1e-9:
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(rho).real
            if abs(tr - 1.0) > NORM_TOL:
                raise ValueError(f"density matrix trace {tr} is not 1")
            if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
                raise ValueError("density matrix has a negative eigenvalue")

    @classmethod
    def from_bits(cls, bits: str) -> "QuantumState":
        n = len(bits)
        vec = np.zeros(1 << n, dtype=complex)
        vec[int(bits, 2)] = 1.0
        return cls(vec)

    @classmethod
    def zero(cls, n: int) -> "QuantumState":
        return cls.from_bits("0" * n)

    def density_matrix(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.amplitudes, self.amplitudes.conj())
        return self.amplitudes

    def to_mixed(self) -> "QuantumState":
        return QuantumState(self.density_matrix(), kind="mixed", validate=False)

    def copy(self) -> "QuantumState":
        return QuantumState(self.amplitudes.copy(), kind=self.kind, validate=False)

    def __repr__(self):
        return f"QuantumState(kind={self.kind!r}, n={self.n})"


def random_pure_state(n: int, rng) -> QuantumState:
    rng = as_rng(rng)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return QuantumState(v / np.linalg.norm(v))


def random_mixed_state(n: int, rng, rank: int | None = None) -> QuantumState:
    rng = as_rng(rng)
    dim = 1 << n
    rank = rank or dim
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ G.conj().T
    rho /= np.trace(rho).real
    return QuantumState(rho, kind="mixed", validate=False)


def measure_qubit(state: QuantumState, q: int, rng) -> tuple[int, float, QuantumState]:
    """Projectively measure qubit q in the computational basis.

    Returns (outcome, probability of that outcome, renormalized post-state).
    Deterministic for a fixed rng seed.
    """
    if not 0 <= q < state.n:
        raise ValueError(f"qubit index {q} out of range for n={state.n}")
    rng = as_rng(rng)
    n = state.n
    if state.kind == "pure":
        psi = state.amplitudes.reshape((2,) * n)
        psi_q = np.moveaxis(psi, q, 0)
        p0 = float(np.sum(np.abs(psi_q[0]) ** 2))
        p1 = float(np.sum(np.abs(psi_q[1]) ** 2))
    else:
        rho = state.amplitudes.reshape((2,) * (2 * n))
        rho_q = np.moveaxis(rho, (q, n + q), (0, 1))
        p0 = float(np.trace(rho_q[0, 0].reshape(1 << (n - 1), -1)).real)
        p1 = float(np.trace(rho_q[1, 1].reshape(1 << (n - 1), -1)).real)
    if abs(p0 + p1 - 1.0) > NORM_TOL:
        raise AssertionError(f"branch probabilities sum to {p0 + p1}")
    if max(p0, p1) < 1e-14:
        raise AssertionError("both branch probabilities vanish")
    outcome = 0 if rng.random() < p0 else 1
    prob = p0 if outcome == 0 else p1
    if state.kind == "pure":
        psi_q = np.moveaxis(state.amplitudes.reshape((2,) * n).copy(), q, 0)
        psi_q[1 - outcome] = 0.0
        post = np.moveaxis(psi_q, 0, q).reshape(-1) / np.sqrt(prob)
        return outcome, prob, QuantumState(post, validate=False)
    rho_q = np.moveaxis(state.amplitudes.reshape((2,) * (2 * n)).copy(), (q, n + q), (0, 1))
    rho_q[1 - outcome, :] = 0.0
    rho_q[:, 1 - outcome] = 0.0
    post = np.moveaxis(rho_q, (0, 1), (q, n + q)).reshape(1 << n, 1 << n) / prob
    return outcome, prob, QuantumState(post, kind="mixed", validate=False)


def partial_trace(state: QuantumState, keep: list[int] | tuple[int, ...]) -> QuantumState:
    """Reduced density matrix on the kept qubits, in their given order."""
    keep = list(keep)
    if not keep:
        raise ValueError("keep set must be non-empty")
    if len(set(keep)) != len(keep) or any(not 0 <= q < state.n for q in keep):
        raise ValueError("invalid keep set")
    n = state.n
    traced = [q for q in range(n) if q not in keep]
    if state.kind == "pure":
        psi = state.amplitudes.reshape((2,) * n)
        psi = np.transpose(psi, keep + traced)
        mat = psi.reshape(1 << len(keep), 1 << len(traced))
        rho = mat @ mat.conj().T
    else:
        rho_t = state.amplitudes.reshape((2,) * (2 * n))
        perm = keep + traced + [n + q for q in keep] + [n + q for q in traced]
        rho_t = np.transpose(rho_t, perm)
        k, t = len(keep), len(traced)
        rho_t = rho_t.reshape(1 << k, 1 << t, 1 << k, 1 << t)
        rho = np.einsum("aibi->ab", rho_t)
    return QuantumState(rho, kind="mixed", validate=False)


def trace_distance(a: np.ndarray | QuantumState, b: np.ndarray | QuantumState) -> float:
    """(1/2) * trace norm of the difference of density matrices."""
    ra = a.density_matrix() if isinstance(a, QuantumState) else np.asarray(a)
    rb = b.density_matrix() if isinstance(b, QuantumState) else np.asarray(b)
    if ra.ndim == 1:
        ra = np.outer(ra, ra.conj())
    if rb.ndim == 1:
        rb = np.outer(rb, rb.conj())
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(ra - rb))))
