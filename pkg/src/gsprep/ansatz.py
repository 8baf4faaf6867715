"""Shallow parameterized circuits used as warm starts.

Three templates:

* HEA: per block an Ry column, an Rz column and a CNOT chain down the
  register, with one more Ry+Rz column after the last block.
* ALT: one initial Ry column, then per block a brickwork of two-qubit
  entanglers (CZ by default) on even pairs, an Ry column, entanglers on odd
  pairs and Ry gates on the qubits those touch.
* PRODUCT_RY: a single Ry per qubit, no entanglers.

Circuits compile to a flat op list; gate kernels act on the trailing axis
of an arbitrarily-batched amplitude array, so shifted-parameter copies
evolve together.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import QuantumState

# op encoding: ("ry", q, param_index) ("rz", q, param_index)
#              ("cz", a, b, -1)       ("cnot", ctrl, targ, -1)
Op = tuple[str, int, int] | tuple[str, int, int, int]


def _split(n: int, a: int, b: int) -> tuple[int, int, int]:
    """Axis factorization 2^n = da * 2 * dm * 2 * dr for qubit pair a < b."""
    return 1 << a, 1 << (b - a - 1), 1 << (n - b - 1)


def apply_1q(vec: np.ndarray, n: int, q: int, mat: np.ndarray) -> np.ndarray:
    """Apply a 2x2 gate to qubit q; vec may carry leading batch axes."""
    shape = vec.shape
    dl, dr = 1 << q, 1 << (n - q - 1)
    v = vec.reshape(shape[:-1] + (dl, 2, dr))
    out = np.empty_like(v)
    v0, v1 = v[..., 0, :], v[..., 1, :]
    out[..., 0, :] = mat[0, 0] * v0 + mat[0, 1] * v1
    out[..., 1, :] = mat[1, 0] * v0 + mat[1, 1] * v1
    return out.reshape(shape)


def apply_cz(vec: np.ndarray, n: int, a: int, b: int) -> np.ndarray:
    if a > b:
        a, b = b, a
    da, dm, dr = _split(n, a, b)
    shape = vec.shape
    v = vec.reshape(shape[:-1] + (da, 2, dm, 2, dr)).copy()
    v[..., 1, :, 1, :] *= -1.0
    return v.reshape(shape)


def apply_cnot(vec: np.ndarray, n: int, ctrl: int, targ: int) -> np.ndarray:
    shape = vec.shape
    if ctrl < targ:
        da, dm, dr = _split(n, ctrl, targ)
        v = vec.reshape(shape[:-1] + (da, 2, dm, 2, dr)).copy()
        tmp = v[..., 1, :, 0, :].copy()
        v[..., 1, :, 0, :] = v[..., 1, :, 1, :]
        v[..., 1, :, 1, :] = tmp
    else:
        da, dm, dr = _split(n, targ, ctrl)
        v = vec.reshape(shape[:-1] + (da, 2, dm, 2, dr)).copy()
        tmp = v[..., 0, :, 1, :].copy()
        v[..., 0, :, 1, :] = v[..., 1, :, 1, :]
        v[..., 1, :, 1, :] = tmp
    return v.reshape(shape)


def ry_mat(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_mat(phi: float) -> np.ndarray:
    return np.array([[np.exp(-1j * phi / 2), 0], [0, np.exp(1j * phi / 2)]], dtype=complex)


_GATE_MATS = {"ry": ry_mat, "rz": rz_mat}


@dataclass
class AnsatzSpec:
    kind: str  # "HEA" | "ALT" | "PRODUCT_RY"
    n: int
    depth: int = 1
    entangler: str = "cz"  # ALT only; "cz" or "cnot"

    def __post_init__(self):
        if self.kind not in ("HEA", "ALT", "PRODUCT_RY"):
            raise ValueError(f"unknown ansatz kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("need n >= 1")
        if self.kind != "PRODUCT_RY" and self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.entangler not in ("cz", "cnot"):
            raise ValueError("entangler must be 'cz' or 'cnot'")

    @property
    def param_count(self) -> int:
        n, p = self.n, self.depth
        if self.kind == "PRODUCT_RY":
            return n
        if self.kind == "HEA":
            return 2 * n * (p + 1)
        return n + p * (2 * n - 2)

    def even_pairs(self) -> list[tuple[int, int]]:
        return [(q, q + 1) for q in range(0, self.n - 1, 2)]

    def odd_pairs(self) -> list[tuple[int, int]]:
        return [(q, q + 1) for q in range(1, self.n - 1, 2)]


def build_program(spec: AnsatzSpec) -> list[Op]:
    """Flat gate list with parameter slots, in application order."""
    ops: list[Op] = []
    k = 0

    def ry_col(qubits):
        nonlocal k
        for q in qubits:
            ops.append(("ry", q, k))
            k += 1

    def rz_col():
        nonlocal k
        for q in range(spec.n):
            ops.append(("rz", q, k))
            k += 1

    ent = "cz" if spec.entangler == "cz" else "cnot"
    if spec.kind == "PRODUCT_RY":
        ry_col(range(spec.n))
    elif spec.kind == "HEA":
        for _ in range(spec.depth):
            ry_col(range(spec.n))
            rz_col()
            for q in range(spec.n - 1):
                ops.append(("cnot", q, q + 1, -1))
        ry_col(range(spec.n))
        rz_col()
    else:
        ry_col(range(spec.n))
        middle = [q for pair in spec.odd_pairs() for q in pair]
        for _ in range(spec.depth):
            for a, b in spec.even_pairs():
                ops.append((ent, a, b, -1))
            ry_col(range(spec.n))
            for a, b in spec.odd_pairs():
                ops.append((ent, a, b, -1))
            ry_col(middle)
    assert k == spec.param_count
    return ops


def apply_op(vec: np.ndarray, n: int, op: Op, params: np.ndarray) -> np.ndarray:
    name = op[0]
    if name in ("ry", "rz"):
        _, q, pidx = op
        return apply_1q(vec, n, q, _GATE_MATS[name](params[pidx]))
    _, a, b, _ = op
    return apply_cz(vec, n, a, b) if name == "cz" else apply_cnot(vec, n, a, b)


def run_program(
    program: list[Op], n: int, params: np.ndarray, state: np.ndarray | None = None
) -> np.ndarray:
    vec = state
    if vec is None:
        vec = np.zeros(1 << n, dtype=complex)
        vec[..., 0] = 1.0
    for op in program:
        vec = apply_op(vec, n, op, params)
    return vec


def apply_ansatz(spec: AnsatzSpec, params: np.ndarray) -> QuantumState:
    """Statevector prepared from |0...0>; Ry(t) = e^{-i t Y/2}, Rz = e^{-i t Z/2}."""
    params = np.asarray(params, dtype=float)
    if params.shape != (spec.param_count,):
        raise ValueError(
            f"{spec.kind} on n={spec.n}, depth={spec.depth} needs "
            f"{spec.param_count} parameters, got {params.shape}"
        )
    vec = run_program(build_program(spec), spec.n, params)
    return QuantumState(vec, validate=False)


def shift_rule_energies(
    program: list[Op],
    n: int,
    params: np.ndarray,
    batch_energy,
) -> np.ndarray:
    """Energies at params with each parameter shifted by +-pi/2, one pair at
    a time: returns shape (P, 2) for the parameter-shift rule.

    All 2P shifted circuits run as one batch. Every gate is applied to the
    whole batch with its unshifted angle in a single vectorized call; the
    two rows belonging to that gate's own parameter are then recomputed
    from their saved pre-gate values with the shifted angles.
    `batch_energy` maps (..., 2^n) amplitude batches to (...,) energies.
    """
    P = params.size
    batch = np.zeros((2 * P, 1 << n), dtype=complex)
    batch[:, 0] = 1.0
    for op in program:
        if op[0] in ("ry", "rz"):
            name, q, k = op
            rows = batch[2 * k : 2 * k + 2].copy()
            batch = apply_1q(batch, n, q, _GATE_MATS[name](params[k]))
            mat_p = _GATE_MATS[name](params[k] + np.pi / 2)
            mat_m = _GATE_MATS[name](params[k] - np.pi / 2)
            batch[2 * k] = apply_1q(rows[0], n, q, mat_p)
            batch[2 * k + 1] = apply_1q(rows[1], n, q, mat_m)
        else:
            batch = apply_op(batch, n, op, params)
    return batch_energy(batch).reshape(P, 2)
