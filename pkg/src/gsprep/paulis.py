"""Pauli strings and real-weighted Pauli sums: the operator substrate.

Qubit 0 is the leftmost tensor factor; basis states are big-endian
bitstrings, so ``|q0 q1 ... q_{n-1}>`` has index ``sum(q_i 2^{n-1-i})``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

DENSE_QUBIT_CAP = 16

_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-qubit products: (left, right) -> (phase, letter)
_MUL = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


class SizeCapError(ValueError):
    """Raised when an operation would exceed its dense-size cap."""


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Pauli operators, e.g. 'IXZY'."""

    letters: str

    def __post_init__(self):
        if not self.letters or any(ch not in "IXYZ" for ch in self.letters):
            raise ValueError(f"invalid Pauli letters: {self.letters!r}")

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    @property
    def weight(self) -> int:
        return sum(ch != "I" for ch in self.letters)

    def __mul__(self, other: "PauliString") -> tuple[complex, "PauliString"]:
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        phase = 1 + 0j
        out = []
        for a, b in zip(self.letters, other.letters):
            p, c = _MUL[(a, b)]
            phase *= p
            out.append(c)
        return phase, PauliString("".join(out))

    def to_dense(self) -> np.ndarray:
        if self.n > DENSE_QUBIT_CAP:
            raise SizeCapError(f"n={self.n} exceeds dense cap {DENSE_QUBIT_CAP}")
        return reduce(np.kron, (_PAULI_MATS[ch] for ch in self.letters))

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Apply to a statevector without densifying. O(weight * 2^n)."""
        n = self.n
        psi = vec.reshape((2,) * n)
        for q, ch in enumerate(self.letters):
            if ch == "I":
                continue
            psi = np.moveaxis(psi, q, 0)
            if ch == "X":
                psi = psi[::-1]
            elif ch == "Y":
                psi = psi[::-1].copy()
                psi[0] *= -1j
                psi[1] *= 1j
            elif ch == "Z":
                psi = psi.copy()
                psi[1] *= -1
            psi = np.moveaxis(psi, 0, q)
        return psi.reshape(-1).astype(complex)

    def __str__(self):
        return self.letters


def identity_string(n: int) -> PauliString:
    return PauliString("I" * n)


class PauliSum:
    """Hermitian operator as a real-weighted sum of Pauli strings.

    Coefficients are real by construction; duplicate strings are merged.
    """

    def __init__(self, n: int, terms: Mapping[PauliString, float] | None = None):
        if n < 1:
            raise ValueError("need n >= 1")
        self.n = n
        self._terms: dict[PauliString, float] = {}
        if terms:
            for ps, c in terms.items():
                self.add_term(ps, c)

    def add_term(self, ps: PauliString, coeff: float, tol: float = 0.0) -> None:
        if ps.n != self.n:
            raise ValueError(f"term acts on {ps.n} qubits, operator has {self.n}")
        coeff = float(coeff)
        new = self._terms.get(ps, 0.0) + coeff
        if new == 0.0 or abs(new) <= tol:
            self._terms.pop(ps, None)
        else:
            self._terms[ps] = new

    @property
    def terms(self) -> dict[PauliString, float]:
        return dict(self._terms)

    @property
    def num_terms(self) -> int:
        return len(self._terms)

    @property
    def one_norm(self) -> float:
        """Coefficient one-norm, an upper bound on the spectral norm."""
        return float(sum(abs(c) for c in self._terms.values()))

    def identity_coefficient(self) -> float:
        return self._terms.get(identity_string(self.n), 0.0)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n != self.n:
            raise ValueError("qubit count mismatch")
        out = PauliSum(self.n, self._terms)
        for ps, c in other._terms.items():
            out.add_term(ps, c)
        return out

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum(self.n, {ps: c * scalar for ps, c in self._terms.items()})

    __rmul__ = __mul__

    def __iter__(self) -> Iterable[tuple[PauliString, float]]:
        return iter(sorted(self._terms.items(), key=lambda kv: kv[0].letters))

    def to_dense(self) -> np.ndarray:
        if self.n > DENSE_QUBIT_CAP:
            raise SizeCapError(f"n={self.n} exceeds dense cap {DENSE_QUBIT_CAP}")
        dim = 1 << self.n
        out = np.zeros((dim, dim), dtype=complex)
        for ps, c in self._terms.items():
            out += c * ps.to_dense()
        return out

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """H @ vec via per-term sparse application."""
        out = np.zeros_like(vec, dtype=complex)
        for ps, c in self._terms.items():
            out += c * ps.apply(vec)
        return out

    def expectation_vec(self, vec: np.ndarray) -> float:
        val = np.vdot(vec, self.apply(vec))
        if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
            raise AssertionError(f"expectation has imaginary residue {val.imag}")
        return float(val.real)

    def __repr__(self):
        parts = [f"{c:+g}*{ps}" for ps, c in list(self)[:4]]
        more = "..." if self.num_terms > 4 else ""
        return f"PauliSum(n={self.n}, {len(self._terms)} terms: {' '.join(parts)}{more})"


def pauli_term(n: int, coeff: float, **sites: str) -> tuple[PauliString, float]:
    """Build an n-qubit term from qubit->letter assignments.

    pauli_term(4, 0.5, q0='X', q2='Z') -> ('XIZI', 0.5)
    """
    letters = ["I"] * n
    for key, letter in sites.items():
        q = int(key[1:])
        letters[q] = letter
    return PauliString("".join(letters)), coeff


def expectation(H: PauliSum, state) -> float:
    """<psi|H|psi> for pure states, tr(H rho) for mixed ones."""
    from .states import QuantumState

    if isinstance(state, QuantumState):
        if state.n != H.n:
            raise ValueError("dimension mismatch")
        if state.kind == "pure":
            return H.expectation_vec(state.amplitudes)
        val = np.trace(H.to_dense() @ state.amplitudes)
        if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
            raise AssertionError(f"expectation has imaginary residue {val.imag}")
        return float(val.real)
    vec = np.asarray(state)
    if vec.ndim == 1:
        return H.expectation_vec(vec)
    val = np.trace(H.to_dense() @ vec)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
        raise AssertionError(f"expectation has imaginary residue {val.imag}")
    return float(val.real)
