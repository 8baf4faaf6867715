"""Second-quantized fermionic operators and the Jordan-Wigner encoding."""
from __future__ import annotations

import numpy as np

from .paulis import PauliString, PauliSum

# a ladder term is a tuple of (mode, dagger) pairs applied right-to-left as
# written, e.g. ((1, True), (0, False)) is a_1^dag a_0
LadderTerm = tuple[tuple[int, bool], ...]


class FermionOperator:
    """Complex-weighted sum of products of fermionic ladder operators."""

    def __init__(self, modes: int, terms: dict[LadderTerm, complex] | None = None):
        if modes < 1:
            raise ValueError("need modes >= 1")
        self.modes = modes
        self._terms: dict[LadderTerm, complex] = {}
        if terms:
            for seq, c in terms.items():
                self.add_term(seq, c)

    def add_term(self, seq: LadderTerm, coeff: complex) -> None:
        seq = tuple((int(m), bool(d)) for m, d in seq)
        for m, _ in seq:
            if not 0 <= m < self.modes:
                raise ValueError(f"mode {m} out of range for {self.modes} modes")
        new = self._terms.get(seq, 0.0) + complex(coeff)
        if new == 0:
            self._terms.pop(seq, None)
        else:
            self._terms[seq] = new

    @property
    def terms(self) -> dict[LadderTerm, complex]:
        return dict(self._terms)

    def hermitian_conjugate(self) -> "FermionOperator":
        out = FermionOperator(self.modes)
        for seq, c in self._terms.items():
            conj_seq = tuple((m, not d) for m, d in reversed(seq))
            out.add_term(conj_seq, np.conj(c))
        return out

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """Syntactic check: the term set must carry its own conjugates."""
        conj = self.hermitian_conjugate()
        keys = set(self._terms) | set(conj._terms)
        return all(
            abs(self._terms.get(k, 0.0) - conj._terms.get(k, 0.0)) <= tol for k in keys
        )

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        if other.modes != self.modes:
            raise ValueError("mode count mismatch")
        out = FermionOperator(self.modes, self._terms)
        for seq, c in other._terms.items():
            out.add_term(seq, c)
        return out

    def __repr__(self):
        def fmt(seq):
            return " ".join(f"{m}^" if d else f"{m}" for m, d in seq)

        parts = [f"{c:+g} [{fmt(seq)}]" for seq, c in list(self._terms.items())[:4]]
        more = "..." if len(self._terms) > 4 else ""
        return f"FermionOperator(modes={self.modes}: {' '.join(parts)}{more})"


def ladder_paulis(mode: int, dagger: bool, n: int) -> list[tuple[complex, PauliString]]:
    """JW image of a single ladder operator: (X -+ iY)/2 with Z on modes < mode."""
    z_prefix = "Z" * mode
    suffix = "I" * (n - mode - 1)
    sx = PauliString(z_prefix + "X" + suffix)
    sy = PauliString(z_prefix + "Y" + suffix)
    sign = -1j if dagger else 1j
    return [(0.5, sx), (0.5 * sign, sy)]


def jordan_wigner(op: FermionOperator, require_hermitian: bool = True):
    """Map a fermionic operator to qubit form under Jordan-Wigner.

    Returns a PauliSum when the result is Hermitian (real coefficients after
    merging). With require_hermitian=False, returns the raw complex term
    dictionary instead.
    """
    n = op.modes
    acc: dict[PauliString, complex] = {}
    for seq, coeff in op.terms.items():
        # expand the product of ladder operators left to right
        partial: list[tuple[complex, PauliString]] = [(coeff, PauliString("I" * n))]
        for mode, dag in seq:
            factors = ladder_paulis(mode, dag, n)
            nxt: list[tuple[complex, PauliString]] = []
            for c0, p0 in partial:
                for c1, p1 in factors:
                    phase, prod = p0 * p1
                    nxt.append((c0 * c1 * phase, prod))
            partial = nxt
        for c, p in partial:
            acc[p] = acc.get(p, 0.0) + c
    acc = {p: c for p, c in acc.items() if abs(c) > 1e-14}
    if not require_hermitian:
        return acc
    max_imag = max((abs(c.imag) for c in acc.values()), default=0.0)
    if max_imag > 1e-10:
        raise ValueError(
            f"Jordan-Wigner image is not Hermitian (imag residue {max_imag:.2e}); "
            "pass require_hermitian=False for the raw map"
        )
    out = PauliSum(n)
    for p, c in acc.items():
        out.add_term(p, c.real)
    return out


def dense_ladder(mode: int, dagger: bool, modes: int) -> np.ndarray:
    """Dense matrix of a single ladder operator (JW route), for oracles."""
    mats = jw_term_dense(((mode, dagger),), modes)
    return mats


def jw_term_dense(seq: LadderTerm, modes: int) -> np.ndarray:
    op = FermionOperator(modes, {tuple(seq): 1.0})
    acc = jordan_wigner(op, require_hermitian=False)
    dim = 1 << modes
    out = np.zeros((dim, dim), dtype=complex)
    for p, c in acc.items():
        out += c * p.to_dense()
    return out


def fermion_dense(op: FermionOperator) -> np.ndarray:
    """Dense matrix of the operator in the occupation-number basis."""
    dim = 1 << op.modes
    out = np.zeros((dim, dim), dtype=complex)
    for seq, c in op.terms.items():
        out += c * jw_term_dense(seq, op.modes)
    return out


def number_operator(op_modes: int, mode: int) -> FermionOperator:
    return FermionOperator(op_modes, {((mode, True), (mode, False)): 1.0})


def total_number_operator(modes: int) -> FermionOperator:
    out = FermionOperator(modes)
    for m in range(modes):
        out.add_term(((m, True), (m, False)), 1.0)
    return out
