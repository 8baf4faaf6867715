"""Model Hamiltonians: random Heisenberg chains, 1D Fermi-Hubbard with a
Gaussian local potential, QUBO / max-cut diagonal operators, and the
occupation-sector restriction used for chemical potentials."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .fermions import FermionOperator, jordan_wigner
from .paulis import PauliString, PauliSum
from .states import QuantumState, as_rng


# ---------------------------------------------------------------------------
# Heisenberg chains


@dataclass
class HeisenbergSpec:
    """Spin-1/2 chain with per-bond XYZ couplings and a per-site z field."""

    n: int
    couplings: list[tuple[float, float, float]]  # one (Jx, Jy, Jz) per bond
    field_z: list[float] = field(default_factory=list)
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two sites")
        if self.boundary not in ("periodic", "open"):
            raise ValueError("boundary must be 'periodic' or 'open'")
        if not self.field_z:
            self.field_z = [0.0] * self.n
        for trio in self.couplings:
            if not all(np.isfinite(trio)):
                raise ValueError("couplings must be finite")

    @property
    def bonds(self) -> list[tuple[int, int]]:
        bonds = [(i, i + 1) for i in range(self.n - 1)]
        if self.boundary == "periodic":
            bonds.append((self.n - 1, 0))
        return bonds


def heisenberg_hamiltonian(spec: HeisenbergSpec) -> PauliSum:
    """Spin operators are S = sigma/2, so each bond axis contributes J/4."""
    H = PauliSum(spec.n)
    for (i, j), (jx, jy, jz) in zip(spec.bonds, spec.couplings):
        for axis, Jv in zip("XYZ", (jx, jy, jz)):
            if Jv == 0.0:
                continue
            letters = ["I"] * spec.n
            letters[i] = axis
            letters[j] = axis
            H.add_term(PauliString("".join(letters)), Jv / 4.0)
    for i, hz in enumerate(spec.field_z):
        if hz != 0.0:
            letters = ["I"] * spec.n
            letters[i] = "Z"
            H.add_term(PauliString("".join(letters)), hz / 2.0)
    return H


def heisenberg_random(
    n: int, seed, boundary: str = "periodic", per_bond: bool = True
) -> tuple[HeisenbergSpec, PauliSum]:
    """Random chain with couplings drawn uniformly from [-1, 1].

    per_bond=True draws an independent (Jx, Jy, Jz) for every bond;
    per_bond=False draws one global triple shared by all bonds.
    """
    if n < 2:
        raise ValueError("need at least two sites")
    rng = as_rng(seed)
    n_bonds = n - 1 + (1 if boundary == "periodic" else 0)
    if per_bond:
        draws = rng.uniform(-1.0, 1.0, size=(n_bonds, 3))
    else:
        draws = np.tile(rng.uniform(-1.0, 1.0, size=3), (n_bonds, 1))
    spec = HeisenbergSpec(n=n, couplings=[tuple(row) for row in draws], boundary=boundary)
    return spec, heisenberg_hamiltonian(spec)


# ---------------------------------------------------------------------------
# 1D Fermi-Hubbard


@dataclass
class HubbardSpec:
    """1D Hubbard chain: sites are labelled 1..N, each holding an up and a
    down spin-orbital. Qubit layout is site-major: qubit 2(j-1) is site j
    spin-up, qubit 2(j-1)+1 is site j spin-down."""

    sites: int
    tunnelling: float
    onsite: float
    lambda_up: float = 0.0
    lambda_down: float = 0.0
    center_up: float = 0.0
    center_down: float = 0.0
    sigma_up: float = 1.0
    sigma_down: float = 1.0

    def __post_init__(self):
        if self.sites < 1:
            raise ValueError("need at least one site")
        if self.sigma_up <= 0 or self.sigma_down <= 0:
            raise ValueError("Gaussian widths must be positive")

    @property
    def modes(self) -> int:
        return 2 * self.sites

    def qubit_index(self, site: int, spin: str) -> int:
        if not 1 <= site <= self.sites:
            raise ValueError(f"site {site} out of range 1..{self.sites}")
        if spin not in ("up", "down"):
            raise ValueError("spin must be 'up' or 'down'")
        return 2 * (site - 1) + (0 if spin == "up" else 1)

    def local_potential(self, site: int, spin: str) -> float:
        lam = self.lambda_up if spin == "up" else self.lambda_down
        m = self.center_up if spin == "up" else self.center_down
        sig = self.sigma_up if spin == "up" else self.sigma_down
        return -lam * np.exp(-0.5 * (site - m) ** 2 / sig**2)


def paper_hubbard_instance() -> HubbardSpec:
    """The 1x5 chain studied in the experiments: J=2, U=3, Gaussian potential
    centred on site 3 with strengths (3, 0.1) and unit widths."""
    return HubbardSpec(
        sites=5, tunnelling=2.0, onsite=3.0,
        lambda_up=3.0, lambda_down=0.1,
        center_up=3.0, center_down=3.0,
        sigma_up=1.0, sigma_down=1.0,
    )


def hubbard_fermion_operator(spec: HubbardSpec) -> FermionOperator:
    op = FermionOperator(spec.modes)
    J, U = spec.tunnelling, spec.onsite
    for site in range(1, spec.sites):
        for spin in ("up", "down"):
            a = spec.qubit_index(site, spin)
            b = spec.qubit_index(site + 1, spin)
            op.add_term(((a, True), (b, False)), -J)
            op.add_term(((b, True), (a, False)), -J)
    for site in range(1, spec.sites + 1):
        up = spec.qubit_index(site, "up")
        dn = spec.qubit_index(site, "down")
        if U != 0.0:
            op.add_term(((up, True), (up, False), (dn, True), (dn, False)), U)
        for spin, q in (("up", up), ("down", dn)):
            eps = spec.local_potential(site, spin)
            if eps != 0.0:
                op.add_term(((q, True), (q, False)), eps)
    return op


def hubbard_1d(spec: HubbardSpec) -> PauliSum:
    """Qubit Hamiltonian of the 1D Hubbard chain via Jordan-Wigner."""
    return jordan_wigner(hubbard_fermion_operator(spec))


def number_pauli(n: int, q: int) -> PauliSum:
    """Occupation of qubit q: (I - Z_q)/2."""
    out = PauliSum(n)
    out.add_term(PauliString("I" * n), 0.5)
    letters = ["I"] * n
    letters[q] = "Z"
    out.add_term(PauliString("".join(letters)), -0.5)
    return out


def charge_spin_density(state: QuantumState, spec: HubbardSpec, site: int) -> tuple[float, float]:
    """(rho_plus, rho_minus) = <n_up> +- <n_down> at the given site (1-based)."""
    from .paulis import expectation

    q_up = spec.qubit_index(site, "up")
    q_dn = spec.qubit_index(site, "down")
    n = spec.modes
    occ_up = expectation(number_pauli(n, q_up), state)
    occ_dn = expectation(number_pauli(n, q_dn), state)
    return occ_up + occ_dn, occ_up - occ_dn


def basis_occupation_state(occupied, n: int) -> QuantumState:
    """Computational basis state with |1> exactly at the given orbitals."""
    occupied = list(occupied)
    if len(set(occupied)) != len(occupied):
        raise ValueError("duplicate orbital index")
    if any(not 0 <= q < n for q in occupied):
        raise ValueError("orbital index out of range")
    bits = ["0"] * n
    for q in occupied:
        bits[q] = "1"
    return QuantumState.from_bits("".join(bits))


# ---------------------------------------------------------------------------
# Occupation-sector restriction


def hamming_sector_indices(n: int, n_occ: int) -> np.ndarray:
    """Indices of computational basis states with Hamming weight n_occ,
    ascending. Basis index of a bitstring follows big-endian order."""
    if not 0 <= n_occ <= n:
        raise ValueError(f"occupation {n_occ} outside 0..{n}")
    idx = [sum(1 << (n - 1 - q) for q in positions)
           for positions in combinations(range(n), n_occ)]
    return np.array(sorted(idx), dtype=np.int64)


def occupation_project(H: PauliSum, n_occ: int) -> tuple[np.ndarray, np.ndarray]:
    """Restriction of H to the span of Hamming-weight-n_occ basis states.

    Returns (dense block of dimension C(n, n_occ), basis index list). Built
    term by term from the action of Pauli strings on basis states, so the
    full 2^n dense matrix is never formed.
    """
    n = H.n
    idx = hamming_sector_indices(n, n_occ)
    pos = {int(b): k for k, b in enumerate(idx)}
    dim = len(idx)
    block = np.zeros((dim, dim), dtype=complex)
    for ps, coeff in H.terms.items():
        flip = 0
        for q, ch in enumerate(ps.letters):
            if ch in ("X", "Y"):
                flip |= 1 << (n - 1 - q)
        for k, b in enumerate(idx):
            b = int(b)
            target = b ^ flip
            kt = pos.get(target)
            if kt is None:
                continue
            phase = 1 + 0j
            for q, ch in enumerate(ps.letters):
                bit = (b >> (n - 1 - q)) & 1
                if ch == "Z":
                    phase *= 1 - 2 * bit
                elif ch == "Y":
                    # Y|0> = i|1>, Y|1> = -i|0>
                    phase *= 1j if bit == 0 else -1j
            block[kt, k] += coeff * phase
    herm_err = np.max(np.abs(block - block.conj().T))
    if herm_err > 1e-9:
        raise AssertionError(f"restricted block not Hermitian ({herm_err:.2e})")
    return block, idx


def sector_ground_energy(H: PauliSum, n_occ: int) -> float:
    block, _ = occupation_project(H, n_occ)
    return float(np.linalg.eigvalsh(block)[0])


def chemical_potentials(H: PauliSum, n_occ_max: int) -> dict[int, float]:
    """mu(N) = E(N) - E(N-1) from restricted ground energies, N = 1..n_occ_max."""
    energies = {k: sector_ground_energy(H, k) for k in range(n_occ_max + 1)}
    return {k: energies[k] - energies[k - 1] for k in range(1, n_occ_max + 1)}


# ---------------------------------------------------------------------------
# QUBO / max-cut diagonal Hamiltonians


@dataclass
class QuboSpec:
    """Weighted graph for a QUBO Hamiltonian; edges are stored symmetrically
    (both orientations present with the same weight)."""

    n: int
    edges: dict[tuple[int, int], float]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need n >= 1")
        sym: dict[tuple[int, int], float] = {}
        for (p, q), w in self.edges.items():
            if p == q:
                raise ValueError(f"self-loop edge ({p},{q})")
            if not (0 <= p < self.n and 0 <= q < self.n):
                raise ValueError(f"edge ({p},{q}) out of range")
            if (q, p) in sym and not np.isclose(sym[(q, p)], w):
                raise ValueError(f"conflicting weights for edge ({p},{q})")
            sym[(p, q)] = float(w)
            sym[(q, p)] = float(w)
        self.edges = sym

    def neighbors(self, p: int) -> list[tuple[int, float]]:
        return [(q, w) for (a, q), w in self.edges.items() if a == p]


def qubo_complete(n: int) -> QuboSpec:
    return QuboSpec(n, {(p, q): 1.0 for p in range(n) for q in range(p + 1, n)})


def qubo_random_maxcut(n: int, seed, edge_prob: float = 0.5) -> QuboSpec:
    """Erdos-Renyi unit-weight graph, resampled until at least one edge."""
    rng = as_rng(seed)
    while True:
        edges = {}
        for p in range(n):
            for q in range(p + 1, n):
                if rng.random() < edge_prob:
                    edges[(p, q)] = 1.0
        if edges:
            return QuboSpec(n, edges)


def qubo_hamiltonian(spec: QuboSpec) -> PauliSum:
    """(1/2) sum over ordered pairs of w_pq Z_p Z_q, minus (n/2) identity.

    With unit weights on the complete graph this is the standard
    (1/2) sum_{p != q} Z_p Z_q - (n/2) I form.
    """
    H = PauliSum(spec.n)
    H.add_term(PauliString("I" * spec.n), -spec.n / 2.0)
    for (p, q), w in spec.edges.items():
        if p < q:
            letters = ["I"] * spec.n
            letters[p] = "Z"
            letters[q] = "Z"
            H.add_term(PauliString("".join(letters)), w)  # 1/2 * both orientations
    return H


def qubo_diagonal(spec: QuboSpec) -> np.ndarray:
    """Diagonal of the QUBO Hamiltonian over all 2^n bitstrings."""
    n = spec.n
    z = 1 - 2 * ((np.arange(1 << n)[:, None] >> (n - 1 - np.arange(n))) & 1)
    diag = np.full(1 << n, -n / 2.0)
    for (p, q), w in spec.edges.items():
        if p < q:
            diag += w * z[:, p] * z[:, q]
    return diag


def qubo_ground_set(spec: QuboSpec, tol: float = 1e-9) -> tuple[np.ndarray, float]:
    """All minimizing bitstring indices plus the ground energy, by enumeration."""
    diag = qubo_diagonal(spec)
    e0 = float(np.min(diag))
    return np.flatnonzero(diag <= e0 + tol), e0


# ---------------------------------------------------------------------------
# Spectrum guard for Hamiltonian-evolution inputs


@dataclass
class SpectrumGuard:
    """Rescaling H -> s*H so that the spectrum fits inside (-pi, pi).

    Energies measured on the rescaled operator divide by `scale` to return
    to the original units.
    """

    scale: float

    def to_phase(self, energy: float) -> float:
        return energy * self.scale

    def to_energy(self, phase: float) -> float:
        return phase / self.scale


def spectrum_guard(H: PauliSum, margin: float = 0.1) -> tuple[PauliSum, SpectrumGuard]:
    """Rescale by (pi - margin)/one_norm whenever the one-norm reaches pi."""
    a1 = H.one_norm
    if a1 < np.pi:
        return H, SpectrumGuard(1.0)
    s = (np.pi - margin) / a1
    return H * s, SpectrumGuard(s)
