"""Exact spectral tools: diagonalization, evolution unitaries, phase handles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .paulis import PauliSum, SizeCapError

DIAG_QUBIT_CAP = 14
DEGENERACY_TOL = 1e-9


def wrap_angle(x):
    """Map angles to the principal range [-pi, pi)."""
    return np.mod(np.asarray(x) + np.pi, 2 * np.pi) - np.pi


@dataclass
class SpectralDecomposition:
    """Full eigensystem of a Hermitian operator, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # orthonormal columns

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def gap(self) -> float:
        """Distance from the ground energy to the first distinct eigenvalue."""
        lam0 = self.eigenvalues[0]
        above = self.eigenvalues[self.eigenvalues > lam0 + DEGENERACY_TOL]
        if len(above) == 0:
            return 0.0
        return float(above[0] - lam0)

    @property
    def ground_degeneracy(self) -> int:
        return int(np.sum(self.eigenvalues <= self.eigenvalues[0] + DEGENERACY_TOL))

    def ground_projector(self) -> np.ndarray:
        V = self.eigenvectors[:, : self.ground_degeneracy]
        return V @ V.conj().T

    def ground_weight(self, state) -> float:
        """tr(Pi rho): weight of a state inside the ground subspace."""
        V = self.eigenvectors[:, : self.ground_degeneracy]
        amp = state.amplitudes if hasattr(state, "amplitudes") else np.asarray(state)
        if amp.ndim == 1:
            return float(np.sum(np.abs(V.conj().T @ amp) ** 2))
        return float(np.real(np.trace(V.conj().T @ amp @ V)))


def diagonalize(H: PauliSum) -> SpectralDecomposition:
    """Dense exact diagonalization; the oracle for everything downstream."""
    if H.n > DIAG_QUBIT_CAP:
        raise SizeCapError(f"n={H.n} exceeds diagonalization cap {DIAG_QUBIT_CAP}")
    vals, vecs = np.linalg.eigh(H.to_dense())
    return SpectralDecomposition(vals, vecs)


def diagonalize_dense(mat: np.ndarray) -> SpectralDecomposition:
    vals, vecs = np.linalg.eigh(mat)
    return SpectralDecomposition(vals, vecs)


class EvolutionHandle:
    """e^{iHt} with exact spectral application, integer powers and phase shifts.

    Wraps an eigensystem (phases in radians, orthonormal vectors) so that
    (e^{-ix} U)^p is available without any matrix recomputation: the handle
    only transforms its phase vector.
    """

    def __init__(self, phases: np.ndarray, vectors: np.ndarray, wrapped: bool = True):
        self.phases = np.asarray(phases, dtype=float)
        self.vectors = vectors
        self.wrapped = wrapped

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def matrix(self) -> np.ndarray:
        return (self.vectors * np.exp(1j * self.phases)) @ self.vectors.conj().T

    def apply(self, vec: np.ndarray) -> np.ndarray:
        coeffs = self.vectors.conj().T @ vec
        return self.vectors @ (np.exp(1j * self.phases) * coeffs)

    def modified(self, shift: float = 0.0, power: int = 1) -> "EvolutionHandle":
        """Handle for (e^{-i shift} U)^power; phases wrap to [-pi, pi)."""
        if power < 1 or power != int(power):
            raise ValueError("power must be a positive integer")
        return EvolutionHandle(wrap_angle(power * (self.phases - shift)), self.vectors)

    def to_eigenbasis(self, amp: np.ndarray) -> np.ndarray:
        return self.vectors.conj().T @ amp

    def from_eigenbasis(self, coeffs: np.ndarray) -> np.ndarray:
        return self.vectors @ coeffs


def evolution_unitary(H: PauliSum, t: float = 1.0) -> EvolutionHandle:
    """Exact e^{iHt} from the spectral decomposition of H."""
    dec = diagonalize(H)
    return EvolutionHandle(dec.eigenvalues * t, dec.eigenvectors, wrapped=False)


def evolution_from_decomposition(dec: SpectralDecomposition, t: float = 1.0) -> EvolutionHandle:
    return EvolutionHandle(dec.eigenvalues * t, dec.eigenvectors, wrapped=False)


def unitary_eigensystem(U: np.ndarray, tol: float = 1e-9) -> EvolutionHandle:
    """Eigenphases and orthonormal eigenvectors of a unitary matrix.

    Uses the complex Schur form, which is diagonal for normal matrices, so
    the returned vectors are orthonormal to machine precision.
    """
    T, Z = scipy.linalg.schur(U, output="complex")
    off = np.max(np.abs(T - np.diag(np.diag(T))))
    if off > tol:
        raise ValueError(f"matrix is not normal (off-diagonal Schur residue {off:.2e})")
    phases = np.angle(np.diag(T))
    return EvolutionHandle(phases, Z)
