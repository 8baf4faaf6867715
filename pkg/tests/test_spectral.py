import numpy as np
import pytest

from gsprep.paulis import PauliString, PauliSum
from gsprep.spectral import (
    diagonalize,
    evolution_unitary,
    unitary_eigensystem,
    wrap_angle,
)


def heisenberg2() -> PauliSum:
    return PauliSum(
        2, {PauliString("XX"): 0.25, PauliString("YY"): 0.25, PauliString("ZZ"): 0.25}
    )


def random_pauli_sum(n, terms, seed):
    rng = np.random.default_rng(seed)
    H = PauliSum(n)
    for _ in range(terms):
        letters = "".join(rng.choice(list("IXYZ"), size=n))
        H.add_term(PauliString(letters), float(rng.normal()))
    return H


def test_two_site_heisenberg_spectrum():
    dec = diagonalize(heisenberg2())
    assert dec.eigenvalues[0] == pytest.approx(-0.75)
    assert np.allclose(dec.eigenvalues[1:], 0.25)
    assert dec.gap == pytest.approx(1.0)
    assert dec.ground_degeneracy == 1


def test_single_z_spectrum():
    dec = diagonalize(PauliSum(1, {PauliString("Z"): 1.0}))
    assert np.allclose(dec.eigenvalues, [-1.0, 1.0])
    assert dec.gap == pytest.approx(2.0)


def test_zero_hamiltonian_ground_projector_is_identity():
    dec = diagonalize(PauliSum(2))
    assert np.allclose(dec.eigenvalues, 0.0)
    assert np.allclose(dec.ground_projector(), np.eye(4))


def test_reconstruction_matches_dense():
    H = random_pauli_sum(3, 8, seed=1)
    dec = diagonalize(H)
    M = H.to_dense()
    rebuilt = (dec.eigenvectors * dec.eigenvalues) @ dec.eigenvectors.conj().T
    scale = max(np.linalg.norm(M), 1.0)
    assert np.linalg.norm(rebuilt - M) < 1e-9 * scale


def test_evolution_z_pi_is_minus_identity():
    U = evolution_unitary(PauliSum(1, {PauliString("Z"): 1.0}), t=np.pi)
    assert np.allclose(U.matrix(), -np.eye(2))


def test_evolution_unitarity_and_commutation():
    H = random_pauli_sum(3, 10, seed=2)
    U = evolution_unitary(H)
    M = U.matrix()
    assert np.max(np.abs(M @ M.conj().T - np.eye(8))) < 1e-10
    Hd = H.to_dense()
    assert np.max(np.abs(M @ Hd - Hd @ M)) < 1e-9


def test_modified_phases_are_shifted_powers():
    H = random_pauli_sum(2, 5, seed=3)
    U = evolution_unitary(H)
    x, p = 0.7, 3
    mod = U.modified(shift=x, power=p)
    expect = wrap_angle(p * (U.phases - x))
    assert np.allclose(mod.phases, expect)
    # matrix check: (e^{-ix} U)^p
    M = (np.exp(-1j * x) * U.matrix())
    target = np.linalg.matrix_power(M, p)
    assert np.max(np.abs(mod.matrix() - target)) < 1e-10


def test_unitary_eigensystem_roundtrip():
    H = random_pauli_sum(3, 6, seed=4)
    M = evolution_unitary(H).matrix()
    sys = unitary_eigensystem(M)
    rebuilt = (sys.vectors * np.exp(1j * sys.phases)) @ sys.vectors.conj().T
    assert np.max(np.abs(rebuilt - M)) < 1e-10


def test_unitary_eigensystem_rejects_non_normal():
    with pytest.raises(ValueError):
        unitary_eigensystem(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_degenerate_gap_definition():
    # eigenvalues (0, 0, 1, ...) via Z1 Z2-type construction
    H = PauliSum(2, {PauliString("ZI"): 0.5, PauliString("IZ"): 0.5})
    dec = diagonalize(H)
    assert dec.eigenvalues[0] == pytest.approx(-1.0)
    assert dec.gap == pytest.approx(1.0)  # first distinct eigenvalue is 0
