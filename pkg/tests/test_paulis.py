import numpy as np
import pytest

from gsprep.paulis import PauliString, PauliSum, SizeCapError, expectation
from gsprep.states import QuantumState, random_pure_state


def test_single_z_dense():
    H = PauliSum(1, {PauliString("Z"): 1.0})
    assert np.allclose(H.to_dense(), np.diag([1.0, -1.0]))


def test_xx_yy_dense_hand_expansion():
    # 0.5*(XX + YY) = antidiagonal coupling of |01> and |10> with entry 1
    H = PauliSum(2, {PauliString("XX"): 0.5, PauliString("YY"): 0.5})
    M = H.to_dense()
    expect = np.zeros((4, 4), dtype=complex)
    expect[1, 2] = expect[2, 1] = 1.0
    assert np.allclose(M, expect)
    assert M[0, 3] == 0.0 and M[3, 0] == 0.0


def test_empty_sum_is_zero_matrix():
    H = PauliSum(2)
    assert np.allclose(H.to_dense(), np.zeros((4, 4)))


def test_dense_cap():
    with pytest.raises(SizeCapError):
        PauliSum(17, {PauliString("I" * 17): 1.0}).to_dense()


def test_term_merging_and_one_norm():
    H = PauliSum(1)
    H.add_term(PauliString("X"), 0.75)
    H.add_term(PauliString("X"), 0.25)
    H.add_term(PauliString("Z"), -0.5)
    assert H.num_terms == 2
    assert H.terms[PauliString("X")] == 1.0
    assert H.one_norm == 1.5


@pytest.mark.parametrize("letters", ["X", "Y", "Z", "XY", "ZZY", "IXYZ"])
def test_string_apply_matches_dense(letters):
    rng = np.random.default_rng(7)
    ps = PauliString(letters)
    v = rng.normal(size=1 << ps.n) + 1j * rng.normal(size=1 << ps.n)
    assert np.allclose(ps.apply(v), ps.to_dense() @ v)


def test_string_product_phases():
    phase, out = PauliString("X") * PauliString("Y")
    assert phase == 1j and out.letters == "Z"
    phase, out = PauliString("Y") * PauliString("X")
    assert phase == -1j and out.letters == "Z"


def test_expectation_z_on_zero_state():
    H = PauliSum(1, {PauliString("Z"): 1.0})
    assert expectation(H, QuantumState.from_bits("0")) == pytest.approx(1.0)


def test_expectation_z_on_maximally_mixed():
    H = PauliSum(1, {PauliString("Z"): 1.0})
    rho = QuantumState(np.eye(2) / 2, kind="mixed")
    assert expectation(H, rho) == pytest.approx(0.0, abs=1e-12)


def test_expectation_singlet():
    # XX + YY + ZZ on (|01> - |10|)/sqrt(2) gives -3
    H = PauliSum(2, {PauliString("XX"): 1.0, PauliString("YY"): 1.0, PauliString("ZZ"): 1.0})
    singlet = np.zeros(4, dtype=complex)
    singlet[1] = 1 / np.sqrt(2)
    singlet[2] = -1 / np.sqrt(2)
    assert expectation(H, QuantumState(singlet)) == pytest.approx(-3.0, abs=1e-12)


def test_expectation_dimension_mismatch():
    H = PauliSum(2, {PauliString("ZI"): 1.0})
    with pytest.raises(ValueError):
        expectation(H, QuantumState.from_bits("0"))


def test_dense_is_hermitian_property():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        H = PauliSum(n)
        for _ in range(int(rng.integers(1, 8))):
            letters = "".join(rng.choice(list("IXYZ"), size=n))
            H.add_term(PauliString(letters), float(rng.normal()))
        M = H.to_dense()
        assert np.max(np.abs(M - M.conj().T)) < 1e-12


def test_sum_apply_matches_dense_on_random_state():
    rng = np.random.default_rng(11)
    H = PauliSum(3)
    for _ in range(6):
        letters = "".join(rng.choice(list("IXYZ"), size=3))
        H.add_term(PauliString(letters), float(rng.normal()))
    psi = random_pure_state(3, rng)
    assert np.allclose(H.apply(psi.amplitudes), H.to_dense() @ psi.amplitudes)
