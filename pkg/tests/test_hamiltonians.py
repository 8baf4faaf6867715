import numpy as np
import pytest

from gsprep.fermions import fermion_dense, total_number_operator, jordan_wigner
from gsprep.hamiltonians import (
    HeisenbergSpec,
    HubbardSpec,
    basis_occupation_state,
    charge_spin_density,
    chemical_potentials,
    heisenberg_hamiltonian,
    heisenberg_random,
    hubbard_1d,
    hubbard_fermion_operator,
    occupation_project,
    paper_hubbard_instance,
    qubo_complete,
    qubo_diagonal,
    qubo_ground_set,
    qubo_hamiltonian,
    QuboSpec,
    sector_ground_energy,
    spectrum_guard,
)
from gsprep.paulis import PauliString, PauliSum
from gsprep.spectral import diagonalize
from gsprep.states import QuantumState


# ---------------------------------------------------------------------- spin


def test_two_site_uniform_heisenberg_ground_energy():
    spec = HeisenbergSpec(n=2, couplings=[(1.0, 1.0, 1.0)], boundary="open")
    H = heisenberg_hamiltonian(spec)
    assert H.terms[PauliString("XX")] == pytest.approx(0.25)
    dec = diagonalize(H)
    assert dec.eigenvalues[0] == pytest.approx(-0.75)


def test_zero_couplings_give_zero_hamiltonian():
    spec = HeisenbergSpec(n=3, couplings=[(0.0, 0.0, 0.0)] * 2, boundary="open")
    assert heisenberg_hamiltonian(spec).num_terms == 0


def test_heisenberg_random_determinism():
    _, H1 = heisenberg_random(5, seed=123)
    _, H2 = heisenberg_random(5, seed=123)
    assert H1.terms == H2.terms
    _, H3 = heisenberg_random(5, seed=124)
    assert H1.terms != H3.terms


def test_heisenberg_random_one_norm_bound():
    for seed in range(5):
        spec, H = heisenberg_random(6, seed=seed, boundary="periodic")
        n_bonds = len(spec.bonds)
        assert H.one_norm <= 3 * n_bonds * 0.25 + 1e-12


def test_heisenberg_rejects_single_site():
    with pytest.raises(ValueError):
        heisenberg_random(1, seed=0)


def test_heisenberg_global_draw_flag():
    spec, _ = heisenberg_random(4, seed=5, per_bond=False)
    assert all(c == spec.couplings[0] for c in spec.couplings)


# ------------------------------------------------------------------- hubbard


def test_single_site_hubbard_spectrum():
    # No hopping; U=3, eps_up=-3, eps_down=-0.1: eigenvalues {0, -3, -0.1, -0.1}
    spec = HubbardSpec(
        sites=1, tunnelling=7.7, onsite=3.0,
        lambda_up=3.0, lambda_down=0.1, center_up=1.0, center_down=1.0,
    )
    H = hubbard_1d(spec)
    vals = np.sort(np.linalg.eigvalsh(H.to_dense()))
    assert np.allclose(vals, [-3.0, -0.1, -0.1, 0.0], atol=1e-12)


def test_hubbard_commutes_with_total_number():
    spec = HubbardSpec(sites=2, tunnelling=1.5, onsite=2.0, lambda_up=0.7, center_up=1.0)
    H = hubbard_1d(spec).to_dense()
    N = fermion_dense(total_number_operator(4))
    assert np.max(np.abs(H @ N - N @ H)) < 1e-10


def test_hubbard_commutes_with_total_sz():
    spec = HubbardSpec(sites=2, tunnelling=1.0, onsite=3.0)
    H = hubbard_1d(spec).to_dense()
    n = 4
    sz = np.zeros((1 << n, 1 << n), dtype=complex)
    for site in (1, 2):
        for spin, sign in (("up", 0.5), ("down", -0.5)):
            q = spec.qubit_index(site, spin)
            letters = ["I"] * n
            letters[q] = "Z"
            # occupation = (I - Z)/2, S_z contribution sign * occupation
            sz += sign * 0.5 * (np.eye(1 << n) - PauliString("".join(letters)).to_dense())
    assert np.max(np.abs(H @ sz - sz @ H)) < 1e-10


def test_paper_instance_parameters():
    spec = paper_hubbard_instance()
    assert spec.sites == 5 and spec.tunnelling == 2.0 and spec.onsite == 3.0
    assert spec.local_potential(3, "up") == pytest.approx(-3.0)
    assert spec.local_potential(3, "down") == pytest.approx(-0.1)
    # symmetric potential around the centre site
    assert spec.local_potential(1, "up") == pytest.approx(spec.local_potential(5, "up"))
    assert spec.local_potential(2, "down") == pytest.approx(spec.local_potential(4, "down"))


def test_jw_matches_fermionic_matrix_small_hubbard():
    spec = HubbardSpec(sites=2, tunnelling=2.0, onsite=3.0, lambda_up=3.0,
                       center_up=1.5, lambda_down=0.1, center_down=1.5)
    H = hubbard_1d(spec)
    M = fermion_dense(hubbard_fermion_operator(spec))
    assert np.max(np.abs(H.to_dense() - M)) < 1e-10


# ------------------------------------------------- occupation restriction


def test_occupation_zero_block():
    spec = HubbardSpec(sites=2, tunnelling=1.0, onsite=2.0, lambda_up=1.0, center_up=1.0)
    H = hubbard_1d(spec)
    block, idx = occupation_project(H, 0)
    assert block.shape == (1, 1)
    zero = QuantumState.from_bits("0000")
    assert block[0, 0].real == pytest.approx(
        float(np.real(zero.amplitudes.conj() @ H.to_dense() @ zero.amplitudes))
    )


def test_occupation_block_dimension():
    spec = HubbardSpec(sites=2, tunnelling=1.0, onsite=2.0)
    H = hubbard_1d(spec)
    from math import comb

    for k in range(5):
        block, idx = occupation_project(H, k)
        assert block.shape == (comb(4, k), comb(4, k))
        assert len(idx) == comb(4, k)


def test_occupation_rejects_out_of_range():
    spec = HubbardSpec(sites=1, tunnelling=0.0, onsite=1.0)
    with pytest.raises(ValueError):
        occupation_project(hubbard_1d(spec), 3)


def test_sector_energies_match_full_diagonalization():
    # mu(N) from restricted blocks equals mu from number-resolved full spectrum
    spec = HubbardSpec(sites=2, tunnelling=2.0, onsite=3.0, lambda_up=3.0,
                       center_up=1.0, lambda_down=0.1, center_down=1.0)
    H = hubbard_1d(spec)
    Hd = H.to_dense()
    Nd = fermion_dense(total_number_operator(4))
    vals, vecs = np.linalg.eigh(Hd)
    numbers = np.real(np.einsum("ij,jk,ki->i", vecs.conj().T, Nd, vecs))
    for k in range(5):
        sector = vals[np.abs(numbers - k) < 1e-8]
        assert sector_ground_energy(H, k) == pytest.approx(float(np.min(sector)), abs=1e-10)
    mus = chemical_potentials(H, 4)
    assert set(mus) == {1, 2, 3, 4}


# ------------------------------------------------------------------ density


def test_charge_spin_density_on_basis_states():
    spec = HubbardSpec(sites=2, tunnelling=1.0, onsite=1.0)
    up_occupied = basis_occupation_state([spec.qubit_index(1, "up")], 4)
    rp, rm = charge_spin_density(up_occupied, spec, 1)
    assert (rp, rm) == (pytest.approx(1.0), pytest.approx(1.0))
    both = basis_occupation_state(
        [spec.qubit_index(1, "up"), spec.qubit_index(1, "down")], 4
    )
    rp, rm = charge_spin_density(both, spec, 1)
    assert (rp, rm) == (pytest.approx(2.0), pytest.approx(0.0))
    with pytest.raises(ValueError):
        charge_spin_density(both, spec, 3)


def test_basis_occupation_state():
    st = basis_occupation_state({0, 1, 2, 3}, 8)
    assert np.argmax(np.abs(st.amplitudes)) == int("11110000", 2)
    assert np.linalg.norm(st.amplitudes) == pytest.approx(1.0)
    empty = basis_occupation_state([], 3)
    assert empty.amplitudes[0] == 1.0
    with pytest.raises(ValueError):
        basis_occupation_state([1, 1], 4)


# --------------------------------------------------------------------- qubo


def test_qubo_complete_two_qubit_matches_closed_form():
    H = qubo_hamiltonian(qubo_complete(2))
    # (1/2) sum_{p != q} Z_p Z_q - I  ->  Z0 Z1 - I
    vals = np.sort(np.diag(H.to_dense()).real)
    assert np.allclose(vals, [-2.0, -2.0, 0.0, 0.0])


def test_qubo_empty_edges_is_constant():
    H = qubo_hamiltonian(QuboSpec(3, {}))
    assert np.allclose(H.to_dense(), -1.5 * np.eye(8))


def test_qubo_ground_set_complete_graph_is_balanced():
    idx, e0 = qubo_ground_set(qubo_complete(4))
    bits = [bin(i).count("1") for i in idx]
    assert all(b == 2 for b in bits)
    assert len(idx) == 6


def test_qubo_diagonal_matches_dense():
    spec = QuboSpec(3, {(0, 1): 1.0, (1, 2): -0.5})
    H = qubo_hamiltonian(spec)
    assert np.allclose(np.diag(H.to_dense()).real, qubo_diagonal(spec))
    dec = diagonalize(H)
    assert dec.eigenvalues[0] == pytest.approx(qubo_ground_set(spec)[1])


def test_qubo_rejects_self_loop():
    with pytest.raises(ValueError):
        QuboSpec(2, {(1, 1): 1.0})


# -------------------------------------------------------------------- guard


def test_spectrum_guard_small_operator_untouched():
    H = PauliSum(1, {PauliString("Z"): 1.0})
    Hs, guard = spectrum_guard(H)
    assert guard.scale == 1.0
    assert Hs.terms == H.terms


def test_spectrum_guard_rescales_large_operator():
    H = PauliSum(1, {PauliString("Z"): 10.0})
    Hs, guard = spectrum_guard(H)
    assert Hs.one_norm == pytest.approx(np.pi - 0.1)
    assert guard.to_energy(guard.to_phase(3.3)) == pytest.approx(3.3)
    # eigenphases now inside (-pi, pi)
    assert np.max(np.abs(np.linalg.eigvalsh(Hs.to_dense()))) < np.pi
