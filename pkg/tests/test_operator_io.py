import numpy as np
import pytest

from gsprep.fermions import FermionOperator
from gsprep.operator_io import (
    OperatorFormatError,
    dumps_operator,
    load_operator_file,
    loads_operator,
    save_operator_file,
)
from gsprep.paulis import PauliString, PauliSum


def test_parse_simple_pauli_sum():
    op = loads_operator("qubits 2\n0.5 XX\n0.5 ZI\n")
    assert isinstance(op, PauliSum)
    assert op.num_terms == 2
    assert op.terms[PauliString("XX")] == 0.5


def test_parse_fermion_line():
    op = loads_operator("modes 2\n-2.0 1^ 0\n")
    assert isinstance(op, FermionOperator)
    assert op.terms[((1, True), (0, False))] == -2.0


def test_comments_and_blank_lines():
    text = "# header comment\nqubits 1\n\n1.0 Z  # trailing\n"
    op = loads_operator(text)
    assert op.terms[PauliString("Z")] == 1.0


def test_syntax_error_reports_line_number():
    with pytest.raises(OperatorFormatError) as err:
        loads_operator("qubits 2\n0.5 XX\nbogus line here\n")
    assert err.value.line_no == 3


def test_length_mismatch_rejected():
    with pytest.raises(OperatorFormatError):
        loads_operator("qubits 3\n1.0 XX\n")


def test_mode_out_of_range_rejected():
    with pytest.raises(OperatorFormatError):
        loads_operator("modes 2\n1.0 5^ 0\n")


def test_pauli_roundtrip_random_sums(tmp_path):
    rng = np.random.default_rng(17)
    for trial in range(3):
        n = int(rng.integers(2, 7))
        H = PauliSum(n)
        while H.num_terms < 50:
            letters = "".join(rng.choice(list("IXYZ"), size=n))
            H.add_term(PauliString(letters), float(rng.normal()))
        path = tmp_path / f"op{trial}.txt"
        save_operator_file(path, H)
        H2 = load_operator_file(path)
        assert H2.n == H.n
        assert set(H2.terms) == set(H.terms)
        for ps, c in H.terms.items():
            assert H2.terms[ps] == c  # repr round-trip is exact


def test_fermion_roundtrip(tmp_path):
    op = FermionOperator(3)
    op.add_term(((2, True), (0, False)), -2.0)
    op.add_term(((0, True), (2, False)), -2.0)
    op.add_term(((1, True), (1, False)), 0.25)
    path = tmp_path / "fermi.txt"
    save_operator_file(path, op)
    op2 = load_operator_file(path)
    assert op2.terms == op.terms


def test_constant_term_serializes():
    # identity-only line for a fermionic constant
    op = FermionOperator(1)
    op.add_term((), 1.25)
    text = dumps_operator(op)
    op2 = loads_operator(text)
    assert op2.terms[()] == 1.25
