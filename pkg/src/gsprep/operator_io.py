"""Text format for qubit and fermionic operators.

Header line is "qubits N" or "modes N". Every following non-comment line is
one term: a coefficient, whitespace, then either N Pauli letters or
fermionic ladder tokens ("3^" creates mode 3, "3" annihilates it).
Comments start with '#'. Files are UTF-8 with LF line endings.
"""
from __future__ import annotations

from pathlib import Path

from .fermions import FermionOperator
from .paulis import PauliString, PauliSum


class OperatorFormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _parse_coeff(token: str, line_no: int) -> complex:
    token = token.replace("−", "-")  # unicode minus
    try:
        return complex(token)
    except ValueError:
        raise OperatorFormatError(line_no, f"bad coefficient {token!r}") from None


def loads_operator(text: str):
    """Parse operator text into a PauliSum or FermionOperator."""
    lines = text.split("\n")
    header = None
    header_no = 0
    body: list[tuple[int, str]] = []
    for i, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            header = line
            header_no = i
        else:
            body.append((i, line))
    if header is None:
        raise OperatorFormatError(0, "empty file")
    parts = header.split()
    if len(parts) != 2 or parts[0] not in ("qubits", "modes"):
        raise OperatorFormatError(header_no, f"bad header {header!r}")
    try:
        n = int(parts[1])
    except ValueError:
        raise OperatorFormatError(header_no, f"bad count {parts[1]!r}") from None
    if n < 1:
        raise OperatorFormatError(header_no, "count must be positive")

    if parts[0] == "qubits":
        out = PauliSum(n)
        for line_no, line in body:
            fields = line.split()
            if len(fields) != 2:
                raise OperatorFormatError(line_no, "expected 'coeff letters'")
            coeff = _parse_coeff(fields[0], line_no)
            if abs(coeff.imag) > 1e-12:
                raise OperatorFormatError(line_no, "Pauli coefficients must be real")
            letters = fields[1]
            if len(letters) != n:
                raise OperatorFormatError(
                    line_no, f"string length {len(letters)} does not match qubits {n}"
                )
            try:
                ps = PauliString(letters)
            except ValueError as exc:
                raise OperatorFormatError(line_no, str(exc)) from None
            out.add_term(ps, coeff.real)
        return out

    op = FermionOperator(n)
    for line_no, line in body:
        fields = line.split()
        if len(fields) < 1:
            raise OperatorFormatError(line_no, "empty term")
        coeff = _parse_coeff(fields[0], line_no)
        seq = []
        for tok in fields[1:]:
            dag = tok.endswith("^")
            num = tok[:-1] if dag else tok
            try:
                mode = int(num)
            except ValueError:
                raise OperatorFormatError(line_no, f"bad ladder token {tok!r}") from None
            if not 0 <= mode < n:
                raise OperatorFormatError(line_no, f"mode {mode} out of range 0..{n - 1}")
            seq.append((mode, dag))
        op.add_term(tuple(seq), coeff)
    return op


def dumps_operator(op) -> str:
    lines = []
    if isinstance(op, PauliSum):
        lines.append(f"qubits {op.n}")
        for ps, c in op:
            lines.append(f"{c!r} {ps.letters}")
    elif isinstance(op, FermionOperator):
        lines.append(f"modes {op.modes}")
        for seq, c in sorted(op.terms.items()):
            toks = " ".join(f"{m}^" if d else f"{m}" for m, d in seq)
            if abs(c.imag) <= 1e-300:
                coeff = repr(c.real)
            else:
                coeff = repr(c).strip("()")
            lines.append(f"{coeff} {toks}".rstrip())
    else:
        raise TypeError(f"cannot serialize {type(op).__name__}")
    return "\n".join(lines) + "\n"


def load_operator_file(path):
    text = Path(path).read_text(encoding="utf-8")
    return loads_operator(text)


def save_operator_file(path, op) -> None:
    Path(path).write_text(dumps_operator(op), encoding="utf-8", newline="\n")
