import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError

from builders import ghz_like_circuit
from catzx.circuit import (
    Circuit,
    Gate,
    QasmError,
    apply_circuit,
    circuit_to_diagram,
    circuit_unitary,
    dense_oracle,
    expand_ccz,
    gen_hidden_shift,
    gen_random_cliffordt,
    parse_qasm,
    to_qasm,
)
from catzx.driver import amplitude
from catzx.graph import TensorSizeError, tensors_close, to_graph_like, to_tensor
from catzx.scalar import ExactScalar

W = cmath.exp(1j * math.pi / 4)
HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_parse_basic_program():
    c = parse_qasm(HEADER + "qreg q[2];\nh q[0];\ncx q[0],q[1];\n")
    assert c.qubits == 2
    assert [(g.name, g.qubits) for g in c.gates] == [("h", (0,)), ("cx", (0, 1))]


@pytest.mark.parametrize(
    "angle,k",
    [("pi/4", 1), ("-pi/4", 7), ("3*pi/4", 3), ("pi", 4), ("0.7853981633974483", 1), ("-pi/2", 6)],
)
def test_parse_angles(angle, k):
    c = parse_qasm(f"qreg q[1]; rz({angle}) q[0];")
    assert c.gates == [Gate(name="rz", qubits=(0,), k=k)]


def test_parse_aliases_registers_and_comments():
    text = HEADER + """
    // two registers are laid out one after the other
    qreg a[2];
    qreg b[1];
    creg c[3];
    u1(pi/2) b[0];
    p(pi/4) a[1];
    barrier a[0], b[0];
    ccz a[0], a[1], b[0];
    pexp_xyz(3*pi/4) a[0], a[1], b[0];
    tdg a[0]; sdg a[1]; s b[0]; t a[0]; x b[0]; z a[1]; cz a[0], b[0];
    """
    c = parse_qasm(text)
    assert c.qubits == 3
    assert c.gates[0] == Gate(name="rz", qubits=(2,), k=2)
    assert c.gates[1] == Gate(name="rz", qubits=(1,), k=1)
    assert c.gates[2].name == "ccz" and c.gates[2].qubits == (0, 1, 2)
    assert c.gates[3] == Gate(name="pexp", qubits=(0, 1, 2), k=3, pauli="XYZ")
    assert [g.name for g in c.gates[4:]] == ["tdg", "sdg", "s", "t", "x", "z", "cz"]
    assert c.t_count() == 1 + 7 + 1 + 2


@pytest.mark.parametrize(
    "text,message",
    [
        ("qreg q[1]; rx(0.3) q[0];", "pi/4"),
        ("qreg q[1]; rx(pi/4) q[0];", "unsupported gate 'rx'"),
        ("qreg q[1]; h r[0];", "unknown register 'r'"),
        ("qreg q[1]; h q[1];", "out of range"),
        ("qreg q[2]; cx q[0];", "acts on 2 qubits"),
        ("qreg q[2]; cx q[0], q[0];", "repeats a qubit"),
        ("qreg q[1]; rz q[0];", "needs an angle"),
        ("qreg q[1]; h(pi) q[0];", "takes no angle"),
        ("qreg q[1]; pexp_zz(pi/4) q[0];", "one of X, Y, Z per qubit"),
        ("qreg q[2]; pexp_zz(pi/2) q[0], q[1];", "odd multiple"),
        ("qreg q[1]; h q[0]", "Expected"),
        ("qreg q[1]; measure q[0] -> c[0];", ""),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(QasmError, match=message) as info:
        parse_qasm(text)
    assert info.value.line >= 1


def test_parse_error_reports_the_line():
    with pytest.raises(QasmError) as info:
        parse_qasm("qreg q[1];\nh q[0];\nfoo q[0];\n")
    assert info.value.line == 3


def test_gate_and_circuit_validation():
    with pytest.raises(ValidationError):
        Gate(name="swap", qubits=(0, 1))
    with pytest.raises(ValidationError):
        Circuit(qubits=1, gates=[Gate(name="h", qubits=(3,))])
    with pytest.raises(ValueError):
        Circuit(qubits=1).add("h", 2)
    assert Gate(name="rz", qubits=(0,), k=-1).k == 7


def test_qasm_text_round_trip():
    c = gen_random_cliffordt(5, 8, seed=4)
    c.add("ccz", 0, 1, 2).add("rz", 3, k=6).add("h", 4).add("cz", 1, 4)
    assert parse_qasm(to_qasm(c)) == c


@pytest.mark.parametrize(
    "gate",
    [
        Gate(name="h", qubits=(0,)),
        Gate(name="x", qubits=(1,)),
        Gate(name="t", qubits=(0,)),
        Gate(name="sdg", qubits=(1,)),
        Gate(name="rz", qubits=(0,), k=5),
        Gate(name="cx", qubits=(1, 0)),
        Gate(name="cz", qubits=(0, 1)),
        Gate(name="pexp", qubits=(0, 1), k=1, pauli="ZZ"),
        Gate(name="pexp", qubits=(0, 1), k=3, pauli="XY"),
        Gate(name="pexp", qubits=(1,), k=7, pauli="Y"),
    ],
)
def test_each_gate_translates_to_its_matrix(gate):
    c = Circuit(qubits=2, gates=[gate])
    assert tensors_close(to_tensor(circuit_to_diagram(c)), circuit_unitary(c))


def test_ccz_expansion_matches_the_dense_gate():
    c = Circuit(qubits=3)
    c.add("ccz", 0, 1, 2)
    expanded = Circuit(qubits=3, gates=expand_ccz(0, 1, 2))
    assert sum(g.name in ("t", "tdg") for g in expanded.gates) == 7
    assert np.allclose(circuit_unitary(expanded), circuit_unitary(c))
    d = circuit_to_diagram(c, "111", "111")
    assert d.tcount() == 7
    assert amplitude(d).amplitude == ExactScalar.from_int(-1)


@pytest.mark.parametrize("spec", ["0", "1", "+", "-"])
def test_product_states_are_normalised(spec):
    c = Circuit(qubits=1)
    for out in "01+-":
        assert complex(to_tensor(circuit_to_diagram(c, spec, out))) == pytest.approx(dense_oracle(c, spec, out))


def test_translation_examples():
    cx = Circuit(qubits=2).add("cx", 0, 1)
    assert complex(to_tensor(circuit_to_diagram(cx, "00", "00"))) == pytest.approx(1.0)
    t = Circuit(qubits=1).add("t", 0)
    assert dense_oracle(t, "+", "+") == pytest.approx((1 + W) / 2)
    cz = Circuit(qubits=2).add("cz", 0, 1)
    assert dense_oracle(cz, "++", "++") == pytest.approx(0.5)
    zz = Circuit(qubits=2).add("pexp", 0, 1, k=1, pauli="ZZ")
    value = complex(to_tensor(circuit_to_diagram(zz, "++", "++")))
    assert abs(value) == pytest.approx(math.cos(math.pi / 8))
    assert value == pytest.approx(dense_oracle(zz, "++", "++"))


def test_open_circuit_tensor_matches_unitary():
    c = ghz_like_circuit()
    d = circuit_to_diagram(c)
    assert tensors_close(to_tensor(d), circuit_unitary(c))
    assert tensors_close(to_tensor(to_graph_like(d)), circuit_unitary(c))


@given(seed=st.integers(0, 10_000), t=st.integers(1, 2))
def test_random_pauli_exponentials_translate(seed, t):
    c = gen_random_cliffordt(4, t, seed)
    d = circuit_to_diagram(c, "0+1-", "+0-1")
    assert complex(to_tensor(d, max_spiders=64)) == pytest.approx(dense_oracle(c, "0+1-", "+0-1"), abs=1e-9)


def test_spec_validation():
    c = Circuit(qubits=2)
    with pytest.raises(ValueError, match="spec"):
        circuit_to_diagram(c, "0", "00")
    with pytest.raises(ValueError, match="spec"):
        circuit_to_diagram(c, "0a", "00")


def test_random_cliffordt_shape():
    c = gen_random_cliffordt(20, 43, seed=7)
    assert len(c.gates) == 43 and c.t_count() == 43
    assert all(g.name == "pexp" and 2 <= len(g.qubits) <= 4 and g.k % 2 == 1 for g in c.gates)
    assert gen_random_cliffordt(20, 43, seed=7) == c
    assert len(gen_random_cliffordt(4, 1, seed=0).gates) == 1
    with pytest.raises(ValueError):
        gen_random_cliffordt(3, 1, seed=0)


def test_hidden_shift_shape():
    c, shift = gen_hidden_shift(20, 16, seed=3)
    assert c.t_count() == 112
    assert len(shift) == 20 and set(shift) <= {"0", "1"}
    assert {g.name for g in c.gates} <= {"h", "z", "cz", "ccz"}
    assert gen_hidden_shift(20, 16, seed=3) == (c, shift)


@pytest.mark.parametrize("qubits,ccz,seed", [(6, 2, 0), (6, 4, 1), (8, 2, 5), (4, 0, 2)])
def test_hidden_shift_is_deterministic(qubits, ccz, seed):
    c, shift = gen_hidden_shift(qubits, ccz, seed)
    zeros = "0" * qubits
    assert abs(dense_oracle(c, zeros, shift)) == pytest.approx(1.0)
    other = ("1" if shift[0] == "0" else "0") + shift[1:]
    assert abs(dense_oracle(c, zeros, other)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("qubits,ccz", [(5, 2), (6, 3), (4, 2), (6, -2)])
def test_hidden_shift_rejects_bad_sizes(qubits, ccz):
    with pytest.raises(ValueError):
        gen_hidden_shift(qubits, ccz, seed=0)


def test_dense_oracle_size_guard():
    with pytest.raises(TensorSizeError):
        apply_circuit(Circuit(qubits=15), np.zeros((2,) * 15))
