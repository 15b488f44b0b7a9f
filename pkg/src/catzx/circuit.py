"""Clifford+T circuits: gate IR, a QASM subset, translation to ZX and a dense oracle.

Phases are integers k meaning k*pi/4.  ``pexp`` is the exponentiated Pauli
U = P_+ + w^k P_-, with P_+- the projectors onto the +-1 eigenspaces of the
Pauli string; it lowers to one phase gadget with phase k*pi/4.

Random generators use numpy's PCG64 bit generator seeded with the given seed.
"""

import logging
import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pyparsing as pp
from pydantic import BaseModel, Field, ValidationError, model_validator

from .graph import Diagram, EdgeType, TensorSizeError, VertexType, toggle_edge

logger = logging.getLogger(__name__)

# Z-phase gates and their phase in units of pi/4
_PHASE_GATES = {"z": 4, "s": 2, "sdg": 6, "t": 1, "tdg": 7}
_ARITY = {"h": 1, "x": 1, "z": 1, "s": 1, "sdg": 1, "t": 1, "tdg": 1, "rz": 1, "cx": 2, "cz": 2, "ccz": 3}
_ANGLE_GATES = {"rz", "u1", "p"}
SPEC_CHARS = "01+-"
MAX_ORACLE_QUBITS = 14


class QasmError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{message} (line {line}, col {col})" if line else message)
        self.line = line
        self.col = col


class Gate(BaseModel):
    name: str = Field(..., description="h, x, z, s, sdg, t, tdg, rz, cx, cz, ccz or pexp")
    qubits: Tuple[int, ...]
    k: int = Field(0, description="Phase in units of pi/4 for rz and pexp")
    pauli: str = Field("", description="One of X, Y, Z per qubit for pexp")

    @model_validator(mode="after")
    def check_shape(self) -> "Gate":
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"Gate {self.name} repeats a qubit: {self.qubits}")
        if self.name == "pexp":
            if not self.qubits or len(self.pauli) != len(self.qubits) or set(self.pauli) - set("XYZ"):
                raise ValueError(f"pexp needs one of X, Y, Z per qubit, got '{self.pauli}' on {self.qubits}")
            if self.k % 2 == 0:
                raise ValueError(f"pexp phase must be an odd multiple of pi/4, got {self.k}")
        elif self.name in _ARITY:
            if len(self.qubits) != _ARITY[self.name]:
                raise ValueError(f"Gate {self.name} acts on {_ARITY[self.name]} qubits, got {len(self.qubits)}")
        else:
            raise ValueError(f"Unsupported gate '{self.name}'")
        self.k %= 8
        return self


class Circuit(BaseModel):
    qubits: int = Field(..., ge=0)
    gates: List[Gate] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_indices(self) -> "Circuit":
        for gate in self.gates:
            if any(q < 0 or q >= self.qubits for q in gate.qubits):
                raise ValueError(f"Gate {gate.name} on {gate.qubits} is outside {self.qubits} qubits")
        return self

    def add(self, name: str, *qubits: int, k: int = 0, pauli: str = "") -> "Circuit":
        if any(q < 0 or q >= self.qubits for q in qubits):
            raise ValueError(f"Gate {name} on {qubits} is outside {self.qubits} qubits")
        self.gates.append(Gate(name=name, qubits=tuple(qubits), k=k, pauli=pauli))
        return self

    def t_count(self) -> int:
        total = 0
        for g in self.gates:
            if g.name in ("t", "tdg") or (g.name == "rz" and g.k % 2) or g.name == "pexp":
                total += 1
            elif g.name == "ccz":
                total += 7
        return total


# ----- QASM -----


def _angle_to_k(value: Fraction, s: str, loc: int) -> int:
    k = value * 4
    if k.denominator != 1:
        raise pp.ParseFatalException(s, loc, f"angle {value}*pi is not a multiple of pi/4")
    return int(k)


def _pi_angle(s: str, loc: int, toks: pp.ParseResults) -> int:
    sign = -1 if toks.get("sign") == "-" else 1
    num = toks.get("num", 1)
    den = toks.get("den", 1)
    if den == 0:
        raise pp.ParseFatalException(s, loc, "division by zero in angle")
    return _angle_to_k(Fraction(sign * num, den), s, loc)


def _float_angle(s: str, loc: int, toks: pp.ParseResults) -> int:
    k = float(toks[0]) / (math.pi / 4)
    if abs(k - round(k)) > 1e-9:
        raise pp.ParseFatalException(s, loc, f"angle {toks[0]} is not a multiple of pi/4")
    return int(round(k))


def _build_grammar() -> pp.ParserElement:
    lpar, rpar, lbra, rbra, semi, comma = map(pp.Suppress, "()[];,")
    integer = pp.pyparsing_common.integer
    cname = pp.Word(pp.alphas + "_", pp.alphanums + "_")

    pi_angle = (
        pp.Optional(pp.one_of("+ -")("sign"))
        + pp.Optional(integer("num") + pp.Suppress("*"))
        + pp.Suppress(pp.CaselessKeyword("pi"))
        + pp.Optional(pp.Suppress("/") + integer("den"))
    ).set_parse_action(_pi_angle)
    float_angle = pp.pyparsing_common.fnumber.copy()
    angle = pi_angle | float_angle.set_parse_action(_float_angle)

    qarg = pp.Group(cname("reg") + lbra + integer("index") + rbra)
    header = pp.Suppress(pp.Keyword("OPENQASM")) + pp.pyparsing_common.fnumber + semi
    include = pp.Suppress(pp.Keyword("include")) + pp.QuotedString('"') + semi
    qreg = pp.Group(pp.Keyword("qreg")("kind") + cname("reg") + lbra + integer("size") + rbra + semi)
    creg = pp.Suppress(pp.Keyword("creg") + cname + lbra + integer + rbra + semi)
    barrier = pp.Suppress(pp.Keyword("barrier") + pp.DelimitedList(qarg | cname) + semi)
    gate = pp.Group(
        pp.Located(cname("name"))("located")
        + pp.Optional(lpar + pp.Group(angle)("angle") + rpar)
        + pp.Group(qarg + (comma + qarg)[...])("args")
        + semi
    )
    program = pp.Optional(header) + include[...] + (qreg | creg | barrier | gate)[...]
    program.ignore(pp.cpp_style_comment)
    return program


_GRAMMAR = _build_grammar()


def _gate_from_tokens(text: str, tok: pp.ParseResults, registers: Dict[str, Tuple[int, int]]) -> Gate:
    loc, name_tokens, _ = tok["located"]
    name = str(name_tokens[0]).lower()
    qubits = []
    for arg in tok["args"]:
        if arg["reg"] not in registers:
            raise pp.ParseFatalException(text, loc, f"unknown register '{arg['reg']}'")
        offset, size = registers[arg["reg"]]
        if arg["index"] >= size:
            raise pp.ParseFatalException(text, loc, f"index {arg['index']} out of range for {arg['reg']}[{size}]")
        qubits.append(offset + arg["index"])
    has_angle = "angle" in tok
    if name.startswith("pexp_"):
        if not has_angle:
            raise pp.ParseFatalException(text, loc, f"{name} needs an angle")
        kind, pauli = "pexp", name[len("pexp_"):].upper()
    elif name in _ANGLE_GATES:
        if not has_angle:
            raise pp.ParseFatalException(text, loc, f"{name} needs an angle")
        kind, pauli = "rz", ""
    elif name in _ARITY and name != "rz":
        if has_angle:
            raise pp.ParseFatalException(text, loc, f"{name} takes no angle")
        kind, pauli = name, ""
    else:
        raise pp.ParseFatalException(text, loc, f"unsupported gate '{name}'")
    try:
        return Gate(name=kind, qubits=tuple(qubits), k=int(tok["angle"][0]) if has_angle else 0, pauli=pauli)
    except ValidationError as e:
        raise pp.ParseFatalException(text, loc, e.errors()[0]["msg"]) from e


def parse_qasm(text: str) -> Circuit:
    registers: Dict[str, Tuple[int, int]] = {}
    gates: List[Gate] = []
    try:
        parsed = _GRAMMAR.parse_string(text, parse_all=True)
        for tok in parsed:
            if not isinstance(tok, pp.ParseResults):
                continue
            if tok.get("kind") == "qreg":
                registers[tok["reg"]] = (sum(size for _, size in registers.values()), tok["size"])
            else:
                gates.append(_gate_from_tokens(text, tok, registers))
    except pp.ParseBaseException as e:
        raise QasmError(e.msg, e.lineno, e.col) from e
    return Circuit(qubits=sum(size for _, size in registers.values()), gates=gates)


def _angle_text(k: int) -> str:
    return f"{k}*pi/4"


def to_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.qubits}];"]
    for g in c.gates:
        args = ",".join(f"q[{q}]" for q in g.qubits)
        if g.name == "pexp":
            lines.append(f"pexp_{g.pauli.lower()}({_angle_text(g.k)}) {args};")
        elif g.name == "rz":
            lines.append(f"rz({_angle_text(g.k)}) {args};")
        else:
            lines.append(f"{g.name} {args};")
    return "\n".join(lines) + "\n"


# ----- translation -----


def expand_ccz(a: int, b: int, c: int) -> List[Gate]:
    """CCZ as 7 T/T-dagger gates and CNOTs."""
    seq = [
        ("t", a), ("t", b), ("t", c),
        ("cx", a, b), ("tdg", b), ("cx", a, b),
        ("cx", a, c), ("tdg", c), ("cx", a, c),
        ("cx", b, c), ("tdg", c), ("cx", b, c),
        ("cx", a, c), ("cx", b, c), ("t", c), ("cx", b, c), ("cx", a, c),
    ]
    return [Gate(name=str(s[0]), qubits=tuple(int(q) for q in s[1:])) for s in seq]


def _basis_change(p: str, before: bool) -> List[str]:
    if p == "X":
        return ["h"]
    if p == "Y":
        return ["sdg", "h"] if before else ["h", "s"]
    return []


class _Builder:
    """Appends spiders wire by wire; a pending Hadamard is carried until the next vertex."""

    def __init__(self, d: Diagram, starts: Sequence[int]):
        self.d = d
        self.frontier = list(starts)
        self.pending = [EdgeType.PLAIN] * len(starts)

    def attach(self, q: int, kind: VertexType, phase: int = 0) -> int:
        v = self.d.add_vertex(kind, phase)
        self.d.add_edge(self.frontier[q], v, self.pending[q])
        self.frontier[q] = v
        self.pending[q] = EdgeType.PLAIN
        return v

    def close(self, q: int, v: int) -> None:
        self.d.add_edge(self.frontier[q], v, self.pending[q])

    def gate(self, g: Gate) -> None:
        d = self.d
        name, qs = g.name, g.qubits
        if name == "h":
            self.pending[qs[0]] = toggle_edge(self.pending[qs[0]])
        elif name == "x":
            self.attach(qs[0], VertexType.X, 4)
        elif name in _PHASE_GATES:
            self.attach(qs[0], VertexType.Z, _PHASE_GATES[name])
        elif name == "rz":
            self.attach(qs[0], VertexType.Z, g.k)
        elif name == "cx":
            a = self.attach(qs[0], VertexType.Z)
            b = self.attach(qs[1], VertexType.X)
            d.add_edge(a, b, EdgeType.PLAIN)
            d.scale_sqrt2(1)
        elif name == "cz":
            a = self.attach(qs[0], VertexType.Z)
            b = self.attach(qs[1], VertexType.Z)
            d.add_edge(a, b, EdgeType.HADAMARD)
            d.scale_sqrt2(1)
        elif name == "ccz":
            for sub in expand_ccz(*qs):
                self.gate(sub)
        elif name == "pexp":
            self.phase_gadget(g)
        else:
            raise ValueError(f"Unsupported gate '{name}'")

    def phase_gadget(self, g: Gate) -> None:
        d = self.d
        for q, p in zip(g.qubits, g.pauli):
            for name in _basis_change(p, before=True):
                self.gate(Gate(name=name, qubits=(q,)))
        hub = d.add_vertex(VertexType.Z)
        for q in g.qubits:
            d.add_edge(self.attach(q, VertexType.Z), hub, EdgeType.HADAMARD)
        leaf = d.add_vertex(VertexType.Z, g.k)
        d.add_edge(hub, leaf, EdgeType.HADAMARD)
        d.scale_sqrt2(len(g.qubits) - 1)
        for q, p in zip(g.qubits, g.pauli):
            for name in _basis_change(p, before=False):
                self.gate(Gate(name=name, qubits=(q,)))


def _check_spec(spec: Optional[str], qubits: int, what: str) -> None:
    if spec is None:
        return
    if len(spec) != qubits or set(spec) - set(SPEC_CHARS):
        raise ValueError(f"{what} spec '{spec}' must be {qubits} characters over {{0,1,+,-}}")


def _product_vertex(d: Diagram, ch: str) -> int:
    """|0>, |1>, |+>, |-> (or their effects) as a normalised arity-1 spider."""
    kind = VertexType.X if ch in "01" else VertexType.Z
    phase = 4 if ch in "1-" else 0
    d.scale_sqrt2(-1)
    return d.add_vertex(kind, phase)


def circuit_to_diagram(c: Circuit, input_spec: Optional[str] = None, output_spec: Optional[str] = None) -> Diagram:
    """ZX-diagram of the circuit; a missing spec leaves that side as open boundaries."""
    _check_spec(input_spec, c.qubits, "input")
    _check_spec(output_spec, c.qubits, "output")
    d = Diagram()
    starts = []
    for q in range(c.qubits):
        if input_spec is None:
            v = d.add_vertex(VertexType.BOUNDARY)
            d.inputs.append(v)
        else:
            v = _product_vertex(d, input_spec[q])
        starts.append(v)
    builder = _Builder(d, starts)
    for g in c.gates:
        builder.gate(g)
    for q in range(c.qubits):
        if output_spec is None:
            v = d.add_vertex(VertexType.BOUNDARY)
            d.outputs.append(v)
        else:
            v = _product_vertex(d, output_spec[q])
        builder.close(q, v)
    return d


# ----- generators -----


def gen_random_cliffordt(qubits: int, t: int, seed: int) -> Circuit:
    """t random Pauli exponentials of weight 2..4, each with an odd phase."""
    if qubits < 4:
        raise ValueError(f"Random Clifford+T circuits need at least 4 qubits, got {qubits}")
    if t < 1:
        raise ValueError(f"T-count must be positive, got {t}")
    rng = np.random.Generator(np.random.PCG64(seed))
    c = Circuit(qubits=qubits)
    for _ in range(t):
        weight = int(rng.integers(2, 5))
        support = sorted(int(q) for q in rng.choice(qubits, size=weight, replace=False))
        pauli = "".join(str(p) for p in rng.choice(list("XYZ"), size=weight))
        k = int(rng.choice([1, 3, 5, 7]))
        c.add("pexp", *support, k=k, pauli=pauli)
    return c


def _bent_terms(m: int, ccz_count: int, rng: np.random.Generator) -> List[Tuple[str, Tuple[int, ...]]]:
    """Cubic part g(y) of the bent function as CCZ, CZ and Z terms on an m-qubit register."""
    terms: List[Tuple[str, Tuple[int, ...]]] = []
    for _ in range(ccz_count // 2):
        terms.append(("ccz", tuple(sorted(int(q) for q in rng.choice(m, size=3, replace=False)))))
    if m >= 2:
        for _ in range(int(rng.integers(0, m + 1))):
            terms.append(("cz", tuple(sorted(int(q) for q in rng.choice(m, size=2, replace=False)))))
    for q in range(m):
        if rng.integers(0, 2):
            terms.append(("z", (q,)))
    return terms


def gen_hidden_shift(qubits: int, ccz_count: int, seed: int) -> Tuple[Circuit, str]:
    """Hidden-shift circuit over {H, Z, CZ, CCZ} mapping |0...0> to |shift>.

    f(x, y) = x.y + g(y) is bent with dual g(u) + u.v; the circuit is
    H^n X^s O_f X^s H^n O_dual H^n with X written as H Z H.
    """
    if qubits < 2 or qubits % 2:
        raise ValueError(f"Hidden-shift circuits need an even qubit count, got {qubits}")
    if ccz_count < 0 or ccz_count % 2:
        raise ValueError(f"ccz_count must be even and non-negative, got {ccz_count}")
    m = qubits // 2
    if ccz_count and m < 3:
        raise ValueError(f"CCZ terms need at least 6 qubits, got {qubits}")
    rng = np.random.Generator(np.random.PCG64(seed))
    shift = [int(b) for b in rng.integers(0, 2, size=qubits)]
    g_terms = _bent_terms(m, ccz_count, rng)
    c = Circuit(qubits=qubits)

    def h_layer() -> None:
        for q in range(qubits):
            c.add("h", q)

    def shift_layer() -> None:
        for q, bit in enumerate(shift):
            if bit:
                c.add("h", q).add("z", q).add("h", q)

    def oracle(offset: int) -> None:
        for i in range(m):
            c.add("cz", i, m + i)
        for name, qs in g_terms:
            c.add(name, *(offset + q for q in qs))

    h_layer()
    shift_layer()
    oracle(m)
    shift_layer()
    h_layer()
    oracle(0)
    h_layer()
    return c, "".join(map(str, shift))


# ----- dense oracle -----

_SQ = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
}


def _phase(k: int) -> complex:
    return complex(np.exp(1j * math.pi * (k % 8) / 4))


def _apply_1q(psi: np.ndarray, m: np.ndarray, q: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(m, psi, axes=([1], [q])), 0, q)


def _apply_diag(psi: np.ndarray, qs: Sequence[int], factor: complex) -> np.ndarray:
    """Multiply the amplitudes with all qs set to 1 by factor."""
    psi = psi.copy()
    index: List = [slice(None)] * psi.ndim
    for q in qs:
        index[q] = 1
    psi[tuple(index)] *= factor
    return psi


def apply_gate(psi: np.ndarray, g: Gate) -> np.ndarray:
    name, qs = g.name, g.qubits
    if name in ("h", "x"):
        return _apply_1q(psi, _SQ[name], qs[0])
    if name in _PHASE_GATES:
        return _apply_diag(psi, qs, _phase(_PHASE_GATES[name]))
    if name == "rz":
        return _apply_diag(psi, qs, _phase(g.k))
    if name in ("cz", "ccz"):
        return _apply_diag(psi, qs, -1)
    if name == "cx":
        psi = psi.copy()
        c, t = qs
        index: List = [slice(None)] * psi.ndim
        index[c] = 1
        sub = psi[tuple(index)]
        t_axis = t - 1 if t > c else t
        psi[tuple(index)] = np.flip(sub, axis=t_axis)
        return psi
    if name == "pexp":
        flipped = psi
        for q, p in zip(qs, g.pauli):
            flipped = _apply_1q(flipped, _SQ[p.lower()], q)
        w = _phase(g.k)
        return (1 + w) / 2 * psi + (1 - w) / 2 * flipped
    raise ValueError(f"Unsupported gate '{name}'")


def _product_state(spec: str) -> np.ndarray:
    vectors = {
        "0": np.array([1, 0], dtype=complex),
        "1": np.array([0, 1], dtype=complex),
        "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
        "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
    }
    psi = np.array(1.0 + 0j)
    for ch in spec:
        psi = np.multiply.outer(psi, vectors[ch])
    return psi


def apply_circuit(c: Circuit, psi: np.ndarray) -> np.ndarray:
    """State vector (one axis per qubit) after the circuit."""
    if c.qubits > MAX_ORACLE_QUBITS:
        raise TensorSizeError(f"{c.qubits} qubits exceed the dense oracle limit of {MAX_ORACLE_QUBITS}")
    for g in c.gates:
        psi = apply_gate(psi, g)
    return psi


def dense_oracle(c: Circuit, input_spec: str, output_spec: str) -> complex:
    """<output_spec| c |input_spec> by direct state-vector simulation."""
    _check_spec(input_spec, c.qubits, "input")
    _check_spec(output_spec, c.qubits, "output")
    psi = apply_circuit(c, _product_state(input_spec))
    bra = _product_state(output_spec)
    return complex(np.vdot(bra, psi))


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Matrix of the circuit with axes (inputs..., outputs...), matching ``to_tensor`` on an open diagram."""
    n = c.qubits
    cols = []
    for basis in range(2 ** n):
        psi = np.zeros(2 ** n, dtype=complex)
        psi[basis] = 1
        cols.append(apply_circuit(c, psi.reshape((2,) * n) if n else psi.reshape(())).reshape(-1))
    return np.array(cols).reshape((2,) * (2 * n))
