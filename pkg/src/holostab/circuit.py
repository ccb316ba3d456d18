"""Clifford circuits over {R^x, R^zz, S} with macro expansion, Pauli propagation,
a fault-tolerance audit and an exact logical-action oracle.

Primitive gates are quarter-turn Pauli rotations ``exp(-i * angle_sign * pi/4 * G)``:

======  ===============  ==========
kind    generator G      angle_sign
======  ===============  ==========
RX q    X_q              +1
RZZ a b Z_a Z_b          -1
SG q    Z_q (the S gate) +1
======  ===============  ==========

Text formats use 1-based qubit indices; everything internal is 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .code import ErrorSet, StabilizerCode, build_decoder, codeword_basis, syndrome
from .pauli import PauliOp, commutes, conjugate_rotation, group_membership, mul
from .statevec import MAX_DENSE_QUBITS, apply_rotation

__all__ = [
    "Gate",
    "Circuit",
    "CircuitFormatError",
    "LeakageError",
    "AuditReport",
    "parse_circuit",
    "format_circuit",
    "load_circuit",
    "expand_macros",
    "propagate_pauli",
    "current_generators",
    "audit_fault_tolerance",
    "logical_action_oracle",
]

PRIMITIVES = ("RX", "RZZ", "SG")
MACROS = ("H", "X", "CNOT")
_ARITY = {"RX": 1, "RZZ": 2, "SG": 1, "H": 1, "X": 1, "CNOT": 2}
_MNEMONIC = {"RX": "RX", "RZZ": "RZZ", "SG": "S", "H": "H", "X": "X", "CNOT": "CNOT"}
_NON_CLIFFORD = {"T", "TDG", "T_DAG", "PI8", "PI/8", "RZ"}


class CircuitFormatError(ValueError):
    pass


class LeakageError(RuntimeError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    n: int

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} qubit(s)")
        for q in self.qubits:
            if not 0 <= q < self.n:
                raise ValueError(f"qubit index {q + 1} out of range 1..{self.n}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} needs distinct qubits")

    @property
    def is_primitive(self) -> bool:
        return self.kind in PRIMITIVES

    @property
    def generator(self) -> PauliOp:
        if self.kind == "RX":
            return PauliOp.single(self.n, self.qubits[0], "X")
        if self.kind == "SG":
            return PauliOp.single(self.n, self.qubits[0], "Z")
        if self.kind == "RZZ":
            return PauliOp.from_sparse(self.n, {self.qubits[0]: "Z", self.qubits[1]: "Z"})
        raise ValueError(f"macro gate {self.kind} has no single generator; expand it first")

    @property
    def angle_sign(self) -> int:
        if not self.is_primitive:
            raise ValueError(f"macro gate {self.kind} has no angle sign; expand it first")
        return -1 if self.kind == "RZZ" else 1

    def __str__(self) -> str:
        return " ".join([_MNEMONIC[self.kind], *(str(q + 1) for q in self.qubits)])


@dataclass(frozen=True)
class Circuit:
    """Gate list in time order: ``gates[0]`` is applied first."""

    n: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if g.n != self.n:
                raise ValueError(f"gate {g} built for n={g.n}, circuit has n={self.n}")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        if other.n != self.n:
            raise ValueError("cannot concatenate circuits of different width")
        return Circuit(self.n, self.gates + other.gates)

    @property
    def is_expanded(self) -> bool:
        return all(g.is_primitive for g in self.gates)


def _expand_gate(g: Gate) -> list[Gate]:
    n = g.n
    if g.kind == "X":
        (q,) = g.qubits
        return [Gate("RX", (q,), n), Gate("RX", (q,), n)]
    if g.kind == "H":
        (q,) = g.qubits
        return [Gate("SG", (q,), n), Gate("RX", (q,), n), Gate("SG", (q,), n)]
    if g.kind == "CNOT":
        c, t = g.qubits
        return [
            Gate("SG", (t,), n), Gate("RX", (t,), n), Gate("SG", (t,), n),
            Gate("SG", (t,), n), Gate("RZZ", (c, t), n),
            Gate("SG", (c,), n), Gate("SG", (t,), n),
            Gate("RX", (t,), n), Gate("SG", (t,), n),
        ]
    return [g]


def expand_macros(circuit: Circuit) -> Circuit:
    """Rewrite H, X and CNOT into primitive rotations (equal up to global phase)."""
    out: list[Gate] = []
    for g in circuit:
        out.extend(_expand_gate(g))
    return Circuit(circuit.n, tuple(out))


def parse_circuit(text: str, n: int, expand: bool = True) -> Circuit:
    """One gate per line (``RX q``, ``RZZ a b``, ``S q``, ``H q``, ``X q``, ``CNOT c t``)."""
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mnem, *args = line.split()
        key = mnem.upper()
        if key in _NON_CLIFFORD:
            raise CircuitFormatError(
                f"line {lineno}: {mnem} is a non-Clifford (pi/8) gate; only Clifford "
                "circuits over RX, RZZ, S can be compiled into gapped holonomic schedules"
            )
        kind = {"S": "SG", "CX": "CNOT"}.get(key, key)
        if kind not in _ARITY:
            raise CircuitFormatError(f"line {lineno}: unknown gate mnemonic {mnem!r}")
        try:
            qubits = tuple(int(a) - 1 for a in args)
            gates.append(Gate(kind, qubits, n))
        except ValueError as exc:
            raise CircuitFormatError(f"line {lineno}: {exc}") from None
    circ = Circuit(n, tuple(gates))
    return expand_macros(circ) if expand else circ


def format_circuit(circuit: Circuit) -> str:
    return "".join(f"{g}\n" for g in circuit)


def load_circuit(path: str | Path, n: int, expand: bool = True) -> Circuit:
    return parse_circuit(Path(path).read_text(encoding="utf-8"), n, expand)


def _require_expanded(circuit: Circuit) -> None:
    if not circuit.is_expanded:
        raise ValueError("circuit contains macro gates; call expand_macros first")


def propagate_pauli(circuit: Circuit, from_index: int, e: PauliOp) -> PauliOp:
    """Conjugate ``e`` (injected after ``from_index`` gates) through the remaining gates."""
    _require_expanded(circuit)
    if e.n != circuit.n:
        raise ValueError(f"error has {e.n} qubits, circuit has {circuit.n}")
    if not 0 <= from_index <= len(circuit):
        raise ValueError(f"injection index {from_index} outside 0..{len(circuit)}")
    for g in circuit.gates[from_index:]:
        e = conjugate_rotation(g.generator, g.angle_sign, e)
    return e


def current_generators(code: StabilizerCode, circuit: Circuit, upto: int) -> list[PauliOp]:
    """Signed stabilizer generators after the first ``upto`` gates."""
    _require_expanded(circuit)
    gens = list(code.generators)
    for g in circuit.gates[:upto]:
        gens = [conjugate_rotation(g.generator, g.angle_sign, s) for s in gens]
    return gens


@dataclass
class AuditReport:
    """Outcome of the two fault-tolerance checks.

    ``gate_issues`` lists ``(stage, gate text, diagnostic)`` for check (a);
    ``containment_failures`` lists ``(injection index, error, propagated, residue)``
    for check (b).
    """

    n_gates: int
    n_errors: int
    gate_issues: list[tuple[int, str, str]] = field(default_factory=list)
    containment_failures: list[tuple[int, PauliOp, PauliOp, PauliOp]] = field(default_factory=list)

    @property
    def gates_ok(self) -> bool:
        return not self.gate_issues

    @property
    def containment_ok(self) -> bool:
        return not self.containment_failures

    @property
    def ok(self) -> bool:
        return self.gates_ok and self.containment_ok

    def summary(self) -> str:
        lines = [
            f"gate validity: {'pass' if self.gates_ok else 'FAIL'} ({self.n_gates} stages)",
            f"error containment: {'pass' if self.containment_ok else 'FAIL'} "
            f"({self.n_errors} errors x {self.n_gates + 1} injection points)",
        ]
        for stage, gate, why in self.gate_issues:
            lines.append(f"  stage {stage} [{gate}]: {why}")
        for q, e, f, r in self.containment_failures[:20]:
            lines.append(f"  {e.letters} after gate {q} -> {f.label}, residue {r.label} not a stabilizer")
        if len(self.containment_failures) > 20:
            lines.append(f"  ... {len(self.containment_failures) - 20} more")
        return "\n".join(lines)


def audit_fault_tolerance(
    code: StabilizerCode, circuit: Circuit, e_local: ErrorSet | Iterable[PauliOp]
) -> AuditReport:
    """Check (a) every gate generator moves the current code space, and
    (b) every local error injected at any gate boundary stays correctable."""
    _require_expanded(circuit)
    errors = list(e_local)
    rep = AuditReport(len(circuit), len(errors))
    gens = list(code.generators)
    for l, g in enumerate(circuit.gates, 1):
        G = g.generator
        if group_membership(G, gens) is not None:
            rep.gate_issues.append(
                (l, str(g), "generator lies in the current stabilizer group: gate acts trivially")
            )
        elif all(commutes(G, s) for s in gens):
            rep.gate_issues.append(
                (l, str(g), "generator commutes with every current stabilizer but is outside the "
                            "group: it is a logical operator, so the scheme is inapplicable")
            )
        gens = [conjugate_rotation(G, g.angle_sign, s) for s in gens]
    decoder = build_decoder(code)
    for q in range(len(circuit) + 1):
        for e in errors:
            f = propagate_pauli(circuit, q, e)
            residue = mul(decoder.correction(syndrome(code, f)), f)
            if group_membership(residue, code.generators) is None:
                rep.containment_failures.append((q, e, f, residue))
    return rep


def apply_circuit(circuit: Circuit, psi: np.ndarray, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Exact action of ``gates[start:stop]`` on a state or frame."""
    _require_expanded(circuit)
    for g in circuit.gates[start:stop]:
        psi = apply_rotation(g.generator, g.angle_sign, psi)
    return psi


def logical_action_oracle(
    code: StabilizerCode, circuit: Circuit, basis: np.ndarray | None = None, tol: float = 1e-10
) -> np.ndarray:
    """``<basis_i| U_circuit |basis_j>`` by exact gate-by-gate application."""
    if circuit.n != code.n:
        raise ValueError("circuit and code widths differ")
    if code.n > MAX_DENSE_QUBITS:
        raise ValueError(f"oracle limited to n <= {MAX_DENSE_QUBITS}")
    V = codeword_basis(code) if basis is None else basis
    W = apply_circuit(expand_macros(circuit), V)
    M = V.conj().T @ W
    K = M.shape[0]
    dev = float(np.abs(M.conj().T @ M - np.eye(K)).max())
    if dev > tol:
        raise LeakageError(f"circuit leaks out of the code space (unitarity defect {dev:.3g})")
    return M
