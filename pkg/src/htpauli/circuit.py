"""Circuit intermediate representation, builders and the QASM emitter.

Ops are recorded in time order.  Single-qubit Clifford layer gates keep
their labels (matrix-order words over H and S); everything else is stored
as primitive gates drawn from {h, s, sdg, cz, cx, rz, measure}, which is
exactly the emitted QASM 2.0 gate set.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .f2la import asbits
from .hwgraph import Graph
from .pauli import CliffordLayer

_DAGGER = {"h": "h", "s": "sdg", "sdg": "s"}


@dataclass(frozen=True)
class Op:
    kind: str                      # cliff | h | s | sdg | cz | cx | rz | measure
    qubits: tuple[int, ...]
    param: float | None = None
    label: str | None = None
    adjoint: bool = False


@dataclass
class Circuit:
    n: int
    ops: list[Op] = field(default_factory=list)

    def _check(self, *qubits):
        for q in qubits:
            if not (0 <= q < self.n):
                raise ValueError(f"qubit index {q} out of range")

    def cliff(self, label: str, q: int, adjoint: bool = False):
        self._check(q)
        self.ops.append(Op("cliff", (q,), label=label, adjoint=adjoint))

    def h(self, q: int):
        self._check(q)
        self.ops.append(Op("h", (q,)))

    def cz(self, i: int, j: int):
        self._check(i, j)
        if i == j:
            raise ValueError("cz needs two distinct qubits")
        self.ops.append(Op("cz", (min(i, j), max(i, j))))

    def cx(self, ctrl: int, tgt: int):
        self._check(ctrl, tgt)
        if ctrl == tgt:
            raise ValueError("cx needs two distinct qubits")
        self.ops.append(Op("cx", (ctrl, tgt)))

    def rz(self, q: int, angle: float):
        self._check(q)
        self.ops.append(Op("rz", (q,), param=float(angle)))

    def measure(self, q: int):
        self._check(q)
        self.ops.append(Op("measure", (q,)))

    def extend(self, other: "Circuit"):
        if other.n != self.n:
            raise ValueError("qubit counts differ")
        self.ops.extend(other.ops)


def cliff_word(label: str, adjoint: bool = False) -> list[str]:
    """Primitive time-ordered gate names realizing a Clifford label."""
    if label == "I":
        return []
    if adjoint:
        return [_DAGGER[ch.lower()] for ch in label]
    return [ch.lower() for ch in reversed(label)]


def expand_primitives(circ: Circuit) -> Circuit:
    """Replace label gates by their primitive words."""
    out = Circuit(circ.n)
    for op in circ.ops:
        if op.kind == "cliff":
            for name in cliff_word(op.label, op.adjoint):
                out.ops.append(Op(name, op.qubits))
        else:
            out.ops.append(op)
    return out


def inverse(circ: Circuit) -> Circuit:
    """Exact inverse circuit (primitive gates, reversed and daggered)."""
    out = Circuit(circ.n)
    for op in reversed(expand_primitives(circ).ops):
        if op.kind == "measure":
            raise ValueError("cannot invert a circuit containing measurements")
        if op.kind in _DAGGER:
            out.ops.append(Op(_DAGGER[op.kind], op.qubits))
        elif op.kind == "rz":
            out.ops.append(Op("rz", op.qubits, param=-op.param))
        else:                      # cz, cx are self-inverse
            out.ops.append(op)
    return out


def graph_prep(graph: Graph) -> Circuit:
    """Preparation circuit of the graph state: H everywhere, then CZ per edge."""
    c = Circuit(graph.n)
    for q in range(graph.n):
        c.h(q)
    for i, j in graph.edges:
        c.cz(i, j)
    return c


def diag_circuit(layer: CliffordLayer, graph: Graph) -> Circuit:
    """Measurement-basis change: layer gates, CZ per edge, then H everywhere.

    The CZ gates are mutually commuting and self-inverse, so this realizes
    the layer followed by the inverse of the graph-state preparation.
    """
    if layer.n != graph.n:
        raise ValueError("layer and graph sizes differ")
    c = Circuit(graph.n)
    for q, gate in enumerate(layer.gates):
        if gate.label != "I":
            c.cliff(gate.label, q)
    for i, j in graph.edges:
        c.cz(i, j)
    for q in range(graph.n):
        c.h(q)
    return c


def exp_pauli_z(s, coefficient: float) -> Circuit:
    """Circuit for exp(i * coefficient * Z^s) via a CNOT tree.

    The parity is folded into the highest-index support qubit, rotated with
    rz(-2 * coefficient), and unfolded.
    """
    bits = asbits(np.atleast_1d(s))
    support = [int(i) for i in np.flatnonzero(bits)]
    if not support:
        raise ValueError("exponent vector must be non-zero")
    n = bits.shape[0]
    target = support[-1]
    c = Circuit(n)
    for q in support[:-1]:
        c.cx(q, target)
    c.rz(target, -2.0 * coefficient)
    for q in reversed(support[:-1]):
        c.cx(q, target)
    return c


def _collection_circuit_key(col):
    edges = col.template.edges if col.template is not None else None
    labels = col.layer.labels() if col.layer is not None else None
    return (edges, labels)


def trotter_step(grouping, steps_k: int) -> Circuit:
    """First-order Trotter circuit approximating exp(i * O) with k steps.

    Every collection must carry a readout circuit (template and layer) and
    diagonal targets; adjacent inverse/forward basis changes between equal
    circuits are elided.
    """
    if steps_k < 1:
        raise ValueError("step count must be positive")
    cols = grouping.collections
    for col in cols:
        if col.template is None or col.layer is None:
            raise ValueError("collection without a readout circuit cannot be exponentiated")
        if any(m.target is None for m in col.members):
            raise ValueError("collection member lacks a diagonal target")
    n = grouping.n
    segments = []                  # (tag, collection index) with tag in {U, E, Udag}
    for _ in range(steps_k):
        for i in range(len(cols)):
            segments += [("U", i), ("E", i), ("Udag", i)]
    out = Circuit(n)
    idx = 0
    while idx < len(segments):
        tag, i = segments[idx]
        if (tag == "Udag" and idx + 1 < len(segments)
                and segments[idx + 1][0] == "U"
                and _collection_circuit_key(cols[i]) == _collection_circuit_key(cols[segments[idx + 1][1]])):
            idx += 2
            continue
        col = cols[i]
        basis = diag_circuit(col.layer, col.template)
        if tag == "U":
            out.extend(basis)
        elif tag == "Udag":
            out.extend(inverse(basis))
        else:
            for member in col.members:
                angle = member.target.sign * member.term.coeff / steps_k
                out.extend(exp_pauli_z(member.target.k, angle))
        idx += 1
    return out


def emit_qasm(circ: Circuit) -> str:
    """Serialize to QASM 2.0 with gates {h, s, sdg, cz, cx, rz, measure}."""
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{circ.n}];"]
    if any(op.kind == "measure" for op in circ.ops):
        lines.append(f"creg c[{circ.n}];")
    for op in expand_primitives(circ).ops:
        if op.kind in ("h", "s", "sdg"):
            lines.append(f"{op.kind} q[{op.qubits[0]}];")
        elif op.kind in ("cz", "cx"):
            lines.append(f"{op.kind} q[{op.qubits[0]}],q[{op.qubits[1]}];")
        elif op.kind == "rz":
            lines.append(f"rz({op.param!r}) q[{op.qubits[0]}];")
        elif op.kind == "measure":
            q = op.qubits[0]
            lines.append(f"measure q[{q}] -> c[{q}];")
        else:
            raise ValueError(f"unexpected op kind {op.kind}")
    return "\n".join(lines) + "\n"
