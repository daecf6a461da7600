"""Independent ground-truth engine: dense simulation and exhaustive checks.

Everything here is deliberately brute force (dense statevectors and
unitaries up to ten qubits, full enumeration of solver candidate spaces) so
it can vouch for the algebraic fast paths.  Qubit 1 is the most significant
bit of a computational-basis index.
"""
from __future__ import annotations

import re

import numpy as np

from .circuit import Circuit, Op, expand_primitives
from .f2la import asbits
from .pauli import GATE_BY_LABEL, PauliOp, SignedZ
from .synth import ConstraintSystem

MAX_DENSE_QUBITS = 10

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_SDG = _S.conj().T
_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_size(n: int):
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense oracle is limited to {MAX_DENSE_QUBITS} qubits")


def _bits_to_int(bits) -> int:
    """Interpret a bit vector with qubit 1 as the most significant bit."""
    out = 0
    for b in asbits(bits):
        out = (out << 1) | int(b)
    return out


def _parity_of(values: np.ndarray) -> np.ndarray:
    v = values.copy()
    shift = 1
    while shift < 64:
        v ^= v >> shift
        shift <<= 1
    return (v & 1).astype(np.int8)


def product_state(params) -> np.ndarray:
    """Tensor product of single-qubit states U3(theta, phi, lam)|0>.

    The third Euler angle only enters the |1> column of U3, so it drops out
    when acting on |0>.
    """
    params = list(params)
    _check_size(len(params))
    state = np.array([1.0 + 0j])
    for theta, phi, _lam in params:
        single = np.array([np.cos(theta / 2.0),
                           np.exp(1j * phi) * np.sin(theta / 2.0)])
        state = np.kron(state, single)
    return state


def _apply_1q(arr: np.ndarray, u2: np.ndarray, q: int, n: int) -> np.ndarray:
    shape = arr.shape
    batch = arr.reshape((2 ** n, -1))
    a = batch.reshape([2] * n + [batch.shape[1]])
    a = np.moveaxis(a, q, 0)
    a = np.tensordot(u2, a, axes=([1], [0]))
    a = np.moveaxis(a, 0, q)
    return a.reshape(shape)


def _apply_circuit_array(arr: np.ndarray, circ: Circuit) -> np.ndarray:
    n = circ.n
    out = arr.astype(complex).copy()
    for op in expand_primitives(circ).ops:
        if op.kind == "h":
            out = _apply_1q(out, _H, op.qubits[0], n)
        elif op.kind == "s":
            out = _apply_1q(out, _S, op.qubits[0], n)
        elif op.kind == "sdg":
            out = _apply_1q(out, _SDG, op.qubits[0], n)
        elif op.kind == "rz":
            u = np.array([[np.exp(-0.5j * op.param), 0], [0, np.exp(0.5j * op.param)]])
            out = _apply_1q(out, u, op.qubits[0], n)
        elif op.kind in ("cz", "cx"):
            shape = out.shape
            batch = out.reshape((2 ** n, -1))
            a = batch.reshape([2] * n + [batch.shape[1]])
            i, j = op.qubits
            sel = [slice(None)] * (n + 1)
            sel[i] = 1
            if op.kind == "cz":
                sel[j] = 1
                a[tuple(sel)] = -a[tuple(sel)]
            else:
                sel0, sel1 = list(sel), list(sel)
                sel0[j] = 0
                sel1[j] = 1
                tmp = a[tuple(sel0)].copy()
                a[tuple(sel0)] = a[tuple(sel1)]
                a[tuple(sel1)] = tmp
            out = a.reshape(shape)
        elif op.kind == "measure":
            raise ValueError("cannot simulate a measurement as a unitary")
        else:
            raise ValueError(f"unknown op kind {op.kind}")
    return out


def apply_circuit(state: np.ndarray, circ: Circuit) -> np.ndarray:
    _check_size(circ.n)
    if state.shape != (2 ** circ.n,):
        raise ValueError("state dimension mismatch")
    return _apply_circuit_array(state, circ)


def circuit_unitary(circ: Circuit) -> np.ndarray:
    _check_size(circ.n)
    return _apply_circuit_array(np.eye(2 ** circ.n, dtype=complex), circ)


def pauli_dense(p: PauliOp) -> np.ndarray:
    _check_size(p.n)
    out = np.array([[1.0 + 0j]])
    for j in range(p.n):
        out = np.kron(out, _PAULI_1Q[p.factor(j)])
    return out


def _pauli_action(p: PauliOp, psi: np.ndarray) -> np.ndarray:
    """Return P|psi> using bit arithmetic instead of dense matrices."""
    n = p.n
    dim = psi.shape[0]
    r_int = _bits_to_int(p.r)
    s_int = _bits_to_int(p.s)
    idx = np.arange(dim)
    signs = 1.0 - 2.0 * _parity_of((idx ^ r_int) & s_int)
    return (1j ** p.phase_exponent) * signs * psi[idx ^ r_int]


def expectation(state: np.ndarray, terms) -> float:
    """Exact <state| sum_i c_i P_i |state>."""
    total = 0.0 + 0j
    for term in terms:
        total += term.coeff * np.vdot(state, _pauli_action(term.op, state))
    if abs(total.imag) > 1e-9:
        raise ValueError("expectation of a Hermitian observable came out complex")
    return float(total.real)


def variance(state: np.ndarray, terms) -> float:
    """Exact Var[sum c_i P_i] including all cross covariances."""
    phi = np.zeros_like(state, dtype=complex)
    for term in terms:
        phi += term.coeff * _pauli_action(term.op, state)
    mean = np.vdot(state, phi)
    second = np.vdot(phi, phi)
    var = float(second.real - mean.real ** 2)
    return max(var, 0.0)


def conjugate_check(circ: Circuit, p: PauliOp, expected: SignedZ, tol: float = 1e-10) -> bool:
    """True iff U P U† equals expected.sign * Z^expected.k elementwise."""
    _check_size(circ.n)
    u = circuit_unitary(circ)
    pm = pauli_dense(p)
    k_int = _bits_to_int(expected.k)
    idx = np.arange(2 ** circ.n)
    diag = expected.sign * (1.0 - 2.0 * _parity_of(idx & k_int))
    # U P U† = D  <=>  U P = D U
    delta = u @ pm - diag[:, None] * u
    return bool(np.max(np.abs(delta)) < tol)


def expm_hermitian(h: np.ndarray) -> np.ndarray:
    """exp(i H) for Hermitian H via eigendecomposition."""
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


def brute_force_lambda(sys: ConstraintSystem, max_dim: int = 20) -> list[np.ndarray]:
    """All lambda vectors with every per-qubit determinant equal to one.

    Exhaustive enumeration of the 2^d coefficient space; the reference
    oracle for the algebraic solvers.
    """
    d, n = sys.d, sys.n
    if d > max_dim:
        raise ValueError(f"null space dimension {d} too large for enumeration")
    count = 1 << d
    lam = ((np.arange(count)[:, None] >> np.arange(d)[None, :]) & 1).astype(np.uint8)
    a = (lam @ sys.basis) % 2 if d else np.zeros((count, 4 * n), dtype=np.uint8)
    det = (a[:, 0:n] & a[:, 3 * n:4 * n]) ^ (a[:, n:2 * n] & a[:, 2 * n:3 * n])
    good = np.flatnonzero(np.all(det == 1, axis=1))
    return [lam[i] for i in good]


def sampling_tables(state: np.ndarray, grouping) -> list[dict]:
    """Per-collection outcome distributions and member parity masks."""
    from .circuit import diag_circuit  # local import to keep module load light

    if abs(np.linalg.norm(state) - 1.0) > 1e-12:
        raise ValueError("state is not normalized")
    tables = []
    dim = state.shape[0]
    idx = np.arange(dim)
    for col in grouping.collections:
        if col.template is None or col.layer is None:
            raise ValueError("collection without a readout circuit cannot be sampled")
        circ = diag_circuit(col.layer, col.template)
        rotated = apply_circuit(state, circ)
        probs = np.abs(rotated) ** 2
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        members = []
        for m in col.members:
            if m.target is None:
                raise ValueError("collection member lacks a diagonal target")
            k_int = _bits_to_int(m.target.k)
            parities = 1.0 - 2.0 * _parity_of(idx & k_int)
            members.append((m.term.coeff, m.target.sign, parities))
        tables.append({"probs": probs, "members": members})
    return tables


def sample_estimate(state: np.ndarray, grouping, counts, seed: int,
                    tables: list[dict] | None = None) -> float:
    """Monte-Carlo estimate of <O> from multinomial readout samples.

    ``counts`` allocates an integral number of shots to every collection
    (each must receive at least one).  Deterministic for a fixed seed.
    """
    if tables is None:
        tables = sampling_tables(state, grouping)
    counts = np.asarray(counts, dtype=np.int64)
    if counts.shape[0] != len(grouping.collections):
        raise ValueError("one shot count per collection required")
    if np.any(counts < 1):
        raise ValueError("every collection needs at least one shot")
    rng = np.random.default_rng(np.random.PCG64(seed))
    total = 0.0
    for shots, table in zip(counts, tables):
        outcome_counts = rng.multinomial(int(shots), table["probs"])
        hit = np.flatnonzero(outcome_counts)
        weights = outcome_counts[hit] / float(shots)
        for coeff, sign, parities in table["members"]:
            total += coeff * sign * float(np.dot(weights, parities[hit]))
    return total


_QASM_LINE = re.compile(
    r"^(?P<gate>h|s|sdg|cz|cx|rz|measure)\s*(?:\((?P<param>[^)]+)\))?\s*"
    r"q\[(?P<q0>\d+)\]\s*(?:,\s*q\[(?P<q1>\d+)\])?\s*(?:->\s*c\[\d+\])?;$"
)


def read_qasm(text: str) -> Circuit:
    """Parse the QASM subset produced by the emitter back into a Circuit."""
    n = None
    ops: list[Op] = []
    for raw in text.splitlines():
        line = raw.strip()
        if (not line or line.startswith("//") or line.startswith("OPENQASM")
                or line.startswith("include") or line.startswith("creg")):
            continue
        if line.startswith("qreg"):
            n = int(re.search(r"\[(\d+)\]", line).group(1))
            continue
        m = _QASM_LINE.match(line)
        if not m:
            raise ValueError(f"cannot parse QASM line {line!r}")
        gate = m.group("gate")
        q0 = int(m.group("q0"))
        if gate in ("h", "s", "sdg"):
            ops.append(Op(gate, (q0,)))
        elif gate in ("cz", "cx"):
            ops.append(Op(gate, (q0, int(m.group("q1")))))
        elif gate == "rz":
            ops.append(Op("rz", (q0,), param=float(m.group("param"))))
        elif gate == "measure":
            ops.append(Op("measure", (q0,)))
    if n is None:
        raise ValueError("missing qreg declaration")
    circ = Circuit(n)
    circ.ops = ops
    return circ
