import numpy as np
import pytest

from conftest import random_commuting_set, random_graph
from htpauli import oracle
from htpauli.circuit import (Circuit, diag_circuit, emit_qasm, exp_pauli_z,
                             graph_prep, inverse, trotter_step)
from htpauli.f2la import bitvec
from htpauli.grouping import grouping_from_json, grouping_to_json, ht_group, sorted_insertion
from htpauli.hwgraph import Graph, preset
from htpauli.pauli import CliffordLayer, PauliTerm, parse_pauli
from htpauli.synth import solve_exact


def op_names(circ):
    return [(op.kind, op.qubits) for op in circ.ops]


def test_graph_prep_structure():
    c = graph_prep(Graph.empty(3))
    assert op_names(c) == [("h", (0,)), ("h", (1,)), ("h", (2,))]
    c = graph_prep(Graph.from_edges(2, [(0, 1)]))
    assert op_names(c) == [("h", (0,)), ("h", (1,)), ("cz", (0, 1))]
    c = graph_prep(preset("linear:3"))
    assert op_names(c) == [("h", (0,)), ("h", (1,)), ("h", (2,)),
                           ("cz", (0, 1)), ("cz", (1, 2))]


def test_graph_prep_builds_graph_state():
    g = Graph.from_edges(2, [(0, 1)])
    state = oracle.apply_circuit(np.array([1, 0, 0, 0], dtype=complex), graph_prep(g))
    want = np.array([1, 1, 1, -1], dtype=complex) / 2.0
    assert np.allclose(state, want)


def test_diag_circuit_trivial_layer_is_hadamards():
    c = diag_circuit(CliffordLayer.identity(2), Graph.empty(2))
    assert op_names(c) == [("h", (0,)), ("h", (1,))]


def test_diag_circuit_unitary_factorization():
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(1, 5))
        g = random_graph(n, rng)
        labels = rng.choice(["I", "H", "S", "HSH", "HS", "SH"], n)
        layer = CliffordLayer.from_labels(labels)
        u = oracle.circuit_unitary(diag_circuit(layer, g))
        layer_only = diag_circuit(layer, Graph.empty(n))
        # strip the trailing hadamards to isolate the layer
        layer_circ = Circuit(n)
        layer_circ.ops = [op for op in layer_only.ops if op.kind == "cliff"]
        u_layer = oracle.circuit_unitary(layer_circ)
        u_graph = oracle.circuit_unitary(graph_prep(g))
        assert np.allclose(u, u_graph.conj().T @ u_layer, atol=1e-12)


def test_diag_circuit_maps_solved_paulis(h4_ht):
    for col in h4_ht.collections:
        circ = diag_circuit(col.layer, col.template)
        for m in col.members[:4]:
            assert oracle.conjugate_check(circ, m.term.op, m.target)


def test_exp_pauli_z_single_qubit():
    c = exp_pauli_z([0, 1, 0], 0.4)
    assert op_names(c) == [("rz", (1,))]
    assert c.ops[0].param == pytest.approx(-0.8)


def test_exp_pauli_z_cnot_tree_structure():
    # s = (1, 1, 0, 1): fold qubits 1 and 2 into qubit 4, rotate, unfold
    c = exp_pauli_z([1, 1, 0, 1], 0.3)
    assert op_names(c) == [("cx", (0, 3)), ("cx", (1, 3)), ("rz", (3,)),
                           ("cx", (1, 3)), ("cx", (0, 3))]


def test_exp_pauli_z_rejects_identity():
    with pytest.raises(ValueError):
        exp_pauli_z([0, 0], 0.1)


@pytest.mark.parametrize("n,c", [(1, 0.37), (3, 0.37), (4, -1.1)])
def test_exp_pauli_z_matches_analytic(n, c):
    rng = np.random.default_rng(n)
    s = np.zeros(n, dtype=np.uint8)
    while not s.any():
        s = rng.integers(0, 2, n).astype(np.uint8)
    u = oracle.circuit_unitary(exp_pauli_z(s, c))
    z_op = parse_pauli("".join("Z" if b else "I" for b in s))
    analytic = oracle.expm_hermitian(c * oracle.pauli_dense(z_op))
    assert np.max(np.abs(u - analytic)) < 1e-10


def test_inverse_undoes_circuit():
    rng = np.random.default_rng(9)
    g = random_graph(3, rng)
    layer = CliffordLayer.from_labels(["HS", "SH", "S"])
    circ = diag_circuit(layer, g)
    u = oracle.circuit_unitary(circ)
    u_inv = oracle.circuit_unitary(inverse(circ))
    assert np.allclose(u_inv @ u, np.eye(8), atol=1e-12)


def test_trotter_single_z_collection():
    terms = [PauliTerm(parse_pauli("ZII"), 0.7)]
    g = sorted_insertion(terms, "qwc")
    circ = trotter_step(g, 4)
    kinds = [op.kind for op in circ.ops]
    assert kinds.count("rz") == 4
    u = oracle.circuit_unitary(circ)
    analytic = oracle.expm_hermitian(0.7 * oracle.pauli_dense(terms[0].op))
    phase = u[0, 0] / analytic[0, 0]
    assert np.allclose(u, phase * analytic, atol=1e-10)


def test_trotter_elides_adjacent_basis_changes():
    terms = [PauliTerm(parse_pauli("XX"), 0.3), PauliTerm(parse_pauli("YY"), 0.2)]
    g = ht_group(terms, preset("linear:2"))
    assert len(g.collections) == 1
    one = trotter_step(g, 1)
    two = trotter_step(g, 2)
    basis_len = len(diag_circuit(g.collections[0].layer, g.collections[0].template).ops)
    exp_len = len(one.ops) - 2 * basis_len
    # repeated steps add only the exponential block, not U U^dagger pairs
    assert len(two.ops) == len(one.ops) + exp_len


def test_trotter_requires_circuits(h4):
    g = sorted_insertion(h4.terms[:10], "gc")
    with pytest.raises(ValueError):
        trotter_step(g, 2)


def test_trotter_first_order_convergence():
    rng = np.random.default_rng(10)
    ops = random_commuting_set(3, 2, rng)
    terms = [PauliTerm(ops[0], 0.9), PauliTerm(ops[1], 0.4),
             PauliTerm(parse_pauli("XII"), 0.6), PauliTerm(parse_pauli("IZY"), 0.5)]
    g = sorted_insertion(terms, "qwc")
    dense = sum(t.coeff * oracle.pauli_dense(t.op) for t in terms)
    target = oracle.expm_hermitian(dense)

    def error(k):
        u = oracle.circuit_unitary(trotter_step(g, k))
        phase = np.vdot(target.ravel(), u.ravel())
        phase /= abs(phase)
        return np.max(np.abs(u - phase * target))

    errs = [error(k) for k in (1, 2, 4, 8)]
    assert errs == sorted(errs, reverse=True)
    assert errs[1] / errs[2] == pytest.approx(2.0, abs=0.5)
    assert errs[2] / errs[3] == pytest.approx(2.0, abs=0.5)


def test_emit_qasm_empty_and_single():
    c = Circuit(1)
    text = emit_qasm(c)
    assert text.splitlines() == ['OPENQASM 2.0;', 'include "qelib1.inc";', "qreg q[1];"]
    c.h(0)
    assert emit_qasm(c).splitlines()[-1] == "h q[0];"


def test_emit_qasm_expands_clifford_words():
    c = Circuit(1)
    c.cliff("HS", 0)
    assert emit_qasm(c).splitlines()[-2:] == ["s q[0];", "h q[0];"]
    c2 = Circuit(1)
    c2.cliff("HSH", 0)
    assert emit_qasm(c2).splitlines()[-3:] == ["h q[0];", "s q[0];", "h q[0];"]


def test_emit_qasm_measure_adds_creg():
    c = Circuit(2)
    c.h(0)
    c.measure(0)
    lines = emit_qasm(c).splitlines()
    assert "creg c[2];" in lines
    assert lines[-1] == "measure q[0] -> c[0];"


@pytest.mark.parametrize("seed", range(4))
def test_emitted_qasm_reparses_to_same_unitary(seed):
    rng = np.random.default_rng(50 + seed)
    n = 3
    g = random_graph(n, rng)
    layer = CliffordLayer.from_labels(rng.choice(["I", "H", "S", "HSH", "HS", "SH"], n))
    circ = diag_circuit(layer, g)
    circ.extend(exp_pauli_z(np.array([1, 0, 1], dtype=np.uint8), 0.21))
    text = emit_qasm(circ)
    back = oracle.read_qasm(text)
    assert np.allclose(oracle.circuit_unitary(circ), oracle.circuit_unitary(back),
                       atol=1e-12)


def test_grouping_json_round_trip_via_emitter(h4):
    g = sorted_insertion(h4.terms[:25], "qwc")
    assert grouping_to_json(grouping_from_json(grouping_to_json(g))) == grouping_to_json(g)
