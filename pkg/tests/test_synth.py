import itertools

import numpy as np
import pytest

from conftest import random_commuting_set, random_graph
from htpauli import oracle
from htpauli.circuit import diag_circuit
from htpauli.hwgraph import Graph, preset
from htpauli.pauli import CliffordLayer, PauliOp, parse_pauli, parse_signed_z
from htpauli.synth import (QubitClass, SolverSizeError, build_system,
                           diagonalize_target, eq6_holds, extend_system,
                           quick_infeasible, solve_componentwise, solve_cutoff,
                           solve_exact)

EDGE = Graph.from_edges(2, [(0, 1)])


def two_qubit_paulis():
    return [parse_pauli("".join(f)) for f in itertools.product("IXYZ", repeat=2)]


def test_build_system_z_type_trivial():
    g = Graph.empty(3)
    sys = build_system(g, [parse_pauli("ZZI")])
    assert sys.d >= 2 * 3
    assert QubitClass.INFEASIBLE not in sys.classes
    assert solve_exact(g, [parse_pauli("ZZI")]) is not None


def test_build_system_rejects_noncommuting():
    with pytest.raises(ValueError):
        build_system(EDGE, [parse_pauli("XI"), parse_pauli("ZI")])
    with pytest.raises(ValueError):
        build_system(EDGE, [parse_pauli("XXX")])


def test_weight_one_on_edge_infeasible():
    sys = build_system(EDGE, [parse_pauli("XI")])
    assert quick_infeasible(sys)
    assert solve_exact(EDGE, [parse_pauli("XI")]) is None
    assert oracle.brute_force_lambda(sys) == []


def test_xx_on_edge_solvable():
    res = solve_exact(EDGE, [parse_pauli("XX")])
    assert res is not None
    sys = build_system(EDGE, [parse_pauli("XX")])
    assert len(oracle.brute_force_lambda(sys)) > 0


def test_quick_infeasible_sound_on_solvable():
    sys = build_system(EDGE, [parse_pauli("ZZ")])
    assert not quick_infeasible(sys)


def test_two_qubit_edge_classification():
    """I x I and the nine weight-two operators are template-diagonalizable;
    the six weight-one operators are not."""
    solvable = {p.to_string() for p in two_qubit_paulis()
                if solve_exact(EDGE, [p]) is not None}
    assert len(solvable) == 10
    weight_one = {p.to_string() for p in two_qubit_paulis() if p.weight == 1}
    assert len(weight_one) == 6
    assert solvable.isdisjoint(weight_one)


def test_lone_edge_pair_counts():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    bad = sum(1 for f in itertools.product("IXYZ", repeat=4)
              if solve_componentwise(g, [parse_pauli("".join(f))]) is None)
    assert bad == 156


def test_componentwise_agrees_with_exact_on_pairs():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    for f in itertools.product("IXYZ", repeat=4):
        p = parse_pauli("".join(f))
        assert (solve_componentwise(g, [p]) is None) == (solve_exact(g, [p]) is None)


def test_componentwise_singletons_equal_qwc():
    g = Graph.empty(3)
    assert solve_componentwise(g, [parse_pauli("XIZ"), parse_pauli("XZI")]) is not None
    # XIZ and ZIX commute globally but clash qubit-wise, so the edgeless
    # template admits no layer
    assert solve_componentwise(g, [parse_pauli("XIZ"), parse_pauli("ZIX")]) is None
    assert solve_exact(g, [parse_pauli("XIZ"), parse_pauli("ZIX")]) is None


@pytest.mark.parametrize("seed", range(4))
def test_solver_completeness_vs_brute_force(seed):
    rng = np.random.default_rng(500 + seed)
    for _ in range(60):
        n = int(rng.integers(2, 5))
        ops = random_commuting_set(n, int(rng.integers(1, 5)), rng)
        g = random_graph(n, rng)
        sys = build_system(g, ops)
        brute = oracle.brute_force_lambda(sys)
        res = solve_exact(g, ops)
        assert (res is not None) == (len(brute) > 0)
        if quick_infeasible(sys):
            assert not brute
        if res is not None:
            circ = diag_circuit(res.layer, g)
            for p in ops:
                target = diagonalize_target(res, g, p)
                assert oracle.conjugate_check(circ, p, target)


@pytest.mark.parametrize("seed", range(3))
def test_cutoff_full_equals_exact(seed):
    rng = np.random.default_rng(700 + seed)
    for _ in range(40):
        n = int(rng.integers(2, 6))
        ops = random_commuting_set(n, int(rng.integers(1, 4)), rng)
        g = random_graph(n, rng)
        assert (solve_cutoff(g, ops, n) is None) == (solve_exact(g, ops) is None)


def test_cutoff_zero_can_miss_existing_solution():
    # found by brute-force search: solvable, but not within the pinned branch
    ops = [parse_pauli("ZXX"), parse_pauli("ZII")]
    g = Graph.from_edges(3, [(1, 2)])
    assert solve_exact(g, ops) is not None
    assert solve_cutoff(g, ops, 0) is None


def test_cutoff_results_are_sound():
    rng = np.random.default_rng(900)
    for _ in range(60):
        n = int(rng.integers(2, 5))
        ops = random_commuting_set(n, int(rng.integers(1, 4)), rng)
        g = random_graph(n, rng)
        for c in range(n + 1):
            res = solve_cutoff(g, ops, c)
            if res is not None:
                for p in ops:
                    assert eq6_holds(g, res.layer, p)


def test_cutoff_monotone_on_path():
    g = preset("linear:4")
    rng = np.random.default_rng(23)
    for _ in range(80):
        p = PauliOp(4, rng.integers(0, 2, 4), rng.integers(0, 2, 4))
        hits = [solve_cutoff(g, [p], c) is not None for c in range(5)]
        assert hits == sorted(hits)
        assert hits[-1] == (solve_exact(g, [p]) is not None)


def test_six_solution_instance_agrees_both_ways():
    ops = [parse_pauli(s) for s in ("XIXZX", "YXXIY", "ZIZYY")]
    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 3), (2, 4), (3, 4)])
    sys = build_system(g, ops)
    sols = oracle.brute_force_lambda(sys)
    assert len(sols) == 6
    res = solve_exact(g, ops)
    assert res is not None
    assert any(np.array_equal(res.lam, lam) for lam in sols)


def test_extend_system_matches_scratch_build():
    rng = np.random.default_rng(31)
    for _ in range(30):
        n = int(rng.integers(2, 5))
        ops = random_commuting_set(n, 3, rng)
        if len(ops) < 2:
            continue
        g = random_graph(n, rng)
        grown = build_system(g, ops[:1])
        for p in ops[1:]:
            grown = extend_system(grown, p)
        scratch = build_system(g, ops)
        # same null space: every basis vector of one lies in the other
        for v in grown.basis:
            assert not ((scratch.matrix @ v) % 2).any()
        assert grown.d == scratch.d
        assert grown.classes == scratch.classes


def test_size_guard():
    # 13 untouched qubits on an edgeless-plus-edge graph are all general
    # quadrics for a single operator, exceeding the full-enumeration bound
    n = 14
    g = Graph.from_edges(n, [(0, 1)])
    p = parse_pauli("XX" + "I" * (n - 2))
    with pytest.raises(SolverSizeError):
        solve_exact(g, [p])
    # a cutoff sidesteps the guard
    assert solve_cutoff(g, [p], 2) is not None


def test_componentwise_block_sizes():
    """Exhaustive work is bounded by the largest component, not the graph."""
    g = Graph.from_edges(6, [(0, 1), (2, 3)])
    p = parse_pauli("XXYYZI")
    stats = {}
    assert solve_componentwise(g, [p], stats=stats) is not None
    assert stats["blocks"], "solver did not record any case blocks"
    assert max(stats["blocks"]) <= 6 ** 2
    stats_full = {}
    assert solve_exact(g, [p], stats=stats_full) is not None
    assert max(stats_full["blocks"]) > max(stats["blocks"])


def test_diagonalize_target_trivial():
    layer = CliffordLayer.from_labels(["H", "H", "I"])
    g = Graph.empty(3)
    t = diagonalize_target(layer, g, parse_pauli("ZZI"))
    assert t == parse_signed_z("+ZZI")


def test_diagonalize_target_rejects_violations():
    # identity layer leaves ZI with a Z part, which the edgeless template
    # cannot produce
    layer = CliffordLayer.identity(2)
    with pytest.raises(ValueError):
        diagonalize_target(layer, Graph.empty(2), parse_pauli("ZI"))


def test_diagonalize_target_reference_circuit(h4_ht):
    """Third bundled readout circuit; targets as printed in the fixture."""
    col = h4_ht.collections[2]
    g, layer = col.template, col.layer
    assert diagonalize_target(layer, g, parse_pauli("IYYZIYYZ")) == parse_signed_z("+IZZIIZZI")
    assert diagonalize_target(layer, g, parse_pauli("IYYZIXXI")) == parse_signed_z("-IZZIIZII")


@pytest.mark.parametrize("seed", range(3))
def test_diagonalize_target_matches_oracle(seed):
    rng = np.random.default_rng(1100 + seed)
    for _ in range(15):
        n = 4
        ops = random_commuting_set(n, 3, rng)
        g = random_graph(n, rng)
        res = solve_exact(g, ops)
        if res is None:
            continue
        circ = diag_circuit(res.layer, g)
        for p in ops:
            assert oracle.conjugate_check(circ, p, diagonalize_target(res, g, p))
