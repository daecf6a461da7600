import numpy as np
import pytest

from htpauli import fixtures, oracle
from htpauli.cli import HamiltonianFile
from htpauli.grouping import grouping_from_json
from htpauli.pauli import PauliOp, commutes


@pytest.fixture(scope="session")
def h4():
    return HamiltonianFile.parse(fixtures.h4_hamiltonian_text())


@pytest.fixture(scope="session")
def h4_tpb():
    return grouping_from_json(fixtures.h4_grouping_json("tpb"))


@pytest.fixture(scope="session")
def h4_gc():
    return grouping_from_json(fixtures.h4_grouping_json("gc"))


@pytest.fixture(scope="session")
def h4_ht():
    return grouping_from_json(fixtures.h4_grouping_json("ht"))


@pytest.fixture(scope="session")
def ansatz_state():
    params = fixtures.h4_ansatz()
    return oracle.product_state(list(zip(params["theta"], params["phi"],
                                         params["lambda"])))


def random_commuting_set(n, m, rng):
    """Up to m pairwise commuting random Paulis on n qubits."""
    ops = []
    tries = 0
    while len(ops) < m and tries < 200:
        tries += 1
        r = rng.integers(0, 2, n).astype(np.uint8)
        s = rng.integers(0, 2, n).astype(np.uint8)
        p = PauliOp(n, r, s)
        if all(commutes(p, q) for q in ops):
            ops.append(p)
    return ops


def random_graph(n, rng, density=0.5):
    from htpauli.hwgraph import Graph
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < density]
    return Graph.from_edges(n, edges)
