import numpy as np
import pytest

from htpauli import oracle
from htpauli.grouping import Collection, GroupedMember, Grouping, sorted_insertion
from htpauli.metrics import (Allocation, counts_from_fractions, heuristic_allocation,
                             optimal_allocation, r_hat, true_r)
from htpauli.pauli import PauliTerm, parse_pauli


def singleton_grouping(strings_coeffs, n):
    cols = [Collection(None, None, [GroupedMember(PauliTerm(parse_pauli(p, n), c))])
            for p, c in strings_coeffs]
    return Grouping("si", n, cols)


def test_r_hat_singletons_is_one():
    g = singleton_grouping([("XI", 0.5), ("ZZ", -1.5), ("YX", 0.25)], 2)
    assert r_hat(g) == pytest.approx(1.0, abs=1e-14)


def test_r_hat_rejects_empty():
    with pytest.raises(ValueError):
        r_hat(Grouping("si", 2, []))


def test_r_hat_exceeds_one_for_real_groups(h4):
    g = sorted_insertion(h4.terms, "qwc")
    assert r_hat(g) > 1.0


def test_r_hat_permutation_invariant(h4_tpb):
    value = r_hat(h4_tpb)
    shuffled = Grouping(h4_tpb.method, h4_tpb.n, list(reversed(h4_tpb.collections)))
    assert r_hat(shuffled) == pytest.approx(value, rel=1e-12)
    flipped = Grouping(h4_tpb.method, h4_tpb.n,
                       [Collection(c.template, c.layer, list(reversed(c.members)))
                        for c in h4_tpb.collections])
    assert r_hat(flipped) == pytest.approx(value, rel=1e-12)


def test_r_hat_on_fixture_subsets(h4_tpb, h4_gc):
    op_tpb = h4_tpb.subset(range(2, 35))
    assert r_hat(op_tpb) == pytest.approx(3.52, abs=0.01)
    op_gc = h4_gc.subset(range(2, 9))
    assert r_hat(op_gc) == pytest.approx(14.41, abs=0.01)


def test_optimal_allocation_uniform():
    alloc = optimal_allocation([2.0, 2.0, 2.0, 2.0])
    assert np.allclose(alloc.fractions, 0.25)


def test_optimal_allocation_rejects_all_zero():
    with pytest.raises(ValueError):
        optimal_allocation([0.0, 0.0])


def test_counts_largest_remainder():
    counts = counts_from_fractions([0.5, 0.3, 0.2], 7)
    assert counts.sum() == 7
    assert counts.tolist() == [4, 2, 1]


@pytest.mark.parametrize("seed", range(6))
def test_optimal_allocation_minimizes_cost(seed):
    """n_i ~ sqrt(Var_i) beats every other grid allocation of the budget."""
    rng = np.random.default_rng(seed)
    variances = rng.uniform(0.1, 4.0, 5)
    budget = 60
    counts = optimal_allocation(variances, budget).counts
    assert counts.sum() == budget

    def cost(alloc):
        return sum(v / max(a, 1e-12) for v, a in zip(variances, alloc))

    best = cost(counts)
    for _ in range(300):
        probe = rng.multinomial(budget, np.full(5, 0.2))
        if (probe > 0).all():
            # integer rounding keeps us within a whisker of the optimum
            assert best <= cost(probe) * (1.0 + 1e-6)


def test_heuristic_singletons_proportional_to_coeff():
    g = singleton_grouping([("XI", 3.0), ("ZZ", -1.0)], 2)
    alloc = heuristic_allocation(g)
    assert np.allclose(alloc.fractions, [0.75, 0.25])


def test_heuristic_identical_collections_uniform():
    terms = [("XX", 0.7), ("YY", 0.7)]
    g = singleton_grouping(terms, 2)
    assert np.allclose(heuristic_allocation(g).fractions, 0.5)


def test_heuristic_three_to_four_ratio():
    cols = [
        Collection(None, None, [GroupedMember(PauliTerm(parse_pauli("ZZ"), 3.0))]),
        Collection(None, None, [GroupedMember(PauliTerm(parse_pauli(p), 1.0))
                                for p in ("ZI", "IZ", "XX", "YY")]),
    ]
    g = Grouping("si", 2, cols)
    alloc = heuristic_allocation(g)
    # sqrt(1*9) : sqrt(4*4) = 3 : 4
    assert alloc.fractions[0] / alloc.fractions[1] == pytest.approx(0.75, rel=1e-12)


def test_true_r_degenerate_flag():
    g = singleton_grouping([("ZI", 1.0), ("IZ", 0.5)], 2)
    state = np.zeros(4, dtype=complex)
    state[0] = 1.0  # |00> is an eigenstate of both terms
    result = true_r(g, state)
    assert result.degenerate and result.value == 1.0


def test_true_r_singletons_is_one(ansatz_state, h4):
    g = singleton_grouping([(t.op.to_string(), t.coeff) for t in h4.terms[:12]], 8)
    result = true_r(g, ansatz_state)
    assert not result.degenerate
    assert result.value == pytest.approx(1.0, abs=1e-12)


def test_true_r_fixture_values(h4_tpb, h4_gc, ansatz_state):
    assert true_r(h4_tpb.subset(range(2, 35)), ansatz_state).value == pytest.approx(3.62, abs=0.02)
    assert true_r(h4_gc.subset(range(2, 9)), ansatz_state).value == pytest.approx(16.23, abs=0.05)


def test_allocation_validation():
    with pytest.raises(ValueError):
        Allocation(np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        Allocation(np.array([-0.2, 1.2]))
