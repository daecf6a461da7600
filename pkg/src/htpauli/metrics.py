"""Shot-reduction metrics and measurement-budget allocations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .pauli import PauliTerm


@dataclass
class Allocation:
    """Fractions per collection, plus integer shot counts when budgeted."""

    fractions: np.ndarray
    counts: np.ndarray | None = None

    def __post_init__(self):
        f = np.asarray(self.fractions, dtype=float)
        if np.any(f < -1e-15):
            raise ValueError("fractions must be non-negative")
        if abs(float(f.sum()) - 1.0) > 1e-12:
            raise ValueError("fractions must sum to one")
        self.fractions = np.clip(f, 0.0, None)


def counts_from_fractions(fractions, budget: int) -> np.ndarray:
    """Largest-remainder rounding of ``budget * fractions`` to integers."""
    f = np.asarray(fractions, dtype=float)
    raw = f * budget
    base = np.floor(raw).astype(np.int64)
    short = int(budget - base.sum())
    if short:
        order = np.argsort(-(raw - base), kind="stable")
        base[order[:short]] += 1
    return base


@dataclass
class TrueShotReduction:
    value: float
    degenerate: bool = False

    def __float__(self):
        return self.value


def r_hat(grouping) -> float:
    """Estimated shot reduction of grouped over individual measurement:

    (sum_i sum_j |c_ij| / sum_i sqrt(sum_j c_ij^2))^2
    """
    if not grouping.collections:
        raise ValueError("empty grouping")
    num = 0.0
    den = 0.0
    for col in grouping.collections:
        c = col.coeffs()
        num += float(np.abs(c).sum())
        den += float(np.sqrt((c ** 2).sum()))
    return (num / den) ** 2


def optimal_allocation(variances, budget: int | None = None) -> Allocation:
    """Shots proportional to the standard deviation of each collection."""
    var = np.asarray(variances, dtype=float)
    if np.any(var < -1e-12):
        raise ValueError("variances must be non-negative")
    sigma = np.sqrt(np.clip(var, 0.0, None))
    total = float(sigma.sum())
    if total == 0.0:
        raise ValueError("all variances are zero")
    fractions = sigma / total
    counts = counts_from_fractions(fractions, budget) if budget is not None else None
    return Allocation(fractions, counts)


def heuristic_allocation(grouping, budget: int | None = None) -> Allocation:
    """State-free allocation: shots proportional to sqrt(m_i * sum_j c_ij^2)."""
    if not grouping.collections:
        raise ValueError("empty grouping")
    weights = np.array([np.sqrt(col.size * float((col.coeffs() ** 2).sum()))
                        for col in grouping.collections])
    fractions = weights / weights.sum()
    counts = counts_from_fractions(fractions, budget) if budget is not None else None
    return Allocation(fractions, counts)


def collection_variances(grouping, state: np.ndarray) -> np.ndarray:
    return np.array([oracle.variance(state, [m.term for m in col.members])
                     for col in grouping.collections])


def true_r(grouping, state: np.ndarray) -> TrueShotReduction:
    """State-dependent shot reduction over individual Pauli measurement.

    Both sides assume optimally allocated budgets, which gives
    (sum_i |c_i| sigma(P_i))^2 / (sum_g sigma(O_g))^2.
    """
    num = 0.0
    for col in grouping.collections:
        for m in col.members:
            var_p = oracle.variance(state, [PauliTerm(m.term.op, 1.0)])
            num += abs(m.term.coeff) * np.sqrt(var_p)
    den = float(np.sqrt(collection_variances(grouping, state)).sum())
    if den == 0.0:
        return TrueShotReduction(1.0, degenerate=True)
    return TrueShotReduction((num / den) ** 2)
