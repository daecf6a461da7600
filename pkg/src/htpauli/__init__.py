"""htpauli: Pauli grouping with hardware-tailored diagonalization circuits."""

from .grouping import (Grouping, Collection, GroupedMember, SolverConfig,
                       complete_stabilizer, grouping_from_json, grouping_to_json,
                       ht_group, ht_group_local, sorted_insertion)
from .hwgraph import Graph, preset, subgraphs_all, subgraphs_sample
from .metrics import heuristic_allocation, optimal_allocation, r_hat, true_r
from .pauli import CliffordLayer, PauliOp, PauliTerm, SignedZ, parse_pauli
from .synth import (diagonalize_target, solve_componentwise, solve_cutoff,
                    solve_exact)

__version__ = "0.1.0"

__all__ = [
    "Grouping", "Collection", "GroupedMember", "SolverConfig",
    "complete_stabilizer", "grouping_from_json", "grouping_to_json",
    "ht_group", "ht_group_local", "sorted_insertion",
    "Graph", "preset", "subgraphs_all", "subgraphs_sample",
    "heuristic_allocation", "optimal_allocation", "r_hat", "true_r",
    "CliffordLayer", "PauliOp", "PauliTerm", "SignedZ", "parse_pauli",
    "diagonalize_target", "solve_componentwise", "solve_cutoff", "solve_exact",
    "__version__",
]
