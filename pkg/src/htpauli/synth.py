"""Solvers for the graph-template diagonalization condition.

For a fixed template graph Gamma and commuting Paulis P_1..P_m (exponent
matrices R, S), a single-qubit Clifford layer with diagonal symplectic
blocks A works iff

    Gamma (A_xx R + A_xz S) = A_zx R + A_zz S                       (mod 2)

together with the per-qubit invertibility a_xx a_zz + a_xz a_zx = 1.  The
linear part is a GF(2) system M a = 0 on the stacked block vector
a = (a_xx, a_xz, a_zx, a_zz); parameterizing its null space by lambda turns
each determinant into a quadratic form lambda^T (x z^T + w y^T) lambda of
rank at most two.  Rank-deficient qubits contribute affine constraints;
each remaining qubit contributes one of six admissible sign patterns for
(lambda.x, lambda.z, lambda.w, lambda.y), and the exact solver scans all
6^k pattern combinations with one Gaussian elimination plus cheap parity
checks.  A cutoff pins all but the first c such qubits to the single
pattern (0, *, 1, 1), trading completeness for polynomial work.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import f2la
from .f2la import AffineSubspace, asbits, solve_affine
from .hwgraph import Graph, components, induced
from .pauli import CliffordLayer, PauliOp, SignedZ, commutes, gate_from_matrix, layer_conjugate

# Admissible (x, z, w, y) dot-product patterns with x z + w y = 1, as columns.
CASE_PATTERNS = np.array(
    [
        [0, 0, 1, 1, 1, 1],
        [0, 1, 1, 1, 0, 1],
        [1, 1, 0, 0, 1, 1],
        [1, 1, 0, 1, 1, 0],
    ],
    dtype=np.uint8,
)

MAX_FULL_ENUM_QUBITS = 12
_CHUNK_DIGITS = 5


class SolverSizeError(ValueError):
    """Raised when the exhaustive pattern scan would be astronomically large."""


class QubitClass(Enum):
    INFEASIBLE = "infeasible"
    AFFINE_XZ = "affine-xz"
    AFFINE_WY = "affine-wy"
    RANK2 = "rank2"


@dataclass
class ConstraintSystem:
    n: int
    m: int
    d: int
    matrix: np.ndarray          # (m*n, 4n)
    basis: np.ndarray           # (d, 4n), rows span the null space of matrix
    x: np.ndarray               # (n, d) per-qubit coefficient vectors
    z: np.ndarray
    w: np.ndarray
    y: np.ndarray
    classes: tuple[QubitClass, ...]
    graph: Graph
    paulis: tuple[PauliOp, ...]


@dataclass
class SynthesisResult:
    layer: CliffordLayer
    lam: np.ndarray             # lambda coordinates in the null-space basis
    a: np.ndarray               # stacked (a_xx, a_xz, a_zx, a_zz)


def _classify(x: np.ndarray, z: np.ndarray, w: np.ndarray, y: np.ndarray) -> QubitClass:
    xz_zero = not x.any() or not z.any()
    wy_zero = not w.any() or not y.any()
    if xz_zero and wy_zero:
        return QubitClass.INFEASIBLE
    if xz_zero:
        return QubitClass.AFFINE_WY
    if wy_zero:
        return QubitClass.AFFINE_XZ
    return QubitClass.RANK2


def _block_rows(graph: Graph, p: PauliOp) -> np.ndarray:
    """The n rows that operator ``p`` contributes to the linear system."""
    adj = graph.adjacency
    gr = adj * p.r[None, :]
    gs = adj * p.s[None, :]
    return np.concatenate([gr, gs, np.diag(p.r), np.diag(p.s)], axis=1).astype(np.uint8)


def _finish_system(graph: Graph, ops: tuple[PauliOp, ...], m_mat: np.ndarray,
                   v: np.ndarray) -> ConstraintSystem:
    n = graph.n
    x = v[:, 0 * n:1 * n].T.copy()
    w = v[:, 1 * n:2 * n].T.copy()
    y = v[:, 2 * n:3 * n].T.copy()
    z = v[:, 3 * n:4 * n].T.copy()
    classes = tuple(_classify(x[i], z[i], w[i], y[i]) for i in range(n))
    return ConstraintSystem(n, len(ops), v.shape[0], m_mat, v, x, z, w, y,
                            classes, graph, ops)


def build_system(graph: Graph, paulis: list[PauliOp]) -> ConstraintSystem:
    """Assemble the GF(2) system M a = 0 and classify the per-qubit quadrics."""
    n = graph.n
    ops = tuple(paulis)
    for p in ops:
        if p.n != n:
            raise ValueError("Pauli size does not match graph")
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if not commutes(ops[i], ops[j]):
                raise ValueError(f"operators {i + 1} and {j + 1} do not commute")
    m_mat = (np.concatenate([_block_rows(graph, p) for p in ops], axis=0) if ops
             else np.zeros((0, 4 * n), dtype=np.uint8))
    basis = f2la.null_space(m_mat)
    v = (np.array(basis, dtype=np.uint8).reshape(-1, 4 * n)
         if basis else np.zeros((0, 4 * n), dtype=np.uint8))
    return _finish_system(graph, ops, m_mat, v)


def extend_system(sys: ConstraintSystem, p: PauliOp) -> ConstraintSystem:
    """System for ``sys.paulis + (p,)``, reusing the existing null basis.

    The new null space is the span of the old basis intersected with the
    rows contributed by ``p``, so only a small (n x d) elimination is needed.
    """
    if p.n != sys.n:
        raise ValueError("Pauli size does not match graph")
    for q in sys.paulis:
        if not commutes(q, p):
            raise ValueError("new operator does not commute with the collection")
    rows = _block_rows(sys.graph, p)
    if sys.d:
        small = (rows @ sys.basis.T) % 2
        coords = f2la.null_space(small)
        if coords:
            v = (np.array(coords, dtype=np.uint8) @ sys.basis) % 2
            v = v.astype(np.uint8)
        else:
            v = np.zeros((0, 4 * sys.n), dtype=np.uint8)
    else:
        v = sys.basis
    m_mat = np.concatenate([sys.matrix, rows], axis=0)
    return _finish_system(sys.graph, sys.paulis + (p,), m_mat, v)


def _affine_part(sys: ConstraintSystem, pinned: tuple[int, ...] = ()) -> AffineSubspace:
    """Affine space cut out by the rank-deficient qubits (plus pinned ones)."""
    rows, rhs = [], []
    for i, cls in enumerate(sys.classes):
        if cls is QubitClass.AFFINE_XZ:
            rows += [sys.x[i], sys.z[i]]
            rhs += [1, 1]
        elif cls is QubitClass.AFFINE_WY:
            rows += [sys.w[i], sys.y[i]]
            rhs += [1, 1]
    for i in pinned:
        rows += [sys.x[i], sys.w[i], sys.y[i]]
        rhs += [0, 1, 1]
    if not rows:
        return AffineSubspace.full_space(sys.d)
    mat = np.array(rows, dtype=np.uint8).reshape(-1, sys.d)
    return solve_affine(mat, np.array(rhs, dtype=np.uint8))


def quick_infeasible(sys: ConstraintSystem) -> bool:
    """Sound but incomplete emptiness test: True guarantees no solution."""
    if any(cls is QubitClass.INFEASIBLE for cls in sys.classes):
        return True
    return _affine_part(sys).empty


def _scan_cases(parts: list[np.ndarray], t0: np.ndarray, k: int):
    """Yield digit tuples (one pattern index per qubit) of consistent cases.

    ``parts[j]`` holds the six parity signatures of qubit j's patterns; a
    case is consistent iff the XOR of its per-qubit signatures equals t0.
    Cases come out in ascending mixed-radix order with digit 0 fastest.
    Qubits whose six signatures coincide cannot influence consistency and
    are pinned to pattern 0, which preserves the first consistent case.
    """
    target = t0.copy()
    relevant = []
    for j in range(k):
        sig = parts[j]
        if np.all(sig == sig[0]):
            target ^= sig[0]
        else:
            relevant.append(j)
    if not relevant:
        if not target.any():
            yield (0,) * k
        return
    q = target.shape[0]
    low = relevant[: _CHUNK_DIGITS]
    high = relevant[_CHUNK_DIGITS:]
    table = np.zeros((1, q), dtype=np.uint8)
    for j in low:
        table = (table[None, :, :] ^ parts[j][:, None, :]).reshape(-1, q)

    def emit(local: int, high_digits: list[int]):
        digits = [0] * k
        for t, j in enumerate(low):
            digits[j] = (local // 6 ** t) % 6
        for t, j in enumerate(high):
            digits[j] = high_digits[t]
        return tuple(digits)

    for h in range(6 ** len(high)):
        parity = target.copy()
        high_digits = []
        rest = h
        for j in high:
            dig = rest % 6
            rest //= 6
            high_digits.append(dig)
            parity ^= parts[j][dig]
        for idx in np.flatnonzero(~np.any(table ^ parity[None, :], axis=1)):
            yield emit(int(idx), high_digits)


def _result_from_lambda(sys: ConstraintSystem, lam: np.ndarray) -> SynthesisResult:
    a = (lam @ sys.basis) % 2 if sys.d else np.zeros(4 * sys.n, dtype=np.uint8)
    a = a.astype(np.uint8)
    n = sys.n
    gates = []
    for i in range(n):
        mat = [[a[i], a[n + i]], [a[2 * n + i], a[3 * n + i]]]
        gates.append(gate_from_matrix(mat))
    layer = CliffordLayer(tuple(gates))
    assert not ((sys.matrix @ a) % 2).any(), "solver produced a layer violating the linear condition"
    return SynthesisResult(layer, lam.astype(np.uint8), a)


def _solve_system(sys: ConstraintSystem, cutoff: int | None,
                  stats: dict | None = None) -> SynthesisResult | None:
    if any(cls is QubitClass.INFEASIBLE for cls in sys.classes):
        return None
    rank2 = [i for i, cls in enumerate(sys.classes) if cls is QubitClass.RANK2]
    if cutoff is None:
        active, pinned = rank2, ()
        if len(active) > MAX_FULL_ENUM_QUBITS:
            raise SolverSizeError(
                f"{len(active)} rank-2 qubits require 6^{len(active)} cases; "
                "use a cutoff or the componentwise solver")
    else:
        active, pinned = rank2[:cutoff], tuple(rank2[cutoff:])
    space = _affine_part(sys, pinned)
    if space.empty:
        return None
    k = len(active)
    if stats is not None:
        stats.setdefault("blocks", []).append(6 ** k)
    if k == 0:
        return _result_from_lambda(sys, space.offset)
    d = sys.d
    cp = np.zeros((4 * k, d), dtype=np.uint8)
    for j, i in enumerate(active):
        cp[4 * j + 0] = sys.x[i]
        cp[4 * j + 1] = sys.z[i]
        cp[4 * j + 2] = sys.w[i]
        cp[4 * j + 3] = sys.y[i]
    fb = space.basis                      # (dim_F, d)
    f0 = space.offset
    c2 = (cp @ fb.T) % 2                  # constraints in F-coordinates
    c0 = (cp @ f0) % 2
    r2, pivots2, t2 = f2la.rref(c2)
    nrank = len(pivots2)
    t_low = t2[nrank:]
    t0 = (t_low @ c0) % 2
    parts = [(t_low[:, 4 * j:4 * j + 4] @ CASE_PATTERNS).T % 2 for j in range(k)]
    parts = [p.astype(np.uint8) for p in parts]
    for digits in _scan_cases(parts, t0.astype(np.uint8), k):
        b_case = np.concatenate([CASE_PATTERNS[:, dig] for dig in digits])
        rhs = (t2 @ ((b_case ^ c0) % 2)) % 2
        assert not rhs[nrank:].any()
        mu = np.zeros(fb.shape[0], dtype=np.uint8)
        for i, p in enumerate(pivots2):
            mu[p] = rhs[i]
        lam = (f0 ^ ((mu @ fb) % 2)).astype(np.uint8)
        return _result_from_lambda(sys, lam)
    return None


def solve_exact(graph: Graph, paulis: list[PauliOp],
                stats: dict | None = None) -> SynthesisResult | None:
    """Complete and sound search for a layer satisfying the template condition."""
    sys = build_system(graph, paulis)
    return _solve_system(sys, None, stats)


def solve_cutoff(graph: Graph, paulis: list[PauliOp], c: int,
                 stats: dict | None = None) -> SynthesisResult | None:
    """Sound but incomplete variant: only the first ``c`` rank-2 qubits get
    the full six-pattern treatment, the rest are pinned to (0, *, 1, 1)."""
    if c < 0:
        raise ValueError("cutoff must be non-negative")
    sys = build_system(graph, paulis)
    return _solve_system(sys, c, stats)


def solve_componentwise(graph: Graph, paulis: list[PauliOp],
                        inner: str = "exact", cutoff: int | None = None,
                        stats: dict | None = None) -> SynthesisResult | None:
    """Solve per connected component of the template and recombine.

    The linear condition decouples along components, so the exhaustive work
    is bounded by the largest component instead of the whole graph.
    """
    sys = build_system(graph, paulis)
    if any(cls is QubitClass.INFEASIBLE for cls in sys.classes):
        return None
    gates: list = [None] * graph.n
    for comp in components(graph):
        sub, mapping = induced(graph, comp)
        sub_paulis = [PauliOp(len(comp), p.r[list(comp)], p.s[list(comp)]) for p in sys.paulis]
        # Globally commuting operators may anticommute when restricted to a
        # component; such restrictions admit no common diagonal form, so the
        # whole template fails.
        for i in range(len(sub_paulis)):
            for j in range(i + 1, len(sub_paulis)):
                if not commutes(sub_paulis[i], sub_paulis[j]):
                    return None
        comp_sys = build_system(sub, sub_paulis)
        if inner == "cutoff":
            res = _solve_system(comp_sys, cutoff if cutoff is not None else 0, stats)
        else:
            res = _solve_system(comp_sys, None, stats)
        if res is None:
            return None
        for local, original in enumerate(mapping):
            gates[original] = res.layer.gates[local]
    layer = CliffordLayer(tuple(gates))
    axx, axz, azx, azz = layer.a_vectors()
    a = np.concatenate([axx, axz, azx, azz])
    lam_space = solve_affine(sys.basis.T, a)
    assert not lam_space.empty, "componentwise layer escaped the global null space"
    return SynthesisResult(layer, lam_space.offset, a)


def eq6_holds(graph: Graph, layer: CliffordLayer, p: PauliOp) -> bool:
    """Check the template condition for one operator under a fixed layer."""
    k, m, _ = layer_conjugate(layer, p)
    return np.array_equal((graph.adjacency @ k) % 2, m)


def diagonalize_target(result, graph: Graph, p: PauliOp) -> SignedZ:
    """Exact diagonal image of ``p`` under the full template circuit.

    The circuit maps p to sign * Z^k with k = A_xx r + A_xz s and
    sign = i^(q + alpha(r, s)) * (-1)^(sum_{i<j} k_i gamma_ij k_j); a
    non-real phase indicates that ``p`` does not satisfy the condition.
    """
    layer = result.layer if isinstance(result, SynthesisResult) else result
    k, m, phase = layer_conjugate(layer, p)
    if not np.array_equal((graph.adjacency @ k) % 2, m):
        raise ValueError("operator does not satisfy the template condition")
    total = (p.phase_exponent + phase) % 4
    if total % 2:
        raise ValueError("non-real phase; inconsistent layer")
    upper = np.triu(graph.adjacency)
    sigma = int(k @ (upper @ k)) % 2
    sign = -1 if (total // 2 + sigma) % 2 else 1
    return SignedZ(k, sign)
