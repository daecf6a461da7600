"""Dense linear algebra over the binary field GF(2).

Vectors and matrices are numpy arrays of dtype uint8 with entries in {0, 1};
all arithmetic is mod 2.  Pivoting is deterministic (leftmost column,
topmost row), so every downstream solver is reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def asbits(a) -> np.ndarray:
    """Coerce array-like input to a uint8 array with entries in {0, 1}."""
    return np.asarray(a, dtype=np.uint8) & 1


def bitvec(values) -> np.ndarray:
    return asbits(np.atleast_1d(values))


def rref(mat) -> tuple[np.ndarray, list[int], np.ndarray]:
    """Reduced row-echelon form of ``mat`` over GF(2).

    Returns ``(R, pivots, T)`` where ``T @ mat == R (mod 2)``, ``T`` is an
    invertible record of the row operations and ``pivots`` lists the pivot
    column indices in ascending order.
    """
    m = asbits(mat).copy()
    if m.ndim != 2:
        raise ValueError("rref expects a 2-d matrix")
    rows, cols = m.shape
    t = np.eye(rows, dtype=np.uint8)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(m[r:, c])
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
            t[[r, p]] = t[[p, r]]
        targets = np.flatnonzero(m[:, c])
        targets = targets[targets != r]
        if targets.size:
            m[targets] ^= m[r]
            t[targets] ^= t[r]
        pivots.append(c)
        r += 1
    return m, pivots, t


def rank(mat) -> int:
    return len(rref(mat)[1])


def inverse(mat) -> np.ndarray:
    """Inverse of a square invertible matrix over GF(2)."""
    m = asbits(mat)
    n = m.shape[0]
    r, pivots, t = rref(m)
    if len(pivots) != n:
        raise ValueError("matrix is singular over GF(2)")
    return t


def null_space(mat) -> list[np.ndarray]:
    """Basis of ``{v : mat @ v = 0 (mod 2)}`` as a list of uint8 vectors.

    One basis vector per non-pivot column, in ascending column order.
    """
    m = asbits(mat)
    rows, cols = m.shape
    r, pivots, _ = rref(m)
    pivot_set = set(pivots)
    free_cols = [c for c in range(cols) if c not in pivot_set]
    basis = []
    for f in free_cols:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = r[i, f]
        basis.append(v)
    return basis


@dataclass
class AffineSubspace:
    """An affine subspace ``offset + span(basis)`` of F2^ambient_dim.

    Instances are kept in a canonical form: the basis rows are the RREF of
    the direction space and the offset is reduced against the basis pivots.
    This makes structural equality meaningful.
    """

    ambient_dim: int
    empty: bool
    offset: np.ndarray = field(default=None)
    basis: np.ndarray = field(default=None)  # shape (dim, ambient_dim)

    @classmethod
    def empty_space(cls, ambient_dim: int) -> "AffineSubspace":
        return cls(ambient_dim, True,
                   np.zeros(ambient_dim, dtype=np.uint8),
                   np.zeros((0, ambient_dim), dtype=np.uint8))

    @classmethod
    def from_offset_basis(cls, offset, basis_rows) -> "AffineSubspace":
        offset = bitvec(offset)
        dim = offset.shape[0]
        rows = asbits(basis_rows).reshape(-1, dim)
        if rows.shape[0]:
            r, pivots, _ = rref(rows)
            rows = r[: len(pivots)]
        else:
            pivots = []
        off = offset.copy()
        for i, p in enumerate(pivots):
            if off[p]:
                off ^= rows[i]
        return cls(dim, False, off, rows)

    @classmethod
    def full_space(cls, ambient_dim: int) -> "AffineSubspace":
        return cls.from_offset_basis(np.zeros(ambient_dim, dtype=np.uint8),
                                     np.eye(ambient_dim, dtype=np.uint8))

    @property
    def dim(self) -> int:
        return 0 if self.empty else self.basis.shape[0]

    def contains(self, v) -> bool:
        if self.empty:
            return False
        w = bitvec(v) ^ self.offset
        for row in self.basis:
            p = int(np.flatnonzero(row)[0])
            if w[p]:
                w ^= row
        return not w.any()

    def points(self):
        """Iterate all points (intended for small spaces in tests)."""
        if self.empty:
            return
        k = self.dim
        for mask in range(1 << k):
            v = self.offset.copy()
            for i in range(k):
                if (mask >> i) & 1:
                    v ^= self.basis[i]
            yield v

    def __eq__(self, other) -> bool:
        if not isinstance(other, AffineSubspace):
            return NotImplemented
        if self.ambient_dim != other.ambient_dim:
            return False
        if self.empty or other.empty:
            return self.empty == other.empty
        return (np.array_equal(self.offset, other.offset)
                and np.array_equal(self.basis, other.basis))


def solve_affine(mat, b) -> AffineSubspace:
    """Solution set ``{x : mat @ x = b (mod 2)}`` as an AffineSubspace."""
    m = asbits(mat)
    rhs = bitvec(b)
    if rhs.shape[0] != m.shape[0]:
        raise ValueError("right-hand side length does not match row count")
    rows, cols = m.shape
    ext = np.concatenate([m, rhs[:, None]], axis=1)
    r, pivots, _ = rref(ext)
    if cols in pivots:
        return AffineSubspace.empty_space(cols)
    offset = np.zeros(cols, dtype=np.uint8)
    for i, p in enumerate(pivots):
        offset[p] = r[i, cols]
    basis = null_space(m)
    return AffineSubspace.from_offset_basis(offset, np.array(basis, dtype=np.uint8).reshape(-1, cols))


def affine_intersect(u: AffineSubspace, v: AffineSubspace) -> AffineSubspace:
    """Intersection of two affine subspaces of the same ambient space."""
    if u.ambient_dim != v.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if u.empty or v.empty:
        return AffineSubspace.empty_space(u.ambient_dim)
    d = u.ambient_dim
    mu, mv = u.dim, v.dim
    stacked = np.concatenate([u.basis.T, v.basis.T], axis=1) if mu + mv else np.zeros((d, 0), dtype=np.uint8)
    target = u.offset ^ v.offset
    sol = solve_affine(stacked, target)
    if sol.empty:
        return AffineSubspace.empty_space(d)
    part = (sol.offset[:mu] @ u.basis) % 2 if mu else np.zeros(d, dtype=np.uint8)
    offset = u.offset ^ part.astype(np.uint8)
    dirs = []
    for t in sol.basis:
        x = (t[:mu] @ u.basis) % 2 if mu else np.zeros(d, dtype=np.uint8)
        dirs.append(x.astype(np.uint8))
    dirs = np.array(dirs, dtype=np.uint8).reshape(-1, d)
    return AffineSubspace.from_offset_basis(offset, dirs)
