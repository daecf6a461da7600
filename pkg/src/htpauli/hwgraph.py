"""Connectivity graphs, subgraph enumeration/sampling and component splits.

A graph is its symmetric zero-diagonal adjacency matrix over GF(2) plus the
sorted edge list.  Subgraph order is fixed by the edge-subset bitmask
(ascending, bit i = i-th edge of the parent), so template sequences are
reproducible everywhere.  Sampling uses numpy's PCG64 generator.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .f2la import asbits

MAX_ENUM_EDGES = 24


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: np.ndarray
    edges: tuple[tuple[int, int], ...] = field(default=None)

    def __post_init__(self):
        adj = asbits(self.adjacency)
        if adj.shape != (self.n, self.n):
            raise ValueError("adjacency must be n x n")
        if np.any(adj != adj.T) or np.any(np.diag(adj)):
            raise ValueError("adjacency must be symmetric with zero diagonal")
        object.__setattr__(self, "adjacency", adj)
        edges = tuple((int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(adj))))
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        adj = np.zeros((n, n), dtype=np.uint8)
        for i, j in edges:
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"invalid edge ({i}, {j})")
            adj[i, j] = adj[j, i] = 1
        return cls(n, adj)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, np.zeros((n, n), dtype=np.uint8))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def key(self) -> tuple:
        return (self.n, self.adjacency.tobytes())

    def __eq__(self, other):
        return isinstance(other, Graph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def is_subgraph_of(self, other: "Graph") -> bool:
        return self.n == other.n and not np.any(self.adjacency & ~other.adjacency & 1)

    def __repr__(self):
        return f"Graph(n={self.n}, edges={[(i + 1, j + 1) for i, j in self.edges]})"


def preset(spec: str) -> Graph:
    """Build a named connectivity graph: "linear:8", "cycle:6" or "grid:3x4"."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "linear":
        n = int(arg)
        if n < 1:
            raise ValueError("linear graph needs n >= 1")
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if name == "cycle":
        n = int(arg)
        if n < 2:
            raise ValueError("cycle graph needs n >= 2")
        edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
        return Graph.from_edges(n, edges)
    if name == "grid":
        rows, _, cols = arg.partition("x")
        r, c = int(rows), int(cols)
        if r < 1 or c < 1:
            raise ValueError("grid needs positive dimensions")
        edges = []
        for i in range(r):
            for j in range(c):
                v = i * c + j
                if j + 1 < c:
                    edges.append((v, v + 1))
                if i + 1 < r:
                    edges.append((v, v + c))
        return Graph.from_edges(r * c, edges)
    raise ValueError(f"unknown preset {spec!r}")


def _subgraph_from_mask(g: Graph, mask: int) -> Graph:
    edges = [e for i, e in enumerate(g.edges) if (mask >> i) & 1]
    return Graph.from_edges(g.n, edges)


def subgraphs_all(g: Graph) -> list[Graph]:
    """All 2^e edge subgraphs, bitmask ascending; the empty graph comes first."""
    e = g.num_edges
    if e > MAX_ENUM_EDGES:
        raise ValueError(f"refusing to enumerate 2^{e} subgraphs")
    return [_subgraph_from_mask(g, mask) for mask in range(1 << e)]


def subgraphs_sample(g: Graph, count: int, seed: int) -> list[Graph]:
    """Sample ``count`` distinct subgraphs; the empty graph is always first.

    Deterministic for a fixed seed (PCG64 bitmask draws with dedup).  If
    ``count`` covers all subgraphs the full enumeration is returned.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    e = g.num_edges
    if e <= MAX_ENUM_EDGES and count >= (1 << e):
        return subgraphs_all(g)
    rng = np.random.default_rng(np.random.PCG64(seed))
    seen = {0}
    masks = [0]
    total = (1 << e) if e <= 62 else None
    while len(masks) < count:
        mask = int(rng.integers(0, total)) if total else int.from_bytes(rng.bytes(8), "little") % (1 << e)
        if mask not in seen:
            seen.add(mask)
            masks.append(mask)
    return [_subgraph_from_mask(g, m) for m in masks]


def components(g: Graph) -> list[tuple[int, ...]]:
    """Connected components as sorted vertex tuples, ordered by least vertex."""
    seen = [False] * g.n
    out = []
    for start in range(g.n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in np.flatnonzero(g.adjacency[v]):
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        out.append(tuple(sorted(comp)))
    return out


def induced(g: Graph, vertices) -> tuple[Graph, tuple[int, ...]]:
    """Induced subgraph on ``vertices`` plus the compact-to-original map."""
    verts = tuple(sorted(set(int(v) for v in vertices)))
    for v in verts:
        if not (0 <= v < g.n):
            raise ValueError(f"vertex {v} out of range")
    index = {v: i for i, v in enumerate(verts)}
    edges = [(index[i], index[j]) for i, j in g.edges if i in index and j in index]
    return Graph.from_edges(len(verts), edges), verts


def embed(sub: Graph, mapping, n: int) -> Graph:
    """Lift a compact graph back onto ``n`` vertices via ``mapping``."""
    return Graph.from_edges(n, [(mapping[i], mapping[j]) for i, j in sub.edges])


def parse_graph_text(text: str) -> Graph:
    """Parse "n" on the first line then one "i j" (1-based) edge per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty graph description")
    n = int(lines[0])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        i, j = int(parts[0]) - 1, int(parts[1]) - 1
        edges.append((i, j))
    return Graph.from_edges(n, edges)


def format_graph_text(g: Graph) -> str:
    lines = [str(g.n)]
    lines += [f"{i + 1} {j + 1}" for i, j in g.edges]
    return "\n".join(lines) + "\n"
