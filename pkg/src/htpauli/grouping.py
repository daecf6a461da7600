"""Pauli grouping algorithms and the grouping JSON format.

Implements sorted insertion under general or qubit-wise commutation, the
greedy template-search grouping whose collections are jointly measurable
with a hardware-tailored circuit, its support-local variant for operators
with small support, and stabilizer-group completion.

Determinism: terms are stable-sorted by |coefficient| (ties keep input
order), candidate collections are compared by the value function with ties
going to the lowest template index, and every random choice is seeded.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import f2la
from .hwgraph import Graph, components, embed, induced, subgraphs_all, subgraphs_sample
from .pauli import (CliffordLayer, GATE_BY_LABEL, PauliOp, PauliTerm, SignedZ, commutes,
                    parse_pauli, parse_signed_z, qwc)
from .synth import (ConstraintSystem, SolverSizeError, _solve_system, build_system,
                    diagonalize_target, eq6_holds, extend_system)

SCHEMA_VERSION = 1

# Measurement-basis gate per single non-identity factor on a qubit (the
# trailing Hadamard layer of the readout circuit turns X into Z).
TPB_GATES = {"I": "I", "X": "I", "Y": "SH", "Z": "H"}


@dataclass(frozen=True)
class SolverConfig:
    """Which solver the grouping algorithms call for a template."""

    mode: str = "exact"          # "exact" or "cutoff"
    cutoff: int = 0
    componentwise: bool = True

    def describe(self) -> dict:
        return {"mode": self.mode, "cutoff": self.cutoff if self.mode == "cutoff" else None,
                "componentwise": self.componentwise}


@dataclass
class GroupedMember:
    term: PauliTerm
    target: SignedZ | None = None


@dataclass
class Collection:
    template: Graph | None
    layer: CliffordLayer | None
    members: list[GroupedMember] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.members)

    def coeffs(self) -> np.ndarray:
        return np.array([m.term.coeff for m in self.members], dtype=float)

    def ops(self) -> list[PauliOp]:
        return [m.term.op for m in self.members]


@dataclass
class Grouping:
    method: str
    n: int
    collections: list[Collection]
    provenance: dict = field(default_factory=dict)

    @property
    def num_terms(self) -> int:
        return sum(c.size for c in self.collections)

    def all_terms(self) -> list[PauliTerm]:
        return [m.term for c in self.collections for m in c.members]

    def subset(self, collection_indices) -> "Grouping":
        cols = [self.collections[i] for i in collection_indices]
        prov = dict(self.provenance)
        prov["subset_of"] = self.method
        return Grouping(self.method, self.n, cols, prov)


def value_of(terms: list[PauliTerm], which: str) -> float:
    """Collection value: plain size or size times summed squared weight."""
    m = len(terms)
    if which == "size":
        return float(m)
    if which == "weighted":
        return m * float(sum(t.coeff ** 2 for t in terms))
    raise ValueError(f"unknown value function {which!r}")


def sort_terms(terms) -> list[PauliTerm]:
    return sorted(terms, key=lambda t: -abs(t.coeff))


def _tpb_pattern(ops: list[PauliOp], n: int) -> list[str] | None:
    """Per-qubit non-identity factor shared by all ops, or None if mixed."""
    pattern = ["I"] * n
    for op in ops:
        for j in op.support():
            f = op.factor(j)
            if pattern[j] == "I":
                pattern[j] = f
            elif pattern[j] != f:
                return None
    return pattern


def tpb_layer(ops: list[PauliOp], n: int) -> CliffordLayer | None:
    pattern = _tpb_pattern(ops, n)
    if pattern is None:
        return None
    return CliffordLayer.from_labels(TPB_GATES[f] for f in pattern)


def _attach_targets(col: Collection):
    if col.template is None or col.layer is None:
        return
    for m in col.members:
        m.target = diagonalize_target(col.layer, col.template, m.term.op)


def sorted_insertion(terms, predicate: str = "gc") -> Grouping:
    """Sorted insertion under "gc" (commuting) or "qwc" (qubit-wise) rules.

    Terms are inserted, largest |coefficient| first, into the first existing
    collection compatible with every member.  QWC collections get the
    trivial template and the standard single-qubit readout layer.
    """
    if predicate not in ("gc", "qwc"):
        raise ValueError("predicate must be 'gc' or 'qwc'")
    ordered = sort_terms(terms)
    if not ordered:
        raise ValueError("no terms to group")
    n = ordered[0].op.n
    test = qwc if predicate == "qwc" else commutes
    groups: list[list[PauliTerm]] = []
    for term in ordered:
        if term.coeff == 0:
            raise ValueError("zero coefficient in input")
        for group in groups:
            if all(test(term.op, t.op) for t in group):
                group.append(term)
                break
        else:
            groups.append([term])
    collections = []
    for group in groups:
        if predicate == "qwc":
            graph = Graph.empty(n)
            layer = tpb_layer([t.op for t in group], n)
            col = Collection(graph, layer, [GroupedMember(t) for t in group])
            _attach_targets(col)
        else:
            col = Collection(None, None, [GroupedMember(t) for t in group])
        collections.append(col)
    method = "si-qwc" if predicate == "qwc" else "si"
    return Grouping(method, n, collections, {"method": method})


class _TemplateCandidate:
    """Greedy collection under construction for one template graph.

    Keeps an incrementally updated constraint system per connected
    component of the template, so accepting or rejecting one more operator
    only touches the components met by its support.
    """

    def __init__(self, template: Graph, solver: SolverConfig, stats: dict | None):
        self.template = template
        self.solver = solver
        self.stats = stats
        self.comps = components(template)
        self.comp_graphs = []
        for comp in self.comps:
            sub, mapping = induced(template, comp)
            self.comp_graphs.append((sub, mapping))
        self.systems: list[ConstraintSystem | None] = [None] * len(self.comps)
        self.layers: list[CliffordLayer | None] = [None] * len(self.comps)
        self.terms: list[PauliTerm] = []
        self.ops_r = np.zeros((0, template.n), dtype=np.uint8)
        self.ops_s = np.zeros((0, template.n), dtype=np.uint8)

    def _solve_component(self, sys: ConstraintSystem):
        cutoff = self.solver.cutoff if self.solver.mode == "cutoff" else None
        return _solve_system(sys, cutoff, self.stats)

    def _restrict(self, op: PauliOp, comp) -> PauliOp:
        idx = list(comp)
        return PauliOp(len(idx), op.r[idx], op.s[idx])

    def layer(self) -> CliffordLayer:
        gates = [None] * self.template.n
        for comp, lay in zip(self.comps, self.layers):
            for local, orig in enumerate(comp):
                gates[orig] = lay.gates[local]
        return CliffordLayer(tuple(gates))

    def commutes_with_all(self, op: PauliOp) -> bool:
        if not self.terms:
            return True
        par = (self.ops_r & op.s[None, :]) ^ (self.ops_s & op.r[None, :])
        return not np.bitwise_xor.reduce(par, axis=1).any()

    def try_add(self, term: PauliTerm) -> bool:
        op = term.op
        if not self.commutes_with_all(op):
            return False
        incumbent_ok = self.terms and eq6_holds(self.template, self.layer(), op)
        new_systems = list(self.systems)
        new_layers = list(self.layers)
        for ci, (comp, (sub, _mapping)) in enumerate(zip(self.comps, self.comp_graphs)):
            restricted = self._restrict(op, comp)
            touched = bool(restricted.weight) or self.systems[ci] is None
            if not touched:
                continue
            if self.systems[ci] is None:
                sys = build_system(sub, [restricted])
            else:
                # Anticommuting restrictions have no common diagonal form even
                # when the full operators commute.
                if any(not commutes(restricted, q) for q in self.systems[ci].paulis):
                    return False
                sys = extend_system(self.systems[ci], restricted)
            if incumbent_ok:
                new_systems[ci] = sys
                continue
            res = self._solve_component(sys)
            if res is None:
                return False
            new_systems[ci] = sys
            new_layers[ci] = res.layer
        self.systems = new_systems
        if not incumbent_ok:
            self.layers = new_layers
        self.terms.append(term)
        self.ops_r = np.concatenate([self.ops_r, op.r[None, :]], axis=0)
        self.ops_s = np.concatenate([self.ops_s, op.s[None, :]], axis=0)
        return True


def _evaluate_template(template: Graph, main: PauliTerm, candidates: list[PauliTerm],
                       solver: SolverConfig, stats: dict | None):
    """Run the greedy extension for one template; None if the leader fails."""
    if template.num_edges == 0:
        pattern = ["I"] * template.n
        members = []
        for term in [main] + candidates:
            trial = pattern[:]
            ok = True
            for j in term.op.support():
                f = term.op.factor(j)
                if trial[j] == "I":
                    trial[j] = f
                elif trial[j] != f:
                    ok = False
                    break
            if ok:
                pattern = trial
                members.append(term)
        layer = CliffordLayer.from_labels(TPB_GATES[f] for f in pattern)
        return members, layer
    cand = _TemplateCandidate(template, solver, stats)
    if not cand.try_add(main):
        return None
    for term in candidates:
        cand.try_add(term)
    return cand.terms, cand.layer()


def _finish_collection(template: Graph, layer: CliffordLayer,
                       members: list[PauliTerm]) -> Collection:
    col = Collection(template, layer, [GroupedMember(t) for t in members])
    _attach_targets(col)
    return col


def ht_group(terms, conn: Graph, templates: list[Graph] | None = None,
             solver: SolverConfig = SolverConfig(), value: str = "weighted",
             num_templates: int | None = None, seed: int = 0,
             resample: bool = False, threads: int | None = None,
             stats: dict | None = None) -> Grouping:
    """Greedy grouping into collections measurable with template circuits.

    Repeatedly takes the remaining term with the largest |coefficient|,
    builds one candidate collection per template (greedy extension through
    the sorted remainder, re-solving on each tentative addition unless the
    incumbent layer already works), keeps the best-valued candidate and
    recurses on the rest.  ``templates`` must contain the edgeless graph.
    """
    if templates is None:
        if num_templates is None:
            templates = subgraphs_all(conn)
        else:
            templates = subgraphs_sample(conn, num_templates, seed)
    if not any(t.num_edges == 0 for t in templates):
        raise ValueError("template list must contain the edgeless graph")
    ordered = sort_terms(terms)
    if not ordered:
        raise ValueError("no terms to group")
    n = conn.n
    remaining = list(ordered)
    collections: list[Collection] = []
    single_cache: dict = {}

    def evaluate(idx_template):
        idx, template = idx_template
        main = remaining[0]
        key = (idx, main.op.key())
        if key in single_cache and single_cache[key] is False:
            return None
        out = _evaluate_template(template, main, remaining[1:], solver, stats)
        single_cache[key] = out is not None
        return out

    while remaining:
        jobs = list(enumerate(templates))
        if threads and threads > 1:
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(evaluate, jobs))
        else:
            results = [evaluate(job) for job in jobs]
        best = None
        best_value = -1.0
        for idx, outcome in enumerate(results):
            if outcome is None:
                continue
            members, layer = outcome
            v = value_of(members, value)
            if v > best_value:
                best = (templates[idx], layer, members)
                best_value = v
        assert best is not None, "edgeless template guarantees progress"
        template, layer, members = best
        collections.append(_finish_collection(template, layer, members))
        chosen = {id(t) for t in members}
        remaining = [t for t in remaining if id(t) not in chosen]
        if resample and num_templates is not None:
            templates = subgraphs_sample(conn, num_templates,
                                         _derive_seed(seed, len(collections)))
            single_cache.clear()
    prov = {"method": "ht", "value": value, "solver": solver.describe(),
            "seed": seed, "templates": len(templates), "resample": resample}
    return Grouping("ht", n, collections, prov)


def _derive_seed(seed: int, round_index: int) -> int:
    return (seed * 2654435761 + round_index) % (1 << 63)


def _most_frequent_factors(selection: list[PauliTerm], support, n: int) -> list[str]:
    """Most frequent non-identity factor outside the support, ties X < Y < Z."""
    outside = [j for j in range(n) if j not in support]
    guess = ["I"] * n
    for j in outside:
        counts = {"X": 0, "Y": 0, "Z": 0}
        for t in selection:
            f = t.op.factor(j)
            if f != "I":
                counts[f] += 1
        guess[j] = max("XYZ", key=lambda p: (counts[p], -"XYZ".index(p)))
    return guess


def ht_group_local(terms, conn: Graph, s_max: int = 64,
                   solver: SolverConfig = SolverConfig(), value: str = "weighted",
                   seed: int = 0, stats: dict | None = None) -> Grouping:
    """Support-local variant: templates live inside the leader's support.

    Per round the remainder is filtered to operators commuting with the
    leader, then to operators that act as identity or as the most frequent
    factor on every qubit outside the leader's support; templates are up to
    ``s_max`` subgraphs of the connectivity restricted to that support.
    """
    ordered = sort_terms(terms)
    if not ordered:
        raise ValueError("no terms to group")
    n = conn.n
    remaining = list(ordered)
    collections: list[Collection] = []
    round_index = 0
    while remaining:
        main = remaining[0]
        support = set(main.op.support())
        selection = [t for t in remaining[1:] if commutes(t.op, main.op)]
        guess = _most_frequent_factors(selection, support, n)
        filtered = []
        for t in selection:
            if all(t.op.factor(j) in ("I", guess[j])
                   for j in range(n) if j not in support):
                filtered.append(t)
        local, mapping = induced(conn, sorted(support))
        if local.num_edges <= 20 and (1 << local.num_edges) <= s_max:
            local_templates = subgraphs_all(local)
        else:
            local_templates = subgraphs_sample(local, s_max,
                                               _derive_seed(seed, round_index))
        templates = [embed(t, mapping, n) for t in local_templates]
        best = None
        best_value = -1.0
        for template in templates:
            outcome = _evaluate_template(template, main, filtered, solver, stats)
            if outcome is None:
                continue
            members, layer = outcome
            v = value_of(members, value)
            if v > best_value:
                best = (template, layer, members)
                best_value = v
        assert best is not None, "edgeless template guarantees progress"
        template, layer, members = best
        collections.append(_finish_collection(template, layer, members))
        chosen = {id(t) for t in members}
        remaining = [t for t in remaining if id(t) not in chosen]
        round_index += 1
    prov = {"method": "ht-local", "value": value, "solver": solver.describe(),
            "seed": seed, "s_max": s_max}
    return Grouping("ht-local", n, collections, prov)


def complete_stabilizer(paulis: list[PauliOp], n: int | None = None) -> list[PauliOp]:
    """Extend commuting operators to n independent commuting generators.

    Dependent inputs are first reduced to the pivot subset of the stacked
    exponent matrix.  Each round pulls a new commuting, independent
    operator out of the null space of the symplectically swapped exponents
    expressed in the row-reduced coordinates.
    """
    if paulis:
        n = paulis[0].n
    if n is None:
        raise ValueError("qubit count required for empty input")
    for p in paulis:
        if p.n != n:
            raise ValueError("mixed qubit counts")
    for i in range(len(paulis)):
        for j in range(i + 1, len(paulis)):
            if not commutes(paulis[i], paulis[j]):
                raise ValueError("input operators must commute")
    if paulis:
        rs = np.array([np.concatenate([p.r, p.s]) for p in paulis], dtype=np.uint8).T
        _, pivots, _ = f2la.rref(rs)
        ops = [paulis[c] for c in pivots]
    else:
        ops = []
    while len(ops) < n:
        m = len(ops)
        if m:
            rs = np.array([np.concatenate([p.r, p.s]) for p in ops], dtype=np.uint8).T
            _, pivots, t = f2la.rref(rs)
            assert len(pivots) == m
            t_inv = f2la.inverse(t)
            sr = np.array([np.concatenate([p.s, p.r]) for p in ops], dtype=np.uint8)
            kernel = f2la.null_space((sr @ t_inv) % 2)
        else:
            t_inv = np.eye(2 * n, dtype=np.uint8)
            kernel = [v for v in np.eye(2 * n, dtype=np.uint8)]
        pick = next(v for v in kernel if v[m:].any())
        col = (t_inv @ pick) % 2
        ops.append(PauliOp(n, col[:n], col[n:]))
    return ops


# --- JSON serialization -------------------------------------------------

def grouping_to_json(g: Grouping) -> str:
    cols = []
    for col in g.collections:
        entry = {
            "template_edges": ([[i + 1, j + 1] for i, j in col.template.edges]
                               if col.template is not None else None),
            "gates": list(col.layer.labels()) if col.layer is not None else None,
            "members": [
                {
                    "pauli": m.term.op.to_string(),
                    "coeff": m.term.coeff,
                    "sign": m.target.sign if m.target is not None else None,
                    "z_mask": ("".join(str(int(b)) for b in m.target.k)
                               if m.target is not None else None),
                }
                for m in col.members
            ],
        }
        cols.append(entry)
    doc = {"schema": SCHEMA_VERSION, "method": g.method, "n": g.n,
           "provenance": g.provenance, "collections": cols}
    return json.dumps(doc, indent=1)


def grouping_from_json(text: str) -> Grouping:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    n = int(doc["n"])
    collections = []
    for entry in doc["collections"]:
        template = None
        if entry.get("template_edges") is not None:
            template = Graph.from_edges(n, [(i - 1, j - 1) for i, j in entry["template_edges"]])
        layer = None
        if entry.get("gates") is not None:
            layer = CliffordLayer.from_labels(entry["gates"])
        members = []
        for m in entry["members"]:
            term = PauliTerm(parse_pauli(m["pauli"], n), float(m["coeff"]))
            target = None
            if m.get("z_mask") is not None:
                mask = np.array([int(ch) for ch in m["z_mask"]], dtype=np.uint8)
                target = SignedZ(mask, int(m["sign"]))
            members.append(GroupedMember(term, target))
        collections.append(Collection(template, layer, members))
    return Grouping(doc["method"], n, collections, doc.get("provenance", {}))
