"""Command-line interface.

Subcommands: group, metrics, emit, verify, simulate, report.  Exit codes:
0 success, 1 verification failure, 2 usage error, 3 I/O or format error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import metrics, oracle
from .circuit import diag_circuit, emit_qasm, trotter_step
from .grouping import (Grouping, SolverConfig, grouping_from_json, grouping_to_json,
                       ht_group, ht_group_local, sorted_insertion)
from .hwgraph import Graph, parse_graph_text, preset, subgraphs_all
from .pauli import PauliTerm, parse_pauli


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    pass


@dataclass
class HamiltonianFile:
    """Parsed observable file: one `<coeff> <pauli>` term per line."""

    n: int
    terms: list[PauliTerm]       # non-identity terms
    offset: float                # summed identity coefficient

    @classmethod
    def parse(cls, text: str) -> "HamiltonianFile":
        n = None
        terms: list[PauliTerm] = []
        offset = 0.0
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise UsageError(f"line {lineno}: expected '<coeff> <pauli>'")
            try:
                coeff = float(parts[0])
            except ValueError:
                raise UsageError(f"line {lineno}: bad coefficient {parts[0]!r}")
            word = parts[1]
            if word and word[0] in "+-":
                coeff = -coeff if word[0] == "-" else coeff
                word = word[1:]
            if n is None:
                n = len(word)
            try:
                op = parse_pauli(word, n)
            except ValueError as exc:
                raise UsageError(f"line {lineno}: {exc}")
            if op.weight == 0:
                offset += coeff
            else:
                terms.append(PauliTerm(op, coeff))
        if n is None:
            raise UsageError("no terms in Hamiltonian file")
        return cls(n, terms, offset)


def load_hamiltonian(path: str) -> HamiltonianFile:
    return HamiltonianFile.parse(_read(path))


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise IOError(f"cannot read {path}: {exc}")


def _write(path: str, text: str):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}")


def load_graph(spec: str) -> Graph:
    if ":" in spec and spec.split(":", 1)[0] in ("linear", "cycle", "grid"):
        return preset(spec)
    return parse_graph_text(_read(spec))


def load_state(path: str, n: int) -> np.ndarray:
    doc = json.loads(_read(path))
    try:
        theta, phi, lam = doc["theta"], doc["phi"], doc["lambda"]
    except (KeyError, TypeError):
        raise UsageError(f"{path}: expected keys theta/phi/lambda")
    if not (len(theta) == len(phi) == len(lam) == n):
        raise UsageError(f"{path}: parameter lists must have length {n}")
    return oracle.product_state(list(zip(theta, phi, lam)))


def load_grouping(path: str) -> Grouping:
    try:
        return grouping_from_json(_read(path))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}")


def cmd_group(args) -> int:
    ham = load_hamiltonian(args.hamiltonian)
    if not ham.terms:
        raise UsageError("Hamiltonian has no measurable terms")
    if args.method in ("ht", "ht-local") and args.graph is None:
        raise UsageError(f"--graph is required for method {args.method}")
    if args.method == "si":
        g = sorted_insertion(ham.terms, "gc")
    elif args.method == "si-qwc":
        g = sorted_insertion(ham.terms, "qwc")
    else:
        conn = load_graph(args.graph)
        if conn.n != ham.n:
            raise UsageError("graph size does not match Hamiltonian")
        if args.cutoff == "exact":
            solver = SolverConfig(mode="exact")
        else:
            solver = SolverConfig(mode="cutoff", cutoff=int(args.cutoff))
        if args.method == "ht":
            num = None if args.subgraphs == "all" else int(args.subgraphs)
            g = ht_group(ham.terms, conn, solver=solver, value=args.value,
                         num_templates=num, seed=args.seed, resample=args.resample,
                         threads=args.threads)
        else:
            s_max = 64 if args.subgraphs == "all" else int(args.subgraphs)
            g = ht_group_local(ham.terms, conn, s_max=s_max, solver=solver,
                               value=args.value, seed=args.seed)
    sizes = [c.size for c in g.collections]
    print(f"N={len(g.collections)}")
    print(f"R_hat={metrics.r_hat(g):.4f}")
    print(f"sizes={sizes}")
    if ham.offset:
        print(f"identity_offset={ham.offset}")
    if args.out:
        _write(args.out, grouping_to_json(g))
        print(f"wrote {args.out}")
    return 0


def cmd_metrics(args) -> int:
    g = load_grouping(args.grouping)
    out = {"method": g.method, "collections": len(g.collections),
           "r_hat": metrics.r_hat(g)}
    alloc_h = metrics.heuristic_allocation(g, args.budget)
    out["heuristic_allocation"] = list(alloc_h.fractions)
    if args.state:
        state = load_state(args.state, g.n)
        variances = metrics.collection_variances(g, state)
        alloc = metrics.optimal_allocation(variances, args.budget)
        r = metrics.true_r(g, state)
        out["true_r"] = r.value
        out["degenerate"] = r.degenerate
        out["variances"] = list(variances)
        out["optimal_allocation"] = list(alloc.fractions)
        if alloc.counts is not None:
            out["optimal_counts"] = [int(x) for x in alloc.counts]
    if args.format == "json":
        text = json.dumps(out, indent=1)
    else:
        lines = ["key,value"]
        for key, val in out.items():
            if isinstance(val, list):
                for i, item in enumerate(val):
                    lines.append(f"{key}[{i}],{item}")
            else:
                lines.append(f"{key},{val}")
        text = "\n".join(lines) + "\n"
    if args.out:
        _write(args.out, text)
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def cmd_emit(args) -> int:
    g = load_grouping(args.grouping)
    if args.format == "json":
        text = grouping_to_json(g)
        if args.out:
            _write(args.out, text)
        else:
            print(text)
        return 0
    if args.trotter:
        circ = trotter_step(g, args.trotter)
        text = emit_qasm(circ)
        if args.out:
            _write(args.out, text)
        else:
            print(text)
        return 0
    chunks = []
    for i, col in enumerate(g.collections):
        if col.template is None or col.layer is None:
            raise UsageError(f"collection {i + 1} has no readout circuit")
        circ = diag_circuit(col.layer, col.template)
        for q in range(g.n):
            circ.measure(q)
        chunks.append(f"// collection {i + 1}\n" + emit_qasm(circ))
    text = "\n".join(chunks)
    if args.out:
        _write(args.out, text)
    else:
        print(text)
    return 0


def cmd_verify(args) -> int:
    g = load_grouping(args.grouping)
    ham = load_hamiltonian(args.hamiltonian)
    grouped = sorted((m.term.op.to_string(), round(m.term.coeff, 12))
                     for c in g.collections for m in c.members)
    expected = sorted((t.op.to_string(), round(t.coeff, 12)) for t in ham.terms)
    if grouped != expected:
        raise VerificationFailure("grouping is not a partition of the Hamiltonian terms")
    failures = 0
    checked = 0
    for i, col in enumerate(g.collections):
        if col.template is None or col.layer is None:
            raise UsageError(f"collection {i + 1} has no readout circuit to verify")
        circ = diag_circuit(col.layer, col.template)
        for m in col.members:
            checked += 1
            if m.target is None or not oracle.conjugate_check(circ, m.term.op, m.target):
                failures += 1
                print(f"FAIL collection {i + 1}: {m.term.op.to_string()}")
    print(f"checked {checked} operators across {len(g.collections)} collections; "
          f"{failures} failures")
    if failures:
        raise VerificationFailure(f"{failures} conjugation failures")
    return 0


def cmd_simulate(args) -> int:
    g = load_grouping(args.grouping)
    ham = load_hamiltonian(args.hamiltonian)
    state = load_state(args.state, g.n)
    if args.shots < len(g.collections):
        raise UsageError("budget smaller than the number of collections")
    variances = metrics.collection_variances(g, state)
    if variances.sum() == 0.0:
        counts = metrics.counts_from_fractions(
            np.full(len(variances), 1.0 / len(variances)), args.shots)
    else:
        counts = metrics.optimal_allocation(variances, args.shots).counts
    counts = np.maximum(counts, 1)
    estimate = oracle.sample_estimate(state, g, counts, args.seed) + ham.offset
    exact = oracle.expectation(state, [m.term for c in g.collections
                                       for m in c.members]) + ham.offset
    print(f"estimate={estimate:.8f}")
    print(f"exact={exact:.8f}")
    print(f"abs_error={abs(estimate - exact):.3e}")
    return 0


def cmd_report(args) -> int:
    from . import report
    groupings = {}
    for spec in args.grouping:
        name, _, path = spec.partition("=")
        if not path:
            raise UsageError("--grouping expects NAME=path.json")
        groupings[name] = load_grouping(path)
    n = next(iter(groupings.values())).n
    state = load_state(args.state, n)
    budgets = [int(b) for b in args.budgets.split(",")]
    paths = report.convergence_report(state, groupings, budgets, args.seeds,
                                      args.out_dir)
    for p in paths:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="htpauli",
        description="Group Pauli observables and synthesize connectivity-"
                    "respecting diagonalization circuits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group", help="group a Hamiltonian file")
    p.add_argument("hamiltonian")
    p.add_argument("--method", choices=["si", "si-qwc", "ht", "ht-local"], required=True)
    p.add_argument("--graph", help="connectivity: preset string or graph file")
    p.add_argument("--subgraphs", default="all", help="template count or 'all'")
    p.add_argument("--cutoff", default="exact", help="solver cutoff or 'exact'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--value", choices=["size", "weighted"], default="weighted")
    p.add_argument("--resample", action="store_true",
                   help="redraw sampled templates every round")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", help="write grouping JSON here")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("metrics", help="shot-reduction metrics for a grouping")
    p.add_argument("grouping")
    p.add_argument("--state", help="product-state parameter JSON")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("emit", help="emit circuits or grouping JSON")
    p.add_argument("grouping")
    p.add_argument("--format", choices=["qasm", "json"], required=True)
    p.add_argument("--trotter", type=int, default=None, metavar="K",
                   help="emit one K-step product-formula circuit instead")
    p.add_argument("--out")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("verify", help="check every readout circuit against the oracle")
    p.add_argument("grouping")
    p.add_argument("hamiltonian")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="noiseless sampling estimate of <O>")
    p.add_argument("grouping")
    p.add_argument("hamiltonian")
    p.add_argument("state")
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="render convergence figures and CSV tables")
    p.add_argument("--grouping", action="append", required=True,
                   metavar="NAME=PATH", help="labelled grouping JSON (repeatable)")
    p.add_argument("--state", required=True)
    p.add_argument("--budgets", default="1000,10000,100000,1000000")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--out-dir", default="report")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except IOError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
