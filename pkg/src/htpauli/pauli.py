"""Pauli operators and the binary symplectic picture of single-qubit Cliffords.

An n-qubit Pauli is stored phase-free as exponent vectors (r, s); the
Hermitian operator it denotes is i^q X^r Z^s with q = #Y mod 4 (one factor
i per Y, since Y = iXZ).  String position 1 (leftmost) is qubit 1.

Each of the six single-qubit Cliffords carries its 2x2 GF(2) matrix
A = [[a_xx, a_xz], [a_zx, a_zz]] and the phase exponents alpha(r, s) in
Z/4Z that govern U X^r Z^s U† = i^alpha X^k Z^m.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .f2la import asbits

PAULI_CHARS = "IXYZ"


@dataclass(frozen=True)
class PauliOp:
    """Phase-free n-qubit Pauli with X-exponents r and Z-exponents s."""

    n: int
    r: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", asbits(self.r))
        object.__setattr__(self, "s", asbits(self.s))
        if self.r.shape != (self.n,) or self.s.shape != (self.n,):
            raise ValueError("exponent vectors must have length n")

    def key(self) -> tuple:
        return (self.n, self.r.tobytes(), self.s.tobytes())

    def __eq__(self, other):
        return isinstance(other, PauliOp) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @property
    def phase_exponent(self) -> int:
        """q in i^q X^r Z^s, i.e. the Y-count mod 4."""
        return int(np.count_nonzero(self.r & self.s)) % 4

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.r | self.s))

    def support(self) -> tuple[int, ...]:
        """0-based qubit indices carrying a non-identity factor."""
        return tuple(int(i) for i in np.flatnonzero(self.r | self.s))

    def factor(self, j: int) -> str:
        return "IXZY"[int(self.r[j]) + 2 * int(self.s[j])]

    def to_string(self) -> str:
        return "".join("IXZY"[int(rj) + 2 * int(sj)] for rj, sj in zip(self.r, self.s))

    def __repr__(self):
        return f"PauliOp({self.to_string()!r})"


def parse_pauli(text: str, n: int | None = None) -> PauliOp:
    """Parse a string over {I, X, Y, Z}; leftmost character is qubit 1."""
    if n is not None and len(text) != n:
        raise ValueError(f"expected length {n}, got {len(text)}")
    r = np.zeros(len(text), dtype=np.uint8)
    s = np.zeros(len(text), dtype=np.uint8)
    for j, ch in enumerate(text):
        if ch == "X":
            r[j] = 1
        elif ch == "Y":
            r[j] = 1
            s[j] = 1
        elif ch == "Z":
            s[j] = 1
        elif ch != "I":
            raise ValueError(f"invalid Pauli character {ch!r} at position {j + 1}")
    return PauliOp(len(text), r, s)


def format_pauli(op: PauliOp) -> str:
    return op.to_string()


def commutes(p: PauliOp, q: PauliOp) -> bool:
    """Symplectic commutation test: r_p.s_q + s_p.r_q = 0 mod 2."""
    if p.n != q.n:
        raise ValueError("qubit counts differ")
    return int(np.bitwise_xor.reduce((p.r & q.s) ^ (p.s & q.r))) == 0


def qwc(p: PauliOp, q: PauliOp) -> bool:
    """Qubit-wise commutation: factors equal or one is identity, per qubit."""
    if p.n != q.n:
        raise ValueError("qubit counts differ")
    p_id = (p.r | p.s) == 0
    q_id = (q.r | q.s) == 0
    same = (p.r == q.r) & (p.s == q.s)
    return bool(np.all(p_id | q_id | same))


@dataclass(frozen=True)
class PauliTerm:
    op: PauliOp
    coeff: float

    def __post_init__(self):
        if not np.isfinite(self.coeff):
            raise ValueError("coefficient must be finite")


@dataclass(frozen=True)
class SingleQubitClifford:
    """One of the six single-qubit Cliffords (products of H and S).

    ``label`` names the defining word in matrix order, e.g. "HS" is the
    unitary H @ S.  ``a_xx`` .. ``a_zz`` form the GF(2) matrix A and
    ``alpha01``/``alpha10`` are the phase exponents alpha(0,1)/alpha(1,0).
    """

    label: str
    a_xx: int
    a_xz: int
    a_zx: int
    a_zz: int
    alpha01: int
    alpha10: int

    def matrix(self) -> np.ndarray:
        return np.array([[self.a_xx, self.a_xz], [self.a_zx, self.a_zz]], dtype=np.uint8)

    def alpha(self, r: int, s: int) -> int:
        if r and s:
            return (self.alpha10 + self.alpha01 + 2 * self.a_xz * self.a_zx) % 4
        if r:
            return self.alpha10
        if s:
            return self.alpha01
        return 0

    def unitary(self) -> np.ndarray:
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
        s = np.array([[1, 0], [0, 1j]], dtype=complex)
        u = np.eye(2, dtype=complex)
        for ch in self.label:
            if ch == "H":
                u = u @ h
            elif ch == "S":
                u = u @ s
        return u


CLIFFORD_GATES = (
    SingleQubitClifford("I", 1, 0, 0, 1, 0, 0),
    SingleQubitClifford("H", 0, 1, 1, 0, 0, 0),
    SingleQubitClifford("S", 1, 0, 1, 1, 0, 1),
    SingleQubitClifford("HSH", 1, 1, 0, 1, 3, 0),
    SingleQubitClifford("HS", 1, 1, 1, 0, 0, 3),
    SingleQubitClifford("SH", 0, 1, 1, 1, 1, 0),
)

GATE_BY_LABEL = {g.label: g for g in CLIFFORD_GATES}
_GATE_BY_MATRIX = {g.matrix().tobytes(): g for g in CLIFFORD_GATES}


def gate_from_matrix(a) -> SingleQubitClifford:
    """Look up the unique Clifford label whose GF(2) matrix equals ``a``."""
    m = asbits(a)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    det = (int(m[0, 0]) * int(m[1, 1]) + int(m[0, 1]) * int(m[1, 0])) % 2
    if det != 1:
        raise ValueError("matrix is singular over GF(2)")
    return _GATE_BY_MATRIX[m.tobytes()]


@dataclass(frozen=True)
class CliffordLayer:
    """A tensor product of single-qubit Cliffords, one per qubit."""

    gates: tuple[SingleQubitClifford, ...]

    @classmethod
    def from_labels(cls, labels) -> "CliffordLayer":
        return cls(tuple(GATE_BY_LABEL[l] for l in labels))

    @classmethod
    def identity(cls, n: int) -> "CliffordLayer":
        return cls((GATE_BY_LABEL["I"],) * n)

    @property
    def n(self) -> int:
        return len(self.gates)

    def labels(self) -> tuple[str, ...]:
        return tuple(g.label for g in self.gates)

    def a_vectors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        axx = np.array([g.a_xx for g in self.gates], dtype=np.uint8)
        axz = np.array([g.a_xz for g in self.gates], dtype=np.uint8)
        azx = np.array([g.a_zx for g in self.gates], dtype=np.uint8)
        azz = np.array([g.a_zz for g in self.gates], dtype=np.uint8)
        return axx, axz, azx, azz


def layer_conjugate(layer: CliffordLayer, p: PauliOp) -> tuple[np.ndarray, np.ndarray, int]:
    """Conjugate X^r Z^s by the layer: returns (k, m, phase_q) with

    L X^r Z^s L† = i^phase_q X^k Z^m, phase_q = sum_j alpha_j(r_j, s_j) mod 4.
    """
    if layer.n != p.n:
        raise ValueError("layer and operator sizes differ")
    axx, axz, azx, azz = layer.a_vectors()
    k = (axx & p.r) ^ (axz & p.s)
    m = (azx & p.r) ^ (azz & p.s)
    phase = sum(g.alpha(int(rj), int(sj)) for g, rj, sj in zip(layer.gates, p.r, p.s)) % 4
    return k, m, phase


@dataclass(frozen=True)
class SignedZ:
    """A diagonal target ±Z^k."""

    k: np.ndarray
    sign: int

    def __post_init__(self):
        object.__setattr__(self, "k", asbits(self.k))
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def to_string(self) -> str:
        body = "".join("Z" if b else "I" for b in self.k)
        return ("+" if self.sign > 0 else "-") + body

    def __eq__(self, other):
        return (isinstance(other, SignedZ) and self.sign == other.sign
                and np.array_equal(self.k, other.k))

    def __hash__(self):
        return hash((self.sign, self.k.tobytes()))


def parse_signed_z(text: str) -> SignedZ:
    sign = 1
    if text[0] in "+-":
        sign = -1 if text[0] == "-" else 1
        text = text[1:]
    k = np.array([1 if ch == "Z" else 0 for ch in text], dtype=np.uint8)
    if any(ch not in "IZ" for ch in text):
        raise ValueError("signed-Z string must be over {I, Z}")
    return SignedZ(k, sign)
