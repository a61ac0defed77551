"""Graded polynomial rings over GF(p) and the tower Q = Q_0 -> Q_1 -> ... -> Q_c.

Level ``s`` of a tower is ``Q_s = Q / (f_1, ..., f_s)``.  Each graded piece
``(Q_s)_d`` is represented by a basis of standard monomials: the monomials
of degree ``d`` that are not pivots of the reduced echelon form of the
degree-``d`` slice of the ideal.  Monomials are ordered lexicographically
descending, so pivots are the lexicographically largest monomials.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import NotRegular
from .polynomial import Monomial, Polynomial, multiply

__all__ = [
    "RingTower",
    "GradedPieceBasis",
    "is_prime",
    "multiply",
    "graded_piece_basis",
    "multiplication_matrix",
    "hilbert_series",
    "certify_regular_sequence",
]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class GradedPieceBasis:
    level: int
    degree: int
    monomials: tuple[Monomial, ...]

    @property
    def dim(self) -> int:
        return len(self.monomials)


class _Piece:
    """Reduction data for ``(Q_s)_d``."""

    __slots__ = ("monomials", "index", "basis", "pivots", "reducer", "basis_monomials")

    def __init__(self, monomials, basis, pivots, reducer):
        self.monomials = monomials
        self.index = {m: i for i, m in enumerate(monomials)}
        self.basis = np.asarray(basis, dtype=np.intp)
        self.pivots = np.asarray(pivots, dtype=np.intp)
        self.reducer = reducer
        self.basis_monomials = tuple(monomials[i] for i in basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, vectors: np.ndarray, p: int) -> np.ndarray:
        """Coordinates of monomial-coefficient columns in the standard basis."""
        head = vectors[self.basis]
        if len(self.pivots):
            head = (head - linalg.matmul(self.reducer.T, vectors[self.pivots], p)) % p
        return head % p


class RingTower:
    """A graded polynomial ring with a sequence of homogeneous relations.

    ``variables`` is a sequence of ``(name, degree)`` pairs (bare names get
    degree 1).  With ``strict=True`` each relation must lie in the square of
    the homogeneous maximal ideal, i.e. have no constant or linear terms.
    """

    def __init__(self, prime: int, variables: Sequence, relations: Sequence[Polynomial] = (), strict: bool = True):
        if not is_prime(prime) or prime >= 2**31:
            raise ValueError(f"{prime} is not a prime below 2^31")
        names, weights = [], []
        for v in variables:
            if isinstance(v, str):
                name, deg = v, 1
            else:
                name, deg = v
            if int(deg) <= 0:
                raise ValueError(f"variable {name} must have positive degree")
            names.append(str(name))
            weights.append(int(deg))
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        self.p = int(prime)
        self.names = tuple(names)
        self.weights = tuple(weights)
        self.n = len(names)
        rels = []
        for j, f in enumerate(relations, start=1):
            if isinstance(f, str):
                f = parse_polynomial(f, self)
            if f.p != self.p or f.nvars != self.n:
                raise ValueError(f"relation {j} lives in a different ring")
            if f.is_zero():
                raise ValueError(f"relation {j} is zero")
            if not f.is_homogeneous(self.weights):
                raise ValueError(f"relation {j} is not homogeneous")
            if strict and any(sum(m) < 2 for m, _ in f.items()):
                raise ValueError(f"relation {j} is not in the square of the maximal ideal")
            if f.degree(self.weights) <= 0:
                raise ValueError(f"relation {j} must have positive degree")
            rels.append(f)
        self.relations = tuple(rels)
        self.c = len(rels)
        self.certified_degree: int | None = None
        self._lock = threading.RLock()
        self._monomials: dict[int, list[Monomial]] = {}
        self._pieces: dict[tuple[int, int], _Piece] = {}
        self._mult: dict[tuple, np.ndarray] = {}
        self._nf: dict[tuple, Polynomial] = {}

    # -- elements ---------------------------------------------------------
    def poly(self, terms) -> Polynomial:
        if isinstance(terms, str):
            return parse_polynomial(terms, self)
        return Polynomial(terms, self.p, self.n)

    def var(self, name: str | int) -> Polynomial:
        i = self.names.index(name) if isinstance(name, str) else int(name)
        return Polynomial.variable(i, self.p, self.n)

    def one(self) -> Polynomial:
        return Polynomial.constant(1, self.p, self.n)

    def zero(self) -> Polynomial:
        return Polynomial.zero(self.p, self.n)

    def degree(self, f: Polynomial) -> int | None:
        return f.degree(self.weights)

    @property
    def relation_degrees(self) -> tuple[int, ...]:
        return tuple(f.degree(self.weights) for f in self.relations)

    @property
    def regular_certified(self) -> bool:
        return self.certified_degree is not None

    def describe(self) -> str:
        ring = f"GF({self.p})[{','.join(self.names)}]"
        if not self.relations:
            return ring
        rels = ", ".join(f.to_string(self.names) for f in self.relations)
        return f"{ring}/({rels})"

    def __repr__(self) -> str:
        return f"RingTower({self.describe()})"

    # -- graded pieces ----------------------------------------------------
    def monomials(self, d: int) -> list[Monomial]:
        """All monomials of weighted degree ``d``, lexicographically descending."""
        if d < 0:
            return []
        with self._lock:
            cached = self._monomials.get(d)
            if cached is not None:
                return cached
            out: list[Monomial] = []

            def rec(i: int, left: int, acc: list[int]) -> None:
                if i == self.n:
                    if left == 0:
                        out.append(tuple(acc))
                    return
                w = self.weights[i]
                for e in range(left // w, -1, -1):
                    acc.append(e)
                    rec(i + 1, left - e * w, acc)
                    acc.pop()

            rec(0, d, [])
            self._monomials[d] = out
            return out

    def _check_level(self, s: int) -> None:
        if not 0 <= s <= self.c:
            raise ValueError(f"level {s} outside 0..{self.c}")

    def _piece(self, s: int, d: int) -> _Piece:
        self._check_level(s)
        key = (s, d)
        with self._lock:
            piece = self._pieces.get(key)
            if piece is not None:
                return piece
            mons = self.monomials(d)
            index = {m: i for i, m in enumerate(mons)}
            rows = []
            for f, e in zip(self.relations[:s], self.relation_degrees[:s]):
                for m in self.monomials(d - e):
                    row = np.zeros(len(mons), dtype=np.int64)
                    for mono, coeff in f.items():
                        row[index[tuple(a + b for a, b in zip(m, mono))]] += coeff
                    rows.append(row % self.p)
            if rows:
                reduced, r, pivots = linalg.rref(np.array(rows), self.p)
            else:
                reduced, r, pivots = np.zeros((0, len(mons)), dtype=np.int64), 0, []
            pivset = set(pivots)
            basis = [i for i in range(len(mons)) if i not in pivset]
            reducer = reduced[:r][:, basis] if r else np.zeros((0, len(basis)), dtype=np.int64)
            piece = _Piece(mons, basis, pivots, reducer)
            self._pieces[key] = piece
            return piece

    def graded_piece_basis(self, s: int, d: int) -> GradedPieceBasis:
        if d < 0:
            return GradedPieceBasis(s, d, ())
        return GradedPieceBasis(s, d, self._piece(s, d).basis_monomials)

    def dim(self, s: int, d: int) -> int:
        if d < 0:
            return 0
        return self._piece(s, d).dim

    def hilbert_series(self, s: int, D: int) -> list[int]:
        if D < 0:
            raise ValueError("degree bound must be nonnegative")
        return [self.dim(s, d) for d in range(D + 1)]

    # -- coordinates ------------------------------------------------------
    def coords(self, s: int, f: Polynomial, d: int) -> np.ndarray:
        """Coordinates of the degree-``d`` part of ``f`` in ``(Q_s)_d``."""
        piece = self._piece(s, d)
        vec = np.zeros((len(piece.monomials), 1), dtype=np.int64)
        for mono, c in f.items():
            i = piece.index.get(mono)
            if i is not None:
                vec[i, 0] = c
        return piece.reduce(vec, self.p)[:, 0]

    def from_coords(self, s: int, d: int, vec) -> Polynomial:
        piece = self._piece(s, d)
        terms = {piece.basis_monomials[i]: int(c) for i, c in enumerate(vec) if int(c) % self.p}
        return Polynomial(terms, self.p, self.n)

    def normal_form(self, s: int, f: Polynomial) -> Polynomial:
        """Canonical representative of ``f`` modulo ``(f_1..f_s)``."""
        if f.is_zero() or s == 0:
            return f
        key = (s, f.key())
        cached = self._nf.get(key)
        if cached is not None:
            return cached
        by_degree: dict[int, dict] = {}
        for mono, c in f.items():
            d = sum(e * w for e, w in zip(mono, self.weights))
            by_degree.setdefault(d, {})[mono] = c
        out = self.zero()
        for d, terms in by_degree.items():
            part = Polynomial(terms, self.p, self.n)
            out = out + self.from_coords(s, d, self.coords(s, part, d))
        with self._lock:
            self._nf[key] = out
        return out

    def multiplication_matrix(self, s: int, g: Polynomial, d: int, g_degree: int | None = None) -> np.ndarray:
        """Matrix of multiplication by ``g`` from ``(Q_s)_d`` to ``(Q_s)_{d+deg g}``."""
        e = self.degree(g) if g_degree is None else g_degree
        if e is None:
            raise ValueError("the zero polynomial has no degree; pass g_degree")
        src = self.dim(s, d)
        if d < 0 or d + e < 0:
            return np.zeros((max(self.dim(s, d + e), 0), src), dtype=np.int64)
        key = (s, g.key(), d, e)
        cached = self._mult.get(key)
        if cached is not None:
            return cached
        source = self._piece(s, d)
        target = self._piece(s, d + e)
        vecs = np.zeros((len(target.monomials), source.dim), dtype=np.int64)
        for j, b in enumerate(source.basis_monomials):
            for mono, c in g.items():
                vecs[target.index[tuple(x + y for x, y in zip(b, mono))], j] += c
        mat = target.reduce(vecs % self.p, self.p)
        mat.setflags(write=False)
        with self._lock:
            self._mult[key] = mat
        return mat

    # -- regularity -------------------------------------------------------
    def certify_regular_sequence(self, D: int) -> list[bool]:
        """Check ``HS(Q_s) = HS(Q) * prod_{j<=s} (1 - t^{deg f_j})`` through degree ``D``.

        Returns one flag per level ``0..c`` (all true) and records ``D`` as
        the certified degree; raises :class:`NotRegular` at the first level
        and degree where the identity fails.
        """
        if D < 0:
            raise ValueError("degree bound must be nonnegative")
        # monomial counts are independent of the echelon-form computation
        expected = [len(self.monomials(d)) for d in range(D + 1)]
        flags = [True]
        for s, e in enumerate(self.relation_degrees, start=1):
            expected = [expected[d] - (expected[d - e] if d >= e else 0) for d in range(D + 1)]
            actual = self.hilbert_series(s, D)
            for d in range(D + 1):
                if actual[d] != expected[d]:
                    raise NotRegular(s, d)
            flags.append(True)
        self.certified_degree = D
        return flags


def graded_piece_basis(t: RingTower, s: int, d: int) -> GradedPieceBasis:
    return t.graded_piece_basis(s, d)


def multiplication_matrix(t: RingTower, s: int, g: Polynomial, d: int) -> np.ndarray:
    return t.multiplication_matrix(s, g, d)


def hilbert_series(t: RingTower, s: int, D: int) -> list[int]:
    return t.hilbert_series(s, D)


def certify_regular_sequence(t: RingTower, D: int) -> list[bool]:
    return t.certify_regular_sequence(D)


def parse_polynomial(text: str, t: RingTower) -> Polynomial:
    """Parse strings such as ``"x^2 + 3*x*y - y^2"`` in the variables of ``t``."""
    out = t.zero()
    expr = text.replace(" ", "").replace("-", "+-")
    for term in filter(None, expr.split("+")):
        sign = -1 if term.startswith("-") else 1
        term = term.lstrip("-")
        coeff = sign
        mono = [0] * t.n
        for factor in term.split("*"):
            if factor.isdigit():
                coeff *= int(factor)
                continue
            name, _, power = factor.partition("^")
            if name not in t.names:
                raise ValueError(f"unknown variable {name!r}")
            mono[t.names.index(name)] += int(power) if power else 1
        out = out + Polynomial({tuple(mono): coeff}, t.p, t.n)
    return out


def monomials_of_degree(weights: Iterable[int], d: int) -> int:
    """Number of monomials of weighted degree ``d`` (used as an oracle in tests)."""
    weights = list(weights)
    counts = [1] + [0] * max(d, 0)
    for w in weights:
        for k in range(w, d + 1):
            counts[k] += counts[k - w]
    return counts[d] if d >= 0 else 0
