"""Sparse multivariate polynomials over GF(p)."""
from __future__ import annotations

from typing import Iterable, Mapping

Monomial = tuple[int, ...]


class Polynomial:
    """An immutable polynomial stored as ``{exponent tuple: coefficient}``.

    Coefficients are residues in ``[1, p)``; zero coefficients are never
    stored.  Instances are hashable and compare by value.
    """

    __slots__ = ("p", "nvars", "_terms", "_key")

    def __init__(self, terms: Mapping[Monomial, int] | Iterable[tuple[Monomial, int]], p: int, nvars: int):
        self.p = p
        self.nvars = nvars
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, int] = {}
        for mono, coeff in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars:
                raise ValueError(f"monomial {mono} has {len(mono)} exponents, expected {nvars}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = (clean.get(mono, 0) + int(coeff)) % p
            if c:
                clean[mono] = c
            else:
                clean.pop(mono, None)
        self._terms = clean
        self._key = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, p: int, nvars: int) -> "Polynomial":
        return cls({}, p, nvars)

    @classmethod
    def constant(cls, c: int, p: int, nvars: int) -> "Polynomial":
        return cls({(0,) * nvars: c}, p, nvars)

    @classmethod
    def variable(cls, i: int, p: int, nvars: int) -> "Polynomial":
        mono = [0] * nvars
        mono[i] = 1
        return cls({tuple(mono): 1}, p, nvars)

    @classmethod
    def monomial(cls, mono: Monomial, p: int, coeff: int = 1) -> "Polynomial":
        return cls({tuple(mono): coeff}, p, len(mono))

    # -- access -----------------------------------------------------------
    @property
    def terms(self) -> dict[Monomial, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def constant_term(self) -> int:
        return self._terms.get((0,) * self.nvars, 0)

    def degrees(self, weights: Iterable[int]) -> set[int]:
        w = tuple(weights)
        return {sum(e * wi for e, wi in zip(m, w)) for m in self._terms}

    def degree(self, weights: Iterable[int]) -> int | None:
        """Weighted degree of a homogeneous polynomial; ``None`` for zero."""
        degs = self.degrees(weights)
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("polynomial is not homogeneous")
        return degs.pop()

    def is_homogeneous(self, weights: Iterable[int]) -> bool:
        return len(self.degrees(weights)) <= 1

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self._terms.items()))
        return self._key

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Polynomial") -> None:
        if self.p != other.p or self.nvars != other.nvars:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out, self.p, self.nvars)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self._terms.items()}, self.p, self.nvars)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c: int) -> "Polynomial":
        c %= self.p
        if c == 0:
            return Polynomial.zero(self.p, self.nvars)
        return Polynomial({m: v * c for m, v in self._terms.items()}, self.p, self.nvars)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        out: dict[Monomial, int] = {}
        p = self.p
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = (out.get(m, 0) + c1 * c2) % p
        return Polynomial(out, p, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.constant(1, self.p, self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.p == other.p and self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.p, self.nvars, self.key()))

    # -- display ----------------------------------------------------------
    def to_string(self, names: Iterable[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = list(names) if names is not None else [f"x{i}" for i in range(self.nvars)]
        parts = []
        for mono, c in sorted(self._terms.items(), reverse=True):
            factors = []
            for name, e in zip(names, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self.to_string()!r}, p={self.p})"

    def to_json(self) -> list:
        """Encoding used by the input files: ``[[exponents, coeff], ...]``."""
        return [[list(m), c] for m, c in sorted(self._terms.items(), reverse=True)]

    @classmethod
    def from_json(cls, data, p: int, nvars: int) -> "Polynomial":
        return cls([(tuple(m), c) for m, c in data], p, nvars)


def multiply(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b
