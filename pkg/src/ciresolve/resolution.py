"""Minimal free resolutions by degreewise syzygies, Koszul complexes and Tor."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import linalg
from .complexes import ChainComplex, GradedMap, PeriodicTail, homology_dims, minimize, residue_betti, vector_to_column
from .errors import DegreeBoundTooSmall
from .polynomial import Polynomial
from .ring import RingTower

__all__ = [
    "ModulePresentation",
    "Resolution",
    "BettiTable",
    "koszul_complex",
    "minimal_free_resolution",
    "tor_dims",
    "default_degree_bound",
]


@dataclass
class ModulePresentation:
    """``M = coker(relations : F_1 -> F_0)`` over ``Q_level``.

    ``relations`` has one column per relation; its target is the generator
    module.
    """

    tower: RingTower
    level: int
    generators: tuple[int, ...]
    relations: GradedMap

    def __post_init__(self):
        self.generators = tuple(self.generators)
        if self.relations.target != self.generators:
            raise ValueError("relation matrix must map into the generators")
        if not self.relations.check_homogeneous():
            raise ValueError("relation matrix is not homogeneous")

    @classmethod
    def from_columns(cls, tower: RingTower, level: int, generators: Sequence[int], columns: Sequence[Sequence[Polynomial]]):
        """Build a presentation from relation vectors (one polynomial per generator)."""
        generators = tuple(generators)
        degrees, entries = [], {}
        for j, col in enumerate(columns):
            if len(col) != len(generators):
                raise ValueError(f"relation {j} has {len(col)} entries, expected {len(generators)}")
            degs = {tower.degree(f) + g for f, g in zip(col, generators) if not f.is_zero()}
            if len(degs) != 1:
                raise ValueError(f"relation {j} is zero or not homogeneous")
            degrees.append(degs.pop())
            for r, f in enumerate(col):
                if not f.is_zero():
                    entries[(r, j)] = f
        rel = GradedMap(tower, level, degrees, generators, entries)
        keep = sorted({c for (_, c) in rel.entries})
        rel = rel.submatrix(range(len(generators)), keep)
        return cls(tower, level, generators, rel)

    @classmethod
    def residue_field(cls, tower: RingTower, level: int | None = None) -> "ModulePresentation":
        level = tower.c if level is None else level
        cols = [[tower.var(i)] for i in range(tower.n)]
        return cls.from_columns(tower, level, [0], cols)

    @classmethod
    def free(cls, tower: RingTower, degrees: Sequence[int] = (0,), level: int | None = None) -> "ModulePresentation":
        level = tower.c if level is None else level
        return cls(tower, level, tuple(degrees), GradedMap.zero(tower, level, (), tuple(degrees)))

    def lift(self, level: int) -> "ModulePresentation":
        """The same module presented over a shallower level ``Q_level``.

        Adds the relations ``f_j * e_i`` for ``level < j <= self.level``.
        """
        if level > self.level:
            raise ValueError("can only lift to a shallower level")
        t = self.tower
        cols = [list(col) for col in _columns(self.relations)]
        for j in range(level, self.level):
            f = t.relations[j]
            for i in range(len(self.generators)):
                col = [t.zero()] * len(self.generators)
                col[i] = f
                cols.append(col)
        return ModulePresentation.from_columns(t, level, self.generators, cols)

    def descend(self, level: int) -> "ModulePresentation":
        """The module tensored down to a deeper level."""
        if level < self.level:
            raise ValueError("can only descend to a deeper level")
        return ModulePresentation(self.tower, level, self.generators, self.relations.reduce_to(level))

    def to_json(self) -> dict:
        cols = _columns(self.relations)
        return {
            "generators": list(self.generators),
            "relations": [[f.to_json() for f in col] for col in cols],
        }


def _columns(m: GradedMap) -> list[list[Polynomial]]:
    rows = m.rows()
    return [[rows[r][c] for r in range(len(m.target))] for c in range(len(m.source))]


@dataclass
class BettiTable:
    """Graded Betti numbers ``beta[i][d]``."""

    entries: dict[int, dict[int, int]]

    @classmethod
    def from_complex(cls, c: ChainComplex, lo: int | None = None, hi: int | None = None) -> "BettiTable":
        table = residue_betti(c)
        lo = c.lo if lo is None else lo
        hi = c.hi if hi is None else hi
        return cls({i: dict(table.get(i, {})) for i in range(lo, hi + 1)})

    def total(self) -> list[int]:
        return [sum(self.entries[i].values()) for i in sorted(self.entries)]

    @property
    def indices(self) -> list[int]:
        return sorted(self.entries)

    def degrees(self) -> list[int]:
        return sorted({d for row in self.entries.values() for d in row})

    def __getitem__(self, key: tuple[int, int]) -> int:
        i, d = key
        return self.entries.get(i, {}).get(d, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BettiTable):
            return NotImplemented
        keys = set(self.entries) | set(other.entries)
        return all(
            {d: v for d, v in self.entries.get(i, {}).items() if v}
            == {d: v for d, v in other.entries.get(i, {}).items() if v}
            for i in keys
        )

    def to_text(self) -> str:
        idx = self.indices
        degs = self.degrees()
        width = max([len(str(i)) for i in idx] + [len(str(v)) for v in self.total()] + [2])
        label = max([len(str(d)) for d in degs] + [5])
        lines = [" " * (label + 1) + " ".join(str(i).rjust(width) for i in idx)]
        for d in degs:
            cells = [str(self[i, d]) if self[i, d] else "." for i in idx]
            lines.append(f"{str(d).rjust(label)}:" + " ".join(c.rjust(width) for c in cells))
        lines.append("total:".rjust(label + 1) + " ".join(str(v).rjust(width) for v in self.total()))
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "indices": self.indices,
            "entries": {str(i): {str(d): v for d, v in sorted(row.items())} for i, row in sorted(self.entries.items())},
            "total": self.total(),
        }


@dataclass
class Resolution:
    """A free resolution truncated to homological degree ``N``.

    ``degree_bound`` is the internal degree through which exactness has been
    established (``None`` when the construction is exact in every degree).
    """

    complex: ChainComplex
    presentation: ModulePresentation | None = None
    minimal: bool = False
    homological_bound: int | None = None
    degree_bound: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def tail(self) -> PeriodicTail | None:
        return self.complex.tail

    @property
    def level(self) -> int:
        return self.complex.level

    def betti(self) -> BettiTable:
        return BettiTable.from_complex(self.complex, 0, self.complex.hi)

    def total_betti(self) -> list[int]:
        return self.betti().total()

    def ranks(self) -> list[int]:
        return self.complex.ranks()


def default_degree_bound(tower: RingTower, module: ModulePresentation | None, N: int) -> int:
    degs = tower.relation_degrees
    top = max(module.generators, default=0) if module is not None else 0
    return 4 + sum(degs) + top + math.ceil(N / 2) * max(degs, default=0)


def koszul_complex(tower: RingTower, level: int, elements: Sequence[Polynomial]) -> ChainComplex:
    """The Koszul complex on homogeneous ``elements`` over ``Q_level``."""
    degs = [tower.degree(g) for g in elements]
    if any(d is None for d in degs):
        raise ValueError("Koszul elements must be nonzero and homogeneous")
    n = len(elements)
    subsets = [list(combinations(range(n), i)) for i in range(n + 1)]
    mods = [tuple(sum(degs[j] for j in S) for S in subsets[i]) for i in range(n + 1)]
    diffs = {}
    for i in range(1, n + 1):
        index = {S: k for k, S in enumerate(subsets[i - 1])}
        entries = {}
        for c, S in enumerate(subsets[i]):
            for pos, j in enumerate(S):
                rest = S[:pos] + S[pos + 1:]
                f = elements[j] if pos % 2 == 0 else -elements[j]
                entries[(index[rest], c)] = f
        diffs[i] = GradedMap(tower, level, mods[i], mods[i - 1], entries)
    return ChainComplex(tower, level, 0, mods, diffs)


class _EchelonSpan:
    """Incrementally maintained row-echelon basis of a subspace of GF(p)^n."""

    def __init__(self, n: int, p: int):
        self.p = p
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []
        self.n = n

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = v % self.p
        for row, c in zip(self.rows, self.pivots):
            if v[c]:
                v = (v - v[c] * row) % self.p
        return v

    def add(self, v: np.ndarray) -> bool:
        v = self.reduce(v)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        c = int(nz[0])
        v = v * pow(int(v[c]), -1, self.p) % self.p
        self.rows = [(r - r[c] * v) % self.p if r[c] else r for r in self.rows]
        self.rows.append(v)
        self.pivots.append(c)
        return True

    def add_columns(self, mat: np.ndarray) -> None:
        if mat.size == 0:
            return
        reduced, r, _ = linalg.rref(mat.T, self.p)
        for k in range(r):
            self.add(reduced[k])


def _select_generators(tower, level, target, subspace, gens_so_far, d, p):
    """Canonical new minimal generators in degree ``d``.

    ``subspace`` spans the degree-``d`` part of the submodule to generate;
    ``gens_so_far`` is the map from already chosen generators.  Candidates are
    the rows of the reduced echelon basis of the subspace, taken in order.
    """
    if subspace.size == 0 or subspace.shape[1] == 0:
        return []
    span = _EchelonSpan(subspace.shape[0], p)
    if gens_so_far.source:
        span.add_columns(gens_so_far.degree_matrix(d))
    reduced, r, _ = linalg.rref(subspace.T, p)
    chosen = []
    for k in range(r):
        if span.add(reduced[k]):
            chosen.append(reduced[k])
    return chosen


def _generate(tower, level, target, subspace_at, dmin, D, p, step, probe):
    """Minimal generators (through degree ``D``) of a submodule of ``target``."""
    source: list[int] = []
    entries: dict[tuple[int, int], Polynomial] = {}
    current = GradedMap(tower, level, (), target, {}, reduce=False)
    for d in range(dmin, D + 1):
        new = _select_generators(tower, level, target, subspace_at(d), current, d, p)
        for v in new:
            col = len(source)
            source.append(d)
            for r, f in vector_to_column(tower, level, target, d, v).items():
                entries[(r, col)] = f
        if new:
            current = GradedMap(tower, level, source, target, entries, reduce=False)
    if probe and target:
        if _select_generators(tower, level, target, subspace_at(D + 1), current, D + 1, p):
            raise DegreeBoundTooSmall(step, D)
    return current


def minimal_free_resolution(
    tower: RingTower,
    level: int,
    module: ModulePresentation,
    N: int,
    D: int | None = None,
    check_bound: bool = True,
) -> Resolution:
    """Minimal free resolution of ``module`` over ``Q_level`` by degreewise syzygies.

    Generators are found degree by degree up to ``D``: in each degree, new
    generators complete the span of the previously chosen ones to the whole
    kernel.  The result is exact in internal degrees ``<= D``.  With
    ``check_bound`` the kernel is probed one degree above ``D`` and
    :class:`DegreeBoundTooSmall` is raised if a generator is still missing.
    """
    if N < 0:
        raise ValueError("homological bound must be nonnegative")
    if module.level != level:
        module = module.lift(level) if module.level > level else module.descend(level)
    if D is None:
        D = default_degree_bound(tower, module, N)
    if module.generators and D < max(module.generators):
        raise DegreeBoundTooSmall(0, D)
    p = tower.p
    mods = [module.generators]
    diffs = {}
    rel = module.relations
    if N >= 1 and mods[0]:
        lo_deg = min(mods[0])

        def image_at(d):
            return rel.degree_matrix(d) if rel.source else np.zeros((0, 0), dtype=np.int64)

        d1 = _generate(tower, level, mods[0], image_at, lo_deg, D, p, 1, check_bound)
        mods.append(d1.source)
        diffs[1] = d1
    for i in range(2, N + 1):
        prev = diffs.get(i - 1)
        if prev is None or not prev.source:
            break
        lo_deg = min(prev.source)

        def kernel_at(d, prev=prev):
            mat = prev.degree_matrix(d)
            if mat.shape[1] == 0:
                return np.zeros((0, 0), dtype=np.int64)
            return linalg.kernel_basis(mat, p)

        di = _generate(tower, level, prev.source, kernel_at, lo_deg, D, p, i, check_bound)
        if not di.source:
            break
        mods.append(di.source)
        diffs[i] = di
    # drop trailing zero modules except F_0
    while len(mods) > 1 and not mods[-1]:
        mods.pop()
        diffs.pop(len(mods), None)
    complex_ = ChainComplex(tower, level, 0, mods, diffs)
    if not complex_.is_minimal():
        complex_ = minimize(complex_)
    return Resolution(complex_, module, minimal=True, homological_bound=N, degree_bound=D)


def tor_dims(
    tower: RingTower,
    level: int,
    module: ModulePresentation,
    i: int,
    window: tuple[int, int],
) -> list[int]:
    """Graded dimensions of ``Tor_i^{Q_level}(Q_{level+1}, M)`` over an internal-degree window."""
    if level >= tower.c:
        raise ValueError("no deeper level to tensor down to")
    if module.level < level + 1:
        raise ValueError("the module must be defined over Q_{level+1}")
    here = module.lift(level)
    res = minimal_free_resolution(tower, level, here, i + 1, max(window[1], max(here.generators, default=0)), check_bound=False)
    down = _tensor_down(res.complex, level + 1)
    return homology_dims(down, i, window)


def _tensor_down(c: ChainComplex, level: int) -> ChainComplex:
    diffs = {i: m.reduce_to(level) for i, m in c.diffs.items()}
    return ChainComplex(c.tower, level, c.lo, c.modules, diffs, check=False)
