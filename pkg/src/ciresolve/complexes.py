"""Graded free modules, homogeneous matrices and chain complexes over a tower level.

Conventions
-----------
* A graded free module is a tuple of generator degrees.
* A :class:`GradedMap` with twist ``w`` sends a generator of degree ``g`` to an
  element of internal degree ``g - w``; entry ``(r, c)`` is homogeneous of
  degree ``source[c] - target[r] - w``.  Differentials have twist 0.
* Differentials ``d_i : C_i -> C_{i-1}`` lower homological degree.
* A chain map of shift ``a`` has components ``phi_i : X_i -> Y_{i-a}`` and
  satisfies ``d phi = (-1)^a phi d``.
* The cone of ``phi`` has ``cone_i = Y_i + X_{i-1+a}`` (the ``X`` generators
  lowered by the twist) and differential ``[[d_Y, phi], [0, -(-1)^a d_X]]``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg
from .errors import LiftFailed
from .polynomial import Polynomial
from .ring import RingTower

__all__ = [
    "GradedMap",
    "ChainComplex",
    "ChainMap",
    "PeriodicTail",
    "verify_complex",
    "homology_dims",
    "homology_table",
    "mapping_cone",
    "minimize",
    "suspend",
    "residue_betti",
    "solve_lift",
]

Degrees = tuple[int, ...]


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("CIRESOLVE_THREADS", "1")))
    except ValueError:
        return 1


def piece_offsets(tower: RingTower, level: int, gens: Sequence[int], d: int) -> tuple[list[int], int]:
    """Offsets of each generator's block inside ``(F)_d`` and the total dimension."""
    offsets, total = [], 0
    for g in gens:
        offsets.append(total)
        total += tower.dim(level, d - g)
    return offsets, total


class GradedMap:
    """A homogeneous matrix of polynomials between graded free modules."""

    __slots__ = ("tower", "level", "source", "target", "twist", "entries")

    def __init__(
        self,
        tower: RingTower,
        level: int,
        source: Iterable[int],
        target: Iterable[int],
        entries: Mapping[tuple[int, int], Polynomial] | None = None,
        twist: int = 0,
        reduce: bool = True,
    ):
        self.tower = tower
        self.level = level
        self.source: Degrees = tuple(source)
        self.target: Degrees = tuple(target)
        self.twist = twist
        clean: dict[tuple[int, int], Polynomial] = {}
        for (r, c), f in (entries or {}).items():
            if not (0 <= r < len(self.target) and 0 <= c < len(self.source)):
                raise IndexError(f"entry {(r, c)} outside a {len(self.target)}x{len(self.source)} matrix")
            if reduce:
                f = tower.normal_form(level, f)
            if not f.is_zero():
                clean[(r, c)] = f
        self.entries = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, tower, level, source, target, twist=0) -> "GradedMap":
        return cls(tower, level, source, target, {}, twist, reduce=False)

    @classmethod
    def identity(cls, tower, level, gens) -> "GradedMap":
        one = tower.one()
        return cls(tower, level, gens, gens, {(i, i): one for i in range(len(gens))}, reduce=False)

    @classmethod
    def from_rows(cls, tower, level, source, target, rows, twist=0) -> "GradedMap":
        entries = {}
        for r, row in enumerate(rows):
            for c, f in enumerate(row):
                if f:
                    entries[(r, c)] = f
        return cls(tower, level, source, target, entries, twist)

    # -- basic queries ----------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return len(self.target), len(self.source)

    def entry(self, r: int, c: int) -> Polynomial:
        return self.entries.get((r, c)) or self.tower.zero()

    def is_zero(self) -> bool:
        return not self.entries

    def rows(self) -> list[list[Polynomial]]:
        zero = self.tower.zero()
        out = [[zero] * len(self.source) for _ in self.target]
        for (r, c), f in self.entries.items():
            out[r][c] = f
        return out

    def check_homogeneous(self) -> bool:
        w = self.tower.weights
        for (r, c), f in self.entries.items():
            if f.degrees(w) != {self.source[c] - self.target[r] - self.twist}:
                return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (
            self.level == other.level
            and self.source == other.source
            and self.target == other.target
            and self.twist == other.twist
            and self.entries == other.entries
        )

    def __repr__(self) -> str:
        return f"GradedMap({len(self.target)}x{len(self.source)}, level={self.level}, twist={self.twist}, nnz={len(self.entries)})"

    # -- arithmetic -------------------------------------------------------
    def _like(self, entries, reduce=True, **kw) -> "GradedMap":
        args = dict(source=self.source, target=self.target, twist=self.twist)
        args.update(kw)
        return GradedMap(self.tower, self.level, args["source"], args["target"], entries, args["twist"], reduce=reduce)

    def __add__(self, other: "GradedMap") -> "GradedMap":
        if self.shape != other.shape:
            raise ValueError(f"cannot add {self.shape} and {other.shape} maps")
        out = dict(self.entries)
        for k, f in other.entries.items():
            out[k] = out[k] + f if k in out else f
        return self._like(out, reduce=False)._drop_zeros()

    def __neg__(self) -> "GradedMap":
        return self._like({k: -f for k, f in self.entries.items()}, reduce=False)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + (-other)

    def scale(self, c: int) -> "GradedMap":
        if c % self.tower.p == 1:
            return self
        return self._like({k: f.scale(c) for k, f in self.entries.items()}, reduce=False)._drop_zeros()

    def _drop_zeros(self) -> "GradedMap":
        self.entries = {k: f for k, f in self.entries.items() if not f.is_zero()}
        return self

    def compose(self, other: "GradedMap") -> "GradedMap":
        """``self o other``; ``other.target`` must equal ``self.source``."""
        if other.target != self.source:
            raise ValueError("composition of incompatible maps")
        by_col: dict[int, list[tuple[int, Polynomial]]] = {}
        for (r, k), f in self.entries.items():
            by_col.setdefault(k, []).append((r, f))
        acc: dict[tuple[int, int], Polynomial] = {}
        for (k, c), g in other.entries.items():
            for r, f in by_col.get(k, ()):
                prod = f * g
                key = (r, c)
                acc[key] = acc[key] + prod if key in acc else prod
        return GradedMap(self.tower, self.level, other.source, self.target, acc, self.twist + other.twist)

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        return self.compose(other)

    def reduce_to(self, level: int) -> "GradedMap":
        """Entries taken modulo the relations of a deeper level."""
        return GradedMap(self.tower, level, self.source, self.target, self.entries, self.twist)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "GradedMap":
        rmap = {r: i for i, r in enumerate(rows)}
        cmap = {c: j for j, c in enumerate(cols)}
        entries = {
            (rmap[r], cmap[c]): f for (r, c), f in self.entries.items() if r in rmap and c in cmap
        }
        return GradedMap(
            self.tower, self.level, [self.source[c] for c in cols], [self.target[r] for r in rows],
            entries, self.twist, reduce=False,
        )

    # -- linear algebra views --------------------------------------------
    def degree_matrix(self, d: int) -> np.ndarray:
        """Matrix of the map from ``(source)_d`` to ``(target)_{d - twist}``."""
        t, s = self.tower, self.level
        src_off, src_dim = piece_offsets(t, s, self.source, d)
        tgt_off, tgt_dim = piece_offsets(t, s, self.target, d - self.twist)
        out = np.zeros((tgt_dim, src_dim), dtype=np.int64)
        for (r, c), f in self.entries.items():
            dc = d - self.source[c]
            if dc < 0:
                continue
            width = t.dim(s, dc)
            height = t.dim(s, d - self.twist - self.target[r])
            if not width or not height:
                continue
            block = t.multiplication_matrix(s, f, dc, self.source[c] - self.target[r] - self.twist)
            out[tgt_off[r]:tgt_off[r] + height, src_off[c]:src_off[c] + width] += block
        return out % t.p

    def column_vector(self, c: int) -> np.ndarray:
        """Coordinates of the image of generator ``c``."""
        t, s = self.tower, self.level
        d = self.source[c] - self.twist
        offsets, total = piece_offsets(t, s, self.target, d)
        vec = np.zeros(total, dtype=np.int64)
        for (r, cc), f in self.entries.items():
            if cc != c:
                continue
            dr = d - self.target[r]
            vec[offsets[r]:offsets[r] + t.dim(s, dr)] = t.coords(s, f, dr)
        return vec

    def constant_part(self, source_rows: Sequence[int] | None = None) -> dict[tuple[int, int], int]:
        """Entries of the map tensored with the residue field."""
        return {k: f.constant_term() for k, f in self.entries.items() if f.constant_term()}

    def to_lists(self) -> list[list[str]]:
        names = self.tower.names
        return [[f.to_string(names) for f in row] for row in self.rows()]


def vector_to_column(tower: RingTower, level: int, gens: Sequence[int], d: int, vec) -> dict[int, Polynomial]:
    """Split a coordinate vector of ``(F)_d`` into one polynomial per generator."""
    out = {}
    off = 0
    for r, g in enumerate(gens):
        width = tower.dim(level, d - g)
        if width:
            part = vec[off:off + width]
            if np.any(part):
                out[r] = tower.from_coords(level, d - g, part)
        off += width
    return out


def block_map(tower, level, source_blocks, target_blocks, blocks, twist=0) -> GradedMap:
    """Assemble a map from blocks ``{(target_block, source_block): GradedMap}``."""
    src = [g for b in source_blocks for g in b]
    tgt = [g for b in target_blocks for g in b]
    src_off = np.cumsum([0] + [len(b) for b in source_blocks])
    tgt_off = np.cumsum([0] + [len(b) for b in target_blocks])
    entries = {}
    for (bi, bj), m in blocks.items():
        if m is None:
            continue
        for (r, c), f in m.entries.items():
            entries[(int(tgt_off[bi]) + r, int(src_off[bj]) + c)] = f
    return GradedMap(tower, level, src, tgt, entries, twist, reduce=False)


@dataclass(frozen=True)
class PeriodicTail:
    """From ``start`` on, index ``i + period`` repeats index ``i`` with degrees raised by ``shift``."""

    start: int
    shift: int
    period: int = 2

    def to_dict(self) -> dict:
        return {"start": self.start, "period": self.period, "shift": self.shift}


class ChainComplex:
    """A bounded window ``[lo, hi]`` of a complex of graded free modules over ``Q_level``."""

    def __init__(
        self,
        tower: RingTower,
        level: int,
        lo: int,
        modules: Sequence[Iterable[int]],
        differentials: Mapping[int, GradedMap] | None = None,
        tail: PeriodicTail | None = None,
        check: bool = True,
        meta: dict | None = None,
    ):
        self.tower = tower
        self.level = level
        self.lo = lo
        self.modules: list[Degrees] = [tuple(m) for m in modules]
        self.tail = tail
        self.meta = dict(meta or {})
        self.diffs: dict[int, GradedMap] = {}
        for i, m in (differentials or {}).items():
            if not (self.lo < i <= self.hi):
                if m.is_zero():
                    continue
                raise ValueError(f"differential d_{i} outside the support window")
            if m.source != self.module(i) or m.target != self.module(i - 1):
                raise ValueError(f"d_{i} does not match the modules C_{i} -> C_{i - 1}")
            if m.level != level or m.twist != 0:
                raise ValueError(f"d_{i} has the wrong level or a nonzero twist")
            self.diffs[i] = m
        if check:
            bad = self.first_failure()
            if bad is not None:
                raise ValueError(f"d_{bad - 1} o d_{bad} != 0")

    @property
    def hi(self) -> int:
        return self.lo + len(self.modules) - 1

    def indices(self) -> range:
        return range(self.lo, self.hi + 1)

    def module(self, i: int) -> Degrees:
        if self.lo <= i <= self.hi:
            return self.modules[i - self.lo]
        return ()

    def rank(self, i: int) -> int:
        return len(self.module(i))

    def ranks(self) -> list[int]:
        return [len(m) for m in self.modules]

    def d(self, i: int) -> GradedMap:
        m = self.diffs.get(i)
        if m is None:
            return GradedMap.zero(self.tower, self.level, self.module(i), self.module(i - 1))
        return m

    def first_failure(self) -> int | None:
        for i in range(self.lo + 2, self.hi + 1):
            if i in self.diffs and (i - 1) in self.diffs:
                if not self.diffs[i - 1].compose(self.diffs[i]).is_zero():
                    return i
        return None

    def is_homogeneous(self) -> bool:
        return all(m.check_homogeneous() for m in self.diffs.values())

    def is_minimal(self) -> bool:
        return all(f.constant_term() == 0 for m in self.diffs.values() for f in m.entries.values())

    def generator_degrees(self) -> dict[int, Degrees]:
        return {i: self.module(i) for i in self.indices()}

    def truncate(self, lo: int | None = None, hi: int | None = None) -> "ChainComplex":
        lo = self.lo if lo is None else max(lo, self.lo)
        hi = self.hi if hi is None else min(hi, self.hi)
        mods = [self.module(i) for i in range(lo, hi + 1)]
        diffs = {i: m for i, m in self.diffs.items() if lo < i <= hi}
        return ChainComplex(self.tower, self.level, lo, mods, diffs, self.tail, check=False, meta=self.meta)

    def expand(self, hi: int) -> "ChainComplex":
        """Extend a complex with a periodic tail through index ``hi``."""
        if hi <= self.hi:
            return self
        if self.tail is None:
            raise ValueError("complex has no periodic tail to expand")
        per, shift = self.tail.period, self.tail.shift
        if self.hi - per < self.tail.start:
            raise ValueError("window too short to expand from the tail")
        mods = list(self.modules)
        diffs = dict(self.diffs)
        for i in range(self.hi + 1, hi + 1):
            mods.append(tuple(g + shift for g in mods[i - per - self.lo]))
            old = diffs.get(i - per)
            if old is not None:
                diffs[i] = GradedMap(
                    self.tower, self.level, mods[i - self.lo], mods[i - 1 - self.lo], old.entries, reduce=False
                )
        return ChainComplex(self.tower, self.level, self.lo, mods, diffs, self.tail, check=False, meta=self.meta)

    def __repr__(self) -> str:
        return f"ChainComplex(level={self.level}, lo={self.lo}, ranks={self.ranks()})"


def verify_complex(c: ChainComplex) -> tuple[bool, int | None]:
    """``(True, None)`` if every ``d_{i-1} d_i`` vanishes, else ``(False, i)``."""
    bad = c.first_failure()
    return bad is None, bad


def _dim_module(c: ChainComplex, i: int, d: int) -> int:
    return piece_offsets(c.tower, c.level, c.module(i), d)[1]


def _rank_at(c: ChainComplex, i: int, d: int) -> int:
    m = c.diffs.get(i)
    if m is None or m.is_zero():
        return 0
    mat = m.degree_matrix(d)
    return linalg.rank(mat, c.tower.p) if mat.size else 0


def homology_dims(c: ChainComplex, i: int, window: tuple[int, int]) -> list[int]:
    """``dim_k H_i(c)_d`` for each internal degree ``d`` in the closed window."""
    a, b = window

    def one(d: int) -> int:
        dim = _dim_module(c, i, d)
        if dim == 0:
            return 0
        return dim - _rank_at(c, i, d) - _rank_at(c, i + 1, d)

    degrees = range(a, b + 1)
    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, degrees))
    return [one(d) for d in degrees]


def homology_table(c: ChainComplex, indices: Iterable[int], window: tuple[int, int]) -> dict[int, list[int]]:
    return {i: homology_dims(c, i, window) for i in indices}


def residue_betti(c: ChainComplex) -> dict[int, dict[int, int]]:
    """Graded dimensions of ``H(c tensor k)``: the Betti numbers of the minimal model."""
    p = c.tower.p
    out: dict[int, dict[int, int]] = {}

    def const_rank(i: int, d: int) -> int:
        m = c.diffs.get(i)
        if m is None:
            return 0
        cols = [j for j, g in enumerate(m.source) if g == d]
        rows = [r for r, g in enumerate(m.target) if g == d]
        if not cols or not rows:
            return 0
        rpos = {r: k for k, r in enumerate(rows)}
        cpos = {j: k for k, j in enumerate(cols)}
        mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for (r, j), f in m.entries.items():
            if r in rpos and j in cpos:
                mat[rpos[r], cpos[j]] = f.constant_term()
        return linalg.rank(mat, p)

    for i in c.indices():
        counts: dict[int, int] = {}
        for g in c.module(i):
            counts[g] = counts.get(g, 0) + 1
        row = {}
        for d in sorted(counts):
            v = counts[d] - const_rank(i, d) - const_rank(i + 1, d)
            if v:
                row[d] = v
        out[i] = row
    return out


class ChainMap:
    """Components ``phi_i : source_i -> target_{i - shift}`` of internal twist ``twist``."""

    def __init__(
        self,
        source: ChainComplex,
        target: ChainComplex,
        shift: int,
        twist: int,
        components: Mapping[int, GradedMap],
        name: str = "",
    ):
        self.source = source
        self.target = target
        self.shift = shift
        self.twist = twist
        self.name = name
        self.components: dict[int, GradedMap] = {}
        for i, m in components.items():
            if m.source != source.module(i) or m.target != target.module(i - shift):
                raise ValueError(f"component {i} does not match the complexes")
            if m.twist != twist:
                raise ValueError(f"component {i} has twist {m.twist}, expected {twist}")
            if not m.is_zero():
                self.components[i] = m

    def component(self, i: int) -> GradedMap:
        m = self.components.get(i)
        if m is None:
            s = self.source
            return GradedMap.zero(s.tower, s.level, s.module(i), self.target.module(i - self.shift), self.twist)
        return m

    def commutator_defect(self) -> int | None:
        """First index where ``d phi = (-1)^shift phi d`` fails, or ``None``."""
        sign = -1 if self.shift % 2 else 1
        X, Y = self.source, self.target
        for i in range(X.lo, X.hi + 1):
            lhs = Y.d(i - self.shift).compose(self.component(i))
            rhs = self.component(i - 1).compose(X.d(i)).scale(sign)
            if not (lhs - rhs).is_zero():
                return i
        return None

    def verify(self) -> bool:
        return self.commutator_defect() is None and all(m.check_homogeneous() for m in self.components.values())

    def __repr__(self) -> str:
        return f"ChainMap({self.name or 'phi'}, shift={self.shift}, twist={self.twist})"


def mapping_cone(phi: ChainMap, check: bool = True) -> ChainComplex:
    X, Y, a, w = phi.source, phi.target, phi.shift, phi.twist
    tower, level = Y.tower, Y.level
    lo = min(Y.lo, X.lo + 1 - a)
    hi = max(Y.hi, X.hi + 1 - a)
    sign_x = 1 if a % 2 else -1
    mods, diffs, parts = [], {}, []
    for i in range(lo, hi + 1):
        xs = tuple(g - w for g in X.module(i - 1 + a))
        mods.append(Y.module(i) + xs)
        parts.append(len(Y.module(i)))
    for i in range(lo + 1, hi + 1):
        yb = [Y.module(i), tuple(g - w for g in X.module(i - 1 + a))]
        tb = [Y.module(i - 1), tuple(g - w for g in X.module(i - 2 + a))]
        blocks = {
            (0, 0): Y.d(i),
            (0, 1): _retwist(phi.component(i - 1 + a), yb[1], tb[0]),
            (1, 1): _retwist(X.d(i - 1 + a).scale(sign_x), yb[1], tb[1]),
        }
        diffs[i] = block_map(tower, level, yb, tb, blocks)
    meta = {"cone_of": phi, "split": dict(zip(range(lo, hi + 1), parts))}
    return ChainComplex(tower, level, lo, mods, diffs, check=check, meta=meta)


def _retwist(m: GradedMap, source, target, twist: int = 0) -> GradedMap:
    return GradedMap(m.tower, m.level, source, target, m.entries, twist, reduce=False)


def suspend(c: ChainComplex, i: int, w: int = 0) -> ChainComplex:
    """``(Sigma^i c)_n = c_{n-i}`` with generator degrees raised by ``w``."""
    sign = -1 if i % 2 else 1
    mods = [tuple(g + w for g in m) for m in c.modules]
    diffs = {}
    for k, m in c.diffs.items():
        diffs[k + i] = GradedMap(
            c.tower, c.level, mods[k - c.lo], mods[k - 1 - c.lo], m.scale(sign).entries, reduce=False
        )
    tail = None
    if c.tail is not None:
        tail = PeriodicTail(c.tail.start + i, c.tail.shift, c.tail.period)
    return ChainComplex(c.tower, c.level, c.lo + i, mods, diffs, tail, check=False)


def _is_unit(f: Polynomial) -> bool:
    return len(f) == 1 and f.constant_term() != 0


def minimize(c: ChainComplex) -> ChainComplex:
    """Cancel unit entries of the differentials (Gaussian elimination).

    Cancelling a unit ``u`` at row ``r``, column ``col`` of ``d_i`` replaces
    ``d_i`` by ``D - c' u^{-1} b`` on the remaining generators, drops row
    ``col`` from ``d_{i+1}`` and column ``r`` from ``d_{i-1}``.  The result is
    homotopy equivalent to ``c`` and every differential entry lies in the
    maximal ideal.
    """
    tower, level, p = c.tower, c.level, c.tower.p
    gens = {i: list(range(c.rank(i))) for i in c.indices()}
    deg = {i: dict(enumerate(c.module(i))) for i in c.indices()}
    cols: dict[int, dict[int, dict[int, Polynomial]]] = {}
    rows: dict[int, dict[int, set[int]]] = {}
    for i in range(c.lo + 1, c.hi + 1):
        cols[i] = {j: {} for j in gens[i]}
        rows[i] = {r: set() for r in gens[i - 1]}
        for (r, j), f in c.d(i).entries.items():
            cols[i][j][r] = f
            rows[i][r].add(j)

    def cancel(i: int, r: int, col: int, u: Polynomial) -> None:
        inv = pow(u.constant_term(), -1, p)
        column = {q: f for q, f in cols[i][col].items() if q != r}
        row = {j: cols[i][j][r] for j in rows[i][r] if j != col}
        for j, b in row.items():
            target = cols[i][j]
            for q, cq in column.items():
                new = target.get(q, tower.zero()) - (cq * b).scale(inv)
                new = tower.normal_form(level, new)
                if new.is_zero():
                    if q in target:
                        del target[q]
                        rows[i][q].discard(j)
                else:
                    target[q] = new
                    rows[i][q].add(j)
        for q in cols[i][col]:
            rows[i][q].discard(col)
        del cols[i][col]
        for j in rows[i][r]:
            cols[i][j].pop(r, None)
        del rows[i][r]
        if i + 1 in cols:
            for j in rows[i + 1].pop(col, ()):
                cols[i + 1][j].pop(col, None)
        if i - 1 in cols:
            for q in cols[i - 1].pop(r, {}):
                rows[i - 1][q].discard(r)
        gens[i].remove(col)
        gens[i - 1].remove(r)

    changed = True
    while changed:
        changed = False
        for i in range(c.lo + 1, c.hi + 1):
            for col in list(gens[i]):
                if col not in cols[i]:
                    continue
                entries = cols[i][col]
                units = sorted(q for q, f in entries.items() if _is_unit(f))
                if units:
                    cancel(i, units[0], col, entries[units[0]])
                    changed = True

    new_index = {i: {g: k for k, g in enumerate(gens[i])} for i in c.indices()}
    mods = [tuple(deg[i][g] for g in gens[i]) for i in c.indices()]
    diffs = {}
    for i in range(c.lo + 1, c.hi + 1):
        entries = {}
        for j, col in cols[i].items():
            for q, f in col.items():
                entries[(new_index[i - 1][q], new_index[i][j])] = f
        diffs[i] = GradedMap(tower, level, mods[i - c.lo], mods[i - 1 - c.lo], entries, reduce=False)
    return ChainComplex(tower, level, c.lo, mods, diffs, check=False)


def solve_lift(d: GradedMap, rhs: GradedMap) -> GradedMap:
    """Find ``Z`` with ``d o Z = rhs``, column by column, lexicographically least.

    ``d : B -> C`` is a differential and ``rhs : A -> C``; the result is a map
    ``A -> B`` carrying the twist of ``rhs``.  Raises :class:`LiftFailed` if
    some column of ``rhs`` is not in the image of ``d``.
    """
    if d.target != rhs.target:
        raise ValueError("right-hand side does not land in the target of d")
    tower, level, p = d.tower, d.level, d.tower.p
    by_degree: dict[int, list[int]] = {}
    nonzero_cols = {c for (_, c) in rhs.entries}
    for c in sorted(nonzero_cols):
        by_degree.setdefault(rhs.source[c] - rhs.twist, []).append(c)
    entries: dict[tuple[int, int], Polynomial] = {}
    for deg, columns in sorted(by_degree.items()):
        mat = d.degree_matrix(deg)
        b = np.stack([rhs.column_vector(c) for c in columns], axis=1)
        if mat.shape[1] == 0:
            raise LiftFailed(f"no source in degree {deg} to lift into")
        try:
            x = linalg.solve(mat, b, p)
        except linalg.NoSolution as exc:
            raise LiftFailed(f"lift in internal degree {deg} has no solution") from exc
        for k, c in enumerate(columns):
            for r, f in vector_to_column(tower, level, d.source, deg, x[:, k]).items():
                entries[(r, c)] = f
    return GradedMap(tower, level, rhs.source, d.source, entries, rhs.twist, reduce=False)
