"""Splicing resolutions down a complete intersection tower.

The finite resolution ``F`` of ``M`` over the regular level carries a system
of higher homotopies ``sigma_a`` indexed by ``a`` in ``N^c``: ``sigma_a`` maps
``F_i -> F_{i + 2|a| - 1}``, ``sigma_0 = d``, ``d sigma_{e_j} + sigma_{e_j} d = f_j``
and ``sum_{b + b' = a} sigma_b sigma_b' = 0`` for ``|a| >= 2``.  The resolution
over level ``s`` is then

    G_i = sum over a in N^s of  Fbar_{i - 2|a|}  (degrees raised by a.e)

with the differential sending copy ``a`` to copy ``a - b`` through
``sigma_b``.  Level ``s + 1`` is obtained from level ``s`` by one splice: the
tensored-down ``G`` is repeated once per power of ``f_{s+1}`` and glued with
the homotopies for ``f_{s+1}``.  The operator ``chi_j`` drops the ``j``-th
copy index by one.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .complexes import (
    ChainComplex,
    ChainMap,
    GradedMap,
    PeriodicTail,
    block_map,
    homology_dims,
    mapping_cone,
    minimize,
    solve_lift,
    suspend,
)
from .errors import LiftFailed
from .polynomial import Polynomial
from .resolution import ModulePresentation, Resolution, minimal_free_resolution
from .ring import RingTower

__all__ = [
    "OperatorFamily",
    "SmallnessCertificate",
    "TowerResult",
    "tensor_down",
    "higher_homotopies",
    "splice",
    "chi_operator",
    "iterate_tower",
    "koszul_cone",
    "lift_through_cone",
    "detect_periodic_tail",
    "spliced_resolution",
    "cone_certificate",
]

Exponent = tuple[int, ...]
Block = tuple[Exponent, int]  # (copy index, index into F)


def tensor_down(c: ChainComplex, level: int | None = None) -> ChainComplex:
    """``c`` tensored with the next level of the tower (same generator degrees)."""
    level = c.level + 1 if level is None else level
    if level > c.tower.c:
        raise ValueError("no deeper level in the tower")
    diffs = {i: m.reduce_to(level) for i, m in c.diffs.items()}
    return ChainComplex(c.tower, level, c.lo, c.modules, diffs, c.tail, check=True)


def _pad_even(F: ChainComplex) -> ChainComplex:
    if F.hi % 2 == 0:
        return F
    return ChainComplex(F.tower, F.level, F.lo, F.modules + [()], F.diffs, check=False)


def _exponents(c: int, total: int) -> list[Exponent]:
    """Exponent vectors of the given total, in lexicographically decreasing order."""
    if c == 0:
        return [()] if total == 0 else []
    out = []
    for first in range(total, -1, -1):
        out.extend((first,) + rest for rest in _exponents(c - 1, total - first))
    return out


def _weight(a: Exponent, degrees: Sequence[int]) -> int:
    return sum(x * e for x, e in zip(a, degrees))


def higher_homotopies(F: ChainComplex, elements: Sequence[Polynomial]) -> dict[Exponent, dict[int, GradedMap]]:
    """A system of higher homotopies for ``elements`` on the finite complex ``F``.

    ``F`` must be a resolution over its level of a module annihilated by every
    element.  Each map is the lexicographically least solution of its
    defining linear equation.  Raises :class:`LiftFailed` if an equation has
    no solution, which happens exactly when ``F`` is not such a resolution.
    """
    t, level = F.tower, F.level
    c = len(elements)
    degs = [t.degree(f) for f in elements]
    n = F.hi
    sigma: dict[Exponent, dict[int, GradedMap]] = {(0,) * c: {i: F.d(i) for i in F.indices() if i > F.lo}}

    def get(a: Exponent, i: int) -> GradedMap:
        src = F.module(i)
        if sum(a) == 0:
            return F.d(i)
        j = i + 2 * sum(a) - 1
        m = sigma.get(a, {}).get(i)
        if m is None:
            return GradedMap.zero(t, level, src, F.module(j), -_weight(a, degs))
        return m

    for total in range(1, n // 2 + 2):
        # right-hand sides land in F_{i + 2 total - 2}; beyond F they vanish
        if 2 * total - 2 > n:
            break
        for a in _exponents(c, total):
            twist = -_weight(a, degs)
            sigma[a] = {}
            for i in F.indices():
                src, tgt_index = F.module(i), i + 2 * total - 2
                if not src:
                    continue
                rhs = GradedMap.zero(t, level, src, F.module(tgt_index), twist)
                if total == 1 and tgt_index == i:
                    f = elements[a.index(1)]
                    rhs = GradedMap(t, level, src, src, {(r, r): f for r in range(len(src))}, twist)
                for b in _sub_exponents(a):
                    rest = tuple(x - y for x, y in zip(a, b))
                    if sum(b) == 0 or sum(rest) == 0:
                        continue
                    inner = get(rest, i)
                    outer = get(b, i + 2 * sum(rest) - 1)
                    rhs = rhs - outer.compose(inner)
                if i > F.lo:
                    rhs = rhs - get(a, i - 1).compose(F.d(i))
                if rhs.is_zero():
                    continue
                top = tgt_index + 1
                if top > n:
                    raise LiftFailed(f"homotopy {a} at index {i} would leave the complex")
                sigma[a][i] = solve_lift(F.d(top), rhs)
    return sigma


# -- layouts ---------------------------------------------------------------
# A layout assigns to each homological index the ordered list of blocks
# (copy exponent, index into F) whose generators make up G_i.


def _layout(n: int, s: int, N: int) -> dict[int, list[Block]]:
    """Blocks of the level-``s`` splice, ordered by the newest copy index first."""
    if s == 0:
        return {i: [((), i)] if 0 <= i <= n else [] for i in range(N + 1)}
    prev = _layout(n, s - 1, N)
    out = {}
    for i in range(N + 1):
        blocks = []
        for k in range(i // 2 + 1):
            blocks.extend((a + (k,), j) for a, j in prev[i - 2 * k])
        out[i] = blocks
    return out


def _block_modules(F: ChainComplex, layout, degs) -> list[tuple[int, ...]]:
    mods = []
    for i in sorted(layout):
        gens = []
        for a, j in layout[i]:
            w = _weight(a, degs)
            gens.extend(g + w for g in F.module(j))
        mods.append(tuple(gens))
    return mods


def _assemble(tower, level, F, layout, degs, src_i, tgt_i, twist, pieces) -> GradedMap:
    """Map ``G_{src_i} -> G_{tgt_i}`` from a rule giving per-block maps."""
    src_blocks = [tuple(g + _weight(a, degs) for g in F.module(j)) for a, j in layout.get(src_i, [])]
    tgt_blocks = [tuple(g + _weight(a, degs) for g in F.module(j)) for a, j in layout.get(tgt_i, [])]
    tindex = {blk: k for k, blk in enumerate(layout.get(tgt_i, []))}
    blocks = {}
    for sk, (a, j) in enumerate(layout.get(src_i, [])):
        for (ta, tj), m in pieces(a, j):
            tk = tindex.get((ta, tj))
            if tk is None or m.is_zero():
                continue
            blocks[(tk, sk)] = m.reduce_to(level) if m.level != level else m
    return block_map(tower, level, src_blocks, tgt_blocks, blocks, twist)


def _sub_exponents(a: Exponent):
    for b in itertools.product(*(range(x + 1) for x in a)):
        yield tuple(b)


def direct_splice(F, sigma, degs, s, N, level) -> tuple[ChainComplex, dict]:
    """The level-``s`` splice built in one pass from all homotopies (copies indexed by ``N^s``).

    Used to cross-check the level-by-level construction.
    """
    tower = F.tower
    c = len(degs)
    layout = _layout(F.hi, s, N)
    mods = _block_modules(F, layout, degs)
    diffs = {}
    for i in range(1, N + 1):

        def pieces(a, j):
            for b in _sub_exponents(a):
                full = b + (0,) * (c - s)
                m = sigma.get(full, {}).get(j) if sum(b) else (F.d(j) if j > F.lo else None)
                if m is None:
                    continue
                yield (tuple(x - y for x, y in zip(a, b)), j + 2 * sum(b) - 1), m

        diffs[i] = _assemble(tower, level, F, layout, degs, i, i - 1, 0, pieces)
    G = ChainComplex(tower, level, 0, mods, diffs, check=False)
    return G, layout


def _homotopy_on_splice(F, sigma, degs, s, N, layout, l) -> dict[int, GradedMap]:
    """The translation-invariant homotopy ``h_l`` for ``f_{s+1}`` on the level-``s`` splice."""
    tower = F.tower
    c = len(degs)
    out = {}
    for i in range(N + 1):
        tgt = i + 2 * l - 1
        if tgt > N:
            continue

        def pieces(a, j):
            for b in _sub_exponents(a):
                full = b + (l,) + (0,) * (c - s - 1)
                m = sigma.get(full, {}).get(j)
                if m is None:
                    continue
                yield (tuple(x - y for x, y in zip(a, b)), j + 2 * (sum(b) + l) - 1), m

        m = _assemble(tower, s, F, layout, degs, i, tgt, -l * degs[s], pieces)
        if not m.is_zero():
            out[i] = m
    return out


def splice(
    fbar: ChainComplex,
    homotopies: dict[int, dict[int, GradedMap]],
    shift: int,
    N: int,
) -> tuple[Resolution, ChainMap]:
    """Splice copies of ``fbar`` into a resolution over ``fbar``'s level.

    ``homotopies[l][i]`` maps ``fbar_i -> fbar_{i + 2l - 1}`` with twist
    ``-l * shift`` (``l >= 1``), tensored down to ``fbar``'s level; they must
    come from a system of higher homotopies for the relation just added.  The
    result has ``G_i = fbar_i + fbar_{i-2}(-shift) + fbar_{i-4}(-2 shift) + ...``
    (copy ``k`` generators raised by ``k * shift``) and differential ``d``
    within a copy and ``homotopies[l]`` from copy ``k`` to copy ``k - l``.
    Also returns the operator that maps copy ``k`` onto copy ``k - 1``.
    """
    t, level = fbar.tower, fbar.level
    hs = {0: {i: fbar.d(i) for i in range(fbar.lo + 1, fbar.hi + 1)}}
    hs.update(homotopies)
    mods, copies = [], {}
    for i in range(N + 1):
        gens, layout = [], []
        for k in range(i // 2 + 1):
            part = fbar.module(i - 2 * k)
            layout.append((k, len(part)))
            gens.extend(g + k * shift for g in part)
        mods.append(tuple(gens))
        copies[i] = layout
    diffs = {}
    for i in range(1, N + 1):
        src = [tuple(g + k * shift for g in fbar.module(i - 2 * k)) for k, _ in copies[i]]
        tgt = [tuple(g + k * shift for g in fbar.module(i - 1 - 2 * k)) for k, _ in copies[i - 1]]
        blocks = {}
        for sk, _ in copies[i]:
            j = i - 2 * sk
            for l, maps in hs.items():
                tk = sk - l
                if tk < 0 or tk >= len(tgt):
                    continue
                m = maps.get(j)
                if m is not None and not m.is_zero():
                    blocks[(tk, sk)] = m
        diffs[i] = block_map(t, level, src, tgt, blocks)
    G = ChainComplex(t, level, 0, mods, diffs, check=True, meta={"copies": copies, "shift": shift})
    tail = None
    if fbar.lo == 0 and fbar.hi % 2 == 0 and N >= fbar.hi + 2:
        tail = PeriodicTail(fbar.hi, shift)
    G.tail = tail
    res = Resolution(G, None, minimal=False, homological_bound=N, meta={"fbar": fbar})
    return res, chi_operator(res, fbar)


def chi_operator(g: Resolution, fbar: ChainComplex | None = None) -> ChainMap:
    """The copy-lowering operator on a splice: identity from copy ``k`` to copy ``k - 1``."""
    G = g.complex
    copies, shift = G.meta["copies"], G.meta["shift"]
    t, level = G.tower, G.level
    comps = {}
    for i in range(2, G.hi + 1):
        offsets, off = {}, 0
        for k, size in copies[i - 2]:
            offsets[k] = off
            off += size
        entries, col = {}, 0
        for k, size in copies[i]:
            if k >= 1:
                for r in range(size):
                    entries[(offsets[k - 1] + r, col + r)] = t.one()
            col += size
        comps[i] = GradedMap(t, level, G.module(i), G.module(i - 2), entries, shift, reduce=False)
    return ChainMap(G, G, 2, shift, comps, name="chi")


def _translation(G: ChainComplex, layout, F, degs, j: int) -> ChainMap:
    """``chi_j`` on a level-``s`` splice: copy ``a`` to copy ``a - e_j`` by the identity."""
    t, level = G.tower, G.level
    comps = {}
    one = t.one()
    for i in range(2, G.hi + 1):

        def pieces(a, jj):
            if a[j] == 0:
                return
            ident = GradedMap(t, level, F.module(jj), F.module(jj), {(r, r): one for r in range(len(F.module(jj)))}, reduce=False)
            yield (a[:j] + (a[j] - 1,) + a[j + 1:], jj), ident

        m = _assemble(t, level, F, layout, degs, i, i - 2, degs[j], pieces)
        comps[i] = m
    return ChainMap(G, G, 2, degs[j], comps, name=f"chi_{j + 1}")


@dataclass
class OperatorFamily:
    """The operators ``chi_1 .. chi_c`` on the resolution over the deepest level."""

    resolution: Resolution
    operators: list[ChainMap]

    def __len__(self) -> int:
        return len(self.operators)

    def __getitem__(self, j: int) -> ChainMap:
        return self.operators[j]

    def verify(self) -> bool:
        return all(op.verify() for op in self.operators)

    def commute(self) -> bool:
        """``chi_i chi_j = chi_j chi_i`` componentwise."""
        G = self.resolution.complex
        for a, b in itertools.combinations(self.operators, 2):
            for i in range(G.lo + 4, G.hi + 1):
                if not (a.component(i - 2) @ b.component(i) - b.component(i - 2) @ a.component(i)).is_zero():
                    return False
        return True


@dataclass
class SmallnessCertificate:
    """Graded homology of a cone compared with a bounded free witness."""

    subject: ChainComplex
    witness: ChainComplex
    indices: tuple[int, int]
    degrees: tuple[int, int]
    subject_dims: dict[int, list[int]]
    witness_dims: dict[int, list[int]]

    @property
    def passed(self) -> bool:
        return self.subject_dims == self.witness_dims

    def mismatches(self) -> list[int]:
        return [i for i in self.subject_dims if self.subject_dims[i] != self.witness_dims.get(i)]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "indices": list(self.indices),
            "degrees": list(self.degrees),
            "subject": {str(i): v for i, v in sorted(self.subject_dims.items())},
            "witness": {str(i): v for i, v in sorted(self.witness_dims.items())},
            "witness_ranks": self.witness.ranks(),
            "witness_lo": self.witness.lo,
        }


def cone_certificate(subject: ChainComplex, witness: ChainComplex, indices: tuple[int, int], degrees: tuple[int, int]) -> SmallnessCertificate:
    lo, hi = indices
    sd = {i: homology_dims(subject, i, degrees) for i in range(lo, hi + 1)}
    wd = {i: homology_dims(witness, i, degrees) for i in range(lo, hi + 1)}
    return SmallnessCertificate(subject, witness, indices, degrees, sd, wd)


def lift_through_cone(psi: ChainMap, phi: ChainMap, cone: ChainComplex | None = None) -> ChainMap:
    """Extend an endomorphism ``psi`` of both ends of ``phi`` to ``cone(phi)``.

    The extension is ``[[psi_Y, h], [0, eps psi_X]]`` with
    ``eps = (-1)^(b(1+a))`` for shifts ``a`` of ``phi`` and ``b`` of ``psi``;
    the corner ``h`` solves the commutation equations index by index and is
    the lexicographically least solution (zero when ``psi`` and ``phi``
    commute on the nose).
    """
    X, Y = phi.source, phi.target
    if not (X is Y and psi.source is X and psi.target is X):
        raise ValueError("psi and phi must be endomorphisms of the same complex")
    cone = mapping_cone(phi, check=False) if cone is None else cone
    a, b, w, v = phi.shift, psi.shift, phi.twist, psi.twist
    t, level = cone.tower, cone.level
    eps = -1 if (b * (1 + a)) % 2 else 1
    sb = -1 if b % 2 else 1
    sx = 1 if a % 2 else -1
    low = lambda gens: tuple(g - w for g in gens)  # noqa: E731

    # corner maps h_m : X_m(-w) -> Y_{m + 1 - a - b}
    h: dict[int, GradedMap] = {}
    for m in range(X.lo, X.hi + 1):
        src = low(X.module(m))
        tgt_index = m + 1 - a - b
        if not src:
            continue
        comm = psi.component(m - a) @ phi.component(m)
        comm = comm.scale(sb) - phi.component(m - b) @ psi.component(m).scale(eps)
        rhs = GradedMap(t, level, src, Y.module(tgt_index - 1), comm.entries, v, reduce=False)
        prev = h.get(m - 1)
        if prev is not None:
            dx = GradedMap(t, level, src, low(X.module(m - 1)), X.d(m).entries, 0, reduce=False)
            rhs = rhs + (prev @ dx).scale(sb * sx)
        if rhs.is_zero():
            continue
        if not (Y.lo < tgt_index <= Y.hi):
            raise LiftFailed(f"corner of the lifted operator leaves the window at index {m}")
        h[m] = solve_lift(Y.d(tgt_index), rhs)

    comps = {}
    for i in range(cone.lo, cone.hi + 1):
        xi = i - 1 + a
        yb = [Y.module(i), low(X.module(xi))]
        tb = [Y.module(i - b), low(X.module(xi - b))]
        if not (cone.lo <= i - b <= cone.hi):
            continue
        blocks = {
            (0, 0): _retw(psi.component(i), yb[0], tb[0], v),
            (1, 1): _retw(psi.component(xi).scale(eps), yb[1], tb[1], v),
        }
        if xi in h:
            blocks[(0, 1)] = h[xi]
        comps[i] = block_map(t, level, yb, tb, blocks, v)
    return ChainMap(cone, cone, b, v, comps, name=psi.name)


def _retw(m: GradedMap, source, target, twist) -> GradedMap:
    return GradedMap(m.tower, m.level, source, target, m.entries, twist, reduce=False)


def koszul_cone(x: ChainComplex, ops: Sequence[ChainMap]) -> ChainComplex:
    """Iterated mapping cone ``x / ops[0] / ops[1] / ...``.

    Each later operator is lifted through the cones already formed.
    """
    running = x
    pending = list(ops)
    while pending:
        phi = pending.pop(0)
        cone = mapping_cone(phi)
        pending = [lift_through_cone(psi, phi, cone) for psi in pending]
        running = cone
    return running


def detect_periodic_tail(r: Resolution | ChainComplex, min_checks: int = 2) -> PeriodicTail | None:
    """Earliest ``i0`` from which ``C_{i+2} = C_i(-shift)`` and ``d_{i+2} = d_i``.

    Requires at least ``min_checks`` comparisons at or after ``i0`` and
    nonzero modules throughout.
    """
    c = r.complex if isinstance(r, Resolution) else r
    hi = c.hi
    shift, start = None, None
    for i in range(hi - 2, c.lo - 1, -1):
        a, b = c.module(i), c.module(i + 2)
        if not a or len(a) != len(b):
            break
        gaps = {g2 - g1 for g1, g2 in zip(a, b)}
        if len(gaps) != 1 or (shift is not None and gaps != {shift}):
            break
        shift = gaps.pop()
        start = i
    if start is None:
        return None
    first_d = hi - 1
    for i in range(hi - 2, start, -1):
        if c.d(i).entries != c.d(i + 2).entries:
            break
        first_d = i
    i0 = max(start, first_d - 1)
    if hi - 2 - i0 + 1 < min_checks:
        return None
    return PeriodicTail(i0, shift)


@dataclass
class TowerResult:
    resolutions: list[Resolution]
    operators: OperatorFamily
    cone: ChainComplex
    certificate: SmallnessCertificate | None
    homotopies: dict = field(default_factory=dict)
    fbars: list[ChainComplex] = field(default_factory=list)
    splice_operators: list[ChainMap] = field(default_factory=list)

    def __iter__(self):
        return iter((self.resolutions, self.operators, self.cone, self.certificate))


def _base_resolution(tower: RingTower, module: ModulePresentation, D: int | None) -> Resolution:
    base = module.lift(0)
    return minimal_free_resolution(tower, 0, base, tower.n + 1, D)


def iterate_tower(
    tower: RingTower,
    module: ModulePresentation | None = None,
    N: int = 12,
    D: int | None = None,
    order: Sequence[int] | None = None,
    certify: bool = True,
) -> TowerResult:
    """Resolve, tensor down and splice once per relation; then form the Koszul cone.

    Returns the resolution at each level (the finite one over the regular
    level first), the operators ``chi_1 .. chi_c`` on the deepest one, the
    iterated cone ``G / chi_c / ... / chi_1`` (or the given ``order`` of
    operator indices) and a certificate comparing its homology with the
    ``c``-fold tensored-down regular resolution, suspended ``-c`` times and
    lowered by ``sum deg f_j``.
    """
    if module is None:
        module = ModulePresentation.residue_field(tower)
    c = tower.c
    if tower.certified_degree is None:
        tower.certify_regular_sequence(max(D or 0, 2 * sum(tower.relation_degrees) + 2))
    base = _base_resolution(tower, module, D)
    F = _pad_even(base.complex)
    degs = list(tower.relation_degrees)
    sigma = higher_homotopies(F, tower.relations)
    resolutions = [base]
    fbars, splice_ops = [], []
    G = F
    layout = {i: [((), i)] for i in F.indices()}
    for s in range(c):
        fbar = tensor_down(G.truncate(hi=N) if G.hi > N else G, s + 1)
        h = {}
        for l in range(1, N // 2 + 2):
            hl = _homotopy_on_splice(F, sigma, degs, s, N, layout, l)
            if hl:
                h[l] = {i: m.reduce_to(s + 1) for i, m in hl.items()}
        res, chi = splice(fbar, h, degs[s], N)
        fbars.append(fbar)
        splice_ops.append(chi)
        layout = _layout(F.hi, s + 1, N)
        G = res.complex
        res.presentation = module.lift(s + 1) if s + 1 < module.level else module
        res.degree_bound = None
        resolutions.append(res)
    if c == 0:
        fam = OperatorFamily(base, [])
        witness = base.complex
        cone = base.complex
    else:
        G = resolutions[-1].complex
        ops = [_translation(G, layout, F, degs, j) for j in range(c)]
        fam = OperatorFamily(resolutions[-1], ops)
        seq = list(order) if order is not None else list(range(c - 1, -1, -1))
        cone = koszul_cone(G, [ops[j] for j in seq])
        fbar_c = tensor_down(F, c) if c else F
        witness = suspend(fbar_c, -c, -sum(degs))
    lo = -c
    hi = N - c - 1 if c else F.hi
    gens = [g for i in range(cone.lo, hi + 2) for g in cone.module(i)]
    dlo = min(gens, default=0)
    dhi = D if D is not None else max(gens, default=0) + max(degs, default=0)
    cert = cone_certificate(cone, witness, (lo, hi), (dlo, dhi)) if certify else None
    return TowerResult(resolutions, fam, cone, cert, {"sigma": sigma, "F": F}, fbars, splice_ops)


def spliced_resolution(
    tower: RingTower,
    module: ModulePresentation | None = None,
    N: int = 12,
    D: int | None = None,
    minimal: bool = True,
) -> Resolution:
    """The splice resolution over the deepest level, minimized and exact through index ``N``.

    The splice is computed one index further than requested so that the
    minimal ranks at index ``N`` are not affected by truncation.
    """
    module = ModulePresentation.residue_field(tower) if module is None else module
    result = iterate_tower(tower, module, N + 1, D, certify=False)
    G = result.resolutions[-1].complex
    if minimal:
        G = minimize(G).truncate(hi=N)
    else:
        G = G.truncate(hi=N)
    out = Resolution(G, module, minimal=minimal, homological_bound=N, degree_bound=None)
    if minimal and tower.c > 0:
        G.tail = detect_periodic_tail(out)
    return out
