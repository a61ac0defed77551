"""Growth of Betti sequences, complexity and classification of complete intersections."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .complexes import ChainComplex, mapping_cone
from .construct import detect_periodic_tail, iterate_tower, lift_through_cone, spliced_resolution
from .errors import Undetermined, WindowTooShort
from .resolution import BettiTable, ModulePresentation, minimal_free_resolution
from .ring import RingTower

__all__ = [
    "GrowthReport",
    "fit_growth",
    "witness_polynomial",
    "complexity",
    "classify_ring",
    "check_growth_step",
    "verify_zci_to_gci",
    "poincare_series",
    "dual_residue_homology",
]


def _differences(seq: Sequence[int], k: int) -> list[int]:
    out = list(seq)
    for _ in range(k):
        out = [b - a for a, b in zip(out, out[1:])]
    return out


def default_window(length: int) -> tuple[int, int]:
    """The last ``ceil(length / 2)`` indices of a sequence."""
    return length - math.ceil(length / 2), length - 1


def _fit(values: list[int]) -> int | None:
    if all(v == 0 for v in values):
        return -1
    # a fit needs at least three equal differences
    for d in range(0, len(values) - 2):
        diff = _differences(values, d)
        if len(set(diff)) == 1:
            return d
    return None


def fit_growth(beta: Sequence[int], window: tuple[int, int] | None = None) -> int:
    """Polynomial growth degree of ``beta`` over ``window = (w0, N)`` (inclusive).

    Returns ``-1`` when the window is all zero, otherwise the least ``d`` whose
    ``d``-th finite difference is constant over the window.  Sequences that
    only settle down separately on even and odd indices get the larger of the
    two parity fits.  Raises :class:`WindowTooShort` if ``N - w0 < 4`` and
    :class:`Undetermined` if no degree fits.
    """
    beta = [int(b) for b in beta]
    w0, N = default_window(len(beta)) if window is None else window
    if N >= len(beta) or w0 < 0:
        raise ValueError(f"window {(w0, N)} outside a sequence of length {len(beta)}")
    if N - w0 < 4:
        raise WindowTooShort(f"window [{w0}, {N}] has fewer than five entries")
    values = beta[w0:N + 1]
    d = _fit(values)
    if d is not None:
        return d
    even, odd = values[0::2], values[1::2]
    if min(len(even), len(odd)) >= 3:
        parts = [_fit(even), _fit(odd)]
        if None not in parts:
            return max(parts)
    raise Undetermined(f"no polynomial growth degree fits the window [{w0}, {N}]")


def witness_polynomial(beta: Sequence[int], d: int, window: tuple[int, int] | None = None) -> list[Fraction]:
    """Coefficients (constant term first) of a degree-``d`` polynomial bounding ``beta``.

    The polynomial interpolates the last ``d + 1`` window entries and is then
    raised by a constant so that ``beta[i] <= p(i)`` for every index.
    """
    if d < 0:
        return []
    w0, N = default_window(len(beta)) if window is None else window
    xs = list(range(N - d, N + 1))
    ys = [Fraction(beta[x]) for x in xs]
    # Lagrange interpolation, expanded to monomial coefficients
    coeffs = [Fraction(0)] * (d + 1)
    for k, (xk, yk) in enumerate(zip(xs, ys)):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for m, xm in enumerate(xs):
            if m == k:
                continue
            basis = [Fraction(0)] + basis
            for r in range(len(basis) - 1):
                basis[r] -= xm * basis[r + 1]
            denom *= xk - xm
        for r, b in enumerate(basis):
            coeffs[r] += yk * b / denom

    def value(x: int) -> Fraction:
        return sum(cf * x**r for r, cf in enumerate(coeffs))

    lift = max(Fraction(b) - value(i) for i, b in enumerate(beta))
    if lift > 0:
        coeffs[0] += lift
    return coeffs


def poincare_series(n: int, c: int, length: int) -> list[int]:
    """Coefficients of ``(1 + t)^n / (1 - t^2)^c``."""
    num = [math.comb(n, i) for i in range(n + 1)]
    den = [0] * length
    for k in range(length):
        if k % 2 == 0:
            den[k] = math.comb(k // 2 + c - 1, c - 1) if c else int(k == 0)
    return [sum(num[j] * den[i - j] for j in range(min(i, n) + 1)) for i in range(length)]


@dataclass
class GrowthReport:
    label: str
    growth_degree: int
    complexity: int
    codimension: int
    presentation_codimension: int
    betti: list[int]
    window: tuple[int, int]
    witness: list[Fraction]
    periodic_tail: object = None
    oracle_agrees: bool | None = None
    poincare_agrees: bool | None = None
    table: BettiTable | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def codim_matches(self) -> bool:
        return self.codimension == self.presentation_codimension

    @property
    def passed(self) -> bool:
        return self.codim_matches and self.oracle_agrees is not False and self.poincare_agrees is not False

    def describe(self) -> str:
        if self.label == "regular":
            head = "regular (codim 0)"
        elif self.label == "hypersurface":
            head = "hypersurface (codim 1)"
        else:
            head = f"complete-intersection (codim {self.codimension})"
        parts = [head, "Betti: " + ",".join(map(str, self.betti))]
        if self.periodic_tail is not None:
            parts.append(f"periodic tail from i0 = {self.periodic_tail.start}")
        return "; ".join(parts)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "growth_degree": self.growth_degree,
            "complexity": self.complexity,
            "codimension": self.codimension,
            "presentation_codimension": self.presentation_codimension,
            "codim_matches": self.codim_matches,
            "betti": self.betti,
            "window": list(self.window),
            "witness": [str(c) for c in self.witness],
            "periodic_tail": self.periodic_tail.to_dict() if self.periodic_tail is not None else None,
            "oracle_agrees": self.oracle_agrees,
            "poincare_agrees": self.poincare_agrees,
            "notes": list(self.notes),
        }


def _padded(betti: list[int], N: int) -> list[int]:
    return list(betti) + [0] * (N + 1 - len(betti))


def complexity(tower: RingTower, module: ModulePresentation | None = None, N: int = 12, D: int | None = None) -> int:
    """One plus the growth degree of the Betti sequence over the deepest level (0 if bounded)."""
    res = spliced_resolution(tower, module, N, D)
    d = fit_growth(_padded(res.total_betti(), N))
    return d + 1


def classify_ring(tower: RingTower, N: int = 12, D: int | None = None, oracle: bool = True) -> GrowthReport:
    """Classify the deepest level of the tower from the Betti numbers of its residue field."""
    k = ModulePresentation.residue_field(tower)
    res = spliced_resolution(tower, k, N, D)
    betti = _padded(res.total_betti(), N)
    window = default_window(len(betti))
    d = fit_growth(betti, window)
    cx = d + 1
    tail = detect_periodic_tail(res)
    notes = []
    if cx == 0:
        label = "regular"
    elif cx == 1:
        label = "hypersurface"
        if tail is None:
            notes.append("no periodic tail detected within the window")
    else:
        label = "complete-intersection"
    report = GrowthReport(
        label=label,
        growth_degree=d,
        complexity=cx,
        codimension=cx,
        presentation_codimension=tower.c,
        betti=betti,
        window=window,
        witness=witness_polynomial(betti, d, window),
        periodic_tail=tail,
        table=res.betti(),
        notes=notes,
    )
    if not report.codim_matches:
        notes.append(f"growth gives codimension {cx} but the presentation has {tower.c} relations")
    if oracle:
        direct = minimal_free_resolution(tower, tower.c, k, N, D)
        report.oracle_agrees = direct.betti() == res.betti()
    if all(w == 1 for w in tower.weights):
        report.poincare_agrees = betti == poincare_series(tower.n, tower.c, len(betti))
    return report


def _constant_matrix(c: ChainComplex, i: int) -> np.ndarray:
    m = c.d(i)
    mat = np.zeros((len(m.target), len(m.source)), dtype=np.int64)
    for (r, j), f in m.entries.items():
        mat[r, j] = f.constant_term()
    return mat


def dual_residue_homology(c: ChainComplex) -> dict[int, int]:
    """Total homology dimensions of ``Hom_k(c tensor k, k)``, indexed ``-i`` for ``c_i``.

    The dual complex has ``(c_i tensor k)^*`` in degree ``-i`` and the
    transposed residue differentials.
    """
    p = c.tower.p
    ranks = {}
    for i in range(c.lo + 1, c.hi + 1):
        mat = _constant_matrix(c, i).T  # dual differential, degree -(i-1) -> -i
        ranks[i] = linalg.rank(mat, p) if mat.size else 0
    return {-i: c.rank(i) - ranks.get(i, 0) - ranks.get(i + 1, 0) for i in c.indices()}


def check_growth_step(hX: Sequence[int], hY: Sequence[int], n: int, window: tuple[int, int] | None = None) -> bool:
    """The growth estimate for a triangle ``Sigma^n X -> X -> Y``.

    Checks ``h_X <= h_Y (1 + t^(n+1) + t^(2n+2) + ...)`` coefficientwise over
    the common window and ``growth(X) <= growth(Y) + 1``.  For ``n < 0`` the
    sequences are reversed and ``|n|`` is used.
    """
    if n == 0:
        raise ValueError("operator degree must be nonzero")
    hX, hY = list(hX), list(hY)
    if len(hX) != len(hY):
        raise ValueError("sequences must share a window")
    if n < 0:
        hX, hY, n = hX[::-1], hY[::-1], -n
    step = n + 1
    for i in range(len(hX)):
        bound = sum(hY[j] for j in range(i, -1, -step))
        if hX[i] > bound:
            return False
    return fit_growth(hX, window) <= fit_growth(hY, window) + 1


@dataclass
class ZciReport:
    """Stages ``X_i`` of the growth argument, from ``X_{c+1} = Ext(k, k)`` down to ``X_1``."""

    codimension: int
    indices: tuple[int, int]
    stages: dict[int, list[int]]
    growth: dict[int, int]
    steps: dict[int, bool]

    @property
    def passed(self) -> bool:
        c = self.codimension
        return all(self.steps.values()) and self.growth[1] == -1 and self.growth[c + 1] <= c

    def to_json(self) -> dict:
        return {
            "codimension": self.codimension,
            "indices": list(self.indices),
            "stages": {str(i): v for i, v in sorted(self.stages.items())},
            "growth": {str(i): v for i, v in sorted(self.growth.items())},
            "steps": {str(i): v for i, v in sorted(self.steps.items())},
            "passed": self.passed,
        }


def verify_zci_to_gci(tower: RingTower, N: int = 12, D: int | None = None) -> ZciReport:
    """Run the growth estimate through the stages of the Koszul cone on ``k``.

    ``K_{c+1}`` is the resolution of ``k`` and ``K_i = cone(chi_i on K_{i+1})``;
    ``X_i`` is the ``k``-dual of ``K_i tensor k``.  Each pair of stages must
    satisfy :func:`check_growth_step` (operator degree ``-1`` after
    dualizing: ``|chi| = 2`` and the exponent spacing is ``|n| + 1``), ``X_1``
    must be bounded and ``X_{c+1}`` must have growth at most ``c``.
    """
    c = tower.c
    result = iterate_tower(tower, None, N, D, certify=False)
    G = result.operators.resolution.complex
    ops = list(result.operators.operators)
    # valid window of dual indices after c cones of a complex truncated at N
    top = N - c - 1 if c else max(N - 1, G.hi)
    lo, hi = -top, c
    length = hi - lo + 1

    def stage(cx: ChainComplex) -> list[int]:
        h = dual_residue_homology(cx)
        return [h.get(i, 0) for i in range(lo, hi + 1)]

    stages = {c + 1: stage(G)}
    running = G
    pending = ops[::-1]  # chi_c first
    idx = c
    while pending:
        phi = pending.pop(0)
        cone = mapping_cone(phi)
        pending = [lift_through_cone(psi, phi, cone) for psi in pending]
        running = cone
        stages[idx] = stage(running)
        idx -= 1
    window = (length - max(5, math.ceil(length / 2)), length - 1)
    growth = {}
    for i, h in stages.items():
        growth[i] = fit_growth(h[::-1], window)
    steps = {}
    for i in range(c + 1, 1, -1):
        steps[i] = check_growth_step(stages[i], stages[i - 1], -1, window)
    return ZciReport(c, (lo, hi), stages, growth, steps)
