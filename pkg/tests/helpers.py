"""Independent oracles shared by the test modules."""
import itertools
from pathlib import Path

import sympy

from ciresolve import linalg
from ciresolve.io import load_problem

INPUTS = Path(__file__).resolve().parent.parent / "inputs"
SHIPPED = sorted(p.name for p in INPUTS.glob("*.json"))


def load(name):
    return load_problem(INPUTS / name)


def poincare_coefficients(n, c, length):
    """Taylor coefficients of (1+t)^n / (1-t^2)^c, expanded by sympy."""
    t = sympy.symbols("t")
    series = sympy.series((1 + t) ** n / (1 - t**2) ** c, t, 0, length).removeO()
    poly = sympy.Poly(series, t)
    return [int(poly.coeff_monomial(t**i)) for i in range(length)]


def module_hilbert(module, D):
    """dim M_d = dim (F_0)_d - rank of the relations in degree d."""
    t, s, rel = module.tower, module.level, module.relations
    out = []
    for d in range(D + 1):
        dim = sum(t.dim(s, d - g) for g in module.generators)
        if rel.source:
            mat = rel.degree_matrix(d)
            dim -= linalg.rank(mat, t.p) if mat.size else 0
        out.append(dim)
    return out


def monomial_quotient_hilbert(n, exps, D):
    out = [0] * (D + 1)
    for mono in itertools.product(range(D + 1), repeat=n):
        d = sum(mono)
        if d <= D and not any(all(m >= e for m, e in zip(mono, g)) for g in exps):
            out[d] += 1
    return out
