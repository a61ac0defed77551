"""Reading ring and module descriptions from JSON.

A description is one JSON object::

    {
      "prime": 5,
      "variables": [{"name": "x", "degree": 1}, {"name": "y", "degree": 1}],
      "relations": [ [[[2, 0], 1]], [[[0, 2], 1]] ],
      "module": {"generators": [0], "relations": [[ [[[1, 0], 1]] ], [ [[[0, 1], 1]] ]]}
    }

Each polynomial is a list of ``[exponent vector, coefficient]`` terms (a
string such as ``"x^2 + y^2"`` is accepted as well).  ``module.relations``
lists the relation vectors, one polynomial per generator.  Without a
``module`` entry the residue field is used.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError
from .polynomial import Polynomial
from .resolution import ModulePresentation
from .ring import RingTower, is_prime, parse_polynomial

__all__ = ["Problem", "load_problem", "parse_problem", "dumps"]


@dataclass
class Problem:
    tower: RingTower
    module: ModulePresentation
    module_given: bool
    source: dict


def dumps(data) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def load_problem(path: str | Path) -> Problem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    return parse_problem(data)


def _int(value, field: str, positive: bool = False) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError("expected an integer", field=field)
    if positive and value <= 0:
        raise ParseError("expected a positive integer", field=field)
    return value


def _polynomial(data, p: int, tower_names, nvars: int, field: str, tower=None) -> Polynomial:
    if isinstance(data, str):
        try:
            return parse_polynomial(data, tower)
        except ValueError as exc:
            raise ParseError(str(exc), field=field) from exc
    if not isinstance(data, list):
        raise ParseError("expected a list of [exponents, coefficient] terms", field=field)
    terms = []
    for k, term in enumerate(data):
        where = f"{field}[{k}]"
        if not (isinstance(term, list) and len(term) == 2 and isinstance(term[0], list)):
            raise ParseError("a term is [exponent vector, coefficient]", field=where)
        exps, coeff = term
        if len(exps) != nvars:
            raise ParseError(f"exponent vector needs {nvars} entries", field=where)
        for e in exps:
            if _int(e, where) < 0:
                raise ParseError("negative exponent", field=where)
        terms.append((tuple(exps), _int(coeff, where)))
    return Polynomial(terms, p, nvars)


def parse_problem(data) -> Problem:
    if not isinstance(data, dict):
        raise ParseError("the description must be a JSON object")
    for key in ("prime", "variables"):
        if key not in data:
            raise ParseError("missing", field=key)
    p = _int(data["prime"], "prime")
    if not is_prime(p) or p >= 2**31:
        raise ParseError(f"{p} is not a prime below 2^31", field="prime")
    variables = data["variables"]
    if not isinstance(variables, list) or not variables:
        raise ParseError("expected a nonempty list", field="variables")
    names, weights = [], []
    for i, v in enumerate(variables):
        where = f"variables[{i}]"
        if isinstance(v, str):
            v = {"name": v}
        if not isinstance(v, dict) or not isinstance(v.get("name"), str):
            raise ParseError("a variable is {name, degree}", field=where)
        names.append(v["name"])
        weights.append(_int(v.get("degree", 1), where + ".degree", positive=True))
    if len(set(names)) != len(names):
        raise ParseError("variable names must be distinct", field="variables")
    strict = data.get("strict", True)
    if not isinstance(strict, bool):
        raise ParseError("expected true or false", field="strict")
    # an empty tower gives the string parser the variable names
    bare = RingTower(p, list(zip(names, weights)))
    n = len(names)
    rels = []
    raw_rels = data.get("relations", [])
    if not isinstance(raw_rels, list):
        raise ParseError("expected a list", field="relations")
    for j, raw in enumerate(raw_rels):
        where = f"relations[{j}]"
        f = _polynomial(raw, p, names, n, where, bare)
        if f.is_zero():
            raise ParseError("relation is zero", field=where)
        if not f.is_homogeneous(weights):
            raise ParseError(f"relation {j} is not homogeneous", field=where)
        rels.append(f)
    try:
        tower = RingTower(p, list(zip(names, weights)), rels, strict=strict)
    except ValueError as exc:
        raise ParseError(str(exc), field="relations") from exc
    module = ModulePresentation.residue_field(tower)
    given = "module" in data
    if given:
        module = _module(data["module"], tower)
    return Problem(tower, module, given, data)


def _module(data, tower: RingTower) -> ModulePresentation:
    if not isinstance(data, dict):
        raise ParseError("expected {generators, relations}", field="module")
    gens = data.get("generators", [0])
    if not isinstance(gens, list) or not gens:
        raise ParseError("expected a nonempty list of degrees", field="module.generators")
    gens = [_int(g, f"module.generators[{i}]") for i, g in enumerate(gens)]
    cols = []
    raw = data.get("relations", [])
    if not isinstance(raw, list):
        raise ParseError("expected a list of relation vectors", field="module.relations")
    for j, col in enumerate(raw):
        where = f"module.relations[{j}]"
        if not isinstance(col, list) or len(col) != len(gens):
            raise ParseError(f"a relation vector needs {len(gens)} entries", field=where)
        cols.append([_polynomial(f, tower.p, tower.names, tower.n, f"{where}[{r}]", tower) for r, f in enumerate(col)])
    try:
        return ModulePresentation.from_columns(tower, tower.c, gens, cols)
    except ValueError as exc:
        raise ParseError(str(exc), field="module.relations") from exc
