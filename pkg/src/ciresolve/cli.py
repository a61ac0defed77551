"""Command line front end.

    ciresolve COMMAND --input FILE [--max-homological N] [--max-degree D]
                      [--seed S] [--format text|json]

Exit status is 0 when every requested check passes, 1 when a certificate
fails, and the error's ``exit_code`` for input, regularity, degree-bound,
undetermined-growth and lifting errors.
"""
from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass
from typing import Callable

from .complexes import ChainComplex, ChainMap, GradedMap, homology_dims
from .construct import iterate_tower, spliced_resolution
from .errors import CIError
from .growth import classify_ring
from .io import Problem, dumps, load_problem
from .resolution import BettiTable, default_degree_bound

RING_INFO_DEGREE = 30


@dataclass
class JobConfig:
    input: str
    command: str
    N: int = 12
    D: int | None = None
    seed: int = 0
    format: str = "text"


@dataclass
class Report:
    data: dict
    text: str
    ok: bool = True


def _positive(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _degree_bound(problem: Problem, cfg: JobConfig) -> int:
    return cfg.D if cfg.D is not None else default_degree_bound(problem.tower, problem.module, cfg.N)


def _certify(problem: Problem, cfg: JobConfig) -> int:
    D = _degree_bound(problem, cfg)
    problem.tower.certify_regular_sequence(D)
    return D


def _series(values: list[int]) -> list[int]:
    out = list(values)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _nonzero(dims: list[int], start: int) -> str:
    parts = [f"{start + k}: {v}" for k, v in enumerate(dims) if v]
    return "{" + ", ".join(parts) + "}"


def _map_json(m: GradedMap) -> dict:
    return {"source": list(m.source), "target": list(m.target), "twist": m.twist, "rows": m.to_lists()}


def _map_text(m: GradedMap, indent: str = "    ") -> list[str]:
    rows = m.to_lists()
    if not rows or not rows[0]:
        return [indent + "(empty)"]
    width = max(len(x) for row in rows for x in row)
    return [indent + "[ " + "  ".join(x.rjust(width) for x in row) + " ]" for row in rows]


def _complex_json(c: ChainComplex) -> dict:
    return {
        "level": c.level,
        "lo": c.lo,
        "modules": {str(i): list(c.module(i)) for i in c.indices()},
        "differentials": {str(i): _map_json(c.d(i)) for i in range(c.lo + 1, c.hi + 1)},
        "tail": c.tail.to_dict() if c.tail is not None else None,
    }


def cmd_ring_info(problem: Problem, cfg: JobConfig) -> Report:
    t = problem.tower
    D = cfg.D if cfg.D is not None else RING_INFO_DEGREE
    t.certify_regular_sequence(D)
    levels = {str(s): _series(t.hilbert_series(s, D)) for s in range(t.c + 1)}
    data = {
        "prime": t.p,
        "variables": [{"name": n, "degree": w} for n, w in zip(t.names, t.weights)],
        "relations": [f.to_string(t.names) for f in t.relations],
        "relation_degrees": list(t.relation_degrees),
        "codimension": t.c,
        "regular_certified_to": D,
        "hilbert_series": levels,
    }
    lines = [
        f"prime: {t.p}",
        "variables: " + ", ".join(f"{n} (degree {w})" for n, w in zip(t.names, t.weights)),
    ]
    if t.c == 0:
        lines.append("codimension 0 presentation (regular ring)")
    else:
        for f, e in zip(t.relations, t.relation_degrees):
            lines.append(f"relation: {f.to_string(t.names)} (degree {e})")
        lines.append(f"regular sequence: certified to degree {D}")
    for s in range(t.c + 1):
        lines.append(f"HS of Q_{s}: " + ",".join(map(str, levels[str(s)])))
    return Report(data, "\n".join(lines))


def cmd_resolve(problem: Problem, cfg: JobConfig) -> Report:
    D = _certify(problem, cfg)
    result = iterate_tower(problem.tower, problem.module, cfg.N, D, certify=False)
    res = result.resolutions[-1]
    G = res.complex
    data = {"resolution": _complex_json(G), "minimal": res.minimal, "N": cfg.N, "D": D}
    lines = [f"spliced resolution over Q_{G.level} (N = {cfg.N}, D = {D})"]
    if G.tail is not None:
        lines.append(f"periodic tail: from {G.tail.start}, period {G.tail.period}, degree shift {G.tail.shift}")
    for i in G.indices():
        lines.append(f"G_{i}: " + " ".join(f"R(-{g})" if g else "R" for g in G.module(i)))
    for i in range(G.lo + 1, G.hi + 1):
        lines.append(f"d_{i}:")
        lines.extend(_map_text(G.d(i)))
    return Report(data, "\n".join(lines))


def cmd_betti(problem: Problem, cfg: JobConfig) -> Report:
    D = _certify(problem, cfg)
    res = spliced_resolution(problem.tower, problem.module, cfg.N, D)
    table = BettiTable.from_complex(res.complex, 0, res.complex.hi)
    data = {"betti": table.to_json(), "N": cfg.N, "D": D}
    return Report(data, table.to_text())


def cmd_classify(problem: Problem, cfg: JobConfig) -> Report:
    D = _certify(problem, cfg)
    report = classify_ring(problem.tower, cfg.N, D)
    data = report.to_json()
    lines = [report.describe()]
    lines.append(f"growth degree {report.growth_degree} over window {list(report.window)}")
    lines.append("oracle Betti agreement: " + str(report.oracle_agrees).lower())
    if report.poincare_agrees is not None:
        lines.append("Poincare series agreement: " + str(report.poincare_agrees).lower())
    lines.extend(report.notes)
    return Report(data, "\n".join(lines), report.passed)


def _op_data(op: ChainMap) -> dict:
    return {
        "name": op.name,
        "shift": op.shift,
        "twist": op.twist,
        "components": {str(i): _map_json(op.component(i)) for i in range(op.source.lo + op.shift, op.source.hi + 1)},
    }


def cmd_operators(problem: Problem, cfg: JobConfig) -> Report:
    D = _certify(problem, cfg)
    result = iterate_tower(problem.tower, problem.module, cfg.N, D, certify=False)
    ops = result.operators
    ok = ops.verify() and ops.commute()
    data = {"operators": [_op_data(op) for op in ops.operators], "chain_maps": ok}
    lines = []
    for op in ops.operators:
        lines.append(f"{op.name}: homological shift {op.shift}, internal twist {op.twist}")
        for i in range(op.source.lo + op.shift, op.source.hi + 1):
            m = op.component(i)
            lines.append(f"  component {i} -> {i - op.shift} (twist {m.twist}):")
            lines.extend(_map_text(m, "    "))
    if not ops.operators:
        lines.append("no operators (codimension 0)")
    lines.append("chain maps commuting with d and with each other: " + ("yes" if ok else "NO"))
    return Report(data, "\n".join(lines), ok)


def cmd_cone_check(problem: Problem, cfg: JobConfig) -> Report:
    D = _certify(problem, cfg)
    t = problem.tower
    result = iterate_tower(t, problem.module, cfg.N, D)
    cert = result.certificate
    data = {"certificate": cert.to_json()}
    ok = cert.passed
    lines = [
        f"iterated cone over Q_{t.c} compared with the {t.c}-fold tensored-down regular resolution",
        f"homological window {list(cert.indices)}, internal degrees {list(cert.degrees)}",
    ]
    lines.append("nonzero graded pieces as {internal degree: dimension}:")
    for i in sorted(cert.subject_dims):
        mark = "" if cert.subject_dims[i] == cert.witness_dims[i] else "   <-- mismatch"
        cone_part = _nonzero(cert.subject_dims[i], cert.degrees[0])
        wit_part = _nonzero(cert.witness_dims[i], cert.degrees[0])
        lines.append(f"  H_{i}: cone {cone_part}  witness {wit_part}{mark}")
    if t.c > 1:
        order = list(range(t.c))
        random.Random(cfg.seed).shuffle(order)
        other = iterate_tower(t, problem.module, cfg.N, D, order=order, certify=False).cone
        lo, hi = cert.indices
        dims = {i: homology_dims(other, i, cert.degrees) for i in range(lo, hi + 1)}
        same = dims == cert.subject_dims
        ok = ok and same
        default = list(range(t.c, 0, -1))
        shuffled = [j + 1 for j in order]
        data["order_check"] = {"default": default, "order": shuffled, "equal": same}
        names = lambda seq: ", ".join(f"chi_{j}" for j in seq)  # noqa: E731
        lines.append(f"cones in order ({names(shuffled)}) versus ({names(default)}): homology " + ("equal" if same else "DIFFERS"))
    lines.append("PASS" if ok else "FAIL")
    data["passed"] = ok
    return Report(data, "\n".join(lines), ok)


COMMANDS: dict[str, Callable[[Problem, JobConfig], Report]] = {
    "ring-info": cmd_ring_info,
    "resolve": cmd_resolve,
    "betti": cmd_betti,
    "classify": cmd_classify,
    "operators": cmd_operators,
    "cone-check": cmd_cone_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ciresolve", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--input", required=True, help="JSON ring/module description")
    parser.add_argument("--max-homological", type=_positive, default=12, dest="N")
    parser.add_argument("--max-degree", type=_positive, default=None, dest="D")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", choices=["text", "json"], default="text")
    return parser


def run(cfg: JobConfig) -> Report:
    problem = load_problem(cfg.input)
    return COMMANDS[cfg.command](problem, cfg)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = JobConfig(args.input, args.command, args.N, args.D, args.seed, args.format)
    try:
        report = run(cfg)
    except CIError as exc:
        if cfg.format == "json":
            sys.stdout.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if cfg.format == "json":
        sys.stdout.write(dumps(report.data))
    else:
        sys.stdout.write(report.text + "\n")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
