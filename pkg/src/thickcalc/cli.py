"""Command-line interface.

Commands::

    thickcalc enumerate --white N --loops L [--momentum-order M] [--ordered]
    thickcalc pullback  [--classical|--quantum|--super] --g-order N [S.json g.json]
    thickcalc compose   [--classical|--quantum] --g-order N --momentum-order M [F.json G.json]
    thickcalc transform [--classical|--quantum] --momentum-order M [S.json change.json]
    thickcalc verify    [--classical|--quantum|--super] --g-order N --trials T --seed K
    thickcalc sign      graph.json

Exit codes: 0 success, 1 other error, 2 unreadable input, 3 dimension
mismatch, 4 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from . import calculus, oracle
from .graphs import (GraphError, OrderedGraph, automorphism_count, base_of, describe,
                     enumerate_graphs, graph_from_json, sort_key)
from .instances import random_generating_function, random_polynomial
from .series import (DimensionMismatch, FormalSeries, GeneratingFunction, PolynomialFunction,
                     Truncation, load_json)
from .supercase import assemble_super, enumerate_ordered_graphs
from .terms import (Term, crossing_pairs, edge_partition, graph_sign, partition_parity,
                    quantum_weight, term_latex)

EXIT_ERROR, EXIT_PARSE, EXIT_DIM, EXIT_MISMATCH = 1, 2, 3, 4


class InputError(ValueError):
    """An input file is missing or cannot be parsed."""


class VerificationMismatch(RuntimeError):
    pass


@dataclass
class JobSpec:
    command: str
    inputs: list = field(default_factory=list)
    g_order: int = 2
    hbar_order: int = 0
    momentum_order: int | None = None
    mode: str = "classical"
    fmt: str = "text"
    ordered: bool = False
    white: int = 2
    loops: int = 0
    trials: int = 10
    seed: int = 0
    dim: int = 3

    def validate(self):
        for name in ("g_order", "hbar_order", "white", "loops", "trials"):
            if getattr(self, name) < 0:
                raise InputError(f"--{name.replace('_', '-')} must be nonnegative")
        if self.momentum_order is not None and self.momentum_order < 0:
            raise InputError("--momentum-order must be nonnegative")
        if self.dim < 1:
            raise InputError("--dim must be positive")
        need = {"sign": 1}
        if len(self.inputs) < need.get(self.command, 0):
            raise InputError(f"{self.command} needs an input file")
        if self.command in ("pullback", "compose", "transform") and len(self.inputs) not in (0, 2):
            raise InputError(f"{self.command} takes two input files (or none for symbolic output)")


# input

def _read(path: str) -> dict:
    try:
        return load_json(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _parse(path: str, fn):
    obj = _read(path)
    try:
        return fn(obj)
    except DimensionMismatch:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError, GraphError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _polys(obj) -> list[PolynomialFunction]:
    if not isinstance(obj, list):
        raise ValueError("expected a list of polynomials")
    return [PolynomialFunction.from_json(p) for p in obj]


# output

def _term_text(t: Term) -> str:
    hb = f" (hbar/i)^{t.hbar_over_i_power}" if t.hbar_over_i_power else ""
    line = f"{t.prefactor}{hb}  {describe(t.graph)}"
    if t.value is not None:
        line += f"  value: {t.value.to_text()}"
    return line


def _emit_expansion(exp: calculus.Expansion, fmt: str, out: TextIO, numeric: bool):
    if fmt == "json":
        obj = exp.to_json()
        if numeric:
            obj["total"] = exp.total().to_json()
        out.write(json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n")
    elif fmt == "latex":
        out.write(exp.latex() + "\n")
        if numeric:
            out.write(f"% value: {exp.total().to_text()}\n")
    else:
        for t in exp.terms:
            out.write(_term_text(t) + "\n")
        if numeric:
            out.write(f"total: {exp.total().to_text()}\n")


def _emit_gf(S: GeneratingFunction, fmt: str, out: TextIO):
    if fmt == "json":
        out.write(json.dumps(S.to_json(), indent=1, sort_keys=True) + "\n")
    else:
        out.write(S.as_series().to_text() + "\n")


# commands

def cmd_enumerate(job: JobSpec, out: TextIO) -> int:
    max_deg = job.momentum_order if job.momentum_order is not None else max(job.white + job.loops, 2)
    rows = []
    if job.ordered:
        for w in range(job.white + 1):
            for b in range(job.loops + 1):
                for og in enumerate_ordered_graphs(w, b, max_deg):
                    rows.append({"graph": og.to_json(), "describe": describe(og), "loops": b,
                                 "crossings": [list(p) for p in crossing_pairs(og)]})
    else:
        graphs = []
        for w in range(job.white + 1):
            for b in range(job.loops + 1):
                graphs += enumerate_graphs(w, b, max(max_deg, 2))
        graphs = [g for g in graphs if max(g.black_degrees(), default=0) <= max_deg]
        for g in sorted(graphs, key=sort_key):
            b = g.n_edges - g.n_vertices + 1
            rows.append({"graph": g.to_json(), "describe": describe(g), "loops": b,
                         "sym": automorphism_count(g), "weight": quantum_weight(g)})
    if job.fmt == "json":
        out.write(json.dumps(rows, indent=1, sort_keys=True, ensure_ascii=False) + "\n")
    elif job.fmt == "latex":
        for r in rows:
            g = graph_from_json(r["graph"])
            sym = r.get("sym", 1)
            out.write(term_latex(Term(g, 1, r["loops"], crossing=tuple(map(tuple, r.get(
                "crossings", []))))) + (f" \\quad |\\mathrm{{sym}}| = {sym}" if "sym" in r else "")
                + "\n")
    else:
        for r in rows:
            extra = f"|sym|={r['sym']}" if "sym" in r else "slots=" + json.dumps(
                r["graph"]["slot_order"])
            out.write(f"{r['describe']}  loops={r['loops']}  {extra}\n")
    return 0


def cmd_pullback(job: JobSpec, out: TextIO) -> int:
    if not job.inputs:
        exp = calculus.symbolic_expansion("pullback", job.g_order, job.hbar_order,
                                          job.momentum_order, quantum=job.mode != "classical")
        _emit_expansion(exp, job.fmt, out, numeric=False)
        return 0
    S = _parse(job.inputs[0], GeneratingFunction.from_json)
    g = _parse(job.inputs[1], PolynomialFunction.from_json)
    if g.dim != S.dim:
        raise DimensionMismatch(f"g has {g.dim} coordinates but S has dimension {S.dim}")
    if job.mode == "classical":
        exp = calculus.classical_pullback(S, g, job.g_order)
    elif job.mode == "quantum":
        exp = calculus.quantum_pullback(S, g, job.g_order, job.hbar_order)
    else:
        exp = assemble_super(S, g, S.parities, job.g_order, job.hbar_order)
    _emit_expansion(exp, job.fmt, out, numeric=True)
    return 0


def cmd_compose(job: JobSpec, out: TextIO) -> int:
    mo = job.momentum_order if job.momentum_order is not None else job.g_order
    quantum = job.mode == "quantum"
    if not job.inputs:
        exp = calculus.symbolic_expansion("compose", job.g_order, job.hbar_order,
                                          momentum_order=mo, quantum=quantum)
        _emit_expansion(exp, job.fmt, out, numeric=False)
        return 0
    F = _parse(job.inputs[0], GeneratingFunction.from_json)
    G = _parse(job.inputs[1], GeneratingFunction.from_json)
    exp = calculus.composition_expansion(F, G, job.g_order, mo, job.hbar_order, quantum)
    if job.fmt == "latex":
        _emit_expansion(exp, "latex", out, numeric=False)
    else:
        _emit_gf(GeneratingFunction.from_series(exp.total(), G.dim, mo), job.fmt, out)
    return 0


def cmd_transform(job: JobSpec, out: TextIO) -> int:
    mo = job.momentum_order if job.momentum_order is not None else job.g_order
    quantum = job.mode == "quantum"
    if not job.inputs:
        exp = calculus.symbolic_expansion("transform", mo, job.hbar_order, quantum=quantum)
        _emit_expansion(exp, job.fmt, out, numeric=False)
        return 0
    S = _parse(job.inputs[0], GeneratingFunction.from_json)
    change = _read(job.inputs[1])
    try:
        y_inv = _polys(change["y_inverse"])
        y_map = _polys(change["y_map"]) if "y_map" in change else None
        x_map = _polys(change["x_map"]) if "x_map" in change else None
        validity = change.get("validity_order")
        center = change.get("center")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{job.inputs[1]}: {exc}") from exc
    exp = calculus.transformation_expansion(S, x_map, y_inv, mo, job.hbar_order, quantum,
                                            y_map=y_map, validity_order=validity, center=center)
    if job.fmt == "latex":
        _emit_expansion(exp, "latex", out, numeric=False)
    else:
        _emit_gf(GeneratingFunction.from_series(exp.total(), len(y_inv), mo), job.fmt, out)
    return 0


def _first_difference(a: FormalSeries, b: FormalSeries) -> str:
    diff = a - b
    key = min(diff.terms)
    (e, h, m, c) = key
    mono = FormalSeries._make({key: diff.terms[key]}, Truncation(), diff.ncoord)
    return (f"first differing term {mono.to_text()} "
            f"(expansion {a.terms.get(key, 0)}, oracle {b.terms.get(key, 0)})")


def _verify_instance(job: JobSpec, rng: random.Random):
    d = rng.randint(1, job.dim)
    mo = job.momentum_order if job.momentum_order is not None else 4
    hb = job.hbar_order if job.mode != "classical" else 0
    S = random_generating_function(rng, d, rng.randint(2, max(mo, 2)), hb)
    g = random_polynomial(rng, d, rng.randint(1, 4))
    if job.mode == "classical":
        return calculus.classical_pullback(S, g, job.g_order).total(), \
            oracle.general_R(S, g, job.g_order)
    quantum = calculus.quantum_pullback(S, g, job.g_order, hb)
    if job.mode == "quantum":
        return quantum.total(), oracle.quantum_oracle(S, g, job.g_order, hb)
    # super: with all parities even the signed ordered sum collapses
    return assemble_super(S, g, (0,) * d, job.g_order, hb).total(), quantum.total()


def cmd_verify(job: JobSpec, out: TextIO) -> int:
    if job.inputs:
        S = _parse(job.inputs[0], GeneratingFunction.from_json)
        g = _parse(job.inputs[1], PolynomialFunction.from_json) if len(job.inputs) > 1 else None
        if g is None:
            raise InputError("verify with inputs needs S.json and g.json")
        if g.dim != S.dim:
            raise DimensionMismatch(f"g has {g.dim} coordinates but S has dimension {S.dim}")
        if job.mode == "classical":
            pairs = [(calculus.classical_pullback(S, g, job.g_order).total(),
                      oracle.general_R(S, g, job.g_order))]
        else:
            pairs = [(calculus.quantum_pullback(S, g, job.g_order, job.hbar_order).total(),
                      oracle.quantum_oracle(S, g, job.g_order, job.hbar_order))]
    else:
        rng = random.Random(job.seed)
        pairs = (_verify_instance(job, random.Random(rng.getrandbits(64)))
                 for _ in range(job.trials))
    for n, (a, b) in enumerate(pairs, 1):
        if a != b:
            raise VerificationMismatch(f"trial {n}: {_first_difference(a, b)}")
        out.write(f"trial {n}: ok\n")
    out.write("all trials agree\n")
    return 0


def cmd_sign(job: JobSpec, out: TextIO) -> int:
    obj = _read(job.inputs[0])
    g = _parse(job.inputs[0], graph_from_json)
    if not isinstance(g, OrderedGraph):
        raise InputError(f"{job.inputs[0]}: sign needs a graph with slot_order")
    crossings = crossing_pairs(g)
    parities = obj.get("parities")
    result = {"crossings": [list(p) for p in crossings],
              "latex": term_latex(Term(g, 1, base_of(g).n_edges - base_of(g).n_vertices + 1
                                       if base_of(g).is_connected() else 0,
                                       crossing=crossings))}
    if parities is not None:
        try:
            sign = graph_sign(g, parities)
            flat = [int(p) for s in parities for p in s]
        except (TypeError, ValueError) as exc:
            raise InputError(f"{job.inputs[0]}: {exc}") from exc
        result["sign"] = sign
        result["partition_sign"] = -1 if partition_parity(flat, edge_partition(g)) else 1
    if job.fmt == "json":
        out.write(json.dumps(result, indent=1, sort_keys=True) + "\n")
    elif job.fmt == "latex":
        out.write(result["latex"] + "\n")
    else:
        out.write("crossings: " + (", ".join(f"{i + 1}x{j + 1}" for i, j in crossings) or "none")
                  + "\n")
        if "sign" in result:
            out.write(f"sign: {result['sign']:+d}\n")
    return 0


COMMANDS = {"enumerate": cmd_enumerate, "pullback": cmd_pullback, "compose": cmd_compose,
            "transform": cmd_transform, "verify": cmd_verify, "sign": cmd_sign}


def run(job: JobSpec, out: TextIO | None = None, err: TextIO | None = None) -> int:
    """Execute a job and return its exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        job.validate()
        return COMMANDS[job.command](job, out)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE
    except DimensionMismatch as exc:
        err.write(f"dimension mismatch: {exc}\n")
        return EXIT_DIM
    except VerificationMismatch as exc:
        err.write(f"verification failed: {exc}\n")
        return EXIT_MISMATCH
    except (ValueError, RuntimeError, GraphError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thickcalc",
                                description="Graph expansions for thick morphisms")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("inputs", nargs="*", help="JSON input files")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--classical", dest="mode", action="store_const", const="classical")
    mode.add_argument("--quantum", dest="mode", action="store_const", const="quantum")
    mode.add_argument("--super", dest="mode", action="store_const", const="super")
    p.add_argument("--white", type=int, default=2)
    p.add_argument("--loops", type=int, default=0)
    p.add_argument("--g-order", type=int, default=2)
    p.add_argument("--hbar-order", type=int, default=None)
    p.add_argument("--momentum-order", type=int, default=None)
    p.add_argument("--ordered", action="store_true")
    p.add_argument("--format", dest="fmt", choices=["latex", "json", "text"], default=None)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=3)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    mode = args.mode or "classical"
    hbar = args.hbar_order if args.hbar_order is not None else (1 if mode != "classical" else 0)
    fmt = args.fmt or ("latex" if args.command == "pullback" else "text")
    job = JobSpec(args.command, list(args.inputs), args.g_order, hbar, args.momentum_order, mode,
                  fmt, args.ordered, args.white, args.loops, args.trials, args.seed, args.dim)
    return run(job)


if __name__ == "__main__":
    sys.exit(main())
