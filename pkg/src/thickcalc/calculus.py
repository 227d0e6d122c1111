"""Complete expansions: pullbacks, compositions and coordinate changes.

Every operation sums weighted terms over graph classes.  Classical
operations use white-leaved trees with weight ``1/|sym|``; quantum
operations use connected white-leaved graphs with weight
``(1/|sym|) (hbar/i)^b``.  The bookkeeping variable ``eps`` counts white
vertices (occurrences of the target function).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .graphs import (AnyGraph, BipartiteGraph, automorphism_count, base_of, enumerate_graphs,
                     sort_key, weightings)
from .series import (NO_TRUNCATION, DimensionMismatch, FormalSeries, GeneratingFunction,
                     PolynomialFunction, Truncation)
from .terms import Feynman, Term, contract, quantum_weight, term_latex


class InverseCheckError(ValueError):
    """A surrogate inverse coordinate change fails its validity check."""


@dataclass
class Expansion:
    """A sorted list of weighted terms.

    ``kind`` is ``"<operation>/<mode>"``; ``truncation`` is
    ``(g_order, hbar_order, momentum_order)``.  A symbolic expansion has
    terms without values.
    """

    kind: str
    truncation: tuple
    terms: list = field(default_factory=list)
    dim: int = 0
    base_dim: int = 0
    eps_graded: bool = True

    def total(self) -> FormalSeries:
        g_order, hbar_order, mom_order = self.truncation
        trunc = Truncation(g_order if self.eps_graded else None, hbar_order, mom_order)
        out = FormalSeries.zero(trunc, self.base_dim)
        for t in self.terms:
            out = out + t.contribution(with_eps=self.eps_graded).retruncate(trunc)
        return out

    def coefficients(self) -> list[Fraction]:
        return [t.prefactor for t in self.terms]

    def classes(self) -> list:
        return [t.graph for t in self.terms]

    def hbar_slice(self, k: int) -> list[Term]:
        return [t for t in self.terms if t.hbar_over_i_power == k]

    def latex(self) -> str:
        quantum = self.kind.endswith("quantum") or self.kind.endswith("super")
        parts = [term_latex(t, quantum_suffix=False) for t in self.terms]
        out = []
        for p in parts:
            if not out:
                out.append(p)
            elif p.startswith("-"):
                out.append("- " + p[1:].lstrip())
            else:
                out.append("+ " + p)
        return " ".join(out) if out else "0"

    def to_json(self) -> dict:
        return {"kind": self.kind, "truncation": list(self.truncation), "dim": self.dim,
                "base_dim": self.base_dim, "eps_graded": self.eps_graded,
                "terms": [t.to_json() for t in self.terms]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Expansion":
        return cls(obj["kind"], tuple(obj["truncation"]),
                   [Term.from_json(t) for t in obj["terms"]], int(obj.get("dim", 0)),
                   int(obj.get("base_dim", 0)), bool(obj.get("eps_graded", True)))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True, ensure_ascii=False)


def _classes(max_white: int, max_loops: int, max_degree: int) -> list[BipartiteGraph]:
    out = []
    deg = max(max_degree, 2)
    for w in range(max_white + 1):
        for b in range(max_loops + 1):
            for g in enumerate_graphs(w, b, deg):
                if max(g.black_degrees(), default=0) <= max_degree:
                    out.append(g)
    return sorted(out, key=sort_key)


def _natural_degree(g_order: int, hbar_order: int) -> int:
    # a connected white-leaved graph with w whites and b loops has no black
    # vertex of degree above w + b
    return max(g_order + hbar_order, 2)


def symbolic_expansion(operation: str, g_order: int, hbar_order: int = 0,
                       max_degree: int | None = None, momentum_order: int | None = None,
                       quantum: bool = False) -> Expansion:
    """Terms without numeric values, for display."""
    if not quantum:
        hbar_order = 0
    if max_degree is None:
        max_degree = _natural_degree(g_order, hbar_order)
    terms = []
    graphs = _classes(g_order, hbar_order, max_degree)
    for g in graphs:
        base_w = quantum_weight(g)
        b = g.n_edges - g.n_vertices + 1
        if operation == "compose":
            mo = momentum_order if momentum_order is not None else g_order
            for wg in weightings(g, mo, mo):
                terms.append(Term(wg, Fraction(base_w, automorphism_count(wg)), b, "momentum-I",
                                  target="G"))
            continue
        target = {"pullback": "g", "transform": "y'"}[operation]
        free = "momentum-alpha" if operation == "transform" else "none"
        terms.append(Term(g, Fraction(base_w, automorphism_count(g)), b, free, target=target))
    terms.sort(key=lambda t: sort_key(t.graph))
    mode = "quantum" if quantum else "classical"
    return Expansion(f"{operation}/{mode}", (g_order, hbar_order, momentum_order), terms)


# pullback

def _pullback(S: GeneratingFunction, g: PolynomialFunction, g_order: int, hbar_order: int,
              quantum: bool, phi=None) -> Expansion:
    if not S.symmetric:
        raise ValueError("pullback expansions need a symmetric generating function")
    if g.ncoord != S.dim:
        raise DimensionMismatch(f"target function has {g.ncoord} coordinates, "
                                f"generating function has dimension {S.dim}")
    contexts: dict[int, Feynman] = {}
    terms = []
    for graph in _classes(g_order, hbar_order, S.max_order):
        b = graph.n_edges - graph.n_vertices + 1
        if b not in contexts:
            trunc = Truncation(None, hbar_order - b if quantum else 0, None)
            contexts[b] = Feynman(S, g, "pullback", trunc, quantum, phi)
        value = contract(graph, contexts[b])
        weight = Fraction(quantum_weight(graph), automorphism_count(graph))
        terms.append(Term(graph, weight, b, "none", value))
    mode = "quantum" if quantum else "classical"
    return Expansion(f"pullback/{mode}", (g_order, hbar_order if quantum else 0, None), terms,
                     S.dim, S.base_dim)


def classical_pullback(S: GeneratingFunction, g: PolynomialFunction, g_order: int) -> Expansion:
    """Sum over white-leaved trees with at most ``g_order`` whites, weight ``1/|sym|``."""
    return _pullback(S, g, g_order, 0, False)


def quantum_pullback(S: GeneratingFunction, g: PolynomialFunction, g_order: int,
                     hbar_order: int, phi=None) -> Expansion:
    """The exponent ``(hbar/i) log`` of the quantum pullback of ``e^{(i/hbar) g}``.

    Sums connected graph classes with at most ``g_order`` whites and
    ``hbar_order`` loops with weights ``(1/|sym|)(hbar/i)^b``; ``hbar``
    corrections of the coefficients of ``S`` enter through the values.
    """
    return _pullback(S, g, g_order, hbar_order, True, phi)


# composition

def _composition(F: GeneratingFunction, G: GeneratingFunction, g_order: int, hbar_order: int,
                 momentum_order: int, quantum: bool, white_grading: bool = True) -> Expansion:
    if not (F.symmetric and G.symmetric):
        raise ValueError("composition needs symmetric generating functions")
    if G.base_dim != F.dim:
        raise DimensionMismatch(f"first generating function has dimension {F.dim}, "
                                f"second lives over {G.base_dim} coordinates")
    contexts: dict[int, Feynman] = {}
    terms = []
    max_weight = min(G.max_order, momentum_order)
    for graph in _classes(g_order, hbar_order, F.max_order):
        b = graph.n_edges - graph.n_vertices + 1
        if b not in contexts:
            trunc = Truncation(g_order, hbar_order - b if quantum else 0, momentum_order)
            contexts[b] = Feynman(F, G, "composition", trunc, quantum)
        qw = quantum_weight(graph)
        for wg in weightings(graph, max_weight, momentum_order):
            value = contract(wg, contexts[b])
            terms.append(Term(wg, Fraction(qw, automorphism_count(wg)), b, "momentum-I", value,
                              target="G"))
    terms.sort(key=lambda t: sort_key(t.graph))
    mode = "quantum" if quantum else "classical"
    return Expansion(f"compose/{mode}", (g_order, hbar_order if quantum else 0, momentum_order),
                     terms, G.dim, F.base_dim, white_grading)


def composition_expansion(F, G, g_order, momentum_order, hbar_order=0, quantum=False,
                          white_grading=True) -> Expansion:
    return _composition(F, G, g_order, hbar_order, momentum_order, quantum, white_grading)


def classical_compose(F: GeneratingFunction, G: GeneratingFunction, g_order: int,
                      momentum_order: int, white_grading: bool = True) -> GeneratingFunction:
    """``H(x, r)`` from white-weighted trees paired with ``r``.

    With ``white_grading`` every white vertex carries one ``eps``; the
    coefficients of the result are then series in ``eps``.  Pass
    ``white_grading=False`` when ``G`` is already ``O(eps)``.
    """
    exp = _composition(F.classical(), G.classical(), g_order, 0, momentum_order, False,
                       white_grading)
    return GeneratingFunction.from_series(exp.total(), G.dim, momentum_order)


def quantum_compose(F: GeneratingFunction, G: GeneratingFunction, g_order: int, hbar_order: int,
                    momentum_order: int, white_grading: bool = True) -> GeneratingFunction:
    """``H_hbar(x, r)`` from white-weighted connected graphs with loop factors."""
    exp = _composition(F, G, g_order, hbar_order, momentum_order, True, white_grading)
    return GeneratingFunction.from_series(exp.total(), G.dim, momentum_order)


# coordinate changes

def check_inverse(y_map: Sequence[FormalSeries], y_inverse: Sequence[FormalSeries],
                  order: int, center: Sequence) -> None:
    """Raise unless ``y(y'(c + z)) = c + z`` up to degree ``order`` in ``z``."""
    d = len(center)
    if len(y_inverse) != len(y_map) or any(p.ncoord != d for p in y_inverse):
        raise DimensionMismatch("coordinate change and its inverse do not match")
    shifted = [FormalSeries.constant(c, NO_TRUNCATION, d) + FormalSeries.coordinate(i, d)
               for i, c in enumerate(center)]
    inner = [p.substitute(shifted, ncoord=d) for p in y_inverse]
    for i, comp in enumerate(y_map):
        diff = comp.substitute(inner, ncoord=d) - shifted[i]
        bad = [k for k in diff.terms if sum(k[3]) <= order]
        if bad:
            raise InverseCheckError(
                f"component {i + 1} of y(y'(y)) differs from the identity at degree "
                f"{min(sum(k[3]) for k in bad)} <= {order}")


def _default_center(S: GeneratingFunction) -> list:
    phi = S.phi(hbar=False)
    if not all(p.is_constant() for p in phi):
        raise ValueError("pass an explicit center: phi depends on the base coordinates")
    return [p.constant_term() for p in phi]


def _transformation(S: GeneratingFunction, x_map, y_inverse, momentum_order: int,
                    hbar_order: int, quantum: bool, y_map=None, validity_order=None,
                    center=None) -> Expansion:
    if not S.symmetric:
        raise ValueError("coordinate changes need a symmetric generating function")
    y_inverse = list(y_inverse)
    if any(p.ncoord != S.dim for p in y_inverse):
        raise DimensionMismatch("inverse coordinate change must be functions of the old coordinates")
    if y_map is not None:
        check_inverse(list(y_map), y_inverse,
                      momentum_order if validity_order is None else validity_order,
                      _default_center(S) if center is None else center)
    if x_map is not None:
        S = S.pull_base(list(x_map))
    contexts: dict[int, Feynman] = {}
    terms = []
    for graph in _classes(momentum_order, hbar_order if quantum else 0, S.max_order):
        b = graph.n_edges - graph.n_vertices + 1
        if b not in contexts:
            trunc = Truncation(None, hbar_order - b if quantum else 0, momentum_order)
            contexts[b] = Feynman(S, y_inverse, "transformation", trunc, quantum)
        value = contract(graph, contexts[b])
        weight = Fraction(quantum_weight(graph), automorphism_count(graph))
        terms.append(Term(graph, weight, b, "momentum-alpha", value, target="y'"))
    mode = "quantum" if quantum else "classical"
    return Expansion(f"transform/{mode}", (momentum_order, hbar_order if quantum else 0,
                                           momentum_order),
                     terms, len(y_inverse), S.base_dim, eps_graded=False)


def transformation_expansion(S, x_map, y_inverse, momentum_order, hbar_order=0, quantum=False,
                             **kw) -> Expansion:
    return _transformation(S, x_map, y_inverse, momentum_order, hbar_order, quantum, **kw)


def classical_transform(S: GeneratingFunction, x_map, y_inverse: Sequence[FormalSeries],
                        momentum_order: int, y_map=None, validity_order=None,
                        center=None) -> GeneratingFunction:
    """``S'(x', q')``: each white carries one component of ``y'(y)`` paired with ``q'``.

    ``x_map`` expresses the old base coordinates through the new ones (or is
    ``None`` when the base is unchanged).  When ``y_map`` (the forward change
    ``y = y(y')``) is given, ``y(y'(y)) = y`` is verified to ``validity_order``
    around ``center`` (default ``phi``).
    """
    exp = _transformation(S.classical(), x_map, y_inverse, momentum_order, 0, False,
                          y_map, validity_order, center)
    return GeneratingFunction.from_series(exp.total(), len(list(y_inverse)), momentum_order)


def quantum_transform(S: GeneratingFunction, x_map, y_inverse: Sequence[FormalSeries],
                      momentum_order: int, hbar_order: int, y_map=None, validity_order=None,
                      center=None) -> GeneratingFunction:
    """Quantum coordinate change; loops carry ``(hbar/i)^b`` as in composition."""
    exp = _transformation(S, x_map, y_inverse, momentum_order, hbar_order, True,
                          y_map, validity_order, center)
    return GeneratingFunction.from_series(exp.total(), len(list(y_inverse)), momentum_order)


def super_expansion(S: GeneratingFunction, g: PolynomialFunction, parities, g_order: int,
                    hbar_order: int) -> Expansion:
    """Signed sum over labelled ordered graphs (see :mod:`thickcalc.supercase`)."""
    from .supercase import assemble_super
    return assemble_super(S, g, parities, g_order, hbar_order)
