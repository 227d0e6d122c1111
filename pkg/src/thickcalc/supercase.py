"""Ordered-edge graphs and the signed expansion for non-symmetric coefficients.

When the coefficients ``S^{a_1...a_m}`` are not symmetric every edge at a
black vertex occupies a definite slot.  The expansion then runs over
vertex-labelled graphs with slot orders, each weighted by
``1/(n_black! n_white!)``, and in the super case each crossing of two edges
in the standard drawing contributes the product of their index parities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .graphs import SINGLE_BLACK, SINGLE_WHITE, BipartiteGraph, OrderedGraph
from .series import DimensionMismatch, GeneratingFunction, PolynomialFunction, Truncation
from .terms import Feynman, Term, contract, crossing_pairs


class ParityError(ValueError):
    """The parity table does not cover every coordinate."""


@dataclass(frozen=True)
class ParityTable:
    """A parity bit for every coordinate index (0-based here, 1-based in files)."""

    bits: tuple

    @classmethod
    def of(cls, parities, dim: int) -> "ParityTable":
        if isinstance(parities, ParityTable):
            bits = parities.bits
        elif isinstance(parities, Mapping):
            missing = [a + 1 for a in range(dim) if a not in parities]
            if missing:
                raise ParityError(f"no parity for coordinates {missing}")
            bits = tuple(parities[a] for a in range(dim))
        else:
            bits = tuple(parities)
        if len(bits) != dim:
            raise ParityError(f"parity table has {len(bits)} entries for dimension {dim}")
        if any(b not in (0, 1) for b in bits):
            raise ParityError("parities must be 0 or 1")
        return cls(tuple(int(b) for b in bits))

    def coefficient_parity(self, idx: Sequence[int]) -> int:
        """Parity of ``S^{idx}``: the sum of its index parities mod 2."""
        return sum(self.bits[a] for a in idx) % 2


def _degree_sequences(n: int, total: int, lo: int, hi: int) -> Iterator[tuple]:
    if n == 0:
        if total == 0:
            yield ()
        return
    for first in range(lo, hi + 1):
        rest = total - first
        if lo * (n - 1) <= rest <= hi * (n - 1):
            for tail in _degree_sequences(n - 1, rest, lo, hi):
                yield (first,) + tail


def _connected(n_black: int, slots: Sequence[Sequence[int]], n_white: int) -> bool:
    parent = list(range(n_black + n_white))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b, s in enumerate(slots):
        for w in s:
            parent[find(b)] = find(n_black + w)
    return len({find(x) for x in range(n_black + n_white)}) == 1


def _shapes(n_white: int, n_loops: int, max_black_degree: int):
    """``(n_black, degrees)`` compatible with the edge count of a connected graph."""
    if n_white == 0:
        if n_loops == 0:
            yield 1, ()
        return
    if n_white == 1 and n_loops == 0:
        yield 0, ()
    for n in range(1, n_white + n_loops):
        edges = n + n_white + n_loops - 1
        for degs in _degree_sequences(n, edges, 2, max_black_degree):
            yield n, degs


def enumerate_ordered_graphs(n_white: int, n_loops: int,
                             max_black_degree: int) -> list[OrderedGraph]:
    """Every vertex-labelled, slot-ordered, connected white-leaved graph.

    No isomorphism quotient is taken: relabelled copies are distinct objects.
    """
    out = []
    for n, degs in _shapes(n_white, n_loops, max_black_degree):
        if n == 1 and not degs:
            out.append(OrderedGraph(SINGLE_BLACK, ((),)))
            continue
        if n == 0:
            out.append(OrderedGraph(SINGLE_WHITE, ()))
            continue
        per_black = [list(itertools.product(range(n_white), repeat=m)) for m in degs]
        for slots in itertools.product(*per_black):
            used = {w for s in slots for w in s}
            if len(used) == n_white and _connected(n, slots, n_white):
                out.append(OrderedGraph.from_slots(n, n_white, slots))
    return out


def _first_appearance(slots: Sequence[Sequence[int]]) -> bool:
    seen = -1
    for s in slots:
        for w in s:
            if w > seen + 1:
                return False
            seen = max(seen, w)
    return True


def white_normal_graphs(n_white: int, n_loops: int,
                        max_black_degree: int) -> Iterator[tuple[OrderedGraph, int]]:
    """Ordered graphs whose whites are numbered by first appearance, with multiplicity.

    Every white relabelling of such a graph is distinct and has the same
    value, so each representative stands for ``n_white!`` labelled objects.
    Summing with these multiplicities equals summing over
    :func:`enumerate_ordered_graphs`.
    """
    mult = math.factorial(n_white)
    for n, degs in _shapes(n_white, n_loops, max_black_degree):
        if n == 1 and not degs:
            yield OrderedGraph(SINGLE_BLACK, ((),)), 1
            continue
        if n == 0:
            yield OrderedGraph(SINGLE_WHITE, ()), 1
            continue
        per_black = [list(itertools.product(range(n_white), repeat=m)) for m in degs]
        for slots in itertools.product(*per_black):
            if not _first_appearance(slots):
                continue
            used = {w for s in slots for w in s}
            if len(used) == n_white and _connected(n, slots, n_white):
                yield OrderedGraph.from_slots(n, n_white, slots), mult


def assemble_super(S: GeneratingFunction, g: PolynomialFunction, parities, g_order: int,
                   hbar_order: int) -> "Expansion":
    """Signed sum over labelled ordered graphs, weight ``1/(n_black! n_white!)``.

    The crossing signs depend on the index values and are applied inside the
    contraction.  Terms are grouped by white relabelling, so a stored
    prefactor is ``n_white!/(n_black! n_white!)``.
    """
    from .calculus import Expansion

    if g.ncoord != S.dim:
        raise DimensionMismatch(f"target function has {g.ncoord} coordinates, "
                                f"generating function has dimension {S.dim}")
    if parities is None:
        parities = S.parities
    if parities is None:
        raise ParityError("the super expansion needs a parity for every coordinate")
    table = ParityTable.of(parities, S.dim)
    contexts: dict[int, Feynman] = {}
    terms = []
    for w in range(g_order + 1):
        for b in range(hbar_order + 1):
            for og, mult in white_normal_graphs(w, b, S.max_order):
                if b not in contexts:
                    trunc = Truncation(None, hbar_order - b, None)
                    contexts[b] = Feynman(S, g, "pullback", trunc, True, parities=table.bits)
                crossing = crossing_pairs(og)
                value = contract(og, contexts[b], crossing)
                weight = Fraction(mult, math.factorial(og.base.n_black) * math.factorial(w))
                terms.append(Term(og, weight, b, "none", value, crossing))
    return Expansion("pullback/super", (g_order, hbar_order, None), terms, S.dim, S.base_dim)
