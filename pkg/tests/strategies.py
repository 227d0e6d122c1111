"""Shared hypothesis strategies and brute-force helpers for the tests."""

import itertools
from fractions import Fraction

from hypothesis import strategies as st

from thickcalc.graphs import BipartiteGraph
from thickcalc.series import FormalSeries, Scalar, Truncation

small_fractions = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 9))
scalars = st.builds(Scalar, small_fractions, small_fractions)


@st.composite
def series(draw, ncoord=2, trunc=Truncation(3, 2, 3), max_terms=5):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = draw(st.integers(0, 3))
        h = draw(st.integers(0, 2))
        mom = tuple(sorted(draw(st.lists(st.integers(0, 1), max_size=3))))
        coords = tuple(draw(st.integers(0, 2)) for _ in range(ncoord))
        terms[(e, h, mom, coords)] = draw(scalars)
    return FormalSeries(terms, trunc, ncoord)


@st.composite
def graphs(draw, max_black=3, max_white=3, max_mult=2):
    nb = draw(st.integers(1, max_black))
    nw = draw(st.integers(1, max_white))
    mults = draw(st.lists(st.integers(0, max_mult), min_size=nb * nw, max_size=nb * nw))
    edges = [(b, w, mults[b * nw + w]) for b in range(nb) for w in range(nw)
             if mults[b * nw + w]]
    return BipartiteGraph(nb, nw, edges)


def connected_graphs(**kw):
    return graphs(**kw).filter(lambda g: g.is_connected())


def brute_automorphisms(g: BipartiteGraph) -> int:
    """Count vertex permutations preserving edges, multiplicities, root and weights."""
    edges = {(b, w): m for b, w, m in g.edges}
    count = 0
    for bp in itertools.permutations(range(g.n_black)):
        for wp in itertools.permutations(range(g.n_white)):
            if g.root is not None:
                side, i = g.root
                if (bp if side == "b" else wp)[i] != i:
                    continue
            if all(edges.get((bp[b], wp[w])) == m for (b, w), m in edges.items()):
                count += 1
    return count


def brute_isomorphic(g1: BipartiteGraph, g2: BipartiteGraph) -> bool:
    if (g1.n_black, g1.n_white) != (g2.n_black, g2.n_white):
        return False
    e2 = {(b, w): m for b, w, m in g2.edges}
    e1 = {(b, w): m for b, w, m in g1.edges}
    for bp in itertools.permutations(range(g1.n_black)):
        for wp in itertools.permutations(range(g1.n_white)):
            if {(bp[b], wp[w]): m for (b, w), m in e1.items()} == e2:
                return True
    return False
