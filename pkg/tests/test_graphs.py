import itertools
import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import brute_automorphisms, brute_isomorphic, connected_graphs, graphs

from thickcalc.graphs import (BLACK, SINGLE_BLACK, SINGLE_WHITE, WHITE, BipartiteGraph,
                              GraphError, OrderedGraph, WhiteWeightedGraph,
                              all_bipartite_tree_classes, automorphism_count, bracket,
                              butcher_product, canonical_form, canonical_graph, describe,
                              enumerate_graphs, enumerate_trees, enumerate_up_to,
                              graph_from_json, is_isomorphic, labeled_bipartite_trees,
                              loop_count, symmetry_factor, weightings)

PATH = BipartiteGraph(1, 2, [(0, 0, 1), (0, 1, 1)])
DOUBLE = BipartiteGraph(1, 1, [(0, 0, 2)])
STAR3 = BipartiteGraph(1, 3, [(0, 0, 1), (0, 1, 1), (0, 2, 1)])


def brute_classes(n_white, n_loops, max_deg):
    """Connected white-leaved classes by exhaustive labelled search."""
    reps = {}
    if n_white == 0:
        return [SINGLE_BLACK] if n_loops == 0 else []
    if n_white == 1 and n_loops == 0:
        reps[None] = [SINGLE_WHITE]
    for nb in range(1, n_white + n_loops + 1):
        n_edges = nb + n_white + n_loops - 1
        cells = [(b, w) for b in range(nb) for w in range(n_white)]
        for cut in itertools.combinations(range(n_edges + len(cells) - 1), len(cells) - 1):
            bounds = (-1,) + cut + (n_edges + len(cells) - 1,)
            mults = [bounds[i + 1] - bounds[i] - 1 for i in range(len(cells))]
            rows = [mults[b * n_white:(b + 1) * n_white] for b in range(nb)]
            if any(not 2 <= sum(r) <= max_deg for r in rows):
                continue
            g = BipartiteGraph(nb, n_white, [(b, w, m) for (b, w), m in zip(cells, mults) if m])
            if not g.is_connected() or not g.is_white_leaved():
                continue
            # cheap invariant to bucket candidates before the brute-force test
            inv = (nb, tuple(sorted(tuple(sorted(r)) for r in rows)),
                   tuple(sorted(tuple(sorted(r[w] for r in rows)) for w in range(n_white))))
            bucket = reps.setdefault(inv, [])
            if not any(brute_isomorphic(g, r) for r in bucket):
                bucket.append(g)
    return [g for bucket in reps.values() for g in bucket]


class TestEnumeration:
    def test_up_to_two_whites(self):
        classes = enumerate_up_to(2, 0, 4)
        assert [describe(g) for g in classes] == ["•", "○", "○–•–○"]

    def test_no_whites(self):
        assert enumerate_trees(0, 4) == [SINGLE_BLACK]

    def test_one_white(self):
        assert enumerate_trees(1, 4) == [SINGLE_WHITE]
        assert [describe(g) for g in enumerate_graphs(1, 1, 4)] == ["•=○"]

    def test_three_white_trees(self):
        found = {canonical_form(g) for g in enumerate_trees(3, 4)}
        path5 = BipartiteGraph(2, 3, [(0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 2, 1)])
        assert found == {canonical_form(STAR3), canonical_form(path5)}

    def test_cumulative_count_three_whites_one_loop(self):
        # 18 classes: exhaustive labelled search confirms the count
        classes = enumerate_up_to(3, 1, 4)
        brute = sum(len(brute_classes(w, b, 4)) for w in range(4) for b in range(2))
        assert len(classes) == brute == 18

    @pytest.mark.parametrize("w,b", [(2, 1), (3, 0), (2, 2), (3, 1)])
    def test_matches_brute_force(self, w, b):
        assert len(enumerate_graphs(w, b, 4)) == len(brute_classes(w, b, 4))

    def test_degree_bound_respected(self):
        for g in enumerate_up_to(3, 1, 2):
            assert max(g.black_degrees(), default=0) <= 2

    def test_invariants(self):
        for g in enumerate_up_to(3, 2, 5):
            assert g.is_connected() and g.is_white_leaved()
            assert loop_count(g) >= 0
            assert canonical_graph(g) == g

    def test_deterministic_order(self):
        assert enumerate_up_to(3, 1, 4) == enumerate_up_to(3, 1, 4)


class TestCanonicalForm:
    def test_relabelled_path(self):
        other = BipartiteGraph(1, 2, [(0, 1, 1), (0, 0, 1)])
        assert canonical_form(PATH) == canonical_form(other)

    def test_path_vs_double_edge(self):
        assert canonical_form(PATH) != canonical_form(DOUBLE)

    def test_weighted_whites_distinguished(self):
        a = WhiteWeightedGraph(PATH, (1, 0))
        b = WhiteWeightedGraph(PATH, (0, 1))
        c = WhiteWeightedGraph(PATH, (1, 1))
        assert canonical_form(a) == canonical_form(b)
        assert canonical_form(a) != canonical_form(c)
        assert len(weightings(PATH, 1, 2)) == 3

    def test_ordered_slots_matter(self):
        g1 = OrderedGraph.from_slots(2, 2, [(0, 1), (0, 1)])
        g2 = OrderedGraph.from_slots(2, 2, [(0, 1), (1, 0)])
        g3 = OrderedGraph.from_slots(2, 2, [(1, 0), (1, 0)])
        assert canonical_form(g1) != canonical_form(g2)
        assert canonical_form(g1) == canonical_form(g3)

    @given(connected_graphs(), st.randoms(use_true_random=False))
    @settings(max_examples=200, deadline=None)
    def test_invariant_under_relabelling(self, g, rnd):
        bp = list(range(g.n_black))
        wp = list(range(g.n_white))
        rnd.shuffle(bp)
        rnd.shuffle(wp)
        assert canonical_form(g.relabel(bp, wp)) == canonical_form(g)

    @given(graphs(), graphs())
    @settings(max_examples=300, deadline=None)
    def test_complete_invariant(self, g1, g2):
        assert (canonical_form(g1) == canonical_form(g2)) == brute_isomorphic(g1, g2)

    def test_random_relabellings_bulk(self):
        rnd = random.Random(11)
        for _ in range(1000):
            nb, nw = rnd.randint(1, 4), rnd.randint(1, 4)
            edges = [(b, w, rnd.randint(1, 2)) for b in range(nb) for w in range(nw)
                     if rnd.random() < 0.5]
            g = BipartiteGraph(nb, nw, edges)
            bp, wp = list(range(nb)), list(range(nw))
            rnd.shuffle(bp)
            rnd.shuffle(wp)
            assert canonical_form(g.relabel(bp, wp)) == canonical_form(g)

    def test_root_matters(self):
        assert canonical_form(PATH.with_root((WHITE, 0))) != canonical_form(PATH.with_root((BLACK, 0)))
        assert canonical_form(PATH.with_root((WHITE, 0))) == canonical_form(PATH.with_root((WHITE, 1)))


class TestAutomorphisms:
    def test_examples(self):
        assert automorphism_count(PATH) == 2
        assert automorphism_count(SINGLE_BLACK) == 1
        assert automorphism_count(STAR3) == 6
        # parallel edges are not distinguished
        assert automorphism_count(DOUBLE) == 1

    @given(graphs())
    @settings(max_examples=200, deadline=None)
    def test_matches_brute_force(self, g):
        assert automorphism_count(g) == brute_automorphisms(g)


def rooted_trees(max_vertices):
    seen = {}
    for t in all_bipartite_tree_classes(max_vertices):
        for side, n in ((BLACK, t.n_black), (WHITE, t.n_white)):
            for i in range(n):
                r = t.with_root((side, i))
                seen.setdefault(canonical_form(r), r)
    return list(seen.values())


class TestSymmetryFactor:
    def test_singletons(self):
        assert symmetry_factor(SINGLE_BLACK.with_root((BLACK, 0))) == 1
        assert symmetry_factor(SINGLE_WHITE.with_root((WHITE, 0))) == 1

    def test_path_rooted_at_end(self):
        assert symmetry_factor(PATH.with_root((WHITE, 0))) == 1
        assert symmetry_factor(PATH.with_root((BLACK, 0))) == 2

    def test_repeated_children(self):
        theta = bracket([SINGLE_BLACK.with_root((BLACK, 0))] * 2, WHITE)  # hooked ○ with two •
        t = bracket([theta, theta], BLACK, hooked=False)
        assert symmetry_factor(t) == 2 * symmetry_factor(theta) ** 2

    def test_rejects_cycles(self):
        with pytest.raises(GraphError):
            symmetry_factor(DOUBLE.with_root((BLACK, 0)))

    def test_matches_rooted_automorphisms(self):
        # every rooted tree with at most 8 vertices
        trees = rooted_trees(8)
        assert len(trees) > 300
        for t in trees:
            assert symmetry_factor(t) == automorphism_count(t) == brute_automorphisms(t)


class TestButcher:
    def test_hooked_singletons(self):
        tau = SINGLE_BLACK.with_root((BLACK, 0), hooked=True)
        theta = SINGLE_WHITE.with_root((WHITE, 0), hooked=True)
        t = butcher_product(tau, theta)
        assert t == BipartiteGraph(1, 1, [(0, 0, 1)], (BLACK, 0))

    def test_counts_add(self):
        tau = bracket([PATH.with_root((WHITE, 0))], BLACK)
        theta = bracket([SINGLE_BLACK.with_root((BLACK, 0))], WHITE)
        t = butcher_product(tau, theta)
        assert t.n_white == tau.n_white + theta.n_white
        assert t.n_edges == tau.n_edges + theta.n_edges + 1
        assert t.root == tau.root and t.is_tree()

    def test_same_colour_roots_rejected(self):
        tau = SINGLE_BLACK.with_root((BLACK, 0), hooked=True)
        with pytest.raises(GraphError):
            butcher_product(tau, tau)


class TestLoopCount:
    def test_examples(self):
        assert loop_count(PATH) == 0
        assert loop_count(DOUBLE) == 1
        tail = BipartiteGraph(2, 2, [(0, 0, 2), (1, 0, 1), (1, 1, 1)])
        assert loop_count(tail) == 1

    def test_disconnected(self):
        with pytest.raises(GraphError):
            loop_count(BipartiteGraph(2, 2, [(0, 0, 1), (1, 1, 1)]))


def check_labelled_count(max_vertices):
    """``n! m! / |sym|`` labelled copies of every tree class."""
    for total in range(1, max_vertices + 1):
        for nb in range(total + 1):
            nw = total - nb
            counts, reps = Counter(), {}
            for t in labeled_bipartite_trees(nb, nw):
                key = canonical_form(t)
                counts[key] += 1
                reps.setdefault(key, t)
            for key, count in counts.items():
                assert count * automorphism_count(reps[key]) == (
                    math.factorial(nb) * math.factorial(nw))


def check_vertex_fraction(max_vertices):
    """``|sym(t)| = k(t, v) sigma(t_v)`` with ``k`` the number of vertices like ``v``."""
    for t in all_bipartite_tree_classes(max_vertices):
        verts = [(BLACK, i) for i in range(t.n_black)] + [(WHITE, j) for j in range(t.n_white)]
        keys = {v: canonical_form(t.with_root(v)) for v in verts}
        for v in verts:
            k = sum(1 for u in verts if keys[u] == keys[v])
            assert automorphism_count(t) == k * symmetry_factor(t.with_root(v))


def check_edge_fraction(max_vertices):
    """``|sym(t)| = l(t, e) sigma(t_black) sigma(t_white)`` for the two halves at ``e``."""
    for t in all_bipartite_tree_classes(max_vertices):
        if not t.edges:
            continue
        halves = {}
        for b, w, _ in t.edges:
            rest = BipartiteGraph(t.n_black, t.n_white, [e for e in t.edges if e[:2] != (b, w)])
            halves[(b, w)] = {BLACK: _component(rest, (BLACK, b)),
                              WHITE: _component(rest, (WHITE, w))}
        keys = {e: (canonical_form(p[BLACK]), canonical_form(p[WHITE]))
                for e, p in halves.items()}
        for e, p in halves.items():
            l = sum(1 for f in keys if keys[f] == keys[e])
            assert automorphism_count(t) == (
                l * symmetry_factor(p[BLACK]) * symmetry_factor(p[WHITE]))


class TestTreeIdentities:
    """Labelled counts and the two sym-fraction identities, exhaustively."""

    def test_labelled_count(self):
        check_labelled_count(7)

    def test_vertex_fraction(self):
        check_vertex_fraction(7)

    def test_edge_fraction(self):
        check_edge_fraction(7)


def _component(g, root):
    """The component of ``root`` in ``g``, relabelled compactly and rooted there."""
    adj = {}
    for b, w, _ in g.edges:
        adj.setdefault((BLACK, b), []).append((WHITE, w))
        adj.setdefault((WHITE, w), []).append((BLACK, b))
    seen, stack = {root}, [root]
    while stack:
        v = stack.pop()
        for u in adj.get(v, []):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    bl = sorted(i for s, i in seen if s == BLACK)
    wh = sorted(i for s, i in seen if s == WHITE)
    bmap = {x: k for k, x in enumerate(bl)}
    wmap = {x: k for k, x in enumerate(wh)}
    edges = [(bmap[b], wmap[w], m) for b, w, m in g.edges if b in bmap and w in wmap]
    r = (root[0], (bmap if root[0] == BLACK else wmap)[root[1]])
    return BipartiteGraph(len(bl), len(wh), edges, r)


class TestSerialisation:
    @pytest.mark.parametrize("g", [
        PATH, DOUBLE.with_root((BLACK, 0), hooked=True), WhiteWeightedGraph(PATH, (2, 0)),
        OrderedGraph.from_slots(2, 2, [(1, 0), (0, 1)])])
    def test_round_trip(self, g):
        assert graph_from_json(g.to_json()) == g

    def test_rejects_malformed(self):
        with pytest.raises(GraphError):
            graph_from_json({"n_black": 1, "n_white": 1, "edges": [[0, 3, 1]]})
        with pytest.raises(GraphError):
            graph_from_json({"n_black": 1})

    def test_is_isomorphic(self):
        assert is_isomorphic(PATH, BipartiteGraph(1, 2, [(0, 1, 1), (0, 0, 1)]))
