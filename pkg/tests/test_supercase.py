import math
import random
from collections import Counter
from fractions import Fraction

import pytest

from thickcalc.calculus import quantum_pullback, super_expansion
from thickcalc.graphs import automorphism_count, base_of, canonical_graph
from thickcalc.instances import pullback_instance, random_generating_function, random_polynomial
from thickcalc.oracle import quantum_oracle
from thickcalc.series import FormalSeries
from thickcalc.supercase import (ParityError, ParityTable, enumerate_ordered_graphs,
                                 white_normal_graphs)
from thickcalc.terms import Feynman, contract, crossing_pairs, quantum_weight


def test_small_enumerations():
    assert [og.slot_order for og in enumerate_ordered_graphs(0, 0, 3)] == [((),)]
    assert [og.base.n_white for og in enumerate_ordered_graphs(1, 0, 3)] == [1]
    one_loop = enumerate_ordered_graphs(1, 1, 3)
    assert len(one_loop) == 1
    assert one_loop[0].base.edges == ((0, 0, 2),)
    assert enumerate_ordered_graphs(0, 1, 3) == []


@pytest.mark.parametrize("w,b", [(2, 0), (2, 1), (3, 0), (3, 1)])
def test_labelled_count_identity(w, b):
    # each class with n blacks appears n! m! / |sym| times as a labelled ordered graph,
    # times the slot orderings, which is what the quantum weight counts
    classes = Counter(canonical_graph(base_of(og)) for og in enumerate_ordered_graphs(w, b, 4))
    for g, count in classes.items():
        assert (Fraction(count, math.factorial(g.n_black) * math.factorial(g.n_white))
                == Fraction(quantum_weight(g), automorphism_count(g)))


@pytest.mark.parametrize("w,b", [(2, 1), (3, 0), (3, 1)])
def test_white_normal_form_multiplicity(w, b):
    assert (sum(m for _, m in white_normal_graphs(w, b, 3))
            == len(enumerate_ordered_graphs(w, b, 3)))


def test_grouped_sum_equals_labelled_sum():
    rng = random.Random(4)
    S = random_generating_function(rng, 2, 3, symmetric=False)
    g = random_polynomial(rng, 2, 4)
    ctx = Feynman(S, g, quantum=True, parities=(1, 0))
    for w, b in [(2, 1), (3, 0)]:
        labelled = sum((contract(og, ctx, crossing_pairs(og))
                        for og in enumerate_ordered_graphs(w, b, 3)), FormalSeries.zero())
        grouped = sum((contract(og, ctx, crossing_pairs(og)).scale(m)
                       for og, m in white_normal_graphs(w, b, 3)), FormalSeries.zero())
        assert labelled == grouped


@pytest.mark.parametrize("seed", range(3))
def test_even_parities_collapse(seed):
    S, g = pullback_instance(seed, max_order=3, max_degree=3, hbar_order=1)
    exp = super_expansion(S, g, (0,) * S.dim, 3, 1)
    assert exp.total() == quantum_pullback(S, g, 3, 1).total()


def test_non_symmetric_coefficients_match_oracle():
    rng = random.Random(8)
    S = random_generating_function(rng, 2, 3, symmetric=False)
    g = random_polynomial(rng, 2, 3)
    assert super_expansion(S, g, (0, 0), 3, 1).total() == quantum_oracle(S, g, 3, 1)


def test_odd_parities_change_loop_terms_only():
    rng = random.Random(9)
    S = random_generating_function(rng, 2, 3, symmetric=False)
    g = random_polynomial(rng, 2, 3)
    even = super_expansion(S, g, (0, 0), 3, 1).total()
    odd = super_expansion(S, g, (1, 1), 3, 1).total()
    assert even != odd
    # the only tree with two whites is drawn without crossings
    assert super_expansion(S, g, (1, 1), 2, 0).total() == super_expansion(S, g, (0, 0), 2, 0).total()


def test_single_black_is_constant_term():
    S, g = pullback_instance(2)
    exp = super_expansion(S, g, (0,) * S.dim, 0, 0)
    assert len(exp.terms) == 1
    assert exp.terms[0].value == S.get(())


def test_parity_table():
    assert ParityTable.of({0: 1, 1: 0}, 2).bits == (1, 0)
    assert ParityTable.of([1, 1, 0], 3).coefficient_parity((0, 1, 2)) == 0
    with pytest.raises(ParityError):
        ParityTable.of({0: 1}, 2)
    with pytest.raises(ParityError):
        ParityTable.of([1], 2)
    with pytest.raises(ParityError):
        ParityTable.of([2, 0], 2)
    S, g = pullback_instance(1)
    with pytest.raises(ParityError):
        super_expansion(S, g, None, 2, 0)
