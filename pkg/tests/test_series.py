from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import scalars, series

from thickcalc.series import (I, NO_TRUNCATION, DimensionMismatch, FormalSeries,
                              GeneratingFunction, PolynomialFunction, Scalar, Truncation,
                              TruncationMismatch, hbar_over_i_scalar, multinomial, poly_diff,
                              poly_eval, poly_substitute, series_exp, series_log)

T = Truncation(3, 2, 3)


class TestScalar:
    def test_i_squared(self):
        assert I * I == -1
        assert hbar_over_i_scalar(1) == Scalar(0, -1)
        assert hbar_over_i_scalar(2) == -1

    def test_division_and_conjugate(self):
        z = Scalar(Fraction(1, 2), 3)
        assert z / z == 1
        assert z * z.conjugate() == Fraction(1, 4) + 9

    def test_rejects_floats(self):
        with pytest.raises(TypeError):
            Scalar.of(1j)

    def test_json_round_trip(self):
        z = Scalar(Fraction(-7, 3), Fraction(2, 9))
        assert Scalar.from_json(z.to_json()) == z

    @given(scalars, scalars, scalars)
    def test_field_axioms(self, a, b, c):
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        if b:
            assert (a / b) * b == a


class TestSeries:
    def test_truncation_applied_on_product(self):
        eps = FormalSeries.monomial(1, eps=1, trunc=Truncation(2, None, None))
        assert (eps * eps * eps).is_zero()
        assert (eps * eps).coefficient(eps=2) == 1

    def test_truncation_mismatch(self):
        a = FormalSeries.constant(1, Truncation(2, None, None))
        b = FormalSeries.constant(1, Truncation(3, None, None))
        with pytest.raises(TruncationMismatch):
            a + b
        # an untruncated operand adopts the other truncation
        assert (a + FormalSeries.constant(2)).trunc == a.trunc

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            FormalSeries.coordinate(0, 1) + FormalSeries.coordinate(0, 2)

    def test_momenta_stored_sorted(self):
        p1 = FormalSeries.momentum(1)
        p0 = FormalSeries.momentum(0)
        assert (p1 * p0).coefficient(mom=(0, 1)) == 1
        assert p1 * p0 == p0 * p1

    def test_constant_term_and_evaluation(self):
        f = PolynomialFunction(2, {(1, 1): 1, (0, 0): 5})
        assert f.constant_term() == 5
        assert poly_eval(PolynomialFunction(2, {(1, 1): 1}), (2, 3)) == 6
        assert f(2, 3) == 11

    def test_poly_diff(self):
        f = PolynomialFunction(2, {(3, 1): 2})
        assert poly_diff(f, [0, 0, 1]) == PolynomialFunction(2, {(1, 0): 12})
        assert poly_diff(f, [1, 1]).is_zero()

    def test_taylor_substitution(self):
        # f(phi + eps v) expanded to eps^2 matches Taylor's formula
        f = PolynomialFunction(2, {(2, 0): 3, (1, 1): -1, (0, 1): 2, (0, 0): 1})
        phi, v = (Fraction(1, 2), 2), (1, -3)
        tr = Truncation(2, None, None)
        arg = [FormalSeries.constant(p, tr) + FormalSeries.monomial(x, eps=1, trunc=tr)
               for p, x in zip(phi, v)]
        got = poly_substitute(f, arg)
        grad = [poly_eval(poly_diff(f, [i]), phi) for i in range(2)]
        hess = [[poly_eval(poly_diff(f, [i, j]), phi) for j in range(2)] for i in range(2)]
        assert got.coefficient() == f(*phi)
        assert got.coefficient(eps=1) == sum(g * x for g, x in zip(grad, v))
        assert got.coefficient(eps=2) == sum(hess[i][j] * v[i] * v[j]
                                             for i in range(2) for j in range(2)) / 2

    def test_exp_log_inverse(self):
        tr = Truncation(4, None, None)
        a = FormalSeries({(1, 0, (), ()): Scalar(2), (2, 0, (), ()): Scalar(0, 1)}, tr)
        assert series_log(series_exp(a)) == a

    def test_exp_requires_nilpotent_argument(self):
        with pytest.raises(ValueError):
            series_exp(FormalSeries.constant(1))

    def test_log_requires_unit_constant(self):
        with pytest.raises(ValueError):
            series_log(FormalSeries.constant(2, T))

    @given(series(), series(), series())
    @settings(max_examples=60, deadline=None)
    def test_ring_axioms(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert (a - a).is_zero()

    @given(series())
    @settings(max_examples=40, deadline=None)
    def test_stored_terms_respect_truncation(self, a):
        for (e, h, m, _), v in a.items():
            assert T.admits(e, h, len(m)) and v
            assert list(m) == sorted(m)

    @given(series())
    @settings(max_examples=40, deadline=None)
    def test_json_round_trip(self, a):
        assert FormalSeries.from_json(a.to_json()) == a


class TestGeneratingFunction:
    def test_symmetric_lookup_is_permutation_invariant(self):
        S = GeneratingFunction(3, 3, {(0, (2, 0, 1)): 4})
        for idx in [(0, 1, 2), (2, 1, 0), (1, 0, 2)]:
            assert S.get(idx) == 4

    def test_as_series_uses_multinomial_counts(self):
        S = GeneratingFunction(2, 2, {(0, (0, 1)): 3, (0, (0, 0)): 1})
        s = S.as_series()
        assert s.coefficient(mom=(0, 1)) == 6
        assert s.coefficient(mom=(0, 0)) == 1
        assert GeneratingFunction.from_series(s, 2) == S
        assert multinomial((0, 0, 1)) == 3

    def test_json_round_trip_and_one_based_indices(self):
        S = GeneratingFunction(2, 2, {(0, (1,)): Fraction(1, 2), (1, (0, 1)): Scalar(0, 2)},
                               parities=(0, 1))
        obj = S.to_json()
        assert {tuple(r["idx"]) for r in obj["coeffs"]} == {(2,), (1, 2)}
        back = GeneratingFunction.from_json(obj)
        assert back == S and back.parities == (0, 1)

    def test_json_round_trip_with_base_coordinates(self):
        x = PolynomialFunction(2, {(1, 0): 3, (0, 2): Fraction(1, 5)})
        graded = FormalSeries.coordinate(1, 2).mul_eps(1)
        S = GeneratingFunction(1, 2, {(0, (0,)): x, (0, (0, 0)): graded}, base_dim=2)
        obj = S.to_json()
        assert "monomials" in obj["coeffs"][0]["poly"]
        assert GeneratingFunction.from_json(obj) == S

    def test_rejects_out_of_range_index(self):
        with pytest.raises(DimensionMismatch):
            GeneratingFunction(2, 2, {(0, (2,)): 1})

    def test_rejects_negative_hbar(self):
        with pytest.raises(ValueError):
            GeneratingFunction(1, 1, {(-1, (0,)): 1})

    def test_polynomial_json(self):
        f = PolynomialFunction(2, {(1, 2): Fraction(-3, 4)})
        assert PolynomialFunction.from_json(f.to_json()) == f
