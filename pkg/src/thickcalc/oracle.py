"""Independent reference computations built straight from the defining equations.

Nothing here touches graphs or the contraction code in :mod:`thickcalc.terms`;
only the series arithmetic is shared.

Coordinate conventions: ``S`` has coefficients over base coordinates ``x``
(``S.base_dim`` of them).  The target function ``G`` is a series whose first
``S.dim`` coordinates are ``y``; any further coordinates are parameters and
are identified with the leading base coordinates ``x``.  ``G`` may carry
momenta (as for compositions and coordinate changes) and, for the quantum
oracle, ``hbar``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .series import (DimensionMismatch, FormalSeries, GeneratingFunction, Scalar, Truncation,
                     multinomial, series_log)


class ConvergenceError(RuntimeError):
    """The fixed-point iteration did not settle within its bound."""


class GradingError(RuntimeError):
    """A negative power of hbar survived in the output."""


@dataclass
class FixedPointSolution:
    q_bar: list
    y_bar: list
    R: FormalSeries
    S_at_q: FormalSeries
    G_at_y: FormalSeries
    pairing: FormalSeries
    iterations: int


def _check_target(S: GeneratingFunction, G: FormalSeries):
    if G.ncoord < S.dim:
        raise DimensionMismatch(f"target function has {G.ncoord} coordinates, "
                                f"generating function has dimension {S.dim}")
    if G.ncoord - S.dim > S.base_dim:
        raise DimensionMismatch("target function has more parameters than base coordinates")


def _coeff(S: GeneratingFunction, idx: tuple, trunc: Truncation) -> FormalSeries:
    return S.get(idx, 0).retruncate(trunc)


def _s_of_q(S: GeneratingFunction, q: Sequence[FormalSeries], trunc: Truncation) -> FormalSeries:
    """``S(q) = sum over ordered index tuples of S^{a_1..a_m} q_{a_1}...q_{a_m}``."""
    products: dict[tuple, FormalSeries] = {(): FormalSeries.constant(1, trunc, S.base_dim)}

    def prod(key: tuple) -> FormalSeries:
        key = tuple(sorted(key))
        if key not in products:
            products[key] = prod(key[:-1]) * q[key[-1]]
        return products[key]

    out = FormalSeries.zero(trunc, S.base_dim)
    for idx, c in S.iter_full(0):
        out = out + c.retruncate(trunc) * prod(idx)
    return out


def _ds_dq(S: GeneratingFunction, q: Sequence[FormalSeries], trunc: Truncation) -> list:
    """``dS/dq_alpha`` at ``q`` by the product rule over ordered tuples."""
    products: dict[tuple, FormalSeries] = {(): FormalSeries.constant(1, trunc, S.base_dim)}

    def prod(key: tuple) -> FormalSeries:
        key = tuple(sorted(key))
        if key not in products:
            products[key] = prod(key[:-1]) * q[key[-1]]
        return products[key]

    out = [FormalSeries.zero(trunc, S.base_dim) for _ in range(S.dim)]
    for idx, c in S.iter_full(0):
        c = c.retruncate(trunc)
        for k, a in enumerate(idx):
            out[a] = out[a] + c * prod(idx[:k] + idx[k + 1:])
    return out


def _at(G: FormalSeries, y: Sequence[FormalSeries], nx: int) -> FormalSeries:
    return G.substitute(list(y), param_offset=0, ncoord=nx)


def solve_fixed_point(S: GeneratingFunction, G: FormalSeries, eps_order: int,
                      mom_order: int | None = None) -> FixedPointSolution:
    """Solve ``q = eps dG/dy(y)``, ``y = dS/dq(q)`` by iteration from ``q = 0``.

    Only the ``hbar**0`` parts of ``S`` and ``G`` are used.
    """
    _check_target(S, G)
    d, nx = S.dim, S.base_dim
    trunc = Truncation(eps_order, 0, mom_order)
    G0 = G.hbar_slice(0).retruncate(Truncation(None, None, mom_order))
    dG = [FormalSeries(dict(G0.diff(a).mul_eps(1).terms), trunc, G0.ncoord) for a in range(d)]
    q = [FormalSeries.zero(trunc, nx) for _ in range(d)]
    for it in range(1, eps_order + 3):
        y = _ds_dq(S, q, trunc)
        q_new = [_at(dG[a], y, nx) for a in range(d)]
        if q_new == q:
            break
        q = q_new
    else:
        raise ConvergenceError(f"no fixed point after {eps_order + 2} passes; "
                               "the target function must carry the grading eps")
    S_q = _s_of_q(S, q, trunc)
    G_y = _at(FormalSeries(dict(G0.terms), trunc, G0.ncoord), y, nx).mul_eps(1)
    pairing = FormalSeries.zero(trunc, nx)
    for a in range(d):
        pairing = pairing + y[a] * q[a]
    R = S_q + G_y - pairing
    return FixedPointSolution(q, y, R, S_q, G_y, pairing, it)


def fixed_point_residuals(S: GeneratingFunction, G: FormalSeries, sol: FixedPointSolution,
                          eps_order: int, mom_order: int | None = None) -> list[FormalSeries]:
    """Residuals of both defining equations at the computed solution."""
    trunc = Truncation(eps_order, 0, mom_order)
    G0 = FormalSeries(dict(G.hbar_slice(0).terms), trunc, G.ncoord)
    nx = S.base_dim
    res = []
    for a in range(S.dim):
        res.append(sol.q_bar[a] - _at(G0.diff(a).mul_eps(1), sol.y_bar, nx))
    dS = _ds_dq(S, sol.q_bar, trunc)
    res += [sol.y_bar[a] - dS[a] for a in range(S.dim)]
    return res


def general_R(S: GeneratingFunction, G: FormalSeries, eps_order: int,
              mom_order: int | None = None) -> FormalSeries:
    """``R(S, eps G) = S(q) + eps G(y) - y q`` at the fixed point."""
    return solve_fixed_point(S, G, eps_order, mom_order).R


# quantum

def _h_series(S: GeneratingFunction, idx: tuple, trunc: Truncation) -> FormalSeries:
    """``sum_j hbar^j S_j^idx`` rewritten in ``h = hbar/i`` (``hbar = i h``)."""
    out = FormalSeries.zero(trunc, S.base_dim)
    for h in S.hbar_powers():
        c = S.get(idx, h)
        if c:
            out = out + c.retruncate(trunc).mul_hbar(h).scale(Scalar(0, 1) ** h)
    return out


def _hbar_to_h(s: FormalSeries) -> FormalSeries:
    return s.map_coefficients(lambda k, v: v * Scalar(0, 1) ** k[1])


def _z_degree(key, d: int) -> int:
    return sum(key[3][:d])


def quantum_oracle(S: GeneratingFunction, G: FormalSeries, eps_order: int, hbar_order: int,
                   mom_order: int | None = None) -> FormalSeries:
    """``(hbar/i) log`` of ``e^{(i/hbar) S0} (e^{(i/hbar) S+((hbar/i) d)} e^{(i/hbar) eps G})|_{y=phi}``.

    Internally ``h = hbar/i`` and ``delta = eps/h`` so that all gradings are
    nonnegative.  The state is ``P(z) e^{delta G(phi + z)}``; a derivative
    acts as ``D_a P = d_a P + delta P d_a G``.  Every operator term
    ``h^{m-1} S^{a_1..a_m} D_{a_1}...D_{a_m}`` raises the ``h`` grade by at least
    half the number of derivatives, which bounds the ``z`` degree worth keeping.
    """
    _check_target(S, G)
    d, nx = S.dim, S.base_dim
    n = d + nx
    hmax = hbar_order + eps_order - 1
    out_trunc = Truncation(eps_order, hbar_order, mom_order)
    G_mom = G.retruncate(Truncation(None, None, mom_order))

    # classical part: S0 + eps G(phi), in powers of hbar
    phi_hbar = [S.coefficient((a,), Truncation(None, hbar_order, mom_order)) for a in range(d)]
    s0 = S.coefficient((), out_trunc).retruncate(out_trunc)
    g_phi = G_mom.retruncate(Truncation(None, hbar_order, mom_order)).substitute(
        phi_hbar, ncoord=nx)
    W = s0 + FormalSeries(dict(g_phi.mul_eps(1).terms), out_trunc, nx)
    if hmax < 0:
        return W

    trunc = Truncation(eps_order, hmax, mom_order)
    phi = [_h_series(S, (a,), trunc).with_ncoord(n, offset=d) for a in range(d)]
    shift = [FormalSeries.coordinate(a, n, trunc) + phi[a] for a in range(d)]
    G_h = FormalSeries(dict(_hbar_to_h(G_mom).terms), trunc, G.ncoord)
    G_shift = G_h.substitute(shift, param_offset=d, ncoord=n)
    dG = [G_shift.diff(a).mul_eps(1) for a in range(d)]  # delta * dG

    ops = []
    for m in range(2, S.max_order + 1):
        tuples = (itertools.combinations_with_replacement(range(d), m) if S.symmetric
                  else itertools.product(range(d), repeat=m))
        for idx in tuples:
            c = _h_series(S, idx, trunc)
            if not c:
                continue
            mult = multinomial(idx) if S.symmetric else 1
            ops.append((idx, c.with_ncoord(n, offset=d).mul_hbar(m - 1).scale(mult)))

    def prune(P: FormalSeries) -> FormalSeries:
        return P.select(lambda k: _z_degree(k, d) <= 2 * (hmax - k[1]))

    def D(a: int, P: FormalSeries) -> FormalSeries:
        return prune(P.diff(a) + P * dG[a])

    def apply(P: FormalSeries) -> FormalSeries:
        cache: dict[tuple, FormalSeries] = {(): P}

        def derived(idx: tuple) -> FormalSeries:
            if idx not in cache:
                cache[idx] = D(idx[0], derived(idx[1:]))
            return cache[idx]

        total = FormalSeries.zero(trunc, n)
        for idx, c in ops:
            # every operator term adds at least m - 1 powers of h
            if len(idx) - 1 > hmax:
                continue
            total = total + prune(c * derived(tuple(sorted(idx))))
        return total

    term = FormalSeries.constant(1, trunc, n)
    P = term
    k = 1
    while True:
        term = apply(term).scale(Fraction(1, k))
        if term.is_zero():
            break
        P = P + term
        k += 1
        if k > hmax + 2:
            raise ConvergenceError("operator exponential did not terminate")

    P0 = FormalSeries({(e, h, m, c[d:]): v for (e, h, m, c), v in P.terms.items()
                       if not any(c[:d])}, trunc, nx)
    L = series_log(P0)
    terms = {}
    for (e, q, m, c), v in L.terms.items():
        k = q - e + 1
        if k < 0:
            raise GradingError(f"term delta^{e} h^{q} leaves a negative power of hbar")
        if k > hbar_order:
            continue
        terms[(e, k, m, c)] = v * Scalar(0, -1) ** k
    return W + FormalSeries(terms, out_trunc, nx)


# Faa di Bruno

def set_partitions(items: Sequence) -> list[list[list]]:
    items = list(items)
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for p in set_partitions(rest):
        out.append([[first]] + p)
        for i in range(len(p)):
            out.append(p[:i] + [[first] + p[i]] + p[i + 1:])
    return out


def faa_di_bruno_check(indices: Sequence[int], G: FormalSeries) -> bool:
    """Compare iterated differentiation of ``e^{delta G}`` with the partition sum.

    Both sides are the polynomial prefactor of ``e^{delta G}`` after applying
    ``d_{i_1} ... d_{i_k}``.
    """
    indices = list(indices)
    if len(indices) > 6:
        raise ValueError("at most six indices")
    trunc = Truncation(len(indices), None, None)
    n = G.ncoord
    g = FormalSeries(dict(G.terms), trunc, n)
    P = FormalSeries.constant(1, trunc, n)
    for a in reversed(indices):
        P = P.diff(a) + P * g.diff(a).mul_eps(1)
    Q = FormalSeries.zero(trunc, n)
    for part in set_partitions(range(len(indices))):
        prod = FormalSeries.constant(1, trunc, n)
        for block in part:
            prod = prod * g.diff_many([indices[i] for i in block]).mul_eps(1)
        Q = Q + prod
    return P == Q
