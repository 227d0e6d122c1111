"""Feynman rules: from a graph and concrete data to its term.

A black vertex of degree ``m`` contributes the coefficient tensor
``S^{a_1...a_m}``, a white vertex contributes the derivative
``d_{a_1}...d_{a_k} g`` evaluated at ``phi`` (the order-one coefficients of
``S``).  Each edge is a dummy index summed over ``1..d``.  The contraction is
carried out pairwise with :func:`numpy.einsum` over object arrays whose
entries are :class:`~thickcalc.series.FormalSeries`.
"""

from __future__ import annotations

import functools
import itertools
import math
import string
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .graphs import (BLACK, WHITE, AnyGraph, BipartiteGraph, GraphError, OrderedGraph,
                     WhiteWeightedGraph, base_of, graph_from_json)
from .series import (NO_TRUNCATION, DimensionMismatch, FormalSeries, GeneratingFunction,
                     Scalar, Truncation, hbar_over_i_scalar)


class OrderError(ValueError):
    """A vertex needs a coefficient beyond the available order."""


class SignAmbiguity(ValueError):
    """The white-vertex order of an ordered graph is not determined."""


# combinatorial prefactors

def quantum_weight(g: AnyGraph) -> int:
    """``prod_v m_v! / prod_i (i!)^{k_i^v}`` over black vertices.

    ``k_i^v`` counts the white neighbours sharing exactly ``i`` edges with
    ``v``.  A hook at a black root counts as one extra single edge.
    """
    base = base_of(g)
    out = Fraction(1)
    deg = base.black_degrees()
    if base.hooked and base.root[0] == BLACK:
        deg[base.root[1]] += 1
    for b in range(base.n_black):
        w = math.factorial(deg[b])
        for _, m in base.black_edges(b):
            w //= math.factorial(m)
        out *= w
    return int(out)


def tree_weight(t: AnyGraph) -> int:
    """``prod_v m_v!`` over black vertices (hooks included)."""
    base = base_of(t)
    deg = base.black_degrees()
    if base.hooked and base.root[0] == BLACK:
        deg[base.root[1]] += 1
    return math.prod(math.factorial(m) for m in deg)


# tensors

def _fill_symmetric(d: int, order: int, fn) -> np.ndarray:
    arr = np.empty((d,) * order, dtype=object)
    if order == 0:
        arr[()] = fn(())
        return arr
    for idx in itertools.combinations_with_replacement(range(d), order):
        v = fn(idx)
        for perm in set(itertools.permutations(idx)):
            arr[perm] = v
    return arr


class Feynman:
    """Evaluation context holding the data behind one family of terms.

    Args:
        S: the generating function (black vertices and ``phi``).
        target: ``"pullback"`` with a polynomial ``g`` on the target,
            ``"composition"`` with a generating function ``G`` whose base
            is the target, or ``"transformation"`` with a vector of
            polynomials ``y'(y)``.
        trunc: truncation of every value.
        quantum: use the full ``hbar`` series of the coefficients (otherwise
            only their ``hbar**0`` part).
        phi: override of the evaluation point (a list of series over the
            base coordinates of ``S``).
        parities: per-coordinate parity bits for signed ordered contractions.
    """

    def __init__(self, S: GeneratingFunction, target, kind: str = "pullback",
                 trunc: Truncation = NO_TRUNCATION, quantum: bool = False,
                 phi: Sequence[FormalSeries] | None = None, parities: Sequence[int] | None = None):
        self.S = S
        self.kind = kind
        self.trunc = trunc
        self.quantum = quantum
        self.d = S.dim
        self.nx = S.base_dim
        if kind == "pullback":
            if target.ncoord != self.d:
                raise DimensionMismatch(f"target function on {target.ncoord} coordinates, "
                                        f"generating function has dimension {self.d}")
            self.out_dim = 0
        elif kind == "composition":
            if target.base_dim != self.d:
                raise DimensionMismatch(f"second generating function lives over {target.base_dim} "
                                        f"coordinates, first has dimension {self.d}")
            self.out_dim = target.dim
        elif kind == "transformation":
            if any(p.ncoord != self.d for p in target):
                raise DimensionMismatch("coordinate change components must be functions on the target")
            self.out_dim = len(target)
        else:
            raise ValueError(f"unknown target kind {kind!r}")
        self.target = target
        if phi is None:
            phi = S.phi(trunc, hbar=quantum)
        self.phi = [p.retruncate(trunc) for p in phi]
        self.parities = tuple(parities) if parities is not None else None
        self._black: dict = {}
        self._white: dict = {}
        self._deriv: dict = {}
        self._moment = None

    def zero(self) -> FormalSeries:
        return FormalSeries.zero(self.trunc, self.nx)

    def black_tensor(self, order: int) -> np.ndarray:
        if order > self.S.max_order:
            raise OrderError(f"black vertex of degree {order} exceeds max order {self.S.max_order}")
        if order not in self._black:
            def coeff(idx):
                return self.S.coefficient(idx, self.trunc, hbar=self.quantum)
            if self.S.symmetric:
                self._black[order] = _fill_symmetric(self.d, order, coeff)
            else:
                arr = np.empty((self.d,) * order, dtype=object)
                for idx in itertools.product(range(self.d), repeat=order):
                    arr[idx] = coeff(idx)
                self._black[order] = arr
        return self._black[order]

    def _source(self, weight_idx: tuple):
        """The polynomial on the target attached to a white vertex."""
        if self.kind == "pullback":
            return self.target
        if self.kind == "transformation":
            return self.target[weight_idx[0]]
        G = self.target
        if len(weight_idx) > G.max_order:
            raise OrderError(f"white weight {len(weight_idx)} exceeds order {G.max_order}")
        return G.coefficient(weight_idx, NO_TRUNCATION, hbar=self.quantum)

    def derivative_at_phi(self, deriv: tuple, weight_idx: tuple = ()) -> FormalSeries:
        key = (tuple(sorted(deriv)), weight_idx)
        if key not in self._deriv:
            f = self._source(weight_idx)
            df = f.diff_many(key[0])
            val = df.substitute(self.phi, ncoord=self.nx) if df.ncoord else df
            if val.ncoord != self.nx:
                val = val.with_ncoord(self.nx)
            self._deriv[key] = val.retruncate(self.trunc) if not self.trunc.is_free() else val
        return self._deriv[key]

    def white_tensor(self, order: int, weight: int = 0) -> np.ndarray:
        """Axes: ``order`` derivative axes, then ``weight`` free target axes."""
        if self.kind == "pullback" and weight:
            raise OrderError("pullback white vertices carry no weight")
        if self.kind == "transformation":
            weight = 1
        key = (order, weight)
        if key not in self._white:
            shape = (self.d,) * order + (self.out_dim,) * weight
            arr = np.empty(shape, dtype=object)
            widx_iter = (itertools.combinations_with_replacement(range(self.out_dim), weight)
                         if self.kind == "composition" and self.target.symmetric
                         else itertools.product(range(self.out_dim), repeat=weight))
            for widx in widx_iter:
                sub = _fill_symmetric(self.d, order,
                                      lambda idx, w=widx: self.derivative_at_phi(idx, w))
                perms = (set(itertools.permutations(widx))
                         if self.kind == "composition" and self.target.symmetric else [widx])
                for p in perms:
                    if order:
                        arr[(Ellipsis,) + tuple(p)] = sub
                    else:
                        arr[tuple(p)] = sub[()]
            self._white[key] = arr
        return self._white[key]

    def momentum_vector(self) -> np.ndarray:
        if self._moment is None:
            arr = np.empty((self.out_dim,), dtype=object)
            for a in range(self.out_dim):
                arr[a] = FormalSeries.momentum(a, self.trunc, self.nx)
            self._moment = arr
        return self._moment

    def sign_matrix(self) -> np.ndarray:
        if self.parities is None:
            raise ValueError("signed contraction needs a parity table")
        arr = np.empty((self.d, self.d), dtype=object)
        for a in range(self.d):
            for b in range(self.d):
                arr[a, b] = -1 if self.parities[a] and self.parities[b] else 1
        return arr


def contract(g: AnyGraph, ctx: Feynman, crossing: Sequence[tuple[int, int]] = ()):
    """Bare Einstein contraction of the vertex tensors of ``g``.

    Returns a series, or an object array with one axis when ``g`` is hooked.
    For ordered graphs the black axes follow the slot order and ``crossing``
    lists pairs of edge positions (in the total edge order) that receive a
    parity sign.
    """
    base = base_of(g)
    label = itertools.count()
    black_axes: list[list[int]] = [[] for _ in range(base.n_black)]
    white_axes: list[list[int]] = [[] for _ in range(base.n_white)]
    out_axes: list[int] = []
    edge_labels: list[int] = []
    if base.hooked:
        h = next(label)
        out_axes.append(h)
        side, i = base.root
        (black_axes if side == BLACK else white_axes)[i].append(h)
    if isinstance(g, OrderedGraph):
        for b, k, w in g.edge_list():
            e = next(label)
            edge_labels.append(e)
            black_axes[b].append(e)
            white_axes[w].append(e)
    else:
        for b, w, m in base.edges:
            for _ in range(m):
                e = next(label)
                edge_labels.append(e)
                black_axes[b].append(e)
                white_axes[w].append(e)
    weights = g.weights if isinstance(g, WhiteWeightedGraph) else None
    operands: list = []
    for b in range(base.n_black):
        operands += [ctx.black_tensor(len(black_axes[b])), black_axes[b]]
    for w in range(base.n_white):
        k = len(white_axes[w])
        if ctx.kind == "composition":
            wt = weights[w] if weights is not None else 0
        elif ctx.kind == "transformation":
            wt = 1
        else:
            wt = 0
        free = [next(label) for _ in range(wt)]
        operands += [ctx.white_tensor(k, wt), white_axes[w] + free]
        for f in free:
            operands += [ctx.momentum_vector(), [f]]
    if crossing:
        sign = ctx.sign_matrix()
        for i, j in crossing:
            operands += [sign, [edge_labels[i], edge_labels[j]]]
    if not any(op for op in operands[1::2]) and not out_axes:
        out = ctx.zero() + 1
        for t in operands[0::2]:
            out = out * t[()]
        return out
    res = np.einsum(*operands, out_axes, optimize="greedy")
    if out_axes:
        return np.array([_as_series(x, ctx) for x in res], dtype=object)
    return _as_series(res[()] if isinstance(res, np.ndarray) else res, ctx)


def _as_series(x, ctx: Feynman) -> FormalSeries:
    if isinstance(x, FormalSeries):
        return x
    return ctx.zero() + x


# term objects

@dataclass
class Term:
    """One summand of an expansion.

    ``value`` is the bare contraction; the summand is
    ``prefactor * sign * (hbar/i)**hbar_over_i_power * eps**whites * value``
    (``sign`` only for ordered graphs with parities, where it is already
    inside ``value``).
    """

    graph: AnyGraph
    prefactor: Fraction
    hbar_over_i_power: int = 0
    free_indices: str = "none"
    value: FormalSeries | None = None
    crossing: tuple = ()
    target: str = "g"

    @property
    def n_white(self) -> int:
        return base_of(self.graph).n_white

    def contribution(self, with_eps: bool = True) -> FormalSeries:
        if self.value is None:
            raise ValueError("symbolic term has no value")
        # the stored value is truncated relative to its own loop order
        out = self.value.retruncate(NO_TRUNCATION).scale(self.prefactor)
        if self.hbar_over_i_power:
            out = out.mul_hbar(self.hbar_over_i_power).scale(hbar_over_i_scalar(self.hbar_over_i_power))
        if with_eps:
            out = out.mul_eps(self.n_white)
        return out

    def to_json(self) -> dict:
        out = {"graph": self.graph.to_json(), "prefactor": str(self.prefactor),
               "hbar_over_i": self.hbar_over_i_power, "free_indices": self.free_indices,
               "target": self.target, "latex": term_latex(self)}
        if self.crossing:
            out["crossing"] = [list(p) for p in self.crossing]
        if self.value is not None:
            out["value"] = self.value.to_json()
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "Term":
        value = FormalSeries.from_json(obj["value"]) if "value" in obj else None
        return cls(graph_from_json(obj["graph"]), Fraction(obj["prefactor"]),
                   int(obj["hbar_over_i"]), obj.get("free_indices", "none"), value,
                   tuple(tuple(p) for p in obj.get("crossing", [])), obj.get("target", "g"))

    def __eq__(self, other):
        if not isinstance(other, Term):
            return NotImplemented
        return (self.graph == other.graph and self.prefactor == other.prefactor
                and self.hbar_over_i_power == other.hbar_over_i_power
                and self.free_indices == other.free_indices and self.value == other.value
                and tuple(self.crossing) == tuple(other.crossing) and self.target == other.target)


def _free_descriptor(g: AnyGraph, kind: str) -> str:
    base = base_of(g)
    if base.hooked:
        return "upper" if base.root[0] == BLACK else "lower"
    if kind == "composition":
        return "momentum-I"
    if kind == "transformation":
        return "momentum-alpha"
    return "none"


def classical_term(t: AnyGraph, S: GeneratingFunction, G, ctx: Feynman | None = None):
    """``prod_v m_v! S^{...} prod_w d...d G(phi)`` for a white-leaved tree.

    Returns a series, or a one-axis object array for hooked trees (upper
    index for a black root, lower index for a white root).
    """
    base = base_of(t)
    if not base.is_tree():
        raise GraphError("classical terms are defined on trees")
    if not S.symmetric:
        raise ValueError("classical terms need a symmetric generating function")
    if ctx is None:
        ctx = Feynman(S, G, "pullback", quantum=False)
    val = contract(t, ctx)
    w = tree_weight(t)
    if isinstance(val, np.ndarray):
        return np.array([v.scale(w) for v in val], dtype=object)
    return val.scale(w)


def quantum_term(g: AnyGraph, S: GeneratingFunction, G, ctx: Feynman | None = None) -> Term:
    """Quantum term with weight, loop exponent and contraction."""
    base = base_of(g)
    if ctx is None:
        ctx = Feynman(S, G, "pullback", quantum=True)
    val = contract(g, ctx)
    b = base.n_edges - base.n_vertices + 1 if base.is_connected() else 0
    return Term(g, Fraction(quantum_weight(g)), b, _free_descriptor(g, "pullback"), val)


def composition_term(t: WhiteWeightedGraph, F: GeneratingFunction, G: GeneratingFunction,
                     ctx: Feynman | None = None, quantum: bool = False) -> Term:
    """White-weighted term; the free multi-index is paired with momenta ``r``."""
    if not isinstance(t, WhiteWeightedGraph):
        raise GraphError("composition terms need white weights")
    if max(t.weights, default=0) > G.max_order:
        raise OrderError("white weight exceeds the order of the second generating function")
    if ctx is None:
        ctx = Feynman(F, G, "composition", quantum=quantum)
    val = contract(t, ctx)
    base = t.base
    b = base.n_edges - base.n_vertices + 1
    return Term(t, Fraction(quantum_weight(t)), b if quantum else 0, "momentum-I", val, target="G")


def transformation_term(t: AnyGraph, S: GeneratingFunction, y_inverse: Sequence[FormalSeries],
                        ctx: Feynman | None = None, quantum: bool = False) -> Term:
    """Each white carries one component of ``y'(y)``, paired with ``q'``."""
    if ctx is None:
        ctx = Feynman(S, list(y_inverse), "transformation", quantum=quantum)
    val = contract(t, ctx)
    base = base_of(t)
    b = base.n_edges - base.n_vertices + 1
    return Term(t, Fraction(quantum_weight(t)), b if quantum else 0, "momentum-alpha", val,
                target="y'")


# super signs

def _white_order(g: OrderedGraph) -> dict[int, int]:
    edges = g.edge_list()
    last: dict[int, int] = {}
    for rank, (_, _, w) in enumerate(edges):
        last[w] = rank
    if edges and len(last) != g.base.n_white:
        raise SignAmbiguity("a white vertex without edges has no position in the edge order")
    order = sorted(last, key=lambda w: last[w])
    return {w: i for i, w in enumerate(order)}


def _segments_cross(p1, p2, q1, q2) -> bool:
    """Proper crossing of two segments (shared endpoints do not count)."""
    if len({p1, p2, q1, q2}) < 4:
        return False

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)

    return (orient(p1, p2, q1) * orient(p1, p2, q2) < 0
            and orient(q1, q2, p1) * orient(q1, q2, p2) < 0)


@functools.lru_cache(maxsize=4096)
def crossing_pairs(g: OrderedGraph) -> tuple[tuple[int, int], ...]:
    """Pairs of edge positions whose drawn segments cross.

    Black vertices sit on the line ``x = 0`` in their order, one waypoint per
    edge on ``x = 1`` in the total edge order, and white vertices on ``x = 2``
    ordered by their highest edge.  Edges run black to waypoint to white.
    """
    edges = g.edge_list()
    if not edges:
        return ()
    wpos = _white_order(g)
    n_b, n_w, n_e = max(g.base.n_black, 1), max(len(wpos), 1), len(edges)
    # each column spans the same height; scaling by n_b * n_w keeps everything integral
    black_pt = {b: (0, -b * n_e * n_w) for b in range(g.base.n_black)}
    way_pt = [(1, -i * n_b * n_w) for i in range(n_e)]
    white_pt = {w: (2, -i * n_e * n_b) for w, i in wpos.items()}
    segs = []
    for i, (b, _, w) in enumerate(edges):
        segs.append(((black_pt[b], way_pt[i]), (way_pt[i], white_pt[w])))
    out = []
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            crossed = any(_segments_cross(*s, *t) for s in segs[i] for t in segs[j])
            if crossed:
                out.append((i, j))
    return tuple(out)


def _edge_parities(g: OrderedGraph, parities) -> list[int]:
    edges = g.edge_list()
    out = []
    for b, k, _ in edges:
        try:
            if isinstance(parities, Mapping):
                p = parities[(b, k)]
            else:
                p = parities[b][k]
        except (KeyError, IndexError, TypeError) as exc:
            raise ValueError(f"missing parity for slot {k} of black {b}") from exc
        out.append(int(p) & 1)
    return out


def graph_sign(g: OrderedGraph, parities) -> int:
    """``(-1)**gamma~`` from the crossing drawing.

    ``parities`` maps ``(black, slot)`` to a bit, or is a per-black sequence
    of per-slot bits.
    """
    p = _edge_parities(g, parities)
    total = sum(p[i] * p[j] for i, j in crossing_pairs(g))
    return -1 if total % 2 else 1


def partition_parity(parities: Sequence[int], partition: Sequence[Sequence[int]]) -> int:
    """Parity of the odd-by-odd inversions of the block ordering.

    ``partition`` is a list of blocks of positions ``0..m-1``.  Blocks are
    ordered by their last element and concatenated; each inversion between
    two odd entries contributes one.
    """
    m = len(parities)
    flat = sorted(x for blk in partition for x in blk)
    if flat != list(range(m)) or any(len(blk) == 0 for blk in partition):
        raise ValueError("not a partition of the index positions")
    blocks = sorted((sorted(blk) for blk in partition), key=lambda blk: blk[-1])
    rank = {}
    for pos, x in enumerate(x for blk in blocks for x in blk):
        rank[x] = pos
    total = 0
    for i in range(m):
        for j in range(i + 1, m):
            if rank[i] > rank[j]:
                total += parities[i] * parities[j]
    return total % 2


def edge_partition(g: OrderedGraph) -> list[list[int]]:
    """Edge positions grouped by white endpoint."""
    groups: dict[int, list[int]] = {}
    for pos, (_, _, w) in enumerate(g.edge_list()):
        groups.setdefault(w, []).append(pos)
    return list(groups.values())


# rendering

def index_names(n: int) -> list[str]:
    letters = string.ascii_lowercase
    out = []
    for i in range(n):
        out.append(letters[i] if i < 26 else f"{letters[i % 26]}_{{{i // 26}}}")
    return out


def _coefficient_latex(c: Fraction) -> str:
    if c == 1:
        return ""
    if c.denominator == 1:
        return str(c.numerator) + " "
    sign = "-" if c < 0 else ""
    return f"{sign}\\frac{{{abs(c.numerator)}}}{{{c.denominator}}} "


def term_latex(term: Term, quantum_suffix: bool = False) -> str:
    """LaTeX for a term, naming indices a, b, c, ... in canonical edge order."""
    g = term.graph
    base = base_of(g)
    names = iter(index_names(64))
    black_idx: list[list[str]] = [[] for _ in range(base.n_black)]
    white_idx: list[list[str]] = [[] for _ in range(base.n_white)]
    edge_names = []
    if base.hooked:
        side, i = base.root
        (black_idx if side == BLACK else white_idx)[i].append("\\alpha")
    if isinstance(g, OrderedGraph):
        for b, _, w in g.edge_list():
            x = next(names)
            edge_names.append(x)
            black_idx[b].append(x)
            white_idx[w].append(x)
    else:
        for b, w, m in base.edges:
            for _ in range(m):
                x = next(names)
                edge_names.append(x)
                black_idx[b].append(x)
                white_idx[w].append(x)
    sub = "_\\hbar" if quantum_suffix else ""
    parts = [_coefficient_latex(term.prefactor).strip()]
    if term.crossing:
        signs = " + ".join(f"\\tilde{{{edge_names[i]}}}\\tilde{{{edge_names[j]}}}"
                           for i, j in term.crossing)
        parts.append(f"(-1)^{{{signs}}}")
    if term.hbar_over_i_power == 1:
        parts.append("\\frac{\\hbar}{i}")
    elif term.hbar_over_i_power > 1:
        parts.append(f"\\left(\\frac{{\\hbar}}{{i}}\\right)^{{{term.hbar_over_i_power}}}")
    for idx in black_idx:
        parts.append(f"S^{{{''.join(idx)}}}{sub}" if idx else f"S^0{sub}")
    momenta = []
    weights = g.weights if isinstance(g, WhiteWeightedGraph) else None
    for w, idx in enumerate(white_idx):
        ders = "".join(f"\\partial_{{{x}}}" if len(x) > 1 else f"\\partial_{x}" for x in idx)
        if term.target == "G":
            wt = weights[w] if weights else 0
            up = [next(names) for _ in range(wt)]
            momenta += up
            sup = f"^{{{''.join(up)}}}" if up else ""
            parts.append(f"{ders}G{sup}(\\varphi)")
        elif term.target == "y'":
            up = next(names)
            momenta.append(up)
            parts.append(f"{ders}y'^{{{up}}}(\\varphi)")
        else:
            parts.append(f"{ders}g(\\varphi)")
    if momenta:
        letter = "r" if term.target == "G" else "q'"
        parts.append("".join(f"{letter}_{{{x}}}" for x in momenta))
    return " ".join(p for p in parts if p)
