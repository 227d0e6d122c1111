"""Bipartite multigraphs, their canonical forms and enumeration.

Black vertices carry coefficients of the generating function, white vertices
carry derivatives of the target function.  Vertices are numbered separately
per colour starting from 0.  A vertex reference is a pair ``("b", i)`` or
``("w", j)``.

Isomorphisms are pairs of vertex permutations preserving the multiplicity
map; parallel edges are not distinguished from one another.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

BLACK = "b"
WHITE = "w"


class GraphError(ValueError):
    """Malformed or unsuitable graph."""


def _normalise_edges(edges, n_black: int, n_white: int) -> tuple:
    if isinstance(edges, Mapping):
        items = [(b, w, m) for (b, w), m in edges.items()]
    else:
        items = [tuple(e) if len(e) == 3 else (e[0], e[1], 1) for e in edges]
    acc: Counter = Counter()
    for b, w, m in items:
        b, w, m = int(b), int(w), int(m)
        if not (0 <= b < n_black and 0 <= w < n_white):
            raise GraphError(f"edge ({b}, {w}) does not join a black to a white vertex")
        if m < 1:
            raise GraphError(f"edge ({b}, {w}) has multiplicity {m} < 1")
        acc[(b, w)] += m
    return tuple((b, w, m) for (b, w), m in sorted(acc.items()))


@dataclass(frozen=True)
class BipartiteGraph:
    """A finite bipartite multigraph, optionally rooted and hooked.

    ``edges`` is stored as a sorted tuple of ``(black, white, multiplicity)``.
    A hooked graph carries a half-edge at its root; the half-edge adds no
    vertex.
    """

    n_black: int
    n_white: int
    edges: tuple = ()
    root: tuple | None = None
    hooked: bool = False

    def __post_init__(self):
        if self.n_black < 0 or self.n_white < 0:
            raise GraphError("vertex counts must be nonnegative")
        object.__setattr__(self, "edges", _normalise_edges(self.edges, self.n_black, self.n_white))
        if self.root is not None:
            side, i = self.root
            side = {"black": BLACK, "white": WHITE}.get(side, side)
            if side not in (BLACK, WHITE):
                raise GraphError(f"bad root reference {self.root!r}")
            limit = self.n_black if side == BLACK else self.n_white
            if not 0 <= int(i) < limit:
                raise GraphError(f"root {self.root!r} out of range")
            object.__setattr__(self, "root", (side, int(i)))
        if self.hooked and self.root is None:
            raise GraphError("a hooked graph needs a root")

    # basic structure

    @property
    def n_vertices(self) -> int:
        return self.n_black + self.n_white

    @property
    def n_edges(self) -> int:
        return sum(m for _, _, m in self.edges)

    def multiplicity(self, b: int, w: int) -> int:
        for bb, ww, m in self.edges:
            if bb == b and ww == w:
                return m
        return 0

    def black_degrees(self) -> list[int]:
        deg = [0] * self.n_black
        for b, _, m in self.edges:
            deg[b] += m
        return deg

    def white_degrees(self) -> list[int]:
        deg = [0] * self.n_white
        for _, w, m in self.edges:
            deg[w] += m
        return deg

    def black_edges(self, b: int) -> list[tuple[int, int]]:
        """``(white, multiplicity)`` pairs at black vertex ``b`` in edge order."""
        return [(w, m) for bb, w, m in self.edges if bb == b]

    def white_edges(self, w: int) -> list[tuple[int, int]]:
        return [(b, m) for b, ww, m in self.edges if ww == w]

    def is_connected(self) -> bool:
        n = self.n_vertices
        if n == 0:
            return False
        adj: dict[int, set] = {v: set() for v in range(n)}
        for b, w, _ in self.edges:
            adj[b].add(self.n_black + w)
            adj[self.n_black + w].add(b)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == n

    def components(self) -> list["BipartiteGraph"]:
        """Connected components (unrooted), in order of their lowest vertex."""
        parent = list(range(self.n_vertices))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for b, w, _ in self.edges:
            parent[find(b)] = find(self.n_black + w)
        groups: dict[int, list[int]] = {}
        for v in range(self.n_vertices):
            groups.setdefault(find(v), []).append(v)
        out = []
        for verts in sorted(groups.values()):
            bl = [v for v in verts if v < self.n_black]
            wh = [v - self.n_black for v in verts if v >= self.n_black]
            bmap = {b: i for i, b in enumerate(bl)}
            wmap = {w: j for j, w in enumerate(wh)}
            out.append(BipartiteGraph(len(bl), len(wh),
                                      [(bmap[b], wmap[w], m) for b, w, m in self.edges
                                       if b in bmap]))
        return out

    def is_tree(self) -> bool:
        return (self.is_connected() and self.n_edges == self.n_vertices - 1
                and all(m == 1 for _, _, m in self.edges))

    def is_white_leaved(self) -> bool:
        """Every black vertex has degree at least 2 (the singleton black excepted).

        A hook counts towards the degree of the root.
        """
        if self.n_black == 1 and self.n_white == 0:
            return True
        deg = self.black_degrees()
        if self.hooked and self.root[0] == BLACK:
            deg[self.root[1]] += 1
        return all(d >= 2 for d in deg)

    def loop_count(self) -> int:
        return loop_count(self)

    def relabel(self, bperm: Sequence[int], wperm: Sequence[int]) -> "BipartiteGraph":
        """Vertex ``b`` becomes ``bperm[b]``, white ``w`` becomes ``wperm[w]``."""
        root = None
        if self.root is not None:
            side, i = self.root
            root = (side, bperm[i] if side == BLACK else wperm[i])
        return BipartiteGraph(self.n_black, self.n_white,
                              [(bperm[b], wperm[w], m) for b, w, m in self.edges],
                              root, self.hooked)

    def with_root(self, root: tuple | None, hooked: bool = False) -> "BipartiteGraph":
        return BipartiteGraph(self.n_black, self.n_white, self.edges, root, hooked)

    def unrooted(self) -> "BipartiteGraph":
        return BipartiteGraph(self.n_black, self.n_white, self.edges)

    def to_json(self) -> dict:
        out = {"n_black": self.n_black, "n_white": self.n_white,
               "edges": [list(e) for e in self.edges]}
        if self.root is not None:
            out["root"] = list(self.root)
            out["hooked"] = self.hooked
        return out

    def describe(self) -> str:
        return describe(self)


@dataclass(frozen=True)
class WhiteWeightedGraph:
    """A graph with a nonnegative weight on every white vertex."""

    base: BipartiteGraph
    weights: tuple

    def __post_init__(self):
        w = tuple(int(x) for x in self.weights)
        if len(w) != self.base.n_white or any(x < 0 for x in w):
            raise GraphError("every white vertex needs a nonnegative weight")
        object.__setattr__(self, "weights", w)

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    def relabel(self, bperm, wperm) -> "WhiteWeightedGraph":
        w = [0] * len(self.weights)
        for j, x in enumerate(self.weights):
            w[wperm[j]] = x
        return WhiteWeightedGraph(self.base.relabel(bperm, wperm), tuple(w))

    def to_json(self) -> dict:
        out = self.base.to_json()
        out["weights"] = list(self.weights)
        return out


@dataclass(frozen=True)
class OrderedGraph:
    """A graph with a total order on the edge slots at every black vertex.

    ``slot_order[b]`` lists, slot by slot, the white endpoint of each edge at
    black vertex ``b``.  Parallel edges occupy distinct slots.
    """

    base: BipartiteGraph
    slot_order: tuple

    def __post_init__(self):
        slots = tuple(tuple(int(w) for w in s) for s in self.slot_order)
        if len(slots) != self.base.n_black:
            raise GraphError("one slot sequence per black vertex is required")
        for b, s in enumerate(slots):
            if Counter(s) != Counter({w: m for w, m in self.base.black_edges(b)}):
                raise GraphError(f"slots at black {b} do not match its edges")
        object.__setattr__(self, "slot_order", slots)

    @classmethod
    def from_slots(cls, n_black: int, n_white: int, slots: Sequence[Sequence[int]]) -> "OrderedGraph":
        edges = Counter()
        for b, s in enumerate(slots):
            for w in s:
                edges[(b, w)] += 1
        return cls(BipartiteGraph(n_black, n_white, dict(edges)), tuple(map(tuple, slots)))

    def edge_list(self) -> list[tuple[int, int, int]]:
        """``(black, slot, white)`` in the total edge order (black, then slot)."""
        return [(b, k, w) for b, s in enumerate(self.slot_order) for k, w in enumerate(s)]

    def relabel(self, bperm, wperm) -> "OrderedGraph":
        slots = [None] * len(self.slot_order)
        for b, s in enumerate(self.slot_order):
            slots[bperm[b]] = tuple(wperm[w] for w in s)
        return OrderedGraph.from_slots(self.base.n_black, self.base.n_white, slots)

    def to_json(self) -> dict:
        out = self.base.to_json()
        out["slot_order"] = [list(s) for s in self.slot_order]
        return out


AnyGraph = BipartiteGraph | WhiteWeightedGraph | OrderedGraph


def graph_from_json(obj: Mapping) -> AnyGraph:
    """Parse the graph exchange format."""
    try:
        nb, nw = int(obj["n_black"]), int(obj["n_white"])
        edges = [tuple(e) for e in obj.get("edges", [])]
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph object: {exc}") from exc
    root = tuple(obj["root"]) if obj.get("root") is not None else None
    base = BipartiteGraph(nb, nw, edges, root, bool(obj.get("hooked", False)))
    if obj.get("slot_order") is not None:
        return OrderedGraph(base, tuple(map(tuple, obj["slot_order"])))
    if obj.get("weights") is not None:
        return WhiteWeightedGraph(base, tuple(obj["weights"]))
    return base


def base_of(g: AnyGraph) -> BipartiteGraph:
    return g if isinstance(g, BipartiteGraph) else g.base


def loop_count(g: AnyGraph) -> int:
    """``|E| - |V| + 1`` for a connected graph."""
    g = base_of(g)
    if not g.is_connected():
        raise GraphError("loop count is defined for connected graphs only")
    return g.n_edges - g.n_vertices + 1


# canonical labelling

def _structure(g: AnyGraph):
    """Vertex colours and refinement signature for the search."""
    base = base_of(g)
    n, m = base.n_black, base.n_white
    adj: list[dict[int, int]] = [dict() for _ in range(n + m)]
    for b, w, mult in base.edges:
        adj[b][n + w] = mult
        adj[n + w][b] = mult
    weights = g.weights if isinstance(g, WhiteWeightedGraph) else (0,) * m
    slots = g.slot_order if isinstance(g, OrderedGraph) else None
    root = -1
    if base.root is not None:
        side, i = base.root
        root = i if side == BLACK else n + i
    colours = []
    for v in range(n + m):
        side = 0 if v < n else 1
        mults = tuple(sorted(adj[v].values()))
        colours.append((side, sum(mults), mults, weights[v - n] if side else 0, v == root))
    return n, m, adj, weights, slots, root, colours


def _refine(cells: list[list[int]], adj, n: int, slots) -> list[list[int]]:
    while True:
        cell_of = {}
        for i, c in enumerate(cells):
            for v in c:
                cell_of[v] = i
        out = []
        changed = False
        for c in cells:
            if len(c) == 1:
                out.append(c)
                continue
            groups: dict = {}
            for v in c:
                if slots is None:
                    sig = tuple(sorted((cell_of[u], k) for u, k in adj[v].items()))
                elif v < n:
                    sig = tuple(cell_of[n + w] for w in slots[v])
                else:
                    sig = tuple(sorted((cell_of[b], pos) for b, s in enumerate(slots)
                                       for pos, w in enumerate(s) if n + w == v))
                groups.setdefault(sig, []).append(v)
            if len(groups) > 1:
                changed = True
            for key in sorted(groups):
                out.append(groups[key])
        cells = out
        if not changed:
            return cells


def _encode(order: list[int], n: int, m: int, adj, weights, slots, root, hooked: bool):
    rank = {v: i for i, v in enumerate(order)}
    brank = {v: rank[v] for v in order if v < n}
    wrank = {v: rank[v] - n for v in order if v >= n}
    root_desc = () if root < 0 else ((0, brank[root]) if root < n else (1, wrank[root]))
    wts = tuple(weights[v - n] for v in order[n:])
    if slots is not None:
        body = tuple(tuple(wrank[n + w] for w in slots[v]) for v in order[:n])
    else:
        body = tuple(sorted((brank[b], wrank[u], k) for b in range(n) for u, k in adj[b].items()))
    return (n, m, root_desc, hooked, wts, body)


@lru_cache(maxsize=200_000)
def _canonical_search(g: AnyGraph):
    n, m, adj, weights, slots, root, colours = _structure(g)
    hooked = base_of(g).hooked
    by_colour: dict = {}
    for v, c in enumerate(colours):
        by_colour.setdefault(c, []).append(v)
    cells = [by_colour[c] for c in sorted(by_colour)]
    best = None
    best_order = None
    count = 0
    stack = [cells]
    while stack:
        cells = _refine(stack.pop(), adj, n, slots)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            order = [c[0] for c in cells]
            code = _encode(order, n, m, adj, weights, slots, root, hooked)
            if best is None or code < best:
                best, best_order, count = code, order, 1
            elif code == best:
                count += 1
            continue
        cell = cells[target]
        for v in reversed(cell):
            rest = [u for u in cell if u != v]
            stack.append(cells[:target] + [[v], rest] + cells[target + 1:])
    return best, count, tuple(best_order)


def canonical_form(g: AnyGraph) -> bytes:
    """Byte encoding equal for two graphs exactly when they are isomorphic."""
    code, _, _ = _canonical_search(g)
    return repr(code).encode()


def canonical_key(g: AnyGraph) -> tuple:
    """The canonical encoding as a tuple (useful for sorting)."""
    return _canonical_search(g)[0]


def automorphism_count(g: AnyGraph) -> int:
    """Order of the vertex automorphism group (respecting root, weights, slots)."""
    return _canonical_search(g)[1]


def canonical_graph(g: AnyGraph) -> AnyGraph:
    """The canonically relabelled copy of ``g``."""
    base = base_of(g)
    n = base.n_black
    order = _canonical_search(g)[2]
    bperm = [0] * n
    wperm = [0] * base.n_white
    for i, v in enumerate(order):
        if v < n:
            bperm[v] = i
        else:
            wperm[v - n] = i - n
    return g.relabel(bperm, wperm)


def is_isomorphic(g1: AnyGraph, g2: AnyGraph) -> bool:
    return type(g1) is type(g2) and canonical_key(g1) == canonical_key(g2)


def sort_key(g: AnyGraph) -> tuple:
    """Deterministic ordering: white count, loop count, canonical encoding."""
    base = base_of(g)
    loops = base.n_edges - base.n_vertices + 1
    return (base.n_white, loops, canonical_form(g))


# rooted trees

def _tree_adjacency(t: BipartiteGraph) -> dict:
    if not t.is_tree():
        raise GraphError("input is not a tree (cycle, parallel edge or disconnected)")
    adj: dict = {(BLACK, b): [] for b in range(t.n_black)}
    adj.update({(WHITE, w): [] for w in range(t.n_white)})
    for b, w, _ in t.edges:
        adj[(BLACK, b)].append((WHITE, w))
        adj[(WHITE, w)].append((BLACK, b))
    return adj


def _rooted_data(adj: dict, v, parent) -> tuple[tuple, int]:
    """(canonical rooted shape, symmetry factor) of the subtree at ``v``."""
    kids = [_rooted_data(adj, u, v) for u in adj[v] if u != parent]
    shapes = sorted(k[0] for k in kids)
    sigma = 1
    for _, s in kids:
        sigma *= s
    for mu in Counter(shapes).values():
        sigma *= math.factorial(mu)
    return (v[0], tuple(shapes)), sigma


def symmetry_factor(t: BipartiteGraph) -> int:
    """``sigma(t)`` of a rooted tree from the bracket recursion.

    ``sigma(t) = mu_1! mu_2! ... sigma(t_1) ... sigma(t_m)`` where the
    ``t_i`` are the subtrees hanging from the root and the ``mu_j`` count
    repeated isomorphism classes among them.
    """
    if t.root is None:
        raise GraphError("symmetry factor needs a rooted tree")
    adj = _tree_adjacency(t)
    return _rooted_data(adj, t.root, None)[1]


def subtree_shape(t: BipartiteGraph, v: tuple) -> tuple:
    """Canonical shape of ``t`` re-rooted at ``v``."""
    return _rooted_data(_tree_adjacency(t), v, None)[0]


def bracket(children: Sequence[BipartiteGraph], colour: str, hooked: bool = True) -> BipartiteGraph:
    """``[t_1, ..., t_m]`` of the given root colour.

    Each child is a rooted tree whose root has the opposite colour; the new
    root is joined to every child's root.
    """
    nb = 1 if colour == BLACK else 0
    nw = 1 - nb
    edges = []
    for c in children:
        if c.root is None or c.root[0] == colour:
            raise GraphError("children of a bracket need roots of the opposite colour")
        boff, woff = nb, nw
        edges += [(b + boff, w + woff, m) for b, w, m in c.edges]
        side, i = c.root
        if colour == BLACK:
            edges.append((0, i + woff, 1))
        else:
            edges.append((i + boff, 0, 1))
        nb += c.n_black
        nw += c.n_white
    return BipartiteGraph(nb, nw, edges, (colour, 0), hooked)


def butcher_product(tau: BipartiteGraph, theta: BipartiteGraph) -> BipartiteGraph:
    """Join a black-rooted and a white-rooted hooked tree along their hooks."""
    if tau.root is None or theta.root is None:
        raise GraphError("butcher product needs rooted trees")
    if tau.root[0] != BLACK or theta.root[0] != WHITE:
        raise GraphError("butcher product needs a black-rooted and a white-rooted tree")
    nb, nw = tau.n_black, tau.n_white
    edges = list(tau.edges) + [(b + nb, w + nw, m) for b, w, m in theta.edges]
    edges.append((tau.root[1], theta.root[1] + nw, 1))
    return BipartiteGraph(nb + theta.n_black, nw + theta.n_white, edges, tau.root, False)


SINGLE_BLACK = BipartiteGraph(1, 0)
SINGLE_WHITE = BipartiteGraph(0, 1)


# enumeration

def _rows(n_white: int, lo: int, hi: int) -> list[tuple]:
    out = []
    for s in range(lo, hi + 1):
        for cut in itertools.combinations(range(s + n_white - 1), n_white - 1):
            parts, prev = [], -1
            for c in cut + (s + n_white - 1,):
                parts.append(c - prev - 1)
                prev = c
            out.append(tuple(parts))
    return sorted(out, reverse=True)


@lru_cache(maxsize=None)
def _enumerate(n_white: int, n_loops: int, max_black_degree: int) -> tuple:
    if n_white == 0:
        return (SINGLE_BLACK,) if n_loops == 0 else ()
    if n_white == 1 and n_loops == 0:
        found = {canonical_form(SINGLE_WHITE): SINGLE_WHITE}
    else:
        found = {}
    for n_black in range(1, n_white + n_loops):
        n_edges = n_black + n_white + n_loops - 1
        hi = min(max_black_degree, n_edges - 2 * (n_black - 1))
        if hi < 2 or 2 * n_black > n_edges:
            continue
        rows = _rows(n_white, 2, hi)
        sums = [sum(r) for r in rows]

        def extend(start: int, chosen: list, remaining: int, left: int):
            if left == 0:
                if remaining == 0:
                    yield list(chosen)
                return
            for i in range(start, len(rows)):
                s = sums[i]
                rest = remaining - s
                if rest < 2 * (left - 1) or rest > hi * (left - 1):
                    continue
                chosen.append(rows[i])
                yield from extend(i, chosen, remaining - s, left - 1)
                chosen.pop()

        for chosen in extend(0, [], n_edges, n_black):
            if any(sum(r[j] for r in chosen) == 0 for j in range(n_white)):
                continue
            g = BipartiteGraph(n_black, n_white,
                               [(b, w, k) for b, r in enumerate(chosen) for w, k in enumerate(r) if k])
            if not g.is_connected():
                continue
            key = canonical_form(g)
            if key not in found:
                found[key] = canonical_graph(g)
    return tuple(found[k] for k in sorted(found))


def enumerate_graphs(n_white: int, n_loops: int, max_black_degree: int) -> list[BipartiteGraph]:
    """Connected white-leaved graphs with exactly ``n_white`` whites and ``n_loops`` loops.

    One canonical representative per isomorphism class, sorted by canonical
    encoding.  The singleton black vertex appears only for ``n_white = 0``.
    """
    if n_white < 0 or n_loops < 0:
        raise ValueError("counts must be nonnegative")
    if max_black_degree < 2:
        raise ValueError("max_black_degree must be at least 2")
    return list(_enumerate(n_white, n_loops, max_black_degree))


def enumerate_trees(n_white: int, max_black_degree: int) -> list[BipartiteGraph]:
    """White-leaved trees with exactly ``n_white`` white vertices."""
    return enumerate_graphs(n_white, 0, max_black_degree)


def enumerate_up_to(max_white: int, max_loops: int, max_black_degree: int) -> list[BipartiteGraph]:
    """All classes with at most ``max_white`` whites and ``max_loops`` loops, sorted."""
    out = []
    for w in range(max_white + 1):
        for b in range(max_loops + 1):
            out += enumerate_graphs(w, b, max_black_degree)
    return sorted(out, key=sort_key)


def weightings(g: BipartiteGraph, max_weight: int, max_total: int) -> list[WhiteWeightedGraph]:
    """Non-isomorphic white weightings of ``g`` with bounded weights."""
    found = {}
    for w in itertools.product(range(max_weight + 1), repeat=g.n_white):
        if sum(w) > max_total:
            continue
        wg = WhiteWeightedGraph(g, w)
        key = canonical_form(wg)
        if key not in found:
            found[key] = canonical_graph(wg)
    return [found[k] for k in sorted(found)]


def labeled_bipartite_trees(n_black: int, n_white: int) -> Iterator[BipartiteGraph]:
    """Every vertex-labelled bipartite tree on the given vertex sets."""
    if n_black + n_white == 0:
        return
    if n_black + n_white == 1:
        yield BipartiteGraph(n_black, n_white)
        return
    pairs = [(b, w) for b in range(n_black) for w in range(n_white)]
    for subset in itertools.combinations(pairs, n_black + n_white - 1):
        g = BipartiteGraph(n_black, n_white, [(b, w, 1) for b, w in subset])
        if g.is_connected():
            yield g


def all_bipartite_tree_classes(max_vertices: int) -> list[BipartiteGraph]:
    """Every bipartite tree class (any leaves) with at most ``max_vertices`` vertices."""
    found = {}
    for total in range(1, max_vertices + 1):
        for nb in range(total + 1):
            for t in labeled_bipartite_trees(nb, total - nb):
                key = canonical_form(t)
                if key not in found:
                    found[key] = canonical_graph(t)
    return [found[k] for k in sorted(found, key=lambda k: (len(k), k))]


# rendering

_BOND = {1: "–", 2: "=", 3: "≡"}


def describe(g: AnyGraph) -> str:
    """Short human-readable form: a chain like ``○–•–○`` or an edge list."""
    base = base_of(g)
    if base.n_vertices == 1:
        return "•" if base.n_black else "○"
    simple_deg = Counter()
    for b, w, _ in base.edges:
        simple_deg[(BLACK, b)] += 1
        simple_deg[(WHITE, w)] += 1
    is_chain = (base.is_connected() and len(base.edges) == base.n_vertices - 1
                and max(simple_deg.values()) <= 2 and max(m for _, _, m in base.edges) <= 3)
    if is_chain and not isinstance(g, (WhiteWeightedGraph, OrderedGraph)):
        nbrs: dict = {}
        for b, w, m in base.edges:
            nbrs.setdefault((BLACK, b), []).append(((WHITE, w), m))
            nbrs.setdefault((WHITE, w), []).append(((BLACK, b), m))
        ends = [v for v, d in simple_deg.items() if d == 1]
        renders = []
        for start in ends:
            s, prev, v = "", None, start
            while True:
                s += "•" if v[0] == BLACK else "○"
                nxt = [(u, m) for u, m in nbrs[v] if u != prev]
                if not nxt:
                    break
                u, m = nxt[0]
                s += _BOND[m]
                prev, v = v, u
            renders.append(s)
        return min(renders)
    parts = [f"b{b}-w{w}" + (f"x{m}" if m > 1 else "") for b, w, m in base.edges]
    extra = ""
    if isinstance(g, WhiteWeightedGraph):
        extra = " weights=" + ",".join(map(str, g.weights))
    if isinstance(g, OrderedGraph):
        extra = " slots=" + ";".join(",".join(f"w{w}" for w in s) for s in g.slot_order)
    return f"[{base.n_black}•{base.n_white}○ {' '.join(parts)}{extra}]"
