"""Exact truncated power series over the Gaussian rationals.

Everything numeric in the package is built on three objects defined here:

* :class:`Scalar`, a Gaussian rational ``re + im*i``;
* :class:`FormalSeries`, a sparse series in a bookkeeping variable ``eps``
  (order in the target function), ``hbar``, commuting momenta and
  polynomial coordinates;
* :class:`GeneratingFunction`, the coefficient tensors of ``S(x, q)``.

Coordinates are never truncated: a series is a polynomial in them.  The
``eps``, ``hbar`` and momentum gradings are truncated after every operation.
Coordinate and momentum indices are 0-based in the Python API and 1-based in
the JSON file formats.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence


class TruncationMismatch(ValueError):
    """Two series with incompatible truncations were combined."""


class DimensionMismatch(ValueError):
    """Objects living over different dimensions were combined."""


def _frac(x) -> Fraction:
    if type(x) is Fraction:
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


class Scalar:
    """A Gaussian rational number ``re + im*i`` with exact arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def of(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, complex):
            raise TypeError("floating point values are not accepted")
        return cls(x, 0)

    @staticmethod
    def _raw(re: Fraction, im: Fraction) -> "Scalar":
        s = object.__new__(Scalar)
        s.re = re
        s.im = im
        return s

    def __add__(self, other):
        if isinstance(other, Scalar):
            return Scalar._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return Scalar._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, Scalar):
            return Scalar._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return Scalar._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Scalar):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b:
                if not d:
                    return Scalar._raw(a * c, b)
                return Scalar._raw(a * c, a * d)
            if not d:
                return Scalar._raw(a * c, b * c)
            return Scalar._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return Scalar._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Scalar.of(other)
        n = other.re * other.re + other.im * other.im
        if not n:
            raise ZeroDivisionError("division by zero Scalar")
        return self * Scalar._raw(other.re / n, -other.im / n)

    def __rtruediv__(self, other):
        return Scalar.of(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (Scalar(1) / self) ** (-k)
        out = Scalar(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"Scalar({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "-" if self.im < 0 else "+"
        return f"({self.re} {sign} {abs(self.im)}i)"

    def to_json(self) -> dict:
        return {"re": str(self.re), "im": str(self.im)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Scalar":
        return cls(obj.get("re", "0"), obj.get("im", "0"))


I = Scalar(0, 1)
ZERO = Scalar(0)
ONE = Scalar(1)


def hbar_over_i_scalar(k: int) -> Scalar:
    """The numeric factor ``(1/i)**k`` multiplying ``hbar**k``."""
    return Scalar(0, -1) ** k


@dataclass(frozen=True)
class Truncation:
    """Maximal retained orders; ``None`` means untruncated."""

    eps: int | None = None
    hbar: int | None = None
    mom: int | None = None

    def admits(self, e: int, h: int, nmom: int) -> bool:
        return ((self.eps is None or e <= self.eps)
                and (self.hbar is None or h <= self.hbar)
                and (self.mom is None or nmom <= self.mom))

    def is_free(self) -> bool:
        return self.eps is None and self.hbar is None and self.mom is None

    def meet(self, other: "Truncation") -> "Truncation":
        """Tightest truncation compatible with both."""
        def lo(a, b):
            if a is None:
                return b
            if b is None:
                return a
            return min(a, b)
        return Truncation(lo(self.eps, other.eps), lo(self.hbar, other.hbar),
                          lo(self.mom, other.mom))


NO_TRUNCATION = Truncation()

# Term keys are (eps power, hbar power, sorted momentum indices, coordinate
# exponent vector).
Key = tuple


def _merge_trunc(a: Truncation, b: Truncation) -> Truncation:
    if a == b or b.is_free():
        return a
    if a.is_free():
        return b
    raise TruncationMismatch(f"cannot combine series truncated at {a} and {b}")


class FormalSeries:
    """Sparse truncated series with Gaussian-rational coefficients.

    Args:
        terms: mapping ``(e, h, mom, coords) -> Scalar``.
        trunc: retained orders in ``eps``, ``hbar`` and total momentum degree.
        ncoord: number of polynomial coordinates.
    """

    __slots__ = ("terms", "trunc", "ncoord")

    def __init__(self, terms: Mapping | None = None,
                 trunc: Truncation = NO_TRUNCATION, ncoord: int = 0):
        self.trunc = trunc
        self.ncoord = ncoord
        out = {}
        if terms:
            for key, v in terms.items():
                e, h, mom, coords = key
                mom = tuple(sorted(mom))
                coords = tuple(coords)
                if len(coords) != ncoord:
                    raise DimensionMismatch(
                        f"coordinate exponent {coords} has wrong length for ncoord={ncoord}")
                if not trunc.admits(e, h, len(mom)):
                    continue
                v = Scalar.of(v)
                k = (e, h, mom, coords)
                if k in out:
                    v = out[k] + v
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        self.terms = out

    @classmethod
    def _make(cls, terms: dict, trunc: Truncation, ncoord: int) -> "FormalSeries":
        s = object.__new__(FormalSeries)
        s.terms = terms
        s.trunc = trunc
        s.ncoord = ncoord
        return s

    # constructors

    @classmethod
    def zero(cls, trunc: Truncation = NO_TRUNCATION, ncoord: int = 0) -> "FormalSeries":
        return cls._make({}, trunc, ncoord)

    @classmethod
    def constant(cls, c, trunc: Truncation = NO_TRUNCATION, ncoord: int = 0) -> "FormalSeries":
        c = Scalar.of(c)
        if not c:
            return cls._make({}, trunc, ncoord)
        return cls._make({(0, 0, (), (0,) * ncoord): c}, trunc, ncoord)

    @classmethod
    def monomial(cls, c=1, eps: int = 0, hbar: int = 0, mom: Sequence[int] = (),
                 coords: Sequence[int] | None = None, trunc: Truncation = NO_TRUNCATION,
                 ncoord: int = 0) -> "FormalSeries":
        if coords is None:
            coords = (0,) * ncoord
        return cls({(eps, hbar, tuple(mom), tuple(coords)): c}, trunc, ncoord)

    @classmethod
    def coordinate(cls, i: int, ncoord: int, trunc: Truncation = NO_TRUNCATION) -> "FormalSeries":
        if not 0 <= i < ncoord:
            raise IndexError(f"coordinate {i} out of range for ncoord={ncoord}")
        coords = [0] * ncoord
        coords[i] = 1
        return cls._make({(0, 0, (), tuple(coords)): ONE}, trunc, ncoord)

    @classmethod
    def momentum(cls, a: int, trunc: Truncation = NO_TRUNCATION, ncoord: int = 0) -> "FormalSeries":
        return cls.monomial(1, mom=(a,), trunc=trunc, ncoord=ncoord)

    def like(self, terms: dict | None = None) -> "FormalSeries":
        return FormalSeries._make({} if terms is None else terms, self.trunc, self.ncoord)

    def _coerce(self, other) -> "FormalSeries | None":
        if isinstance(other, FormalSeries):
            if other.ncoord != self.ncoord:
                raise DimensionMismatch(
                    f"series over {self.ncoord} and {other.ncoord} coordinates")
            return other
        if isinstance(other, (int, Fraction, Scalar)):
            return FormalSeries.constant(other, self.trunc, self.ncoord)
        return None

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        trunc = _merge_trunc(self.trunc, other.trunc)
        if trunc != self.trunc:
            return self.retruncate(trunc) + other
        out = dict(self.terms)
        for k, v in other.terms.items():
            if not trunc.admits(k[0], k[1], len(k[2])):
                continue
            if k in out:
                s = out[k] + v
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = v
        return FormalSeries._make(out, trunc, self.ncoord)

    __radd__ = __add__

    def __neg__(self):
        return self.like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FormalSeries":
        c = Scalar.of(c)
        if not c:
            return self.like()
        if c == 1:
            return self
        return self.like({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        trunc = _merge_trunc(self.trunc, other.trunc)
        te, th, tm = trunc.eps, trunc.hbar, trunc.mom
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        nc = self.ncoord
        bitems = list(b.items())
        for (e1, h1, m1, c1), v1 in a.items():
            for (e2, h2, m2, c2), v2 in bitems:
                e = e1 + e2
                if te is not None and e > te:
                    continue
                h = h1 + h2
                if th is not None and h > th:
                    continue
                if m2:
                    if m1:
                        if tm is not None and len(m1) + len(m2) > tm:
                            continue
                        m = tuple(sorted(m1 + m2))
                    else:
                        if tm is not None and len(m2) > tm:
                            continue
                        m = m2
                else:
                    if tm is not None and len(m1) > tm:
                        continue
                    m = m1
                c = tuple([x + y for x, y in zip(c1, c2)]) if nc else ()
                k = (e, h, m, c)
                prev = get(k)
                out[k] = v1 * v2 if prev is None else prev + v1 * v2
        return FormalSeries._make({k: v for k, v in out.items() if v}, trunc, nc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(ONE / Scalar.of(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = FormalSeries.constant(1, self.trunc, self.ncoord)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # comparisons and inspection

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = FormalSeries.constant(other, self.trunc, self.ncoord)
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self.ncoord == other.ncoord and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def items(self) -> Iterator[tuple[Key, Scalar]]:
        return iter(sorted(self.terms.items(), key=lambda kv: kv[0]))

    def coefficient(self, eps: int = 0, hbar: int = 0, mom: Sequence[int] = (),
                    coords: Sequence[int] | None = None) -> Scalar:
        if coords is None:
            coords = (0,) * self.ncoord
        return self.terms.get((eps, hbar, tuple(sorted(mom)), tuple(coords)), ZERO)

    def constant_term(self) -> Scalar:
        return self.coefficient()

    def is_constant(self) -> bool:
        zero = (0, 0, (), (0,) * self.ncoord)
        return all(k == zero for k in self.terms)

    def min_hbar(self) -> int:
        return min((k[1] for k in self.terms), default=0)

    def max_eps(self) -> int:
        return max((k[0] for k in self.terms), default=0)

    # structural maps

    def retruncate(self, trunc: Truncation) -> "FormalSeries":
        return FormalSeries._make(
            {k: v for k, v in self.terms.items() if trunc.admits(k[0], k[1], len(k[2]))},
            trunc, self.ncoord)

    def select(self, pred) -> "FormalSeries":
        return self.like({k: v for k, v in self.terms.items() if pred(k)})

    def eps_slice(self, e: int) -> "FormalSeries":
        """Coefficient of ``eps**e`` (kept at ``eps`` power 0)."""
        return self.like({(0,) + k[1:]: v for k, v in self.terms.items() if k[0] == e})

    def hbar_slice(self, h: int) -> "FormalSeries":
        """Coefficient of ``hbar**h`` (kept at ``hbar`` power 0)."""
        return self.like({(k[0], 0) + k[2:]: v for k, v in self.terms.items() if k[1] == h})

    def drop_eps(self) -> "FormalSeries":
        """Set ``eps = 1``."""
        return FormalSeries({(0,) + k[1:]: v for k, v in self.terms.items()},
                            Truncation(None, self.trunc.hbar, self.trunc.mom), self.ncoord)

    def mul_eps(self, n: int) -> "FormalSeries":
        return self.like({(k[0] + n,) + k[1:]: v for k, v in self.terms.items()
                          if self.trunc.admits(k[0] + n, k[1], len(k[2]))})

    def mul_hbar(self, n: int) -> "FormalSeries":
        return self.like({(k[0], k[1] + n) + k[2:]: v for k, v in self.terms.items()
                          if self.trunc.admits(k[0], k[1] + n, len(k[2]))})

    def with_ncoord(self, ncoord: int, offset: int = 0) -> "FormalSeries":
        """Embed into a coordinate space of size ``ncoord``.

        Coordinate ``j`` becomes coordinate ``offset + j``; the new space must
        be large enough.
        """
        if offset + self.ncoord > ncoord:
            raise DimensionMismatch("target coordinate space too small")
        pre = (0,) * offset
        post = (0,) * (ncoord - offset - self.ncoord)
        return FormalSeries._make({(k[0], k[1], k[2], pre + k[3] + post): v
                                   for k, v in self.terms.items()}, self.trunc, ncoord)

    def map_coefficients(self, fn) -> "FormalSeries":
        return FormalSeries({k: fn(k, v) for k, v in self.terms.items()}, self.trunc, self.ncoord)

    def conjugate(self) -> "FormalSeries":
        return self.like({k: v.conjugate() for k, v in self.terms.items()})

    # calculus

    def diff(self, i: int) -> "FormalSeries":
        """Partial derivative in coordinate ``i``."""
        if not 0 <= i < self.ncoord:
            raise IndexError(f"coordinate index {i} out of range for ncoord={self.ncoord}")
        out = {}
        for (e, h, m, c), v in self.terms.items():
            p = c[i]
            if p:
                c2 = c[:i] + (p - 1,) + c[i + 1:]
                out[(e, h, m, c2)] = v * p
        return self.like(out)

    def diff_many(self, indices: Iterable[int]) -> "FormalSeries":
        out = self
        for i in indices:
            out = out.diff(i)
        return out

    def substitute(self, values: Sequence, param_offset: int = 0,
                   ncoord: int | None = None) -> "FormalSeries":
        """Substitute series for the leading coordinates.

        ``values[j]`` replaces coordinate ``j``.  Coordinates of ``self`` past
        ``len(values)`` are parameters; parameter ``p`` becomes coordinate
        ``param_offset + p`` of the result.  All values must share one
        coordinate space (of size ``ncoord``).
        """
        k = len(values)
        if k > self.ncoord:
            raise DimensionMismatch(
                f"{k} values substituted into a series over {self.ncoord} coordinates")
        vals = []
        for v in values:
            if isinstance(v, FormalSeries):
                vals.append(v)
            else:
                vals.append(FormalSeries.constant(v, NO_TRUNCATION, ncoord or 0))
        if ncoord is None:
            ncoord = vals[0].ncoord if vals else self.ncoord - k
        for j, v in enumerate(vals):
            if v.ncoord != ncoord:
                if not v.is_constant():
                    raise DimensionMismatch("substituted values live in different spaces")
                vals[j] = FormalSeries.constant(v.constant_term(), v.trunc, ncoord)
        nparam = self.ncoord - k
        if param_offset + nparam > ncoord:
            raise DimensionMismatch("parameters do not fit in the target space")
        trunc = self.trunc
        for v in vals:
            trunc = _merge_trunc(trunc, v.trunc)
        powers: list[list[FormalSeries]] = [[FormalSeries.constant(1, trunc, ncoord)] for _ in vals]

        def power(j: int, p: int) -> FormalSeries:
            lst = powers[j]
            while len(lst) <= p:
                lst.append(lst[-1] * vals[j])
            return lst[p]

        groups: dict[tuple, dict] = {}
        pre = (0,) * param_offset
        post = (0,) * (ncoord - param_offset - nparam)
        for (e, h, m, c), v in self.terms.items():
            head = c[:k]
            rest = pre + c[k:] + post
            groups.setdefault(head, {})[(e, h, m, rest)] = v
        out = FormalSeries.zero(trunc, ncoord)
        for head, rest_terms in groups.items():
            factor = FormalSeries._make(dict(rest_terms), trunc, ncoord)
            for j, p in enumerate(head):
                if p:
                    factor = factor * power(j, p)
            out = out + factor
        return out

    def evaluate(self, point: Sequence) -> "FormalSeries":
        """Substitute constants (or series) for every coordinate."""
        if len(point) != self.ncoord:
            raise DimensionMismatch(
                f"point of length {len(point)} for a series over {self.ncoord} coordinates")
        vals = [p if isinstance(p, FormalSeries) else FormalSeries.constant(p, self.trunc, 0)
                for p in point]
        if not vals:
            return self
        return self.substitute(vals)

    # serialisation

    def to_json(self) -> dict:
        return {
            "ncoord": self.ncoord,
            "trunc": [self.trunc.eps, self.trunc.hbar, self.trunc.mom],
            "terms": [
                {"eps": e, "hbar": h, "mom": [a + 1 for a in m], "exp": list(c), **v.to_json()}
                for (e, h, m, c), v in self.items()
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "FormalSeries":
        te, th, tm = obj.get("trunc", [None, None, None])
        ncoord = int(obj.get("ncoord", 0))
        terms = {}
        for t in obj.get("terms", []):
            key = (int(t.get("eps", 0)), int(t.get("hbar", 0)),
                   tuple(a - 1 for a in t.get("mom", [])),
                   tuple(t.get("exp", [0] * ncoord)))
            terms[key] = Scalar.from_json(t)
        return cls(terms, Truncation(te, th, tm), ncoord)

    def __repr__(self):
        return f"FormalSeries({self.to_text()}, trunc={self.trunc}, ncoord={self.ncoord})"

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (e, h, m, c), v in self.items():
            mon = []
            if e:
                mon.append("eps" if e == 1 else f"eps^{e}")
            if h:
                mon.append("hbar" if h == 1 else f"hbar^{h}")
            for a, n in sorted(Counter(m).items()):
                mon.append(f"p{a + 1}" if n == 1 else f"p{a + 1}^{n}")
            for j, n in enumerate(c):
                if n:
                    mon.append(f"y{j + 1}" if n == 1 else f"y{j + 1}^{n}")
            parts.append("*".join([str(v)] + mon) if mon else str(v))
        return " + ".join(parts)


def series_exp(a: FormalSeries) -> FormalSeries:
    """Formal exponential; every term of ``a`` must carry a truncated grading."""
    for (e, h, m, c) in a.terms:
        if not ((e > 0 and a.trunc.eps is not None)
                or (h > 0 and a.trunc.hbar is not None)
                or (m and a.trunc.mom is not None)):
            raise ValueError("exp needs an argument that is nilpotent under the truncation")
    out = FormalSeries.constant(1, a.trunc, a.ncoord)
    term = out
    n = 1
    while True:
        term = (term * a).scale(Fraction(1, n))
        if term.is_zero():
            return out
        out = out + term
        n += 1


def series_log(a: FormalSeries) -> FormalSeries:
    """Formal logarithm of a series with constant term 1."""
    if a.constant_term() != 1:
        raise ValueError("log needs constant term 1")
    x = a - 1
    series_exp(x)  # validates nilpotency
    out = FormalSeries.zero(a.trunc, a.ncoord)
    term = FormalSeries.constant(1, a.trunc, a.ncoord)
    n = 1
    while True:
        term = term * x
        if term.is_zero():
            return out
        out = out + term.scale(Fraction((-1) ** (n + 1), n))
        n += 1


class PolynomialFunction(FormalSeries):
    """Exact polynomial on ``R^d``; a series with ``ncoord = d`` and no gradings."""

    __slots__ = ()

    def __init__(self, dim: int, monomials: Mapping[Sequence[int], object] | None = None):
        terms = {}
        for exp, c in (monomials or {}).items():
            exp = tuple(exp)
            if len(exp) != dim or any(p < 0 for p in exp):
                raise DimensionMismatch(f"bad exponent vector {exp} for dimension {dim}")
            terms[(0, 0, (), exp)] = c
        super().__init__(terms, NO_TRUNCATION, dim)

    @property
    def dim(self) -> int:
        return self.ncoord

    @classmethod
    def of(cls, s: FormalSeries) -> "PolynomialFunction":
        p = object.__new__(cls)
        p.terms = dict(s.terms)
        p.trunc = s.trunc
        p.ncoord = s.ncoord
        return p

    @classmethod
    def linear(cls, dim: int, coeffs: Sequence, constant=0) -> "PolynomialFunction":
        mons = {(0,) * dim: constant}
        for j, c in enumerate(coeffs):
            e = [0] * dim
            e[j] = 1
            mons[tuple(e)] = c
        return cls(dim, mons)

    def monomials(self) -> dict[tuple, Scalar]:
        return {k[3]: v for k, v in self.terms.items()}

    def degree(self) -> int:
        return max((sum(k[3]) for k in self.terms), default=0)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        return poly_eval(self, point)

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "monomials": [{"exp": list(k[3]), **v.to_json()} for k, v in self.items()]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "PolynomialFunction":
        dim = int(obj["dim"])
        mons: dict = {}
        for t in obj.get("monomials", []):
            exp = tuple(int(p) for p in t["exp"])
            mons[exp] = mons.get(exp, ZERO) + Scalar.from_json(t)
        return cls(dim, mons)


def poly_diff(f: FormalSeries, indices: Sequence[int]) -> FormalSeries:
    """Iterated partial derivative ``d/dy^{i1} ... d/dy^{ik} f``."""
    out = f.diff_many(indices)
    return PolynomialFunction.of(out) if isinstance(f, PolynomialFunction) else out


def poly_eval(f: FormalSeries, point: Sequence) -> Scalar | FormalSeries:
    """Evaluate at a point; returns a Scalar when the result is a plain number."""
    out = f.evaluate(point)
    if any(isinstance(p, FormalSeries) for p in point):
        return out
    if out.is_constant() and out.ncoord == 0:
        return out.constant_term()
    return out


def poly_substitute(f: FormalSeries, values: Sequence[FormalSeries]) -> FormalSeries:
    return f.substitute(values)


def multinomial(idx: Sequence[int]) -> int:
    """Number of distinct orderings of the multiset ``idx``."""
    out = math.factorial(len(idx))
    for n in Counter(idx).values():
        out //= math.factorial(n)
    return out


@dataclass
class GeneratingFunction:
    """Coefficients of ``S(x,q) = sum_h hbar^h sum_I S_h^I(x) q_I``.

    ``coeffs`` maps ``(h, idx)`` to a series in the base coordinates ``x``
    (``ncoord = base_dim``).  With ``symmetric=True`` index tuples are stored
    sorted and ``S(q)`` is the full Einstein sum over all orderings; the
    ``1/m!`` convention is *not* used.  ``parities`` optionally assigns a
    parity bit to every coordinate index.
    """

    dim: int
    max_order: int
    coeffs: dict = field(default_factory=dict)
    symmetric: bool = True
    base_dim: int = 0
    parities: tuple | None = None

    def __post_init__(self):
        clean = {}
        for (h, idx), v in self.coeffs.items():
            idx = tuple(idx)
            if h < 0:
                raise ValueError("negative hbar power in a generating function")
            if len(idx) > self.max_order:
                raise ValueError(f"index {idx} exceeds max order {self.max_order}")
            if any(not 0 <= a < self.dim for a in idx):
                raise DimensionMismatch(f"index {idx} out of range for dimension {self.dim}")
            if self.symmetric:
                idx = tuple(sorted(idx))
            if not isinstance(v, FormalSeries):
                v = FormalSeries.constant(v, NO_TRUNCATION, self.base_dim)
            elif v.ncoord != self.base_dim:
                raise DimensionMismatch("coefficient lives over the wrong base dimension")
            key = (h, idx)
            if key in clean:
                v = clean[key] + v
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self.coeffs = clean
        if self.parities is not None:
            self.parities = tuple(int(p) & 1 for p in self.parities)
            if len(self.parities) != self.dim:
                raise ValueError("parity table must assign a parity to every coordinate")

    # access

    def hbar_powers(self) -> list[int]:
        return sorted({h for h, _ in self.coeffs}) or [0]

    def max_hbar(self) -> int:
        return max((h for h, _ in self.coeffs), default=0)

    def get(self, idx: Sequence[int], h: int = 0) -> FormalSeries:
        idx = tuple(idx)
        if self.symmetric:
            idx = tuple(sorted(idx))
        return self.coeffs.get((h, idx), FormalSeries.zero(NO_TRUNCATION, self.base_dim))

    def coefficient(self, idx: Sequence[int], trunc: Truncation = NO_TRUNCATION,
                    hbar: bool = True) -> FormalSeries:
        """``sum_h hbar^h S_h^idx`` as one series (only ``h = 0`` if not ``hbar``)."""
        out = FormalSeries.zero(trunc, self.base_dim)
        for h in (self.hbar_powers() if hbar else [0]):
            c = self.get(idx, h)
            if c:
                out = out + c.retruncate(trunc).mul_hbar(h) if h else out + c.retruncate(trunc)
        return out

    def phi(self, trunc: Truncation = NO_TRUNCATION, hbar: bool = True) -> list[FormalSeries]:
        return [self.coefficient((a,), trunc, hbar) for a in range(self.dim)]

    def s0(self, trunc: Truncation = NO_TRUNCATION, hbar: bool = True) -> FormalSeries:
        return self.coefficient((), trunc, hbar)

    def index_tuples(self, m: int) -> Iterator[tuple]:
        """All index tuples of length ``m`` carrying independent data."""
        if self.symmetric:
            return itertools.combinations_with_replacement(range(self.dim), m)
        return itertools.product(range(self.dim), repeat=m)

    def iter_full(self, h: int = 0) -> Iterator[tuple[tuple, FormalSeries]]:
        """Every ordered index tuple with its (nonzero) coefficient."""
        for (hh, idx), v in sorted(self.coeffs.items(), key=lambda kv: kv[0]):
            if hh != h:
                continue
            if self.symmetric:
                for perm in sorted(set(itertools.permutations(idx))):
                    yield perm, v
            else:
                yield idx, v

    def classical(self) -> "GeneratingFunction":
        """The ``hbar**0`` part."""
        return GeneratingFunction(self.dim, self.max_order,
                                  {k: v for k, v in self.coeffs.items() if k[0] == 0},
                                  self.symmetric, self.base_dim, self.parities)

    def scaled(self, c: FormalSeries | Scalar | int) -> "GeneratingFunction":
        """Multiply every coefficient by ``c`` (e.g. the grading ``eps``)."""
        return GeneratingFunction(self.dim, self.max_order,
                                  {k: v * c for k, v in self.coeffs.items()},
                                  self.symmetric, self.base_dim, self.parities)

    def truncated(self, max_order: int) -> "GeneratingFunction":
        return GeneratingFunction(self.dim, min(max_order, self.max_order),
                                  {k: v for k, v in self.coeffs.items() if len(k[1]) <= max_order},
                                  self.symmetric, self.base_dim, self.parities)

    def pull_base(self, x_map: Sequence[FormalSeries]) -> "GeneratingFunction":
        """Compose coefficients with a base change ``x = x(x')``."""
        if len(x_map) != self.base_dim:
            raise DimensionMismatch("base map has the wrong number of components")
        if not x_map:
            return self
        new_base = x_map[0].ncoord
        return GeneratingFunction(self.dim, self.max_order,
                                  {k: v.substitute(list(x_map), ncoord=new_base)
                                   for k, v in self.coeffs.items()},
                                  self.symmetric, new_base, self.parities)

    def as_series(self, trunc: Truncation = NO_TRUNCATION) -> FormalSeries:
        """``S`` as a series in momenta (and ``hbar``) over the base coordinates."""
        out = FormalSeries.zero(trunc, self.base_dim)
        for (h, idx), v in self.coeffs.items():
            mult = multinomial(idx) if self.symmetric else 1
            mono = FormalSeries.monomial(mult, hbar=h, mom=idx, trunc=trunc, ncoord=self.base_dim)
            out = out + v.retruncate(trunc) * mono
        return out

    @classmethod
    def from_series(cls, s: FormalSeries, dim: int, max_order: int | None = None,
                    keep_eps: bool = True) -> "GeneratingFunction":
        """Inverse of :meth:`as_series` for symmetric coefficients.

        ``eps`` powers stay inside the coefficient values unless ``keep_eps``
        is false, in which case ``eps`` is set to 1.
        """
        coeffs: dict = {}
        top = 0
        for (e, h, m, c), v in s.terms.items():
            if h < 0:
                raise ValueError("negative hbar power in a generating function")
            val = v / multinomial(m)
            key = (h, tuple(m))
            mono = FormalSeries._make({(e if keep_eps else 0, 0, (), c): val},
                                      NO_TRUNCATION, s.ncoord)
            coeffs[key] = coeffs[key] + mono if key in coeffs else mono
            top = max(top, len(m))
        return cls(dim, top if max_order is None else max_order, coeffs, True, s.ncoord)

    @classmethod
    def identity(cls, dim: int) -> "GeneratingFunction":
        """``S(x, q) = x^i q_i``."""
        coeffs = {(0, (a,)): FormalSeries.coordinate(a, dim) for a in range(dim)}
        return cls(dim, 1, coeffs, True, dim)

    def __eq__(self, other):
        if not isinstance(other, GeneratingFunction):
            return NotImplemented
        return (self.dim == other.dim and self.symmetric == other.symmetric
                and self.base_dim == other.base_dim and self.coeffs == other.coeffs)

    # serialisation

    def to_json(self) -> dict:
        out = {"dim": self.dim, "max_order": self.max_order, "symmetric": self.symmetric}
        if self.base_dim:
            out["base_dim"] = self.base_dim
        rows = []
        for (h, idx), v in sorted(self.coeffs.items(), key=lambda kv: kv[0]):
            row = {"hbar": h, "idx": [a + 1 for a in idx]}
            if self.base_dim or not v.is_constant():
                # plain polynomials in x use the polynomial format, anything graded the series one
                plain = all(not (e or h or m) for e, h, m, _ in v.terms)
                row["poly"] = (PolynomialFunction.of(v).to_json() if plain
                               else FormalSeries.to_json(v))
            else:
                row.update(v.constant_term().to_json())
            rows.append(row)
        out["coeffs"] = rows
        if self.parities is not None:
            out["parities"] = list(self.parities)
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "GeneratingFunction":
        dim = int(obj["dim"])
        max_order = int(obj["max_order"])
        symmetric = bool(obj.get("symmetric", True))
        base_dim = int(obj.get("base_dim", 0))
        coeffs: dict = {}
        for row in obj.get("coeffs", []):
            idx = tuple(int(a) - 1 for a in row.get("idx", []))
            if symmetric:
                idx = tuple(sorted(idx))
            if "poly" in row:
                poly = row["poly"]
                v = (PolynomialFunction.from_json(poly) if "monomials" in poly
                     else FormalSeries.from_json(poly))
            else:
                v = FormalSeries.constant(Scalar.from_json(row), NO_TRUNCATION, base_dim)
            key = (int(row.get("hbar", 0)), idx)
            coeffs[key] = coeffs[key] + v if key in coeffs else v
        return cls(dim, max_order, coeffs, symmetric, base_dim, obj.get("parities"))


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
