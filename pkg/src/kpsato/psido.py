"""Formal pseudo-differential operators sum a_i d^i over a coefficient ring.

Two coefficient rings are supported: truncated power series in x (optionally
with dual-number coefficients) and differential polynomials.  Precision is
tracked in two ways:

* ``depth``: exponents below ``-depth`` are unknown.  ``None`` means there is
  no unknown tail at all, which is only allowed for differential operators.
* for series coefficients, each coefficient carries its own x-adic order.

The Leibniz product computes the depth it can guarantee and never reports a
coefficient that depends on discarded data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .diffpoly import DiffPoly
from .errors import ConfigurationError, NonUnitError
from .series import DualScalar, TruncatedLaurent, TruncatedSeries

# Constants are exact, so their x-adic precision can be taken arbitrarily high.
CONSTANT_ORDER = 1 << 30

INF = math.inf


@lru_cache(maxsize=None)
def falling_factorial(i: int, k: int) -> int:
    out = 1
    for r in range(k):
        out *= i - r
    return out


@lru_cache(maxsize=None)
def gen_binomial(i: int, k: int) -> Fraction:
    """i(i-1)...(i-k+1)/k! for any integer i and k >= 0."""
    if k < 0:
        raise ValueError("lower index must be non-negative")
    return Fraction(falling_factorial(i, k), math.factorial(k))


@dataclass(frozen=True)
class SeriesRing:
    """Coefficients in k[[x]] known modulo x^(order+1)."""

    order: int
    exact = False

    def one(self):
        return TruncatedSeries.one(self.order)

    def zero(self):
        return TruncatedSeries.zero(self.order)

    def const(self, c):
        return TruncatedSeries.constant(c, self.order)

    def coerce(self, c):
        if isinstance(c, TruncatedSeries):
            return c
        if isinstance(c, (int, Fraction, DualScalar)):
            return self.const(c)
        raise ConfigurationError(f"{c!r} is not a series coefficient")

    def x(self, n: int = 1):
        return TruncatedSeries.monomial(n, self.order)


@dataclass(frozen=True)
class PolyRing:
    """Coefficients in the differential polynomial ring."""

    exact = True

    def one(self):
        return DiffPoly.one()

    def zero(self):
        return DiffPoly.zero()

    def const(self, c):
        return DiffPoly.constant(c)

    def coerce(self, c):
        if isinstance(c, DiffPoly):
            return c
        if isinstance(c, (int, Fraction)):
            return DiffPoly.constant(c)
        raise ConfigurationError(f"{c!r} is not a differential polynomial")


POLY = PolyRing()


def ring_of(c, default_order: int = 8):
    if isinstance(c, DiffPoly):
        return POLY
    if isinstance(c, TruncatedSeries):
        return SeriesRing(c.order)
    return SeriesRing(default_order)


def _join_rings(r1, r2):
    if isinstance(r1, PolyRing) and isinstance(r2, PolyRing):
        return POLY
    if isinstance(r1, SeriesRing) and isinstance(r2, SeriesRing):
        return SeriesRing(min(r1.order, r2.order))
    raise ConfigurationError("operators over different coefficient rings")


def _dmin(*values):
    return min(INF if v is None else v for v in values)


def _to_depth(v):
    return None if v == INF else int(v)


def _sum(values: list):
    """Add coefficients, aligning series precision explicitly."""
    if not values:
        return None
    if hasattr(values[0], "order"):
        n = min(v.order for v in values)
        values = [v.truncate(n) for v in values]
    acc = values[0]
    for v in values[1:]:
        acc = acc + v
    return acc


def _mul(a, b):
    if hasattr(a, "order") and hasattr(b, "order") and a.order != b.order:
        n = min(a.order, b.order)
        a, b = a.truncate(n), b.truncate(n)
    return a * b


class PsiDO:
    """An operator sum_i a_i d^i with a_i in a coefficient ring."""

    __slots__ = ("terms", "depth", "ring")

    def __init__(self, terms: Mapping[int, object], depth: int | None, ring=None):
        if ring is None:
            sample = next(iter(terms.values()), None)
            ring = ring_of(sample) if sample is not None else SeriesRing(8)
        clean: dict[int, object] = {}
        for e, c in terms.items():
            c = ring.coerce(c)
            if ring.exact and c.is_zero():
                continue
            clean[int(e)] = c
        if not ring.exact:
            unknown = [e for e, c in clean.items() if c.order < 0]
            if unknown:
                depth = int(_dmin(depth, -max(unknown) - 1))
        if depth is not None:
            clean = {e: c for e, c in clean.items() if e >= -depth}
        elif any(e < 0 for e in clean):
            raise ConfigurationError("an operator with negative powers of d needs a finite depth")
        self.terms: dict[int, object] = dict(sorted(clean.items(), reverse=True))
        self.depth: int | None = depth
        self.ring = ring

    # constructors
    @classmethod
    def const(cls, c, ring=None, depth: int | None = None) -> "PsiDO":
        ring = ring or ring_of(c)
        return cls({0: c}, depth, ring)

    @classmethod
    def identity(cls, ring, depth: int | None = None) -> "PsiDO":
        return cls({0: ring.one()}, depth, ring)

    @classmethod
    def zero(cls, ring, depth: int | None = None) -> "PsiDO":
        return cls({}, depth, ring)

    @classmethod
    def d(cls, n: int = 1, ring=None, depth: int | None = None) -> "PsiDO":
        ring = ring or SeriesRing(8)
        if n < 0 and depth is None:
            depth = -n
        return cls({n: ring.one()}, depth, ring)

    @classmethod
    def x(cls, n: int = 1, ring=None) -> "PsiDO":
        ring = ring or SeriesRing(8)
        return cls({0: ring.x(n)}, None, ring)

    # access
    def coeff(self, e: int):
        if self.depth is not None and e < -self.depth:
            raise IndexError(f"coefficient of d^{e} is below the depth {self.depth}")
        c = self.terms.get(e)
        return self.ring.zero() if c is None else c

    def __getitem__(self, e: int):
        return self.coeff(e)

    def top(self) -> float:
        """Largest stored exponent; bounds the order of the operator."""
        if self.terms:
            return max(self.terms)
        if self.depth is None:
            return -INF
        return -self.depth - 1

    def order(self) -> int | None:
        """Largest exponent with a coefficient that is not (known to be) zero."""
        nonzero = [e for e, c in self.terms.items() if not c.is_zero()]
        return max(nonzero) if nonzero else None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.terms.values())

    # arithmetic
    def _coerce(self, other) -> "PsiDO | None":
        if isinstance(other, PsiDO):
            return other
        if isinstance(other, (int, Fraction, DualScalar, TruncatedSeries, DiffPoly)):
            return PsiDO({0: self.ring.coerce(other)}, None, self.ring)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ring = _join_rings(self.ring, o.ring)
        depth = _to_depth(_dmin(self.depth, o.depth))
        out: dict[int, list] = {}
        for src in (self, o):
            for e, c in src.terms.items():
                out.setdefault(e, []).append(c)
        return PsiDO({e: _sum(cs) for e, cs in out.items()}, depth, ring)

    __radd__ = __add__

    def __neg__(self):
        return PsiDO({e: -c for e, c in self.terms.items()}, self.depth, self.ring)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def scale(self, s) -> "PsiDO":
        return PsiDO({e: c * s for e, c in self.terms.items()}, self.depth, self.ring)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.compose(o)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.compose(self)

    def compose(self, other: "PsiDO") -> "PsiDO":
        """Leibniz product: sum C(i,k) a_i d^k(b_j) d^(i+j-k)."""
        ring = _join_rings(self.ring, other.ring)
        if (not self.terms and self.depth is None) or (not other.terms and other.depth is None):
            return PsiDO({}, None, ring)
        top_p, top_q = self.top(), other.top()
        dp = INF if self.depth is None else self.depth
        dq = INF if other.depth is None else other.depth
        depth = min(dp - top_q, dq - top_p)
        parts: dict[int, list] = {}
        dcache: dict[int, list] = {}
        for j, b in other.terms.items():
            dcache[j] = [b]
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                kmax = i if i >= 0 else INF
                kmax = min(kmax, i + j + depth)
                if kmax < 0:
                    continue
                if kmax == INF:
                    raise ConfigurationError("unbounded Leibniz sum; give the operator a finite depth")
                derivs = dcache[j]
                for k in range(int(kmax) + 1):
                    while len(derivs) <= k:
                        derivs.append(derivs[-1].deriv())
                    db = derivs[k]
                    if ring.exact and db.is_zero():
                        break
                    binom = gen_binomial(i, k)
                    if binom == 0:
                        continue
                    parts.setdefault(i + j - k, []).append(_mul(a, db) * binom)
                    if not ring.exact and db.order < 0:
                        break
        terms = {e: _sum(cs) for e, cs in parts.items()}
        return PsiDO(terms, _to_depth(depth), ring)

    def __pow__(self, n: int) -> "PsiDO":
        return self.power(n)

    def power(self, n: int) -> "PsiDO":
        if n < 0:
            raise ValueError("negative powers are not supported; use inverse")
        if n == 0:
            return PsiDO.identity(self.ring)
        result = self
        for _ in range(n - 1):
            result = result.compose(self)
        return result

    def commutator(self, other: "PsiDO") -> "PsiDO":
        return self.compose(other) - other.compose(self)

    # splitting
    def plus(self) -> "PsiDO":
        """Differential part (exponents >= 0)."""
        depth = self.depth
        if depth is not None and depth >= 0:
            depth = None
        return PsiDO({e: c for e, c in self.terms.items() if e >= 0}, depth, self.ring)

    def minus(self) -> "PsiDO":
        """Integral part (exponents < 0)."""
        depth = self.depth
        if depth is None:
            depth = 0
        return PsiDO({e: c for e, c in self.terms.items() if e < 0}, depth, self.ring)

    def truncate_depth(self, depth: int) -> "PsiDO":
        if self.depth is not None and depth > self.depth:
            raise ConfigurationError(f"cannot raise depth from {self.depth} to {depth}")
        return PsiDO(self.terms, depth, self.ring)

    def truncate_weight(self, weight: int) -> "PsiDO":
        """Keep x^a d^e only for a - e <= weight and declare the result known
        modulo weight > ``weight``.  The caller guarantees that whatever is
        unknown or discarded has weight above the bound."""
        if self.ring.exact:
            raise ConfigurationError("weight truncation needs series coefficients")
        terms = {}
        for e, c in self.terms.items():
            if weight + e < 0:
                continue
            terms[e] = c.truncate(min(c.order, weight + e))
        return PsiDO(terms, weight, self.ring)

    def map_coefficients(self, func, ring=None) -> "PsiDO":
        return PsiDO({e: func(c) for e, c in self.terms.items()}, self.depth, ring or self.ring)

    def inverse(self) -> "PsiDO":
        """Inverse of an operator of the form 1 + (negative powers)."""
        for e, c in self.terms.items():
            if e > 0 and not c.is_zero():
                raise NonUnitError("operator has positive powers of d; not in 1 + E_-")
        c0 = self.terms.get(0)
        if c0 is None or not (c0 == self.ring.one()):
            raise NonUnitError("constant term is not 1; not in 1 + E_-")
        tail = PsiDO({e: c for e, c in self.terms.items() if e < 0},
                     0 if self.depth is None else self.depth, self.ring)
        one = PsiDO({0: c0}, self.depth, self.ring)
        if self.depth is None:
            return one
        result = one
        for _ in range(self.depth + 1):
            result = one - tail.compose(result)
        return result

    # comparison
    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        _join_rings(self.ring, o.ring)
        depth = _dmin(self.depth, o.depth)
        zero = self.ring.zero()
        for e in set(self.terms) | set(o.terms):
            if e < -depth:
                continue
            a = self.terms.get(e, zero)
            b = o.terms.get(e, zero)
            if not (a == b):
                return False
        return True

    __hash__ = None

    def difference_report(self, other: "PsiDO") -> str | None:
        """Describe the first coefficient where two operators differ."""
        depth = _dmin(self.depth, other.depth)
        zero = self.ring.zero()
        for e in sorted(set(self.terms) | set(other.terms), reverse=True):
            if e < -depth:
                continue
            a = self.terms.get(e, zero)
            b = other.terms.get(e, zero)
            if not (a == b):
                return f"coefficient of d^{e}: {_coef_text(a)} != {_coef_text(b)}"
        return None

    # text
    def __str__(self):
        parts = []
        for e, c in self.terms.items():
            if c.is_zero():
                continue
            mono = "" if e == 0 else ("d" if e == 1 else f"d^{e}")
            text = _coef_text(c)
            single = len(c.terms if isinstance(c, DiffPoly) else c.items()) == 1
            sign = "+"
            if (single or not mono) and text.startswith("-"):
                sign, text = "-", text[1:]
            if mono:
                if text == "1":
                    body = mono
                elif single:
                    body = f"{text}*{mono}"
                else:
                    body = f"({text})*{mono}"
            else:
                body = text
            if not parts:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts) if parts else "0"

    def __repr__(self):
        return f"PsiDO({str(self)!r}, depth={self.depth})"

    @classmethod
    def parse(cls, text: str, depth: int = 8, x_order: int = 8, ring=None) -> "PsiDO":
        return parse_operator(text, depth=depth, x_order=x_order, ring=ring)


def _coef_text(c) -> str:
    if isinstance(c, TruncatedSeries):
        return c.format(with_order=False)
    return str(c)


def parse_operator(text: str, depth: int = 8, x_order: int = 8, ring=None) -> PsiDO:
    import re

    from .diffpoly import DiffVar
    from .parsing import evaluate

    if ring is None:
        ring = POLY if re.search(r"\bu\d", text) else SeriesRing(x_order)

    def number(c):
        return PsiDO({0: ring.const(c)}, None, ring)

    def symbol(name, exp):
        if name == "d":
            return PsiDO({exp: ring.one()}, None if exp >= 0 else depth, ring)
        if name == "x":
            if ring.exact:
                raise KeyError("x is not available over differential polynomials")
            if exp < 0:
                raise ValueError("negative power of x")
            return PsiDO({0: ring.x(exp)}, None, ring)
        if ring.exact:
            v = DiffVar.parse(name)
            if exp < 0:
                raise ValueError("negative power of a differential variable")
            return PsiDO({0: DiffPoly.var(v) ** exp}, None, ring)
        raise KeyError(f"unknown symbol {name!r}")

    value = evaluate(text, number, symbol)
    if value.depth is None and depth is not None and any(e < 0 for e in value.terms):
        value = value.truncate_depth(depth)
    return value


# The Sato map E -> E/Ex = k((z)), d^-1 -> z.


def sato_precision(P: PsiDO) -> float:
    bound = INF if P.depth is None else P.depth
    for i, a in P.terms.items():
        if i < 0 or a.order < i:
            bound = min(bound, a.order - i)
    return bound


def sato_image(P: PsiDO, order: int | None = None) -> TruncatedLaurent:
    """Class of P modulo Ex, via x^n d^i == (-1)^n i(i-1)...(i-n+1) d^(i-n)."""
    if P.ring.exact:
        raise ConfigurationError("the Sato map needs series coefficients")
    bound = sato_precision(P)
    if order is not None:
        bound = min(bound, order)
    if bound == INF:
        bound = P.ring.order
    bound = int(bound)
    data: dict[int, object] = {}
    for i, a in P.terms.items():
        for n, c in a.items():
            e = n - i
            if e > bound:
                continue
            ff = falling_factorial(i, n)
            if ff == 0:
                continue
            data[e] = data.get(e, 0) + c * ((-1) ** n * ff)
    return TruncatedLaurent.from_dict(data, bound)


def sato_image_by_rewriting(P: PsiDO, order: int | None = None) -> TruncatedLaurent:
    """Slow reference for ``sato_image``: move x to the right one step at a
    time using x d^i = d^i x - i d^(i-1), then drop everything ending in x."""
    bound = sato_precision(P)
    if order is not None:
        bound = min(bound, order)
    if bound == INF:
        bound = P.ring.order
    bound = int(bound)
    data: dict[int, object] = {}
    for i, a in P.terms.items():
        for n, c in a.items():
            # state: (x-power on the left, d-power, x-power on the right)
            work: dict[tuple[int, int, int], Fraction] = {(n, i, 0): Fraction(1)}
            while work:
                (left, dp, right), w = work.popitem()
                if left == 0:
                    if right == 0:
                        e = -dp
                        if e <= bound:
                            data[e] = data.get(e, 0) + c * w
                    continue
                nxt = (left - 1, dp, right + 1)
                work[nxt] = work.get(nxt, 0) + w
                if dp != 0:
                    nxt = (left - 1, dp - 1, right)
                    work[nxt] = work.get(nxt, 0) - dp * w
            # terms with a positive right x-power lie in Ex and vanish
    return TruncatedLaurent.from_dict(data, bound)


def sato_lift(v: TruncatedLaurent, x_order: int = CONSTANT_ORDER) -> PsiDO:
    """Constant-coefficient operator sum c_e d^-e with image v."""
    ring = SeriesRing(x_order)
    terms = {-e: ring.const(c) for e, c in v.items()}
    return PsiDO(terms, v.order, ring)


def act_on_v(P: PsiDO, v: TruncatedLaurent, order: int | None = None) -> TruncatedLaurent:
    """The left action of E on V = E/Ex."""
    return sato_image(P.compose(sato_lift(v)), order)


def w0_violation(P: PsiDO, max_index: int) -> tuple[int, int, object] | None:
    """Search z^0, z^-1, ..., z^-max_index for a basis vector of W0 = k[z^-1]
    sent outside W0; return (n, exponent, coefficient) or None."""
    for n in range(max_index + 1):
        image = act_on_v(P, TruncatedLaurent.monomial(-n, CONSTANT_ORDER))
        for e, c in image.items():
            if e > 0 and c:
                return (n, e, c)
    return None


def lax_like(coefficients: Iterable, depth: int, ring) -> PsiDO:
    """d + sum_m c_m d^-m."""
    terms = {1: ring.one()}
    for m, c in enumerate(coefficients, start=1):
        terms[-m] = c
    return PsiDO(terms, depth, ring)
