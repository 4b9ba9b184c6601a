"""The two-dimensional local field k((u))((t)) at finite truncation.

Subspaces spanned by monomials u^i t^j are modelled by their supports, which
are finite unions of intersections of integer half-planes.  Slices of a region
at fixed t-exponent are subspaces of k((u)) and feed the Fredholm machinery of
``kpsato.grassmann``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import linalg
from .errors import ConfigurationError, NotFredholmError, ParseError
from .grassmann import GrassmannPoint
from .parsing import evaluate_aligned, split_modulus
from .report import Report
from .series import TruncatedLaurent, as_fraction, format_terms


@dataclass(frozen=True)
class HalfPlane:
    """a*i + b*j >= c."""

    a: int
    b: int
    c: int

    def contains(self, i: int, j: int) -> bool:
        return self.a * i + self.b * j >= self.c

    def slice(self, j: int) -> tuple[int | None, int | None] | None:
        """Allowed i at fixed j as (lo, hi), None meaning unbounded; None if empty."""
        rest = self.c - self.b * j
        if self.a == 0:
            return (None, None) if rest <= 0 else None
        if self.a > 0:
            return (-((-rest) // self.a), None)
        return (None, rest // self.a)

    def __str__(self):
        return f"{self.a}*i + {self.b}*j >= {self.c}"


def _meet(x, y):
    if x is None or y is None:
        return None
    lo = x[0] if y[0] is None else y[0] if x[0] is None else max(x[0], y[0])
    hi = x[1] if y[1] is None else y[1] if x[1] is None else min(x[1], y[1])
    if lo is not None and hi is not None and lo > hi:
        return None
    return (lo, hi)


@dataclass(frozen=True)
class MonomialRegion:
    """A union of clauses, each clause an intersection of half-planes."""

    clauses: tuple[tuple[HalfPlane, ...], ...]
    name: str = ""

    @classmethod
    def of(cls, *planes: HalfPlane, name: str = "") -> "MonomialRegion":
        return cls((tuple(planes),), name)

    @classmethod
    def everything(cls, name: str = "K") -> "MonomialRegion":
        return cls(((),), name)

    def contains(self, i: int, j: int) -> bool:
        return any(all(h.contains(i, j) for h in clause) for clause in self.clauses)

    def intersect(self, other: "MonomialRegion") -> "MonomialRegion":
        clauses = tuple(a + b for a, b in product(self.clauses, other.clauses))
        return MonomialRegion(clauses, f"{self.name} & {other.name}")

    def union(self, other: "MonomialRegion") -> "MonomialRegion":
        return MonomialRegion(self.clauses + other.clauses, f"{self.name} | {other.name}")

    def points(self, window: int) -> set[tuple[int, int]]:
        r = range(-window, window + 1)
        return {(i, j) for i in r for j in r if self.contains(i, j)}

    def same_on(self, other: "MonomialRegion", window: int) -> list[tuple[int, int]]:
        """Points of the window where membership differs."""
        r = range(-window, window + 1)
        return [(i, j) for i in r for j in r if self.contains(i, j) != other.contains(i, j)]

    def additive_failures(self, window: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """Pairs inside the window whose sum (also inside) leaves the region."""
        pts = sorted(self.points(window))
        bad = []
        for p in pts:
            for q in pts:
                s = (p[0] + q[0], p[1] + q[1])
                if max(abs(s[0]), abs(s[1])) <= window and not self.contains(*s):
                    bad.append((p, q))
        return bad

    def slice(self, j: int) -> "ExponentSet":
        parts = []
        for clause in self.clauses:
            iv = (None, None)
            for h in clause:
                iv = _meet(iv, h.slice(j))
                if iv is None:
                    break
            if iv is not None:
                parts.append(iv)
        return ExponentSet.of(parts)

    def __str__(self):
        return " or ".join("(" + " and ".join(map(str, c)) + ")" if c else "(all)"
                           for c in self.clauses)


@dataclass(frozen=True)
class ExponentSet:
    """A finite union of integer intervals (None = unbounded end)."""

    intervals: tuple[tuple[int | None, int | None], ...]

    @classmethod
    def of(cls, parts) -> "ExponentSet":
        parts = sorted(parts, key=lambda iv: (-math.inf if iv[0] is None else iv[0]))
        merged: list[list] = []
        for lo, hi in parts:
            if merged:
                plo, phi = merged[-1]
                if phi is None or lo is None or lo <= phi + 1:
                    merged[-1][1] = None if (phi is None or hi is None) else max(phi, hi)
                    continue
            merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    def contains(self, i: int) -> bool:
        return any((lo is None or i >= lo) and (hi is None or i <= hi) for lo, hi in self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def is_power_series(self) -> bool:
        """Exactly the exponents i >= 0, i.e. the subspace k[[u]]."""
        return self.intervals == ((0, None),)

    def as_point(self, order: int = 24) -> GrassmannPoint:
        """The monomial subspace as an eventually standard point of Gr(k((u)))."""
        if any(hi is None for _, hi in self.intervals) or not self.intervals or \
                self.intervals[0][0] is not None:
            raise NotFredholmError(
                f"exponent set {self} is not eventually standard (needs all i <= some bound "
                "and finitely many others)")
        first_hi = self.intervals[0][1]
        gens = [TruncatedLaurent.monomial(i, order)
                for lo, hi in self.intervals[1:] for i in range(lo, hi + 1)]
        return GrassmannPoint(gens, -first_hi, order=order)

    def direct_index(self) -> int:
        """#{i >= 0 in the set} - #{i < 0 not in the set}, counted directly."""
        if any(hi is None for _, hi in self.intervals):
            raise NotFredholmError(f"exponent set {self} meets k[[u]] in infinitely many monomials")
        if not self.intervals or self.intervals[0][0] is not None:
            raise NotFredholmError(f"exponent set {self} misses infinitely many negative exponents")
        top = max(hi for _, hi in self.intervals)
        low = min(self.intervals[0][1], -1)
        kernel = sum(1 for i in range(0, top + 1) if self.contains(i))
        coker = sum(1 for i in range(low, 0) if not self.contains(i))
        return kernel - coker

    def __str__(self):
        def end(x, inf):
            return inf if x is None else str(x)
        if not self.intervals:
            return "{}"
        return " u ".join(f"[{end(lo, '-inf')}, {end(hi, 'inf')}]" for lo, hi in self.intervals)


# The example rings on P^2 with u = x/y, t = 1/y, as generator presentations
# and as regions.

TABLE = {
    "B_P": "k[[u]]((t))",
    "B_C": "k[u^-1]((u^-1*t))",
    "O_PC": "k((u))[[t]]",
    "A": "k[u*t^-1, t^-1]",
    "A_C": "k[u^-1][[u^-1*t]]",
    "O_P": "k[[u, t]]",
}

ALIASES = {"Ô_{P,C}": "O_PC", "O_{P,C}": "O_PC", "Ô_P": "O_P", "K02": "B_P", "K12": "O_PC",
           "K_02": "B_P", "K_12": "O_PC"}

REGIONS = {
    "B_P": MonomialRegion.of(HalfPlane(1, 0, 0), name="B_P"),
    "B_C": MonomialRegion.of(HalfPlane(-1, -1, 0), name="B_C"),
    "O_PC": MonomialRegion.of(HalfPlane(0, 1, 0), name="O_PC"),
    "A": MonomialRegion.of(HalfPlane(1, 0, 0), HalfPlane(-1, -1, 0), name="A"),
    "A_C": MonomialRegion.of(HalfPlane(-1, -1, 0), HalfPlane(0, 1, 0), name="A_C"),
    "O_P": MonomialRegion.of(HalfPlane(1, 0, 0), HalfPlane(0, 1, 0), name="O_P"),
    "K": MonomialRegion.everything("K"),
}


def region_for(name: str) -> MonomialRegion:
    key = ALIASES.get(name, name)
    if key not in REGIONS:
        raise ConfigurationError(f"unknown ring {name!r}; choose from {sorted(REGIONS)}")
    return REGIONS[key]


def filtration_region(n: int) -> MonomialRegion:
    """K(n) = t^n k((u))[[t]]."""
    return MonomialRegion.of(HalfPlane(0, 1, n), name=f"K({n})")


_BRACKET = re.compile(r"\[\[|\(\(|\[|\]\]|\)\)|\]")


def presentation(text: str) -> list[tuple[tuple[int, int], bool]]:
    """Generators of an iterated ring notation such as ``k[u^-1]((u^-1*t))``.

    Returns (exponent vector, laurent) pairs: ``((...))`` allows all integer
    powers, ``[...]`` and ``[[...]]`` only non-negative ones.
    """
    s = text.replace(" ", "")
    if not s.startswith("k"):
        raise ParseError("ring notation must start with k", text, 0, "k")
    pos, gens = 1, []
    closing = {"[[": "]]", "((": "))", "[": "]"}
    while pos < len(s):
        m = _BRACKET.match(s, pos)
        if not m or m.group() not in closing:
            raise ParseError("expected a bracket", text, pos, "[, [[ or ((")
        close = s.find(closing[m.group()], m.end())
        if close < 0:
            raise ParseError("unclosed bracket", text, pos, closing[m.group()])
        for part in s[m.end():close].split(","):
            gens.append((monomial_exponents(part), m.group() == "(("))
        pos = close + len(closing[m.group()])
    return gens


def monomial_exponents(text: str) -> tuple[int, int]:
    """(i, j) of a single monomial u^i t^j written with * and ^."""
    value = parse_two_var(text, (64, 64))
    support = value.support()
    if len(support) != 1 or value.coeff(*support[0]) != 1:
        raise ParseError("not a monomial", text, 0, "a product of powers of u and t")
    return support[0]


def generated_support(gens: list[tuple[tuple[int, int], bool]], window: int) -> set[tuple[int, int]]:
    """Exponents in the window reachable as sums of generators (Laurent ones
    with either sign), searching inside a box three times the window."""
    box = 3 * window
    moves = [g for g, _ in gens] + [(-g[0], -g[1]) for g, laurent in gens if laurent]
    seen = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        nxt = []
        for p in frontier:
            for m in moves:
                q = (p[0] + m[0], p[1] + m[1])
                if q not in seen and max(abs(q[0]), abs(q[1])) <= box:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return {p for p in seen if max(abs(p[0]), abs(p[1])) <= window}


def check_table(window: int = 20) -> Report:
    """Each region agrees with the monomials generated by its ring notation."""
    rep = Report(f"ring regions against their generators, |i|, |j| <= {window}")
    for name, notation in TABLE.items():
        generated = generated_support(presentation(notation), window)
        region = REGIONS[name].points(window)
        diff = sorted(generated ^ region)
        rep.add(f"{name} = {notation}", "match" if not diff else f"differ at {diff[:3]}", ok=not diff)
    return rep


def check_intersections(window: int = 20) -> Report:
    """Intersection identities among the example rings, plus ring closure."""
    rep = check_table(window)
    rep.title = f"intersection identities on |i|, |j| <= {window}"
    for left, right, result in (("B_P", "B_C", "A"), ("B_C", "O_PC", "A_C"), ("B_P", "O_PC", "O_P")):
        bad = REGIONS[left].intersect(REGIONS[right]).same_on(REGIONS[result], window)
        rep.add(f"{left} & {right} = {result}", "holds" if not bad else f"fails at {bad[:3]}",
                ok=not bad)
    for name in TABLE:
        bad = REGIONS[name].additive_failures(window // 2)
        rep.add(f"{name} closed under products", "yes" if not bad else f"no: {bad[0]}", ok=not bad)
    return rep


# Graded pieces and indices


def graded_piece(region: MonomialRegion, n: int, order: int = 24) -> GrassmannPoint:
    """The t^n-slice of a region as a point of Gr(k((u)))."""
    return region.slice(n).as_point(order)


def graded_index(region: MonomialRegion, n: int, order: int = 24) -> int:
    """Index of slice_n(region) + slice_n(K02) -> k((u)) via the grassmann module."""
    against = REGIONS["B_P"].slice(n)
    if not against.is_power_series():
        raise ConfigurationError("the K02 slice must be k[[u]]")
    piece = region.slice(n)
    index = piece.as_point(order).index()
    direct = piece.direct_index()
    if index != direct:
        raise ConfigurationError(f"index {index} disagrees with direct count {direct}")
    return index


@dataclass(frozen=True)
class GradedIndexSpec:
    """Expected index chi + n' * self_intersection with n' = -n."""

    chi: int = 1
    self_intersection: int = 1

    def expected(self, n: int) -> int:
        return self.chi + (-n) * self.self_intersection


def check_graded_indices(spec: GradedIndexSpec = GradedIndexSpec(), levels=range(-5, 6),
                    ring: str = "B_C") -> Report:
    region = region_for(ring)
    levels = list(levels)
    rep = Report(f"graded indices of {ring} for levels {levels[0]}..{levels[-1]}")
    values = {}
    for n in levels:
        values[n] = graded_index(region, n)
        rep.add(f"level {n} (n' = {-n})", values[n], ok=values[n] == spec.expected(n))
    steps = {values[n + 1] - values[n] for n in levels[:-1]}
    affine = len(steps) == 1
    slope = steps.pop() if affine else None
    rep.add("affine-linear in n", f"slope {slope}", ok=affine and abs(slope) == abs(spec.self_intersection))
    rep.add("value at level 0 equals chi", values.get(0), ok=values.get(0) == spec.chi)
    rep.data.update({"indices": {str(n): v for n, v in values.items()}, "slope": slope})
    return rep


def three_term_cohomology(first: MonomialRegion, second: MonomialRegion, third: MonomialRegion,
                          window: int = 20) -> tuple[tuple[int, int, int], dict]:
    """Cohomology of pairwise intersections -> the three spaces -> K.

    All spaces are spanned by monomials, so the complex splits into one small
    complex per monomial; each is solved by exact ranks.
    """
    spaces = (first, second, third)
    pairs = ((0, 1), (0, 2), (1, 2))
    h = [0, 0, 0]
    witnesses: dict[int, list] = {0: [], 1: [], 2: []}
    r = range(-window, window + 1)
    for i in r:
        for j in r:
            inside = [s.contains(i, j) for s in spaces]
            cols0 = [p for p in pairs if inside[p[0]] and inside[p[1]]]
            cols1 = [k for k in range(3) if inside[k]]
            # d0: f on X cap Y  ->  (f on X, -f on Y)
            d0 = [[Fraction(0)] * len(cols0) for _ in cols1]
            for c, (x, y) in enumerate(cols0):
                d0[cols1.index(x)][c] = Fraction(1)
                d0[cols1.index(y)][c] = Fraction(-1)
            r0 = linalg.rank(d0) if cols0 and cols1 else 0
            r1 = 1 if cols1 else 0  # d1 is the sum map onto the single copy of K
            contrib = (len(cols0) - r0, len(cols1) - r1 - r0, 1 - r1)
            for k in range(3):
                if contrib[k]:
                    h[k] += contrib[k]
                    witnesses[k].append((i, j))
    return (h[0], h[1], h[2]), witnesses


def check_three_term(window: int = 20) -> Report:
    rep = Report(f"three-term complex for B_C, K02, K12 on |i|, |j| <= {window}")
    h, wit = three_term_cohomology(REGIONS["B_C"], REGIONS["B_P"], REGIONS["O_PC"], window)
    rep.add("(h0, h1, h2)", h, ok=h == (1, 0, 0))
    rep.add("h0 spanned by", wit[0])
    rep.data["h"] = list(h)
    return rep


# Iterated Laurent series


class TwoVarSeries:
    """sum_j c_j(u) t^j with c_j in k((u)), known modulo t^(t_order+1)."""

    __slots__ = ("terms", "t_order")

    def __init__(self, terms: dict[int, TruncatedLaurent], t_order: int):
        self.t_order = t_order
        self.terms = {j: c for j, c in terms.items() if j <= t_order and not c.is_zero()}

    @property
    def u_order(self) -> int:
        return min((c.order for c in self.terms.values()), default=1 << 30)

    @classmethod
    def monomial(cls, i: int, j: int, orders: tuple[int, int], coeff=1) -> "TwoVarSeries":
        u_order, t_order = orders
        if j > t_order:
            return cls({}, t_order)
        return cls({j: TruncatedLaurent.monomial(i, u_order) * as_fraction(coeff)}, t_order)

    @classmethod
    def constant(cls, c, orders: tuple[int, int]) -> "TwoVarSeries":
        return cls.monomial(0, 0, orders, c)

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> int:
        """Outer (t) valuation; t_order + 1 for zero."""
        return min(self.terms, default=self.t_order + 1)

    def coeff(self, i: int, j: int) -> Fraction:
        c = self.terms.get(j)
        return Fraction(0) if c is None else Fraction(c.coeff(i))

    def support(self) -> list[tuple[int, int]]:
        return sorted((i, j) for j, c in self.terms.items() for i, v in c.items() if v)

    def truncate(self, u_order: int, t_order: int) -> "TwoVarSeries":
        if t_order > self.t_order or (self.terms and u_order > self.u_order):
            raise ConfigurationError("cannot raise precision by truncation")
        return TwoVarSeries({j: c.truncate(u_order) for j, c in self.terms.items()}, t_order)

    def aligned_with(self, other: "TwoVarSeries") -> tuple["TwoVarSeries", "TwoVarSeries"]:
        """Both operands cut to the common t-precision."""
        t = min(self.t_order, other.t_order)
        return TwoVarSeries(self.terms, t), TwoVarSeries(other.terms, t)

    def _check(self, other: "TwoVarSeries"):
        if self.t_order != other.t_order:
            raise ConfigurationError(f"t-truncations differ: {self.t_order} vs {other.t_order}")

    def __add__(self, other):
        if not isinstance(other, TwoVarSeries):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for j, c in other.terms.items():
            if j in out:
                n = min(out[j].order, c.order)
                out[j] = out[j].truncate(n) + c.truncate(n)
            else:
                out[j] = c
        return TwoVarSeries(out, self.t_order)

    def __neg__(self):
        return TwoVarSeries({j: -c for j, c in self.terms.items()}, self.t_order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TwoVarSeries({j: c * other for j, c in self.terms.items()}, self.t_order)
        if not isinstance(other, TwoVarSeries):
            return NotImplemented
        self._check(other)
        order = min(self.t_order + other.valuation(), other.t_order + self.valuation())
        out: dict[int, TruncatedLaurent] = {}
        for j, a in self.terms.items():
            for k, b in other.terms.items():
                if j + k > order:
                    continue
                n = min(a.order, b.order)
                prod = a.truncate(n) * b.truncate(n)
                if j + k in out:
                    m = min(out[j + k].order, prod.order)
                    out[j + k] = out[j + k].truncate(m) + prod.truncate(m)
                else:
                    out[j + k] = prod
        return TwoVarSeries(out, order)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TwoVarSeries):
            return NotImplemented
        t = min(self.t_order, other.t_order)
        zero = None
        for j in set(self.terms) | set(other.terms):
            if j > t:
                continue
            a, b = self.terms.get(j, zero), other.terms.get(j, zero)
            if a is None or b is None:
                c = a if b is None else b
                if not c.is_zero():
                    return False
            elif not (a == b):
                return False
        return True

    __hash__ = None

    def in_region(self, region: MonomialRegion) -> bool:
        """Support inside the region (for the known coefficients)."""
        return all(region.contains(i, j) for i, j in self.support())

    def __str__(self):
        pairs = []
        for i, j in sorted(self.support(), key=lambda p: (p[1], p[0])):
            mono = "*".join(x for x in (_power("u", i), _power("t", j)) if x)
            pairs.append((self.coeff(i, j), mono))
        return format_terms(pairs) + f" (mod t^{self.t_order + 1})"

    def __repr__(self):
        return f"TwoVarSeries({self})"


def _power(var: str, e: int) -> str:
    return "" if e == 0 else var if e == 1 else f"{var}^{e}"


def parse_two_var(text: str, orders: tuple[int, int] = (12, 12)) -> TwoVarSeries:
    """Polynomial expressions in u, t with integer exponents, optionally
    followed by ``(mod t^K)``."""
    text, var, exp = split_modulus(text)
    if var is not None:
        if var != "t":
            raise ParseError(f"modulus must be a power of t, got {var!r}", text, len(text), "t")
        orders = (orders[0], exp - 1)
    work = (orders[0] + 64, orders[1] + 64)

    def symbol(name, exp):
        if name == "u":
            return TwoVarSeries.monomial(exp, 0, work)
        if name == "t":
            return TwoVarSeries.monomial(0, exp, work)
        raise KeyError(f"unknown variable {name!r}")

    value = evaluate_aligned(text, lambda c: TwoVarSeries.constant(c, work), symbol)
    return value.truncate(min(orders[0], value.u_order), min(orders[1], value.t_order))
