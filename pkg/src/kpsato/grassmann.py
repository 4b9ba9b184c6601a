"""Eventually standard subspaces of V = k((z)) and the dressing construction.

A ``GrassmannPoint`` is W = span(generators) + span(tail(n) : n >= T) where
``tail(n)`` has leading term z^-n (by default exactly z^-n).  All questions
about W reduce to finite linear algebra on a window of exponents.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import linalg
from .errors import ConfigurationError, NonUnitError, NotFredholmError, ParseError
from .psido import CONSTANT_ORDER, PsiDO, SeriesRing, act_on_v, falling_factorial, sato_image, sato_lift
from .report import Report
from .series import TruncatedLaurent, TruncatedSeries, eps_part, value_part


def _vectors(elements: Sequence[TruncatedLaurent], lo: int, hi: int) -> list[list[Fraction]]:
    return [[Fraction(value_part(v.coeff(e))) for e in range(lo, hi + 1)] for v in elements]


def _from_vector(vec: Sequence[Fraction], lo: int, order: int) -> TruncatedLaurent:
    return TruncatedLaurent.from_dict({lo + i: c for i, c in enumerate(vec) if c}, order)


class GrassmannPoint:
    """W = span(generators) + closure of span(tail(n), n >= tail_level)."""

    def __init__(self, generators: Sequence[TruncatedLaurent], tail_level: int,
                 tail: Callable[[int], TruncatedLaurent] | None = None, order: int | None = None):
        gens = list(generators)
        if order is None:
            order = min((g.order for g in gens), default=12)
        self.order = order
        self.tail_level = tail_level
        self._tail = tail
        self.generators = self._normalize([g.truncate(min(g.order, order)) if g.order > order else g
                                           for g in gens])

    # basic data
    @property
    def standard_tail(self) -> bool:
        return self._tail is None

    def tail(self, n: int) -> TruncatedLaurent:
        if self._tail is None:
            return TruncatedLaurent.monomial(-n, self.order)
        t = self._tail(n)
        if t.valuation() != -n:
            raise ConfigurationError(f"tail element {n} has valuation {t.valuation()}, expected {-n}")
        if t.order > self.order:
            t = t.truncate(self.order)
        return t * (1 / t.leading_coefficient())

    def _reduce(self, v: TruncatedLaurent) -> TruncatedLaurent:
        """Clear every exponent <= -tail_level using tail elements."""
        if v.order != self.order:
            v = v.truncate(min(v.order, self.order))
        while not v.is_zero() and v.valuation() <= -self.tail_level:
            e = v.valuation()
            t = self.tail(-e)
            if t.order != v.order:
                n = min(t.order, v.order)
                t, v = t.truncate(n), v.truncate(n)
            v = v - t * v.leading_coefficient()
        return v

    def _normalize(self, gens: list[TruncatedLaurent]) -> list[TruncatedLaurent]:
        reduced = [self._reduce(g) for g in gens]
        reduced = [g for g in reduced if not g.is_zero()]
        if not reduced:
            return []
        order = min(g.order for g in reduced)
        lo = min(g.valuation() for g in reduced)
        if lo > order:
            return []
        rows, _ = linalg.rref(_vectors(reduced, lo, order))
        return [_from_vector(r, lo, order) for r in rows]

    def window(self, depth: int) -> list[TruncatedLaurent]:
        """Generators plus tail elements tail(n) for tail_level <= n <= depth."""
        out = list(self.generators)
        out += [self.tail(n) for n in range(self.tail_level, depth + 1)]
        return out

    def _lowest_exponent(self) -> int:
        vals = [g.valuation() for g in self.generators]
        return min(vals + [-self.tail_level + 1, 0])

    def _window_depth(self) -> int:
        return max(-self._lowest_exponent(), self.tail_level, 0) + 1

    def contains(self, v: TruncatedLaurent) -> bool:
        """Membership up to the common truncation order."""
        r = self._reduce(v)
        if r.is_zero():
            return True
        order = min([r.order] + [g.order for g in self.generators])
        lo = min([r.valuation()] + [g.valuation() for g in self.generators])
        if lo > order:
            return True
        rows = _vectors(self.generators, lo, order)
        target = _vectors([r.truncate(order)], lo, order)[0]
        return linalg.in_row_space(rows, target)

    # Fredholm data against k[[z]]
    def kernel_cokernel(self, depth: int | None = None) -> tuple[list[TruncatedLaurent], list[int]]:
        """Basis of W intersect k[[z]] and exponents spanning a complement of
        W + k[[z]] in k((z)).  ``depth`` widens the exponent window."""
        depth = max(self._window_depth(), depth or 0)
        elems = self.window(depth)
        rows = _vectors(elems, -depth, -1)
        null = linalg.nullspace([list(col) for col in zip(*rows)], len(elems))
        order = min(e.order for e in elems)
        kernel = []
        for coeffs in null:
            acc = TruncatedLaurent.zero(order)
            for c, e in zip(coeffs, elems):
                if c:
                    acc = acc + e.truncate(order) * c
            kernel.append(acc)
        _, pivots = linalg.rref(rows)
        covered = {-depth + p for p in pivots}
        cokernel = [e for e in range(-depth, 0) if e not in covered]
        return kernel, cokernel

    def intersection_basis(self, n: int) -> list[TruncatedLaurent]:
        """Basis of W intersect z^n k[[z]] with distinct leading exponents."""
        depth = max(self._window_depth(), -n)
        elems = self.window(depth)
        order = min(e.order for e in elems)
        if n > order:
            raise ConfigurationError(f"z^{n} is beyond the known precision z^{order}")
        rows = _vectors(elems, -depth, order)
        cut = n + depth
        low = [r[:cut] for r in rows]
        if cut > 0:
            null = linalg.nullspace([list(col) for col in zip(*low)], len(rows))
        else:
            null = [[Fraction(int(i == j)) for j in range(len(rows))] for i in range(len(rows))]
        vecs = []
        for coeffs in null:
            acc = [Fraction(0)] * len(rows[0])
            for c, r in zip(coeffs, rows):
                if c:
                    acc = [a + c * b for a, b in zip(acc, r)]
            vecs.append(acc[cut:])
        reduced, _ = linalg.rref(vecs) if vecs else ([], [])
        return [_from_vector(r, n, order) for r in reduced]

    def index(self) -> int:
        kernel, cokernel = self.kernel_cokernel()
        return len(kernel) - len(cokernel)

    def in_big_cell(self) -> bool:
        """W + zk[[z]] = V with trivial intersection."""
        depth = self._window_depth()
        elems = self.window(depth)
        if len(elems) != depth + 1:
            return False
        rows = _vectors(elems, -depth, 0)
        return linalg.rank(rows) == depth + 1

    def normalized_basis(self, count: int) -> list[TruncatedLaurent]:
        """w_n = z^-n + v_n with v_n in zk[[z]] for n = 0..count-1."""
        if not self.in_big_cell():
            raise NotFredholmError("W is not in the big cell")
        depth = max(self._window_depth(), count)
        elems = self.window(depth)
        order = min(e.order for e in elems)
        rows = _vectors(elems, -depth, order)
        reduced, pivots = linalg.rref(rows)
        basis = {}
        for row, p in zip(reduced, pivots):
            e = -depth + p
            if e <= 0:
                basis[-e] = _from_vector(row, -depth, order)
        return [basis[n] for n in range(count)]

    def multiply(self, f: TruncatedLaurent) -> "GrassmannPoint":
        """f W for a nonzero Laurent series f."""
        v = f.valuation()
        unit = f.shift(-v)
        exact_monomial = unit.items() == [(0, 1)]

        def times(x: TruncatedLaurent) -> TruncatedLaurent:
            if exact_monomial:
                return x.shift(v)
            n = min(x.order, unit.order)
            return (x.truncate(n) * unit.truncate(n)).shift(v)

        gens = [times(g) for g in self.generators]
        if self.standard_tail and exact_monomial:
            tail = None
        else:
            tail = lambda n: times(self.tail(n + v))  # noqa: E731
        return GrassmannPoint(gens, self.tail_level - v, tail, order=self.order + v)

    def __eq__(self, other):
        if not isinstance(other, GrassmannPoint):
            return NotImplemented
        depth = max(self._window_depth(), other._window_depth())
        a, b = self.window(depth), other.window(depth)
        order = min([e.order for e in a + b])
        ra = linalg.rref(_vectors(a, -depth, order))[0]
        rb = linalg.rref(_vectors(b, -depth, order))[0]
        return ra == rb

    __hash__ = None

    def __str__(self):
        gens = ", ".join(g.format(with_order=False) for g in self.generators)
        tail = "" if not self.standard_tail else f" tail at {-self.tail_level}"
        return f"span{{{gens}}}{tail} (mod z^{self.order + 1})"

    @classmethod
    def standard(cls, order: int = 12) -> "GrassmannPoint":
        """W0 = k[z^-1]."""
        return cls([], 0, order=order)

    @classmethod
    def parse(cls, text: str, order: int = 12) -> "GrassmannPoint":
        return parse_point(text, order)


_POINT = re.compile(r"^\s*span\s*\{(?P<body>.*)\}\s*(?:tail\s+at\s+(?P<tail>-?\d+))?\s*"
                    r"(?:\(\s*mod\s+z\s*\^\s*(?P<mod>-?\d+)\s*\))?\s*$", re.S)


def parse_point(text: str, order: int = 12) -> GrassmannPoint:
    """``span{1 + z, z^-1, ...} tail at -2 (mod z^10)``.

    ``tail at e`` means every z^k with k <= e belongs to W.  A trailing ``...``
    inside the braces is allowed and ignored.
    """
    from .parsing import parse_laurent

    m = _POINT.match(text)
    if not m:
        raise ParseError("malformed subspace", text, 0, "span{...} tail at E (mod z^K)")
    if m.group("mod"):
        order = int(m.group("mod")) - 1
    body = m.group("body").strip()
    parts = _split_top(body)
    gens = []
    offset = m.start("body")
    for part, pos in parts:
        if part.strip() in ("...", "…", ""):
            continue
        try:
            gens.append(parse_laurent(part, order))
        except ParseError as exc:
            raise ParseError(str(exc).split(" at position")[0], text, offset + pos + exc.position,
                             exc.expected) from None
    if m.group("tail") is not None:
        tail_level = -int(m.group("tail"))
    else:
        tail_level = max([-g.valuation() for g in gens] + [0]) + 1
    return GrassmannPoint(gens, tail_level, order=order)


def _split_top(body: str) -> list[tuple[str, int]]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((body[start:i], start))
            start = i + 1
    parts.append((body[start:], start))
    return parts


def fredholm_index(W: GrassmannPoint) -> int:
    return W.index()


def big_cell_member(W: GrassmannPoint) -> bool:
    return W.in_big_cell()


# Dressing


def dress(W: GrassmannPoint, weight: int = 6) -> PsiDO:
    """The operator S in 1 + E_- with S W = W0, known modulo weight > ``weight``.

    Builds T = 1 + sum P_n with T z^-n = w_n inductively: P_n = lift(t_n) x^n / c_n,
    c_n = (-1)^n n!, where t_n corrects the residual of the earlier steps; then
    S = T^-1.
    """
    if not W.in_big_cell():
        raise NotFredholmError("dressing needs a point of the big cell")
    if W.order < weight:
        raise ConfigurationError(f"subspace known to z^{W.order}, need z^{weight}")
    ring = SeriesRing(weight)
    basis = [w.truncate(weight) for w in W.normalized_basis(weight + 1)]
    total = PsiDO.zero(ring, weight)
    for n in range(weight):
        residual = sato_image(total.compose(PsiDO.d(n, ring)), order=weight - n) \
            if total.terms else TruncatedLaurent.zero(weight - n)
        target = basis[n].truncate(weight - n) - TruncatedLaurent.monomial(-n, weight - n)
        for j in range(n):
            c = residual.coeff(-j)
            if c:
                target = target + basis[j].truncate(weight - n) * c
        target = target - residual
        if any(e <= 0 for e, _ in target.items()):
            raise ConfigurationError(f"dressing step {n} produced a non-positive exponent")
        c_n = (-1) ** n * math.factorial(n)
        # the lift is a finite sum; its unknown tail only feeds weights above the bound
        lift = sato_lift(target, x_order=weight)
        lift = PsiDO(lift.terms, weight + 1, lift.ring)
        step = lift.compose(PsiDO.x(n, SeriesRing(weight)))
        step = step.scale(Fraction(1, c_n)).truncate_weight(weight)
        total = (total + step).truncate_weight(weight)
    T = PsiDO.identity(ring, weight) + total
    return T.inverse().truncate_weight(weight)


def dress_by_linear_solve(W: GrassmannPoint, weight: int = 6) -> PsiDO:
    """Reference construction of S: unknown coefficients s_{m,a} of x^a d^-m
    with a + m <= weight, fixed by requiring [z^e] S w_n = 0 for e >= 1."""
    basis = W.normalized_basis(weight + 1)
    unknowns = [(m, a) for m in range(1, weight + 1) for a in range(0, weight + 1 - m)]
    index = {u: i for i, u in enumerate(unknowns)}
    rows, rhs = [], []
    for n in range(weight):
        w = basis[n]
        for e in range(1, weight - n + 1):
            row = [Fraction(0)] * len(unknowns)
            for (m, a), i in index.items():
                for f in range(-n, e + 1):
                    # x^a d^-m . d^-f  ->  (-1)^a ff(-m-f, a) z^(a+m+f)
                    if a + m + f != e:
                        continue
                    c = w.coeff(f) if f <= w.order else 0
                    if c:
                        row[i] += c * (-1) ** a * falling_factorial(-m - f, a)
            rows.append(row)
            rhs.append(-Fraction(w.coeff(e)))
    solution = linalg.solve(rows, rhs) if unknowns else []
    ring = SeriesRing(weight)
    terms: dict[int, dict[int, Fraction]] = {0: {0: Fraction(1)}}
    for (m, a), i in index.items():
        if solution[i]:
            terms.setdefault(-m, {})[a] = solution[i]
    return PsiDO({e: TruncatedSeries.from_dict(d, weight + e) for e, d in terms.items()},
                 weight, ring)


def in_w0(v: TruncatedLaurent) -> bool:
    return all(not c for e, c in v.items() if e > 0)


def check_dressing(W: GrassmannPoint, S: PsiDO, count: int) -> list[tuple[int, TruncatedLaurent]]:
    """Images S w_n for n < count that fail to lie in W0 (empty if all pass)."""
    bad = []
    for n, w in enumerate(W.normalized_basis(count)):
        img = act_on_v(S, w)
        if not in_w0(img):
            bad.append((n, img))
    return bad


def subspace_from_operator(S_inv: PsiDO, count: int, order: int) -> GrassmannPoint:
    """S^-1 W0 as a big-cell point, from the images of z^0..z^-(count-1)."""
    gens = [act_on_v(S_inv, TruncatedLaurent.monomial(-n, CONSTANT_ORDER), order=order)
            for n in range(count)]
    order = min(g.order for g in gens)
    return GrassmannPoint([g.truncate(order) for g in gens], count, order=order)


# First-order check of the correspondence


def _dual_op(P: PsiDO, eps: PsiDO | None = None) -> PsiDO:
    """P + eps*Q as an operator with dual-number series coefficients."""
    from .series import DualScalar

    ring = SeriesRing(P.ring.order)
    terms = {}
    keys = set(P.terms) | (set(eps.terms) if eps is not None else set())
    zero = TruncatedSeries.zero(P.ring.order)
    for e in keys:
        a = P.terms.get(e, zero)
        b = eps.terms.get(e, zero) if eps is not None else zero
        n = min(a.order, b.order)
        a, b = a.truncate(n), b.truncate(n)
        size = max(len(a.coeffs), len(b.coeffs))
        cs = [DualScalar(a.coeffs[i] if i < len(a.coeffs) else 0,
                         b.coeffs[i] if i < len(b.coeffs) else 0) for i in range(size)]
        terms[e] = TruncatedSeries(cs, n)
    depth = P.depth if eps is None else min(x for x in (P.depth, eps.depth) if x is not None) \
        if (P.depth is not None or eps.depth is not None) else None
    return PsiDO(terms, depth, ring)


def _eps(P: PsiDO) -> PsiDO:
    return P.map_coefficients(lambda s: s.map(eps_part))


def _val(P: PsiDO) -> PsiDO:
    return P.map_coefficients(lambda s: s.map(value_part))


def verify_first_order_flows(S: PsiDO, A: PsiDO, n: int, generators: int = 4) -> Report:
    """First-order checks of the flows on both sides of the correspondence."""
    rep = Report(f"first-order correspondence checks, n = {n}")
    ring = S.ring
    d = PsiDO.d(1, ring)
    S_inv = S.inverse()
    L = S.compose(d).compose(S_inv)

    # (a) R d R^-1 = L + eps [A S^-1, L]
    R = _dual_op(S, A)
    R_inv = R.inverse()
    RdR = R.compose(_dual_op(d)).compose(R_inv)
    expected = A.compose(S_inv).commutator(L)
    diff_a = _eps(RdR).difference_report(expected)
    rep.add("(a) eps-part of R d R^-1 = [A S^-1, L]", diff_a or "equal", ok=diff_a is None)
    diff_l = _val(RdR).difference_report(L)
    rep.add("value part of R d R^-1 = L", diff_l or "equal", ok=diff_l is None)

    # (b) the distinguished tangent vector gives KP_n
    Ln = L.power(n)
    A_n = -(Ln.minus().compose(S))
    R = _dual_op(S, A_n)
    RdR = R.compose(_dual_op(d)).compose(R.inverse())
    kp = Ln.plus().commutator(L)
    diff_b = _eps(RdR).difference_report(kp)
    rep.add(f"(b) A = -(L^{n})_- S gives eps-part = [(L^{n})_+, L]", diff_b or "equal",
            ok=diff_b is None)
    positive = [e for e, c in kp.terms.items() if e >= 0 and not c.is_zero()]
    rep.add(f"KP_{n} has only negative powers", "yes" if not positive else f"no: {positive}",
            ok=not positive)

    # (c) on W = S^-1 W0 the field acts as multiplication by z^-n modulo W
    ok_c, checked = tangent_matches_shift(S, A_n, n, generators)
    conj_plus = S_inv.compose(Ln.plus()).compose(S)
    order = max(1, (S.depth or 0) - n)
    ok_v = all(
        in_w0(act_on_v(S, act_on_v(conj_plus, w)))
        for w in (act_on_v(S_inv, TruncatedLaurent.monomial(-j, CONSTANT_ORDER),
                           order=order + n + generators) for j in range(generators)))
    rep.add(f"(c) field acts as z^-{n} modulo W on {generators} generators",
            f"{'yes' if ok_c else 'no'} ({checked} coefficients checked)", ok=ok_c)
    rep.add("S^-1 (L^n)_+ S maps W into W", "yes" if ok_v else "no", ok=ok_v)
    rep.data.update({"n": n, "depth": S.depth, "generators": generators})
    return rep


def tangent_matches_shift(S: PsiDO, A: PsiDO, n: int, generators: int = 4) -> tuple[bool, int]:
    """Whether w -> -S^-1 A w agrees with w -> z^-n w modulo W = S^-1 W0 on the
    first generators of W, and how many coefficients the test actually saw."""
    S_inv = S.inverse()
    order = max(1, (S.depth or 0) - n)
    tangent = -(S_inv.compose(A))
    ok, checked = True, 0
    for j in range(generators):
        w = act_on_v(S_inv, TruncatedLaurent.monomial(-j, CONSTANT_ORDER), order=order + n + generators)
        moved = act_on_v(tangent, w)
        shifted = w.shift(-n)
        k = min(moved.order, shifted.order)
        image = act_on_v(S, moved.truncate(k) - shifted.truncate(k))
        checked += max(0, image.order)
        ok = ok and in_w0(image)
    return ok and checked > 0, checked


# Determinant lines


@dataclass
class DetLine:
    """A basis of W intersect V_n (V_n = z^-n k[[z]]); the line is its wedge."""

    level: int
    vectors: list[TruncatedLaurent]
    order: int
    scale: Fraction = Fraction(1)

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def matrix(self, hi: int | None = None) -> list[list[Fraction]]:
        hi = self.order if hi is None else hi
        return _vectors(self.vectors, -self.level, hi)

    def plucker(self, columns: Sequence[int]) -> Fraction:
        """The Plucker coordinate at the exponents ``columns`` (scale included)."""
        rows = [[Fraction(value_part(v.coeff(e))) for e in columns] for v in self.vectors]
        return self.scale * linalg.det(rows)

    def coordinates(self) -> dict[tuple[int, ...], Fraction]:
        """All nonzero Plucker coordinates on the retained exponent window."""
        from itertools import combinations

        exps = range(-self.level, self.order + 1)
        out = {}
        for cols in combinations(exps, self.rank):
            c = self.plucker(cols)
            if c:
                out[tuple(cols)] = c
        return out


def det_line(W: GrassmannPoint, level: int) -> DetLine:
    """Basis of W intersect V_level, reduced so that leading exponents are distinct."""
    k = W.index()
    basis = W.intersection_basis(-level)
    if len(basis) != k + level:
        raise NotFredholmError(
            f"level {level} is unstable: dim W cap V_n = {len(basis)}, expected {k + level}; "
            "use a larger level")
    return DetLine(level, basis, min(b.order for b in basis) if basis else W.order)


def stabilize(line: DetLine) -> tuple[DetLine, Fraction]:
    """The map wedge^(m+1)(W cap V_(n+1)) -> wedge^m(W cap V_n) (x) (V_(n+1)/V_n).

    Returns the level-n wedge and the coefficient of the class of z^-(n+1).
    Vectors are first combined so that exactly one lies outside V_n (this does
    not change the wedge), then the sign (-1)^(m-i) is applied.
    """
    n = line.level - 1
    e = -(n + 1)
    lam = [Fraction(value_part(v.coeff(e))) for v in line.vectors]
    pivot = next((i for i, c in enumerate(lam) if c), None)
    if pivot is None:
        raise NotFredholmError("all vectors already lie in the smaller subspace")
    rest = []
    for i, v in enumerate(line.vectors):
        if i == pivot:
            continue
        if lam[i]:
            v = v - line.vectors[pivot] * (lam[i] / lam[pivot])
        rest.append(v)
    return single_exception_map(rest[:pivot] + [line.vectors[pivot]] + rest[pivot:], n, line.order,
                                line.scale)


def single_exception_map(vectors: Sequence[TruncatedLaurent], n: int, order: int,
                         scale: Fraction = Fraction(1)) -> tuple[DetLine, Fraction]:
    """Apply the rule: v_1 ^ ... ^ v_(m+1) -> (-1)^(m-i) v_1 ^ ..^v_i^.. (x) [v_i]
    when only v_i lies outside V_n, zero if none or several do (1-based i, m+1
    vectors)."""
    e = -(n + 1)
    outside = [i for i, v in enumerate(vectors) if value_part(v.coeff(e))]
    m = len(vectors) - 1
    if len(outside) != 1:
        return DetLine(n, [v for v in vectors], order, Fraction(0)), Fraction(0)
    i = outside[0] + 1
    sign = (-1) ** (m - i)
    lam = Fraction(value_part(vectors[i - 1].coeff(e)))
    rest = [v for j, v in enumerate(vectors) if j != i - 1]
    for v in rest:
        if v.valuation() < -n:
            raise ConfigurationError("vector outside V_(n+1)")
    return DetLine(n, rest, order, scale), sign * lam


def wedge_ratio(a: DetLine, b: DetLine) -> Fraction | None:
    """c with wedge(a) = c * wedge(b), or None if they span different spaces."""
    if a.rank != b.rank or a.level != b.level:
        return None
    order = min(a.order, b.order)
    ma, mb = a.matrix(order), b.matrix(order)
    if linalg.rank(ma + mb) != linalg.rank(mb) or linalg.rank(ma) != linalg.rank(mb):
        return None
    _, pivots = linalg.rref(mb)
    pa = [[r[p] for p in pivots] for r in ma]
    pb = [[r[p] for p in pivots] for r in mb]
    return a.scale * linalg.det(pa) / (b.scale * linalg.det(pb))


def check_stabilization(W: GrassmannPoint, level: int) -> Report:
    """detLine(level+2) -> level+1 -> level agrees with detLine at each level."""
    rep = Report(f"determinant line stabilization from level {level + 2} to {level}")
    lines = [det_line(W, level + t) for t in range(3)]
    k = W.index()
    rep.add("index from levels", f"{lines[0].rank - level}", ok=lines[0].rank - level == k)
    for t in (2, 1):
        down, factor = stabilize(lines[t])
        ratio = wedge_ratio(down, lines[t - 1])
        good = ratio is not None and ratio != 0 and factor != 0
        rep.add(f"level {level + t} -> {level + t - 1}",
                f"factor {factor}, ratio {ratio}", ok=good)
    twice, f1 = stabilize(lines[2])
    twice2, f2 = stabilize(DetLine(twice.level, twice.vectors, twice.order, twice.scale))
    ratio = wedge_ratio(twice2, lines[0])
    rep.add("composite", f"factors {f1}, {f2}, ratio {ratio}",
            ok=ratio is not None and ratio != 0)
    return rep


def unit_multiply_index(W: GrassmannPoint, unit: TruncatedSeries) -> int:
    """Index of u W for a unit u of k[[z]]."""
    if not unit.constant_term():
        raise NonUnitError("not a unit of k[[z]]")
    f = TruncatedLaurent.from_series(unit.truncate(min(unit.order, W.order)))
    return W.multiply(f).index()
