"""Curve data as subspaces of k((z)) and the checks attached to them.

A curve with a smooth point is entered through its affine ring A and a module
W, both as eventually standard subspaces of k((z)) (``GrassmannPoint``).  With
s = z^-1 the built-in rings are subrings of k[s] cut out by linear conditions
on polynomials (evaluations, derivatives), which keeps every basis exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import linalg
from .errors import ConfigurationError, TruncationBudgetError
from .grassmann import GrassmannPoint, _vectors, det_line, parse_point
from .report import Report
from .series import TruncatedLaurent, as_fraction

# A linear functional on k[s], given by its values on the monomials s^k.
Functional = Callable[[int], Fraction]


def evaluation(*terms: tuple) -> Functional:
    """f -> sum_j c_j f(p_j) for pairs (p_j, c_j)."""
    pairs = [(as_fraction(p), as_fraction(c)) for p, c in terms]
    return lambda k: sum((c * p ** k for p, c in pairs), Fraction(0))


def derivative_at(point, order: int) -> Functional:
    """f -> f^(order)(point)."""
    p = as_fraction(point)

    def value(k: int) -> Fraction:
        if k < order:
            return Fraction(0)
        ff = 1
        for i in range(order):
            ff *= k - i
        return ff * p ** (k - order)

    return value


def polynomial_subspace(conditions: Sequence[Functional], order: int, search: int = 64) -> GrassmannPoint:
    """{f in k[s] : every condition vanishes on f}, s = z^-1, as a point of Gr.

    A set of correction degrees is chosen greedily so that each basis element
    is s^n minus a combination of those degrees.
    """
    corr: list[int] = []
    conds = list(conditions)
    rank_needed = linalg.rank([[c(k) for k in range(search)] for c in conds]) if conds else 0
    for k in range(search):
        if len(corr) == rank_needed:
            break
        trial = corr + [k]
        m = [[c(d) for d in trial] for c in conds]
        if linalg.rank(m) == len(trial):
            corr = trial
    if len(corr) != rank_needed:
        raise ConfigurationError("conditions do not become independent on low degrees")
    # keep a maximal independent set of conditions
    keep: list[int] = []
    for i in range(len(conds)):
        if linalg.rank([[conds[j](d) for d in corr] for j in keep + [i]]) == len(keep) + 1:
            keep.append(i)
    square = [[conds[i](d) for d in corr] for i in keep]

    def element(n: int) -> TruncatedLaurent:
        coeffs = {-n: Fraction(1)}
        if corr:
            rhs = [-conds[i](n) for i in keep]
            sol = linalg.solve(square, rhs)
            for d, c in zip(corr, sol):
                if c:
                    coeffs[-d] = coeffs.get(-d, Fraction(0)) + c
        return TruncatedLaurent.from_dict(coeffs, order)

    top = max(corr, default=-1) + 1
    gens = [element(n) for n in range(top) if n not in corr]
    return GrassmannPoint(gens, top, tail=element if corr else None, order=order)


@dataclass
class CurveData:
    """Affine ring A and module W of a curve with a point, inside k((z))."""

    name: str
    A: GrassmannPoint
    W: GrassmannPoint
    genus: int
    module_h: tuple[int, int] | None = None
    description: str = ""
    notes: dict = field(default_factory=dict)

    def a_basis(self, pole_order: int) -> list[TruncatedLaurent]:
        return [e for e in self.A.window(pole_order) if -e.valuation() <= pole_order]

    def w_basis(self, pole_order: int) -> list[TruncatedLaurent]:
        return [e for e in self.W.window(pole_order) if -e.valuation() <= pole_order]


def projective_line(order: int = 64) -> CurveData:
    A = polynomial_subspace([], order)
    return CurveData("projective-line", A, A, 0, description="A = k[z^-1]")


def cuspidal_cubic(order: int = 64) -> CurveData:
    A = polynomial_subspace([derivative_at(0, 1)], order)
    return CurveData("cuspidal-cubic", A, A, 1, description="A = span{1, z^-2, z^-3, ...}")


def nodal_cubic(order: int = 64) -> CurveData:
    A = polynomial_subspace([evaluation((1, 1), (-1, -1))], order)
    return CurveData("nodal-cubic", A, A, 1, description="A = {f in k[s] : f(1) = f(-1)}, s = z^-1")


def nodal_twisted(order: int = 64, twist=2) -> CurveData:
    """Nodal cubic with W = {f : f(1) = twist * f(-1)}, a degree-0 line bundle."""
    A = polynomial_subspace([evaluation((1, 1), (-1, -1))], order)
    W = polynomial_subspace([evaluation((1, 1), (-1, -as_fraction(twist)))], order)
    h = (1, 1) if as_fraction(twist) == 1 else (0, 0)
    return CurveData("nodal-twisted", A, W, 1, module_h=h,
                     description=f"W = {{f : f(1) = {twist} f(-1)}}")


EXAMPLES: dict[str, Callable[..., CurveData]] = {
    "projective-line": projective_line,
    "cuspidal-cubic": cuspidal_cubic,
    "nodal-cubic": nodal_cubic,
    "nodal-twisted": nodal_twisted,
}


def example(name: str, order: int = 64) -> CurveData:
    try:
        return EXAMPLES[name](order)
    except KeyError:
        raise ConfigurationError(f"unknown curve example {name!r}; choose from {sorted(EXAMPLES)}") from None


def _conditions_from_json(items: list) -> list[Functional]:
    out = []
    for item in items:
        if "eval" in item:
            out.append(evaluation(*[tuple(p) for p in item["eval"]]))
        elif "derivative" in item:
            point, k = item["derivative"]
            out.append(derivative_at(point, int(k)))
        else:
            raise ConfigurationError(f"unknown condition {item!r}; use 'eval' or 'derivative'")
    return out


def _space_from_json(value, order: int) -> GrassmannPoint:
    if isinstance(value, str):
        return parse_point(value, order)
    if isinstance(value, dict) and "conditions" in value:
        return polynomial_subspace(_conditions_from_json(value["conditions"]), order)
    raise ConfigurationError("a space is a 'span{...}' string or {'conditions': [...]}")


def curve_from_json(text: str, order: int = 64) -> CurveData:
    """User curve data: {"name", "A", "W" (optional), "genus"}; A and W are
    subspace strings or condition lists."""
    data = json.loads(text)
    try:
        A = _space_from_json(data["A"], order)
        genus = int(data["genus"])
    except KeyError as exc:
        raise ConfigurationError(f"curve data needs the field {exc.args[0]!r}") from None
    W = _space_from_json(data["W"], order) if "W" in data else A
    return CurveData(str(data.get("name", "user")), A, W, genus)


# Checks


def _required_order(pole_order: int) -> int:
    return 2 * pole_order + 2


def verify_ring_closure(c: CurveData, window: int = 20) -> Report:
    """A*A in A and A*W in W for basis elements with pole order <= window."""
    rep = Report(f"ring and module closure for {c.name}, window {window}")
    need = _required_order(window)
    if min(c.A.order, c.W.order) < need:
        raise TruncationBudgetError(
            f"window {window} needs series known to z^{need}; have z^{min(c.A.order, c.W.order)}",
            required=need)
    A = c.a_basis(window)
    Wb = c.w_basis(window)
    for label, left, right, target in (("A*A in A", A, A, c.A), ("A*W in W", A, Wb, c.W)):
        bad = None
        count = 0
        for i, a in enumerate(left):
            for j, b in enumerate(right):
                if left is right and j < i:
                    continue
                count += 1
                if not target.contains(a * b):
                    bad = (a, b)
                    break
            if bad:
                break
        text = f"{count} products" if bad is None else \
            f"({bad[0].format(with_order=False)}) * ({bad[1].format(with_order=False)}) leaves the span"
        rep.add(label, text, ok=bad is None)
    return rep


def cohomology(W: GrassmannPoint, depth: int | None = None) -> tuple[int, int]:
    """(dim ker, dim coker) of W + k[[z]] -> k((z)), stable under doubling the window."""
    d = max(W._window_depth(), depth or 0)
    first = W.kernel_cokernel(d)
    second = W.kernel_cokernel(2 * d)
    h = (len(first[0]), len(first[1]))
    if h != (len(second[0]), len(second[1])):
        raise TruncationBudgetError(
            f"cohomology changes between windows {d} and {2 * d}", required=4 * d)
    return h


def curve_cohomology(c: CurveData) -> dict[str, tuple[int, int]]:
    return {"A": cohomology(c.A), "W": cohomology(c.W)}


def index_from_levels(W: GrassmannPoint, extra: int = 2) -> int:
    """k with dim(W cap z^-n k[[z]]) = k + n, read off at a stable level."""
    n = W._window_depth() + extra
    return len(W.intersection_basis(-n)) - n


class _Quotient:
    """Coordinates of V/W on the exponents lo..hi (W window rows in RREF)."""

    def __init__(self, W: GrassmannPoint, lo: int, hi: int):
        self.lo, self.hi = lo, hi
        rows = _vectors(W.window(-lo), lo, hi)
        self.rows, self.pivots = linalg.rref(rows)
        self.free = [p for p in range(hi - lo + 1) if p not in set(self.pivots)]

    def __call__(self, v: TruncatedLaurent) -> list[Fraction]:
        if v.order < self.hi:
            raise TruncationBudgetError(f"vector known to z^{v.order}, need z^{self.hi}", required=self.hi)
        if not v.is_zero() and v.valuation() < self.lo:
            raise TruncationBudgetError(f"vector has pole order {-v.valuation()} below the window",
                                        required=-v.valuation())
        vec = _vectors([v], self.lo, self.hi)[0]
        for row, p in zip(self.rows, self.pivots):
            c = vec[p]
            if c:
                vec = [a - c * b for a, b in zip(vec, row)]
        return [vec[p] for p in self.free]


def stabilizer_algebra(W: GrassmannPoint, window: int = 10, positive: int | None = None) -> list[TruncatedLaurent]:
    """Basis of {f : f W in W} among f = sum_{e=-window}^{positive} f_e z^e.

    Every element of W with pole order up to depth(W) + window is tested and
    products are compared on the exponents that are known exactly.
    """
    positive = window if positive is None else positive
    depth = W._window_depth() + window
    hi = W.order - window
    if hi < positive + 1:
        raise TruncationBudgetError(
            f"stabilizer on window {window} needs W known to z^{positive + 1 + window}",
            required=positive + 1 + window)
    quotient = _Quotient(W, -(depth + window), hi)
    exps = list(range(-window, positive + 1))
    elems = [e for e in W.window(depth)]
    rows: list[list[Fraction]] = []
    for w in elems:
        w = w.truncate(min(w.order, W.order))
        images = [quotient(w.shift(e).truncate(hi)) for e in exps]
        for k in range(len(quotient.free)):
            row = [img[k] for img in images]
            if any(row):
                rows.append(row)
        rows, _ = linalg.rref(rows) if rows else ([], [])
    null = linalg.nullspace(rows, len(exps)) if rows else \
        [[Fraction(int(i == j)) for j in range(len(exps))] for i in range(len(exps))]
    # present with distinct leading exponents, lowest first
    reduced, _ = linalg.rref(null) if null else ([], [])
    return [TruncatedLaurent.from_dict({e: c for e, c in zip(exps, r) if c}, positive)
            for r in reduced]


def same_span(a: Sequence[TruncatedLaurent], b: Sequence[TruncatedLaurent], lo: int, hi: int) -> bool:
    ra = _vectors(a, lo, hi)
    rb = _vectors(b, lo, hi)
    return linalg.rank(ra) == linalg.rank(rb) == linalg.rank(ra + rb)


@dataclass
class FiltrationProfile:
    """dims[n] = dim(A cap z^n k[[z]])."""

    dims: dict[int, int]

    def graded(self) -> dict[int, int]:
        """dim A(n) / A(n+1) for consecutive levels in the window."""
        keys = sorted(self.dims)
        return {n: self.dims[n] - self.dims[n + 1] for n in keys if n + 1 in self.dims}

    def gaps(self) -> list[int]:
        """Pole orders m >= 1 for which no element of A has exactly that pole."""
        g = self.graded()
        return [-n for n in sorted(g, reverse=True) if n <= -1 and g[n] == 0]


def filtration_profile(c: CurveData | GrassmannPoint, window: int = 20) -> FiltrationProfile:
    W = c.A if isinstance(c, CurveData) else c
    return FiltrationProfile({n: len(W.intersection_basis(n)) for n in range(-window, 2)})


def check_curve(c: CurveData, window: int = 20) -> Report:
    """All desk-scale checks for one curve."""
    rep = Report(f"curve {c.name}: {c.description}")
    closure = verify_ring_closure(c, window)
    for s in closure.steps:
        rep.add(s.label, s.text, ok=s.ok)
    h = cohomology(c.A)
    rep.add("(h0, h1) of A", h, ok=h == (1, c.genus))
    hw = cohomology(c.W)
    expected_w = c.module_h if c.module_h is not None else (1, c.genus)
    rep.add("(h0, h1) of W", hw, ok=hw == expected_w)
    k = index_from_levels(c.A)
    rep.add("index from dim(A cap V_n) - n", k, ok=k == h[0] - h[1] == c.A.index())
    det = det_line(c.A, c.A._window_depth() + 1)
    rep.add("determinant-line rank at a stable level", det.rank, ok=det.rank - det.level == k)
    profile = filtration_profile(c, window)
    rep.add("dim A(1)", profile.dims[1], ok=profile.dims[1] == 0)
    increasing = all(profile.dims[n] >= profile.dims[n + 1] for n in range(-window, 1))
    rep.add("filtration dims non-increasing", increasing, ok=increasing)
    rep.add("Weierstrass gaps", profile.gaps() or "none", ok=len(profile.gaps()) == c.genus)
    stab_window = min(window, 8)
    stab = stabilizer_algebra(c.W, stab_window)
    declared = c.a_basis(stab_window)
    recovered = same_span(stab, declared, -stab_window, 0) and len(stab) == len(declared)
    rep.add("stabilizer algebra of W equals A on the window", f"{len(stab)} basis elements",
            ok=recovered)
    rep.data.update({"name": c.name, "genus": c.genus, "h_A": list(h), "h_W": list(hw),
                     "gaps": profile.gaps(),
                     "profile": {str(n): d for n, d in sorted(profile.dims.items())}})
    return rep
