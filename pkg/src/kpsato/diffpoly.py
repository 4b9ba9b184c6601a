"""Differential polynomials in u_1, u_2, ... and their x-derivatives.

A ``DiffVar`` is u_m^(k), optionally tagged with formal time derivatives
(``u1_y`` stands for the t_2-derivative of u_1, ``u1_t`` for t_3).  Tagged
variables are opaque symbols until ``resolve_tags`` expands them through
evolution equations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import ConfigurationError, TruncationBudgetError
from .series import align, as_fraction, format_terms

_TAG_NAMES = {2: "y", 3: "t"}
_TAG_TOKEN = re.compile(r"t\d+|y|t")
_VAR = re.compile(r"u(\d+)(?:_([a-z0-9]+))?('*)$")


def tag_name(n: int) -> str:
    return _TAG_NAMES.get(n, f"t{n}")


def parse_tags(text: str) -> tuple[int, ...]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TAG_TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad time tag {text!r}")
        tok = m.group(0)
        out.append(2 if tok == "y" else 3 if tok == "t" else int(tok[1:]))
        pos = m.end()
    return tuple(sorted(out))


@dataclass(frozen=True, order=True)
class DiffVar:
    """u_m differentiated k times in x and once in each listed time."""

    m: int
    k: int = 0
    times: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.m < 1 or self.k < 0:
            raise ValueError(f"invalid variable u{self.m} with derivative order {self.k}")
        object.__setattr__(self, "times", tuple(sorted(self.times)))

    def derived(self, extra: int = 1) -> "DiffVar":
        return DiffVar(self.m, self.k + extra, self.times)

    def tagged(self, n: int) -> "DiffVar":
        return DiffVar(self.m, self.k, self.times + (n,))

    def __str__(self):
        tags = "".join(tag_name(n) for n in self.times)
        return f"u{self.m}" + (f"_{tags}" if tags else "") + "'" * self.k

    @classmethod
    def parse(cls, text: str) -> "DiffVar":
        m = _VAR.match(text)
        if not m:
            raise ValueError(f"not a differential variable: {text!r}")
        times = parse_tags(m.group(2)) if m.group(2) else ()
        return cls(int(m.group(1)), len(m.group(3)), times)


Monomial = tuple  # sorted tuple of (DiffVar, exponent)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    powers = dict(a)
    for v, e in b:
        powers[v] = powers.get(v, 0) + e
    return tuple(sorted(powers.items()))


def _mono_key(mono: Monomial):
    degree = sum(e for _, e in mono)
    return (degree, tuple((v.m, v.k, v.times, e) for v, e in mono))


def _mono_text(mono: Monomial) -> str:
    parts = []
    for v, e in mono:
        parts.append(str(v) if e == 1 else f"{v}^{e}")
    return "*".join(parts)


class DiffPoly:
    """A polynomial with rational coefficients in the variables u_m^(k)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = as_fraction(c)
            if c:
                clean[mono] = c
        self.terms: dict[Monomial, Fraction] = clean

    @classmethod
    def constant(cls, c) -> "DiffPoly":
        return cls({(): c})

    @classmethod
    def zero(cls) -> "DiffPoly":
        return cls()

    @classmethod
    def one(cls) -> "DiffPoly":
        return cls({(): 1})

    @classmethod
    def var(cls, m, k: int = 0, times: tuple[int, ...] = ()) -> "DiffPoly":
        v = m if isinstance(m, DiffVar) else DiffVar(m, k, times)
        return cls({((v, 1),): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(mono == () for mono in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables(self) -> set[DiffVar]:
        return {v for mono in self.terms for v, _ in mono}

    def degree(self) -> int:
        return max((sum(e for _, e in mono) for mono in self.terms), default=0)

    # arithmetic
    @staticmethod
    def _wrap(other):
        if isinstance(other, DiffPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return DiffPoly.constant(other)
        return None

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for mono, c in o.terms.items():
            out[mono] = out.get(mono, 0) + c
        return DiffPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly({mono: -c for mono, c in self.terms.items()})

    def __sub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return DiffPoly({mono: c * other for mono, c in self.terms.items()})
        if not isinstance(other, DiffPoly):
            return NotImplemented
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = _mono_mul(ma, mb)
                out[mono] = out.get(mono, 0) + ca * cb
        return DiffPoly(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / as_fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a differential polynomial")
        result = DiffPoly.one()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # derivations
    def _apply_derivation(self, image: Callable[[DiffVar], "DiffPoly"]) -> "DiffPoly":
        """Extend ``var -> image(var)`` to the whole ring by the Leibniz rule."""
        out = DiffPoly()
        cache: dict[DiffVar, DiffPoly] = {}
        for mono, c in self.terms.items():
            for idx, (v, e) in enumerate(mono):
                if v not in cache:
                    cache[v] = image(v)
                dv = cache[v]
                if dv.is_zero():
                    continue
                rest = list(mono)
                if e == 1:
                    rest.pop(idx)
                else:
                    rest[idx] = (v, e - 1)
                out = out + DiffPoly({tuple(rest): c * e}) * dv
        return out

    def deriv(self) -> "DiffPoly":
        """Total x-derivative: u_m^(k) -> u_m^(k+1), extended by Leibniz."""
        out: dict = {}
        for mono, c in self.terms.items():
            for idx, (v, e) in enumerate(mono):
                powers = dict(mono)
                if e == 1:
                    del powers[v]
                else:
                    powers[v] = e - 1
                dv = v.derived()
                powers[dv] = powers.get(dv, 0) + 1
                key = tuple(sorted(powers.items()))
                out[key] = out.get(key, 0) + c * e
        return DiffPoly(out)

    total_deriv = deriv

    def nth_deriv(self, n: int) -> "DiffPoly":
        p = self
        for _ in range(n):
            p = p.deriv()
        return p

    def tag(self, n: int) -> "DiffPoly":
        """Formal t_n-derivative: every variable gains the tag n."""
        return self._apply_derivation(lambda v: DiffPoly.var(v.tagged(n)))

    def time_derivative(self, flow: Mapping[int, "DiffPoly"]) -> "DiffPoly":
        """Apply d/dt_n given ``flow[m] = d u_m / dt_n`` (untagged variables only)."""
        def image(v: DiffVar) -> DiffPoly:
            if v.times:
                raise ConfigurationError(f"tagged variable {v} must be resolved first")
            if v.m not in flow:
                raise TruncationBudgetError(
                    f"no evolution equation available for u{v.m}; increase the depth",
                    required=v.m)
            return flow[v.m].nth_deriv(v.k)
        return self._apply_derivation(image)

    def resolve_tags(self, flows: Mapping[int, Mapping[int, "DiffPoly"]]) -> "DiffPoly":
        """Expand tagged variables using ``flows[n][m] = d u_m / dt_n``."""
        cache: dict[DiffVar, DiffPoly] = {}

        def expand(v: DiffVar) -> DiffPoly:
            if v not in cache:
                base = DiffPoly.var(v.m)
                for n in v.times:
                    if n not in flows:
                        raise TruncationBudgetError(f"no flow for time t{n}", required=None)
                    base = base.time_derivative(flows[n])
                cache[v] = base.nth_deriv(v.k)
            return cache[v]

        bindings = {v: expand(v) for v in self.variables() if v.times}
        return self._replace(lambda v: bindings.get(v))

    def _replace(self, lookup: Callable[[DiffVar], "DiffPoly | None"]) -> "DiffPoly":
        out = DiffPoly()
        powers_cache: dict = {}
        for mono, c in self.terms.items():
            term = DiffPoly.constant(c)
            kept = []
            for v, e in mono:
                rep = lookup(v)
                if rep is None:
                    kept.append((v, e))
                    continue
                key = (v, e)
                if key not in powers_cache:
                    powers_cache[key] = rep ** e
                term = term * powers_cache[key]
            if kept:
                term = term * DiffPoly({tuple(kept): 1})
            out = out + term
        return out

    def substitute(self, bindings: Mapping[DiffVar, object]) -> "DiffPoly":
        """Replace bound variables; derivatives of a bound variable use the
        total derivative of its binding.  Circular bindings are rejected."""
        binds: dict[DiffVar, DiffPoly] = {}
        for key, value in bindings.items():
            if not isinstance(key, DiffVar):
                key = DiffVar.parse(str(key)) if isinstance(key, str) else DiffVar(int(key))
            value = value if isinstance(value, DiffPoly) else DiffPoly.constant(value)
            if value == DiffPoly.var(key):
                continue
            binds[key] = value

        def covering(v: DiffVar) -> DiffVar | None:
            best = None
            for key in binds:
                if key.m == v.m and key.times == v.times and key.k <= v.k:
                    if best is None or key.k > best.k:
                        best = key
            return best

        for key, value in binds.items():
            for v in value.variables():
                if covering(v) is not None:
                    raise ConfigurationError(
                        f"circular binding: {key} -> {value} mentions bound variable {v}")

        def lookup(v: DiffVar):
            key = covering(v)
            if key is None:
                return None
            return binds[key].nth_deriv(v.k - key.k)

        return self._replace(lookup)

    def linear_part(self, v: DiffVar) -> tuple["DiffPoly", "DiffPoly"]:
        """Split self = coefficient * v + rest with v absent from both parts."""
        coef: dict = {}
        rest: dict = {}
        for mono, c in self.terms.items():
            powers = dict(mono)
            e = powers.get(v, 0)
            if e == 0:
                rest[mono] = c
            elif e == 1:
                del powers[v]
                coef[tuple(sorted(powers.items()))] = c
            else:
                raise ConfigurationError(f"{v} appears nonlinearly")
        coef_p = DiffPoly(coef)
        if v in coef_p.variables():
            raise ConfigurationError(f"{v} appears nonlinearly")
        return coef_p, DiffPoly(rest)

    def solve_for(self, v: DiffVar) -> "DiffPoly":
        """Solve self = 0 for v, which must occur linearly with constant coefficient."""
        coef, rest = self.linear_part(v)
        if coef.is_zero() or not coef.is_constant():
            raise ConfigurationError(f"cannot solve for {v}: coefficient {coef}")
        return -rest / coef.constant_term()

    def evaluate(self, values: Mapping[int, object], order: int | None = None):
        """Substitute ring elements for u_1, u_2, ... (x-derivatives via ``deriv``)."""
        derivs: dict[DiffVar, object] = {}
        result = None
        for mono, c in sorted(self.terms.items(), key=lambda t: _mono_key(t[0])):
            term = None
            for v, e in mono:
                if v.times:
                    raise ConfigurationError(f"tagged variable {v} cannot be evaluated")
                if v not in derivs:
                    if v.m not in values:
                        raise KeyError(f"no value for u{v.m}")
                    val = values[v.m]
                    for _ in range(v.k):
                        val = val.deriv()
                    derivs[v] = val
                for _ in range(e):
                    term = derivs[v] if term is None else _mul(term, derivs[v])
            if term is None:
                term = c
            else:
                term = term * c
            result = term if result is None else _add(result, term)
        if result is None:
            result = Fraction(0)
        if order is not None and not hasattr(result, "order"):
            from .series import TruncatedSeries
            result = TruncatedSeries.constant(result, order)
        return result

    # text
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _mono_key(t[0]))

    def __str__(self):
        return format_terms((c, _mono_text(mono)) for mono, c in self.sorted_terms())

    def __repr__(self):
        return f"DiffPoly({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "DiffPoly":
        from .parsing import evaluate

        def symbol(name, exp):
            v = DiffVar.parse(name)
            if exp < 0:
                raise ValueError("negative power of a differential variable")
            return cls.var(v) ** exp

        return evaluate(text, cls.constant, symbol)


def _add(a, b):
    if hasattr(a, "order") and hasattr(b, "order"):
        a, b = align(a, b)
    return a + b


def _mul(a, b):
    if hasattr(a, "order") and hasattr(b, "order"):
        a, b = align(a, b)
    return a * b


def u(m: int, k: int = 0) -> DiffPoly:
    """Shorthand for the differential polynomial u_m^(k)."""
    return DiffPoly.var(m, k)


@dataclass(frozen=True)
class EvolutionEquation:
    """The flow d u_m / d t_n = rhs."""

    time_index: int
    target: DiffVar
    rhs: DiffPoly

    def __post_init__(self):
        if self.target.k != 0 or self.target.times:
            raise ValueError("evolution target must be an underived generator")

    @property
    def lhs(self) -> DiffVar:
        return self.target.tagged(self.time_index)

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


def flows_from(equations: Iterable[EvolutionEquation]) -> dict[int, dict[int, DiffPoly]]:
    """Group equations into ``flows[n][m]``."""
    out: dict[int, dict[int, DiffPoly]] = {}
    for eq in equations:
        out.setdefault(eq.time_index, {})[eq.target.m] = eq.rhs
    return out
