"""Exact scalars and truncated one-variable series.

Three value types live here:

* ``DualScalar``: a + b*eps with eps**2 = 0, for first-order deformation checks.
* ``TruncatedSeries``: power series in x known modulo x**(order+1).
* ``TruncatedLaurent``: Laurent series in z known modulo z**(order+1).

Coefficients are ``Fraction`` or ``DualScalar``.  Binary operations between
series demand equal truncation orders; use ``truncate`` to align explicitly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import ConfigurationError, NonUnitError

Number = (int, Fraction)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def _coerce(value):
    if isinstance(value, (Fraction, DualScalar)):
        return value
    return as_fraction(value)


class DualScalar:
    """An element value + eps_part * eps of Q[eps]/(eps^2)."""

    __slots__ = ("value", "eps")

    def __init__(self, value=0, eps=0):
        self.value = as_fraction(value)
        self.eps = as_fraction(eps)

    @staticmethod
    def lift(other) -> "DualScalar":
        if isinstance(other, DualScalar):
            return other
        return DualScalar(as_fraction(other), 0)

    def __add__(self, other):
        if not isinstance(other, (DualScalar, int, Fraction)):
            return NotImplemented
        o = DualScalar.lift(other)
        return DualScalar(self.value + o.value, self.eps + o.eps)

    __radd__ = __add__

    def __neg__(self):
        return DualScalar(-self.value, -self.eps)

    def __sub__(self, other):
        if not isinstance(other, (DualScalar, int, Fraction)):
            return NotImplemented
        o = DualScalar.lift(other)
        return DualScalar(self.value - o.value, self.eps - o.eps)

    def __rsub__(self, other):
        return DualScalar.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, (DualScalar, int, Fraction)):
            return NotImplemented
        o = DualScalar.lift(other)
        return DualScalar(self.value * o.value, self.value * o.eps + self.eps * o.value)

    __rmul__ = __mul__

    def inverse(self) -> "DualScalar":
        if self.value == 0:
            raise NonUnitError("dual number with zero value part is not invertible")
        inv = 1 / self.value
        return DualScalar(inv, -self.eps * inv * inv)

    def __truediv__(self, other):
        if not isinstance(other, (DualScalar, int, Fraction)):
            return NotImplemented
        return self * DualScalar.lift(other).inverse()

    def __rtruediv__(self, other):
        return DualScalar.lift(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.eps == 0 and self.value == other
        if isinstance(other, DualScalar):
            return self.value == other.value and self.eps == other.eps
        return NotImplemented

    def __hash__(self):
        if self.eps == 0:
            return hash(self.value)
        return hash((self.value, self.eps))

    def __bool__(self):
        return bool(self.value) or bool(self.eps)

    def __repr__(self):
        return f"DualScalar({self.value}, {self.eps})"

    def __str__(self):
        if self.eps == 0:
            return str(self.value)
        return f"({self.value} + {self.eps}*eps)"


def value_part(c):
    return c.value if isinstance(c, DualScalar) else c


def eps_part(c):
    return c.eps if isinstance(c, DualScalar) else Fraction(0)


def _scalar_text(c, leading: bool) -> tuple[str, str]:
    """Split a scalar into (sign, magnitude) for printing."""
    if isinstance(c, DualScalar):
        return ("" if leading else "+", str(c))
    if c < 0:
        return ("-", str(-c))
    return ("" if leading else "+", str(c))


def format_terms(pairs: Iterable[tuple[object, str]]) -> str:
    """Render (coefficient, monomial) pairs as ``a*m + b*n - ...``.

    An empty monomial string means the constant term.
    """
    out: list[str] = []
    for c, mono in pairs:
        sign, mag = _scalar_text(c, not out)
        if mono:
            body = mono if mag == "1" else f"{mag}*{mono}"
        else:
            body = mag
        if not out:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {'-' if sign == '-' else '+'} {body}")
    return "".join(out) if out else "0"


class TruncatedSeries:
    """A power series sum c_n x^n known modulo x^(order+1).

    ``order = -1`` encodes "nothing known".  Coefficients beyond ``order``
    are never stored and never reported.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable = (), order: int = 8):
        if order < -1:
            order = -1
        cs = [_coerce(c) for c in coeffs][: order + 1]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs: tuple = tuple(cs)
        self.order: int = order

    # constructors
    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls((), order)

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls((1,), order)

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedSeries":
        return cls((c,), order)

    @classmethod
    def monomial(cls, n: int, order: int, c=1) -> "TruncatedSeries":
        if n < 0:
            raise ValueError("negative power of x")
        return cls([0] * n + [c], order)

    @classmethod
    def from_dict(cls, data: Mapping[int, object], order: int) -> "TruncatedSeries":
        top = max(data, default=-1)
        cs = [0] * (top + 1)
        for n, c in data.items():
            cs[n] = c
        return cls(cs, order)

    # access
    def coeff(self, n: int):
        if n < 0:
            return Fraction(0)
        if n > self.order:
            raise IndexError(f"coefficient of x^{n} is beyond the truncation order {self.order}")
        return self.coeffs[n] if n < len(self.coeffs) else Fraction(0)

    def __getitem__(self, n: int):
        return self.coeff(n)

    def items(self):
        return [(n, c) for n, c in enumerate(self.coeffs) if c]

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int:
        """Index of the first nonzero coefficient, or order + 1 for zero."""
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return self.order + 1

    def constant_term(self):
        return self.coeffs[0] if self.coeffs else Fraction(0)

    # precision
    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ConfigurationError(
                f"cannot raise precision from {self.order} to {order}")
        if order == self.order:
            return self
        return TruncatedSeries(self.coeffs, order)

    def _check(self, other: "TruncatedSeries") -> None:
        if self.order != other.order:
            raise ConfigurationError(
                f"truncation orders differ: {self.order} vs {other.order}")

    # arithmetic
    def _wrap(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, DualScalar)):
            return TruncatedSeries((other,), self.order)
        return None

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = o.coeffs + (0,) * (n - len(o.coeffs))
        return TruncatedSeries([x + y for x, y in zip(a, b)], self.order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.order)

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
        if isinstance(other, (int, Fraction, DualScalar)):
            return TruncatedSeries([c * other for c in self.coeffs], self.order)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check(other)
        a, b = self.coeffs, other.coeffs
        size = min(len(a) + len(b) - 1, self.order + 1)
        out = []
        for n in range(max(size, 0)):
            acc = 0
            for i in range(max(0, n - len(b) + 1), min(n, len(a) - 1) + 1):
                acc = acc + a[i] * b[n - i]
            out.append(acc)
        return TruncatedSeries(out, self.order)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, DualScalar)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = TruncatedSeries.one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "TruncatedSeries":
        c0 = self.constant_term()
        if self.order < 0:
            return self
        if not c0:
            raise NonUnitError("series with zero constant term is not invertible")
        inv0 = 1 / c0
        out = [inv0]
        for n in range(1, self.order + 1):
            acc = 0
            for i in range(1, min(n, len(self.coeffs) - 1) + 1):
                acc = acc + self.coeffs[i] * out[n - i]
            out.append(-acc * inv0)
        return TruncatedSeries(out, self.order)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, DualScalar)):
            return self * (1 / _coerce(other))
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        return NotImplemented

    def deriv(self) -> "TruncatedSeries":
        """Termwise d/dx; the result is known to one order less."""
        return TruncatedSeries([n * c for n, c in enumerate(self.coeffs)][1:], self.order - 1)

    def map(self, func: Callable) -> "TruncatedSeries":
        return TruncatedSeries([func(c) for c in self.coeffs], self.order)

    def evaluate_polynomial(self, x):
        """Sum the retained coefficients at ``x`` (treating the series as a polynomial)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # comparison
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, DualScalar)):
            other = TruncatedSeries((other,), self.order)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return self.truncate(n).coeffs == other.truncate(n).coeffs

    __hash__ = None

    def identical(self, other: "TruncatedSeries") -> bool:
        return self.order == other.order and self.coeffs == other.coeffs

    # text
    def format(self, var: str = "x", with_order: bool = True) -> str:
        pairs = []
        for n, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if n == 0 else (var if n == 1 else f"{var}^{n}")
            pairs.append((c, mono))
        body = format_terms(pairs)
        if with_order:
            body += f" (mod {var}^{self.order + 1})"
        return body

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"TruncatedSeries({list(self.coeffs)!r}, order={self.order})"

    @classmethod
    def parse(cls, text: str, order: int = 8) -> "TruncatedSeries":
        from .parsing import parse_series
        return parse_series(text, order)


def common_order(*items) -> int:
    return min(s.order for s in items if hasattr(s, "order"))


def align(*items):
    """Truncate all series arguments to their common (minimal) order."""
    n = common_order(*items)
    return tuple(s.truncate(n) if hasattr(s, "order") else s for s in items)


class TruncatedLaurent:
    """A Laurent series sum c_e z^e known modulo z^(order+1).

    Stored as a valuation plus a dense coefficient tuple.  The zero element is
    kept with an empty tuple; its ``valuation()`` is reported as order + 1.
    """

    __slots__ = ("start", "coeffs", "order")

    def __init__(self, start: int, coeffs: Iterable, order: int):
        cs = [_coerce(c) for c in coeffs]
        keep = max(0, order - start + 1)
        cs = cs[:keep]
        while cs and not cs[-1]:
            cs.pop()
        lead = 0
        while lead < len(cs) and not cs[lead]:
            lead += 1
        cs = cs[lead:]
        self.start: int = start + lead if cs else 0
        self.coeffs: tuple = tuple(cs)
        self.order: int = order

    @classmethod
    def zero(cls, order: int) -> "TruncatedLaurent":
        return cls(0, (), order)

    @classmethod
    def monomial(cls, e: int, order: int, c=1) -> "TruncatedLaurent":
        return cls(e, (c,), order)

    @classmethod
    def from_dict(cls, data: Mapping[int, object], order: int) -> "TruncatedLaurent":
        items = {e: c for e, c in data.items() if e <= order}
        if not items:
            return cls.zero(order)
        lo, hi = min(items), max(items)
        cs = [0] * (hi - lo + 1)
        for e, c in items.items():
            cs[e - lo] = c
        return cls(lo, cs, order)

    @classmethod
    def from_series(cls, s: TruncatedSeries) -> "TruncatedLaurent":
        return cls(0, s.coeffs, s.order)

    def coeff(self, e: int):
        if e > self.order:
            raise IndexError(f"coefficient of z^{e} is beyond the truncation order {self.order}")
        i = e - self.start
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __getitem__(self, e: int):
        return self.coeff(e)

    def items(self) -> list[tuple[int, object]]:
        return [(self.start + i, c) for i, c in enumerate(self.coeffs) if c]

    def to_dict(self) -> dict[int, object]:
        return dict(self.items())

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int:
        return self.start if self.coeffs else self.order + 1

    def leading_coefficient(self):
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def max_exponent(self) -> int | None:
        return self.start + len(self.coeffs) - 1 if self.coeffs else None

    def truncate(self, order: int) -> "TruncatedLaurent":
        if order > self.order:
            raise ConfigurationError(
                f"cannot raise precision from {self.order} to {order}")
        if order == self.order:
            return self
        return TruncatedLaurent(self.start, self.coeffs, order)

    def _check(self, other: "TruncatedLaurent") -> None:
        if self.order != other.order:
            raise ConfigurationError(
                f"truncation orders differ: {self.order} vs {other.order}")

    def _wrap(self, other):
        if isinstance(other, TruncatedLaurent):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, DualScalar)):
            return TruncatedLaurent(0, (other,), self.order)
        return None

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        data = self.to_dict()
        for e, c in o.items():
            data[e] = data.get(e, 0) + c
        return TruncatedLaurent.from_dict(data, self.order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedLaurent(self.start, [-c for c in self.coeffs], self.order)

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
        if isinstance(other, (int, Fraction, DualScalar)):
            return TruncatedLaurent(self.start, [c * other for c in self.coeffs], self.order)
        if not isinstance(other, TruncatedLaurent):
            return NotImplemented
        self._check(other)
        # a known mod z^(N+1), b has valuation vb: a*b known mod z^(N+vb+1)
        order = min(self.order + other.valuation(), other.order + self.valuation(), self.order)
        if self.is_zero() or other.is_zero():
            return TruncatedLaurent.zero(order)
        start = self.start + other.start
        size = max(0, min(len(self.coeffs) + len(other.coeffs) - 1, order - start + 1))
        out = [0] * size
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j >= size:
                    break
                out[i + j] = out[i + j] + a * b
        return TruncatedLaurent(start, out, order)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, DualScalar)):
            return self * other
        return NotImplemented

    def shift(self, k: int) -> "TruncatedLaurent":
        """Multiply by z^k exactly (precision shifts along)."""
        return TruncatedLaurent(self.start + k, self.coeffs, self.order + k)

    def inverse(self) -> "TruncatedLaurent":
        if self.is_zero():
            raise NonUnitError("zero Laurent series is not invertible")
        v = self.start
        unit = TruncatedSeries(self.coeffs, self.order - v)
        inv = unit.inverse()
        return TruncatedLaurent(-v, inv.coeffs, inv.order - v)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = TruncatedLaurent(0, (1,), self.order)
        for _ in range(n):
            result = result * self
        return result

    def map(self, func: Callable) -> "TruncatedLaurent":
        return TruncatedLaurent(self.start, [func(c) for c in self.coeffs], self.order)

    def principal_part(self) -> "TruncatedLaurent":
        """Terms with negative exponent (exact, precision unchanged)."""
        return TruncatedLaurent.from_dict({e: c for e, c in self.items() if e < 0}, self.order)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, DualScalar)):
            other = TruncatedLaurent(0, (other,), self.order)
        if not isinstance(other, TruncatedLaurent):
            return NotImplemented
        n = min(self.order, other.order)
        a, b = self.truncate(n), other.truncate(n)
        return a.start == b.start and a.coeffs == b.coeffs

    __hash__ = None

    def identical(self, other: "TruncatedLaurent") -> bool:
        return self.order == other.order and self == other

    def format(self, var: str = "z", with_order: bool = True) -> str:
        pairs = []
        for e, c in self.items():
            mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
            pairs.append((c, mono))
        body = format_terms(pairs)
        if with_order:
            body += f" (mod {var}^{self.order + 1})"
        return body

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"TruncatedLaurent({self.start}, {list(self.coeffs)!r}, order={self.order})"

    @classmethod
    def parse(cls, text: str, order: int = 12) -> "TruncatedLaurent":
        from .parsing import parse_laurent
        return parse_laurent(text, order)
