"""Seeded random objects for property checks and the acceptance suite."""

from __future__ import annotations

import random
from fractions import Fraction

from .grassmann import GrassmannPoint
from .psido import PsiDO, SeriesRing
from .series import TruncatedLaurent, TruncatedSeries


def rational(rng: random.Random, size: int = 5) -> Fraction:
    num = rng.randint(-size, size)
    den = rng.choice((1, 1, 1, 2, 3))
    return Fraction(num, den)


def series(rng: random.Random, order: int = 8, size: int = 5, terms: int | None = None) -> TruncatedSeries:
    """Random power series known to x^order; ``terms`` limits the nonzero prefix."""
    count = order + 1 if terms is None else min(terms, order + 1)
    coeffs = [rational(rng, size) for _ in range(count)]
    return TruncatedSeries(coeffs, order)


def operator(rng: random.Random, top: int, depth: int, x_order: int = 8, terms: int | None = None) -> PsiDO:
    """Random operator with exponents top, top-1, ..., -depth."""
    ring = SeriesRing(x_order)
    data = {e: series(rng, x_order, terms=terms) for e in range(top, -depth - 1, -1)}
    return PsiDO(data, depth, ring)


def differential_operator(rng: random.Random, top: int, x_order: int = 12, terms: int = 4) -> PsiDO:
    """Random element of E_+ (no negative powers of d), exact in d."""
    ring = SeriesRing(x_order)
    data = {e: series(rng, x_order, terms=terms) for e in range(top + 1)}
    return PsiDO(data, None, ring)


def dressing_operator(rng: random.Random, depth: int, x_order: int = 12, terms: int = 3) -> PsiDO:
    """Random S = 1 + s_1 d^-1 + ... + s_depth d^-depth."""
    ring = SeriesRing(x_order)
    data = {0: ring.one()}
    for e in range(1, depth + 1):
        data[-e] = series(rng, x_order, terms=terms)
    return PsiDO(data, depth, ring)


def big_cell_point(rng: random.Random, size: int = 3, order: int = 12, span: int = 10) -> GrassmannPoint:
    """W with normalized generators z^-n + v_n, v_n in z k[[z]], n < size."""
    gens = []
    for n in range(size):
        data = {-n: 1}
        for e in range(1, span):
            data[e] = rng.randint(-3, 3)
        gens.append(TruncatedLaurent.from_dict(data, order))
    return GrassmannPoint(gens, size, order=order)


def point_with_index(rng: random.Random, index: int, order: int = 12, extra: int = 2) -> GrassmannPoint:
    """Random eventually standard W of the given index: the tail z^-n, n >= T,
    plus ``extra`` generators with distinct leading exponents above -T, each
    adding one to the index, so T = extra + 1 - index."""
    tail_level = extra + 1 - index
    leads = rng.sample(range(-tail_level + 1, -tail_level + extra + 3), extra)
    gens = []
    for lead in sorted(leads):
        data = {lead: 1}
        for e in range(lead + 1, lead + 10):
            data[e] = rng.randint(-2, 2)
        gens.append(TruncatedLaurent.from_dict(data, order))
    return GrassmannPoint(gens, tail_level, order=order)
