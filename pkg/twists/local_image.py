''' Square classes of Q_v and images of local Kummer maps.

Q_v^x / (Q_v^x)^2 is written additively over F_2:
    R      (sign)                         1 bit
    p odd  (valuation, Legendre of unit)  2 bits
    p = 2  (valuation, unit = 3 mod 4, unit = +-3 mod 8)  3 bits

A local image is found by searching rational points on the local curve. The dimension of
every image is known in advance, so the search stops exactly when the span of the found
classes reaches it; running out of candidates raises PrecisionError.
'''
import math
from fractions import Fraction

import numpy as np
from sympy import legendre_symbol
from sympy.ntheory import sqrt_mod

from linalg import Subspace
from utils import get_logger
from .curve_util import PrecisionError

logger = get_logger(__name__)

REAL = 0
# residues tried per center and level at an odd prime
MAX_RESIDUES = 256
MAX_ESCALATIONS = 2


def class_dim(v):
    if v == REAL:
        return 1
    return 3 if v == 2 else 2


def valuation(n, p):
    n = abs(int(n))
    if n == 0:
        raise ValueError("valuation of 0")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def square_class(q, v):
    """F_2 coordinates of the nonzero rational q in Q_v^x / squares."""
    q = Fraction(q)
    if q == 0:
        raise ValueError("0 has no square class")
    if v == REAL:
        return np.array([int(q < 0)], dtype=np.int64)
    num, den = q.numerator, q.denominator
    e = valuation(num, v) - valuation(den, v)
    unit = (num // v ** valuation(num, v)) * (den // v ** valuation(den, v))
    if v == 2:
        u = unit % 8
        return np.array([e % 2, int(u % 4 == 3), int(u in (3, 5))], dtype=np.int64)
    return np.array([e % 2, int(legendre_symbol(unit % v, v) == -1)], dtype=np.int64)


def is_local_square(q, v):
    q = Fraction(q)
    return q == 0 or not square_class(q, v).any()


def place_bound(roots, v):
    """Default search depth: 2 v_p(disc) + 6 over the given roots."""
    if v == REAL:
        return 0
    depth = 0
    for i, a in enumerate(roots):
        for b in roots[i + 1:]:
            diff = Fraction(a - b)
            if diff:
                depth += valuation(diff.numerator, v) if diff.numerator % v == 0 else 0
    return 2 * depth + 6


def _residues(p):
    if p == 2:
        return [t for t in range(-15, 16) if t]
    limit = min(p, MAX_RESIDUES)
    return [t for t in range(-(limit // 2), limit // 2 + 1) if t]


def _real_candidates(centers):
    pts = sorted(set(Fraction(c) for c in centers))
    span = max((abs(c) for c in pts), default=Fraction(0)) + 1
    out = [pts[0] - span, pts[-1] + span]
    for a, b in zip(pts, pts[1:]):
        out += [(a + b) / 2, a + (b - a) / 1000, b - (b - a) / 1000]
    for c in pts:
        out += [c - Fraction(1, 1000), c + Fraction(1, 1000)]
    return out


def _padic_candidates(centers, p, level):
    """x = c + t p^level near each center, and x = t p^(-level) toward infinity."""
    step = Fraction(p) ** level
    for c in centers:
        for t in _residues(p):
            yield Fraction(c) + t * step
    for t in _residues(p):
        yield Fraction(t, p ** level)


def candidates(centers, v, level):
    if v == REAL:
        return _real_candidates(centers) if level == 0 else []
    return list(_padic_candidates(centers, v, level))


class LocalSearch(object):
    """
    Span of Kummer classes of local points on y^2 = f(x).

    Args:
        f: callable on Fractions
        kummer: x -> F_2 vector, for points with f(x) != 0
        v: place (REAL or a prime)
        seeds: classes known in advance (torsion images)
        centers: x values the p-adic search is centered on
    """

    def __init__(self, f, kummer, v, size, seeds=(), centers=(0,)):
        self.f = f
        self.kummer = kummer
        self.v = v
        self.span = Subspace.span(list(seeds), size, 2)
        self.centers = list(centers)
        self.level = 0

    @property
    def dim(self):
        return self.span.dim

    def step(self):
        """Search one more level of precision."""
        found = []
        for x in candidates(self.centers, self.v, self.level):
            fx = self.f(x)
            if fx != 0 and is_local_square(fx, self.v):
                vec = self.kummer(x)
                if not self.span.contains(vec):
                    found.append(vec)
                    self.span = self.span + Subspace.span([vec], self.span.n, 2)
        self.level += 1
        return found


def search_until(searches, target, depth):
    """
    Step every search until their dimensions sum to `target`, escalating the depth
    (doubling) MAX_ESCALATIONS times before giving up.
    """
    budget = max(depth, 1)
    for attempt in range(MAX_ESCALATIONS + 1):
        while sum(s.dim for s in searches) < target and searches[0].level <= budget:
            for s in searches:
                s.step()
        total = sum(s.dim for s in searches)
        if total == target:
            return [s.span for s in searches]
        if total > target:
            raise AssertionError(f"local image dimension {total} exceeds the expected {target}")
        budget *= 2
        logger.debug(f"place {searches[0].v}: escalating search depth to {budget}")
    raise PrecisionError(f"local image at place {searches[0].v} not found within depth {budget}")


def root_centers(a, b, p, level):
    """Integers congruent to the p-adic roots of x^2 + a x + b modulo p^level (empty if none)."""
    a, b = int(a), int(b)
    if p == 2:
        return list(range(0, 2 ** min(level, 6)))
    mod = p ** max(level, 1)
    disc = (a * a - 4 * b) % mod
    roots = sqrt_mod(disc, mod, all_roots=True) or []
    inv2 = pow(2, -1, mod)
    return sorted({((-a + s) * inv2) % mod for s in roots})
