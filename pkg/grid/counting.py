''' Squarefree streams over Q, prime-factor counting, and admissible twist counts.

Frobenius classes of rational primes are modelled by abelian surrogates: a residue class
modulo m, or a Kronecker symbol (d|p).
'''
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import legendre_symbol, totient

from utils import get_logger
from .classify import IdealProfile
from .sieve import TABLE_LIMIT, factor_with, omega_table, smallest_prime_factor, squarefree_count, squarefree_mask

logger = get_logger(__name__)

SIX_OVER_PI2 = 6 / math.pi ** 2


def kronecker(d, p):
    """(d|p) for a prime p."""
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 in (1, 7) else -1
    if d % p == 0:
        return 0
    return int(legendre_symbol(d % p, p))


class ResidueClassFn:
    """label(p) = p mod m; primes dividing m have no class."""

    def __init__(self, modulus):
        self.modulus = modulus
        self.classes = {str(a): 1 for a in range(modulus) if math.gcd(a, modulus) == 1}

    def __call__(self, p):
        if self.modulus > 1 and self.modulus % p == 0:
            return None
        return str(p % self.modulus)


class KroneckerClassFn:
    """label(p) = (d|p) as "1" / "-1"; primes dividing d have no class."""

    def __init__(self, d):
        if d == 0:
            raise ValueError("d must be nonzero")
        self.d = d
        self.classes = {"1": 1, "-1": 1}

    def __call__(self, p):
        s = kronecker(self.d, p)
        return None if s == 0 else str(s)


def sample_profiles_Q(X, class_fn, rng=None, exhaustive=True, samples=None, include_two=False):
    """
    Squarefree integers <= X as ideal profiles.

    Args:
        class_fn: prime -> label, or None for primes outside the admissible set
        rng, samples: uniform draws (with replacement) when exhaustive is False
        include_two: 2 is excluded by default, since it lies under the excluded places for ell = 2
    Yields:
        IdealProfile for each integer whose prime factors all carry a class
    """
    X = int(X)
    if X < 1:
        return
    if X > TABLE_LIMIT:
        raise ValueError(f"profile streams are limited to X <= {TABLE_LIMIT}, got {X}")
    mask = squarefree_mask(X)
    if not include_two:
        mask[2::2] = False
    candidates = np.flatnonzero(mask)
    if not exhaustive:
        if rng is None or samples is None:
            raise ValueError("sampled streams need rng and samples")
        candidates = rng.choice(candidates, size=samples, replace=True)
    spf = smallest_prime_factor(X)
    skipped = 0
    for n in candidates:
        primes = factor_with(spf, int(n))
        labels = [class_fn(p) for p in primes]
        if any(c is None for c in labels):
            skipped += 1
            continue
        yield IdealProfile(tuple(zip(primes, labels)))
    if skipped:
        logger.debug(f"skipped {skipped} integers with unclassified prime factors")


@dataclass
class PiCount:
    x: int
    y: int
    r: int
    k: int
    count: int
    C: float
    bound: float
    c_fit: float

    @property
    def holds(self):
        return self.count <= self.bound


def pi_bound(x, y, r, k, C):
    """C x / log x * (loglog y + C)^k / k! * (loglog x - loglog y + C)^(r-k-1) / (r-k-1)!  (d = 1)."""
    if k >= r:
        return 0.0
    llx = math.log(math.log(x))
    lly = math.log(math.log(max(y, math.e)))
    return (C * x / math.log(x) * (lly + C) ** k / math.factorial(k)
            * (llx - lly + C) ** (r - k - 1) / math.factorial(r - k - 1))


def _fit_constant(count, x, y, r, k, tol=1e-6):
    if count == 0:
        return 0.0
    hi = 1.0
    while pi_bound(x, y, r, k, hi) < count:
        hi *= 2
    lo = 0.0
    while hi - lo > tol * hi:
        mid = (lo + hi) / 2
        if pi_bound(x, y, r, k, mid) >= count:
            hi = mid
        else:
            lo = mid
    return hi


def count_pi_rk(x, y, r, k, C=1.0, table=None):
    """
    Number of squarefree n <= x with r prime factors, exactly k of them <= y, against the
    Hardy-Ramanujan style bound.

    Args:
        table: a precomputed omega_table(x, y) to reuse
    Returns:
        PiCount; c_fit is the least C for which the bound holds
    """
    if r < 0 or k < 0:
        raise ValueError(f"r and k must be nonnegative, got r={r}, k={k}")
    if k >= r:
        return PiCount(x, y, r, k, 0, C, 0.0, 0.0)
    if y ** (k + 1) > x:
        raise ValueError(f"need y^(k+1) <= x, got y={y}, k={k}, x={x}")
    if table is None:
        table = omega_table(x, y)
    count = int(table[r, k]) if r < table.shape[0] and k < table.shape[1] else 0
    return PiCount(x, y, r, k, count, C, pi_bound(x, y, r, k, C), _fit_constant(count, x, y, r, k))


def hardy_ramanujan_profile(x, y=2):
    """[pi_{r,0}(x, y) for r = 1, 2, ...] up to the largest r that occurs."""
    column = omega_table(x, y)[:, 0]
    nonzero = np.flatnonzero(column)
    last = int(nonzero.max()) if nonzero.size else 0
    return [int(v) for v in column[1:last + 1]]


def is_unimodal(values):
    i = 0
    while i + 1 < len(values) and values[i + 1] >= values[i]:
        i += 1
    return all(values[j + 1] <= values[j] for j in range(i, len(values) - 1))


def kappa_Q(ell=2):
    """#F(-1)^x / [Q(mu_|F|) : Q] for the field F = F_ell."""
    return Fraction(ell - 1, int(totient(ell)))


@dataclass
class AdmissibleCount:
    H: int
    count: int
    kappa: Fraction
    density: float
    rel_error: float


def count_admissible_twists_Q(H, include_one=True, both_signs=False):
    """
    Quadratic twists over Q of conductor-part <= H, one per squarefree integer.

    Args:
        include_one: count the trivial twist
        both_signs: count d and -d separately
    Returns:
        AdmissibleCount, with density compared against 6 / pi^2
    """
    H = int(H)
    count = squarefree_count(H)
    if count and not include_one:
        count -= 1
    if both_signs:
        count *= 2
    density = count / H / (2 if both_signs else 1) if H > 0 else 0.0
    return AdmissibleCount(H, count, kappa_Q(2), density, abs(density / SIX_OVER_PI2 - 1))
