''' Prime, Moebius and squarefree sieves over the integers.

Everything is numpy-vectorized over strided slices. Counts that must reach 10^8 go
through `segments`, which never holds more than one window in memory.
'''
import math

import numpy as np

from utils import get_logger

logger = get_logger(__name__)

SIEVE_LIMIT = 10 ** 8
# largest table held in one piece (smallest prime factors, full squarefree masks)
TABLE_LIMIT = 2 * 10 ** 7
SEGMENT = 1 << 20


def _check_range(n, limit=SIEVE_LIMIT):
    if n > limit:
        raise ValueError(f"sieve range {n} exceeds the supported limit {limit}")


def primes_upto(limit):
    """All primes <= limit as an int64 array."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    _check_range(limit, TABLE_LIMIT)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def prime_count(x):
    return int(primes_upto(int(x)).size)


def mobius_upto(limit):
    """mu(0..limit); mu[0] is set to 0."""
    _check_range(limit, TABLE_LIMIT)
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes_upto(limit):
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


def squarefree_count(x):
    """#{1 <= n <= x squarefree} = sum_k mu(k) floor(x / k^2)."""
    x = int(x)
    if x < 1:
        return 0
    _check_range(x)
    r = math.isqrt(x)
    mu = mobius_upto(r).astype(np.int64)
    k = np.arange(r + 1, dtype=np.int64)
    k[0] = 1
    return int(np.sum(mu[1:] * (x // (k[1:] * k[1:]))))


def squarefree_mask(limit):
    """Boolean mask over 0..limit of squarefree integers (0 excluded)."""
    _check_range(limit, TABLE_LIMIT)
    mask = np.ones(limit + 1, dtype=bool)
    mask[0] = False
    for p in primes_upto(math.isqrt(limit)):
        mask[p * p::p * p] = False
    return mask


def smallest_prime_factor(limit):
    """spf[n] for n <= limit, with spf[0] = 0 and spf[1] = 1."""
    _check_range(limit, TABLE_LIMIT)
    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[1:] = np.arange(1, limit + 1)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == p:
            block = spf[p * p::p]
            # only overwrite entries that still point at themselves
            untouched = block == np.arange(p * p, limit + 1, p)
            block[untouched] = p
    return spf


def factor_with(spf, n):
    """Distinct prime factors of n (ascending), or None when n is not squarefree."""
    factors = []
    while n > 1:
        p = int(spf[n])
        n //= p
        if n % p == 0:
            return None
        factors.append(p)
    return factors


def segments(x, size=SEGMENT):
    """Yield (lo, hi) half-open windows covering 1..x."""
    lo = 1
    while lo <= x:
        hi = min(lo + size, x + 1)
        yield lo, hi
        lo = hi


def omega_table(x, y):
    """
    Counts of squarefree n <= x by (omega(n), number of prime factors <= y).

    Segmented: each window is divided by every base prime <= sqrt(x) once; whatever remains
    above 1 of a squarefree n is a single prime > sqrt(x).

    Returns:
        np.ndarray: table[r, k]
    """
    x = int(x)
    _check_range(x)
    base = primes_upto(math.isqrt(x))
    rmax = 1
    prod = 1
    for p in base:
        if prod * int(p) > x:
            break
        prod *= int(p)
        rmax += 1
    table = np.zeros((rmax + 2, rmax + 2), dtype=np.int64)
    for lo, hi in segments(x):
        n = np.arange(lo, hi, dtype=np.int64)
        rem = n.copy()
        sqfree = np.ones(n.size, dtype=bool)
        omega = np.zeros(n.size, dtype=np.int64)
        small = np.zeros(n.size, dtype=np.int64)
        for p in base:
            p = int(p)
            start = (-lo) % p
            rem[start::p] //= p
            omega[start::p] += 1
            if p <= y:
                small[start::p] += 1
            p2 = p * p
            if p2 <= hi:
                sqfree[(-lo) % p2::p2] = False
        big = rem > 1
        omega[big] += 1
        small[big & (rem <= y)] += 1
        np.add.at(table, (omega[sqfree], small[sqfree]), 1)
    logger.debug(f"omega table up to {x} (y={y}): {int(table.sum())} squarefree")
    return table
