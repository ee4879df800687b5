''' 2-descent and 2-isogeny descent for quadratic twists.

Selmer groups are cut out of Q(S, 2) = <-1, p : p in S> by the local images at the places
of S and infinity: an element survives when its image in every Q_v^x / squares lies in the
local Kummer image, i.e. when it is killed by every quotient map onto (local group) / image.
'''
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import legendre_symbol, primefactors

from linalg import FieldMatrix, Subspace, kernel_basis
from models.module_algebra import GaloisModuleSpec
from utils import get_logger
from .curve_util import is_squarefree
from .local_image import (REAL, LocalSearch, class_dim, place_bound, root_centers, search_until, square_class,
                          valuation)

logger = get_logger(__name__)

OMEGA_A4 = [[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]]
IDENTITY_CLASS = "0000"

# (e2, e3, place, square class of d, depth scale) -> local image
_FULL2_CACHE = {}


@dataclass
class SelmerResult:
    dim: int
    primes: list
    basis: list = field(default_factory=list)
    torsion_dim: int = 2


def _places(primes):
    return [REAL] + list(primes)


def _local_matrix(generators, v):
    """Columns: square classes at v of the Q(S,2) generators."""
    return np.stack([square_class(g, v) for g in generators], axis=1)


def _kernel_of_conditions(blocks, ncols):
    """Solution space of the stacked local conditions, as a Subspace of F_2^ncols."""
    rows = [b for b in blocks if b.shape[0]]
    if not rows:
        return Subspace.full(ncols, 2)
    return kernel_basis(FieldMatrix(np.concatenate(rows) % 2, 2))


def _decode(vec, generators):
    out = 1
    for bit, g in zip(vec, generators):
        if bit:
            out *= g
    return out


def full2_local_image(a, b, v, depth_scale=1):
    """
    Kummer image of E(Q_v) / 2 E(Q_v) in (Q_v^x / squares)^2 for y^2 = x (x - a)(x - b), a, b
    integers, via x -> (x, x - a).
    """
    size = 2 * class_dim(v)

    def kummer(x):
        return np.concatenate([square_class(x, v), square_class(x - a, v)])

    seeds = [np.concatenate([square_class(a * b, v), square_class(-a, v)]),
             np.concatenate([square_class(a, v), square_class(a * (a - b), v)]),
             np.concatenate([square_class(b, v), square_class(b - a, v)])]
    search = LocalSearch(lambda x: x * (x - a) * (x - b), kummer, v, size, seeds=seeds, centers=(0, a, b))
    target = 1 if v == REAL else 2 + (v == 2)
    depth = place_bound((0, a, b), v) * depth_scale
    return search_until([search], target, depth)[0]


def _torsion_dim(a, b, generators):
    """Rank of the global Kummer images of the 2-torsion in Q(S,2)^2."""
    vecs = []
    for pair in ((a * b, -a), (a, a * (a - b)), (b, b - a)):
        vec = []
        for q in pair:
            n = int(q)
            vec.append(int(n < 0))
            vec.extend(_parity_exponent(n, p) for p in generators[1:])
        vecs.append(vec)
    return Subspace.span(vecs, 2 * len(generators), 2).dim


def _parity_exponent(n, p):
    k = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        k += 1
    return k % 2


def selmer2_for_roots(a, b, depth_scale=1, images=None):
    """
    dim_F2 Sel^2 of y^2 = x (x - a)(x - b) for distinct nonzero integers a, b.

    Args:
        images: optional {place: Subspace} of precomputed local images
    Returns:
        SelmerResult, basis as (b1, b2) pairs of squarefree integers
    """
    a, b = int(a), int(b)
    primes = sorted(set(primefactors(abs(a * b * (a - b)))) | {2})
    generators = [-1] + primes
    n = len(generators)
    blocks = []
    for v in _places(primes):
        W = images[v] if images and v in images else full2_local_image(a, b, v, depth_scale)
        L = _local_matrix(generators, v)
        D = L.shape[0]
        pair = np.zeros((2 * D, 2 * n), dtype=np.int64)
        pair[:D, :n] = L
        pair[D:, n:] = L
        blocks.append(W.quotient_matrix().array @ pair)
    sel = _kernel_of_conditions(blocks, 2 * n)
    basis = [(_decode(row[:n], generators), _decode(row[n:], generators)) for row in sel.basis]
    return SelmerResult(sel.dim, primes, basis, _torsion_dim(a, b, generators))


def two_selmer_rank(curve, d, depth_scale=1):
    """
    dim_F2 Sel^2 of the twist of a full2torsion curve by the squarefree integer d.

    Local images are cached by the square class of d at each place, since the twist over
    Q_v only depends on it.
    """
    if not curve.is_full2torsion:
        raise ValueError("two_selmer_rank needs a full2torsion curve")
    if not is_squarefree(d):
        raise ValueError(f"d must be squarefree, got {d}")
    base = curve.integral()
    e2, e3 = int(base.c1), int(base.c2)
    a, b = d * e2, d * e3
    primes = sorted(set(primefactors(abs(a * b * (a - b)))) | {2})
    images = {}
    for v in _places(primes):
        key = (e2, e3, v, tuple(square_class(d, v)), depth_scale)
        if key not in _FULL2_CACHE:
            _FULL2_CACHE[key] = full2_local_image(a, b, v, depth_scale)
        images[v] = _FULL2_CACHE[key]
    return selmer2_for_roots(a, b, depth_scale, images)


# 2-isogeny descent

@dataclass
class PhiSelmer:
    """
    sel_phi: dim Sel^phi of A^d -> A0^d (local images from points of A0^d)
    sel_phi_hat: dim Sel^phi_hat of A0^d -> A^d (local images from points of A^d)
    tamagawa_exponent: sum over places of (dim local image for phi) - 1
    """
    d: int
    sel_phi: int
    sel_phi_hat: int
    tamagawa_exponent: int
    favored: bool


def _real_roots(A, B):
    disc = A * A - 4 * B
    roots = [Fraction(0)]
    if disc > 0:
        s = math.sqrt(disc)
        roots += [Fraction((-A + s) / 2), Fraction((-A - s) / 2)]
    return roots


def _isogeny_search(A, B, v, depth):
    """x-coordinate image of y^2 = x (x^2 + A x + B), with (0, 0) -> B."""
    size = class_dim(v)
    centers = _real_roots(A, B) if v == REAL else [0] + root_centers(A, B, v, depth + 2)[:16]
    return LocalSearch(lambda x: x * (x * x + A * x + B), lambda x: square_class(x, v), v, size,
                       seeds=[square_class(B, v)], centers=centers)


def phi_selmer_dims(curve, d, depth_scale=1):
    """Dimensions of the two 2-isogeny Selmer groups of the twist of a klagsbrun curve by d."""
    if curve.is_full2torsion:
        raise ValueError("phi_selmer_dims needs a klagsbrun curve")
    if not is_squarefree(d):
        raise ValueError(f"d must be squarefree, got {d}")
    E = curve.integral().twist(d)
    A, B = int(E.c1), int(E.c2)
    A1, B1 = -2 * A, A * A - 4 * B
    primes = sorted(set(primefactors(abs(B * B1))) | {2})
    generators = [-1] + primes
    blocks_phi, blocks_hat = [], []
    exponent = 0
    for v in _places(primes):
        target = 1 if v == REAL else 2 + (v == 2)
        depth = (2 * valuation(16 * B * B * B1, v) + 6 if v != REAL else 1) * depth_scale
        W_phi, W_hat = search_until([_isogeny_search(A1, B1, v, depth), _isogeny_search(A, B, v, depth)],
                                    target, depth)
        L = _local_matrix(generators, v)
        blocks_phi.append(W_phi.quotient_matrix().array @ L)
        blocks_hat.append(W_hat.quotient_matrix().array @ L)
        exponent += W_phi.dim - 1
    sel_phi = _kernel_of_conditions(blocks_phi, len(generators)).dim
    sel_hat = _kernel_of_conditions(blocks_hat, len(generators)).dim
    return PhiSelmer(d, sel_phi, sel_hat, exponent, favored_klagsbrun(curve, d))


def _split(q, p):
    return legendre_symbol(int(q) % p, p) == 1


def favored_klagsbrun(curve, d):
    """
    Among the odd primes p | d of good reduction, no more split in Q(sqrt b) than in
    Q(sqrt(a^2 - 4b)).
    """
    E = curve.integral()
    a, b = E.c1, E.c2
    disc = a * a - 4 * b
    bad = set(E.bad_primes())
    primes = [p for p in primefactors(abs(d)) if p != 2 and p not in bad]
    split_k0 = sum(1 for p in primes if _split(b, p))
    split_k = sum(1 for p in primes if _split(disc, p))
    return split_k0 <= split_k


# Galois module of A[4]

def _bit(q, p):
    return int(legendre_symbol(int(q) % p, p) == -1)


def frobenius_label(curve, p):
    """
    Frobenius at a good odd prime on A[4] in the basis (T1, T2, P1, P2), 2 P_i = T_i:
    sigma P_i = P_i + alpha_i T1 + beta_i T2, the bits read off the Kummer images of T_i.
    """
    E = curve.integral()
    a, b = int(E.c1), int(E.c2)
    if p == 2 or (a * b * (a - b)) % p == 0:
        raise ValueError(f"{p} is not a good odd prime")
    return f"{_bit(-a, p)}{_bit(a * b, p)}{_bit(a * (a - b), p)}{_bit(a, p)}"


def label_matrix(label):
    a1, b1, a2, b2 = (int(c) for c in label)
    m = np.eye(4, dtype=np.int64)
    m[0, 2], m[1, 2], m[0, 3], m[1, 3] = a1, b1, a2, b2
    return m


def curve_module_spec(curve, primes):
    """
    GaloisModuleSpec of A[4] over F_2 (omega = multiplication by 2) with one class per
    distinct Frobenius label among `primes`, weighted by how many primes carry it.

    Returns:
        (GaloisModuleSpec, {p: label})
    """
    if not curve.is_full2torsion:
        raise ValueError("curve_module_spec needs a full2torsion curve")
    frob = {p: frobenius_label(curve, p) for p in primes}
    counts = Counter(frob.values())
    labels = sorted(set(frob.values()) | {IDENTITY_CLASS})
    spec = GaloisModuleSpec(2, OMEGA_A4, {l: label_matrix(l) for l in labels},
                            weights={l: counts.get(l, 0) for l in labels}, name=f"A[4] of {curve.to_string()}")
    return spec, frob


def isogeny_kernels(spec):
    """The three 2-isogeny kernels <T1>, <T2>, <T3> inside A[2] = N[omega]."""
    return [Subspace.span([v], spec.n, 2) for v in ([1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0])]


def parity_bucket(curve, d):
    """Sign of d with its square classes at 2 and at the bad primes."""
    parts = ["+" if d > 0 else "-"]
    for p in curve.bad_primes():
        parts.append(f"{p}:" + "".join(str(int(x)) for x in square_class(d, p)))
    return "|".join(parts)
