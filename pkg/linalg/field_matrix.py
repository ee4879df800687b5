''' Dense matrices over prime fields F_l, random matrix samplers and exhaustive oracles.

Entries are int64 residues; l <= 2^31 keeps every product below 2^62.
'''
import functools

import numpy as np
from sympy import isprime

MAX_MODULUS = 2 ** 31


@functools.lru_cache(maxsize=64)
def check_modulus(ell):
    ell = int(ell)
    if ell < 2 or ell > MAX_MODULUS or not isprime(ell):
        raise ValueError(f"modulus must be a prime in [2, 2^31], got {ell}")
    return ell


def rref_mod(a, ell):
    """
    Reduced row-echelon form over F_ell.

    Input:
        a: (r, c) int64 array of residues
    Output:
        (R, pivots): R the reduced copy, pivots the list of pivot columns
    """
    a = np.array(a, dtype=np.int64) % ell
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, ell)
        a[r] = (a[r] * inv) % ell
        factors = a[:, c].copy()
        factors[r] = 0
        if factors.any():
            a = (a - np.outer(factors, a[r])) % ell
        pivots.append(c)
        r += 1
    return a, pivots


class FieldMatrix(object):
    """Immutable dense matrix over F_ell acting on column vectors."""

    __slots__ = ("_a", "ell")

    def __init__(self, entries, ell, shape=None):
        self.ell = check_modulus(ell)
        a = np.array(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-dimensional array of entries, got shape {a.shape}")
        a = a % self.ell
        a.setflags(write=False)
        self._a = a

    @classmethod
    def zeros(cls, rows, cols, ell):
        return cls(np.zeros((rows, cols), dtype=np.int64), ell)

    @classmethod
    def identity(cls, n, ell):
        return cls(np.eye(n, dtype=np.int64), ell)

    @property
    def array(self):
        return self._a

    @property
    def rows(self):
        return self._a.shape[0]

    @property
    def cols(self):
        return self._a.shape[1]

    @property
    def shape(self):
        return self._a.shape

    def __repr__(self):
        return f"FieldMatrix(ell={self.ell}, {self._a.tolist()})"

    def __eq__(self, other):
        return (isinstance(other, FieldMatrix) and self.ell == other.ell
                and self.shape == other.shape and bool(np.array_equal(self._a, other._a)))

    def __hash__(self):
        return hash((self.ell, self.shape, self._a.tobytes()))

    def _coerce(self, other):
        if isinstance(other, FieldMatrix):
            assert other.ell == self.ell, "moduli differ"
            return other._a
        return np.asarray(other, dtype=np.int64)

    def __add__(self, other):
        return FieldMatrix(self._a + self._coerce(other), self.ell)

    def __sub__(self, other):
        return FieldMatrix(self._a - self._coerce(other), self.ell)

    def __neg__(self):
        return FieldMatrix(-self._a, self.ell)

    def __mul__(self, scalar):
        return FieldMatrix(self._a * (int(scalar) % self.ell), self.ell)

    __rmul__ = __mul__

    def __matmul__(self, other):
        b = self._coerce(other)
        if b.ndim == 1:
            return _matvec(self._a, b % self.ell, self.ell)
        return FieldMatrix(_matmul(self._a, b % self.ell, self.ell), self.ell)

    @property
    def T(self):
        return FieldMatrix(self._a.T, self.ell)

    def apply(self, v):
        """Image of the column vector `v`."""
        return _matvec(self._a, np.asarray(v, dtype=np.int64) % self.ell, self.ell)

    def rref(self):
        return rref_mod(self._a, self.ell)

    def rank(self):
        return len(self.rref()[1])

    def kernel_dim(self):
        return self.cols - self.rank()

    def kernel_basis(self):
        """Basis rows of the right kernel {v : Mv = 0}."""
        r, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = np.zeros((len(free), self.cols), dtype=np.int64)
        for k, f in enumerate(free):
            basis[k, f] = 1
            for i, p in enumerate(pivots):
                basis[k, p] = (-r[i, f]) % self.ell
        return basis

    def is_invertible(self):
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self):
        if self.rows != self.cols:
            raise ValueError("only square matrices can be inverted")
        n = self.rows
        aug = np.concatenate([self._a, np.eye(n, dtype=np.int64)], axis=1)
        r, pivots = rref_mod(aug, self.ell)
        if pivots[:n] != list(range(n)):
            raise ValueError("matrix is singular")
        return FieldMatrix(r[:, n:], self.ell)

    def is_alternating(self):
        a = self._a
        return self.rows == self.cols and not np.diag(a).any() and np.array_equal((a + a.T) % self.ell,
                                                                                  np.zeros_like(a))


def _matmul(a, b, ell):
    if ell < 2 ** 20 and a.shape[1] < 2 ** 20:
        return (a @ b) % ell
    # column-by-column accumulation keeps every partial sum in int64
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        out = (out + np.outer(a[:, k], b[k]) % ell) % ell
    return out


def _matvec(a, v, ell):
    return _matmul(a, v.reshape(-1, 1), ell).reshape(-1)


def rank(m):
    return m.rank()


def kernel_dim(m):
    return m.kernel_dim()


def sample_uniform(rows, cols, ell, rng):
    """Matrix with i.i.d. uniform entries in F_ell."""
    if rows < 0 or cols < 0:
        raise ValueError(f"negative shape ({rows}, {cols})")
    return FieldMatrix(rng.integers(0, ell, size=(rows, cols), dtype=np.int64), ell, shape=(rows, cols))


def sample_alternating(n, ell, rng):
    """Alternating n x n matrix: zero diagonal, a_ji = -a_ij, strictly upper entries i.i.d. uniform."""
    return FieldMatrix(sample_alternating_batch(n, ell, 1, rng)[0], ell, shape=(n, n))


def sample_uniform_batch(rows, cols, ell, size, rng):
    return rng.integers(0, ell, size=(size, rows, cols), dtype=np.int64)


def sample_alternating_batch(n, ell, size, rng):
    out = np.zeros((size, n, n), dtype=np.int64)
    iu = np.triu_indices(n, k=1)
    upper = rng.integers(0, ell, size=(size, len(iu[0])), dtype=np.int64)
    out[:, iu[0], iu[1]] = upper
    out[:, iu[1], iu[0]] = (-upper) % ell
    return out


def batch_rank(arrays, ell):
    """
    Ranks of a stack of matrices.

    Input:
        arrays: (B, r, c) int64 residues
    Output:
        (B,) int64 ranks
    """
    arrays = np.asarray(arrays, dtype=np.int64)
    size, rows, cols = arrays.shape
    if rows == 0 or cols == 0:
        return np.zeros(size, dtype=np.int64)
    if ell == 2 and cols <= 62:
        return _batch_rank_gf2(arrays)
    return _batch_rank_modp(arrays % ell, ell)


def _batch_rank_gf2(arrays):
    size, rows, cols = arrays.shape
    weights = np.left_shift(np.uint64(1), np.arange(cols, dtype=np.uint64))
    packed = ((arrays & 1).astype(np.uint64) * weights).sum(axis=2, dtype=np.uint64)
    used = np.zeros((size, rows), dtype=bool)
    ranks = np.zeros(size, dtype=np.int64)
    idx = np.arange(size)
    for c in range(cols):
        bit = np.uint64(1) << np.uint64(c)
        has = ((packed & bit) != 0) & ~used
        found = has.any(axis=1)
        if not found.any():
            continue
        piv = has.argmax(axis=1)
        pivrow = packed[idx, piv]
        hit = ((packed & bit) != 0) & found[:, None]
        hit[idx, piv] = False
        packed = np.where(hit, packed ^ pivrow[:, None], packed)
        used[idx[found], piv[found]] = True
        ranks += found
    return ranks


def _batch_rank_modp(a, ell):
    size, rows, cols = a.shape
    a = a.copy()
    used = np.zeros((size, rows), dtype=bool)
    ranks = np.zeros(size, dtype=np.int64)
    idx = np.arange(size)
    for c in range(cols):
        has = (a[:, :, c] != 0) & ~used
        found = has.any(axis=1)
        if not found.any():
            continue
        piv = has.argmax(axis=1)
        pivval = a[idx, piv, c]
        inv = _inverse_table(ell)[pivval] if ell <= 2 ** 16 else \
            np.array([pow(int(v), -1, ell) if v else 0 for v in pivval], dtype=np.int64)
        pivrow = (a[idx, piv] * inv[:, None]) % ell
        factors = np.where(found[:, None], a[:, :, c], 0)
        factors[idx, piv] = 0
        a = (a - (factors[:, :, None] * pivrow[:, None, :]) % ell) % ell
        used[idx[found], piv[found]] = True
        ranks += found
    return ranks


def gaussian_binomial(j, n, ell):
    """
    Number of j-dimensional subspaces of F_ell^n:
    prod_{k=1}^{j} (ell^{n-k+1} - 1) / (ell^k - 1), exact.
    """
    if j < 0 or n < 0 or j > n:
        raise ValueError(f"gaussian_binomial needs 0 <= j <= n, got j={j}, n={n}")
    num = 1
    den = 1
    for k in range(1, j + 1):
        num *= ell ** (n - k + 1) - 1
        den *= ell ** k - 1
    assert num % den == 0
    return num // den


@functools.lru_cache(maxsize=16)
def _inverse_table(ell):
    table = np.zeros(ell, dtype=np.int64)
    for v in range(1, ell):
        table[v] = pow(v, -1, ell)
    return table


EXHAUSTIVE_CAP = 2 ** 22


def _all_vectors(length, ell):
    total = ell ** length
    if total > EXHAUSTIVE_CAP:
        raise ValueError(f"exhaustive enumeration of {ell}^{length} matrices exceeds {EXHAUSTIVE_CAP}")
    codes = np.arange(total, dtype=np.int64)
    powers = ell ** np.arange(length, dtype=np.int64)
    return (codes[:, None] // powers[None, :]) % ell


def corank_histogram_uniform(rows, cols, ell):
    """Exact kernel-dimension counts over all ell^(rows*cols) matrices (oracle)."""
    mats = _all_vectors(rows * cols, ell).reshape((ell ** (rows * cols), rows, cols))
    coranks = cols - batch_rank(mats, ell)
    values, counts = np.unique(coranks, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def corank_histogram_alternating(n, ell=2):
    """Exact kernel-dimension counts over all alternating n x n matrices (oracle)."""
    iu = np.triu_indices(n, k=1)
    upper = _all_vectors(len(iu[0]), ell)
    mats = np.zeros((len(upper), n, n), dtype=np.int64)
    mats[:, iu[0], iu[1]] = upper
    mats[:, iu[1], iu[0]] = (-upper) % ell
    coranks = n - batch_rank(mats, ell)
    values, counts = np.unique(coranks, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}
