import itertools

import numpy as np

from .field_matrix import FieldMatrix, check_modulus, rref_mod, gaussian_binomial

DEFAULT_ENUMERATION_CAP = 2 ** 20


class EnumerationCapError(RuntimeError):
    pass


class Subspace(object):
    """
    Subspace of F_ell^n stored by its reduced row-echelon basis.

    The RREF basis is unique, so equality and hashing compare bases directly.
    Quotient coordinates of a vector are its entries at the non-pivot columns after
    reduction by the basis rows.
    """

    __slots__ = ("n", "ell", "basis", "pivots")

    def __init__(self, n, ell, basis=None, _reduced=False):
        self.n = int(n)
        self.ell = check_modulus(ell)
        if basis is None or len(basis) == 0:
            basis = np.zeros((0, self.n), dtype=np.int64)
            pivots = []
        elif _reduced:
            basis = np.asarray(basis, dtype=np.int64)
            pivots = [int(np.nonzero(row)[0][0]) for row in basis]
        else:
            r, pivots = rref_mod(np.asarray(basis, dtype=np.int64).reshape(-1, self.n), self.ell)
            basis = r[:len(pivots)]
        basis = np.array(basis, dtype=np.int64).reshape(-1, self.n)
        basis.setflags(write=False)
        self.basis = basis
        self.pivots = tuple(pivots)

    @classmethod
    def span(cls, vectors, n, ell):
        vectors = [np.asarray(v, dtype=np.int64) for v in vectors]
        if not vectors:
            return cls(n, ell)
        return cls(n, ell, np.stack(vectors))

    @classmethod
    def zero(cls, n, ell):
        return cls(n, ell)

    @classmethod
    def full(cls, n, ell):
        return cls(n, ell, np.eye(n, dtype=np.int64), _reduced=True)

    @property
    def dim(self):
        return len(self.pivots)

    @property
    def non_pivots(self):
        return [c for c in range(self.n) if c not in self.pivots]

    def __repr__(self):
        return f"Subspace(n={self.n}, ell={self.ell}, dim={self.dim}, basis={self.basis.tolist()})"

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.n == other.n and self.ell == other.ell
                and self.pivots == other.pivots and bool(np.array_equal(self.basis, other.basis)))

    def __hash__(self):
        return hash((self.n, self.ell, self.pivots, self.basis.tobytes()))

    def sort_key(self):
        return (self.dim, self.pivots, tuple(self.basis.reshape(-1).tolist()))

    def reduce(self, v):
        """Representative of v + self with zeros at every pivot column."""
        v = np.asarray(v, dtype=np.int64) % self.ell
        for row, p in zip(self.basis, self.pivots):
            if v[p]:
                v = (v - v[p] * row) % self.ell
        return v

    def quotient_coords(self, v):
        """Coordinates of v in F_ell^n / self (a linear map onto F_ell^{n - dim})."""
        return self.reduce(v)[self.non_pivots]

    def quotient_matrix(self):
        """Matrix of the projection F_ell^n -> F_ell^n / self in quotient coordinates."""
        eye = np.eye(self.n, dtype=np.int64)
        cols = [self.quotient_coords(eye[k]) for k in range(self.n)]
        return FieldMatrix(np.stack(cols, axis=1) if cols else np.zeros((0, 0)), self.ell,
                           shape=(self.n - self.dim, self.n))

    def contains(self, v):
        return not self.reduce(v).any()

    def contains_subspace(self, other):
        return all(self.contains(row) for row in other.basis)

    def __le__(self, other):
        return other.contains_subspace(self)

    def __add__(self, other):
        assert self.n == other.n and self.ell == other.ell
        if not other.dim:
            return self
        if not self.dim:
            return other
        return Subspace(self.n, self.ell, np.concatenate([self.basis, other.basis]))

    def intersection(self, other):
        """Zassenhaus: rows (u, u) and (w, 0); rows with zero left half span the intersection."""
        assert self.n == other.n and self.ell == other.ell
        if not self.dim or not other.dim:
            return Subspace.zero(self.n, self.ell)
        top = np.concatenate([self.basis, self.basis], axis=1)
        bottom = np.concatenate([other.basis, np.zeros_like(other.basis)], axis=1)
        r, pivots = rref_mod(np.concatenate([top, bottom]), self.ell)
        rows = [r[i, self.n:] for i, p in enumerate(pivots) if p >= self.n]
        return Subspace.span(rows, self.n, self.ell)

    def image(self, matrix):
        """Image of the subspace under `matrix` acting on column vectors."""
        m = matrix if isinstance(matrix, FieldMatrix) else FieldMatrix(matrix, self.ell)
        if not self.dim:
            return Subspace.zero(m.rows, self.ell)
        return Subspace(m.rows, self.ell, (m @ self.basis.T).array.T)

    def preimage(self, matrix):
        """{x : matrix x in self}."""
        m = matrix if isinstance(matrix, FieldMatrix) else FieldMatrix(matrix, self.ell)
        q = self.quotient_matrix()
        composite = q @ m
        return Subspace(m.cols, self.ell, composite.kernel_basis())

    def is_invariant(self, matrix):
        m = matrix if isinstance(matrix, FieldMatrix) else FieldMatrix(matrix, self.ell)
        return all(self.contains(m.apply(row)) for row in self.basis)

    def vectors(self):
        """Every vector of the subspace (ell^dim of them)."""
        for coeffs in itertools.product(range(self.ell), repeat=self.dim):
            yield (np.asarray(coeffs, dtype=np.int64) @ self.basis) % self.ell if self.dim else \
                np.zeros(self.n, dtype=np.int64)


def kernel_basis(m):
    """Right kernel of m as a Subspace."""
    return Subspace(m.cols, m.ell, m.kernel_basis())


def enumerate_subspaces(n, ell, cap=DEFAULT_ENUMERATION_CAP):
    """
    Every subspace of F_ell^n exactly once, ordered by dimension, then pivot pattern,
    then the free RREF entries in lexicographic order.
    """
    ell = check_modulus(ell)
    if ell ** n > cap:
        raise EnumerationCapError(f"ell^n = {ell}^{n} exceeds the enumeration cap {cap}")
    out = []
    for k in range(n + 1):
        for pivots in itertools.combinations(range(n), k):
            free = [(i, c) for i, p in enumerate(pivots) for c in range(p + 1, n) if c not in pivots]
            for fill in itertools.product(range(ell), repeat=len(free)):
                basis = np.zeros((k, n), dtype=np.int64)
                for i, p in enumerate(pivots):
                    basis[i, p] = 1
                for (i, c), v in zip(free, fill):
                    basis[i, c] = v
                out.append(Subspace(n, ell, basis, _reduced=True))
    assert len(out) == sum(gaussian_binomial(j, n, ell) for j in range(n + 1))
    return out
