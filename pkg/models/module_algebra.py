''' Finite models of twistable modules.

A module N is represented by its omega^2-torsion M2 = F_l^{2d}, a nilpotent endomorphism
omega of M2 with ker omega = im omega = N[omega], and the action matrices of labeled Galois
classes commuting with omega. Everything downstream (fixed spaces of subquotients,
connecting maps, Tamagawa ratios, favored and cofavored tests) is linear algebra on
this data.

Coordinates: vectors of M2 are ambient; vectors of N[omega] can also be written in the
"local" coordinates given by the RREF basis of ker omega.
'''
import hashlib
import itertools
import json
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from linalg import FieldMatrix, Subspace, EnumerationCapError, enumerate_subspaces, kernel_basis, rref_mod
from utils import get_logger
from .simplex import OPTIMAL, linprog_exact

logger = get_logger(__name__)

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")

# submodules are enumerated through the l^d vectors of N[omega]
SUBMODULE_CAP = 2 ** 12

N_OMEGA = "N"
N_OMEGA_MOD_T = "N/T"
QUOTIENT_OMEGA = "(N/T)[omega]"
SUBQUOTIENTS = (N_OMEGA, N_OMEGA_MOD_T, QUOTIENT_OMEGA)


def _as_matrix(m, ell, n=None):
    fm = m if isinstance(m, FieldMatrix) else FieldMatrix(m, ell)
    if fm.ell != ell:
        raise ValueError(f"matrix is over F_{fm.ell}, expected F_{ell}")
    if n is not None and fm.shape != (n, n):
        raise ValueError(f"expected a {n} x {n} matrix, got {fm.shape}")
    return fm


def _solve(a, b, ell):
    """A particular solution of a x = b over F_ell, or None."""
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    aug = np.concatenate([a, np.asarray(b, dtype=np.int64).reshape(-1, 1)], axis=1)
    r, pivots = rref_mod(aug, ell)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, p in enumerate(pivots):
        x[p] = r[i, cols]
    return x


def _profile_labels(profile):
    labels = getattr(profile, "labels", profile)
    return [str(l[1]) if isinstance(l, tuple) else str(l) for l in labels]


@dataclass
class ConnectingMap:
    """
    delta_sigma : N[omega]^sigma -> N[omega]_sigma, all in local coordinates.

    matrix maps coordinates in `domain.basis` to quotient coordinates modulo `augmentation`.
    """
    label: str
    domain: Subspace
    augmentation: Subspace
    matrix: FieldMatrix


@dataclass
class DimensionProfile:
    d_N: dict
    d_NT: dict

    def difference(self, labels=None):
        labels = list(self.d_N) if labels is None else labels
        return tuple(self.d_N[l] - self.d_NT[l] for l in labels)


@dataclass
class FavoredResult:
    favored: bool
    worst: Subspace
    ratio: Fraction


@dataclass
class Separation:
    """
    Exactly one of `superlative` (w with <w, f> > 0 for every f) and `certificate`
    (lambda >= 0 summing to 1 with sum lambda_i f_i = 0) is set.
    """
    superlative: list = None
    certificate: list = None
    margin: Fraction = None


@dataclass
class PotentialFavoredResult:
    favored: bool
    condition_holds: bool
    violating: Subspace
    labels: tuple
    vectors: list
    submodules: list
    separation: Separation

    @property
    def superlative(self):
        return self.separation.superlative

    @property
    def certificate(self):
        return self.separation.certificate


class GaloisModuleSpec(object):
    """
    Args:
        ell: prime
        omega: 2d x 2d matrix with omega^2 = 0 and rank d
        classes: {label: 2d x 2d action matrix}, the classes G_1
        g0_classes: the larger class set G_0 (defaults to G_1)
        weights: {label: weight} for the G_0 sums, default 1 each
        mult_table: rows (a, b, c) asserting rho(a) rho(b) = rho(c)
        dual: GaloisModuleSpec of the dual module
        self_duality: d x d candidate isomorphism N[omega] -> N^dual[omega] in local coordinates
    """

    def __init__(self, ell, omega, classes, g0_classes=None, weights=None, mult_table=None, dual=None,
                 self_duality=None, name=None):
        omega = _as_matrix(omega, ell)
        self.ell = omega.ell
        if omega.rows != omega.cols or omega.rows % 2 or omega.rows == 0:
            raise ValueError(f"omega must be a nonempty square matrix of even size, got {omega.shape}")
        self.n = omega.rows
        self.d = self.n // 2
        if (omega @ omega).array.any():
            raise ValueError("omega^2 must vanish")
        if omega.rank() != self.d:
            raise ValueError(f"omega must have rank d = {self.d}, got {omega.rank()}")
        self.omega = omega
        if not classes:
            raise ValueError("at least one class is required")
        self.classes = {str(k): _as_matrix(v, self.ell, self.n) for k, v in classes.items()}
        if g0_classes is None:
            self.g0_classes = dict(self.classes)
        else:
            self.g0_classes = {str(k): _as_matrix(v, self.ell, self.n) for k, v in g0_classes.items()}
        for label, rho in self.actions().items():
            if not rho.is_invertible():
                raise ValueError(f"action of {label} is not invertible")
            if rho @ omega != omega @ rho:
                raise ValueError(f"action of {label} does not commute with omega")
        weights = weights or {}
        self.weights = {label: Fraction(weights.get(label, 1)) for label in self.g0_classes}
        self.mult_table = [tuple(str(x) for x in row) for row in (mult_table or [])]
        for a, b, c in self.mult_table:
            if self.action(a) @ self.action(b) != self.action(c):
                raise ValueError(f"multiplication table entry {a} * {b} = {c} does not hold")
        self.n_omega = kernel_basis(omega)
        self._pivots = list(self.n_omega.pivots)
        lifts = []
        for row in self.n_omega.basis:
            x = _solve(omega.array, row, self.ell)
            assert x is not None, "ker omega != im omega"
            lifts.append(x)
        self._lifts = np.array(lifts, dtype=np.int64).reshape(self.d, self.n)
        self.dual = dual
        self.self_duality = None if self_duality is None else _as_matrix(self_duality, self.ell)
        self.name = name
        self._local = {}
        self._fixed = {}
        self._submodules = {}

    def __repr__(self):
        return f"GaloisModuleSpec(name={self.name}, ell={self.ell}, d={self.d}, classes={list(self.classes)})"

    def actions(self):
        out = dict(self.classes)
        for k, v in self.g0_classes.items():
            out.setdefault(k, v)
        return out

    def action(self, label):
        label = str(label)
        if label in self.classes:
            return self.classes[label]
        if label in self.g0_classes:
            return self.g0_classes[label]
        raise KeyError(f"Unknown class label {label}")

    # coordinates on N[omega]

    def to_local(self, v):
        v = np.asarray(v, dtype=np.int64) % self.ell
        assert self.n_omega.contains(v), "vector is not in N[omega]"
        return v[self._pivots]

    def from_local(self, c):
        return (np.asarray(c, dtype=np.int64) @ self.n_omega.basis) % self.ell

    def local(self, label):
        """Action of `label` restricted to N[omega], d x d in local coordinates."""
        label = str(label)
        if label not in self._local:
            rho = self.action(label)
            cols = [self.to_local(rho.apply(b)) for b in self.n_omega.basis]
            self._local[label] = FieldMatrix(np.stack(cols, axis=1), self.ell)
        return self._local[label]

    def local_span(self, vectors):
        """Ambient subspace spanned by vectors given in local coordinates."""
        return Subspace.span([self.from_local(v) for v in vectors], self.n, self.ell)

    def to_local_subspace(self, T):
        return Subspace.span([self.to_local(row) for row in T.basis], self.d, self.ell)

    def from_local_subspace(self, S):
        return Subspace.span([self.from_local(row) for row in S.basis], self.n, self.ell)

    def check_submodule(self, T):
        if T.n != self.n or T.ell != self.ell:
            raise ValueError("T does not live in this module")
        if not T <= self.n_omega:
            raise ValueError("T is not contained in N[omega]")
        for label, rho in self.actions().items():
            if not T.is_invariant(rho):
                raise ValueError(f"T is not action-closed (fails for {label})")
        return T

    # fixed spaces

    def _fixed_in_quotient(self, rho, W, T):
        """dim of the sigma-fixed part of W / T."""
        if W.dim == 0:
            return 0
        diff = (rho - FieldMatrix.identity(self.n, self.ell)) @ FieldMatrix(W.basis.T, self.ell)
        image = T.quotient_matrix() @ diff
        return W.dim - image.rank() - T.dim

    def fixed_dim(self, label, which=N_OMEGA, T=None):
        """
        dim H^0(<sigma>, X) for X one of
            'N'             N[omega]
            'N/T'           N[omega] / T
            '(N/T)[omega]'  omega^{-1}(T) / T inside M2
        """
        if which not in SUBQUOTIENTS:
            raise NotImplementedError(f"Unknown subquotient {which}")
        rho = self.action(label)
        if which == N_OMEGA or T is None:
            T = Subspace.zero(self.n, self.ell)
        key = (str(label), which, T)
        if key in self._fixed:
            return self._fixed[key]
        if T.dim:
            self.check_submodule(T)
        W = T.preimage(self.omega) if which == QUOTIENT_OMEGA else self.n_omega
        value = self._fixed_in_quotient(rho, W, T)
        self._fixed[key] = value
        return value

    def dimension_profile(self, T, labels=None):
        labels = list(self.actions()) if labels is None else labels
        return DimensionProfile(d_N={l: self.fixed_dim(l) for l in labels},
                                d_NT={l: self.fixed_dim(l, QUOTIENT_OMEGA, T) for l in labels})

    def difference_vector(self, T, labels=None):
        """(d_N(sigma) - d_{N/T}(sigma))_sigma over `labels` (the G_0 classes by default)."""
        labels = list(self.g0_classes) if labels is None else labels
        return self.dimension_profile(T, labels).difference(labels)

    # connecting maps

    def _lift(self, c):
        return (np.asarray(c, dtype=np.int64) @ self._lifts) % self.ell

    def delta_local(self, label, c):
        """(sigma - 1) x for a lift x of the local vector c; a representative in N[omega]."""
        rho = self.action(label)
        x = self._lift(c)
        return self.to_local((rho.apply(x) - x) % self.ell)

    def connecting_map(self, label):
        rho_loc = self.local(label)
        shifted = rho_loc - FieldMatrix.identity(self.d, self.ell)
        domain = kernel_basis(shifted)
        augmentation = Subspace(self.d, self.ell, shifted.array.T)
        cols = []
        for x in domain.basis:
            rep = self.delta_local(label, x)
            # another lift differs by an element of N[omega]
            for b in self.n_omega.basis:
                alt = self.action(label).apply(self._lift(x) + b) - self._lift(x) - b
                assert augmentation.contains((self.to_local(alt % self.ell) - rep) % self.ell)
            cols.append(augmentation.quotient_coords(rep))
        rows = self.d - augmentation.dim
        if cols:
            matrix = FieldMatrix(np.stack(cols, axis=1), self.ell, shape=(rows, len(cols)))
        else:
            matrix = FieldMatrix.zeros(rows, 0, self.ell)
        return ConnectingMap(label=str(label), domain=domain, augmentation=augmentation, matrix=matrix)

    def is_equivariant(self, phi, target=None):
        target = self if target is None else target
        common = [l for l in self.actions() if l in target.actions()]
        return all(phi @ self.local(l) == target.local(l) @ phi for l in common)

    def commutes_with_connecting(self, phi, target=None):
        """
        phi: N[omega] -> target N[omega] (local coordinates). True iff
        delta_sigma(phi x) = phi(delta_sigma x) in the target coinvariants for every sigma in G_1.

        Raises:
            ValueError: phi is not equivariant, or the class sets differ
        """
        target = self if target is None else target
        phi = _as_matrix(phi, self.ell)
        if phi.shape != (target.d, self.d):
            raise ValueError(f"expected a {target.d} x {self.d} map, got {phi.shape}")
        if set(target.classes) != set(self.classes):
            raise ValueError("source and target carry different class labels")
        if not self.is_equivariant(phi, target):
            raise ValueError("phi is not equivariant")
        for label in self.classes:
            dst = target.connecting_map(label)
            for x in self.connecting_map(label).domain.basis:
                lhs = target.delta_local(label, phi.apply(x))
                rhs = phi.apply(self.delta_local(label, x))
                if not dst.augmentation.contains((lhs - rhs) % self.ell):
                    return False
        return True

    def check_self_duality(self):
        """Whether the supplied candidate is an isomorphism onto the dual commuting with connecting maps."""
        if self.dual is None or self.self_duality is None:
            raise ValueError("a dual spec and a candidate self-duality map are both required")
        if not self.self_duality.is_invertible():
            return False
        return self.commutes_with_connecting(self.self_duality, target=self.dual)

    # submodules

    def _closure(self, S, gens):
        while True:
            grown = S
            for g in gens:
                grown = grown + S.image(g)
            if grown == S:
                return S
            S = grown

    def enumerate_submodules(self, cap=SUBMODULE_CAP):
        """
        Every action-closed subspace of N[omega] (ambient coordinates), as sums of cyclic
        submodules, sorted by dimension then RREF basis.
        """
        if self.ell ** self.d > cap:
            raise EnumerationCapError(f"l^d = {self.ell}^{self.d} exceeds the submodule cap {cap}")
        if cap in self._submodules:
            return self._submodules[cap]
        gens = [self.local(l) for l in self.actions()]
        cyclic = set()
        for coeffs in itertools.product(range(self.ell), repeat=self.d):
            if any(coeffs):
                cyclic.add(self._closure(Subspace.span([coeffs], self.d, self.ell), gens))
        found = {Subspace.zero(self.d, self.ell)} | cyclic
        frontier = list(found)
        while frontier:
            grown = []
            for A in frontier:
                for C in cyclic:
                    S = A + C
                    if S not in found:
                        found.add(S)
                        grown.append(S)
            frontier = grown
        out = [self.from_local_subspace(S) for S in sorted(found, key=Subspace.sort_key)]
        logger.debug(f"{self.name}: {len(out)} submodules")
        self._submodules[cap] = out
        return out

    def tamagawa_ratio(self, T, profile):
        """prod_p l^{d_{N/T}(c_p) - d_N(c_p)} over the class labels of `profile`."""
        exponent = 0
        for label, count in Counter(_profile_labels(profile)).items():
            exponent += count * (self.fixed_dim(label, QUOTIENT_OMEGA, T) - self.fixed_dim(label))
        return Fraction(self.ell) ** exponent

    def is_favored(self, profile, cap=SUBMODULE_CAP):
        labels = _profile_labels(profile)
        worst, ratio = None, None
        for T in self.enumerate_submodules(cap):
            r = self.tamagawa_ratio(T, labels)
            if ratio is None or r > ratio:
                worst, ratio = T, r
        return FavoredResult(favored=ratio <= 1, worst=worst, ratio=ratio)

    def is_cofavored(self, T):
        self.check_submodule(T)
        return all(self.fixed_dim(l, QUOTIENT_OMEGA, T) == self.fixed_dim(l) for l in self.classes)

    def cofavored_submodules(self, cap=SUBMODULE_CAP):
        return [T for T in self.enumerate_submodules(cap) if self.is_cofavored(T)]

    def is_uncofavored(self, cap=SUBMODULE_CAP):
        return len(self.cofavored_submodules(cap)) == 2

    def is_potentially_favored(self, cap=SUBMODULE_CAP):
        labels = tuple(self.g0_classes)
        vectors, reps = [], []
        violating = None
        for T in self.enumerate_submodules(cap):
            f = self.difference_vector(T, labels)
            if violating is None and sum(self.weights[l] * v for l, v in zip(labels, f)) < 0:
                violating = T
            if any(f) and f not in vectors:
                vectors.append(f)
                reps.append(T)
        separation = separate_from_origin(vectors, len(labels))
        holds = violating is None
        return PotentialFavoredResult(favored=holds and separation.superlative is not None, condition_holds=holds,
                                      violating=violating, labels=labels, vectors=vectors, submodules=reps,
                                      separation=separation)


def separate_from_origin(vectors, dim):
    """
    Either w with <w, f> > 0 for all f (maximize t s.t. <w, f> >= t, |w_i| <= 1) or a convex
    combination of the f equal to zero. Exact rational pivoting; the result is verified.
    """
    vectors = [tuple(Fraction(v) for v in f) for f in vectors]
    if not vectors:
        return Separation(superlative=[Fraction(0)] * dim)
    # variables: v_i = w_i + 1 in [0, 2], then t = t_plus - t_minus
    k = dim
    A_ub, b_ub = [], []
    for f in vectors:
        A_ub.append([-x for x in f] + [1, -1])
        b_ub.append(-sum(f))
    for i in range(k):
        A_ub.append([int(i == j) for j in range(k)] + [0, 0])
        b_ub.append(2)
    res = linprog_exact([0] * k + [-1, 1], A_ub, b_ub)
    assert res.status == OPTIMAL
    margin = res.x[k] - res.x[k + 1]
    if margin > 0:
        w = [v - 1 for v in res.x[:k]]
        assert all(sum(a * b for a, b in zip(w, f)) > 0 for f in vectors)
        return Separation(superlative=w, margin=margin)
    A_eq = [[f[i] for f in vectors] for i in range(k)] + [[1] * len(vectors)]
    b_eq = [0] * k + [1]
    res = linprog_exact([0] * len(vectors), A_eq=A_eq, b_eq=b_eq)
    assert res.status == OPTIMAL, "neither a superlative nor a certificate exists"
    lam = res.x
    assert all(sum(l * f[i] for l, f in zip(lam, vectors)) == 0 for i in range(k)) and sum(lam) == 1
    return Separation(certificate=lam, margin=margin)


def direct_sum(first, second, name=None):
    if first.ell != second.ell:
        raise ValueError("direct sums need a common prime")
    if set(first.classes) != set(second.classes) or set(first.g0_classes) != set(second.g0_classes):
        raise ValueError("direct sums need identical class labels")
    ell = first.ell

    def block(a, b):
        out = np.zeros((a.rows + b.rows, a.cols + b.cols), dtype=np.int64)
        out[:a.rows, :a.cols] = a.array
        out[a.rows:, a.cols:] = b.array
        return FieldMatrix(out, ell)

    return GaloisModuleSpec(ell, block(first.omega, second.omega),
                            {l: block(m, second.classes[l]) for l, m in first.classes.items()},
                            g0_classes={l: block(m, second.g0_classes[l]) for l, m in first.g0_classes.items()},
                            weights=first.weights,
                            name=name or f"{first.name}+{second.name}")


def power(spec, a):
    if a < 1:
        raise ValueError(f"power needs a >= 1, got {a}")
    out = spec
    for _ in range(a - 1):
        out = direct_sum(out, spec, name=f"{spec.name}^{a}")
    return out


def tensor_submodule(spec, A, big):
    """A (x) N[omega] inside N^{+a}, for a subspace A of F_l^a."""
    vectors = []
    for a in A.basis:
        for b in spec.n_omega.basis:
            vectors.append(np.concatenate([(int(ai) * b) % spec.ell for ai in a]))
    return Subspace.span(vectors, big.n, spec.ell)


@dataclass
class PowerReport:
    cofavored: list
    tensor_forms: list
    counterexamples: list
    missing: list

    @property
    def ok(self):
        return not self.counterexamples


def verify_cofavored_powers(spec, a, cap=SUBMODULE_CAP):
    """
    Enumerate the cofavored submodules of N^{+a} and check each is A (x) N[omega].
    `missing` lists tensor forms that fail to be cofavored.
    """
    big = power(spec, a)
    cofavored = big.cofavored_submodules(cap)
    forms = [tensor_submodule(spec, A, big) for A in enumerate_subspaces(a, spec.ell, cap)]
    form_set = set(forms)
    cof_set = set(cofavored)
    counter = [T for T in cofavored if T not in form_set]
    missing = [T for T in forms if T not in cof_set]
    if counter:
        logger.warning(f"{len(counter)} cofavored submodules of {big.name} are not of tensor form")
    return PowerReport(cofavored=cofavored, tensor_forms=forms, counterexamples=counter, missing=missing)


@dataclass
class GraphReport:
    expected: set
    found: set
    commuting: list
    hypotheses: bool

    @property
    def match(self):
        return self.expected == self.found


def verify_graph_structure(first, second, cap=SUBMODULE_CAP):
    """
    Cofavored submodules of N1 + N2 against {0, 0 + N2[omega], (N1 + N2)[omega]} and the graphs
    {(x, beta x)} of maps beta commuting with the connecting maps.
    """
    total = direct_sum(first, second)
    found = set(total.cofavored_submodules(cap))
    zero1 = np.zeros(first.n, dtype=np.int64)
    expected = {Subspace.zero(total.n, total.ell), total.n_omega,
                Subspace.span([np.concatenate([zero1, b]) for b in second.n_omega.basis], total.n, total.ell)}
    count = first.ell ** (first.d * second.d)
    if count > cap:
        raise EnumerationCapError(f"{count} candidate maps exceed the cap {cap}")
    commuting = []
    for entries in itertools.product(range(first.ell), repeat=first.d * second.d):
        beta = FieldMatrix(entries, first.ell, shape=(second.d, first.d))
        if not first.is_equivariant(beta, second) or not first.commutes_with_connecting(beta, target=second):
            continue
        commuting.append(beta)
        eye = np.eye(first.d, dtype=np.int64)
        expected.add(Subspace.span([np.concatenate([first.from_local(eye[i]), second.from_local(beta.apply(eye[i]))])
                                    for i in range(first.d)], total.n, total.ell))
    hypotheses = first.is_uncofavored(cap) and second.is_uncofavored(cap)
    return GraphReport(expected=expected, found=found, commuting=commuting, hypotheses=hypotheses)


# fixtures

def _matrix_json(m):
    return m.array.tolist()


def spec_to_json(spec):
    doc = {"name": spec.name, "ell": spec.ell, "d": spec.d, "omega": _matrix_json(spec.omega),
           "classes": [{"label": l, "matrix": _matrix_json(m)} for l, m in spec.classes.items()]}
    if set(spec.g0_classes) != set(spec.classes) or any(spec.g0_classes[l] != m for l, m in spec.classes.items()):
        doc["g0_classes"] = [{"label": l, "matrix": _matrix_json(m)} for l, m in spec.g0_classes.items()]
    if any(w != 1 for w in spec.weights.values()):
        doc["weights"] = {l: str(w) for l, w in spec.weights.items()}
    if spec.mult_table:
        doc["mult_table"] = [list(row) for row in spec.mult_table]
    if spec.dual is not None:
        doc["dual"] = spec_to_json(spec.dual)
    if spec.self_duality is not None:
        doc["self_duality"] = _matrix_json(spec.self_duality)
    return doc


def canonical_hash(spec):
    doc = spec_to_json(spec) if isinstance(spec, GaloisModuleSpec) else spec
    doc = {k: v for k, v in doc.items() if k != "name"}
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def fixture_path(name):
    return os.path.join(FIXTURE_DIR, name if name.endswith(".json") else name + ".json")


def load_fixture(source):
    """
    GaloisModuleSpec from a dict, a JSON path or a bundled fixture name.

    Format: {ell, d, omega, classes: [{label, matrix, weight?}], g0_classes?, mult_table?,
             dual?, self_duality?}
    """
    if isinstance(source, dict):
        doc = source
    else:
        path = source if os.path.exists(source) else fixture_path(source)
        with open(path, "r") as f:
            doc = json.load(f)
    ell = int(doc["ell"])
    omega = doc["omega"]
    if "d" in doc and 2 * int(doc["d"]) != len(omega):
        raise ValueError(f"fixture declares d = {doc['d']} but omega has size {len(omega)}")
    classes = {c["label"]: c["matrix"] for c in doc["classes"]}
    weights = {c["label"]: Fraction(str(c["weight"])) for c in doc["classes"] if "weight" in c}
    g0 = None
    if doc.get("g0_classes"):
        g0 = {c["label"]: c["matrix"] for c in doc["g0_classes"]}
        weights.update({c["label"]: Fraction(str(c["weight"])) for c in doc["g0_classes"] if "weight" in c})
    weights.update({l: Fraction(str(w)) for l, w in doc.get("weights", {}).items()})
    dual = load_fixture(doc["dual"]) if doc.get("dual") else None
    return GaloisModuleSpec(ell, omega, classes, g0_classes=g0, weights=weights, mult_table=doc.get("mult_table"),
                            dual=dual, self_duality=doc.get("self_duality"), name=doc.get("name"))
