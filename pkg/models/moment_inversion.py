''' From moments back to ranks.

Interpolation at the geometric nodes 1, l, ..., l^{m-1} (optionally also -l^k), explicit
bounds on the tail coefficients of a function small at those nodes, and a finite
inversion of sum_j l^{mj} P(j) = M_m.
'''
import json
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

import numpy as np

from utils import get_logger
from .rank_dist import RankDistribution

logger = get_logger(__name__)

MAX_J = 12
MAX_J_INEXACT = 8
NEGATIVE_TOL = 1e-9


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(float(x))


def _is_exact(x):
    return isinstance(x, (Fraction, int, np.integer, str)) or (isinstance(x, Decimal) and x.is_finite())


@dataclass
class MomentVector:
    """
    Values of f at the nodes l^k, k = 0..m-1, and in signed mode also at -l^k.

    Args:
        ell: node base
        values: f(l^k)
        signed_values: f(-l^k) or None
        bound: B, a bound on sum_i |a_i| l^{m i} for the power series of f. The node values
            only give the floor `bound_floor`, so coefficient bounds need B supplied explicitly.
    """
    ell: int
    values: list
    signed_values: list = None
    bound: object = None

    def __post_init__(self):
        self.values = [_as_fraction(v) for v in self.values]
        if self.signed_values is not None:
            self.signed_values = [_as_fraction(v) for v in self.signed_values]
            if len(self.signed_values) != len(self.values):
                raise ValueError("signed values must match the unsigned node count")
        if self.m < 1:
            raise ValueError("at least one node value is required")
        if self.bound is not None:
            self.bound = _as_fraction(self.bound)
            if self.bound < self.bound_floor:
                raise ValueError(f"bound {self.bound} is below the largest node value {self.bound_floor}")

    @property
    def m(self):
        return len(self.values)

    @property
    def signed(self):
        return self.signed_values is not None

    @property
    def bound_floor(self):
        return max(abs(v) for v in self.node_values())

    def nodes(self):
        ell = Fraction(self.ell)
        out = [ell ** k for k in range(self.m)]
        if self.signed:
            out += [-(ell ** k) for k in range(self.m)]
        return out

    def node_values(self):
        return self.values + (self.signed_values or [])

    def coefficient_bounds(self, eps):
        """`tail_coefficient_bounds` for a function within eps of zero at these nodes, with this B."""
        if self.bound is None:
            raise ValueError("coefficient bounds need an explicit bound B")
        return tail_coefficient_bounds(self.bound, self.m, eps, self.ell, "signed" if self.signed else "unsigned")

    def to_json(self):
        doc = {"ell": self.ell, "values": [str(v) for v in self.values]}
        if self.bound is not None:
            doc["bound"] = str(self.bound)
        if self.signed:
            doc["signed_values"] = [str(v) for v in self.signed_values]
        return doc

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(ell=doc["ell"], values=doc["values"], signed_values=doc.get("signed_values"),
                   bound=doc.get("bound"))


class Polynomial(object):
    """Exact polynomial with Fraction coefficients, lowest degree first."""

    def __init__(self, coeffs):
        coeffs = [_as_fraction(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial(other)
        return self.coeffs == other.coeffs

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial([c * _as_fraction(other) for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1) if self.coeffs and other.coeffs else []
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]})"


def interpolate_geometric(values):
    """
    The unique polynomial g of degree < #nodes with g = f on the nodes, built in the basis
    p_j(z) = p(z) / (1 - z / z_j), p(z) = prod_i (1 - z / z_i):

        g(z) = sum_j f(z_j) p_j(z) / p_j(z_j)
    """
    nodes = values.nodes()
    g = Polynomial([])
    for j, (zj, fj) in enumerate(zip(nodes, values.node_values())):
        if fj == 0:
            continue
        pj = Polynomial([1])
        for i, zi in enumerate(nodes):
            if i != j:
                pj = pj * Polynomial([1, -1 / zi])
        g = g + pj * (fj / pj(zj))
    return g


@dataclass(frozen=True)
class CoefficientBound:
    """
    Bounds |a_i| <= bound(i) for the coefficients of f(z) = sum_i a_i z^i.

    With R = l^m, p(z) = prod (1 - z / z_j) over the nodes, g the interpolant of f and
    q = (f - g) / p analytic on |z| <= R:

        |a_i| <= R^{-i} min(B, g_cap [i < #nodes] + q_cap sum_{k <= min(i, #nodes)} |p_k| R^k)

    `constants` holds
        nodes          number of interpolation nodes (m, or 2m signed)
        node_floor     min_j |p_j(z_j)|
        basis_cap      max_j of the bound prod_{i != j} (1 + R / |z_i|) for |p_j| on |z| = R
        g_cap          bound for |g| on |z| = R, eps sum_j cap_j / |p_j(z_j)|
        contour_floor  prod_j (R / |z_j| - 1) <= |p| on |z| = R
        q_cap          (B + g_cap) / contour_floor >= |q| on |z| = R
        p_coeffs       |p_k|
    In signed mode `unsigned` is the bound from the nodes l^k alone, which the signed
    hypothesis also satisfies; the smaller of the two is returned.
    """
    m: int
    eps: Fraction
    B: Fraction
    ell: int
    mode: str
    constants: dict = field(default_factory=dict)
    unsigned: object = None

    def bound(self, i):
        c = self.constants
        R = Fraction(self.ell) ** self.m
        series = sum(c["p_coeffs"][k] * R ** k for k in range(min(i, c["nodes"]) + 1))
        refined = c["q_cap"] * series + (c["g_cap"] if i < c["nodes"] else 0)
        value = min(self.B, refined) / R ** i
        if self.unsigned is not None:
            value = min(value, self.unsigned.bound(i))
        return value

    def bounds(self, count):
        return [self.bound(i) for i in range(count)]


def _contour_constants(nodes, R, B, eps):
    radii = [abs(z) for z in nodes]
    contour_floor = Fraction(1)
    for r in radii:
        contour_floor *= R / r - 1
    g_cap, node_floor, basis_cap = Fraction(0), None, Fraction(0)
    for j, zj in enumerate(nodes):
        at_node, cap = Fraction(1), Fraction(1)
        for i, zi in enumerate(nodes):
            if i != j:
                at_node *= 1 - zj / zi
                cap *= 1 + R / radii[i]
        at_node = abs(at_node)
        node_floor = at_node if node_floor is None else min(node_floor, at_node)
        basis_cap = max(basis_cap, cap)
        g_cap += eps * cap / at_node
    p = Polynomial([1])
    for z in nodes:
        p = p * Polynomial([1, -1 / z])
    return {"nodes": len(nodes), "node_floor": node_floor, "basis_cap": basis_cap, "g_cap": g_cap,
            "contour_floor": contour_floor, "q_cap": (B + g_cap) / contour_floor,
            "p_coeffs": tuple(abs(a) for a in p.coeffs)}


def tail_coefficient_bounds(B, m, eps, ell, mode="unsigned"):
    """
    Explicit coefficient bounds for f with sum_i |a_i| l^{m i} <= B and |f| <= eps at the
    nodes l^k, k < m (also at -l^k in signed mode). See CoefficientBound for the estimate.

    For small i the bound is of order B / prod_{k<m} (l^{m-k} - 1), roughly B l^{-m(m+1)/2},
    and its square in signed mode; for i >= #nodes it decays by exactly l^{-m} per step.
    """
    if mode not in ("unsigned", "signed"):
        raise NotImplementedError(f"Unknown bound mode {mode}")
    if m < 1:
        raise ValueError("m must be at least 1")
    B = _as_fraction(B)
    eps = _as_fraction(eps)
    if B < 0 or eps < 0:
        raise ValueError("B and eps must be nonnegative")
    L = Fraction(ell)
    R = L ** m
    nodes = [L ** k for k in range(m)]
    unsigned = None
    if mode == "signed":
        unsigned = tail_coefficient_bounds(B, m, eps, ell)
        nodes += [-z for z in nodes]
    constants = _contour_constants(nodes, R, B, eps)
    return CoefficientBound(m=m, eps=eps, B=B, ell=ell, mode=mode, constants=constants, unsigned=unsigned)


def forward_moments(dist, K, ell=None):
    """Exact M_m = sum_j l^{mj} P(j) for m = 0..K from a RankDistribution or a dict."""
    if isinstance(dist, RankDistribution):
        ell = dist.ell
        entries = dist.entries
    else:
        entries = dist
    L = Fraction(ell)
    return [sum(L ** (m * j) * _as_fraction(p) for j, p in entries.items()) for m in range(K + 1)]


def _solve_exact(A, b):
    """Gauss-Jordan over Fractions for a square nonsingular system."""
    n = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                factor = M[r][c]
                M[r] = [x - factor * y for x, y in zip(M[r], M[c])]
    return [M[r][n] for r in range(n)]


@dataclass
class Recovery:
    distribution: RankDistribution
    residual: float
    negative: bool
    exact: bool
    condition: float = None


def recover_distribution(moments, ell, j_max):
    """
    Solve sum_{j <= j_max} l^{mj} P(j) = M_m, m = 0..K.

    Square systems are solved exactly; overdetermined ones by exact least squares
    (normal equations over Fractions). Inexact inputs go through a column-scaled
    floating solve and report the condition number.

    Raises:
        ValueError: K < j_max, j_max above the caps
    """
    K = len(moments) - 1
    if K < j_max:
        raise ValueError(f"need at least j_max + 1 = {j_max + 1} moments, got {K + 1}")
    if j_max > MAX_J:
        raise ValueError(f"j_max is capped at {MAX_J}")
    exact = all(_is_exact(x) for x in moments)
    L = Fraction(ell)
    V = [[L ** (m * j) for j in range(j_max + 1)] for m in range(K + 1)]
    condition = None
    if exact:
        b = [_as_fraction(x) for x in moments]
        if K == j_max:
            p = _solve_exact(V, b)
        else:
            VtV = [[sum(V[m][i] * V[m][k] for m in range(K + 1)) for k in range(j_max + 1)]
                   for i in range(j_max + 1)]
            Vtb = [sum(V[m][i] * b[m] for m in range(K + 1)) for i in range(j_max + 1)]
            p = _solve_exact(VtV, Vtb)
        residual = float(max(abs(sum(V[m][j] * p[j] for j in range(j_max + 1)) - b[m]) for m in range(K + 1)))
        entries = {j: v for j, v in enumerate(p)}
    else:
        if j_max > MAX_J_INEXACT:
            raise ValueError(f"inexact moments need j_max <= {MAX_J_INEXACT}; pass exact values beyond")
        A = np.array([[float(x) for x in row] for row in V])
        b = np.array([float(x) for x in moments])
        scale = np.abs(A).max(axis=0)
        sol, *_ = np.linalg.lstsq(A / scale, b, rcond=None)
        p = sol / scale
        condition = float(np.linalg.cond(A / scale))
        residual = float(np.abs(A @ p - b).max())
        entries = {j: Decimal(repr(float(v))) for j, v in enumerate(p)}
    negative = any(float(v) < -NEGATIVE_TOL for v in entries.values())
    if negative:
        logger.warning(f"recovered masses are negative beyond {NEGATIVE_TOL}: "
                       f"{ {j: float(v) for j, v in entries.items() if float(v) < 0} }")
    dist = RankDistribution(entries, None, None, ell=ell, check=False)
    return Recovery(distribution=dist, residual=residual, negative=negative, exact=exact, condition=condition)
