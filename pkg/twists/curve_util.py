''' Elliptic curves with a rational 2-torsion structure, and their quadratic twists.

Two forms are supported:
    full2torsion:e2,e3   y^2 = x (x - e2) (x - e3)
    klagsbrun:a,b        y^2 = x (x^2 + a x + b)
Coefficients are rationals; `integral()` rescales x by a square so they become integers.
'''
import math
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint, integer_nthroot, primefactors

FULL2TORSION = "full2torsion"
KLAGSBRUN = "klagsbrun"
FORMS = (FULL2TORSION, KLAGSBRUN)


class PrecisionError(RuntimeError):
    """Local search exhausted its precision budget without deciding."""


class TechnicalConditionError(ValueError):
    """The curve fails a condition the twist statistics rely on."""


def is_square(q):
    """Whether the rational q is a square in Q."""
    q = Fraction(q)
    if q < 0:
        return False
    return all(integer_nthroot(v, 2)[1] for v in (q.numerator, q.denominator))


def is_squarefree(d):
    return d != 0 and all(e == 1 for e in factorint(abs(d)).values())


def squarefree_part(d):
    """Squarefree integer in the class of the nonzero rational d modulo squares."""
    d = Fraction(d)
    if d == 0:
        raise ValueError("0 has no squarefree part")
    n = d.numerator * d.denominator
    out = -1 if n < 0 else 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            out *= p
    return out


@dataclass(frozen=True)
class CurveSpec:
    form: str
    c1: Fraction
    c2: Fraction

    def __post_init__(self):
        if self.form not in FORMS:
            raise NotImplementedError(f"Unknown curve form {self.form}")
        object.__setattr__(self, "c1", Fraction(self.c1))
        object.__setattr__(self, "c2", Fraction(self.c2))
        if self.form == FULL2TORSION:
            if self.c1 == 0 or self.c2 == 0 or self.c1 == self.c2:
                raise ValueError(f"e2, e3 must be distinct and nonzero, got {self.c1}, {self.c2}")
        else:
            if self.c2 == 0:
                raise ValueError("b must be nonzero")
            if is_square(self.c1 ** 2 - 4 * self.c2):
                raise ValueError("a^2 - 4b must not be a square")

    @classmethod
    def full2torsion(cls, e2, e3):
        return cls(FULL2TORSION, e2, e3)

    @classmethod
    def klagsbrun(cls, a, b):
        return cls(KLAGSBRUN, a, b)

    @classmethod
    def from_string(cls, text):
        """"full2torsion:1,-1" or "klagsbrun:1,2"; a bare "e2,e3" means full2torsion."""
        form, _, rest = text.strip().rpartition(":")
        form = form or FULL2TORSION
        parts = [p.strip() for p in rest.split(",")]
        if len(parts) != 2:
            raise ValueError(f"expected two coefficients in '{text}'")
        return cls(form, Fraction(parts[0]), Fraction(parts[1]))

    def to_string(self):
        return f"{self.form}:{self.c1},{self.c2}"

    @property
    def is_full2torsion(self):
        return self.form == FULL2TORSION

    def integral(self):
        """Isomorphic model with integer coefficients (x scaled by u^2)."""
        u = math.lcm(self.c1.denominator, self.c2.denominator)
        if self.is_full2torsion:
            return CurveSpec(self.form, self.c1 * u * u, self.c2 * u * u)
        return CurveSpec(self.form, self.c1 * u * u, self.c2 * u ** 4)

    def twist(self, d):
        """Quadratic twist by d: y^2 = f(x) becomes d y^2 = f(x), rewritten in the same form."""
        d = Fraction(d)
        if d == 0:
            raise ValueError("cannot twist by 0")
        if self.is_full2torsion:
            return CurveSpec(self.form, d * self.c1, d * self.c2)
        return CurveSpec(self.form, d * self.c1, d * d * self.c2)

    def roots(self):
        """x-coordinates of the rational 2-torsion points (full2torsion: 0, e2, e3)."""
        if self.is_full2torsion:
            return (Fraction(0), self.c1, self.c2)
        return (Fraction(0),)

    @property
    def discriminant(self):
        if self.is_full2torsion:
            a, b = self.c1, self.c2
            return 16 * a * a * b * b * (a - b) ** 2
        a, b = self.c1, self.c2
        return 16 * b * b * (a * a - 4 * b)

    def bad_primes(self):
        """2 together with the primes of bad reduction of the integral model."""
        disc = self.integral().discriminant
        return sorted(set(primefactors(abs(int(disc)))) | {2})

    def isogenous(self):
        """The 2-isogenous curve y^2 = x (x^2 - 2a x + a^2 - 4b) of a klagsbrun curve."""
        if self.is_full2torsion:
            raise ValueError("isogenous() is defined for klagsbrun curves")
        a, b = self.c1, self.c2
        return CurveSpec(KLAGSBRUN, -2 * a, a * a - 4 * b)


def four_isogeny_products(curve):
    """(c3-c1)(c2-c1), (c3-c2)(c1-c2), (c1-c3)(c2-c3) for the roots (c1, c2, c3)."""
    c1, c2, c3 = curve.roots()
    return ((c3 - c1) * (c2 - c1), (c3 - c2) * (c1 - c2), (c1 - c3) * (c2 - c3))


def no_cyclic_4_isogeny(curve):
    """
    A full 2-torsion curve has a rational cyclic 4-isogeny through (c_i, 0) exactly when
    (c_i - c_j)(c_i - c_k) is a square.

    Returns:
        (bool, str): verdict and a diagnostic naming the offending root
    """
    if not curve.is_full2torsion:
        raise ValueError("the 4-isogeny check applies to full2torsion curves")
    for i, q in enumerate(four_isogeny_products(curve)):
        if is_square(q):
            root = curve.roots()[i]
            return False, f"cyclic 4-isogeny through ({root}, 0): {q} is a square"
    return True, ""


def check_technical_conditions(curve):
    """Raise TechnicalConditionError when the twist family falls outside the alternating regime."""
    if not curve.is_full2torsion:
        raise TechnicalConditionError("twist statistics need a full2torsion curve")
    ok, why = no_cyclic_4_isogeny(curve)
    if not ok:
        raise TechnicalConditionError(f"no rational cyclic 4-isogeny: failed, {why}")
