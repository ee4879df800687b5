''' Corank distributions of random matrices over F_l and the rank Markov chain.

Two regimes:
    non-self-dual: kernel of a uniform (n - u) x n matrix over F_l,
    alternating:   kernel of a uniform alternating n x n matrix over F_2.

Finite-n probabilities are exact Fractions. Limits n -> oo are Decimals carrying an
explicit truncation error.
'''
import json
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from linalg import batch_rank, check_modulus, gaussian_binomial, sample_alternating_batch, sample_uniform_batch
from utils import get_logger, run_sharded, split_trials

logger = get_logger(__name__)

NON_SELF_DUAL = "non-self-dual"
ALTERNATING = "alternating"
CASES = (NON_SELF_DUAL, ALTERNATING)

DEFAULT_DIGITS = 50
MAX_SUPPORT = 400
# matrix size standing in for n = oo in Monte Carlo runs
MC_INFINITE_N = 48
MC_CHUNK = 100000


@dataclass(frozen=True)
class CaseParams:
    """
    Args:
        case: 'non-self-dual' or 'alternating'
        ell: prime; forced to 2 in the alternating case
        u: rows are n - u (non-self-dual only)
        parity: alternating only; 0 or 1 for the parity-invariant case, None otherwise
    """
    case: str = ALTERNATING
    ell: int = 2
    u: int = 0
    parity: int = None

    def __post_init__(self):
        if self.case not in CASES:
            raise NotImplementedError(f"Unknown case {self.case}")
        check_modulus(self.ell)
        if self.case == ALTERNATING:
            if self.ell != 2:
                raise ValueError("the alternating case is defined over F_2 only")
            if self.parity not in (None, 0, 1):
                raise ValueError(f"parity must be 0, 1 or None, got {self.parity}")
        elif self.parity is not None:
            raise ValueError("parity mode only applies to the alternating case")

    @property
    def alternating(self):
        return self.case == ALTERNATING

    def to_dict(self):
        d = {"case": self.case, "ell": self.ell}
        if self.alternating:
            d["parity"] = self.parity
        else:
            d["u"] = self.u
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(case=d["case"], ell=d.get("ell", 2), u=d.get("u", 0), parity=d.get("parity"))


@dataclass(frozen=True)
class ApproxValue:
    """A Decimal value with an absolute error bound."""
    value: Decimal
    err: Decimal

    def __float__(self):
        return float(self.value)


def _inv_power(ell, e):
    return Fraction(1, ell ** e) if e >= 0 else Fraction(ell ** (-e))


def p_nonselfdual(j, n, params):
    """
    P(j | n): probability that a uniform (n - u) x n matrix over F_l has kernel dimension j.

    Zero outside max(u, 0) <= j <= n (and for n < u, where no matrix exists).
    """
    if params.alternating:
        raise ValueError("p_nonselfdual needs non-self-dual parameters")
    ell, u = params.ell, params.u
    if n < 0 or j < 0 or j > n or j < max(u, 0) or n < u:
        return Fraction(0)
    value = _inv_power(ell, j * (j - u))
    for k in range(1, j - u + 1):
        value *= (1 - _inv_power(ell, k + n - j)) / (1 - _inv_power(ell, k))
    for k in range(1, j + 1):
        value /= 1 - _inv_power(ell, k)
    for k in range(1, n + 1):
        value *= 1 - _inv_power(ell, k)
    return value


def p_alternating(j, n):
    """
    P(j | n) for the kernel of a uniform alternating n x n matrix over F_2.

    Uses the factor 1 - 2^{-(n - j + k)}; this reproduces exhaustive enumeration.
    """
    if n < 0 or j < 0 or j > n or (n - j) % 2:
        return Fraction(0)
    value = Fraction(1, 2 ** (j * (j - 1) // 2))
    for k in range(1, j + 1):
        value *= (1 - Fraction(1, 2 ** (n - j + k))) / (1 - Fraction(1, 2 ** k))
    for k in range(1, (n - j) // 2 + 1):
        value *= 1 - Fraction(2, 2 ** (2 * k))
    return value


def p_finite(j, n, params):
    return p_alternating(j, n) if params.alternating else p_nonselfdual(j, n, params)


def _tail_product(x_of_k, ratio_sum_tail, tol, digits):
    """
    prod_{k >= 1} (1 - x_k) truncated at the first K whose tail sum bound is below tol.

    Returns (value, relative error bound).
    """
    value = Decimal(1)
    k = 0
    while True:
        k += 1
        value *= 1 - x_of_k(k)
        tail = ratio_sum_tail(k)
        if tail < tol or k > 10 * digits:
            return value, tail


def p_inf(j, params, tol=Decimal("1e-40"), digits=DEFAULT_DIGITS):
    """
    P(j | oo) with all infinite products truncated so the error is below `tol`.

    Returns:
        ApproxValue
    """
    tol = Decimal(tol)
    with localcontext() as ctx:
        ctx.prec = digits + 10
        ell = Decimal(params.ell)
        if params.alternating:
            if params.parity is not None and j % 2 != params.parity:
                return ApproxValue(Decimal(0), Decimal(0))
            if j < 0:
                return ApproxValue(Decimal(0), Decimal(0))
            prefactor = Decimal(2) ** (-(j * (j - 1) // 2))
            for k in range(1, j + 1):
                prefactor /= 1 - Decimal(2) ** (-k)
            if params.parity is None:
                prefactor /= 2
            prod, rel = _tail_product(lambda k: Decimal(2) ** (1 - 2 * k),
                                      lambda k: Decimal(2) ** (1 - 2 * k) / 3, tol / 8, digits)
        else:
            u = params.u
            if j < max(u, 0):
                return ApproxValue(Decimal(0), Decimal(0))
            prefactor = ell ** (-(j * (j - u)))
            for k in range(1, j - u + 1):
                prefactor /= 1 - ell ** (-k)
            for k in range(1, j + 1):
                prefactor /= 1 - ell ** (-k)
            prod, rel = _tail_product(lambda k: ell ** (-k),
                                      lambda k: ell ** (-k) / (ell - 1) / (1 - 1 / ell), tol / 8, digits)
        value = prefactor * prod
        err = value * rel + Decimal(10) ** (-(digits + 5)) * max(prefactor, 1)
        return ApproxValue(+value, +err)


class RankDistribution(object):
    """
    Map j -> P(j) with metadata.

    Args:
        entries (dict): j -> Fraction (finite n) or Decimal (n = oo)
        n (int or None): matrix size, None for the limit
        params (CaseParams)
        err (Decimal): total absolute error of the table (0 when exact)
    """

    def __init__(self, entries, n, params, err=Decimal(0), ell=None, check=True):
        self.entries = dict(sorted(entries.items()))
        self.n = n
        self.params = params
        self.ell = params.ell if params is not None else ell
        self.err = Decimal(err)
        if check:
            assert all(v >= 0 for v in self.entries.values()), "negative probability"

    @property
    def exact(self):
        return all(isinstance(v, (Fraction, int)) for v in self.entries.values())

    def __getitem__(self, j):
        return self.entries.get(j, 0)

    def __repr__(self):
        n = "oo" if self.n is None else self.n
        meta = self.params.to_dict() if self.params else {"ell": self.ell}
        return f"RankDistribution(n={n}, {meta}, support={list(self.entries)})"

    def total(self):
        return sum(self.entries.values())

    def moment(self, m):
        """sum_j ell^{m j} P(j)."""
        ell = self.ell
        if self.exact:
            return sum(Fraction(ell) ** (m * j) * p for j, p in self.entries.items())
        return sum(Decimal(ell) ** (m * j) * Decimal(p) for j, p in self.entries.items())

    def as_floats(self):
        return {j: float(p) for j, p in self.entries.items()}

    def restrict_parity(self, b):
        """Distribution conditioned on parity(j) = b, renormalized."""
        kept = {j: p for j, p in self.entries.items() if j % 2 == b}
        mass = sum(kept.values())
        if not mass:
            raise ValueError(f"no mass on parity {b}")
        return RankDistribution({j: p / mass for j, p in kept.items()}, self.n, self.params,
                                self.err / Decimal(float(mass)) if self.err else Decimal(0), ell=self.ell)

    def total_variation(self, other):
        """Half the l1 distance to another distribution or to a plain dict j -> probability."""
        a = self.as_floats()
        b = other.as_floats() if isinstance(other, RankDistribution) else {j: float(p) for j, p in other.items()}
        return 0.5 * sum(abs(a.get(j, 0.0) - b.get(j, 0.0)) for j in set(a) | set(b))

    def to_json(self):
        rows = []
        for j, p in self.entries.items():
            if isinstance(p, Fraction):
                rows.append({"j": j, "p_num": p.numerator, "p_den": p.denominator})
            else:
                rows.append({"j": j, "p_dec": str(p), "err": str(self.err)})
        meta = self.params.to_dict() if self.params else {"case": None, "ell": self.ell}
        return {**meta, "n": "inf" if self.n is None else self.n, "entries": rows}

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        params = CaseParams.from_dict(doc) if doc.get("case") else None
        n = None if doc["n"] == "inf" else int(doc["n"])
        entries = {}
        err = Decimal(0)
        for row in doc["entries"]:
            if "p_num" in row:
                entries[row["j"]] = Fraction(row["p_num"], row["p_den"])
            else:
                entries[row["j"]] = Decimal(row["p_dec"])
                err = max(err, Decimal(row.get("err", "0")))
        return cls(entries, n, params, err, ell=doc.get("ell", 2), check=params is not None)


def distribution(n, params, tol=Decimal("1e-30"), digits=DEFAULT_DIGITS):
    """
    Full table of P(j | n); n = None gives the limit, truncated once the missing mass
    (1 - partial sum) drops below `tol`.
    """
    if n is not None:
        if not params.alternating and n < params.u:
            raise ValueError(f"no ({n} - {params.u}) x {n} matrices exist")
        return RankDistribution({j: p_finite(j, n, params) for j in range(n + 1) if p_finite(j, n, params)},
                                n, params)
    tol = Decimal(tol)
    entries = {}
    errs = Decimal(0)
    with localcontext() as ctx:
        ctx.prec = digits + 10
        partial = Decimal(0)
        for j in range(MAX_SUPPORT):
            v = p_inf(j, params, tol=tol / 100, digits=digits)
            if v.value:
                entries[j] = v.value
                partial += v.value
                errs += v.err
            if j >= max(params.u, 1) and 1 - partial + errs < tol:
                break
        else:
            logger.warning(f"limit distribution not converged after {MAX_SUPPORT} terms")
        err = abs(1 - partial) + errs
    return RankDistribution(entries, None, params, err)


def parity_split(dist):
    """Both parity-conditioned distributions; used for the non-parity-invariant report."""
    return {b: dist.restrict_parity(b) for b in (0, 1) if any(j % 2 == b for j in dist.entries)}


def transition_matrix(n_max, params):
    """Rows n = 0..n_max of exact P(j | n)."""
    return [[p_finite(j, n, params) for j in range(n_max + 1)] for n in range(n_max + 1)]


def validate_sequence(seq):
    seq = [int(r) for r in seq]
    if not seq:
        raise ValueError("empty rank sequence")
    if any(r < 0 for r in seq):
        raise ValueError(f"ranks must be nonnegative: {seq}")
    if any(b > a for a, b in zip(seq, seq[1:])):
        raise ValueError(f"rank sequence must be nonincreasing: {seq}")
    return seq


def markov_sequence_prob(seq, params, tol=Decimal("1e-40"), digits=DEFAULT_DIGITS):
    """P(r_1 | oo) * prod_k P(r_{k+1} | r_k)."""
    seq = validate_sequence(seq)
    head = p_inf(seq[0], params, tol=tol, digits=digits)
    transitions = Fraction(1)
    for a, b in zip(seq, seq[1:]):
        transitions *= p_finite(b, a, params)
    with localcontext() as ctx:
        ctx.prec = digits + 10
        t = Decimal(transitions.numerator) / Decimal(transitions.denominator)
        return ApproxValue(+(head.value * t), +(head.err * t))


def sample_rank_sequence(params, length, rng, tol=Decimal("1e-20")):
    """Draw (r_1, ..., r_length) from the chain: r_1 ~ P(. | oo), then r_{k+1} ~ P(. | r_k)."""
    head = distribution(None, params, tol=tol).as_floats()
    support = np.array(list(head))
    probs = np.array([head[j] for j in support])
    seq = [int(rng.choice(support, p=probs / probs.sum()))]
    while len(seq) < length:
        n = seq[-1]
        row = np.array([float(p_finite(j, n, params)) for j in range(n + 1)])
        seq.append(int(rng.choice(n + 1, p=row / row.sum())))
    return seq


def moment_theoretical(m, params):
    """
    sum_{j=0}^{m} gr_l(j, m) * l^{b(j)} with b(j) = j(j+1)/2 (alternating) or j*u.

    Exact int, or Fraction when u < 0.
    """
    if m < 0:
        raise ValueError(f"moment order must be nonnegative, got {m}")
    ell = params.ell
    total = Fraction(0)
    for j in range(m + 1):
        b = j * (j + 1) // 2 if params.alternating else j * params.u
        total += gaussian_binomial(j, m, ell) * Fraction(ell) ** b
    return int(total) if total.denominator == 1 else total


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    trials: int


def _moment_shard(args):
    m, params, n, trials, rng = args
    ell = params.ell
    if params.alternating:
        if n is None:
            base = MC_INFINITE_N
            if params.parity is None:
                sizes = base + rng.integers(0, 2, size=trials)
            else:
                sizes = np.full(trials, base + (params.parity % 2))
        else:
            sizes = np.full(trials, n)
        coranks = np.empty(trials, dtype=np.int64)
        for size in np.unique(sizes):
            mask = sizes == size
            mats = sample_alternating_batch(int(size), 2, int(mask.sum()), rng)
            coranks[mask] = size - batch_rank(mats, 2)
    else:
        cols = MC_INFINITE_N if n is None else n
        rows = cols - params.u
        if rows < 0:
            raise ValueError(f"no ({cols} - {params.u}) x {cols} matrices exist")
        mats = sample_uniform_batch(rows, cols, ell, trials, rng)
        coranks = cols - batch_rank(mats, ell)
    values = np.power(float(ell), m * coranks)
    return float(values.sum()), float((values ** 2).sum()), trials


def moment_empirical(m, params, n, trials, rng, workers=1):
    """
    Monte Carlo estimate of sum_j l^{m j} P(j | n); n = None samples size MC_INFINITE_N
    (parity matched in the alternating case).

    Trials are cut into fixed chunks, each with its own child stream, so the estimate
    does not depend on the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if m == 0:
        return MonteCarloEstimate(1.0, 0.0, trials)
    chunks = split_trials(trials, max(1, math.ceil(trials / MC_CHUNK)))
    seeds = rng.integers(0, 2 ** 63 - 1, size=len(chunks))
    shards = [(m, params, n, c, np.random.default_rng(int(s))) for c, s in zip(chunks, seeds)]
    results = run_sharded(_moment_shard, shards, workers)
    s1 = sum(r[0] for r in results)
    s2 = sum(r[1] for r in results)
    mean = s1 / trials
    var = max(s2 / trials - mean ** 2, 0.0)
    stderr = math.sqrt(var / max(trials - 1, 1))
    logger.debug(f"moment m={m} n={n}: {mean:.6f} +- {stderr:.2e} over {trials} trials")
    return MonteCarloEstimate(mean, stderr, trials)
