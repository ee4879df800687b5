''' Multinomial model of Frobenius classes and its Gaussian limit.

n primes draw classes i.i.d. uniformly from a finite label set G; g_n counts each class.
The centered counts n^{-1/2}(g_n - n/|G|) tend to a degenerate Gaussian V with covariance
Sigma = I/|G| - J/|G|^2. Linear constraints sum_sigma f(sigma) g_n(sigma) >= b n^delta and
congruences g_n(sigma) = a(sigma) mod R are compared with the orthant probability of V.
'''
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.signal import fftconvolve
from scipy.stats import linregress

from utils import get_logger, run_sharded, split_trials
from .rank_dist import MonteCarloEstimate

logger = get_logger(__name__)

MC_CHUNK = 50000
MAX_EXACT_ORTHANT = 3
EXACT_SINGLE_LIMIT = 400
CONVOLUTION_TOL = 1e-9


@dataclass(frozen=True)
class ClassModel:
    """
    Args:
        labels: the class labels G
        sigma0: distinguished class exempt from congruence conditions (first label by default)
        modulus: R >= 1
    """
    labels: tuple
    sigma0: str = None
    modulus: int = 1

    def __post_init__(self):
        labels = tuple(str(l) for l in self.labels)
        if not labels:
            raise ValueError("a class model needs at least one label")
        if len(set(labels)) != len(labels):
            raise ValueError("class labels must be distinct")
        object.__setattr__(self, "labels", labels)
        if self.sigma0 is None:
            object.__setattr__(self, "sigma0", labels[0])
        if self.sigma0 not in labels:
            raise ValueError(f"sigma0 {self.sigma0} is not a label")
        if int(self.modulus) < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")

    @classmethod
    def of_size(cls, size, modulus=1):
        return cls(tuple(f"c{i}" for i in range(size)), modulus=modulus)

    @property
    def size(self):
        return len(self.labels)

    def covariance(self):
        return covariance(self.size)


@dataclass
class ConstraintSet:
    """
    Args:
        functions: k integer vectors f_j indexed like the model labels
        thresholds: b_j in [-1, 1] (zeros by default)
        delta: exponent in (0, 1/2)
        target: {label: residue mod R} for labels other than sigma0 (zeros by default)
    """
    functions: list = field(default_factory=list)
    thresholds: list = None
    delta: float = 0.25
    target: dict = None

    def __post_init__(self):
        self.functions = [tuple(int(v) for v in f) for f in self.functions]
        if any(not any(f) for f in self.functions):
            raise ValueError("constraint functions must be nonzero")
        if len({len(f) for f in self.functions}) > 1:
            raise ValueError("constraint functions must share one length")
        if self.thresholds is None:
            self.thresholds = [0.0] * len(self.functions)
        self.thresholds = [float(b) for b in self.thresholds]
        if len(self.thresholds) != len(self.functions):
            raise ValueError("one threshold per function is required")
        if any(abs(b) > 1 for b in self.thresholds):
            raise ValueError("thresholds must lie in [-1, 1]")
        if not 0 < self.delta < 0.5:
            raise ValueError(f"delta must lie in (0, 1/2), got {self.delta}")
        self.target = dict(self.target or {})

    @property
    def k(self):
        return len(self.functions)

    @property
    def B(self):
        return max((abs(v) for f in self.functions for v in f), default=0)

    def matrix(self, size):
        if self.functions and len(self.functions[0]) != size:
            raise ValueError(f"constraints have length {len(self.functions[0])}, the model has {size} labels")
        return np.array(self.functions, dtype=np.int64).reshape(self.k, size)

    def zero_sum(self):
        keep = [i for i, f in enumerate(self.functions) if sum(f) == 0]
        return ConstraintSet([self.functions[i] for i in keep], [self.thresholds[i] for i in keep],
                             self.delta, self.target)


def covariance(size):
    """Sigma_{ss} = 1/|G| - 1/|G|^2, Sigma_{st} = -1/|G|^2."""
    if isinstance(size, ClassModel):
        size = size.size
    if size < 1:
        raise ValueError("|G| must be at least 1")
    return np.eye(size) / size - np.ones((size, size)) / size ** 2


def sample_counts(model, n, trials, rng):
    """(trials, |G|) multinomial class counts g_n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return rng.multinomial(n, np.full(model.size, 1.0 / model.size), size=trials)


def _congruence_mask(model, constraints, counts):
    R = int(model.modulus)
    ok = np.ones(len(counts), dtype=bool)
    if R == 1:
        return ok
    for i, label in enumerate(model.labels):
        if label == model.sigma0:
            continue
        ok &= counts[:, i] % R == int(constraints.target.get(label, 0)) % R
    return ok


def _event_shard(args):
    model, constraints, n, trials, rng = args
    counts = sample_counts(model, n, trials, rng)
    ok = _congruence_mask(model, constraints, counts)
    if constraints.k:
        sums = counts @ constraints.matrix(model.size).T
        bounds = np.array(constraints.thresholds) * float(n) ** constraints.delta
        ok &= (sums >= bounds).all(axis=1)
    return int(ok.sum())


def _orthant_shard(args):
    F, size, strict, trials, rng = args
    z = rng.standard_normal((trials, size))
    v = (z - z.mean(axis=1, keepdims=True)) / math.sqrt(size)
    y = v @ F.T
    hit = (y > 0) if strict else (y >= 0)
    return int(hit.all(axis=1).sum())


def _frequency(shard_fn, head, trials, rng, workers):
    if trials < 1:
        raise ValueError("trials must be positive")
    chunks = split_trials(trials, max(1, math.ceil(trials / MC_CHUNK)))
    seeds = rng.integers(0, 2 ** 63 - 1, size=len(chunks))
    shards = [head + (c, np.random.default_rng(int(s))) for c, s in zip(chunks, seeds)]
    hits = sum(run_sharded(shard_fn, shards, workers))
    p = hits / trials
    return MonteCarloEstimate(p, math.sqrt(p * (1 - p) / trials), trials)


def estimate_P(model, constraints, n, trials, rng, workers=1):
    """Frequency of {sum_i f_j(X_i) >= b_j n^delta for all j} and the congruence conditions."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not constraints.k and model.modulus == 1:
        return MonteCarloEstimate(1.0, 0.0, trials)
    return _frequency(_event_shard, (model, constraints, n), trials, rng, workers)


def estimate_P0(model, constraints, trials, rng, workers=1):
    """Orthant probability Pr(<V, f_j> >= 0 for all j) of the limiting Gaussian."""
    if any(sum(f) != 0 for f in constraints.functions):
        raise ValueError("the Gaussian limit only applies to zero-sum constraints")
    if not constraints.k:
        return MonteCarloEstimate(1.0, 0.0, trials)
    F = constraints.matrix(model.size).astype(np.float64)
    return _frequency(_orthant_shard, (F, model.size, False), trials, rng, workers)


def exact_orthant(functions, size):
    """
    Pr(<V, f_j> > 0 for all j) for at most three constraints, through the arcsine formulas
    on the correlations of the projected Gaussian.
    """
    k = len(functions)
    if k == 0:
        return 1.0
    if k > MAX_EXACT_ORTHANT:
        raise NotImplementedError(f"exact orthant probabilities stop at {MAX_EXACT_ORTHANT} constraints")
    F = np.array(functions, dtype=np.float64).reshape(k, size)
    C = F @ covariance(size) @ F.T
    sd = np.sqrt(np.diag(C))
    if (sd < 1e-12).any():
        raise ValueError("a constraint is constant on the Gaussian support")
    rho = C / np.outer(sd, sd)
    if k == 1:
        return 0.5
    if k == 2:
        return 0.25 + math.asin(np.clip(rho[0, 1], -1, 1)) / (2 * math.pi)
    s = sum(math.asin(np.clip(rho[i, j], -1, 1)) for i, j in ((0, 1), (0, 2), (1, 2)))
    return 0.125 + s / (4 * math.pi)


def _power_pmf(pmf, n):
    out = np.array([1.0])
    base = pmf
    while n:
        if n & 1:
            out = np.clip(fftconvolve(out, base), 0.0, None)
        n >>= 1
        if n:
            base = np.clip(fftconvolve(base, base), 0.0, None)
    return out


def _int_convolve(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _power_counts(counts, n):
    out, base = [1], counts
    while n:
        if n & 1:
            out = _int_convolve(out, base)
        n >>= 1
        if n:
            base = _int_convolve(base, base)
    return out


def _single_setup(f, b, delta, n, size):
    f = [int(v) for v in f]
    size = len(f) if size is None else size
    if len(f) != size:
        raise ValueError("f must have one value per class")
    lo = min(f)
    counts = [0] * (max(f) - lo + 1)
    for v in f:
        counts[v - lo] += 1
    # entry s of the n-fold convolution is the sum s + n lo
    threshold = b * float(n) ** delta - n * lo
    return counts, size, max(0, math.ceil(threshold - 1e-9))


def exact_P_single(f, b, delta, n, size=None):
    """
    P(n) = Pr(sum_{i<n} f(X_i) >= b n^delta) for one constraint and R = 1, as a Fraction.

    Integer class counts are convolved exactly, so the cost grows quadratically in n;
    `verify_G1_model` switches to `convolved_P_single` above EXACT_SINGLE_LIMIT.
    """
    counts, size, start = _single_setup(f, b, delta, n, size)
    dist = _power_counts(counts, n)
    return Fraction(sum(dist[start:]), size ** n)


def convolved_P_single(f, b, delta, n, size=None):
    """
    Floating point version of `exact_P_single` through FFT convolution of the pmf of f(X).
    The absolute error stays below CONVOLUTION_TOL for n <= 10^5.
    """
    counts, size, start = _single_setup(f, b, delta, n, size)
    dist = _power_pmf(np.asarray(counts, dtype=np.float64) / size, n)
    return float(min(1.0, dist[start:].sum()))


def exact_congruence_prob(size, R, target, n):
    """
    Exact Pr(g_n(sigma) = a(sigma) mod R for every sigma != sigma0) as a Fraction.

    Args:
        target: residues for the classes other than sigma0, in label order
    """
    others = size - 1
    if others == 0 or R == 1:
        return Fraction(1)
    target = [int(a) % R for a in target]
    if len(target) != others:
        raise ValueError(f"expected {others} target residues")
    counts = np.zeros((R,) * others, dtype=object)
    counts[(0,) * others] = 1
    for _ in range(n):
        step = counts.copy()
        for axis in range(others):
            step = step + np.roll(counts, 1, axis=axis)
        counts = step
    return Fraction(int(counts[tuple(target)]), size ** n)


@dataclass
class G1Report:
    ladder: list
    P: list
    stderr: list
    P0: float
    delta_values: list
    exponent: float
    bound: float
    passes: bool


def verify_G1_model(model, constraints, ladder, trials, rng, slack=0.1, exact=True, workers=1):
    """
    Delta(n) = |P(n) - R^{1-|G|} P0| along `ladder` and its fitted decay exponent, compared
    with -(1/2 - delta) + slack. P(n) is computed without sampling where a closed route exists
    (one constraint with R = 1, exact up to EXACT_SINGLE_LIMIT and FFT-convolved beyond, or
    congruences only), Monte Carlo otherwise.
    """
    if any(sum(f) != 0 for f in constraints.functions):
        raise ValueError("verify_G1_model needs zero-sum constraints")
    R = int(model.modulus)
    if constraints.k <= MAX_EXACT_ORTHANT:
        P0 = exact_orthant(constraints.functions, model.size)
    else:
        P0 = estimate_P0(model, constraints, trials, rng, workers).mean
    scale = float(R) ** (1 - model.size)
    P, errs, deltas = [], [], []
    for n in ladder:
        if exact and constraints.k == 1 and R == 1:
            single = exact_P_single if n <= EXACT_SINGLE_LIMIT else convolved_P_single
            p, e = float(single(constraints.functions[0], constraints.thresholds[0], constraints.delta, n)), 0.0
        elif exact and constraints.k == 0:
            target = [constraints.target.get(l, 0) for l in model.labels if l != model.sigma0]
            p, e = float(exact_congruence_prob(model.size, R, target, n)), 0.0
        else:
            est = estimate_P(model, constraints, n, trials, rng, workers)
            p, e = est.mean, est.stderr
        P.append(p)
        errs.append(e)
        deltas.append(abs(p - scale * P0))
    bound = -(0.5 - constraints.delta) + slack
    pos = [(n, d) for n, d in zip(ladder, deltas) if d > 0]
    if len(pos) >= 2:
        fit = linregress(np.log([n for n, _ in pos]), np.log([d for _, d in pos]))
        exponent = float(fit.slope)
    else:
        exponent = -math.inf
    logger.info(f"G1 model: exponent {exponent:.3f} against bound {bound:.3f}")
    return G1Report(ladder=list(ladder), P=P, stderr=errs, P0=P0, delta_values=deltas, exponent=exponent,
                    bound=bound, passes=exponent <= bound)


@dataclass
class FavoredProbability:
    P0: MonteCarloEstimate
    classification: object
    consistent: bool
    finite: MonteCarloEstimate = None


def favored_probability(spec, trials, rng, n=None, workers=1):
    """
    Pr(<V, f_T> > 0 for every difference vector f_T) of a module, next to its exact
    classification. With n given, the finite-n frequency of the same strict event on
    centered class counts is reported too.
    """
    result = spec.is_potentially_favored()
    size = len(result.labels)
    if not result.vectors:
        p0 = MonteCarloEstimate(1.0, 0.0, trials)
        finite = MonteCarloEstimate(1.0, 0.0, trials) if n else None
    else:
        F = np.array(result.vectors, dtype=np.float64)
        p0 = _frequency(_orthant_shard, (F, size, True), trials, rng, workers)
        finite = None
        if n:
            counts = sample_counts(ClassModel(result.labels), n, trials, rng)
            centered = counts - n / size
            hits = int(((centered @ F.T) > 0).all(axis=1).sum())
            p = hits / trials
            finite = MonteCarloEstimate(p, math.sqrt(p * (1 - p) / trials), trials)
    separable = result.separation.superlative is not None
    consistent = (p0.mean > 0) == separable
    if not consistent:
        logger.warning(f"{spec.name}: P0 estimate {p0.mean:.4g} disagrees with the classification")
    return FavoredProbability(P0=p0, classification=result, consistent=consistent, finite=finite)
