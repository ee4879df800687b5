''' The eight good-ideal criteria.

A profile is a squarefree ideal given as (norm, class label) factors. Its canonical grid
puts every factor of norm <= a0 in S_sm and the rest in S_med / S_lg by interval index.
All criteria are evaluated; the verdict is the first one that fails.

Thresholds default to the literal height formulas and may be overridden one by one.
`loosen` scales every threshold in the permissive direction, so the set of good ideals
can only grow with it.
'''
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from utils import get_logger, run_sharded
from .grid_params import LARGE, MEDIUM, SMALL, exp_iter, interval_index, log_iter

logger = get_logger(__name__)

CRITERIA = ("not too many primes", "inside a grid", "not too many small primes", "enough primes",
            "balanced", "no Siegel zeros", "prepared for higher Selmer work", "not overbalanced")
THRESHOLD_KEYS = ("max_primes", "max_small", "max_medium", "min_primes", "balance_exponent", "log_min_grid_norm",
                  "log_low_norm", "min_low", "log_high_norm", "min_high", "overbalance_exponent", "f_bound")
MAX_FUNCTIONS = 10 ** 6
HISTOGRAM_SHARD = 5000


@dataclass(frozen=True)
class IdealProfile:
    """Squarefree ideal as ((norm, label), ...) sorted by norm."""
    factors: tuple = ()

    def __post_init__(self):
        factors = tuple(sorted((int(n), str(c)) for n, c in self.factors))
        norms = [n for n, _ in factors]
        if any(n < 2 for n in norms):
            raise ValueError(f"prime norms are at least 2, got {norms}")
        if len(set(norms)) != len(norms):
            raise ValueError(f"profile is not squarefree: {norms}")
        object.__setattr__(self, "factors", factors)

    @property
    def norms(self):
        return [n for n, _ in self.factors]

    @property
    def labels(self):
        return [c for _, c in self.factors]

    @property
    def omega(self):
        return len(self.factors)

    @property
    def norm(self):
        return math.prod(self.norms)

    def to_string(self):
        return ",".join(f"{n}:{c}" for n, c in self.factors) or "1"

    @classmethod
    def from_string(cls, line):
        line = line.strip()
        if line in ("", "1"):
            return cls(())
        factors = []
        for item in line.split(","):
            norm, _, label = item.strip().partition(":")
            if not label:
                raise ValueError(f"factor '{item}' is not of the form norm:class")
            factors.append((int(norm), label))
        return cls(tuple(factors))


def read_profiles(path):
    """One profile per line ("norm:class,norm:class,..."; "1" is the unit ideal); '#' starts a comment."""
    with open(path) as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if line:
                yield IdealProfile.from_string(line)


def write_profiles(profiles, path):
    with open(path, "w") as f:
        for p in profiles:
            f.write(p.to_string() + "\n")


def literal_thresholds(log_H):
    """Criterion thresholds at height H (H > 20 so that log^(4) H exists); norms as logs."""
    if log_H <= math.log(20):
        raise ValueError(f"criteria need H > 20, got log H = {log_H}")
    l2 = log_iter(log_H, 1)
    l3 = log_iter(log_H, 2)
    l4 = log_iter(log_H, 3)
    return {
        "max_primes": l2 ** 2,
        "max_small": l2 ** (1 / 3 + 1 / 100),
        "max_medium": l2 ** (1 / 2 + 1 / 100),
        "min_primes": l2 / l3,
        "balance_exponent": 0.75,
        "log_min_grid_norm": log_H / 2,
        "log_low_norm": exp_iter(2 * l3 / 3, 2),
        "min_low": l2 ** (2 / 3 - 1 / 100),
        "log_high_norm": exp_iter(3 * l3 / 4, 2),
        "min_high": l2 ** (1 - 1 / 100),
        "overbalance_exponent": 0.25,
        "f_bound": exp_iter(l4 / 2, 2),
    }


@dataclass(frozen=True)
class CriteriaConfig:
    """
    Args:
        classes: label -> class size in G_1; their sizes sum to #G_1
        identity: label of the identity class
        ell: criterion 6 only applies when ell == 2
        siegel_d: exceptional discriminant, None when it does not exist
        siegel_base: product of the rational primes under the excluded places
        thresholds: overrides for keys of `literal_thresholds`
        loosen: factor >= 1 relaxing every threshold
    """
    classes: dict = field(default_factory=lambda: {"1": 1, "-1": 1})
    identity: str = "1"
    ell: int = 2
    siegel_d: int = None
    siegel_base: int = 1
    thresholds: dict = field(default_factory=dict)
    loosen: float = 1.0
    max_functions: int = MAX_FUNCTIONS

    def __post_init__(self):
        if self.identity not in self.classes:
            raise KeyError(f"identity class '{self.identity}' is not among the classes")
        unknown = set(self.thresholds) - set(THRESHOLD_KEYS)
        if unknown:
            raise KeyError(f"Unknown threshold(s) {sorted(unknown)}")
        if self.loosen < 1:
            raise ValueError(f"loosen factor must be at least 1, got {self.loosen}")

    @property
    def group_order(self):
        return sum(self.classes.values())

    def resolve(self, params):
        return {**literal_thresholds(params.log_H), **self.thresholds}

    def loosened(self, factor):
        return replace(self, loosen=self.loosen * factor)


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    details: dict


@dataclass
class Classification:
    bad_index: int
    results: list

    @property
    def good(self):
        return self.bad_index is None

    @property
    def verdict(self):
        return "Good" if self.good else "Bad"

    @property
    def label(self):
        return "Good" if self.good else f"Bad({self.bad_index})"

    def diagnostics(self):
        return {r.index: {"name": r.name, "passed": r.passed, **r.details} for r in self.results}


def _canonical_grid(profile, params):
    small, medium, large, indices = [], [], [], []
    for norm, label in profile.factors:
        tag, i = interval_index(norm, params)
        if tag == SMALL:
            small.append((norm, label))
        else:
            indices.append(i)
            (medium if tag == MEDIUM else large).append((norm, label, i))
    return small, medium, large, indices


def min_overbalance(counts, f_bound, max_functions=MAX_FUNCTIONS):
    """
    min |sum_C f(C) counts[C]| over nonzero f with values in [-f_bound, f_bound].

    Returns:
        int or None (None when no nonzero f exists)
    """
    F = int(math.floor(f_bound))
    if F < 1 or len(counts) == 0:
        return None
    total = (2 * F + 1) ** len(counts)
    if total > max_functions:
        raise ValueError(f"{total} test functions exceed the cap {max_functions}; lower f_bound")
    values = np.array(list(itertools.product(range(-F, F + 1), repeat=len(counts))), dtype=np.int64)
    values = values[np.any(values != 0, axis=1)]
    return int(np.abs(values @ np.asarray(counts, dtype=np.int64)).min())


def evaluate_criteria(profile, params, config):
    """All eight criteria, in order, each with its diagnostics."""
    for label in profile.labels:
        if label not in config.classes:
            raise KeyError(f"Unknown class label '{label}'")
    th = config.resolve(params)
    lam = config.loosen
    log_lam = math.log(lam)
    small, medium, large, indices = _canonical_grid(profile, params)
    S = profile.omega
    log_a0 = math.log(params.a0)
    log_small = sum(math.log(n) for n, _ in small)
    results = []

    results.append((S <= th["max_primes"] * lam, {"omega": S, "max": th["max_primes"]}))

    distinct = len(set(indices)) == len(indices)
    log_sup = log_small + sum(log_a0 + (i + 1) * params.log_alpha for i in indices)
    results.append((distinct and log_sup <= params.log_H + log_lam,
                    {"distinct": distinct, "log_sup": log_sup, "log_H": params.log_H}))

    results.append((len(small) <= th["max_small"] * lam and len(medium) <= th["max_medium"] * lam,
                    {"small": len(small), "medium": len(medium), "max_small": th["max_small"],
                     "max_medium": th["max_medium"]}))

    results.append((S >= th["min_primes"] / lam, {"omega": S, "min": th["min_primes"]}))

    tolerance = lam * S ** th["balance_exponent"]
    large_counts = Counter(c for _, c, _ in large)
    deviation = max((abs(large_counts[c] - size / config.group_order * S) for c, size in config.classes.items()),
                    default=0.0)
    results.append((deviation <= tolerance, {"deviation": deviation, "tolerance": tolerance}))

    if config.ell != 2 or config.siegel_d is None:
        results.append((True, {"applies": False}))
    else:
        value = config.siegel_base * math.prod(n for n, _ in small)
        results.append((value % config.siegel_d != 0, {"applies": True, "value": value, "d": config.siegel_d}))

    log_min = log_small + sum(log_a0 + i * params.log_alpha for i in indices)
    identity = [math.log(n) for n, c, _ in large if c == config.identity]
    low = sum(1 for v in identity if v <= th["log_low_norm"] + log_lam)
    high = sum(1 for v in identity if v >= th["log_high_norm"] - log_lam)
    results.append((log_min >= th["log_min_grid_norm"] - log_lam and low >= th["min_low"] / lam
                    and high >= th["min_high"] / lam,
                    {"log_min_norm": log_min, "low": low, "high": high, "min_low": th["min_low"],
                     "min_high": th["min_high"]}))

    all_counts = Counter(profile.labels)
    worst = min_overbalance([all_counts[c] for c in sorted(config.classes)], th["f_bound"], config.max_functions)
    needed = S ** th["overbalance_exponent"] / lam
    results.append((worst is None or worst >= needed, {"min_sum": worst, "needed": needed}))

    return [CriterionResult(j + 1, CRITERIA[j], bool(ok), details) for j, (ok, details) in enumerate(results)]


def classify_ideal(profile, params, config):
    """
    Returns:
        Classification: Good, or Bad(j) for the first failed criterion j
    """
    results = evaluate_criteria(profile, params, config)
    bad = next((r.index for r in results if not r.passed), None)
    return Classification(bad, results)


def _classify_shard(profiles, params, config):
    return Counter(classify_ideal(p, params, config).label for p in profiles)


def classification_histogram(profiles, params, config, workers=1):
    """Counter of verdict labels ("Good", "Bad(1)", ...) over a profile stream."""
    profiles = list(profiles)
    shards = [profiles[i:i + HISTOGRAM_SHARD] for i in range(0, len(profiles), HISTOGRAM_SHARD)]
    hist = Counter()
    for part in run_sharded(partial(_classify_shard, params=params, config=config), shards, workers):
        hist.update(part)
    return hist


def cumulative_bad(hist):
    """Number of profiles failing some criterion <= j, for j = 1..8."""
    out, running = [], 0
    for j in range(1, len(CRITERIA) + 1):
        running += hist.get(f"Bad({j})", 0)
        out.append(running)
    return out


def loosening_ladder(profiles, params, config, factors=(1, 2, 4, 8), workers=1):
    """Histograms of one profile set under increasingly loose thresholds."""
    profiles = list(profiles)
    ladder = []
    for factor in factors:
        hist = classification_histogram(profiles, params, config.loosened(factor), workers)
        logger.info(f"loosen x{factor}: {hist.get('Good', 0)} good of {len(profiles)}")
        ladder.append((factor, hist))
    return ladder
