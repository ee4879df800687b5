''' Batches of quadratic twists and the statistics computed over them. '''
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

import numpy as np
from sympy import primefactors
from tqdm import tqdm

from grid.sieve import squarefree_mask
from linalg import Subspace
from models.rank_dist import ALTERNATING, CaseParams, RankDistribution, distribution
from utils import get_logger, run_sharded
from .curve_util import check_technical_conditions
from .descent import curve_module_spec, isogeny_kernels, parity_bucket, phi_selmer_dims, two_selmer_rank

logger = get_logger(__name__)

RECORD_COLUMNS = ["d", "selmer2_dim", "r", "parity_bucket", "favored", "maxT"]
KLAGSBRUN_COLUMNS = ["d", "favored", "sel_phi", "sel_phi_hat", "tamagawa_exponent"]
SHARD_SIZE = 200


@dataclass
class TwistRecord:
    """
    r = selmer2_dim - 2, or None when the torsion image of the twist is not 2-dimensional.
    favored: no isogeny kernel T has Tamagawa ratio above 1 on the primes of d.
    """
    d: int
    selmer2_dim: int
    r: int
    favored: bool
    bucket: str
    max_tamagawa: Fraction = Fraction(1)

    def to_row(self):
        return {"d": self.d, "selmer2_dim": self.selmer2_dim, "r": self.r, "parity_bucket": self.bucket,
                "favored": self.favored, "maxT": self.max_tamagawa}


def squarefree_range(X, both_signs=True, lo=1):
    """Squarefree d with lo <= |d| <= X, ordered 1, -1, 2, -2, ..."""
    X = int(X)
    if X < max(lo, 1):
        return []
    mask = squarefree_mask(X)
    out = []
    for n in np.flatnonzero(mask):
        n = int(n)
        if n < lo:
            continue
        out.append(n)
        if both_signs:
            out.append(-n)
    return out


class _TamagawaTable(object):
    """max over T in {0, <T1>, <T2>, <T3>} of the Tamagawa ratio of a twist, from Frobenius labels."""

    def __init__(self, curve, ds):
        bad = set(curve.bad_primes())
        primes = sorted({p for d in ds for p in primefactors(abs(d)) if p not in bad})
        self.spec, self.frob = curve_module_spec(curve, primes)
        self.subspaces = [Subspace.zero(self.spec.n, 2)] + isogeny_kernels(self.spec)

    def labels(self, d):
        return [self.frob[p] for p in primefactors(abs(d)) if p in self.frob]

    def max_ratio(self, d):
        labels = self.labels(d)
        return max(self.spec.tamagawa_ratio(T, labels) for T in self.subspaces)


def _records_shard(job):
    curve, ds, depth_scale = job
    table = _TamagawaTable(curve, ds)
    out = []
    for d in ds:
        res = two_selmer_rank(curve, d, depth_scale)
        r = res.dim - 2 if res.torsion_dim == 2 else None
        ratio = table.max_ratio(d)
        out.append(TwistRecord(d, res.dim, r, ratio <= 1, parity_bucket(curve, d), ratio))
    return out


def twist_records(curve, ds, workers=1, depth_scale=1, progress=True):
    """
    Descent over every d, sharded in input order so the output does not depend on `workers`.

    Returns:
        list of TwistRecord, one per d
    """
    ds = list(ds)
    shards = [(curve, ds[i:i + SHARD_SIZE], depth_scale) for i in range(0, len(ds), SHARD_SIZE)]
    records = []
    if workers <= 1:
        for job in tqdm(shards, desc="descent", disable=not progress or len(shards) < 2):
            records.extend(_records_shard(job))
    else:
        for part in run_sharded(_records_shard, shards, workers):
            records.extend(part)
    degenerate = [rec.d for rec in records if rec.r is None]
    if degenerate:
        logger.info(f"{len(degenerate)} twists with a degenerate torsion image excluded: {degenerate[:10]}")
    return records


@dataclass
class ParityReport:
    """bucket -> Counter of selmer2_dim mod 2; a violation is a bucket holding both parities."""
    buckets: dict
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_rows(self):
        return [{"bucket": b, "even": c.get(0, 0), "odd": c.get(1, 0), "violation": b in self.violations}
                for b, c in sorted(self.buckets.items())]


def parity_audit(records, strict=False):
    """selmer2_dim mod 2 must be constant within each local bucket."""
    buckets = defaultdict(Counter)
    for rec in records:
        buckets[rec.bucket][rec.selmer2_dim % 2] += 1
    violations = sorted(b for b, c in buckets.items() if len(c) > 1)
    report = ParityReport(dict(buckets), violations)
    for b in violations:
        logger.error(f"parity violation in bucket {b}: {dict(buckets[b])}")
    if strict and violations:
        raise AssertionError(f"parity law violated in {len(violations)} buckets")
    return report


@dataclass
class DistributionComparison:
    histogram: dict
    predicted: dict
    parity_weights: dict
    tv: float
    count: int
    excluded: int

    def to_rows(self):
        js = sorted(set(self.histogram) | set(self.predicted))
        return [{"r": j, "count": self.histogram.get(j, 0),
                 "empirical": self.histogram.get(j, 0) / self.count if self.count else 0.0,
                 "predicted": self.predicted.get(j, 0.0)} for j in js]


def parity_mixture(weights):
    """sum_b w_b P^Alt(. | oo, parity b) as floats."""
    out = defaultdict(float)
    for b, w in weights.items():
        if not w:
            continue
        for j, p in distribution(None, CaseParams(ALTERNATING, parity=b), tol=Decimal("1e-12")).entries.items():
            out[j] += w * float(p)
    return dict(out)


def compare_records(records, bucket=None):
    """Histogram of r against the parity-restricted alternating limit, mixed by the observed parity shares."""
    kept = [rec for rec in records if bucket is None or rec.bucket == bucket]
    usable = [rec.r for rec in kept if rec.r is not None]
    hist = dict(sorted(Counter(usable).items()))
    count = len(usable)
    if not count:
        return DistributionComparison({}, {}, {}, 0.0, 0, len(kept))
    parity = Counter(r % 2 for r in usable)
    weights = {b: parity.get(b, 0) / count for b in (0, 1)}
    predicted = parity_mixture(weights)
    empirical = RankDistribution({j: Fraction(c, count) for j, c in hist.items()}, None, None, ell=2)
    tv = empirical.total_variation(predicted)
    return DistributionComparison(hist, predicted, weights, tv, count, len(kept) - count)


def empirical_distribution(curve, X, both_signs=True, bucket=None, workers=1, depth_scale=1, progress=True,
                           records=None):
    """
    r-histogram over squarefree |d| <= X compared with P^Alt restricted to each parity.

    Raises:
        TechnicalConditionError: the curve has a rational cyclic 4-isogeny (or is not full2torsion)
    """
    check_technical_conditions(curve)
    if records is None:
        records = twist_records(curve, squarefree_range(X, both_signs), workers, depth_scale, progress)
    comparison = compare_records(records, bucket)
    logger.info(f"{comparison.count} twists up to {X}: total variation {comparison.tv:.4f}")
    return comparison


@dataclass
class TamagawaAudit:
    c: Fraction
    worst_d: int
    count: int

    @property
    def ok(self):
        return self.count == 0 or self.c > 0


def tamagawa_bound_audit(records):
    """Largest c with 2^selmer2_dim >= c * max_T Tamagawa ratio over the batch."""
    if not records:
        return TamagawaAudit(Fraction(0), None, 0)
    worst = min(records, key=lambda rec: Fraction(2) ** rec.selmer2_dim / rec.max_tamagawa)
    c = Fraction(2) ** worst.selmer2_dim / worst.max_tamagawa
    audit = TamagawaAudit(c, worst.d, len(records))
    assert audit.ok, "Tamagawa lower bound constant must be positive"
    return audit


def rank_boundedness(records, ms=(1, 2)):
    """
    Mean of 2^(m selmer2_dim) over the lower and upper half of the |d| range, and their ratio.
    Bounded averages should give ratios near 1.
    """
    if not records:
        return []
    top = max(abs(rec.d) for rec in records)
    halves = ([rec for rec in records if abs(rec.d) <= top // 2], [rec for rec in records if abs(rec.d) > top // 2])
    rows = []
    for m in ms:
        means = [float(np.mean([2.0 ** (m * rec.selmer2_dim) for rec in half])) if half else float("nan")
                 for half in halves]
        rows.append({"m": m, "lower_mean": means[0], "upper_mean": means[1], "ratio": means[1] / means[0]})
    return rows


def _klagsbrun_shard(job):
    curve, ds, depth_scale = job
    return [phi_selmer_dims(curve, d, depth_scale) for d in ds]


def klagsbrun_records(curve, ds, workers=1, depth_scale=1):
    """favored flag and both 2-isogeny Selmer dimensions for every d."""
    ds = list(ds)
    shards = [(curve, ds[i:i + SHARD_SIZE], depth_scale) for i in range(0, len(ds), SHARD_SIZE)]
    rows = []
    for part in run_sharded(_klagsbrun_shard, shards, workers):
        rows.extend({"d": res.d, "favored": res.favored, "sel_phi": res.sel_phi, "sel_phi_hat": res.sel_phi_hat,
                     "tamagawa_exponent": res.tamagawa_exponent} for res in part)
    return rows
