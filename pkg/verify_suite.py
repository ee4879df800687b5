''' Invariant checks run by `selmer_stats.py verify`.

Every check returns (passed, detail). The "oracle" suite holds the exact and fast checks;
"full" adds the Monte Carlo and batch checks.
'''
import time
from fractions import Fraction

from linalg import corank_histogram_alternating, corank_histogram_uniform
from models import (CaseParams, GaloisModuleSpec, direct_sum, distribution, forward_moments, load_fixture,
                    moment_empirical, moment_theoretical, p_alternating, p_finite, p_nonselfdual, recover_distribution)
from models.rank_dist import ALTERNATING, NON_SELF_DUAL
from grid import count_admissible_twists_Q, count_pi_rk, omega_table
from twists import CurveSpec, parity_audit, squarefree_range, twist_records, two_selmer_rank
from utils import get_logger, make_rng

logger = get_logger(__name__)

CONGRUENT = CurveSpec.full2torsion(1, -1)
DESCENT_ANCHORS = {1: 2, 5: 3, 6: 3, 7: 3}
# unipotent and f4 are checked for exact separation only
FIXTURE_VERDICTS = {"sign": True, "swap": False, "unipotent_swap": True, "twisted_pair": False}


def check_enumeration():
    bad = []
    for ell in (2, 3):
        for u in (-1, 0, 1):
            params = CaseParams(NON_SELF_DUAL, ell=ell, u=u)
            for n in range(max(u, 0), 4):
                hist = corank_histogram_uniform(n - u, n, ell)
                total = sum(hist.values())
                bad += [(ell, u, n, j) for j in range(n + 1)
                        if p_nonselfdual(j, n, params) != Fraction(hist.get(j, 0), total)]
    for n in range(6):
        hist = corank_histogram_alternating(n)
        total = sum(hist.values())
        bad += [("alt", n, j) for j in range(n + 1) if p_alternating(j, n) != Fraction(hist.get(j, 0), total)]
    return not bad, f"mismatches: {bad[:5]}" if bad else "exact"


def check_normalization():
    cases = [CaseParams(ALTERNATING)] + [CaseParams(NON_SELF_DUAL, ell=ell, u=u) for ell in (2, 3) for u in (0, 1)]
    bad = [(p.to_dict(), n) for p in cases for n in range(max(p.u, 0), 13)
           if sum(p_finite(j, n, p) for j in range(n + 1)) != 1]
    return not bad, f"not normalized: {bad[:5]}" if bad else "sums are 1"


def check_moment_identity():
    cases = [CaseParams(ALTERNATING, parity=b) for b in (0, 1)]
    cases += [CaseParams(NON_SELF_DUAL, ell=2, u=u) for u in (-1, 0, 1)]
    worst = 0.0
    for params in cases:
        dist = distribution(None, params)
        for m in range(5):
            worst = max(worst, abs(float(dist.moment(m)) - float(moment_theoretical(m, params))))
    spot = moment_theoretical(1, cases[0]) == 3 and moment_theoretical(2, cases[0]) == 15
    return worst < 1e-9 and spot, f"max deviation {worst:.2e}"


def check_inversion():
    target = {0: Fraction(1, 3), 2: Fraction(1, 2), 5: Fraction(1, 6)}
    moments = forward_moments(target, 6, 2)
    rec = recover_distribution(moments, 2, 6)
    ok = all(rec.distribution[j] == target.get(j, 0) for j in range(7))
    return ok, f"residual {rec.residual}"


def twisted_pair():
    """unipotent + swap summed with its copy where the two classes trade actions; not potentially favored."""
    unipotent, swap = load_fixture("unipotent"), load_fixture("swap")
    first = GaloisModuleSpec(2, unipotent.omega, {"x": unipotent.classes["sigma"], "y": swap.classes["swap"]},
                             name="a")
    second = GaloisModuleSpec(2, unipotent.omega, {"x": swap.classes["swap"], "y": unipotent.classes["sigma"]},
                              name="b")
    return direct_sum(first, second, name="twisted_pair")


def separation_errors(result):
    """Exact checks of the superlative or certificate attached to a potential-favoredness result."""
    vectors = [tuple(Fraction(x) for x in f) for f in result.vectors]
    w, lam = result.superlative, result.certificate
    if (w is None) == (lam is None):
        return ["exactly one of superlative and certificate must be set"]
    errors = []
    if w is not None:
        errors += [f"<w, {f}> <= 0" for f in vectors if sum(Fraction(a) * b for a, b in zip(w, f)) <= 0]
    else:
        lam = [Fraction(x) for x in lam]
        if any(x < 0 for x in lam) or sum(lam) != 1:
            errors.append("certificate is not a convex combination")
        if any(sum(l * f[i] for l, f in zip(lam, vectors)) != 0 for i in range(len(result.labels))):
            errors.append("certificate does not sum to zero")
    if result.favored != (result.condition_holds and w is not None):
        errors.append("verdict disagrees with its condition and separation")
    return errors


def check_fixtures():
    specs = {name: load_fixture(name) for name in ["sign", "swap", "unipotent", "unipotent_swap", "f4"]}
    specs["twisted_pair"] = twisted_pair()
    results = {name: spec.is_potentially_favored() for name, spec in specs.items()}
    bad, outcomes = [], {}
    for name, res in results.items():
        outcomes[name] = res.favored
        bad += [f"{name}: {e}" for e in separation_errors(res)]
        if name in FIXTURE_VERDICTS and res.favored != FIXTURE_VERDICTS[name]:
            bad.append(f"{name}: expected favored={FIXTURE_VERDICTS[name]}")
    if results["twisted_pair"].certificate is None:
        bad.append("twisted_pair: expected a zero-sum certificate")
    return not bad, f"failures: {bad}" if bad else f"potentially favored: {outcomes}"


def check_counting():
    x = 10 ** 5
    table = omega_table(x, 10)
    ok = count_pi_rk(x, 10, 1, 0, table=table).count == 9592 - 4
    twists = count_admissible_twists_Q(10 ** 6)
    ok = ok and twists.rel_error < 0.01
    return ok, f"squarefree density error {twists.rel_error:.2e}"


def check_descent_anchors():
    dims = {d: two_selmer_rank(CONGRUENT, d).dim for d in DESCENT_ANCHORS}
    return dims == DESCENT_ANCHORS, f"dims {dims}"


def check_monte_carlo(rng):
    est = moment_empirical(1, CaseParams(ALTERNATING, parity=0), 20, 10 ** 5, rng)
    return abs(est.mean - 3) < 5 * est.stderr, f"mean {est.mean:.4f} +- {est.stderr:.4f}"


def check_parity_law(workers):
    report = parity_audit(twist_records(CONGRUENT, squarefree_range(2000), workers, progress=False))
    return report.ok, f"{len(report.buckets)} buckets, violations {report.violations}"


def run_suite(suite, seed=0, workers=1):
    """
    Returns:
        list of {check, passed, detail}
    """
    if suite not in ("oracle", "full"):
        raise NotImplementedError(f"Unknown suite {suite}")
    checks = [("enumeration", check_enumeration), ("normalization", check_normalization),
              ("moment_identity", check_moment_identity), ("inversion", check_inversion),
              ("fixtures", check_fixtures), ("counting", check_counting), ("descent_anchors", check_descent_anchors)]
    if suite == "full":
        rng = make_rng(seed)
        checks += [("monte_carlo", lambda: check_monte_carlo(rng)), ("parity_law", lambda: check_parity_law(workers))]
    rows = []
    for name, fn in checks:
        start = time.time()
        try:
            passed, detail = fn()
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        rows.append({"check": name, "passed": bool(passed), "detail": detail})
        log = logger.info if passed else logger.error
        log(f"{name}: {'ok' if passed else 'FAILED'} ({detail}, {time.time() - start:.1f}s)")
    return rows
