''' Command line front end: one subcommand per computation, tables as CSV or JSON.

    python selmer_stats.py dist --case alternating --n 4
    python selmer_stats.py invert --moments 1,3,15 --ell 2
    python selmer_stats.py descend --curve full2torsion:1,-1 --dmax 1000 --out twists.csv
    python selmer_stats.py verify --suite oracle
'''
import argparse
import json
import logging
import sys
from decimal import Decimal
from fractions import Fraction

from grid import (CriteriaConfig, KroneckerClassFn, ResidueClassFn, count_admissible_twists_Q, count_pi_rk,
                  cumulative_bad, grid_params, loosening_ladder, omega_table, read_profiles, sample_profiles_Q)
from models import (CaseParams, ClassModel, ConstraintSet, MomentVector, canonical_hash, distribution,
                    favored_probability, forward_moments, load_fixture, moment_empirical, moment_theoretical,
                    parity_split, recover_distribution, verify_G1_model)
from models.rank_dist import ALTERNATING, NON_SELF_DUAL
from twists import (KLAGSBRUN_COLUMNS, RECORD_COLUMNS, CurveSpec, check_technical_conditions, compare_records,
                    klagsbrun_records, parity_audit, rank_boundedness, squarefree_range, tamagawa_bound_audit,
                    twist_records)
from utils import RunConfig, get_logger, make_rng, setup_logger, write_document, write_table
from verify_suite import run_suite

logger = get_logger(__name__)


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _fraction_list(text):
    return [Fraction(x.strip()) for x in text.split(",") if x.strip()]


def _curve(text):
    try:
        return CurveSpec.from_string(text)
    except NotImplementedError as e:
        raise ValueError(str(e))


def _size(text):
    return None if text in ("inf", "oo") else int(text)


def parse_option(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    # io
    common.add_argument('--seed', type=int, default=None, help='Random seed, recorded in every header [default: 0]')
    common.add_argument('--workers', type=int, default=None, help='Worker processes [default: 1]')
    common.add_argument('--out', default=None, help='Output file, - for stdout [default: -]')
    common.add_argument('--format', default=None, choices=['csv', 'json'], help='Output format [default: csv]')
    common.add_argument('--precision-digits', dest='precision_digits', type=int, default=None,
                        help='Decimal digits for limit values [default: 50]')
    common.add_argument('--params-file', dest='params_file', default=None,
                        help='JSON file with option values; explicit flags win [default: None]')
    common.add_argument('--log_dir', default=None, help='Also write log.txt here [default: None]')
    common.add_argument('--quiet', action='store_true', default=None, help='Only log warnings and errors')

    parser = argparse.ArgumentParser(prog='selmer_stats.py', description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest='subcommand', required=True)

    # Rank distributions
    dist = sub.add_parser('dist', parents=[common], help='P(j | n) and its limit')
    dist.add_argument('--case', default=ALTERNATING, choices=[ALTERNATING, NON_SELF_DUAL])
    dist.add_argument('--n', type=_size, default=None, help='Matrix size, inf for the limit [default: inf]')
    dist.add_argument('--ell', type=int, default=2, help='Prime [default: 2]')
    dist.add_argument('--u', type=int, default=0, help='Row deficit n - rows [default: 0]')
    dist.add_argument('--parity', type=int, default=None, choices=[0, 1],
                      help='Parity of the alternating limit; both parity tables are added when omitted')

    moments = sub.add_parser('moments', parents=[common], help='Theoretical, exact and sampled moments')
    moments.add_argument('--case', default=ALTERNATING, choices=[ALTERNATING, NON_SELF_DUAL])
    moments.add_argument('--ell', type=int, default=2, help='Prime [default: 2]')
    moments.add_argument('--u', type=int, default=0, help='Row deficit [default: 0]')
    moments.add_argument('--parity', type=int, default=0, choices=[0, 1], help='Alternating parity [default: 0]')
    moments.add_argument('--max_m', type=int, default=4, help='Largest moment order [default: 4]')
    moments.add_argument('--n', type=_size, default=20, help='Sampled matrix size [default: 20]')
    moments.add_argument('--trials', type=int, default=0, help='Monte Carlo trials, 0 to skip [default: 0]')

    invert = sub.add_parser('invert', parents=[common], help='Distribution from its moments')
    invert.add_argument('--moments', type=_fraction_list, required=True, help='M_0,M_1,... (exact rationals)')
    invert.add_argument('--ell', type=int, default=2, help='Moment base [default: 2]')
    invert.add_argument('--j_max', type=int, default=None, help='Largest j [default: #moments - 1]')
    invert.add_argument('--signed', type=_fraction_list, default=None, help='Values at the nodes -l^k (signed mode)')
    invert.add_argument('--bound', type=Fraction, default=None,
                        help='B >= sum_i |a_i| l^{m i}, m = #moments; required with --eps')
    invert.add_argument('--eps', type=Fraction, default=None,
                        help='Also emit coefficient bounds for a function within eps of zero at the nodes')

    # Module algebra and the Frobenius model
    module = sub.add_parser('module', parents=[common], help='Favored / cofavored analysis of a module fixture')
    module.add_argument('--fixture', required=True, help='Bundled fixture name or JSON path')
    module.add_argument('--profile', default=None, help='Comma separated class labels for Tamagawa ratios')

    frob = sub.add_parser('frobenius', parents=[common], help='Multinomial class-count model')
    frob.add_argument('--fixture', default=None, help='Module fixture for the favored probability')
    frob.add_argument('--size', type=int, default=3, help='|G| [default: 3]')
    frob.add_argument('--modulus', type=int, default=1, help='R [default: 1]')
    frob.add_argument('--functions', default='1,-1,0', help='Constraints f_j, ";" separated [default: 1,-1,0]')
    frob.add_argument('--delta', type=float, default=0.1, help='Threshold exponent [default: 0.1]')
    frob.add_argument('--ladder', type=_int_list, default=[100, 1000, 10000, 100000],
                      help='Values of n [default: 100,1000,10000,100000]')
    frob.add_argument('--trials', type=int, default=100000, help='Monte Carlo trials [default: 100000]')

    # Grid machinery
    grid = sub.add_parser('grid', parents=[common], help='Grid classification and counting checks')
    grid.add_argument('--task', default='classify', choices=['classify', 'pi', 'twists'])
    grid.add_argument('--params', default='literal', choices=['literal', 'file'],
                      help='literal grid or overrides from --params-file [default: literal]')
    grid.add_argument('--log_H', type=float, default=None, help='log of the height H')
    grid.add_argument('--alpha', type=float, default=None, help='Override alpha')
    grid.add_argument('--a0', type=float, default=None, help='Override a0')
    grid.add_argument('--i_med', type=int, default=None, help='Override i_med')
    grid.add_argument('--stream', default='sieve', choices=['sieve', 'file'], help='Profile source [default: sieve]')
    grid.add_argument('--profiles', default=None, help='Profile file for --stream file')
    grid.add_argument('--classes', default='kronecker:-4', help='residue:m or kronecker:d [default: kronecker:-4]')
    grid.add_argument('--X', type=int, default=10 ** 5, help='Stream / count range [default: 100000]')
    grid.add_argument('--samples', type=int, default=None, help='Uniform samples instead of the whole range')
    grid.add_argument('--loosen', type=_int_list, default=[1], help='Loosening factors [default: 1]')
    grid.add_argument('--y', type=int, default=10, help='Small-prime bound for pi counts [default: 10]')
    grid.add_argument('--r_max', type=int, default=4, help='Largest r for pi counts [default: 4]')

    # Twists
    descend = sub.add_parser('descend', parents=[common], help='Selmer data of quadratic twists')
    descend.add_argument('--curve', required=True, type=_curve,
                         help='full2torsion:e2,e3 or klagsbrun:a,b')
    descend.add_argument('--dmax', type=int, required=True, help='Largest |d|')
    descend.add_argument('--dmin', type=int, default=1, help='Smallest |d| [default: 1]')
    descend.add_argument('--positive_only', action='store_true', help='Skip negative d')
    descend.add_argument('--depth_scale', type=int, default=1, help='Local search depth multiplier [default: 1]')
    descend.add_argument('--report', default='records',
                         choices=['records', 'parity', 'distribution', 'tamagawa', 'boundedness'])
    descend.add_argument('--bucket', default=None, help='Restrict the distribution to one parity bucket')

    verify = sub.add_parser('verify', parents=[common], help='Invariant suite; nonzero exit on failure')
    verify.add_argument('--suite', default='oracle', choices=['oracle', 'full'])

    opt = parser.parse_args(argv)
    if opt.subcommand == 'invert' and opt.eps is not None and opt.bound is None:
        invert.error('--eps needs an explicit --bound')
    return opt


def _case_params(opt):
    if opt.case == ALTERNATING:
        return CaseParams(ALTERNATING, parity=opt.parity)
    return CaseParams(NON_SELF_DUAL, ell=opt.ell, u=opt.u)


def _value_cell(p):
    return str(p) if isinstance(p, (Fraction, Decimal)) else p


def run_dist(opt, cfg, header):
    params = _case_params(opt)
    dist = distribution(opt.n, params, digits=cfg.precision_digits)
    tables = [("all", dist)]
    if opt.n is None and params.alternating and params.parity is None:
        tables += [(b, d) for b, d in parity_split(dist).items()]
    rows = [{"parity": tag, "j": j, "p": _value_cell(p), "p_float": float(p)}
            for tag, d in tables for j, p in d.entries.items()]
    header = {**header, **params.to_dict(), "n": "inf" if opt.n is None else opt.n, "err": str(dist.err)}
    write_table(rows, ["parity", "j", "p", "p_float"], cfg.out, cfg.format, header)
    return 0


def run_moments(opt, cfg, header):
    params = _case_params(opt)
    limit = distribution(None, params, digits=cfg.precision_digits)
    rng = make_rng(cfg.seed)
    rows = []
    for m in range(opt.max_m + 1):
        row = {"m": m, "theoretical": _value_cell(moment_theoretical(m, params)),
               "from_distribution": float(limit.moment(m))}
        if opt.trials:
            est = moment_empirical(m, params, opt.n, opt.trials, rng, cfg.workers)
            row.update(empirical=est.mean, stderr=est.stderr)
        rows.append(row)
    write_table(rows, ["m", "theoretical", "from_distribution", "empirical", "stderr"], cfg.out, cfg.format,
                {**header, **params.to_dict(), "n": opt.n, "trials": opt.trials})
    return 0


def run_invert(opt, cfg, header):
    j_max = len(opt.moments) - 1 if opt.j_max is None else opt.j_max
    rec = recover_distribution(opt.moments, opt.ell, j_max)
    values = MomentVector(opt.ell, opt.moments, signed_values=opt.signed, bound=opt.bound)
    doc = {"moments": values.to_json(),
           "distribution": rec.distribution.to_json(), "residual": rec.residual, "negative": rec.negative,
           "exact": rec.exact, "condition": rec.condition,
           "check": [str(v) for v in forward_moments(rec.distribution, len(opt.moments) - 1)]}
    if opt.eps is not None:
        bound = values.coefficient_bounds(opt.eps)
        doc["coefficient_bounds"] = {"mode": bound.mode, "B": str(bound.B), "eps": str(bound.eps),
                                     "bounds": [str(b) for b in bound.bounds(j_max + 1)]}
    write_document(doc, cfg.out, header)
    return 0


def run_module(opt, cfg, header):
    spec = load_fixture(opt.fixture)
    result = spec.is_potentially_favored()
    doc = {"name": spec.name, "hash": canonical_hash(spec), "potentially_favored": result.favored,
           "condition_holds": result.condition_holds, "labels": list(result.labels),
           "difference_vectors": [list(v) for v in result.vectors], "superlative": result.superlative,
           "certificate": result.certificate, "submodules": len(spec.enumerate_submodules()),
           "cofavored": len(spec.cofavored_submodules()), "uncofavored": spec.is_uncofavored()}
    if opt.profile is not None:
        labels = [l for l in opt.profile.split(",") if l]
        fav = spec.is_favored(labels)
        doc["profile"] = {"labels": labels, "favored": fav.favored, "max_ratio": fav.ratio,
                          "worst": [list(map(int, v)) for v in fav.worst.basis]}
    write_document(doc, cfg.out, header)
    return 0


def run_frobenius(opt, cfg, header):
    rng = make_rng(cfg.seed)
    if opt.fixture:
        spec = load_fixture(opt.fixture)
        res = favored_probability(spec, opt.trials, rng, workers=cfg.workers)
        doc = {"name": spec.name, "P0": res.P0.mean, "stderr": res.P0.stderr,
               "potentially_favored": res.classification.favored, "consistent": res.consistent}
        write_document(doc, cfg.out, header)
        return 0 if res.consistent else 1
    model = ClassModel.of_size(opt.size, opt.modulus)
    functions = [_int_list(f) for f in opt.functions.split(";") if f.strip()]
    constraints = ConstraintSet(functions, delta=opt.delta)
    report = verify_G1_model(model, constraints, opt.ladder, opt.trials, rng, workers=cfg.workers)
    rows = [{"n": n, "P": p, "stderr": e, "delta": d}
            for n, p, e, d in zip(report.ladder, report.P, report.stderr, report.delta_values)]
    write_table(rows, ["n", "P", "stderr", "delta"], cfg.out, cfg.format,
                {**header, "P0": report.P0, "exponent": report.exponent, "bound": report.bound,
                 "passes": report.passes})
    return 0 if report.passes else 1


def _class_fn(text):
    kind, _, value = text.partition(":")
    if kind == "residue":
        return ResidueClassFn(int(value))
    if kind == "kronecker":
        return KroneckerClassFn(int(value))
    raise NotImplementedError(f"Unknown class function {kind}")


def run_grid(opt, cfg, header):
    if opt.task == "twists":
        res = count_admissible_twists_Q(opt.X)
        rows = [{"H": res.H, "count": res.count, "kappa": str(res.kappa), "density": res.density,
                 "rel_error": res.rel_error}]
        write_table(rows, list(rows[0]), cfg.out, cfg.format, header)
        return 0
    if opt.task == "pi":
        table = omega_table(opt.X, opt.y)
        rows = []
        for r in range(1, opt.r_max + 1):
            for k in range(r):
                if opt.y ** (k + 1) > opt.X:
                    continue
                c = count_pi_rk(opt.X, opt.y, r, k, table=table)
                rows.append({"r": r, "k": k, "count": c.count, "bound": c.bound, "c_fit": c.c_fit})
        write_table(rows, ["r", "k", "count", "bound", "c_fit"], cfg.out, cfg.format, header)
        return 0
    overrides = cfg.grid_overrides if opt.params == "file" or cfg.grid_overrides else None
    log_H = opt.log_H if opt.log_H is not None else cfg.options.get("log_H")
    if log_H is None:
        raise ValueError("grid classification needs --log_H")
    params = grid_params(log_H=log_H, overrides=overrides)
    class_fn = _class_fn(opt.classes)
    config = CriteriaConfig(classes=class_fn.classes, identity="1", thresholds=cfg.options.get("thresholds", {}))
    if opt.stream == "file":
        if not opt.profiles:
            raise ValueError("--stream file needs --profiles")
        profiles = read_profiles(opt.profiles)
    else:
        profiles = sample_profiles_Q(opt.X, class_fn, rng=make_rng(cfg.seed), exhaustive=opt.samples is None,
                                     samples=opt.samples)
    rows = []
    for factor, hist in loosening_ladder(profiles, params, config, opt.loosen, cfg.workers):
        rows.append({"loosen": factor, "label": "Good", "count": hist.get("Good", 0)})
        for j, total in enumerate(cumulative_bad(hist), start=1):
            rows.append({"loosen": factor, "label": f"Bad({j})", "count": hist.get(f"Bad({j})", 0),
                         "cumulative": total})
    write_table(rows, ["loosen", "label", "count", "cumulative"], cfg.out, cfg.format,
                {**header, **params.to_dict()})
    return 0


def run_descend(opt, cfg, header):
    curve = opt.curve
    ds = squarefree_range(opt.dmax, not opt.positive_only, opt.dmin)
    header = {**header, "curve": curve.to_string()}
    if not curve.is_full2torsion:
        rows = klagsbrun_records(curve, ds, cfg.workers, opt.depth_scale)
        write_table(rows, KLAGSBRUN_COLUMNS, cfg.out, cfg.format, header)
        return 0
    if opt.report == "distribution":
        check_technical_conditions(curve)
    records = twist_records(curve, ds, cfg.workers, opt.depth_scale, progress=not cfg.quiet)
    if opt.report == "records":
        write_table([rec.to_row() for rec in records], RECORD_COLUMNS, cfg.out, cfg.format, header)
        return 0
    if opt.report == "parity":
        report = parity_audit(records)
        write_table(report.to_rows(), ["bucket", "even", "odd", "violation"], cfg.out, cfg.format,
                    {**header, "violations": len(report.violations)})
        return 0 if report.ok else 1
    if opt.report == "distribution":
        comp = compare_records(records, opt.bucket)
        write_table(comp.to_rows(), ["r", "count", "empirical", "predicted"], cfg.out, cfg.format,
                    {**header, "tv": comp.tv, "count": comp.count, "excluded": comp.excluded})
        return 0
    if opt.report == "tamagawa":
        audit = tamagawa_bound_audit(records)
        write_document({"c": audit.c, "worst_d": audit.worst_d, "count": audit.count}, cfg.out, header)
        return 0
    write_table(rank_boundedness(records), ["m", "lower_mean", "upper_mean", "ratio"], cfg.out, cfg.format, header)
    return 0


def run_verify(opt, cfg, header):
    rows = run_suite(opt.suite, cfg.seed, cfg.workers)
    write_table(rows, ["check", "passed", "detail"], cfg.out, cfg.format, header)
    return 0 if all(r["passed"] for r in rows) else 1


COMMANDS = {"dist": run_dist, "moments": run_moments, "invert": run_invert, "module": run_module,
            "frobenius": run_frobenius, "grid": run_grid, "descend": run_descend, "verify": run_verify}


def main(argv=None):
    try:
        opt = parse_option(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        cfg = RunConfig.from_args(argparse.Namespace(**vars(opt)), opt.params_file)
    except (ValueError, NotImplementedError, OSError, json.JSONDecodeError) as e:
        sys.stderr.write(f"selmer_stats.py: error: {e}\n")
        return 2
    setup_logger(output=cfg.log_dir, name="selmer", level=logging.WARNING if cfg.quiet else logging.INFO)
    logger.info(f"{cfg.subcommand} config {cfg.config_hash()} seed {cfg.seed}")
    try:
        return COMMANDS[cfg.subcommand](opt, cfg, cfg.header())
    except Exception as e:
        logger.error(f"{cfg.subcommand} failed: {type(e).__name__}: {e}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
