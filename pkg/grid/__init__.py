from .grid_params import (GridParameters, SMALL, MEDIUM, LARGE, grid_params, literal_values, interval_index,
                          interval_bounds, exp_iter, log_iter)
from .sieve import (SIEVE_LIMIT, primes_upto, prime_count, mobius_upto, squarefree_count, squarefree_mask,
                    smallest_prime_factor, factor_with, omega_table)
from .classify import (CRITERIA, IdealProfile, CriteriaConfig, CriterionResult, Classification, literal_thresholds,
                       evaluate_criteria, classify_ideal, classification_histogram, cumulative_bad, loosening_ladder,
                       min_overbalance, read_profiles, write_profiles)
from .counting import (ResidueClassFn, KroneckerClassFn, PiCount, AdmissibleCount, kronecker, sample_profiles_Q,
                       count_pi_rk, pi_bound, hardy_ramanujan_profile, is_unimodal, kappa_Q, count_admissible_twists_Q)
