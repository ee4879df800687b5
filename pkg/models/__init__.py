from .rank_dist import (CaseParams, RankDistribution, ApproxValue, MonteCarloEstimate, p_nonselfdual,
                        p_alternating, p_finite, p_inf, distribution, parity_split, transition_matrix,
                        markov_sequence_prob, sample_rank_sequence, moment_theoretical, moment_empirical)
from .moment_inversion import (MomentVector, Polynomial, CoefficientBound, Recovery, interpolate_geometric,
                               tail_coefficient_bounds, forward_moments, recover_distribution)
from .simplex import LPResult, linprog_exact, solve_standard
from .module_algebra import (GaloisModuleSpec, ConnectingMap, DimensionProfile, SUBQUOTIENTS, N_OMEGA, N_OMEGA_MOD_T,
                             QUOTIENT_OMEGA, separate_from_origin, direct_sum, power, verify_cofavored_powers,
                             verify_graph_structure, load_fixture, spec_to_json, canonical_hash)
from .frobenius_model import (ClassModel, ConstraintSet, G1Report, FavoredProbability, covariance, sample_counts,
                              estimate_P, estimate_P0, exact_orthant, exact_P_single, convolved_P_single,
                              exact_congruence_prob, verify_G1_model, favored_probability)
