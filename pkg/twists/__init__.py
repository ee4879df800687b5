from .curve_util import (CurveSpec, FULL2TORSION, KLAGSBRUN, PrecisionError, TechnicalConditionError, is_square,
                         is_squarefree, squarefree_part, four_isogeny_products, no_cyclic_4_isogeny,
                         check_technical_conditions)
from .local_image import REAL, square_class, is_local_square, LocalSearch, search_until
from .descent import (SelmerResult, PhiSelmer, full2_local_image, selmer2_for_roots, two_selmer_rank,
                      phi_selmer_dims, favored_klagsbrun, frobenius_label, label_matrix, curve_module_spec,
                      isogeny_kernels, parity_bucket)
from .empirics import (TwistRecord, RECORD_COLUMNS, KLAGSBRUN_COLUMNS, squarefree_range, twist_records,
                       ParityReport, parity_audit, DistributionComparison, parity_mixture, compare_records,
                       empirical_distribution, TamagawaAudit, tamagawa_bound_audit, rank_boundedness,
                       klagsbrun_records)
