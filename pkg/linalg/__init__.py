from .field_matrix import (FieldMatrix, rank, kernel_dim, rref_mod, check_modulus, sample_uniform,
                           sample_alternating, sample_uniform_batch, sample_alternating_batch, batch_rank,
                           gaussian_binomial, corank_histogram_uniform, corank_histogram_alternating)
from .subspace import Subspace, EnumerationCapError, enumerate_subspaces, kernel_basis
