"""Computational verification of simultaneous shift invariance and near
invariance for subspaces of the Hardy space on the disc.

The package models Hardy-space elements by degree-capped Taylor
coefficients and provides, on top of that arithmetic:

* the interleaving lift between vector-valued and scalar elements and its
  commuting-diagram contracts (``veclift``),
* finite-band Laurent matrix algebra with inner-ness and analyticity
  verdicts, including the block shift matrices that realise higher shift
  powers under the lift (``laurent``),
* capped span frames and exact monomial exponent-set models with
  projections, intersections and complements (``subspaces``),
* definition-based invariance / near-invariance checkers and the
  simultaneous-invariance pipelines (``invariance``),
* kernel-column extraction and the peeling decomposition with its
  certification pipeline (``hitt``),
* finite products of disc automorphisms, their Toeplitz operators, model
  space bases, layer coordinates and subspace transfer (``blaschke``),
* a batch CLI over JSON problem files with deterministic reports
  (``cli``).

Every verdict is computed from the definitions at an explicit tolerance
and carries a machine-checkable witness on FAIL; claimed results from the
literature are audited, not assumed.
"""

from .errors import (BudgetExceeded, DepthExhausted, DimensionMismatch,
                     EmptyInput, HardyShiftError, NoConvergence, NotAMember,
                     NotAnalytic, NotASubspaceOf, OutOfCap, ParamOutOfRange,
                     ZeroOnCircle)
from .series import (TaylorPoly, coshift_pow, inner_product, monomial, mul,
                     shift_pow, taylor, zero)
from .veclift import (VectorPoly, check_shift_diagram, t_m_apply, t_m_invert,
                      unit_vector, vector)
from .laurent import (LaurentMatrix, adjoint_on_circle, apply_matrix,
                      build_sigma, diag_polys, from_poly_grid, identity,
                      is_analytic, is_inner, matmul, toeplitz_adjoint_apply)
from .subspaces import (MonomialSubspace, SpanSubspace, intersect,
                        intersect_shifted, monomial_membership,
                        ortho_complement_within, orthonormalize, project)
from .invariance import (CheckReport, OperatorSpec, PipelineReport,
                         build_model_space, build_theta_range,
                         check_invariance, check_near_invariance,
                         verify_theorem_multi, verify_theorem_pipeline)
from .hitt import (CertifyReport, HittDecomposition, JMapResult, KernelColumn,
                   build_j_map, certify_theta, extract_kernels, hitt_decompose)
from .blaschke import (BlaschkeProduct, WoldFrame, build_wold_frame,
                       check_conjugation, model_basis, power_expansion,
                       tail_bound, taylor_expand, toeplitz_apply,
                       transfer_subspace, u_apply, u_invert)

__version__ = "0.1.0"
