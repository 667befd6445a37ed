"""Graded finitely presented modules over F_p[x]/I, their homological
invariants, and spherical approximations by iterated pushouts."""

__version__ = "0.1.0"

from .kernel import PolynomialRing, TermOrder, FieldScalar  # noqa: E402
from .groebner import RingContext, FreeModule, module_groebner, syzygies  # noqa: E402
from .fpmodule import FPModule, ModuleMap, ShortExactSequence, kernel, cokernel, pushout  # noqa: E402
from .homology import (free_resolution, syzygy, transpose, hom, ext, lambda_map,  # noqa: E402
                       canonical_module, depth, injdim_surrogate)
from .torsion import (is_n_C_spherical, is_n_semidualizing, is_n_C_torsionfree,  # noqa: E402
                      is_n_torsionfree, c_dim, left_addC_approximation)
from .approximation import (build_spherical_approximation, verify_approximation,  # noqa: E402
                            cm_approximation, ab_approximation, run_corpus, PreconditionError)
from .fixtures import fixture, corpus  # noqa: E402
from .implications import (split_retraction, lambda_of_syzygy_splits, grade_criterion,  # noqa: E402
                           cdim_at_most_depth, ext_vanishes_above_cdim, all_checks)
