"""Finite p-group quotients as checkable witnesses for separability claims."""

from .certificates import (ClaimFails, MalformedCertificate, VerificationResult, WitnessCertificate,
                           build_certificate, verify_certificate)
from .engine import (BadTransversal, InvalidInput, NotCharacteristic, NotUnipotent, SingularMatrix,
                     chatzidakis_check, conjugacy_distinguish, coset_union_class,
                     double_coset_separate, heisenberg_counterexample, heisenberg_presentation,
                     higman_check, monodromy_exponent, p_efficiency_probe, semidirect_open_subgroup,
                     separate_from_subgroup)
from .pgroup import (BudgetExceeded, ChiefSeries, FiniteGroupTable, GroupHom, NotAutomorphism,
                     are_conjugate, chief_series, closure, double_coset, element_order, h1_mod_p,
                     induced_h1_matrix, subgroup_membership, unipotent_order_check)
from .quotients import (Exhausted, NotPrimitive, TargetFamily, WrongCurveForm, heisenberg_witness,
                        hom_search, homology_witness, magnus_quotient)
from .splittings import (GraphOfGroups, amalgam, conjugate_into_factor_criterion, double_along,
                         free_product, hnn, p_part_index, quotient_index_check, splice_normal_form)
from .words import (InvalidSurface, Presentation, Word, free_group, nonseparating_curve_word,
                    separating_curve_word, surface_presentation, word)

__version__ = "0.1.0"
