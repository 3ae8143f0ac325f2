"""Exact checks of Property N^S_p, kernel bundle splitting types and
regularity for linear subsystems on P^2 and Hirzebruch surfaces."""

from __future__ import annotations

from ._config import AUDIT_PRIMES, DEFAULT_PRIME
from ._kernels import BACKEND
from .harness import (Campaign, run_corollary14_campaign, run_theorem13_campaign, scan,
                      verify_known_thresholds)
from .kernel_bundles import (SplittingType, lemma3_hypothesis, restricted_kernel_splitting,
                             splitting_type_on_line, wedge_h1_vanishes)
from .koszul import (BettiTable, NSPVerdict, SectionRing, betti_table, build_module, check_NSp,
                     ideal_generator_degrees, k_normality_defect, koszul_betti, regularity)
from .linalg import Matrix, Subspace, kernel_dim, rank
from .models import Conic, Hirzebruch, HirzebruchSection, ProjectiveLine, ProjectivePlane, parse_curve, parse_model
from .subsystems import (Complete, Constrained, Explicit, Generic, Subsystem, base_point_free_check,
                         make_subsystem, parse_subsystem, restriction_image_codim)

__all__ = [
    "AUDIT_PRIMES", "BACKEND", "DEFAULT_PRIME",
    "Campaign", "run_corollary14_campaign", "run_theorem13_campaign", "scan", "verify_known_thresholds",
    "SplittingType", "lemma3_hypothesis", "restricted_kernel_splitting", "splitting_type_on_line",
    "wedge_h1_vanishes",
    "BettiTable", "NSPVerdict", "SectionRing", "betti_table", "build_module", "check_NSp",
    "ideal_generator_degrees", "k_normality_defect", "koszul_betti", "regularity",
    "Matrix", "Subspace", "kernel_dim", "rank",
    "Conic", "Hirzebruch", "HirzebruchSection", "ProjectiveLine", "ProjectivePlane", "parse_curve",
    "parse_model",
    "Complete", "Constrained", "Explicit", "Generic", "Subsystem", "base_point_free_check",
    "make_subsystem", "parse_subsystem", "restriction_image_codim",
]
