"""Kac-Moody nilradicals and Borel subalgebras over the rationals.

Build the truncated Serre quotient ñ+(<= N) of a generalized Cartan matrix,
compute its graded derivations and check automorphism constructions exactly.
"""

from .autos import (
    compose,
    diagram_lift,
    exp_ad,
    gamma0_borel,
    heisenberg_aut_check,
    identity_map,
    is_automorphism,
    torus_action,
)
from .combid import beta_sum, coeff_3_16, identity_sweep, sl2_string_check, vandermonde_check
from .deriv import (
    affine_outer_check,
    candidate_degrees_n,
    der_space_b,
    der_space_n,
    h1_report,
    outer_finite,
    verify_moody,
)
from .gcm import Affine, Finite, Gcm, Indefinite, affine_marks, classify, diagram_automorphisms, symmetrizer, validate_gcm
from .liealg import BorelAlgebra, GradedAlgebra, LieElt, build_borel, build_nilradical, peterson_mult_oracle
from .qlinalg import QMatrix
from .roots import RootVec, highest_root, highest_short_root, i0_index, real_roots_up_to_height, reflect

__version__ = "0.1.0"

__all__ = [
    "Affine",
    "BorelAlgebra",
    "Finite",
    "Gcm",
    "GradedAlgebra",
    "Indefinite",
    "LieElt",
    "QMatrix",
    "RootVec",
    "affine_marks",
    "affine_outer_check",
    "beta_sum",
    "build_borel",
    "build_nilradical",
    "candidate_degrees_n",
    "classify",
    "coeff_3_16",
    "compose",
    "der_space_b",
    "der_space_n",
    "diagram_automorphisms",
    "diagram_lift",
    "exp_ad",
    "gamma0_borel",
    "h1_report",
    "heisenberg_aut_check",
    "highest_root",
    "highest_short_root",
    "i0_index",
    "identity_map",
    "identity_sweep",
    "is_automorphism",
    "outer_finite",
    "peterson_mult_oracle",
    "real_roots_up_to_height",
    "reflect",
    "sl2_string_check",
    "symmetrizer",
    "torus_action",
    "validate_gcm",
    "vandermonde_check",
    "verify_moody",
]
