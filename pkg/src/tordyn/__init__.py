"""tordyn: exact dynamics of torus automorphisms on the space of subtori.

Decides distality of the action on subtori, constructs families of
codimension-1 subtori with pairwise disjoint orbits, and emits machine
checkable non-expansivity certificates, all in exact integer arithmetic.
"""

from .dynamics import (
    DistalityVerdict,
    GroupReport,
    InvariantSubspaceReport,
    OrbitReport,
    act,
    acts_distally_on_subp,
    converges_to_full,
    dual_matrix,
    group_is_finite,
    invariant_rational_subspaces,
    is_distal_linear,
    is_ergodic,
    orbit,
    orbit_is_periodic,
)
from .families import (
    Budget,
    DisjointFamilyCertificate,
    FixedSubtoriReport,
    NonExpansivityCertificate,
    disjoint_hyperplane_orbits,
    fixed_subtori,
    non_expansivity_certificate,
    unipotent_family,
)
from .intmat import UnimodularMatrix, char_poly, matrix_order
from .lattices import Lattice, hnf_basis, saturate_rows
from .metric import (
    IsolationReport,
    MetricEstimate,
    hausdorff_distance,
    isolation_radius_lower_bound,
)
from .polynomials import cyclotomic, cyclotomic_orders_if_product, rational_factors
from .subtori import (
    PrimitiveCovector,
    Subtorus,
    annihilator,
    contains,
    covector_to_hyperplane,
    hyperplane_to_covector,
)
from .verify import VerificationResult, verify_certificate

__version__ = "0.1.0"
