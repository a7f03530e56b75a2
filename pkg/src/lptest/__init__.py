"""Property testing for LP-type optimization problems.

Sublinear testers that distinguish phi(S) <= k from instances needing an
epsilon fraction of constraint removals, instantiated for smallest enclosing
ball, smallest intersecting ball, smallest annulus, linear feasibility and
labeled-point separability; plus adversarial instance generators and exact
verification of the underlying sampling identity.
"""

from .constraints import (
    BOX_BOUND,
    TOL,
    AnnulusCertificate,
    Ball,
    BallCertificate,
    ConstraintSet,
    HalfSpace,
    Kind,
    LabeledPoint,
    LPCertificate,
    PhiValue,
    Point,
    ProblemInstance,
    SubsetView,
    standard_delta,
)
from .core import (
    bruteforce_phi,
    check_lp_type_axioms,
    extreme_elements,
    item_violates,
    phi,
    sampling_lemma_check,
    violators,
)
from .errors import (
    BadLabelError,
    BadSpecError,
    CertificationFailedError,
    EmptyInstanceError,
    LpTestError,
    NumericalFailure,
    TooLargeError,
)
from .generators import (
    Family,
    FamilySpec,
    build_meb_family,
    build_separability_family,
    certify_meb_family,
    certify_separability_family,
    empirical_group_discovery,
    expected_group_discovery_queries,
    moment_curve_points,
    random_instance,
)
from .geometry import (
    min_annulus,
    min_enclosing_ball,
    min_intersecting_ball,
    simplex_circumradius,
    unit_simplex_points,
)
from .linprog import (
    LinearConstraint,
    LPResult,
    TolerantConfig,
    exhaustive_max_feasible,
    max_feasible_subset,
    run_linear_feasibility_tester,
    run_tolerant_feasibility_tester,
    solve_lp_max_x1,
    vertex_enumeration_max_x1,
)
from .separability import (
    FeatureMap,
    LabeledPointSet,
    affine_lift,
    lift,
    reduce_to_constraints,
    run_multilabel_tester,
)
from .tester import TesterConfig, estimate_verdict_probability, run_lptype_tester
from .verdict import AcceptanceEstimate, TesterVerdict, derive_seed

__version__ = "0.1.0"
