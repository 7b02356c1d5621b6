"""Exact computer algebra for codimension-2 determinantal ideals: symbolic
powers by saturation, birational inversion factors, and desk-scale
verification of the structural identities tying the two together."""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    GenericityError,
    InversionFailure,
    MembershipError,
    MissingAssignmentError,
    NonHomogeneousError,
    NotDivisibleError,
    ParseError,
    RingMismatchError,
    ShapeError,
    SymdetError,
)
from .ring import (
    QQ,
    Block,
    FieldSpec,
    MonomialOrder,
    Polynomial,
    RingSpec,
    exact_divide,
    parse_poly,
    partial_derivatives,
    poly_arith,
    prime_field,
    substitute,
)
from .groebner import (
    GroebnerBasis,
    GroebnerConfig,
    HilbertSeries,
    Ideal,
    eliminate,
    groebner_basis,
    hilbert_series,
    ideal_combine,
    ideal_membership,
    ideal_quotient,
    ideals_equal,
    intersect,
    krull_dimension,
    lift_into_power,
    make_ideal,
    minimal_generator_degrees,
    normal_form,
    saturate,
)
from .linmat import (
    GenericityCertificate,
    LinearFormMatrix,
    MatrixSpec,
    adjugate_det,
    dual_linear_matrix,
    eta_matrix_rank,
    fixture_matrix,
    jacobian_dual,
    jacobian_matrix,
    minors_ideal,
    random_general_matrix,
    signed_maximal_minors,
    tchernev_matrix,
)
from .biratio import (
    InversionData,
    KernelPresentation,
    build_inversion_data,
    cremona_jacobian_identity,
    image_ideal,
    inverse_representatives,
    kernel_presentation,
    make_rational_map,
    q_polynomials,
    source_inversion_factor,
    w_nzd_check,
)
from .sympow import (
    EiMaTable,
    SymbolicPowerResult,
    annihilator_quotient,
    eisenbud_mazur_check,
    fresh_generators,
    symbolic_generator_table,
    symbolic_power,
)
from .cli import ScenarioConfig, VerificationReport, emit_report, run_scenario
