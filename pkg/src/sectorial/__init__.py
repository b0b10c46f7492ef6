"""Lax-Milgram operators, sectorial form families and semigroup holomorphy,
certified numerically on finite-dimensional complex Hilbert spaces."""

from .errors import *  # noqa: F401,F403
from .hilbert import (
    AntiDual,
    DualVector,
    Embedding,
    Form,
    HilbertSpace,
    dual_norm,
    identity_embedding,
    inner,
    make_space,
    norm,
    op_norm,
    standard_space,
)
from .holo import (
    FormFamily,
    HolomorphyReport,
    UniformSectorCertificate,
    cauchy_residual,
    eval_family,
    normalize_family,
    perturbation_radius,
    resolvent,
    resolvent_holomorphy_check,
    shift_family,
)
from .laxmilgram import (
    AssociatedOperator,
    CoercivityCertificate,
    accretivity_margin,
    associated_operator,
    canonical_injection,
    coercivity_constant,
    laxmilgram_inverse_norm,
    laxmilgram_solve,
)
from .sector import (
    SectorEstimate,
    form_norm,
    max_vertex,
    min_semiangle,
    norm_equivalence_check,
    numerical_range_sample,
    sector_check,
)
from .semigroup import (
    EulerApprox,
    euler_approx,
    exponential_formula_convergence,
    expm,
    matrix_exponential,
    resolvent_power_bound_check,
    sector_semigroup_check,
    semigroup_holomorphy_check,
)

__version__ = "0.1.0"
