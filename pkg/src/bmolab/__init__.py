"""bmolab: numerical workbench for commutator lower bounds.

Function spaces and oscillation norms, homogeneous-kernel singular and
fractional integral operators, their commutators, and the constructive
shifted-cube machinery that certifies oscillation-norm lower bounds from
commutator values at desk scale.
"""

from ._kernels import backend_name
from .certificates import (
    LowerBoundReport,
    ShiftCertificate,
    TestPair,
    bilinear_pointwise_certificate,
    bmo_lower_bound,
    build_test_pair,
    find_bilinear_shift,
    find_shift,
    operator_norm_probe,
    pointwise_certificate,
)
from .commutators import CommutatorTask, bilinear_commutator_apply, commutator_apply
from .embeddings import indicator_norm_check, lorentz_product_check, morrey_product_check
from .geometry import Cube, GridFunction, dilate, dyadic_family, enriched_dyadic_family, integrate, translate
from .operators import (
    BilinearFractionalSpec,
    KernelAdmissibilityError,
    KernelSpec,
    SphereSymbol,
    apply_I2,
    apply_T,
    bilinear_kernel_oscillation,
    check_first_moments,
    check_mean_zero,
    directional_inf_oscillation,
    kernel_oscillation,
    lebesgue_point_modulus,
    lower_upper_cone,
)
from .spaces import (
    MuFunctional,
    RearrangedProfile,
    SpaceSpec,
    bmo_mu_norm,
    decreasing_rearrangement,
    indicator_norm,
    lipschitz_seminorm,
    mean_oscillation,
    norm,
    orlicz_weak_ratio,
)
from .weights import Weight, ap_constant, apq_constant, bloom_inequality_check, doubling_constant, product_weight

__version__ = "0.1.0"
