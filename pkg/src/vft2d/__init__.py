"""Volume-dependent 2d field theories: evaluation of labeled surfaces on spectral Frobenius data."""
from .allowable import (
    Allowability,
    ComplexMetric,
    SampledDensity,
    Verdict,
    allowability,
    exterior_verdict,
    pencil_verdict,
    right_inverse,
    sqrt_det,
    total_volume,
)
from .bordism import Bordism, Component, Label, LabelKind, Piece, Step, compose, decompose, dual, monoidal, recompose
from .evaluator import (
    BlockOperator,
    UnboundedBlockOperator,
    check_adjoint,
    check_functoriality,
    check_semigroup,
    eval,
    eval_component_tqft,
    partition_function,
)
from .frobenius import FrobeniusAlgebra, validate_frobenius
from .lorentzian import (
    eval_lorentzian,
    factorization_check,
    long_distance_Linf,
    short_distance_L0,
    shift_spectrum,
    unitarity_defect,
)
from .spectral import (
    DecayDescriptor,
    GrowthCertificate,
    RiggedClass,
    SpectralVFT,
    build_spectral_vft,
    check_growth,
    classify_rigged,
    truncation_cutoff,
)
from .yang_mills import build_datum, casimir, enumerate_dominant, verify_dc_bound, weyl_dim, ym_vft

__version__ = "0.1.0"
