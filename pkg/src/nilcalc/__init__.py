"""nilcalc: exact structure theory and spectral verdicts for graded nilpotent
Lie algebras: coadjoint orbits, Pfaffians and flat orbits, Maslov/eta cocycles,
flat-orbit representations on Hermite bases, and H-ellipticity engines."""

__version__ = "0.1.0"

from .liealg import (
    GradedNilpotentLieAlgebra,
    JordanHolderFlag,
    LieAlgebraError,
    Subspace,
    UnsupportedStepError,
    bch,
    center,
    descending_central_series,
    dilation_apply,
    is_automorphism,
    is_graded_automorphism,
    jordan_holder_basis,
    mohsen_modification,
    mohsen_standard_flag,
    step2_normal_form,
    step_length,
    validate,
)
from .coadjoint import (
    Covector,
    InvariantViolation,
    JumpProfile,
    PfaffianPolynomial,
    aut_action_on_lambda,
    central_cocycle,
    enumerate_strata,
    has_flat_orbits,
    is_flat,
    is_on_gamma_partial,
    jump_indices,
    kirillov_form,
    pfaffian_on_center_dual,
    stabilizer,
    vergne_polarization,
)
from .lagrangian import (
    Lagrangian,
    SymplecticSpace,
    eta_pair,
    is_lagrangian,
    lion_cocycle_check,
    maslov_triple,
)
from .symbolrep import (
    FlatRepresentation,
    PBWSymbol,
    TruncatedOperator,
    flat_rep,
    fock_layer_operator,
    gamma_k,
    harmonic_oscillator,
    represent_symbol,
)
from .hellip import (
    BvEOperatorSpec,
    EllipticityReport,
    RocklandCheckConfig,
    check_bve_at,
    check_bve_sphere,
    check_engel_gamma,
    fiber_kernel_report,
    rockland_bruteforce,
)

__all__ = [name for name in dir() if not name.startswith("_")]
