"""Exact finite Markov kernels over three scalar structures, with
decision procedures for almost-sure equality, absolute continuity,
supports, idempotent classification and splitting, envelopes, the
input-output relation, and conditionals."""

from .kernel import (
    UNIT,
    BadSplit,
    DomainMismatch,
    FinMarkovError,
    FinObject,
    Kernel,
    Kind,
    KindMismatch,
    ShapeMismatch,
    StructureKind,
    UnknownLabel,
    ValidationError,
    Violation,
    associator,
    compose,
    copy_kernel,
    delta_kernel,
    discard_kernel,
    fin_object,
    identity,
    is_deterministic,
    kernel_equal,
    left_unitor,
    make_kernel,
    marginalize,
    multi_kernel,
    right_unitor,
    right_unitor_inv,
    structure,
    swap_kernel,
    tensor,
    tensor_object,
    validate,
)
from .asrel import (
    AcWitness,
    AseQuery,
    CausalityInstance,
    CodMismatch,
    UnsupportedKind,
    abs_cont,
    acsim,
    ase,
    ase_kernels,
    check_causality_instance,
    is_atomic,
    perturb_off_support,
    refute_abs_cont,
)
from .supports import (
    CellMismatch,
    EmptySupport,
    FactorizationFailed,
    NotAbsolutelyContinuous,
    NotAse,
    NotCommutative,
    NotDeterministic,
    NotInSupport,
    NotMember,
    SuppCompCell,
    SuppCompMorphism,
    SupportData,
    equalizer_factor,
    factor_through_support,
    point_lift,
    precise_supports_equiv,
    scomp_abs_cont,
    scomp_cell,
    scomp_compose,
    scomp_hom,
    scomp_identity,
    scomp_support,
    scomp_tensor_cell,
    split_support,
    support,
    support_functor_map,
)
from .idempotents import (
    BalancedCrossCheck,
    CauchySchwarzInstance,
    ClassStructure,
    IdempotentReport,
    NoSplitUpTo,
    NotASplitting,
    NotEndo,
    NotIdempotent,
    SizeLimitExceeded,
    SplitData,
    StructureViolation,
    balanced_cross_check,
    blackwell_split,
    cauchy_schwarz,
    classify,
    random_class_idempotent,
    search_split,
    two_step,
    verify_split,
)
from .envelopes import (
    EnvelopeCell,
    EnvelopeMorphism,
    Flavor,
    MarkovLawReport,
    NotBalanced,
    NotHom,
    blackwell_copy,
    cell_tensor,
    env_ase,
    env_cell,
    env_check_markov_laws,
    env_compose,
    env_discard,
    env_hom,
    env_identity,
    env_split_idempotent,
    env_tensor,
)
from .functors import (
    NotAConditional,
    ParamMismatch,
    ParamMorphism,
    RelationFunctorCheck,
    comparison_base,
    conditional,
    io_relation,
    param_compose,
    param_copy,
    param_discard,
    param_identity,
    param_lift,
    param_tensor,
    upsilon,
    upsilon_check,
    verify_conditional_unique,
)

__all__ = [name for name in dir() if not name.startswith("_")]
