"""Certified circle integrals and decay rates for sums of Cauchy kernels.

The package studies K1(z) = sum c_n / (z - t_n) and its derivative sum
K2(z) = sum c_n / (z - t_n)^2: pointwise evaluation with certified
truncation bounds, enclosure quadrature of |K|^p and ln+|K| over circles,
the classical right-hand sides those integrals stay below, and sweep /
slope-fit experiments for the decay rate in r.  Most entry points live
in the submodules; the names re-exported here cover the common path from
a family spec string to a verdict.
"""

__version__ = "0.1.0"

from .averaging import J_boundedness_check, J_identity_check, apply_J
from .bounds import (
    bootstrap_exponent,
    bootstrap_iterates,
    bound_report,
    decompose_absolute,
    decompose_first_order,
    keldysh_rhs,
    middle_trivial_rhs,
    ostrovskiy_rhs,
    single_term_bound,
    start_lemma_rhs,
    tail_lemma_rhs,
    theorem_prediction,
)
from .errors import (
    ClassInsufficientError,
    EvaluationAtPoleError,
    FamilySpecError,
    InsufficientDataError,
    KernelDecayError,
    MomentDivergesError,
    PoleProximityError,
    SignClaimViolation,
    SpecialDomainError,
    ToleranceUnreachableError,
)
from .experiments import (
    RunManifest,
    SweepRecord,
    exceptional_set_report,
    fit_decay_slope,
    middle_bootstrap_demo,
    read_csv,
    sweep,
    verify_inequalities,
    write_csv,
)
from .families import (
    BUILTIN_CATALOG,
    ConditionClass,
    ExplicitFamily,
    PoleTerm,
    SequenceFamily,
    parse_family_spec,
    single,
)
from .kernels import CertifiedValue, CircleEvaluator, eval_K1, eval_K2
from .quadrature import (
    QuadratureResult,
    circle_abs_power,
    circle_abs_power_multi,
    circle_ln_plus,
    pick_radii,
    superlevel_measure,
)
from .signsplit import (
    SignSplitPart,
    halfplane_start_predicate,
    halfplane_tail_predicate,
    smirnov_verify,
    split_start_reflected,
    split_tail,
)
from .special import eval_reference, reference_function

__all__ = [
    "__version__",
    # errors
    "KernelDecayError",
    "FamilySpecError",
    "MomentDivergesError",
    "ClassInsufficientError",
    "PoleProximityError",
    "EvaluationAtPoleError",
    "ToleranceUnreachableError",
    "SpecialDomainError",
    "InsufficientDataError",
    "SignClaimViolation",
    # families
    "BUILTIN_CATALOG",
    "ConditionClass",
    "ExplicitFamily",
    "PoleTerm",
    "SequenceFamily",
    "parse_family_spec",
    "single",
    # kernels
    "CertifiedValue",
    "CircleEvaluator",
    "eval_K1",
    "eval_K2",
    # quadrature
    "QuadratureResult",
    "circle_abs_power",
    "circle_abs_power_multi",
    "circle_ln_plus",
    "pick_radii",
    "superlevel_measure",
    # bounds
    "bootstrap_exponent",
    "bootstrap_iterates",
    "bound_report",
    "decompose_absolute",
    "decompose_first_order",
    "keldysh_rhs",
    "middle_trivial_rhs",
    "ostrovskiy_rhs",
    "single_term_bound",
    "start_lemma_rhs",
    "tail_lemma_rhs",
    "theorem_prediction",
    # sign split
    "SignSplitPart",
    "halfplane_start_predicate",
    "halfplane_tail_predicate",
    "smirnov_verify",
    "split_start_reflected",
    "split_tail",
    # averaging
    "J_boundedness_check",
    "J_identity_check",
    "apply_J",
    # experiments
    "RunManifest",
    "SweepRecord",
    "exceptional_set_report",
    "fit_decay_slope",
    "middle_bootstrap_demo",
    "read_csv",
    "sweep",
    "verify_inequalities",
    "write_csv",
    # closed-form references
    "eval_reference",
    "reference_function",
]
