"""Finite-domain quantified constraint satisfaction toolkit."""

from .budgets import Budgets, DEFAULT_BUDGETS
from .errors import BudgetError, ParseError, QcspError, WitnessRequiredError
from .model import (
    EXISTS,
    FORALL,
    Atom,
    ConstraintLanguage,
    DomainSpec,
    QuantifiedSentence,
    Relation,
    enumerate_switch_bounded,
    gamma_star,
    switch_bounded_count,
    switch_count,
    validate_sentence,
)
from .parsing import (
    load_language,
    load_sentence,
    parse_language,
    parse_sentence,
    serialize_language,
    serialize_sentence,
)
from .algebra import (
    OperationTable,
    SwitchabilityWitness,
    find_wnu,
    generate_closure,
    is_wnu,
    polymorphisms,
    preserves,
    switchability_witness,
    table_from_function,
)
from .transforms import (
    CANONICAL_FALSE,
    AlternatingSentence,
    CanonicalFalse,
    CspInstance,
    GammaColumn,
    build_power_language,
    eliminate_universals,
    gamma_columns,
    move_universals_left,
    normalize_alternating,
    omega,
    power_csp_to_qcsp,
    power_relation,
    qcsp_to_power_csp,
    reduce_universal_count,
    zeta,
)
from .solvers import (
    ClassificationReport,
    ReductionBundle,
    SolveVerdict,
    classify,
    oracle_qcsp,
    pi2_truth,
    reduce_pgp_to_csp,
    reduce_to_pi2,
    solve_csp,
    truth_of,
)

__version__ = "0.1.0"
