"""Three-qubit Bell tests: states, exact local bounds, arguments, optimization."""

from .argument import (
    ArgumentReport,
    ConditionalCheck,
    find_reality_counterexample,
    run_hardy_argument,
    run_w_argument,
)
from .errors import (
    Bell3qError,
    BudgetExceededError,
    ConfigError,
    ContractViolationError,
    EnumerationSizeError,
    ExpressionFormatError,
    NormalizationError,
    StateFormatError,
    UndefinedConditionalError,
)
from .expressions import (
    CATALOG_NOTES,
    REFERENCE_BOUNDS,
    BellExpression,
    Binding,
    CorrelatorTerm,
    ProbabilityTerm,
    Term,
    ViolationReport,
    catalog,
    catalog_ids,
    evaluate_report,
    format_expression,
    format_term,
    parse_expression_file,
    parse_expression_text,
    quantum_value,
    resolve_expression,
    term_breakdown,
    term_value,
)
from .lhv import (
    ClassicalBounds,
    DeterministicStrategy,
    SettingScheme,
    classical_bounds,
    enumerate_strategies,
    strategy_value,
)
from .optimize import (
    AnglePoint,
    CertificationResult,
    HardyOptimum,
    OptimizationResult,
    PlaneObjective,
    certify_below,
    hardy_maximum,
    maximize,
)
from .qcore import (
    DensityMatrix,
    MeasurementContext,
    Observable,
    StateVector,
    basis_index,
    concurrence,
    conditional_probability,
    correlator,
    event_probability,
    outcome_probability,
    outcome_tuples,
    partial_trace,
    permute_qubits,
)
from .states import StateSpec, build, ghz, hardy, load_custom, singlet, w

__version__ = "0.1.0"

__all__ = [
    "ArgumentReport",
    "AnglePoint",
    "Bell3qError",
    "CATALOG_NOTES",
    "REFERENCE_BOUNDS",
    "BellExpression",
    "Binding",
    "BudgetExceededError",
    "CertificationResult",
    "ClassicalBounds",
    "ConditionalCheck",
    "ConfigError",
    "ContractViolationError",
    "CorrelatorTerm",
    "DensityMatrix",
    "DeterministicStrategy",
    "EnumerationSizeError",
    "ExpressionFormatError",
    "HardyOptimum",
    "MeasurementContext",
    "NormalizationError",
    "Observable",
    "OptimizationResult",
    "PlaneObjective",
    "ProbabilityTerm",
    "SettingScheme",
    "StateFormatError",
    "StateSpec",
    "StateVector",
    "Term",
    "UndefinedConditionalError",
    "ViolationReport",
    "basis_index",
    "build",
    "catalog",
    "catalog_ids",
    "certify_below",
    "classical_bounds",
    "concurrence",
    "conditional_probability",
    "correlator",
    "enumerate_strategies",
    "evaluate_report",
    "event_probability",
    "find_reality_counterexample",
    "format_expression",
    "format_term",
    "ghz",
    "hardy",
    "hardy_maximum",
    "load_custom",
    "maximize",
    "outcome_probability",
    "outcome_tuples",
    "parse_expression_file",
    "parse_expression_text",
    "partial_trace",
    "permute_qubits",
    "quantum_value",
    "resolve_expression",
    "run_hardy_argument",
    "run_w_argument",
    "singlet",
    "strategy_value",
    "term_breakdown",
    "term_value",
    "w",
]
