"""Exact fault inference for troubleshooting models via decision-diagram
model counting."""

__version__ = "0.1.0"

from .bench import BenchRecord, run_benchmark, sweep_suite
from .counting import (
    CountingError,
    Evidence,
    NodeValues,
    OpCounter,
    WeightFunction,
    card,
    card_with_evidence,
    merge_overlapping,
    naive_weighted_card,
    node_values,
    weighted_card,
    weighted_node_values,
)
from .formula import Formula, FormulaError, Var, parse_formula
from .generate import GenSpec, GenerationError, generate_model
from .inference import (
    PosteriorResult,
    StrategyMismatchError,
    TsEvidence,
    cause_counts,
    evidence_probability,
    posteriors,
)
from .kernel import (
    CompiledKernel,
    FaultMode,
    KernelError,
    compile_kernel,
    kernel_formula,
    order_variables,
    parse_fault_mode,
    size_bound,
    with_problem_forced,
)
from .model import (
    ActionVar,
    CauseVar,
    ModelFormatError,
    ModelIssue,
    SystemVar,
    TroubleshootingModel,
    parse_model,
    serialize_model,
    validate,
)
from .oracle import (
    JointTable,
    OracleBudgetError,
    brute_card,
    brute_kernel_card,
    brute_posteriors,
    build_joint,
    kernel_satisfied,
    query_joint,
)
from .robdd import TERM0, TERM1, Robdd, VarOrder, build
from .sample import SAMPLE_MODEL_TEXT, sample_model

__all__ = [
    "ActionVar",
    "BenchRecord",
    "CauseVar",
    "CompiledKernel",
    "CountingError",
    "Evidence",
    "FaultMode",
    "Formula",
    "FormulaError",
    "GenSpec",
    "GenerationError",
    "JointTable",
    "KernelError",
    "ModelFormatError",
    "ModelIssue",
    "NodeValues",
    "OpCounter",
    "OracleBudgetError",
    "PosteriorResult",
    "Robdd",
    "SAMPLE_MODEL_TEXT",
    "StrategyMismatchError",
    "SystemVar",
    "TERM0",
    "TERM1",
    "TroubleshootingModel",
    "TsEvidence",
    "Var",
    "VarOrder",
    "WeightFunction",
    "brute_card",
    "brute_kernel_card",
    "brute_posteriors",
    "build",
    "build_joint",
    "card",
    "card_with_evidence",
    "cause_counts",
    "compile_kernel",
    "evidence_probability",
    "generate_model",
    "kernel_formula",
    "kernel_satisfied",
    "merge_overlapping",
    "naive_weighted_card",
    "node_values",
    "order_variables",
    "parse_fault_mode",
    "parse_formula",
    "parse_model",
    "posteriors",
    "query_joint",
    "run_benchmark",
    "sample_model",
    "serialize_model",
    "size_bound",
    "sweep_suite",
    "validate",
    "weighted_card",
    "weighted_node_values",
    "with_problem_forced",
]
