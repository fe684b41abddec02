"""Small cancellation workbench for free products of finite and free groups."""

from .cancellation import (
    DehnConstants,
    PieceReport,
    SymmetrizedSet,
    check_metric_condition,
    dehn_constants,
    pieces,
    symmetrized_closure,
    validate_seven_syllables,
)
from .dehn import DehnSolver, FreeProductWordProblem, ReductionTrace
from .words import Context, FactorSpec, NormalForm, Presentation, parse_presentation

__version__ = "0.1.0"

__all__ = [
    "Context",
    "DehnConstants",
    "DehnSolver",
    "FactorSpec",
    "FreeProductWordProblem",
    "NormalForm",
    "PieceReport",
    "Presentation",
    "ReductionTrace",
    "SymmetrizedSet",
    "check_metric_condition",
    "dehn_constants",
    "parse_presentation",
    "pieces",
    "symmetrized_closure",
    "validate_seven_syllables",
    "__version__",
]
