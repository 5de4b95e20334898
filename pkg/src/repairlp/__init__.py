"""Database repairs and consistent query answering with disjunctive logic programs."""
from .compiler import RepairMode, RicPolicy, StabilizerPolicy
from .cqa import (
    CqaResult,
    RepairConfig,
    consistent_answers,
    evaluate_k_query,
    project_repair,
    repairs_of,
    satisfies,
    wfs_consistent_answers,
)
from .errors import (
    CompileError,
    GroundingError,
    InconsistentProgram,
    NoAdmissibleRepair,
    ParseError,
    RepairLPError,
    ResourceLimitExceeded,
    SchemaError,
    UnsafeError,
)
from .grounder import DomainDeclaration, ground
from .kernels import BACKEND
from .model import NULL, Atom, Constraint, DatabaseInstance, Literal, Repair, Schema, Var
from .parser import parse_constraints, parse_instance, parse_program, parse_query
from .solver import answer_sets
from .wfs import core, well_founded

__version__ = "0.1.0"

__all__ = [
    "RepairMode", "RicPolicy", "StabilizerPolicy", "CqaResult", "RepairConfig", "consistent_answers",
    "evaluate_k_query", "project_repair", "repairs_of", "satisfies", "wfs_consistent_answers",
    "CompileError", "GroundingError", "InconsistentProgram", "NoAdmissibleRepair", "ParseError",
    "RepairLPError", "ResourceLimitExceeded", "SchemaError", "UnsafeError", "DomainDeclaration", "ground",
    "BACKEND", "NULL", "Atom", "Constraint", "DatabaseInstance", "Literal", "Repair", "Schema", "Var",
    "parse_constraints", "parse_instance", "parse_program", "parse_query", "answer_sets", "core",
    "well_founded",
]
