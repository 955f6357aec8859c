"""Generalized planning as heuristic search over planning programs with pointers."""

from .model import GPProblem, ModelError, NumericInstance, StripsDomain, StripsInstance
from .program import PlanningProgram, format_program, parse_program
from .vm import is_solution, run, validate

__all__ = ["GPProblem", "ModelError", "NumericInstance", "StripsDomain", "StripsInstance",
           "PlanningProgram", "format_program", "parse_program", "is_solution", "run",
           "validate"]

__version__ = "0.1.0"
