"""Toy imperative language: parsing, interpretation, localization, mutation."""

from .interp import (DEFAULT_STEP_BUDGET, FitnessReport, ToyFault,
                     compile_program, passes_all, run_tests)
from .localize import LocalizeResult, NothingToRepair, localize
from .mutate import (ALL_OPERATORS, COARSE_OPERATORS, Edit, GROUP_OF,
                     InapplicableOperator, OPERATOR_GROUPS, apply_edit,
                     apply_edits, enumerate_edits, mint_edit)
from .suite import SuiteFormatError, TestCase, TestSuite, load_suite, parse_suite
from .syntax import (ParseError, Program, parse_expression, parse_program,
                     print_expr, print_program, print_statement,
                     program_statements, same_shape, walk_statements)

__all__ = [
    "ALL_OPERATORS", "COARSE_OPERATORS", "DEFAULT_STEP_BUDGET", "Edit",
    "FitnessReport", "GROUP_OF", "InapplicableOperator", "LocalizeResult",
    "NothingToRepair", "OPERATOR_GROUPS", "ParseError", "Program",
    "SuiteFormatError", "TestCase", "TestSuite", "ToyFault", "apply_edit",
    "apply_edits", "compile_program", "enumerate_edits", "load_suite",
    "localize", "mint_edit", "parse_expression", "parse_program",
    "passes_all", "print_expr", "print_program", "print_statement",
    "program_statements", "run_tests", "same_shape", "walk_statements",
]
